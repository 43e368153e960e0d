"""Small value types passed between modules."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import SingularInput


@dataclass(frozen=True)
class CosmologyParams:
    """Curvature sign ``kappa``, gravitational constant ``G``, dust mass
    parameter ``M`` (``M = 4/3 pi rho R^3``) and deformation parameter ``s``.
    """

    kappa: int = 0
    G: float = 1.0
    M: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if self.kappa not in (-1, 0, 1) or isinstance(self.kappa, bool):
            raise SingularInput("kappa must be -1, 0, or +1")
        if not self.G > 0:
            raise SingularInput("G must be positive")
        if not self.M >= 0:
            raise SingularInput("M must be non-negative")
        if not np.isfinite(self.s):
            raise SingularInput("s must be finite")

    def replace(self, **kw) -> "CosmologyParams":
        d = asdict(self)
        d.update(kw)
        return CosmologyParams(**d)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_coords(cls, c) -> "SpacetimePoint":
        t, x, y, z = (float(v) for v in c)
        return cls(t, x, y, z)


@dataclass(frozen=True)
class ScaleState:
    """Scale factor and its first two time derivatives at time ``t``."""

    t: float
    R: float
    Rdot: float
    Rddot: float

    def __post_init__(self):
        if not self.R > 0:
            raise SingularInput(f"scale factor must be positive, got R={self.R}")

    def state_at(self, t: float) -> "ScaleState":
        """Quadratic Taylor jet about ``self.t``.

        Exact for everything that depends only on (R, Rdot, Rddot) at ``self.t``;
        lets a single state act as a local field for finite differencing.
        """
        dt = t - self.t
        return ScaleState(t, self.R + self.Rdot * dt + 0.5 * self.Rddot * dt * dt,
                          self.Rdot + self.Rddot * dt, self.Rddot)

    def as_dict(self) -> dict:
        return asdict(self)
