"""Projective change of a connection by a 1-form and its inverse."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotProjectivelyRelated
from .frame import deformation_factor
from .types import ScaleState

PROJECTIVE_THRESHOLD = 1e-8


@dataclass(frozen=True)
class OneForm:
    """Frame components ``A_mu`` of ``A = A_mu theta^mu``."""

    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).reshape(4))

    def __call__(self, v) -> float:
        return float(self.a @ np.asarray(v, dtype=float))


def projective_one_form(st: ScaleState, s: float) -> OneForm:
    """``A = s R Rdot / (1 - s R^2) theta^0``."""
    w = deformation_factor(s, st.R)
    return OneForm([s * st.R * st.Rdot / w, 0.0, 0.0, 0.0])


def _pattern_matrix() -> np.ndarray:
    # column k maps A = e_k to delta^mu_nu A_rho + delta^mu_rho A_nu, flattened
    L = np.zeros((64, 4))
    d = np.eye(4)
    for k in range(4):
        A = d[k]
        L[:, k] = (np.einsum("mn,r->mnr", d, A) + np.einsum("mr,n->mnr", d, A)).ravel()
    return L


_PATTERN = _pattern_matrix()


def apply_projective(gamma, A: OneForm) -> np.ndarray:
    """``Gamma^mu_{nu rho} + delta^mu_nu A_rho + delta^mu_rho A_nu``."""
    gamma = np.asarray(gamma, dtype=float)
    return gamma + (_PATTERN @ A.a).reshape(4, 4, 4)


def extract_projective(gamma, gamma_tilde, threshold: float = PROJECTIVE_THRESHOLD,
                       ) -> tuple[OneForm, float]:
    """Least-squares 1-form relating two connections, with its residual norm.

    Raises NotProjectivelyRelated when the difference is not of the
    ``delta A + A delta`` shape to within ``threshold``.
    """
    diff = (np.asarray(gamma_tilde, dtype=float) - np.asarray(gamma, dtype=float)).ravel()
    coef, *_ = np.linalg.lstsq(_PATTERN, diff, rcond=None)
    residual = float(np.linalg.norm(diff - _PATTERN @ coef))
    if residual >= threshold:
        raise NotProjectivelyRelated(
            f"connection difference has residual {residual:.3g} outside the projective pattern",
            residual=residual)
    return OneForm(coef), residual
