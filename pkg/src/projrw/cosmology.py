"""Dust Friedmann histories and their reinterpretation in the deformed metric."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import (DomainError, FriedmannViolation, MetricSingular, SingularInput, StepFailure,
                     TurningPoint)
from .frame import (DEFORMED, STANDARD, _check_tag, deformation_factor, einstein_closed_form,
                    frame_metric, rw_curvature)
from .types import CosmologyParams, ScaleState, SpacetimePoint

DEFAULT_TOL = 1e-10
FRIEDMANN_TOL = 1e-6
SHELL_GUARD = 1e-6


def friedmann_rhs_sq(R, params: CosmologyParams) -> float:
    """``2GM/R - kappa``, the right-hand side for ``Rdot^2``."""
    return 2.0 * params.G * params.M / R - params.kappa


def dust_acceleration(R, params: CosmologyParams) -> float:
    return -params.G * params.M / R**2


def friedmann_state(t, R, params: CosmologyParams, branch: str = "expanding") -> ScaleState:
    """ScaleState on the Friedmann solution through ``R`` at time ``t``."""
    if not R > 0:
        raise SingularInput("R must be positive")
    rhs = friedmann_rhs_sq(R, params)
    if rhs < 0:
        raise SingularInput(f"no real solution at R={R}: 2GM/R - kappa = {rhs:.3g} < 0")
    sign = {"expanding": 1.0, "contracting": -1.0}[branch]
    return ScaleState(t, R, sign * np.sqrt(rhs), dust_acceleration(R, params))


def constraint_residual(st: ScaleState, params: CosmologyParams) -> float:
    """``Rdot^2 - 2GM/R + kappa``."""
    return st.Rdot**2 - friedmann_rhs_sq(st.R, params)


def acceleration_residual(st: ScaleState, params: CosmologyParams) -> float:
    """``kappa + Rdot^2 + 2 R Rddot``, the spatial dust equation times ``R^2``."""
    return params.kappa + st.Rdot**2 + 2.0 * st.R * st.Rddot


def dust_density(R, params: CosmologyParams) -> float:
    return 3.0 * params.M / (4.0 * np.pi * R**3)


@dataclass
class ScaleHistory:
    samples: list
    params: CosmologyParams
    t_range: tuple
    sol: object = field(default=None, repr=False)
    status: str = "complete"

    @property
    def t(self):
        return np.array([st.t for st in self.samples])

    @property
    def R(self):
        return np.array([st.R for st in self.samples])

    @property
    def Rdot(self):
        return np.array([st.Rdot for st in self.samples])

    @property
    def Rddot(self):
        return np.array([st.Rddot for st in self.samples])

    def state_at(self, t: float) -> ScaleState:
        t0, t1 = self.samples[0].t, self.samples[-1].t
        span = max(abs(t1 - t0), 1.0)
        if self.sol is None or not (t0 - 1e-12 * span <= t <= t1 + 1e-12 * span):
            raise DomainError(f"t={t} outside history range [{t0}, {t1}]")
        R, Rd = self.sol(t)
        return ScaleState(float(t), float(R), float(Rd), dust_acceleration(float(R), self.params))

    def constraint_drift(self, mode: str = "scaled") -> float:
        """Worst Friedmann constraint violation over the samples.

        ``mode``: ``"absolute"``, ``"scaled"`` (divided by ``max(1, 2GM/R)``) or
        ``"relative"`` (divided by the largest term of the constraint).
        """
        worst = 0.0
        for st in self.samples:
            c = abs(constraint_residual(st, self.params))
            x = 2.0 * self.params.G * self.params.M / st.R
            if mode == "scaled":
                c /= max(1.0, x)
            elif mode == "relative":
                c /= max(st.Rdot**2, x, abs(self.params.kappa))
            elif mode != "absolute":
                raise ValueError(f"unknown mode {mode!r}")
            worst = max(worst, c)
        return worst


def solve_friedmann(params: CosmologyParams, R0: float, t_range, tol: float = DEFAULT_TOL,
                    branch: str = "expanding", on_turning_point: str = "stop",
                    t_eval=None) -> ScaleHistory:
    """Evolve the dust scale factor from ``R(t0) = R0`` over ``t_range``.

    The initial velocity comes from the Friedmann constraint on the chosen
    branch; the state ``(R, Rdot)`` is then integrated with
    ``Rddot = -GM/R^2``, which keeps the turning point of closed models regular.

    ``on_turning_point``: ``"stop"`` ends the history at ``Rdot = 0``,
    ``"raise"`` raises TurningPoint, ``"continue"`` follows the contracting
    branch (ending before the crunch). Histories also end just before the
    shell ``s R^2 = 1`` where the deformed metric degenerates.
    """
    if on_turning_point not in ("stop", "raise", "continue"):
        raise ValueError(f"unknown on_turning_point {on_turning_point!r}")
    t0, t1 = (float(v) for v in t_range)
    if not t1 > t0:
        raise SingularInput("t_range must be increasing")
    st0 = friedmann_state(t0, R0, params, branch)
    s = params.s
    w0 = 1.0 - s * R0 * R0
    if s != 0.0 and abs(w0) < SHELL_GUARD:
        raise MetricSingular("initial scale factor sits on the s R^2 = 1 shell")

    GM = params.G * params.M

    def rhs(t, y):
        return [y[1], -GM / y[0] ** 2]

    if st0.Rdot == 0.0 and GM > 0.0 and on_turning_point != "continue":
        # starting exactly at maximal expansion
        if on_turning_point == "raise":
            raise TurningPoint(f"expanding branch turns around at t={t0:.6g}", t=t0, R=st0.R)
        return ScaleHistory([st0], params, (t0, t1), None, "turning_point")
    moving_out = st0.Rdot > 0.0

    def turning(t, y):
        return y[1] if moving_out else 1.0
    turning.direction = -1
    turning.terminal = on_turning_point != "continue"

    def crunch(t, y):
        return y[0] - 1e-6 * R0
    crunch.terminal = True

    events = [turning, crunch]
    if s != 0.0:
        def shell(t, y):
            return (1.0 - s * y[0] ** 2) - np.sign(w0) * SHELL_GUARD
        shell.terminal = True
        events.append(shell)

    scale_R = max(R0, 1.0)
    sol = solve_ivp(rhs, (t0, t1), [st0.R, st0.Rdot], method="DOP853", rtol=tol,
                    atol=tol * 1e-3 * scale_R, dense_output=True, events=events, t_eval=t_eval)
    if sol.status < 0:
        raise StepFailure(f"Friedmann integration failed: {sol.message}")

    status = "complete"
    if len(sol.t_events[0]) and turning.terminal:
        status = "turning_point"
        if on_turning_point == "raise":
            te = float(sol.t_events[0][0])
            raise TurningPoint(f"expanding branch turns around at t={te:.6g}", t=te,
                               R=float(sol.y_events[0][0][0]))
    if len(sol.t_events[1]):
        status = "crunch"
    if s != 0.0 and len(sol.t_events[2]):
        status = "singular_shell"

    samples = [ScaleState(float(t), float(R), float(Rd), dust_acceleration(float(R), params))
               for t, R, Rd in zip(sol.t, sol.y[0], sol.y[1])]
    if t_eval is not None and status != "complete":
        te = float(sol.t_events[{"turning_point": 0, "crunch": 1, "singular_shell": 2}[status]][0])
        if samples and samples[-1].t < te:
            R, Rd = sol.sol(te)
            samples.append(ScaleState(te, float(R), float(Rd), dust_acceleration(float(R), params)))
    return ScaleHistory(samples, params, (t0, t1), sol.sol, status)


# --- reinterpretation ------------------------------------------------------

@dataclass(frozen=True)
class Reinterpretation:
    lambda_tilde: float
    rho_tilde: float
    u_tilde_factor: float   # ut^mu = u_tilde_factor * u^mu
    rho: float

    @property
    def energy_condition_violated(self) -> bool:
        return self.rho_tilde < 0


def _reinterpretation_values(st: ScaleState, params: CosmologyParams, printed: bool):
    s, k, G = params.s, params.kappa, params.G
    w = deformation_factor(s, st.R)
    rho = dust_density(st.R, params)
    x = 2.0 * G * params.M / st.R
    if printed:
        lam = s * (k - x)
        rho_t = rho + s / (8.0 * np.pi * G) * (x - 4.0 * k)
    else:
        lam = 3.0 * s * (x - k)
        rho_t = rho * w
    return Reinterpretation(lam, rho_t, w, rho)


def check_friedmann(st: ScaleState, params: CosmologyParams, tol: float = FRIEDMANN_TOL):
    scale = max(1.0, 2.0 * params.G * params.M / st.R)
    c1 = abs(constraint_residual(st, params))
    c2 = abs(acceleration_residual(st, params))
    if c1 > tol * scale or c2 > tol * scale:
        raise FriedmannViolation(
            f"state is not on a dust Friedmann solution (constraint {c1:.3g}, acceleration {c2:.3g})")


def reinterpret(st: ScaleState, params: CosmologyParams, printed: bool = False,
                tol: float = FRIEDMANN_TOL) -> Reinterpretation:
    """Dust-plus-Lambda content seen by the deformed metric.

    ``Lambda~ = 3 s (2GM/R - kappa)`` (that is ``3 s Rdot^2``) and
    ``rho~ = rho (1 - s R^2)``; with these the deformed Einstein equations hold
    with vanishing residual. ``printed=True`` returns the variant
    ``Lambda~ = s (kappa - 2GM/R)``, ``rho~ = rho + s (2GM/R - 4 kappa) / (8 pi G)``,
    which leaves a spatial residual of ``-4 s Rdot^2 / w`` (frame components).
    """
    check_friedmann(st, params, tol)
    return _reinterpretation_values(st, params, printed)


def einstein_residual(st: ScaleState, params: CosmologyParams, which: str = STANDARD,
                      printed: bool = False, method: str = "curvature",
                      point: SpacetimePoint | None = None) -> np.ndarray:
    """Residual of the dust (plus Lambda~ for the deformed metric) Einstein equations.

    ``method="curvature"`` takes the Einstein tensor from the connection's
    curvature; ``"closed_form"`` uses :func:`einstein_closed_form`.
    """
    _check_tag(which)
    p = point if point is not None else SpacetimePoint(st.t)
    if method == "curvature":
        E = rw_curvature(p, st, params, which).einstein
    elif method == "closed_form":
        E = einstein_closed_form(st, params, which, printed=printed)
    else:
        raise ValueError(f"unknown method {method!r}")
    eight_pi_G = 8.0 * np.pi * params.G
    g = frame_metric(which, params.s, st.R)
    if which == STANDARD:
        u_low = g @ np.array([1.0, 0.0, 0.0, 0.0])
        return E - eight_pi_G * dust_density(st.R, params) * np.outer(u_low, u_low)
    r = _reinterpretation_values(st, params, printed)
    u_low = g @ np.array([r.u_tilde_factor, 0.0, 0.0, 0.0])
    return E + r.lambda_tilde * g - eight_pi_G * r.rho_tilde * np.outer(u_low, u_low)


# --- normal form -----------------------------------------------------------

class NormalForm:
    """Map ``t -> (t~, R~)`` bringing the deformed metric to standard RW form.

    ``R~ = R / sqrt(1 - s R^2)`` and ``dt~ = dt / (1 - s R^2)``, with ``t~``
    measured from the start of the history.
    """

    def __init__(self, hist: ScaleHistory, s: float):
        self.hist = hist
        self.s = float(s)
        w = 1.0 - self.s * hist.R**2
        if np.any(w <= SHELL_GUARD):
            raise MetricSingular("1 - s R^2 must stay positive along the history")
        t = hist.t
        pieces = [0.0]
        for a, b in zip(t[:-1], t[1:]):
            pieces.append(quad(self._integrand, a, b, epsabs=1e-14, epsrel=1e-13)[0])
        self._t = t
        self._t_tilde = np.cumsum(pieces)

    def _integrand(self, t):
        R = self.hist.state_at(t).R
        return 1.0 / deformation_factor(self.s, R)

    def t_tilde(self, t: float) -> float:
        i = int(np.clip(np.searchsorted(self._t, t) - 1, 0, len(self._t) - 1))
        return float(self._t_tilde[i] + quad(self._integrand, self._t[i], t,
                                              epsabs=1e-14, epsrel=1e-13)[0])

    def R_tilde(self, t: float) -> float:
        R = self.hist.state_at(t).R
        return R / np.sqrt(deformation_factor(self.s, R))

    def __call__(self, t: float) -> tuple[float, float]:
        return self.t_tilde(t), self.R_tilde(t)

    @property
    def table(self) -> dict:
        R = self.hist.R
        return {"t": self._t, "t_tilde": self._t_tilde, "R": R,
                "R_tilde": R / np.sqrt(1.0 - self.s * R**2)}

    def certify(self, h: float | None = None) -> float:
        """Worst mismatch between metric components rebuilt from ``(t~, R~)``
        and the deformed frame metric, over interior samples.

        ``dt~/dt`` is taken by a fourth-order central difference of the
        quadrature map, so the check does not reuse the integrand directly.
        """
        t = self._t
        span = t[-1] - t[0]
        h = h if h is not None else 1e-3 * span
        worst = 0.0
        for ti in t:
            if ti - 2 * h < t[0] or ti + 2 * h > t[-1]:
                continue
            f = [self.t_tilde(ti + k * h) for k in (-2, -1, 1, 2)]
            dtt = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
            R = self.hist.state_at(ti).R
            ratio = self.R_tilde(ti) / R
            rebuilt = np.diag([-dtt**2, ratio**2, ratio**2, ratio**2])
            worst = max(worst, float(np.abs(rebuilt - frame_metric(DEFORMED, self.s, R)).max()))
        return worst


def rw_normal_form(hist: ScaleHistory, s: float) -> NormalForm:
    return NormalForm(hist, s)


def history_table(hist: ScaleHistory, s: float | None = None, printed: bool = False) -> dict:
    """Columns ``t, R, Rdot, Rddot, rho, lambda_tilde, rho_tilde`` for one ``s``."""
    params = hist.params if s is None else hist.params.replace(s=float(s))
    rows = [_reinterpretation_values(st, params, printed) for st in hist.samples]
    return {
        "t": hist.t, "R": hist.R, "Rdot": hist.Rdot, "Rddot": hist.Rddot,
        "rho": np.array([r.rho for r in rows]),
        "lambda_tilde": np.array([r.lambda_tilde for r in rows]),
        "rho_tilde": np.array([r.rho_tilde for r in rows]),
    }
