"""Geodesics of both metrics, integrated in frame components.

The state is ``(t, x, y, z, v^0..v^3, R, Rdot, arc)``: position in
coordinates, velocity in the common frame, the scale factor co-evolved along
the curve with ``Rddot = -(kappa + Rdot^2) / (2R)``, and the Euclidean
coordinate arc length used to compare curves regardless of parametrization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import (DegenerateDirection, EmptyOverlap, MetricSingular, PatchExit,
                     StepFailure)
from .frame import DEFORMED, STANDARD, _check_tag, check_patch, deformation_factor, frame_metric
from .projective import OneForm, projective_one_form
from .types import CosmologyParams, ScaleState, SpacetimePoint

PATCH_GUARD = 1e-6
SHELL_GUARD = 1e-6
CLASSES = ("timelike", "null", "spacelike")


@dataclass(frozen=True)
class GeodesicState:
    p: SpacetimePoint
    v: np.ndarray
    lam: float = 0.0


@dataclass
class GeodesicPath:
    lam: np.ndarray
    coords: np.ndarray      # (N, 4) t, x, y, z
    v: np.ndarray           # (N, 4) frame components
    R: np.ndarray
    arc: np.ndarray
    metric_tag: str
    causal_class: str
    s: float = 0.0

    def norms(self) -> np.ndarray:
        """``g(v, v)`` along the path in the integrating metric."""
        out = np.empty(len(self.lam))
        for k, (v, R) in enumerate(zip(self.v, self.R)):
            g = frame_metric(self.metric_tag, self.s, R)
            out[k] = v @ g @ v
        return out

    def norm_drift(self) -> float:
        n = self.norms()
        return float(np.abs(n - n[0]).max())


def _norm(v, g):
    return float(v @ g @ v)


def init_geodesic(p: SpacetimePoint, direction, causal_class: str, metric_tag: str,
                  st: ScaleState, params: CosmologyParams) -> GeodesicState:
    """Future-directed initial velocity with ``g(v, v)`` equal to -1, 0 or +1.

    Timelike and spacelike start from ``(1, direction)`` and are rescaled, so
    ``|direction|`` sets the speed; null uses the unit spatial direction.
    """
    if causal_class not in CLASSES:
        raise ValueError(f"causal class must be one of {CLASSES}")
    check_patch(p.spatial, params.kappa)
    g = frame_metric(metric_tag, params.s, st.R)
    d = np.asarray(direction, dtype=float).reshape(3)
    if causal_class == "null":
        nd = np.linalg.norm(d)
        if nd == 0:
            raise DegenerateDirection("null geodesic needs a spatial direction")
        v = np.concatenate([[1.0], d / nd * np.sqrt(-g[0, 0] / g[1, 1])])
        return GeodesicState(p, v)
    v = np.concatenate([[1.0], d])
    n = _norm(v, g)
    if causal_class == "timelike" and n >= 0 or causal_class == "spacelike" and n <= 0:
        raise DegenerateDirection(f"direction {d} is not {causal_class} (g(v,v) = {n:.3g})")
    return GeodesicState(p, v / np.sqrt(abs(n)))


def match_direction(state: GeodesicState, metric_tag: str, st: ScaleState,
                    params: CosmologyParams) -> GeodesicState:
    """Same initial ray, rescaled to unit norm in ``metric_tag`` when non-null there."""
    g = frame_metric(metric_tag, params.s, st.R)
    n = _norm(state.v, g)
    v = state.v / np.sqrt(abs(n)) if abs(n) > 1e-14 else state.v.copy()
    return GeodesicState(state.p, v, state.lam)


def causal_class_of(v, g, tol: float = 1e-12) -> str:
    n = _norm(np.asarray(v, dtype=float), g)
    if abs(n) <= tol:
        return "null"
    return "timelike" if n < 0 else "spacelike"


# --- right-hand sides --------------------------------------------------------

def gamma_vv_standard(x, v, R, Rdot, kappa) -> np.ndarray:
    """``Gamma^mu_{nu rho} v^nu v^rho`` for the standard metric."""
    H = Rdot / R
    vs = v[1:]
    vs2 = vs @ vs
    c = kappa / (2.0 * R)
    out = np.empty(4)
    out[0] = H * vs2
    out[1:] = H * v[0] * vs + c * (x * vs2 - (x @ vs) * vs)
    return out


def gamma_vv_deformed(x, v, R, Rdot, kappa, s) -> np.ndarray:
    """Same contraction for the deformed metric, from its own coefficients."""
    w = 1.0 - s * R * R
    H = Rdot / R
    a = s * R * Rdot / w
    vs = v[1:]
    vs2 = vs @ vs
    c = kappa / (2.0 * R)
    out = np.empty(4)
    out[0] = 2.0 * a * v[0] ** 2 + H * vs2
    out[1:] = (H / w + a) * v[0] * vs + c * (x * vs2 - (x @ vs) * vs)
    return out


def _make_rhs(kappa, accel):
    def rhs(lam, y):
        x = y[1:4]
        v = y[4:8]
        R, Rd = y[8], y[9]
        q = 1.0 + 0.25 * kappa * (x @ x)
        dx = np.empty(4)
        dx[0] = v[0]
        dx[1:] = (q / R) * v[1:]
        out = np.empty(11)
        out[0:4] = dx
        out[4:8] = accel(x, v, R, Rd)
        out[8] = Rd * v[0]
        out[9] = -(kappa + Rd * Rd) / (2.0 * R) * v[0]
        out[10] = np.sqrt(dx @ dx)
        return out
    return rhs


def _integrate(rhs, init: GeodesicState, st: ScaleState, params: CosmologyParams,
               lambda_max: float, tol: float, arc_max, watch_shell: bool, n_out: int):
    p = init.p
    check_patch(p.spatial, params.kappa, PATCH_GUARD)
    s, kappa = params.s, params.kappa
    if watch_shell:
        deformation_factor(s, st.R, SHELL_GUARD)
    y0 = np.concatenate([p.coords, init.v, [st.R, st.Rdot, 0.0]])

    def patch(lam, y):
        # q -> 0 bounds the kappa = -1 ball, q -> inf the kappa = +1 chart
        q = 1.0 + 0.25 * kappa * (y[1:4] @ y[1:4])
        return (q - PATCH_GUARD) * (1.0 / PATCH_GUARD - q)
    patch.terminal = True

    def shell(lam, y):
        return abs(1.0 - s * y[8] ** 2) - SHELL_GUARD
    shell.terminal = True

    def crunch(lam, y):
        return y[8] - 1e-8 * st.R
    crunch.terminal = True

    def arc_stop(lam, y):
        return y[10] - arc_max
    arc_stop.terminal = True

    def never(lam, y):
        return 1.0

    events = [patch, shell if watch_shell else never, crunch]
    if arc_max is not None:
        events.append(arc_stop)
    sol = solve_ivp(rhs, (init.lam, init.lam + lambda_max), y0, method="DOP853", rtol=tol,
                    atol=tol * 1e-2, dense_output=True, events=events)
    if sol.status < 0:
        raise StepFailure(sol.message)
    if len(sol.t_events[0]):
        raise PatchExit(f"geodesic left the coordinate patch at lambda={sol.t_events[0][0]:.6g}")
    if watch_shell and len(sol.t_events[1]):
        raise MetricSingular(f"geodesic reached the s R^2 = 1 shell at lambda={sol.t_events[1][0]:.6g}")
    if len(sol.t_events[2]):
        raise StepFailure("scale factor collapsed along the geodesic")
    lam = np.linspace(init.lam, sol.t[-1], n_out)
    Y = sol.sol(lam).T
    if arc_max is not None and len(sol.t_events[3]):
        Y[-1] = sol.y_events[3][0]
    return lam, Y


def _path(lam, Y, tag, cls, s):
    return GeodesicPath(lam, Y[:, 0:4].copy(), Y[:, 4:8].copy(), Y[:, 8].copy(),
                        Y[:, 10].copy(), tag, cls, s)


def integrate_geodesic(init: GeodesicState, metric_tag: str, st: ScaleState,
                       params: CosmologyParams, lambda_max: float, tol: float = 1e-10,
                       arc_max: float | None = None, causal_class: str | None = None,
                       n_out: int = 1001) -> GeodesicPath:
    """Affine geodesic of ``metric_tag`` starting at ``init``.

    ``st`` is the scale state at the starting time; the background is then
    evolved along the curve. ``arc_max`` stops the curve at a given coordinate
    arc length.
    """
    _check_tag(metric_tag)
    kappa, s = params.kappa, params.s
    if metric_tag == STANDARD:
        accel = lambda x, v, R, Rd: -gamma_vv_standard(x, v, R, Rd, kappa)  # noqa: E731
    else:
        accel = lambda x, v, R, Rd: -gamma_vv_deformed(x, v, R, Rd, kappa, s)  # noqa: E731
    if causal_class is None:
        causal_class = causal_class_of(init.v, frame_metric(metric_tag, s, st.R))
    lam, Y = _integrate(_make_rhs(kappa, accel), init, st, params, lambda_max, tol, arc_max,
                        metric_tag == DEFORMED, n_out)
    return _path(lam, Y, metric_tag, causal_class, s)


def integrate_reparametrized(init: GeodesicState, st: ScaleState, params: CosmologyParams,
                             lambda_max: float, tol: float = 1e-10, arc_max: float | None = None,
                             perturbation: OneForm | None = None,
                             n_out: int = 1001) -> GeodesicPath:
    """Standard connection plus the drive ``-2 (A.v) v``, A the projective 1-form.

    ``perturbation`` adds a non-projective force ``g(v, v) B^mu`` (B raised with
    the standard metric). Any change of A inside the projective drive only
    reparametrizes the curve, so a negative control has to leave that pattern.
    """
    kappa, s = params.kappa, params.s
    B = None if perturbation is None else np.diag([-1.0, 1.0, 1.0, 1.0]) @ perturbation.a

    def accel(x, v, R, Rd):
        A = projective_one_form(ScaleState(0.0, R, Rd, 0.0), s)
        out = -gamma_vv_standard(x, v, R, Rd, kappa) - 2.0 * A(v) * v
        if B is not None:
            out += (-v[0] ** 2 + v[1:] @ v[1:]) * B
        return out

    g = frame_metric(STANDARD, s, st.R)
    lam, Y = _integrate(_make_rhs(kappa, accel), init, st, params, lambda_max, tol, arc_max,
                        s != 0.0, n_out)
    return _path(lam, Y, STANDARD, causal_class_of(init.v, g), s)


# --- comparison --------------------------------------------------------------

def _resample(path: GeodesicPath, grid):
    arc, keep = np.unique(path.arc, return_index=True)
    return CubicSpline(arc, path.coords[keep], axis=0)(grid)


def path_distance(a: GeodesicPath, b: GeodesicPath, n: int = 2001) -> float:
    """Max coordinate distance between two curves matched by Euclidean arc length."""
    if not np.allclose(a.coords[0], b.coords[0], rtol=0, atol=1e-12):
        raise ValueError("paths must start at the same point")
    L = min(a.arc[-1], b.arc[-1])
    if not L > 0:
        raise EmptyOverlap("paths have no common arc-length range")
    grid = np.linspace(0.0, L, n)
    return float(np.linalg.norm(_resample(a, grid) - _resample(b, grid), axis=1).max())


@dataclass
class Comparison:
    distance: float
    standard: GeodesicPath
    other: GeodesicPath


def compare_geodesics(init: GeodesicState, st: ScaleState, params: CosmologyParams,
                      lambda_max: float, tol: float = 1e-10) -> Comparison:
    """Standard-metric geodesic against the deformed one through the same ray.

    The deformed curve is integrated until it has covered the same coordinate
    arc length as the standard one.
    """
    g_path = integrate_geodesic(init, STANDARD, st, params, lambda_max, tol)
    tinit = match_direction(init, DEFORMED, st, params)
    cap = 50.0 * lambda_max * max(1.0, np.abs(init.v).max() / np.abs(tinit.v).max())
    gt_path = integrate_geodesic(tinit, DEFORMED, st, params, cap, tol,
                                 arc_max=g_path.arc[-1], causal_class=g_path.causal_class)
    return Comparison(path_distance(g_path, gt_path), g_path, gt_path)


@dataclass
class ReparametrizationReport:
    deviation: float
    affine: GeodesicPath
    driven: GeodesicPath
    s: float


def reparametrization_check(init_g: GeodesicState, st: ScaleState, params: CosmologyParams,
                            lambda_max: float, tol: float = 1e-10,
                            perturbation: OneForm | None = None) -> ReparametrizationReport:
    """Driven standard-connection curve versus the affine deformed geodesic.

    The driven curve runs for ``lambda_max``; the affine one is cut at the same
    coordinate arc length before comparing.
    """
    driven = integrate_reparametrized(init_g, st, params, lambda_max, tol,
                                      perturbation=perturbation)
    tinit = match_direction(init_g, DEFORMED, st, params)
    cap = 50.0 * lambda_max * max(1.0, np.abs(init_g.v).max() / np.abs(tinit.v).max())
    affine = integrate_geodesic(tinit, DEFORMED, st, params, cap, tol,
                                arc_max=driven.arc[-1], causal_class=driven.causal_class)
    return ReparametrizationReport(path_distance(affine, driven), affine, driven, params.s)
