"""Coframe, metrics, connections and curvature of the Robertson-Walker family.

Everything is expressed in the common coframe

    theta^0 = dt,   theta^i = R(t) dx^i / q(x),   q = 1 + kappa |x|^2 / 4,

with the standard metric ``diag(-1, 1, 1, 1)`` and the deformed one
``diag(-1/w^2, 1/w, 1/w, 1/w)``, ``w = 1 - s R^2``, in that same coframe.

Connection coefficients are stored as ``gamma[mu, nu, rho]`` with
``Gamma^mu_nu = gamma[mu, nu, rho] theta^rho``. Frame derivatives are stored
with the differentiating index first: ``dgamma[rho, mu, nu, sigma] =
X_rho(gamma[mu, nu, sigma])``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricSingular, PatchViolation
from .types import CosmologyParams, ScaleState, SpacetimePoint

STANDARD = "standard"
DEFORMED = "deformed"
EPS_SINGULAR = 1e-12

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
_D3 = np.eye(3)


def _check_tag(which):
    if which not in (STANDARD, DEFORMED):
        raise ValueError(f"metric tag must be {STANDARD!r} or {DEFORMED!r}, got {which!r}")


def conformal_denominator(spatial, kappa) -> float:
    x = np.asarray(spatial, dtype=float)
    return 1.0 + 0.25 * kappa * float(x @ x)


def check_patch(spatial, kappa, eps=0.0) -> float:
    """Return ``q`` or raise PatchViolation if ``q <= eps``."""
    q = conformal_denominator(spatial, kappa)
    if q <= eps:
        raise PatchViolation(f"point outside coordinate patch: 1 + kappa|x|^2/4 = {q:.3g}")
    return q


def deformation_factor(s, R, eps=EPS_SINGULAR) -> float:
    w = 1.0 - s * R * R
    if abs(w) < eps:
        raise MetricSingular(f"|1 - s R^2| = {abs(w):.3g} below guard {eps:g}")
    return w


# --- coframe ---------------------------------------------------------------

def eval_coframe(p: SpacetimePoint, R: float, params: CosmologyParams) -> np.ndarray:
    """Coframe components ``e[mu, a]`` (frame index, coordinate index)."""
    q = check_patch(p.spatial, params.kappa)
    e = np.zeros((4, 4))
    e[0, 0] = 1.0
    e[1, 1] = e[2, 2] = e[3, 3] = R / q
    return e


def inverse_coframe(p: SpacetimePoint, R: float, params: CosmologyParams) -> np.ndarray:
    """Frame components ``E[mu, a]`` with ``X_mu = E[mu, a] d/dx^a``."""
    q = check_patch(p.spatial, params.kappa)
    E = np.zeros((4, 4))
    E[0, 0] = 1.0
    E[1, 1] = E[2, 2] = E[3, 3] = q / R
    return E


def coframe_partials(p: SpacetimePoint, st: ScaleState, params: CosmologyParams) -> np.ndarray:
    """Closed-form ``de[a, mu, b] = d/dx^a e[mu, b]``."""
    x = p.spatial
    q = check_patch(x, params.kappa)
    de = np.zeros((4, 4, 4))
    dq = 0.5 * params.kappa * x
    for i in range(1, 4):
        de[0, i, i] = st.Rdot / q
        de[1:, i, i] = -st.R * dq / q**2
    return de


def structure_functions(p: SpacetimePoint, st: ScaleState, params: CosmologyParams) -> np.ndarray:
    """``D[tau, rho, sigma]`` with ``d theta^tau = 1/2 D^tau_{rho sigma} theta^rho ^ theta^sigma``."""
    de = coframe_partials(p, st, params)
    E = inverse_coframe(p, st.R, params)
    curl = np.einsum("amb->mab", de) - np.einsum("bma->mab", de)
    return np.einsum("mab,ra,sb->mrs", curl, E, E)


# --- metrics ---------------------------------------------------------------

def frame_metric(which: str, s: float, R: float, eps: float = EPS_SINGULAR) -> np.ndarray:
    """Metric components in the common coframe."""
    _check_tag(which)
    if which == STANDARD:
        return ETA.copy()
    w = deformation_factor(s, R, eps)
    return np.diag([-1.0 / w**2, 1.0 / w, 1.0 / w, 1.0 / w])


def metric_frame_derivatives(which: str, st: ScaleState, s: float) -> np.ndarray:
    """``dg[rho, mu, nu] = X_rho(g_{mu nu})``; only the time direction contributes."""
    _check_tag(which)
    dg = np.zeros((4, 4, 4))
    if which == DEFORMED:
        w = deformation_factor(s, st.R)
        sRRd = s * st.R * st.Rdot
        dg[0, 0, 0] = -4.0 * sRRd / w**3
        for i in range(1, 4):
            dg[0, i, i] = 2.0 * sRRd / w**2
    return dg


# --- connections -----------------------------------------------------------

def _rotation_pattern(x) -> np.ndarray:
    """``x^i delta_jk - x^j delta_ik`` on spatial slots."""
    out = np.zeros((4, 4, 4))
    out[1:, 1:, 1:] = (np.einsum("i,jk->ijk", x, _D3) - np.einsum("j,ik->ijk", x, _D3))
    return out


def _rotation_gradient() -> np.ndarray:
    """``d/dx^l`` of the rotation pattern, indexed ``[l, i, j, k]``."""
    out = np.zeros((4, 4, 4, 4))
    out[1:, 1:, 1:, 1:] = (np.einsum("il,jk->lijk", _D3, _D3)
                           - np.einsum("jl,ik->lijk", _D3, _D3))
    return out


_ROT_GRAD = _rotation_gradient()


_TIME_ROWS = np.zeros((4, 4, 4))          # Gamma^0_{ii}
_BOOST = np.zeros((4, 4, 4))              # Gamma^i_{0i}
_DIAG_DT = np.zeros((4, 4, 4))            # Gamma^i_{i0}
for _i in range(1, 4):
    _TIME_ROWS[0, _i, _i] = 1.0
    _BOOST[_i, 0, _i] = 1.0
    _DIAG_DT[_i, _i, 0] = 1.0
_HUBBLE = _TIME_ROWS + _BOOST
_E000 = np.zeros((4, 4, 4))
_E000[0, 0, 0] = 1.0


def connection_standard(p: SpacetimePoint, st: ScaleState, params: CosmologyParams) -> np.ndarray:
    """Levi-Civita coefficients of the standard metric in the common coframe."""
    check_patch(p.spatial, params.kappa)
    H = st.Rdot / st.R
    return H * _HUBBLE + (params.kappa / (2.0 * st.R)) * _rotation_pattern(p.spatial)


def connection_deformed(p: SpacetimePoint, st: ScaleState, params: CosmologyParams) -> np.ndarray:
    """Levi-Civita coefficients of the deformed metric, same coframe.

    Entries read directly off the closed-form matrix: ``Gamma^0_0 = 2a theta^0``,
    ``Gamma^0_i = H theta^i``, ``Gamma^i_0 = H/w theta^i``, ``Gamma^i_i = a theta^0``
    with ``H = Rdot/R`` and ``a = s R Rdot / w``.
    """
    check_patch(p.spatial, params.kappa)
    w = deformation_factor(params.s, st.R)
    H = st.Rdot / st.R
    a = params.s * st.R * st.Rdot / w
    return (2.0 * a * _E000 + H * _TIME_ROWS + (H / w) * _BOOST + a * _DIAG_DT
            + (params.kappa / (2.0 * st.R)) * _rotation_pattern(p.spatial))


def connection(which, p, st, params) -> np.ndarray:
    _check_tag(which)
    if which == STANDARD:
        return connection_standard(p, st, params)
    return connection_deformed(p, st, params)


def connection_frame_derivatives(which: str, p: SpacetimePoint, st: ScaleState,
                                 params: CosmologyParams) -> np.ndarray:
    """Hand-derived ``X_rho`` derivatives of the connection coefficients.

    Time derivatives use the 2-jet (R, Rdot, Rddot); spatial ones act only on
    the rotation terms, scaled by the frame factor ``q/R``.
    """
    _check_tag(which)
    q = check_patch(p.spatial, params.kappa)
    R, Rd, Rdd, s, k = st.R, st.Rdot, st.Rddot, params.s, params.kappa
    H = Rd / R
    Hdot = Rdd / R - H * H
    rot_coef = k / (2.0 * R)
    rot_coef_dot = -k * Rd / (2.0 * R * R)

    out = np.zeros((4, 4, 4, 4))
    if which == STANDARD:
        out[0] = Hdot * _HUBBLE + rot_coef_dot * _rotation_pattern(p.spatial)
    else:
        w = deformation_factor(s, R)
        wdot = -2.0 * s * R * Rd
        a_dot = s * (Rd * Rd + R * Rdd) / w - s * R * Rd * wdot / w**2
        Hw_dot = Hdot / w - H * wdot / w**2
        out[0] = (2.0 * a_dot * _E000 + Hdot * _TIME_ROWS + Hw_dot * _BOOST
                  + a_dot * _DIAG_DT + rot_coef_dot * _rotation_pattern(p.spatial))
    out[1:] = (q / R) * rot_coef * _ROT_GRAD[1:]
    return out


def metricity_residual(gamma, g, dg) -> np.ndarray:
    """``X_rho g_{mu nu} - Gamma_{mu nu rho} - Gamma_{nu mu rho}`` as ``[mu, nu, rho]``."""
    low = np.einsum("ms,snr->mnr", g, gamma)
    return np.einsum("rmn->mnr", dg) - low - np.einsum("nmr->mnr", low)


def torsion_residual(gamma, D) -> np.ndarray:
    """Components of ``d theta + Gamma ^ theta`` (antisymmetric in the last pair)."""
    return D - gamma + np.einsum("tnr->trn", gamma)


# --- connection fields ----------------------------------------------------

class RWConnection:
    """Closed-form connection field of one member of the family.

    ``scale`` is anything with ``state_at(t)``: a ScaleState (used as a local
    quadratic jet) or a ScaleHistory.
    """

    def __init__(self, scale, params: CosmologyParams, which: str = STANDARD):
        _check_tag(which)
        self.scale = scale
        self.params = params
        self.which = which

    def _state(self, p):
        return self.scale.state_at(p.t)

    def coefficients(self, p: SpacetimePoint) -> np.ndarray:
        return connection(self.which, p, self._state(p), self.params)

    def frame_derivatives(self, p: SpacetimePoint) -> np.ndarray:
        return connection_frame_derivatives(self.which, p, self._state(p), self.params)

    def structure(self, p: SpacetimePoint) -> np.ndarray:
        return structure_functions(p, self._state(p), self.params)

    def metric(self, p: SpacetimePoint) -> np.ndarray:
        return frame_metric(self.which, self.params.s, self._state(p).R)

    def metric_derivatives(self, p: SpacetimePoint) -> np.ndarray:
        return metric_frame_derivatives(self.which, self._state(p), self.params.s)


# --- curvature -------------------------------------------------------------

@dataclass
class CurvatureBundle:
    riemann: np.ndarray       # R^mu_{nu rho sigma}
    ricci: np.ndarray         # R_{nu sigma} = R^mu_{nu mu sigma}
    ricci_scalar: float
    einstein: np.ndarray      # E_{mu nu}
    weyl: np.ndarray          # C^mu_{nu rho sigma}


def riemann_from_connection(gamma, dgamma, D) -> np.ndarray:
    """Second structure equation ``Omega = d Gamma + Gamma ^ Gamma`` in components."""
    return (np.einsum("rmns->mnrs", dgamma) - np.einsum("smnr->mnrs", dgamma)
            + np.einsum("mnt,trs->mnrs", gamma, D)
            + np.einsum("mlr,lns->mnrs", gamma, gamma)
            - np.einsum("mls,lnr->mnrs", gamma, gamma))


def weyl_tensor(riemann, ricci, scalar, g) -> np.ndarray:
    """Four-dimensional Weyl tensor, returned with the first index raised."""
    low = np.einsum("am,mbcd->abcd", g, riemann)
    ricci_part = 0.5 * (np.einsum("ac,bd->abcd", g, ricci) - np.einsum("ad,bc->abcd", g, ricci)
                        - np.einsum("bc,ad->abcd", g, ricci) + np.einsum("bd,ac->abcd", g, ricci))
    scalar_part = (scalar / 6.0) * (np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g))
    return np.einsum("ma,abcd->mbcd", np.linalg.inv(g), low - ricci_part + scalar_part)


def curvature_bundle(conn, metric, p: SpacetimePoint) -> CurvatureBundle:
    """Riemann, Ricci, Einstein and Weyl tensors at ``p``.

    ``conn`` provides ``coefficients``, ``frame_derivatives`` and ``structure``
    at a point; ``metric`` is a 4x4 array or a callable of the point.
    """
    g = metric(p) if callable(metric) else np.asarray(metric, dtype=float)
    riemann = riemann_from_connection(conn.coefficients(p), conn.frame_derivatives(p),
                                      conn.structure(p))
    ricci = np.einsum("mnms->ns", riemann)
    scalar = float(np.einsum("ns,ns->", np.linalg.inv(g), ricci))
    einstein = ricci - 0.5 * scalar * g
    return CurvatureBundle(riemann, ricci, scalar, einstein,
                           weyl_tensor(riemann, ricci, scalar, g))


def rw_curvature(p: SpacetimePoint, scale, params: CosmologyParams,
                 which: str = STANDARD) -> CurvatureBundle:
    conn = RWConnection(scale, params, which)
    return curvature_bundle(conn, conn.metric, p)


def einstein_closed_form(st: ScaleState, params: CosmologyParams, which: str = STANDARD,
                         printed: bool = False) -> np.ndarray:
    """Einstein tensor of either metric in the common coframe, in closed form.

    Deformed: ``Et_00 = (E_00 - 3 s kappa)/w^2`` and
    ``Et_ij = (E_ij + s (kappa - 2 Rdot^2 + 2 R Rddot)) delta_ij / w``.
    ``printed=True`` returns the ``+2 Rdot^2`` variant, which disagrees with the
    curvature of the deformed metric by ``4 s Rdot^2 / w`` in the spatial block.
    """
    _check_tag(which)
    k, R, Rd, Rdd = params.kappa, st.R, st.Rdot, st.Rddot
    E00 = 3.0 * (k + Rd * Rd) / R**2
    Eii = -(k + Rd * Rd + 2.0 * R * Rdd) / R**2
    if which == STANDARD:
        return np.diag([E00, Eii, Eii, Eii])
    s = params.s
    w = deformation_factor(s, R)
    Et00 = (E00 - 3.0 * s * k) / w**2
    rd2 = 2.0 * Rd * Rd if printed else -2.0 * Rd * Rd
    Etii = (Eii + s * (k + rd2 + 2.0 * R * Rdd)) / w
    return np.diag([Et00, Etii, Etii, Etii])


def scalar_invariants(cb: CurvatureBundle, metric) -> tuple[float, float]:
    """Ricci scalar and ``R_{mu nu} R^{mu nu}``."""
    ginv = np.linalg.inv(np.asarray(metric, dtype=float))
    raised = ginv @ cb.ricci @ ginv
    return cb.ricci_scalar, float(np.einsum("mn,mn->", cb.ricci, raised))
