"""Independent verification paths and the cross-check suite.

The connection solver here knows nothing about the closed-form coefficients:
it finite-differences the coframe and metric component fields and solves the
torsion-free + metricity conditions with the anholonomic Koszul formula.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import cosmology, frame, geodesics, projective
from .errors import (DomainError, FriedmannViolation, GeometryError, MetricSingular,
                     NotProjectivelyRelated, SingularFrame)
from .types import CosmologyParams, ScaleState, SpacetimePoint


@dataclass
class OracleConfig:
    fd_step: float = 1e-6
    richardson: bool = True
    convergence_step: float = 1e-2
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if not self.fd_step > 0 or not self.convergence_step > 0:
            raise ValueError("finite-difference steps must be positive")


DEFAULT_TOLERANCES = {
    "projective_algebraic": 1e-10,
    "projective_roundtrip": 1e-9,
    "connection_oracle": 1e-8,
    "fd_convergence": (3.5, 4.5),
    "einstein_closed_form": 1e-7,
    "weyl": 1e-9,
    "bianchi": 1e-9,
    "reinterpretation": 1e-9,
    "uu_identity": 1e-12,
    "friedmann_analytic": 1e-6,
    "constraint_drift": 1e-8,
    "geodesic_coincidence": 1e-5,
    "reparametrization": 1e-6,
    "negative_controls": 1e-5,
}


# --- finite-difference connection ------------------------------------------

def _partials(field_fn, x0, steps, richardson):
    """Central differences ``d[a, ...] = d field / d x^a`` at ``x0``."""
    f0 = np.asarray(field_fn(x0))
    out = np.empty((4,) + f0.shape)

    def central(a, h):
        e = np.zeros(4)
        e[a] = h
        return (np.asarray(field_fn(x0 + e)) - np.asarray(field_fn(x0 - e))) / (2.0 * h)

    for a in range(4):
        h = steps[a]
        d = central(a, h)
        if richardson:
            d = (4.0 * central(a, 0.5 * h) - d) / 3.0
        out[a] = d
    return out


def connection_from_structure(coframe_field, metric_field, p: SpacetimePoint,
                              config: OracleConfig | None = None, step: float | None = None,
                              richardson: bool | None = None) -> np.ndarray:
    """Levi-Civita coefficients ``gamma[mu, nu, rho]`` from finite differences.

    ``coframe_field`` and ``metric_field`` map coordinates ``(t, x, y, z)`` to
    4x4 arrays (``e[mu, a]`` and ``g_{mu nu}``).
    """
    config = config or OracleConfig()
    step = config.fd_step if step is None else step
    richardson = config.richardson if richardson is None else richardson
    x0 = p.coords
    steps = step * np.maximum(1.0, np.abs(x0))

    e = np.asarray(coframe_field(x0), dtype=float)
    det = np.linalg.det(e)
    if not np.isfinite(det) or abs(det) < 1e-300:
        raise SingularFrame("coframe is not invertible")
    E = np.linalg.inv(e).T                      # X_mu = E[mu, a] d_a
    g = np.asarray(metric_field(x0), dtype=float)
    ginv = np.linalg.inv(g)

    de = _partials(coframe_field, x0, steps, richardson)    # [a, mu, b]
    dg = _partials(metric_field, x0, steps, richardson)     # [a, mu, nu]

    D = np.einsum("amb,ra,sb->mrs", de, E, E) - np.einsum("bma,ra,sb->mrs", de, E, E)
    c_low = -np.einsum("al,lrs->ars", g, D)     # g([X_r, X_s], X_a)
    Xg = np.einsum("ra,amn->rmn", E, dg)        # X_r g_{mn}

    # 2 Gamma_{m n r} with Gamma_{m n r} = g(X_m, nabla_{X_r} X_n)
    two = (np.einsum("rnm->mnr", Xg) + np.einsum("nrm->mnr", Xg) - np.einsum("mrn->mnr", Xg)
           + np.einsum("mrn->mnr", c_low) - np.einsum("nrm->mnr", c_low)
           - np.einsum("rnm->mnr", c_low))
    return np.einsum("sm,mnr->snr", ginv, 0.5 * two)


def rw_fields(scale, params: CosmologyParams, which: str):
    """Coframe and metric component fields of one family member, as functions
    of coordinates."""

    def coframe_field(c):
        return frame.eval_coframe(SpacetimePoint.from_coords(c), scale.state_at(c[0]).R, params)

    def metric_field(c):
        return frame.frame_metric(which, params.s, scale.state_at(c[0]).R)

    return coframe_field, metric_field


def oracle_connection(p, scale, params, which, config=None, **kw) -> np.ndarray:
    cf, mf = rw_fields(scale, params, which)
    return connection_from_structure(cf, mf, p, config, **kw)


# --- analytic Friedmann solutions ------------------------------------------

def _eta_minus_sin(eta):
    if eta < 1e-2:
        e2 = eta * eta
        return eta**3 / 6.0 * (1.0 - e2 / 20.0 * (1.0 - e2 / 42.0 * (1.0 - e2 / 72.0)))
    return eta - np.sin(eta)


def _sinh_minus_eta(eta):
    if eta < 1e-2:
        e2 = eta * eta
        return eta**3 / 6.0 * (1.0 + e2 / 20.0 * (1.0 + e2 / 42.0 * (1.0 + e2 / 72.0)))
    return np.sinh(eta) - eta


def _invert(f, fprime, target, lo, hi):
    eta = brentq(lambda e: f(e) - target, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    d = fprime(eta)
    if d > 0:
        eta -= (f(eta) - target) / d
    return eta


def analytic_scale(params: CosmologyParams, t: float) -> ScaleState:
    """Closed-form dust solutions with the big bang at ``t = 0``.

    ``kappa = 0``: power law; ``kappa = +1``: cycloid
    ``R = GM (1 - cos eta), t = GM (eta - sin eta)``; ``kappa = -1``:
    ``R = GM (cosh eta - 1), t = GM (sinh eta - eta)``.
    """
    GM = params.G * params.M
    if not t > 0 or GM <= 0:
        raise DomainError("analytic solutions need t > 0 and M > 0")
    k = params.kappa
    if k == 0:
        c = (4.5 * GM) ** (1.0 / 3.0)
        R = c * t ** (2.0 / 3.0)
        Rd = 2.0 / 3.0 * c * t ** (-1.0 / 3.0)
        return ScaleState(t, R, Rd, -GM / R**2)
    tau = t / GM
    if k == 1:
        if not tau < 2 * np.pi:
            raise DomainError("closed model only defined for 0 < t < 2 pi G M")
        eta = _invert(_eta_minus_sin, lambda e: 2 * np.sin(0.5 * e) ** 2, tau, 0.0, 2 * np.pi)
        R = 2 * GM * np.sin(0.5 * eta) ** 2
        Rd = 1.0 / np.tan(0.5 * eta)
    else:
        hi = 1.0
        while _sinh_minus_eta(hi) < tau:
            hi *= 2.0
        eta = _invert(_sinh_minus_eta, lambda e: 2 * np.sinh(0.5 * e) ** 2, tau, 0.0, hi)
        R = 2 * GM * np.sinh(0.5 * eta) ** 2
        Rd = 1.0 / np.tanh(0.5 * eta)
    return ScaleState(t, float(R), float(Rd), -GM / R**2)


def analytic_scale_eta(params: CosmologyParams, eta: float) -> ScaleState:
    """Parametric form evaluated directly at development angle ``eta``."""
    GM = params.G * params.M
    if params.kappa == 1 and 0 < eta < 2 * np.pi:
        R = 2 * GM * np.sin(0.5 * eta) ** 2
        return ScaleState(GM * _eta_minus_sin(eta), R, 1.0 / np.tan(0.5 * eta), -GM / R**2)
    if params.kappa == -1 and eta > 0:
        R = 2 * GM * np.sinh(0.5 * eta) ** 2
        return ScaleState(GM * _sinh_minus_eta(eta), R, 1.0 / np.tanh(0.5 * eta), -GM / R**2)
    raise DomainError("parametric form needs kappa = +-1 and eta in its range")


# --- suite -------------------------------------------------------------------

@dataclass
class SamplePlan:
    seed: int = 42
    n_connection: int = 200
    n_oracle: int = 200         # per (kappa, s) cell and metric
    n_curvature: int = 100
    n_directions: int = 20
    kappas: tuple = (-1, 0, 1)
    s_projective: tuple = (-1.0, -0.1, 0.1, 0.5)
    s_reinterpret: tuple = (-1.0, -0.1, 0.1, 0.3)
    s_geodesic: tuple = (-0.5, 0.2)
    geodesic_lambda: float = 1.0
    include_singular: bool = False
    only: tuple | None = None


@dataclass
class CheckResult:
    name: str
    samples: int
    worst: float
    tolerance: object
    passed: bool
    skipped: int = 0
    detail: str = ""


@dataclass
class SuiteReport:
    seed: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=float)

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            extra = f" skipped={c.skipped}" if c.skipped else ""
            lines.append(f"{tag} {c.name:<24} worst={c.worst:.3e} tol={c.tolerance} "
                         f"n={c.samples}{extra} {c.detail}".rstrip())
        lines.append("ALL PASS" if self.passed else "FAILURES PRESENT")
        return "\n".join(lines)


DEFAULT_IMPL = {
    "connection_standard": frame.connection_standard,
    "connection_deformed": frame.connection_deformed,
    "projective_one_form": projective.projective_one_form,
    "einstein_closed_form": frame.einstein_closed_form,
}


def random_state(rng, kappa, s=None, min_w=0.1):
    """Random point and 2-jet with ``|1 - s R^2| > min_w`` when ``s`` is given."""
    while True:
        R = rng.uniform(0.5, 2.0)
        if s is None or abs(1.0 - s * R * R) > min_w:
            break
    st = ScaleState(rng.uniform(-1, 1), R, rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
    r = rng.uniform(0, 1.5 if kappa == -1 else 2.0)
    d = rng.normal(size=3)
    x = r * d / np.linalg.norm(d)
    return SpacetimePoint(st.t, *x), st


def _singular_s(R):
    return 1.0 / (R * R)


def _check_projective(cfg, plan, impl, rng):
    tol = cfg.tolerances["projective_algebraic"]
    worst = worst_rt = 0.0
    n = skipped = 0
    cells = [(k, s) for k in plan.kappas for s in plan.s_projective]
    for i in range(plan.n_connection):
        k, s = cells[i % len(cells)]
        p, st = random_state(rng, k, s)
        if plan.include_singular and i % 10 == 0:
            s = _singular_s(st.R)
        params = CosmologyParams(kappa=k, s=s)
        try:
            g = impl["connection_standard"](p, st, params)
            gt = impl["connection_deformed"](p, st, params)
            A = impl["projective_one_form"](st, s)
        except MetricSingular:
            skipped += 1
            continue
        worst = max(worst, float(np.abs(projective.apply_projective(g, A) - gt).max()))
        try:
            A2, _ = projective.extract_projective(g, gt)
            worst_rt = max(worst_rt, float(np.abs(A2.a - A.a).max()))
        except NotProjectivelyRelated as exc:
            worst_rt = max(worst_rt, exc.residual)
        n += 1
    rt_tol = cfg.tolerances["projective_roundtrip"]
    return [CheckResult("projective_algebraic", n, worst, tol, worst < tol, skipped),
            CheckResult("projective_roundtrip", n, worst_rt, rt_tol, worst_rt < rt_tol, skipped)]


def _check_oracle(cfg, plan, impl, rng):
    tol = cfg.tolerances["connection_oracle"]
    worst, n, skipped = 0.0, 0, 0
    for k in plan.kappas:
        for s in plan.s_projective:
            params = CosmologyParams(kappa=k, s=s)
            for _ in range(plan.n_oracle):
                p, st = random_state(rng, k, s)
                for which, name in ((frame.STANDARD, "connection_standard"),
                                    (frame.DEFORMED, "connection_deformed")):
                    try:
                        ref = oracle_connection(p, st, params, which, cfg)
                    except MetricSingular:
                        skipped += 1
                        continue
                    worst = max(worst, float(np.abs(ref - impl[name](p, st, params)).max()))
                    n += 1
    checks = [CheckResult("connection_oracle", n, worst, tol, worst < tol, skipped)]

    lo, hi = cfg.tolerances["fd_convergence"]
    params = CosmologyParams(kappa=1, s=-0.4)
    p = SpacetimePoint(0.2, 0.7, -0.4, 0.5)
    st = ScaleState(0.2, 1.1, 0.6, -0.3)
    ratios = []
    for which, name in ((frame.STANDARD, "connection_standard"),
                        (frame.DEFORMED, "connection_deformed")):
        exact = impl[name](p, st, params)
        h = cfg.convergence_step
        r1 = np.abs(oracle_connection(p, st, params, which, step=h, richardson=False) - exact).max()
        r2 = np.abs(oracle_connection(p, st, params, which, step=h / 2,
                                      richardson=False) - exact).max()
        ratios.append(r1 / r2 if r2 > 0 else np.inf)
    ok = all(lo <= r <= hi for r in ratios)
    worst_ratio = max(ratios, key=lambda r: abs(r - 4.0))
    checks.append(CheckResult("fd_convergence", 2, float(worst_ratio), [lo, hi], ok,
                              detail="ratios=" + ",".join(f"{r:.3f}" for r in ratios)))
    return checks


def _check_curvature(cfg, plan, impl, rng):
    tol_e = cfg.tolerances["einstein_closed_form"]
    tol_w = cfg.tolerances["weyl"]
    tol_b = cfg.tolerances["bianchi"]
    we = ww = wb = 0.0
    n = skipped = 0
    cells = [(k, s) for k in plan.kappas for s in plan.s_projective]
    for i in range(plan.n_curvature):
        k, s = cells[i % len(cells)]
        p, st = random_state(rng, k, s)
        params = CosmologyParams(kappa=k, s=s)
        for which in (frame.STANDARD, frame.DEFORMED):
            try:
                cb = frame.rw_curvature(p, st, params, which)
                E = impl["einstein_closed_form"](st, params, which)
            except MetricSingular:
                skipped += 1
                continue
            scale = max(1.0, float(np.abs(E).max()))
            we = max(we, float(np.abs(cb.einstein - E).max()) / scale)
            ww = max(ww, float(np.abs(cb.weyl).max()))
            Rm = cb.riemann
            cyc = Rm + np.einsum("mrsn->mnrs", Rm) + np.einsum("msnr->mnrs", Rm)
            wb = max(wb, float(np.abs(cyc).max()))
            n += 1
    return [CheckResult("einstein_closed_form", n, we, tol_e, we < tol_e, skipped),
            CheckResult("weyl", n, ww, tol_w, ww < tol_w, skipped),
            CheckResult("bianchi", n, wb, tol_b, wb < tol_b, skipped)]


# the deformed residual amplifies solver constraint error by 1/w^2
REINTERP_SOLVER_TOL = 1e-12
REINTERP_MIN_W = 0.05
REINTERP_BACKGROUNDS = {0: (2.0 / 9.0, 1.0, (1.0, 3.0)), 1: (1.0, 0.5, (0.0, 2.0)),
                        -1: (0.5, 0.4, (0.0, 2.0))}


def _check_reinterpretation(cfg, plan, impl, rng):
    tol = cfg.tolerances["reinterpretation"]
    tol_uu = cfg.tolerances["uu_identity"]
    worst = worst_uu = worst_zero = 0.0
    n = skipped = 0
    for k in plan.kappas:
        M, R0, trange = REINTERP_BACKGROUNDS[k]
        base = CosmologyParams(kappa=k, M=M)
        hist = cosmology.solve_friedmann(base, R0, trange, tol=REINTERP_SOLVER_TOL)
        for st in hist.samples[:: max(1, len(hist.samples) // 25)]:
            for s in plan.s_reinterpret + (0.0,):
                params = base.replace(s=s)
                if abs(1.0 - s * st.R**2) <= REINTERP_MIN_W:
                    skipped += 1
                    continue
                try:
                    res = cosmology.einstein_residual(st, params, frame.DEFORMED)
                    r = cosmology.reinterpret(st, params)
                except MetricSingular:
                    skipped += 1
                    continue
                worst = max(worst, float(np.abs(res).max()))
                eight_pi_G = 8 * np.pi * params.G
                uu = eight_pi_G * r.rho - 3 * s * k - r.lambda_tilde - eight_pi_G * r.rho_tilde
                worst_uu = max(worst_uu, abs(uu) / max(1.0, eight_pi_G * r.rho))
                if s == 0.0:
                    worst_zero = max(worst_zero, abs(r.lambda_tilde), abs(r.rho_tilde - r.rho))
                n += 1
            res = cosmology.einstein_residual(st, base, frame.STANDARD)
            worst = max(worst, float(np.abs(res).max()))
    return [CheckResult("reinterpretation", n, worst, tol, worst < tol, skipped),
            CheckResult("uu_identity", n, worst_uu, tol_uu, worst_uu < tol_uu and worst_zero == 0.0,
                        detail=f"s0_deviation={worst_zero:g}")]


def _check_friedmann(cfg, plan, impl, rng):
    tol = cfg.tolerances["friedmann_analytic"]
    worst, n = 0.0, 0
    cases = {0: (CosmologyParams(kappa=0, M=2.0 / 9.0), 0.1, 10.0, "stop"),
             1: (CosmologyParams(kappa=1, M=1.0), 0.2, 6.0, "continue"),
             -1: (CosmologyParams(kappa=-1, M=1.0), 0.2, 20.0, "stop")}
    for k in plan.kappas:
        params, t0, t1, mode = cases[k]
        st0 = analytic_scale(params, t0)
        hist = cosmology.solve_friedmann(params, st0.R, (t0, t1), on_turning_point=mode)
        for st in hist.samples:
            ref = analytic_scale(params, st.t)
            worst = max(worst, abs(st.R - ref.R) / ref.R)
            n += 1
    checks = [CheckResult("friedmann_analytic", n, worst, tol, worst < tol)]
    tol_c = cfg.tolerances["constraint_drift"]
    params = CosmologyParams(kappa=0, M=2.0 / 9.0)
    hist = cosmology.solve_friedmann(params, 1.0, (1.0, np.exp(15.3)))
    drift = hist.constraint_drift("scaled")
    efolds = float(np.log(hist.R[-1] / hist.R[0]))
    checks.append(CheckResult("constraint_drift", len(hist.samples), drift, tol_c,
                              drift < tol_c and efolds >= 10.0,
                              detail=f"efolds={efolds:.2f}"))
    return checks


# M with R0 = 1. Over one unit of affine parameter, with timelike speeds up to
# 0.5, every ray keeps |1 - s R^2| > 0.1 for s = 0.2 and stays inside the chart.
GEODESIC_BACKGROUNDS = {0: 0.045, 1: 0.545, -1: 0.05}


def random_direction(rng, cls):
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    if cls == "timelike":
        return d * rng.uniform(0.05, 0.5)
    if cls == "spacelike":
        return d * rng.uniform(1.3, 2.5)
    return d


def _check_geodesics(cfg, plan, impl, rng):
    tol = cfg.tolerances["geodesic_coincidence"]
    tol_r = cfg.tolerances["reparametrization"]
    worst = worst_r = 0.0
    n = skipped = 0
    for k in plan.kappas:
        for s in plan.s_geodesic:
            params = CosmologyParams(kappa=k, M=GEODESIC_BACKGROUNDS[k], s=s)
            st = cosmology.friedmann_state(0.0, 1.0, params)
            for cls in geodesics.CLASSES:
                for _ in range(plan.n_directions):
                    x = rng.uniform(-0.3, 0.3, size=3)
                    p = SpacetimePoint(0.0, *x)
                    init = geodesics.init_geodesic(p, random_direction(rng, cls), cls,
                                                   frame.STANDARD, st, params)
                    try:
                        c = geodesics.compare_geodesics(init, st, params, plan.geodesic_lambda)
                        r = geodesics.reparametrization_check(init, st, params,
                                                              plan.geodesic_lambda)
                    except GeometryError:
                        skipped += 1
                        continue
                    worst = max(worst, c.distance)
                    worst_r = max(worst_r, r.deviation)
                    n += 1
    return [CheckResult("geodesic_coincidence", n, worst, tol, worst < tol and n > 0, skipped),
            CheckResult("reparametrization", n, worst_r, tol_r, worst_r < tol_r and n > 0, skipped)]


def _check_negative(cfg, plan, impl, rng):
    threshold = cfg.tolerances["negative_controls"]
    outcomes = []
    p, st = random_state(rng, 1, 0.3)
    params = CosmologyParams(kappa=1, s=0.3)
    g = impl["connection_standard"](p, st, params)
    bumped = g.copy()
    bumped[1, 2, 3] += 1e-2
    bumped[1, 3, 2] -= 1e-2
    try:
        projective.extract_projective(g, bumped)
        outcomes.append(("torsion", False))
    except NotProjectivelyRelated:
        outcomes.append(("torsion", True))

    fparams = CosmologyParams(kappa=0, M=1.0, s=0.1)
    good = cosmology.friedmann_state(0.0, 2.0, fparams)
    bad = ScaleState(good.t, good.R, good.Rdot + 1e-2, good.Rddot)
    try:
        cosmology.reinterpret(bad, fparams)
        outcomes.append(("friedmann", False))
    except FriedmannViolation:
        outcomes.append(("friedmann", True))

    gparams = CosmologyParams(kappa=0, M=GEODESIC_BACKGROUNDS[0], s=0.2)
    gst = cosmology.friedmann_state(0.0, 1.0, gparams)
    init = geodesics.init_geodesic(SpacetimePoint(0.0, 0.1, 0.0, -0.1), [0.4, 0.1, 0.2],
                                   "timelike", frame.STANDARD, gst, gparams)
    rep = geodesics.reparametrization_check(init, gst, gparams, 1.0,
                                            perturbation=projective.OneForm([0, 0.05, 0, 0]))
    outcomes.append(("perturbed_form", rep.deviation > threshold))
    ok = all(v for _, v in outcomes)
    return [CheckResult("negative_controls", len(outcomes), rep.deviation, threshold, ok,
                        detail=" ".join(f"{k}={'caught' if v else 'MISSED'}" for k, v in outcomes))]


SUITE = {
    "projective": _check_projective,
    "oracle": _check_oracle,
    "curvature": _check_curvature,
    "reinterpretation": _check_reinterpretation,
    "friedmann": _check_friedmann,
    "geodesics": _check_geodesics,
    "negative": _check_negative,
}


def run_suite(config: OracleConfig | None = None, plan: SamplePlan | None = None,
              impl: dict | None = None) -> SuiteReport:
    """Run every cross-check (or ``plan.only``) with a fixed seed.

    ``impl`` overrides entries of :data:`DEFAULT_IMPL`, which is how mutation
    tests inject a broken formula.
    """
    config = config or OracleConfig()
    plan = plan or SamplePlan()
    funcs = dict(DEFAULT_IMPL, **(impl or {}))
    names = plan.only or tuple(SUITE)
    unknown = set(names) - set(SUITE)
    if unknown:
        raise ValueError(f"unknown checks {sorted(unknown)}; choose from {sorted(SUITE)}")
    checks = []
    for i, name in enumerate(SUITE):
        if name not in names:
            continue
        rng = np.random.default_rng([plan.seed, i])
        checks.extend(SUITE[name](config, plan, funcs, rng))
    return SuiteReport(plan.seed, checks)
