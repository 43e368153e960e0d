import numpy as np
import pytest
from hypothesis import given, settings, strategies as st_

from projrw import (CosmologyParams, DomainError, FriedmannViolation, MetricSingular,
                    ScaleState, SingularInput, TurningPoint, dust_density, einstein_residual,
                    friedmann_state, history_table, reinterpret, rw_normal_form, solve_friedmann)
from projrw.frame import frame_metric
from projrw.oracle import analytic_scale


# --- solver --------------------------------------------------------------------

def test_flat_power_law(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 8.0))
    np.testing.assert_allclose(hist.R, hist.t ** (2 / 3), rtol=1e-8)
    np.testing.assert_allclose(hist.Rdot, 2 / 3 * hist.t ** (-1 / 3), rtol=1e-8)
    assert hist.status == "complete"
    assert hist.t[-1] == pytest.approx(8.0)


def test_empty_flat_universe_is_static():
    hist = solve_friedmann(CosmologyParams(kappa=0, M=0.0), 1.7, (0.0, 3.0))
    assert hist.status == "complete"
    np.testing.assert_array_equal(hist.R, 1.7)
    np.testing.assert_array_equal(hist.Rdot, 0.0)


def test_closed_model_turning_point():
    params = CosmologyParams(kappa=1, M=1.0)
    hist = solve_friedmann(params, 0.5, (0.0, 10.0))
    assert hist.status == "turning_point"
    assert hist.R[-1] == pytest.approx(2.0, abs=1e-8)
    with pytest.raises(TurningPoint) as info:
        solve_friedmann(params, 0.5, (0.0, 10.0), on_turning_point="raise")
    assert info.value.R == pytest.approx(2.0, abs=1e-8)


def test_closed_model_recollapses_when_continued():
    params = CosmologyParams(kappa=1, M=1.0)
    t0 = 0.2
    hist = solve_friedmann(params, analytic_scale(params, t0).R, (t0, 20.0),
                           on_turning_point="continue")
    assert hist.status == "crunch"
    assert hist.R.max() <= 2.0
    assert hist.state_at(np.pi).R == pytest.approx(2.0, abs=1e-8)   # apex at t = pi G M
    assert hist.Rdot[-1] < 0
    assert np.all(hist.R > 0)


def test_start_at_maximum_expansion():
    params = CosmologyParams(kappa=1, M=1.0)
    assert solve_friedmann(params, 2.0, (0.0, 1.0)).status == "turning_point"
    with pytest.raises(TurningPoint):
        solve_friedmann(params, 2.0, (0.0, 1.0), on_turning_point="raise")
    assert solve_friedmann(params, 2.0, (0.0, 1.0), on_turning_point="continue").R[-1] < 2.0


def test_contracting_branch(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (0.0, 0.3), branch="contracting")
    assert np.all(np.diff(hist.R) < 0)


@pytest.mark.parametrize("bad", [
    dict(params=CosmologyParams(kappa=1, M=1.0), R0=3.0),
    dict(params=CosmologyParams(kappa=0, M=1.0), R0=-1.0),
    dict(params=CosmologyParams(kappa=0, M=1.0), R0=1.0, t_range=(2.0, 1.0)),
])
def test_invalid_inputs(bad):
    with pytest.raises(SingularInput):
        solve_friedmann(bad["params"], bad["R0"], bad.get("t_range", (0.0, 1.0)))


def test_params_validation():
    with pytest.raises(SingularInput, match="kappa must be -1, 0, or \\+1"):
        CosmologyParams(kappa=2)
    with pytest.raises(SingularInput):
        CosmologyParams(M=-1.0)
    with pytest.raises(SingularInput):
        CosmologyParams(G=0.0)


def test_history_stops_before_shell(flat_dust):
    hist = solve_friedmann(flat_dust.replace(s=0.1), 1.0, (1.0, 20.0))
    assert hist.status == "singular_shell"
    assert 1 - 0.1 * hist.R[-1] ** 2 == pytest.approx(1e-6, rel=1e-3)


def test_start_on_shell_rejected(flat_dust):
    with pytest.raises(MetricSingular):
        solve_friedmann(flat_dust.replace(s=1.0), 1.0, (1.0, 2.0))


@pytest.mark.parametrize("kappa,M,R0", [(0, 0.5, 1.0), (1, 2.0, 1.0), (-1, 0.3, 0.5)])
def test_constraint_preserved(kappa, M, R0):
    params = CosmologyParams(kappa=kappa, M=M)
    tol = 1e-10
    hist = solve_friedmann(params, R0, (0.0, 5.0), tol=tol)
    for st in hist.samples:
        c = abs(st.Rdot**2 - 2 * M / st.R + kappa)
        assert c < 10 * tol * max(1.0, 2 * M / st.R)
        assert abs(kappa + st.Rdot**2 + 2 * st.R * st.Rddot) < 10 * tol * max(1.0, 2 * M / st.R)


def test_relative_drift_at_tight_tolerance(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, np.exp(15.3)), tol=1e-12)
    assert np.log(hist.R[-1]) > 10.0
    assert hist.constraint_drift("relative") < 2e-8


def test_state_at(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 8.0))
    st = hist.state_at(3.3)
    assert st.R == pytest.approx(3.3 ** (2 / 3), rel=1e-8)
    with pytest.raises(DomainError):
        hist.state_at(9.0)


def test_t_eval(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 2.0), t_eval=np.linspace(1, 2, 11))
    np.testing.assert_allclose(hist.t, np.linspace(1, 2, 11))


# --- densities and reinterpretation -----------------------------------------

def test_dust_density():
    assert dust_density(2.0, CosmologyParams(M=0.0)) == 0.0
    assert dust_density(1.0, CosmologyParams(M=4 * np.pi / 3)) == pytest.approx(1.0)


def test_dust_density_is_e00(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 4.0))
    for st in hist.samples[::5]:
        E00 = 3 * (st.Rdot**2) / st.R**2
        assert E00 == pytest.approx(8 * np.pi * dust_density(st.R, flat_dust), rel=1e-9)


def test_reinterpret_s_zero():
    params = CosmologyParams(kappa=1, M=1.0)
    st = friedmann_state(0.0, 1.2, params)
    r = reinterpret(st, params)
    assert r.lambda_tilde == 0.0 and r.rho_tilde == r.rho and r.u_tilde_factor == 1.0


def test_reinterpret_example_values():
    params = CosmologyParams(kappa=0, M=1.0, s=0.1)
    st = friedmann_state(0.0, 2.0, params)
    rho = 3 / (32 * np.pi)
    printed = reinterpret(st, params, printed=True)
    assert printed.lambda_tilde == pytest.approx(-0.1)
    assert printed.rho_tilde == pytest.approx(rho + 0.1 / (8 * np.pi))
    r = reinterpret(st, params)
    assert r.lambda_tilde == pytest.approx(0.3)           # 3 s Rdot^2 with Rdot^2 = 1
    assert r.rho_tilde == pytest.approx(0.6 * rho)
    assert r.rho == pytest.approx(rho)


@pytest.mark.parametrize("printed", [False, True])
def test_turning_point_lambda_vanishes(printed):
    params = CosmologyParams(kappa=1, M=1.0, s=0.2)
    st = ScaleState(0.0, 2.0, 0.0, -0.25)
    assert reinterpret(st, params, printed=printed).lambda_tilde == pytest.approx(0.0, abs=1e-15)


def test_empty_universe_lambda_constant():
    for k in (-1, 1):
        params = CosmologyParams(kappa=k, M=0.0, s=0.3)
        R0 = 0.7
        if k == 1:
            # no empty closed solution; evaluate the formula on the constraint surface directly
            with pytest.raises(SingularInput):
                friedmann_state(0.0, R0, params)
            continue
        hist = solve_friedmann(params, R0, (0.0, 0.5))
        lams = {reinterpret(st, params).lambda_tilde for st in hist.samples}
        np.testing.assert_allclose(sorted(lams), -3 * 0.3 * k, rtol=1e-8)
        printed = [reinterpret(st, params, printed=True).lambda_tilde for st in hist.samples]
        np.testing.assert_allclose(printed, 0.3 * k, rtol=1e-8)


def test_lambda_varies_with_matter(flat_dust):
    params = flat_dust.replace(s=-0.2)
    hist = solve_friedmann(params, 1.0, (1.0, 3.0))
    lams = np.array([reinterpret(st, params).lambda_tilde for st in hist.samples])
    assert np.ptp(lams) > 1e-3


def test_u_tilde_unit_norm():
    params = CosmologyParams(kappa=-1, M=0.5, s=-0.7)
    st = friedmann_state(0.0, 1.3, params)
    u = np.array([reinterpret(st, params).u_tilde_factor, 0, 0, 0])
    assert u @ frame_metric("deformed", params.s, st.R) @ u == pytest.approx(-1.0, abs=1e-12)


def test_reinterpret_rejects_non_solution():
    params = CosmologyParams(kappa=0, M=1.0, s=0.1)
    st = friedmann_state(0.0, 2.0, params)
    with pytest.raises(FriedmannViolation):
        reinterpret(ScaleState(0.0, 2.0, st.Rdot * 1.01, st.Rddot), params)


def test_reinterpret_on_shell_rejected():
    params = CosmologyParams(kappa=0, M=1.0, s=0.25)
    with pytest.raises(MetricSingular):
        reinterpret(friedmann_state(0.0, 2.0, params), params)


def test_negative_density_reported():
    params = CosmologyParams(kappa=0, M=1.0, s=0.5)
    r = reinterpret(friedmann_state(0.0, 2.0, params), params)
    assert r.rho_tilde < 0 and r.energy_condition_violated


# --- Einstein residuals ----------------------------------------------------------

@pytest.mark.parametrize("kappa,M,R0", [(0, 2 / 9, 1.0), (1, 1.0, 0.5), (-1, 0.5, 0.4)])
@pytest.mark.parametrize("s", [-1.0, 0.3])
def test_einstein_residual_along_history(kappa, M, R0, s):
    base = CosmologyParams(kappa=kappa, M=M)
    hist = solve_friedmann(base, R0, (1.0, 2.0) if kappa == 0 else (0.0, 1.0), tol=1e-12)
    for st in hist.samples[::3]:
        assert np.abs(einstein_residual(st, base, "standard")).max() < 1e-9
        if abs(1 - s * st.R**2) > 0.05:
            params = base.replace(s=s)
            assert np.abs(einstein_residual(st, params, "deformed")).max() < 1e-9
            assert np.abs(einstein_residual(st, params, "deformed",
                                            method="closed_form")).max() < 1e-9


def test_printed_variant_leaves_spatial_residual():
    params = CosmologyParams(kappa=0, M=1.0, s=0.1)
    st = friedmann_state(0.0, 2.0, params)
    res = einstein_residual(st, params, "deformed", printed=True)
    w = 1 - 0.1 * 4
    np.testing.assert_allclose(np.diag(res)[1:], -4 * 0.1 * st.Rdot**2 / w, rtol=1e-12)
    assert abs(res[0, 0]) < 1e-12


def test_printed_variant_is_self_consistent():
    """Printed Einstein tensor with printed Lambda~, rho~ balances exactly."""
    params = CosmologyParams(kappa=-1, M=0.7, s=-0.4)
    st = friedmann_state(0.0, 1.1, params)
    res = einstein_residual(st, params, "deformed", printed=True, method="closed_form")
    assert np.abs(res).max() < 1e-13


def test_residual_detects_non_solution():
    params = CosmologyParams(kappa=0, M=1.0)
    st = friedmann_state(0.0, 2.0, params)
    bad = ScaleState(0.0, 2.0, np.sqrt(st.Rdot**2 + 1e-2), st.Rddot)
    res = np.abs(einstein_residual(bad, params, "standard")).max()
    assert 1e-4 < res < 1e-1


# --- normal form ---------------------------------------------------------------

def test_normal_form_identity(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 3.0))
    nf = rw_normal_form(hist, 0.0)
    tab = nf.table
    np.testing.assert_allclose(tab["t_tilde"], hist.t - 1.0, atol=1e-12)
    np.testing.assert_array_equal(tab["R_tilde"], hist.R)


def test_normal_form_constant_scale():
    hist = solve_friedmann(CosmologyParams(kappa=0, M=0.0), 1.0, (0.0, 2.0))
    nf = rw_normal_form(hist, -1.0)
    for t in (0.5, 1.0, 2.0):
        tt, Rt = nf(t)
        assert tt == pytest.approx(t / 2)
        assert Rt == pytest.approx(1 / np.sqrt(2))


def test_normal_form_certificate(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 5.0))
    assert rw_normal_form(hist, -0.5).certify() < 1e-8


def test_normal_form_refuses_sign_change(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 30.0))
    with pytest.raises(MetricSingular):
        rw_normal_form(hist, 0.1)


def test_history_table_columns(flat_dust):
    hist = solve_friedmann(flat_dust, 1.0, (1.0, 2.0))
    tab = history_table(hist, s=0.1)
    assert list(tab) == ["t", "R", "Rdot", "Rddot", "rho", "lambda_tilde", "rho_tilde"]
    np.testing.assert_allclose(tab["rho_tilde"], tab["rho"] * (1 - 0.1 * tab["R"] ** 2))


@settings(max_examples=60, deadline=None)
@given(st_.sampled_from([-1, 0, 1]), st_.floats(0.05, 3.0), st_.floats(0.2, 3.0),
       st_.floats(-2.0, 2.0), st_.booleans())
def test_uu_identity(kappa, M, R, s, printed):
    params = CosmologyParams(kappa=kappa, M=M, s=s)
    if 2 * M / R - kappa < 0 or abs(1 - s * R * R) < 1e-3:
        return
    r = reinterpret(friedmann_state(0.0, R, params), params, printed=printed)
    e = 8 * np.pi
    lhs = e * r.rho - 3 * s * kappa - r.lambda_tilde
    assert lhs == pytest.approx(e * r.rho_tilde, rel=1e-12, abs=1e-12 * max(1.0, e * r.rho))
