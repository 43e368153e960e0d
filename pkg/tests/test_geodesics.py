import numpy as np
import pytest
from hypothesis import given, settings, strategies as st_

from projrw import (CosmologyParams, DegenerateDirection, EmptyOverlap, MetricSingular,
                    OneForm, PatchExit, ScaleState, SpacetimePoint, compare_geodesics,
                    friedmann_state, init_geodesic, integrate_geodesic, path_distance,
                    reparametrization_check)
from projrw.frame import frame_metric
from projrw.geodesics import (GeodesicState, causal_class_of, gamma_vv_deformed,
                              gamma_vv_standard, match_direction)
from projrw.frame import connection_deformed, connection_standard


@pytest.fixture
def background():
    params = CosmologyParams(kappa=0, M=0.045, s=0.2)
    return params, friedmann_state(0.0, 1.0, params)


def test_init_comoving(background):
    params, st = background
    p = SpacetimePoint(0.0)
    np.testing.assert_array_equal(init_geodesic(p, [0, 0, 0], "timelike", "standard",
                                                st, params).v, [1, 0, 0, 0])
    v = init_geodesic(p, [0, 0, 0], "timelike", "deformed", st, params).v
    np.testing.assert_allclose(v, [1 - 0.2, 0, 0, 0])


def test_init_null(background):
    params, st = background
    v = init_geodesic(SpacetimePoint(0.0), [1, 0, 0], "null", "standard", st, params).v
    np.testing.assert_array_equal(v, [1, 1, 0, 0])
    vt = init_geodesic(SpacetimePoint(0.0), [0, 3, 0], "null", "deformed", st, params).v
    assert vt @ frame_metric("deformed", 0.2, st.R) @ vt == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("cls,d,norm", [("timelike", [0.3, 0.1, 0], -1.0),
                                        ("spacelike", [2.0, 0, 0.5], 1.0)])
@pytest.mark.parametrize("tag", ["standard", "deformed"])
def test_init_normalization(background, cls, d, norm, tag):
    params, st = background
    v = init_geodesic(SpacetimePoint(0.0), d, cls, tag, st, params).v
    assert v[0] > 0
    assert v @ frame_metric(tag, params.s, st.R) @ v == pytest.approx(norm)


def test_init_errors(background):
    params, st = background
    p = SpacetimePoint(0.0)
    with pytest.raises(DegenerateDirection):
        init_geodesic(p, [0, 0, 0], "null", "standard", st, params)
    with pytest.raises(DegenerateDirection):
        init_geodesic(p, [0.5, 0, 0], "spacelike", "standard", st, params)
    with pytest.raises(DegenerateDirection):
        init_geodesic(p, [2.0, 0, 0], "timelike", "standard", st, params)
    with pytest.raises(MetricSingular):
        init_geodesic(p, [0, 0, 0], "timelike", "deformed", st, params.replace(s=1.0))


def test_causal_class_is_assigned_by_metric(background):
    params, st = background
    v = np.array([1.0, 0.9, 0.0, 0.0])
    assert causal_class_of(v, frame_metric("standard", 0.2, st.R)) == "timelike"
    # g~ weights time by 1/w^2 and space by 1/w, so the same ray stays timelike
    assert causal_class_of(v, frame_metric("deformed", 0.2, st.R)) == "timelike"
    assert causal_class_of([1, 1, 0, 0], frame_metric("standard", 0, 1.0)) == "null"


@pytest.mark.parametrize("kappa", [-1, 0, 1])
def test_gamma_contractions_match_coefficients(kappa, rng):
    x = rng.uniform(-0.5, 0.5, 3)
    v = rng.normal(size=4)
    st = ScaleState(0.0, 1.3, 0.4, 0.0)
    params = CosmologyParams(kappa=kappa, s=-0.3)
    p = SpacetimePoint(0.0, *x)
    np.testing.assert_allclose(gamma_vv_standard(x, v, st.R, st.Rdot, kappa),
                               np.einsum("mnr,n,r->m", connection_standard(p, st, params), v, v),
                               atol=1e-14)
    np.testing.assert_allclose(gamma_vv_deformed(x, v, st.R, st.Rdot, kappa, -0.3),
                               np.einsum("mnr,n,r->m", connection_deformed(p, st, params), v, v),
                               atol=1e-14)


def test_comoving_worldline_standard(background):
    params, st = background
    p = SpacetimePoint(0.0, 0.1, -0.2, 0.3)
    init = init_geodesic(p, [0, 0, 0], "timelike", "standard", st, params)
    path = integrate_geodesic(init, "standard", st, params, 2.0)
    np.testing.assert_allclose(path.coords[:, 0], path.lam, atol=1e-12)
    np.testing.assert_allclose(path.coords[:, 1:], [[0.1, -0.2, 0.3]] * len(path.lam), atol=0)


def test_comoving_worldline_deformed(background):
    params, st = background
    init = init_geodesic(SpacetimePoint(0.0), [0, 0, 0], "timelike", "deformed", st, params)
    path = integrate_geodesic(init, "deformed", st, params, 1.5)
    assert not path.coords[:, 1:].any()
    # staying unit in g~ means v^0 = 1 - s R^2 along the curve
    np.testing.assert_allclose(path.v[:, 0], 1 - 0.2 * path.R**2, rtol=1e-9)


def test_flat_static_straight_lines():
    params = CosmologyParams(kappa=0, M=0.0)
    st = ScaleState(0.0, 1.0, 0.0, 0.0)
    init = init_geodesic(SpacetimePoint(0.0, 0.1), [0.3, -0.2, 0.1], "timelike", "standard",
                         st, params)
    path = integrate_geodesic(init, "standard", st, params, 3.0)
    expected = init.p.coords + np.outer(path.lam, init.v)
    np.testing.assert_allclose(path.coords, expected, atol=1e-12)


@pytest.mark.parametrize("cls,d", [("timelike", [0.4, 0.1, 0]), ("null", [0, 1, 1]),
                                   ("spacelike", [1.5, 0, 0.4])])
@pytest.mark.parametrize("tag", ["standard", "deformed"])
def test_norm_conservation(background, cls, d, tag):
    params, st = background
    init = init_geodesic(SpacetimePoint(0.0, 0.1), d, cls, tag, st, params)
    path = integrate_geodesic(init, tag, st, params, 1.0, tol=1e-10)
    assert path.norm_drift() < 1e-8
    assert path.causal_class == cls


def test_leaving_closed_chart():
    """Stereographic chart of the sphere: q blows up at the antipode."""
    params = CosmologyParams(kappa=1, M=0.545)
    st = friedmann_state(0.0, 1.0, params)
    init = init_geodesic(SpacetimePoint(0.0, 1.5), [1, 0, 0], "null", "standard", st, params)
    with pytest.raises(PatchExit):
        integrate_geodesic(init, "standard", st, params, 5.0)


def test_open_chart_boundary_is_far():
    """The kappa = -1 ball boundary is at infinite distance; rays only creep toward it."""
    params = CosmologyParams(kappa=-1, M=0.05)
    st = friedmann_state(0.0, 0.2, params)
    init = init_geodesic(SpacetimePoint(0.0, 1.9), [1, 0, 0], "null", "standard", st, params)
    path = integrate_geodesic(init, "standard", st, params, 5.0)
    r = np.linalg.norm(path.coords[:, 1:], axis=1)
    assert np.all(np.diff(r) > 0) and r[-1] < 2.0


def test_reaching_the_shell():
    params = CosmologyParams(kappa=0, M=0.5, s=0.9)
    st = friedmann_state(0.0, 1.0, params)
    init = init_geodesic(SpacetimePoint(0.0), [0, 0, 0], "timelike", "deformed", st, params)
    # v^0 = 1 - s R^2 shrinks near the shell, so it takes a while to get there
    with pytest.raises(MetricSingular):
        integrate_geodesic(init, "deformed", st, params, 20.0)
    # the standard metric is regular there, so its curve runs through
    g = integrate_geodesic(init_geodesic(SpacetimePoint(0.0), [0, 0, 0], "timelike",
                                         "standard", st, params), "standard", st, params, 5.0)
    assert g.lam[-1] == pytest.approx(5.0)
    assert (0.9 * g.R**2).max() > 1


def test_path_distance_basics(background):
    params, st = background
    p = SpacetimePoint(0.0, 0.1)
    a = integrate_geodesic(init_geodesic(p, [0.3, 0, 0], "timelike", "standard", st, params),
                           "standard", st, params, 1.0)
    b = integrate_geodesic(init_geodesic(p, [0, 0.3, 0], "timelike", "standard", st, params),
                           "standard", st, params, 1.0)
    assert path_distance(a, a) == 0.0
    assert path_distance(a, b) == path_distance(b, a)
    assert path_distance(a, b) > 0.1


def test_path_distance_needs_overlap(background):
    params, st = background
    init = init_geodesic(SpacetimePoint(0.0), [0.3, 0, 0], "timelike", "standard", st, params)
    a = integrate_geodesic(init, "standard", st, params, 1.0)
    b = integrate_geodesic(init, "standard", st, params, 1.0, arc_max=0.0)
    with pytest.raises(EmptyOverlap):
        path_distance(a, b)


def test_null_compare_example():
    params = CosmologyParams(kappa=0, M=2 / 9, s=0.2)
    st = friedmann_state(1.0, 1.0, params)
    init = init_geodesic(SpacetimePoint(1.0), [1, 0, 0], "null", "standard", st, params)
    assert compare_geodesics(init, st, params, 1.0).distance < 1e-5


def test_parametrizations_differ_but_paths_agree(background):
    params, st = background
    init = init_geodesic(SpacetimePoint(0.0), [0.4, 0.2, 0], "timelike", "standard", st, params)
    c = compare_geodesics(init, st, params, 1.0)
    assert c.distance < 1e-8
    # at equal affine parameter the two curves are at different places
    assert abs(c.standard.coords[-1, 0] - c.other.coords[-1, 0]) > 1e-3 or \
        abs(c.standard.lam[-1] - c.other.lam[-1]) > 1e-3


def test_reparametrization_trivial_at_zero_s():
    params = CosmologyParams(kappa=1, M=0.545)
    st = friedmann_state(0.0, 1.0, params)
    init = init_geodesic(SpacetimePoint(0.0, 0.1), [0.2, 0.3, 0], "timelike", "standard",
                         st, params)
    rep = reparametrization_check(init, st, params, 1.0)
    # the two curves are sampled on different grids, so only the driven one is exact
    assert rep.deviation < 1e-10
    np.testing.assert_array_equal(rep.driven.coords,
                                  integrate_geodesic(init, "standard", st, params, 1.0).coords)


def test_perturbed_form_breaks_coincidence(background):
    params, st = background
    init = init_geodesic(SpacetimePoint(0.0), [0.4, 0.1, 0.2], "timelike", "standard",
                         st, params)
    assert reparametrization_check(init, st, params, 1.0).deviation < 1e-6
    rep = reparametrization_check(init, st, params, 1.0,
                                  perturbation=OneForm([0, 0, 0.05, 0]))
    assert rep.deviation > 1e-4


def test_match_direction_keeps_ray(background):
    params, st = background
    init = init_geodesic(SpacetimePoint(0.0), [0.4, 0.1, 0.2], "timelike", "standard",
                         st, params)
    m = match_direction(init, "deformed", st, params)
    np.testing.assert_allclose(np.cross(m.v[:3], init.v[:3]), 0, atol=1e-15)
    assert m.v @ frame_metric("deformed", 0.2, st.R) @ m.v == pytest.approx(-1.0)


@settings(max_examples=15, deadline=None)
@given(st_.sampled_from([-1, 0, 1]), st_.sampled_from([-0.5, 0.2]),
       st_.sampled_from(["timelike", "null", "spacelike"]),
       st_.lists(st_.floats(-1, 1), min_size=3, max_size=3).filter(
           lambda d: 0.2 < np.linalg.norm(d)))
def test_same_paths_property(kappa, s, cls, d):
    M = {0: 0.045, 1: 0.545, -1: 0.05}[kappa]
    params = CosmologyParams(kappa=kappa, M=M, s=s)
    st = friedmann_state(0.0, 1.0, params)
    d = np.asarray(d) / np.linalg.norm(d)
    d *= {"timelike": 0.4, "null": 1.0, "spacelike": 1.8}[cls]
    init = init_geodesic(SpacetimePoint(0.0, 0.1, 0.0, -0.1), d, cls, "standard", st, params)
    assert compare_geodesics(init, st, params, 1.0).distance < 1e-5
    assert reparametrization_check(init, st, params, 1.0).deviation < 1e-6
