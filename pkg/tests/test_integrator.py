import math

import numpy as np
import pytest

from knotcsi import geometry as geo
from knotcsi import integrator as itg
from knotcsi.algebra import casson_weight_system
from knotcsi.diagrams import Diagram, tripod, x_diagram

SKEW = [geo.Line3D((0, 0, 0), (1, 0, 0)), geo.Line3D((0, 0, 1), (0, 1, 0))]
CHORD = Diagram("odd", 2, 0, ((1, 2),))


def small_params(**kw):
    base = dict(n_samples=1 << 16, seed=7, replicates=8, chunk=1 << 12)
    base.update(kw)
    return itg.MCParams(**base)


def test_gauss_map():
    assert np.allclose(itg.gauss_map((0, 0, 0), (0, 0, 1)), (0, 0, 1))
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = rng.normal(size=(2, 3))
        assert np.allclose(itg.gauss_map(a, b), -itg.gauss_map(b, a))
    with pytest.raises(itg.IntegratorError):
        itg.gauss_map((1, 2, 3), (1, 2, 3))


def test_sphere_frame_orthonormal_right_handed():
    rng = np.random.default_rng(1)
    u = rng.normal(size=(200, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    e1, e2 = itg.sphere_frame(u)
    assert np.abs((e1 * e1).sum(-1) - 1).max() < 1e-12
    assert np.abs((e2 * e2).sum(-1) - 1).max() < 1e-12
    assert np.abs((e1 * e2).sum(-1)).max() < 1e-12
    assert np.abs((e1 * u).sum(-1)).max() < 1e-12
    assert np.abs((e2 * u).sum(-1)).max() < 1e-12
    det = np.linalg.det(np.stack([e1, e2, u], axis=-1))
    assert np.abs(det - 1).max() < 1e-12


def test_integrand_matches_closed_form_gauss():
    # acceptance criterion 8: relative error <= 1e-10 at 1000 random points
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        s, t = rng.normal(size=2) * 3
        x = itg.FiberPoint((s, t), strands=(0, 1))
        got = itg.pullback_integrand(CHORD, SKEW, x)
        want = -1.0 / (4 * math.pi * (s * s + t * t + 1) ** 1.5)
        worst = max(worst, abs(got - want) / abs(want))
    assert worst <= 1e-10


def test_frame_rotation_invariance():
    rng = np.random.default_rng(5)

    def rotated(u):
        e1, e2 = itg.sphere_frame(u)
        th = rng.uniform(0, 2 * np.pi, size=u.shape[:-1] + (1,))
        return np.cos(th) * e1 + np.sin(th) * e2, -np.sin(th) * e1 + np.cos(th) * e2

    tref = geo.builtin("long_trefoil")
    for _ in range(25):
        t = np.sort(rng.uniform(-3, 3, size=4))
        x = itg.FiberPoint(tuple(t))
        a = itg.pullback_integrand(x_diagram(), tref, x)
        b = itg.pullback_integrand(x_diagram(), tref, x, frame_fn=rotated)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_edge_reversal_negates_integrand():
    from knotcsi.diagrams import reverse_connection

    rng = np.random.default_rng(8)
    tref = geo.builtin("long_trefoil")
    T = tripod()
    Trev = reverse_connection(T, 1)
    for _ in range(20):
        t = np.sort(rng.uniform(-3, 3, size=3))
        y = tuple(rng.normal(size=3))
        x = itg.FiberPoint(tuple(t), y)
        a = itg.pullback_integrand(T, tref, x)
        b = itg.pullback_integrand(Trev, tref, x)
        assert abs(a + b) <= 1e-12 * max(1.0, abs(a))


def test_vertex_relabel_covariance():
    # permuting free labels multiplies the integrand by the canonical sign
    from knotcsi.diagrams import canonical_form, relabel

    rng = np.random.default_rng(9)
    d = Diagram("odd", 4, 2, (), (), ((1, 5), (2, 5), (3, 6), (4, 6), (5, 6)))
    r = relabel(d, {5: 6, 6: 5})
    _, s0 = canonical_form(d)
    _, s1 = canonical_form(r)
    rel_sign = s0 * s1
    tref = geo.builtin("long_trefoil")
    for _ in range(20):
        t = np.sort(rng.uniform(-3, 3, size=4))
        y = rng.normal(size=(2, 3))
        a = itg.pullback_integrand(d, tref, itg.FiberPoint(tuple(t), tuple(map(tuple, y))))
        # swapping the labels of the free vertices relabels their coordinates
        b = itg.pullback_integrand(r, tref, itg.FiberPoint(tuple(t), (tuple(y[1]), tuple(y[0]))))
        assert abs(a - rel_sign * b) <= 1e-12 * max(1.0, abs(a))


def test_degenerate_diagrams_rejected():
    with pytest.raises(itg.IntegratorError):
        itg.pullback_integrand(Diagram("odd", 1, 0, (), (1,), ()),
                               geo.builtin("line"), itg.FiberPoint((0.0,)))
    with pytest.raises(itg.IntegratorError) as err:
        itg.integrate_diagram(Diagram("odd", 1, 0, (), (1,), ()),
                              geo.builtin("line"), small_params())
    assert "form degree" in str(err.value)


def test_fiber_point_ordering_enforced():
    with pytest.raises(itg.IntegratorError):
        itg.FiberPoint((1.0, 0.0))
    itg.FiberPoint((1.0, 0.0), strands=(0, 1))  # different strands: fine


def test_x_integrand_identically_zero_on_line():
    rng = np.random.default_rng(13)
    line = geo.builtin("line")
    for _ in range(30):
        t = np.sort(rng.uniform(-4, 4, size=4))
        assert itg.pullback_integrand(x_diagram(), line, itg.FiberPoint(tuple(t))) == 0.0


def test_writhe_integrand_zero_on_planar_curves():
    rng = np.random.default_rng(14)
    unknot = geo.builtin("long_unknot_planar")
    for _ in range(30):
        t = np.sort(rng.uniform(-3, 3, size=2))
        assert itg.pullback_integrand(CHORD, unknot, itg.FiberPoint(tuple(t))) == 0.0


def test_fiber_orientation_signs():
    assert itg.fiber_orientation(CHORD) == 1
    assert itg.fiber_orientation(x_diagram()) == -1
    assert itg.fiber_orientation(tripod()) == 1
    nested = Diagram("odd", 4, 0, ((1, 4), (2, 3)))
    assert itg.fiber_orientation(nested) == 1


def test_hypercube_constant():
    est = itg.mc_integrate(lambda U: np.ones(len(U)), itg.Hypercube(3), small_params())
    assert est.value == 1.0 and est.stderr == 0.0


def test_proposal_density_normalized():
    # E[1_box / q(y)] = box volume exactly when q is the true density
    curve = geo.builtin("long_trefoil")
    params = small_params(n_samples=1 << 18)
    prop = itg._Proposal(curve, params)
    dom = itg.FiberDomain(strands=(curve,), p_strands=(1,), q=1, L=4.0, proposal=prop)

    def f(T, Y):
        inside = np.all((Y[:, 0] >= prop.box_lo) & (Y[:, 0] <= prop.box_hi), axis=1)
        return inside / ((2 * dom.L) ** 1 / 1)  # cancel the time volume factor

    est = itg.mc_integrate(f, dom, params)
    assert abs(est.value - prop.box_vol) < 6 * max(est.stderr, 1e-3) + 0.02 * prop.box_vol


def test_skew_lines_integral():
    dom = itg.FiberDomain(strands=tuple(SKEW), p_strands=(1, 1), q=0, L=120.0)

    def f(T, Y):
        vals, _ = itg._integrand_batch(CHORD, dom.strands, (0, 1), T, Y)
        return vals

    est = itg.mc_integrate(f, dom, small_params(n_samples=1 << 19, L=120.0))
    assert abs(est.value - (-0.5)) < 0.02


def test_linking_parallel_lines_exactly_zero():
    est = itg.linking_number(geo.builtin("parallel_lines"), small_params())
    assert est.value == 0.0 and est.stderr == 0.0


def test_self_linking_translation_invariance():
    K = geo.builtin("long_trefoil")
    p = small_params(n_samples=1 << 17)
    a = itg.self_linking_A(K, p)
    b = itg.self_linking_A(K.translated((1.5, -2.0, 0.7)), p)
    assert abs(a.value - b.value) < 4 * math.hypot(a.stderr, b.stderr) + 1e-3


def test_deterministic_across_worker_counts():
    link = geo.builtin("long_hopf")
    outs = []
    for w in (1, 4, 8):
        est = itg.linking_number(link, small_params(workers=w))
        outs.append((est.value, est.stderr, tuple(est.replicate_means)))
    assert outs[0] == outs[1] == outs[2]


def test_same_seed_same_result_and_seeds_differ():
    K = geo.builtin("long_trefoil")
    a = itg.integrate_diagram(x_diagram(), K, small_params())
    b = itg.integrate_diagram(x_diagram(), K, small_params())
    c = itg.integrate_diagram(x_diagram(), K, small_params(seed=8))
    assert a.value == b.value and a.stderr == b.stderr
    assert a.value != c.value


def test_plain_mc_stderr_scaling():
    # N -> 10N should shrink the plain-MC standard error like 1/sqrt(10)
    dom = itg.FiberDomain(strands=tuple(SKEW), p_strands=(1, 1), q=0, L=40.0)

    def f(T, Y):
        vals, _ = itg._integrand_batch(CHORD, dom.strands, (0, 1), T, Y)
        return vals

    small = itg.mc_integrate(f, dom, itg.MCParams(n_samples=20_000, seed=3, rng="mc",
                                                  L=40.0, replicates=10, chunk=1 << 11))
    big = itg.mc_integrate(f, dom, itg.MCParams(n_samples=200_000, seed=3, rng="mc",
                                                L=40.0, replicates=10, chunk=1 << 11))
    ratio = small.stderr / big.stderr
    assert 1.6 < ratio < 6.5  # sqrt(10) ~ 3.16, generous slack for noise


def test_zero_weight_system_short_circuits():
    ws = casson_weight_system()
    zero = type(ws)(2, "trivalent", {})
    est = itg.type_k_invariant(zero, geo.builtin("line"), small_params())
    assert est.value == 0.0 and est.stderr == 0.0 and est.n_effective == 0


def test_type_k_scaling_exact():
    from fractions import Fraction

    K = geo.builtin("long_trefoil")
    ws = casson_weight_system()
    p = small_params()
    a = itg.type_k_invariant(ws, K, p)
    scaled = type(ws)(2, "trivalent", {d: Fraction(3) * v for d, v in ws.values.items()})
    b = itg.type_k_invariant(scaled, K, p)
    assert b.value == 3.0 * a.value


def test_type_k_degree2_equals_casson():
    K = geo.builtin("long_trefoil")
    p = small_params()
    a = itg.type_k_invariant(casson_weight_system(), K, p)
    b = itg.casson_v2(K, p)
    assert abs(a.value - b.value) < 1e-12


def test_type_k_anomaly_subtraction():
    K = geo.builtin("long_trefoil")
    p = small_params()
    ws = casson_weight_system()
    base = itg.type_k_invariant(ws, K, p)
    mu = {x_diagram(): 2.0}
    shifted = itg.type_k_invariant(ws, K, p, anomaly=mu)
    A = itg.self_linking_A(K, p, seed=itg._sub_seed(p.seed, "selflink"))
    assert abs((base.value - shifted.value) - 2.0 * A.value) < 1e-12


def test_nonfinite_guard():
    def bad(U):
        out = np.full(len(U), np.nan)
        return out

    with pytest.raises(itg.IntegratorError):
        itg.mc_integrate(bad, itg.Hypercube(2), small_params())
