import itertools
import json

import numpy as np
import pytest

from knotcsi import geometry as geo

EMBEDDED = ["line", "long_unknot_planar", "long_trefoil", "long_trefoil_alt",
            "long_figure_eight"]
SINGULAR = ["singular_x2_crossed", "singular_x2_nested", "singular_x3"]


def curves_to_check(obj):
    if isinstance(obj, geo.LongLink2):
        return list(obj.strands())
    if isinstance(obj, geo.SingularLongKnot):
        return [obj.curve]
    return [obj]


def test_unknown_builtin():
    with pytest.raises(geo.GeometryError):
        geo.builtin("granny_knot")


@pytest.mark.parametrize("name", sorted(geo.BUILTIN_NAMES))
def test_tails_exactly_on_reference_line(name):
    obj = geo.builtin(name)
    for curve in curves_to_check(obj):
        R = curve.support_radius
        ts = np.concatenate([np.linspace(R + 1e-9, 3 * R + 1.0, 57),
                             -np.linspace(R + 1e-9, 3 * R + 1.0, 57)])
        pts = curve.point(ts)
        vel = curve.velocity(ts)
        want = np.stack([ts, np.full_like(ts, curve.offset), np.zeros_like(ts)], axis=1)
        assert np.array_equal(pts, want)
        wantv = np.zeros_like(vel)
        wantv[:, 0] = 1.0
        assert np.array_equal(vel, wantv)


@pytest.mark.parametrize("name", sorted(geo.BUILTIN_NAMES))
def test_derivative_matches_finite_differences(name):
    rng = np.random.default_rng(11)
    obj = geo.builtin(name)
    for curve in curves_to_check(obj):
        R = curve.support_radius + 1.0
        t = rng.uniform(-R, R, size=1000)
        h = 1e-6
        fd = (curve.point(t + h) - curve.point(t - h)) / (2 * h)
        v = curve.velocity(t)
        num = np.linalg.norm(fd - v, axis=1)
        den = np.linalg.norm(v, axis=1)
        assert np.all(num < 1e-6 * np.maximum(den, 1.0))


def test_min_separation_examples():
    assert abs(geo.min_separation(geo.builtin("parallel_lines")) - 1.0) < 1e-9
    for name in SINGULAR:
        assert geo.min_separation(geo.builtin(name)) < 1e-6
    assert geo.min_separation(geo.builtin("long_trefoil")) > 0.3
    assert geo.min_speed(geo.builtin("long_trefoil")) > 0.2


def test_resolution_displacement_is_2eps_at_the_marked_point():
    s = geo.builtin("singular_x2_crossed")
    eps = 0.2
    plus = geo.resolve_singular(s, (1, 1), eps=eps, validate=False)
    minus = geo.resolve_singular(s, (-1, 1), eps=eps, validate=False)
    t1 = s.pairs[0][1]
    d = plus.point(np.array([t1])) - minus.point(np.array([t1]))
    assert abs(np.linalg.norm(d) - 2 * eps) < 1e-12
    # and the direction is the marked pair's normal
    n = s.normals()[0]
    assert abs(abs(d[0] @ n) - 2 * eps) < 1e-12


def test_resolution_converges_to_singular_curve():
    s = geo.builtin("singular_x3")
    t = np.linspace(-9, 9, 400)
    base = s.curve.point(t)
    for eps in (0.2, 0.05, 0.01):
        K = geo.resolve_singular(s, (1, -1, 1), eps=eps, validate=False)
        gap = np.abs(K.point(t) - base).max()
        assert gap <= eps + 1e-12


@pytest.mark.parametrize("name,eps", [("singular_x2_crossed", 0.35),
                                      ("singular_x2_nested", 0.35),
                                      ("singular_x3", 0.3)])
def test_all_resolutions_embedded(name, eps):
    s = geo.builtin(name)
    k = len(s.pairs)
    seen = set()
    for signs in itertools.product((1, -1), repeat=k):
        K = geo.resolve_singular(s, signs, eps=eps)
        assert geo.min_separation(K) > 0
        seen.add(signs)
    assert len(seen) == 2 ** k


def test_resolution_rejects_oversized_eps():
    s = geo.builtin("singular_x2_crossed")
    with pytest.raises(geo.GeometryError):
        geo.resolve_singular(s, (1, 1), eps=5.0)


def test_concatenate_identity_translations():
    K = geo.builtin("long_trefoil")
    line = geo.builtin("line")
    left = geo.concatenate(line, K)
    right = geo.concatenate(K, line)
    t = np.linspace(-40, 40, 800)
    shift = left.c2  # K acts on t > 0 shifted by c2
    want = K.point(t - shift) + np.array([shift, 0, 0])
    assert np.allclose(left.point(t), want, atol=1e-9)
    shift2 = right.c1
    want2 = K.point(t + shift2) - np.array([shift2, 0, 0])
    assert np.allclose(right.point(t), want2, atol=1e-9)
    # support radius bound
    both = geo.concatenate(K, K)
    assert both.support_radius <= 2 * K.support_radius + 2 * 1.0 + 1e-9


def test_concatenate_requires_offset_zero():
    with pytest.raises(geo.GeometryError):
        geo.concatenate(geo.Line(1.0), geo.Line(0.0))


def test_curve_spec_roundtrip_bit_exact():
    doc = {"kind": "perturbed_line", "offset": 0.0,
           "window": [-2.5, 2.5],
           "coeffs": [[0.0, 1.3, 0.0], [0.4, 0.7, 0.0]]}
    obj = geo.from_spec(doc)
    assert geo.to_spec(obj) == doc
    assert geo.to_spec(geo.from_spec(json.dumps(doc))) == doc
    # degenerate perturbation is the reference line
    empty = geo.from_spec({"kind": "perturbed_line", "window": [-1, 1], "coeffs": []})
    t = np.linspace(-3, 3, 101)
    assert np.array_equal(empty.point(t)[:, 0], t)
    assert np.all(empty.point(t)[:, 1:] == 0)


def test_curve_spec_errors():
    with pytest.raises(geo.GeometryError):
        geo.from_spec({"kind": "perturbed_line", "window": [2, -2], "coeffs": []})
    with pytest.raises(geo.GeometryError):
        geo.from_spec({"kind": "perturbed_line", "coeffs": [[1, 2]]})
    with pytest.raises(geo.GeometryError):
        geo.from_spec({"window": [0, 1]})
    with pytest.raises(geo.GeometryError):
        geo.from_spec({"kind": "builtin"})


def test_singular_marked_pairs_validated():
    line = geo.Line(0.0)
    with pytest.raises(geo.GeometryError):
        geo.SingularLongKnot(line, [(0.0, 1.0)])  # points do not meet
