"""Parametrized long curves: long knots, 2-strand links, singular knots.

A long curve agrees exactly with the reference line t ↦ (t, offset, 0)
outside [-R, R] (R = support radius) and is C¹ everywhere with closed-form
derivatives; the integrands never need more than first derivatives.

Knotted builtins are Catmull-Rom waypoint curves: cubic Hermite pieces
through hand-tuned or sampled control points at unit parameter spacing, with
the end tangents forced to (1, 0, 0) so the tails continue the reference
line exactly.  Embeddedness of every builtin is checked numerically
(min_separation) and the knot types are certified combinatorially by the
projection module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize


class GeometryError(ValueError):
    pass


def _as_array(t):
    return np.asarray(t, dtype=float)


class LongCurve:
    """Base class; subclasses implement point(t) and velocity(t), vectorized."""

    offset = 0.0
    support_radius = 0.0

    def point(self, t):
        raise NotImplementedError

    def velocity(self, t):
        raise NotImplementedError

    def translated(self, vec):
        return TranslatedCurve(self, tuple(float(v) for v in vec))

    def bounding_box(self, pad=0.0, n=512):
        t = np.linspace(-self.support_radius - 1.0, self.support_radius + 1.0, n)
        pts = self.point(t)
        return pts.min(axis=0) - pad, pts.max(axis=0) + pad


@dataclass(frozen=True)
class Line(LongCurve):
    offset: float = 0.0

    support_radius = 0.0

    def point(self, t):
        t = _as_array(t)
        out = np.zeros(t.shape + (3,))
        out[..., 0] = t
        out[..., 1] = self.offset
        return out

    def velocity(self, t):
        t = _as_array(t)
        out = np.zeros(t.shape + (3,))
        out[..., 0] = 1.0
        return out


@dataclass(frozen=True)
class Line3D:
    """An arbitrary affine line t ↦ base + t*direction.

    Not a long curve (no compact support); used for closed-form oracle
    geometries like the perpendicular skew lines.
    """

    base: tuple
    direction: tuple

    support_radius = 0.0
    offset = 0.0

    def point(self, t):
        t = _as_array(t)
        return np.asarray(self.base, dtype=float) + t[..., None] * np.asarray(self.direction, dtype=float)

    def velocity(self, t):
        t = _as_array(t)
        return np.broadcast_to(np.asarray(self.direction, dtype=float), t.shape + (3,)).copy()


@dataclass(frozen=True)
class TrigPerturbedLine(LongCurve):
    """Reference line plus a windowed trigonometric perturbation.

    Inside the window [a, b] the curve is
        (t, offset, 0) + W(t) * sum_m coeffs[m-1] * sin(m*pi*(t-a)/(b-a))
    with W(t) = sin^2(pi*(t-a)/(b-a)), which vanishes to second order at the
    window ends, so curve and derivative match the line exactly outside.
    """

    window: tuple = (-1.0, 1.0)
    coeffs: tuple = ()
    offset: float = 0.0

    @property
    def support_radius(self):
        a, b = self.window
        return max(abs(a), abs(b))

    def point(self, t):
        t = _as_array(t)
        out = np.zeros(t.shape + (3,))
        out[..., 0] = t
        out[..., 1] = self.offset
        if not self.coeffs:
            return out
        a, b = self.window
        mask = (t > a) & (t < b)
        u = (t[mask] - a) / (b - a)
        w = np.sin(np.pi * u) ** 2
        bump = np.zeros(u.shape + (3,))
        for m, amp in enumerate(self.coeffs, start=1):
            bump += np.sin(m * np.pi * u)[..., None] * np.asarray(amp, dtype=float)
        out[mask] += w[..., None] * bump
        return out

    def velocity(self, t):
        t = _as_array(t)
        out = np.zeros(t.shape + (3,))
        out[..., 0] = 1.0
        if not self.coeffs:
            return out
        a, b = self.window
        mask = (t > a) & (t < b)
        u = (t[mask] - a) / (b - a)
        du = 1.0 / (b - a)
        w = np.sin(np.pi * u) ** 2
        dw = np.pi * du * np.sin(2 * np.pi * u)
        bump = np.zeros(u.shape + (3,))
        dbump = np.zeros(u.shape + (3,))
        for m, amp in enumerate(self.coeffs, start=1):
            amp = np.asarray(amp, dtype=float)
            bump += np.sin(m * np.pi * u)[..., None] * amp
            dbump += (m * np.pi * du) * np.cos(m * np.pi * u)[..., None] * amp
        out[mask] += dw[..., None] * bump + w[..., None] * dbump
        return out


class WaypointCurve(LongCurve):
    """Catmull-Rom interpolant through waypoints.

    Waypoint i sits at parameter t0 + i (uniform, the default) or at an
    explicit strictly-increasing params[i].  The first and last waypoints
    must lie on the reference line with x equal to their parameter; their
    tangents are pinned to (1, 0, 0) so the curve continues as the exact
    line outside the waypoint range.
    """

    def __init__(self, points, t0=None, offset=0.0, params=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
            raise GeometryError("need an (n, 3) array of at least two waypoints")
        if params is None:
            if t0 is None:
                raise GeometryError("give t0 (uniform spacing) or explicit params")
            params = t0 + np.arange(len(pts), dtype=float)
        else:
            params = np.asarray(params, dtype=float)
            if params.shape != (len(pts),) or np.any(np.diff(params) <= 0):
                raise GeometryError("params must be strictly increasing, one per waypoint")
        for idx in (0, -1):
            want = np.array([params[idx], offset, 0.0])
            if not np.allclose(pts[idx], want, atol=1e-12):
                raise GeometryError(
                    f"waypoint {idx} must sit on the reference line at {want}, got {pts[idx]}")
        self.points = pts
        self.params = params
        self.offset = float(offset)
        tang = np.empty_like(pts)
        tang[1:-1] = (pts[2:] - pts[:-2]) / (params[2:] - params[:-2])[:, None]
        tang[0] = tang[-1] = (1.0, 0.0, 0.0)
        self.tangents = tang  # dP/dt
        self.support_radius = max(abs(params[0]), abs(params[-1]))

    def _eval(self, t, deriv):
        t = _as_array(t)
        out = np.zeros(t.shape + (3,))
        prm = self.params
        mid = (t > prm[0]) & (t < prm[-1])
        tails = ~mid
        if deriv:
            out[tails, 0] = 1.0
        else:
            out[tails, 0] = t[tails]
            out[tails, 1] = self.offset
        if np.any(mid):
            tm = t[mid]
            i = np.clip(np.searchsorted(prm, tm, side="right") - 1, 0, len(prm) - 2)
            h = (prm[i + 1] - prm[i])[..., None]
            u = ((tm - prm[i])[..., None]) / h
            p0, p1 = self.points[i], self.points[i + 1]
            m0, m1 = self.tangents[i] * h, self.tangents[i + 1] * h
            if deriv:
                h00 = 6 * u * u - 6 * u
                h10 = 3 * u * u - 4 * u + 1
                h01 = -h00
                h11 = 3 * u * u - 2 * u
                out[mid] = (h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1) / h
            else:
                h00 = 2 * u ** 3 - 3 * u ** 2 + 1
                h10 = u ** 3 - 2 * u ** 2 + u
                h01 = 1 - h00
                h11 = u ** 3 - u ** 2
                out[mid] = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
        return out

    def point(self, t):
        return self._eval(t, deriv=False)

    def velocity(self, t):
        return self._eval(t, deriv=True)


@dataclass(frozen=True)
class TranslatedCurve(LongCurve):
    base: LongCurve
    shift: tuple

    @property
    def support_radius(self):
        return self.base.support_radius

    @property
    def offset(self):
        return self.base.offset

    def point(self, t):
        return self.base.point(t) + np.asarray(self.shift)

    def velocity(self, t):
        return self.base.velocity(t)


class ConcatenatedCurve(LongCurve):
    """Stacking of two long knots: k1 acts on t < 0, k2 on t > 0."""

    def __init__(self, k1, k2, gap=1.0):
        if k1.offset or k2.offset:
            raise GeometryError("concatenation needs strand offset 0 on both inputs")
        self.k1, self.k2 = k1, k2
        self.c1 = k1.support_radius + gap
        self.c2 = k2.support_radius + gap
        self.support_radius = max(self.c1 + k1.support_radius, self.c2 + k2.support_radius)
        self.offset = 0.0

    def _pieces(self, t, deriv):
        t = _as_array(t)
        out = np.zeros(t.shape + (3,))
        neg = t < 0
        pos = ~neg
        if deriv:
            out[neg] = self.k1.velocity(t[neg] + self.c1)
            out[pos] = self.k2.velocity(t[pos] - self.c2)
        else:
            out[neg] = self.k1.point(t[neg] + self.c1) - np.array([self.c1, 0.0, 0.0])
            out[pos] = self.k2.point(t[pos] - self.c2) + np.array([self.c2, 0.0, 0.0])
        return out

    def point(self, t):
        return self._pieces(t, deriv=False)

    def velocity(self, t):
        return self._pieces(t, deriv=True)


def concatenate(k1: LongCurve, k2: LongCurve, gap=1.0) -> LongCurve:
    """Stacking of long knots; k1's features land on t < 0, k2's on t > 0."""
    return ConcatenatedCurve(k1, k2, gap)


class ResolvedCurve(LongCurve):
    """A curve displaced by smooth cos² bumps; resolves singular knots."""

    def __init__(self, base, bumps):
        # bumps: list of (center, halfwidth, displacement vector)
        self.base = base
        self.bumps = [(float(c), float(h), np.asarray(v, dtype=float)) for c, h, v in bumps]
        self.support_radius = max(
            [base.support_radius] + [abs(c) + h for c, h, _ in self.bumps])
        self.offset = base.offset

    def point(self, t):
        t = _as_array(t)
        out = self.base.point(t)
        for c, h, v in self.bumps:
            u = (t - c) / h
            mask = np.abs(u) < 1.0
            w = np.cos(np.pi * u[mask] / 2.0) ** 2
            out[mask] += w[..., None] * v
        return out

    def velocity(self, t):
        t = _as_array(t)
        out = self.base.velocity(t)
        for c, h, v in self.bumps:
            u = (t - c) / h
            mask = np.abs(u) < 1.0
            dw = -np.pi / (2.0 * h) * np.sin(np.pi * u[mask])
            out[mask] += dw[..., None] * v
        return out


@dataclass(frozen=True)
class LongLink2:
    """Two long strands with offsets 0 and 1; images must be disjoint."""

    strand1: LongCurve
    strand2: LongCurve

    def __post_init__(self):
        if abs(self.strand1.offset) > 1e-12 or abs(self.strand2.offset - 1.0) > 1e-12:
            raise GeometryError("strand offsets must be 0 and 1")

    @property
    def support_radius(self):
        return max(self.strand1.support_radius, self.strand2.support_radius)

    def strands(self):
        return (self.strand1, self.strand2)


@dataclass
class SingularLongKnot:
    """A long curve with k marked double points K(s_i) = K(t_i)."""

    curve: LongCurve
    pairs: list  # [(s_i, t_i), ...]

    def __post_init__(self):
        self.pairs = [(float(s), float(t)) for s, t in self.pairs]
        for s, t in self.pairs:
            ps, pt = self.curve.point(np.array([s, t]))
            if np.linalg.norm(ps - pt) > 1e-12:
                raise GeometryError(f"marked pair ({s}, {t}) does not meet: {ps} vs {pt}")
            vs, vt = self.curve.velocity(np.array([s, t]))
            if np.linalg.norm(np.cross(vs, vt)) <= 1e-9:
                raise GeometryError(f"marked pair ({s}, {t}) has dependent derivatives")

    @property
    def support_radius(self):
        return self.curve.support_radius

    def normals(self):
        """Unit displacement direction per marked pair: K'(s) x K'(t), normalized."""
        out = []
        for s, t in self.pairs:
            vs, vt = self.curve.velocity(np.array([s, t]))
            n = np.cross(vs, vt)
            out.append(n / np.linalg.norm(n))
        return out


def resolve_singular(s: SingularLongKnot, signs, eps=0.12, halfwidth=None, validate=True):
    """Push the strand through each t_i off by signs_i * eps along the marked
    pair's normal, inside a smooth bump window.  The result is validated to
    be embedded unless validate=False.
    """
    k = len(s.pairs)
    if len(signs) != k:
        raise GeometryError(f"need {k} signs, got {len(signs)}")
    params = sorted(x for p in s.pairs for x in p)
    min_gap = min(b - a for a, b in zip(params, params[1:])) if len(params) > 1 else 2.0
    h = halfwidth if halfwidth is not None else min(0.45 * min_gap, 0.5)
    if eps >= min_gap / 2.0:
        raise GeometryError(f"eps={eps} too large for marked-parameter gap {min_gap}")
    bumps = [(pair[1], h, sign * eps * normal)
             for pair, sign, normal in zip(s.pairs, signs, s.normals())]
    out = ResolvedCurve(s.curve, bumps)
    if validate:
        sep = min_separation(out)
        if sep <= 0.25 * eps:
            raise GeometryError(f"resolution not embedded: separation {sep} at eps {eps}")
    return out


# ---------------------------------------------------------------------------
# numerical embedding check


def min_separation(obj, n=2000, collar=0.75, refine=True):
    """Lower bound on inter-strand distance (links) or off-diagonal
    self-distance outside a parameter collar (knots), by dense sampling plus
    local refinement.  Singular curves report (approximately) zero.
    """
    if isinstance(obj, SingularLongKnot):
        obj = obj.curve
    if isinstance(obj, LongLink2):
        k1, k2 = obj.strands()
        L = obj.support_radius + 2.0
        s = np.linspace(-L, L, n)
        p1, p2 = k1.point(s), k2.point(s)
        d2 = ((p1[:, None, :] - p2[None, :, :]) ** 2).sum(-1)
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        best = float(np.sqrt(d2[i, j]))
        if refine:
            def f(x):
                return float(((k1.point(np.array([x[0]])) - k2.point(np.array([x[1]]))) ** 2).sum())
            res = minimize(f, [s[i], s[j]], method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-20})
            best = min(best, float(np.sqrt(res.fun)))
        return best

    L = obj.support_radius + 2.0
    s = np.linspace(-L, L, n)
    pts = obj.point(s)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    gap = np.abs(s[:, None] - s[None, :])
    d2[gap < collar] = np.inf
    i, j = np.unravel_index(np.argmin(d2), d2.shape)
    if not np.isfinite(d2[i, j]):
        return float("inf")
    best = float(np.sqrt(d2[i, j]))
    if refine:
        def f(x):
            if abs(x[0] - x[1]) < collar:
                return 1e9
            return float(((obj.point(np.array([x[0]])) - obj.point(np.array([x[1]]))) ** 2).sum())

        res = minimize(f, [s[i], s[j]], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-20})
        if res.fun < 1e9:
            best = min(best, float(np.sqrt(res.fun)))
    return best


def min_speed(curve, n=4000):
    L = curve.support_radius + 1.0
    t = np.linspace(-L, L, n)
    v = curve.velocity(t)
    return float(np.sqrt((v ** 2).sum(-1)).min())


# ---------------------------------------------------------------------------
# builtins


def _closed_trefoil(th):
    return np.stack([np.sin(th) + 2 * np.sin(2 * th),
                     np.cos(th) - 2 * np.cos(2 * th),
                     -np.sin(3 * th)], axis=-1)


def _closed_fig8(th):
    return np.stack([(2 + np.cos(2 * th)) * np.cos(3 * th) / 1.6,
                     (2 + np.cos(2 * th)) * np.sin(3 * th) / 1.6,
                     np.sin(4 * th) / 1.2], axis=-1)


def _graft_closed_curve(closed, cut, gap, scale=1.0, speed=2.5, ds=0.8):
    """Open a closed knot: sample the arc away from the cut angle uniformly
    by arclength (waypoints every ds of arclength, parameter advancing at
    the given speed), rigidly align the cut chord with +x, and attach
    reference-line tails whose x ramps smoothly to meet the x = parameter
    constraint at the bookends.  Smaller speed stretches the parametrization;
    larger speed keeps the support radius small for the integrator."""
    dense = np.linspace(cut + gap, cut + 2 * np.pi - gap, 4096)
    dpts = closed(dense) * scale
    seg = np.sqrt(((dpts[1:] - dpts[:-1]) ** 2).sum(-1))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    arclen = cum[-1]
    n_arc = max(8, int(np.ceil(arclen / ds)) + 1)
    spots = np.linspace(0.0, arclen, n_arc)
    th = np.interp(spots, cum, dense)
    arc = closed(th) * scale
    a, b = arc[0], arc[-1]
    ex = b - a
    ex = ex / np.linalg.norm(ex)
    helper = np.array([0.0, 0.0, 1.0])
    if abs(ex @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    ez = np.cross(ex, helper)
    ez /= np.linalg.norm(ez)
    ey = np.cross(ez, ex)
    R = np.stack([ex, ey, ez], axis=0)
    mid = (a + b) / 2.0
    arc = (arc - mid) @ R.T
    # cut chord along x through the origin; body params centered at 0 so both
    # tails share the x-shortfall (estimator variance grows with the support
    # radius, so keep max |param| small)
    x_a, x_b = arc[0, 0], arc[-1, 0]
    body_params = spots / speed - spots[-1] / (2 * speed)

    def ramp(extra):
        # unit steps plus a smooth bump summing to the requested extra x;
        # the cap keeps tail speeds low, since integrand variance grows with
        # the speed at every segment vertex
        m = max(3, int(np.ceil(extra / 2.4)))
        k = np.arange(1, m + 1)
        w = np.sin(np.pi * k / (m + 1)) ** 2
        return np.cumsum(1.0 + w * extra / w.sum())

    left_gap = x_a - body_params[0]     # x distance the left tail must absorb
    right_gap = body_params[-1] - x_b
    lx = ramp(left_gap)
    rx = ramp(right_gap)
    left_x = x_a - lx[::-1]
    left_params = body_params[0] - np.arange(len(lx), 0, -1.0)
    right_x = x_b + rx
    right_params = body_params[-1] + np.arange(1.0, len(rx) + 1)
    pts = np.vstack([
        np.stack([left_x, np.zeros(len(lx)), np.zeros(len(lx))], axis=1),
        arc,
        np.stack([right_x, np.zeros(len(rx)), np.zeros(len(rx))], axis=1),
    ])
    params = np.concatenate([left_params, body_params, right_params])
    pts[0, 0] = params[0]    # exact to the last bit
    pts[-1, 0] = params[-1]
    return WaypointCurve(pts, params=params)


def builtin(name):
    """Stock geometries; see BUILTIN_NAMES for the valid set."""
    if name == "line":
        return Line(0.0)
    if name == "long_unknot_planar":
        return TrigPerturbedLine(window=(-2.5, 2.5), coeffs=((0.0, 1.3, 0.0), (0.4, 0.7, 0.0)))
    if name == "long_trefoil":
        return _graft_closed_curve(_closed_trefoil, cut=3.14159, gap=0.35, scale=0.62, speed=1.0, ds=0.6)
    if name == "long_trefoil_alt":
        return _graft_closed_curve(_closed_trefoil, cut=1.0472, gap=0.30, scale=0.72, speed=1.1, ds=0.6)
    if name == "long_figure_eight":
        return _graft_closed_curve(_closed_fig8, cut=0.25, gap=0.30, scale=0.7, speed=1.0, ds=0.6)
    if name == "parallel_lines":
        return LongLink2(Line(0.0), Line(1.0))
    if name == "long_hopf":
        pts = np.array([
            (-5, 1, 0), (-4, 1, 0), (-3, 1, 0), (-2, 1, 0),
            (-1.2, 0.55, 0.85),
            (-0.4, -0.95, 0.45),
            (0.4, -0.8, -0.7),
            (1.2, 0.7, -0.8),
            (2, 1, 0), (3.5, 1, 0), (5, 1, 0),
        ], dtype=float)
        return LongLink2(Line(0.0), WaypointCurve(pts, t0=-5.0, offset=1.0))
    if name == "singular_x2_crossed":
        # visits A, B, A, B along the parameter: chord pattern (1,3),(2,4)
        A, B = (-1.2, 0.8, 0.0), (1.2, 0.8, 0.0)
        pts = np.array([
            (-6, 0, 0), (-5, 0, 0), (-4, 0, 0),
            A, (0.2, 1.7, 0.7), B, (2.4, -0.3, -0.8), A, (-2.4, 2.1, -0.6), B,
            (3.2, 0.9, 0.5),
            (4.2, 0, 0), (5.6, 0, 0), (7, 0, 0),
        ], dtype=float)
        return SingularLongKnot(WaypointCurve(pts, t0=-6.0), [(-3.0, 1.0), (-1.0, 3.0)])
    if name == "singular_x2_nested":
        # visits A, B, B, A: chord pattern (1,4),(2,3)
        A, B = (-1.6, 1.2, 0.0), (1.4, 1.6, 0.0)
        pts = np.array([
            (-6, 0, 0), (-5, 0, 0), (-4, 0, 0),
            A, (-0.4, 2.8, 1.2), B, (3.2, 1.8, -1.4), B, (-0.2, -0.6, -1.0), A,
            (-2.6, 3.0, 1.2), (3.4, 2.2, 0.6),
            (4.6, 0, 0), (6.3, 0, 0), (8, 0, 0),
        ], dtype=float)
        return SingularLongKnot(WaypointCurve(pts, t0=-6.0), [(-3.0, 3.0), (-1.0, 1.0)])
    if name == "singular_x3":
        # visits A, B, C, A, B, C: chord pattern (1,4),(2,5),(3,6)
        A, B, C = (-3.0, 1.4, 0.0), (0.0, 2.0, 0.0), (3.0, 1.4, 0.0)
        pts = np.array([
            (-8, 0, 0), (-7, 0, 0), (-6, 0, 0),
            A, (-1.6, 3.2, 1.4), B, (1.6, 3.2, -1.4), C, (4.4, -0.6, 1.0),
            A, (-1.4, -0.2, 1.8), B, (1.2, 4.2, 0.8), C,
            (4.8, 2.4, -0.8),
            (6.2, 0, 0), (7.5, 0, 0), (9, 0, 0),
        ], dtype=float)
        return SingularLongKnot(WaypointCurve(pts, t0=-8.0), [(-5.0, 1.0), (-3.0, 3.0), (-1.0, 5.0)])
    raise GeometryError(f"unknown builtin {name!r}; valid: {sorted(BUILTIN_NAMES)}")


BUILTIN_NAMES = {
    "line", "long_unknot_planar", "long_trefoil", "long_trefoil_alt",
    "long_figure_eight", "long_hopf", "parallel_lines",
    "singular_x2_crossed", "singular_x2_nested", "singular_x3",
}


# ---------------------------------------------------------------------------
# CurveSpec serialization (external interface)


def to_spec(obj) -> dict:
    if isinstance(obj, TrigPerturbedLine):
        return {
            "kind": "perturbed_line",
            "offset": obj.offset,
            "window": list(obj.window),
            "coeffs": [list(c) for c in obj.coeffs],
        }
    raise GeometryError("only perturbed_line geometries serialize back to a spec")


def from_spec(doc):
    """Build geometry from a CurveSpec document (dict or JSON text).

    {"kind": "builtin", "name": ...} or
    {"kind": "perturbed_line", "offset": c, "window": [a, b], "coeffs": [[ax, ay, az], ...]}
    """
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise GeometryError("curve spec must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "builtin":
        if "name" not in doc:
            raise GeometryError("builtin spec needs a 'name' field")
        return builtin(doc["name"])
    if kind == "perturbed_line":
        window = tuple(float(x) for x in doc.get("window", (-1.0, 1.0)))
        if len(window) != 2 or not window[0] < window[1]:
            raise GeometryError(f"window must be [a, b] with a < b, got {list(window)}")
        coeffs = tuple(tuple(float(x) for x in c) for c in doc.get("coeffs", []))
        for c in coeffs:
            if len(c) != 3:
                raise GeometryError(f"coeffs rows must have 3 entries, got {list(c)}")
        return TrigPerturbedLine(window=window, coeffs=coeffs,
                                 offset=float(doc.get("offset", 0.0)))
    raise GeometryError(f"unknown curve spec kind {kind!r}")
