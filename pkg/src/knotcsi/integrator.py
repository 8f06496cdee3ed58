"""Configuration space integrals over long curves.

A degree-0 diagram with p segment vertices and q free vertices turns a curve
into an integral over p ordered times and q points of R^3.  The integrand is
the pullback of one unit sphere form per connection through its Gauss map,
which concretely is

    (1/4pi)^e * det J,

where J is the 2e x 2e matrix whose row pairs are the differentials of each
connection's direction map expressed in an orthonormal tangent frame at its
value, and whose columns run over the fiber coordinates (times in vertex
order, then free-vertex x, y, z in vertex order).  Connection rows are
ordered lexicographically by (min endpoint, max endpoint); the Gauss map
points from the stored tail to the stored head (canonical diagrams orient
low to high).

Estimates are randomized quasi-Monte Carlo: independent Owen-scrambled Sobol
replicates, each mapped through (i) uniform ordered times on [-L, L] per
strand with the exact simplex volume factor, and (ii) an importance mixture
for free vertices (bounding box + curve-concentrated + near-earlier-free)
whose exact density divides the integrand.  The sample stream is partitioned
by replicate and fixed-size chunk, never by worker, and reduced in index
order, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .diagrams import Diagram, degree, encode
from .geometry import LongCurve, LongLink2

FOUR_PI = 4.0 * math.pi


class IntegratorError(RuntimeError):
    pass


@dataclass(frozen=True)
class MCParams:
    """Sampling configuration.  Identical params (seed included) give
    bit-identical estimates for any worker count."""

    n_samples: int = 2_000_000
    seed: int = 0
    L: float = None          # time box half-width; default 4*(support+1)
    workers: int = 1
    antithetic: bool = False
    rng: str = "qmc"         # "qmc" (scrambled Sobol) or "mc" (plain Monte Carlo)
    replicates: int = 16
    chunk: int = 1 << 14
    # free-vertex proposal
    w_box: float = 0.25
    w_curve: float = 0.60
    w_pair: float = 0.15
    concentration: float = 0.15   # radial scale a near the curve
    r_max: float = None           # radial cutoff; default 2*(support+1)
    n_centers: int = 192
    box_pad: float = 2.0
    max_nonfinite_frac: float = 1e-3

    def effective_L(self, support_radius):
        return self.L if self.L is not None else 4.0 * (support_radius + 1.0)


@dataclass
class IntegralEstimate:
    value: float
    stderr: float
    n_effective: int
    seed: int
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise IntegratorError(f"non-finite estimate value {self.value}")

    @property
    def replicate_means(self):
        return np.asarray(self.diagnostics["replicate_means"])

    def report(self):
        out = {
            "value": self.value,
            "stderr": self.stderr,
            "n_effective": self.n_effective,
            "seed": self.seed,
        }
        out.update({k: v for k, v in self.diagnostics.items()
                    if k not in ("replicate_means", "parts")})
        return out


@dataclass(frozen=True)
class FiberPoint:
    """One configuration: ordered times on the strand(s) plus free points."""

    times: tuple
    free: tuple = ()
    strands: tuple = None  # strand index per time; default all on strand 0

    def __post_init__(self):
        strands = self.strands if self.strands is not None else (0,) * len(self.times)
        object.__setattr__(self, "strands", tuple(strands))
        for s in set(strands):
            ts = [t for t, st in zip(self.times, strands) if st == s]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise IntegratorError(f"times on strand {s} must be strictly increasing")


def gauss_map(a, b):
    """Unit direction from a to b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w = b - a
    n = np.linalg.norm(w)
    if n == 0:
        raise IntegratorError("gauss_map needs distinct points")
    return w / n


def sphere_frame(u):
    """Ordered orthonormal tangent pair (e1, e2) at unit vector(s) u with
    (e1, e2, u) right-handed.  Accepts (..., 3) arrays."""
    u = np.asarray(u, dtype=float)
    axis = np.argmin(np.abs(u), axis=-1)
    a = np.zeros_like(u)
    np.put_along_axis(a.reshape(-1, 3), np.asarray(axis).reshape(-1, 1), 1.0, axis=-1)
    e1 = np.cross(a, u)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(u, e1)
    return e1, e2


# ---------------------------------------------------------------------------
# the pullback integrand


def _strands_of(geometry):
    if isinstance(geometry, LongLink2):
        return list(geometry.strands())
    if isinstance(geometry, (list, tuple)):
        return list(geometry)
    return [geometry]


def _check_degree_zero(d):
    if degree(d) != 0:
        raise IntegratorError(
            f"only degree-0 diagrams integrate to numbers on a fixed curve; "
            f"form degree 2*(connections) - 3q - p = {degree(d)} for {encode(d)}")
    if d.loops:
        raise IntegratorError("degree-0 diagrams cannot carry loops")


def fiber_orientation(d: Diagram) -> int:
    """Sign relating the vertex-ordered time columns to the diagram-adapted
    fiber orientation that groups each connection's times together.

    pullback_integrand always reads columns in vertex order (and with that
    convention relabelings transform it by exactly the canonical-form sign).
    The isotopy-invariant weighted sums, however, want each connection's
    sphere form paired with its own two times: one transposition sign per
    interleaving.  For the crossed-chord diagram this is -1; for chord
    diagrams it is the crossing-count parity of the pairing.
    """
    order = []
    for c in sorted((tuple(c) for c in tuple(d.chords) + tuple(d.edges)),
                    key=lambda c: (min(c), max(c))):
        order.extend(sorted(v for v in c if v <= d.p))
    sign = 1
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                sign = -sign
    return sign


def _integrand_batch(d: Diagram, strands, strand_of, T, Y, frame_fn=sphere_frame):
    """Vectorized (1/4pi)^e det J over a batch.  Returns (values, n_bad)."""
    n = T.shape[0]
    p, q = d.p, d.q
    conns = sorted(
        (tuple(c) for c in tuple(d.chords) + tuple(d.edges)),
        key=lambda c: (min(c), max(c)),
    )
    e = len(conns)
    dim = p + 3 * q
    pos = np.empty((n, p, 3))
    vel = np.empty((n, p, 3))
    for s in set(strand_of):
        cols = [i for i in range(p) if strand_of[i] == s]
        ts = T[:, cols]
        pos[:, cols] = strands[s].point(ts)
        vel[:, cols] = strands[s].velocity(ts)

    def endpoint_pos(v):
        return pos[:, v - 1] if v <= p else Y[:, v - p - 1]

    J = np.zeros((n, 2 * e, dim))
    bad = np.zeros(n, dtype=bool)
    for c, (tail, head) in enumerate(conns):
        w = endpoint_pos(head) - endpoint_pos(tail)
        nrm = np.linalg.norm(w, axis=-1)
        zero = nrm == 0
        bad |= zero
        nrm_safe = np.where(zero, 1.0, nrm)
        u = w / nrm_safe[:, None]
        e1, e2 = frame_fn(u)
        for v, sgn in ((head, 1.0), (tail, -1.0)):
            if v <= p:
                dv = vel[:, v - 1]
                J[:, 2 * c, v - 1] += sgn * (e1 * dv).sum(-1) / nrm_safe
                J[:, 2 * c + 1, v - 1] += sgn * (e2 * dv).sum(-1) / nrm_safe
            else:
                col = p + 3 * (v - p - 1)
                J[:, 2 * c, col:col + 3] += sgn * e1 / nrm_safe[:, None]
                J[:, 2 * c + 1, col:col + 3] += sgn * e2 / nrm_safe[:, None]
    if dim == 2:
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    else:
        det = np.linalg.det(J)
    det = np.where(bad, 0.0, det)
    return det / FOUR_PI ** e, int(bad.sum())


def pullback_integrand(d: Diagram, geometry, x: FiberPoint, frame_fn=sphere_frame):
    """The integrand at a single fiber point (scalar, oracle-friendly API)."""
    _check_degree_zero(d)
    strands = _strands_of(geometry)
    T = np.asarray(x.times, dtype=float)[None, :]
    Y = np.asarray(x.free, dtype=float).reshape(1, d.q, 3)
    vals, nbad = _integrand_batch(d, strands, x.strands, T, Y, frame_fn)
    if nbad:
        raise IntegratorError("coincident configuration points")
    return float(vals[0])


# ---------------------------------------------------------------------------
# domains and the free-vertex proposal


@dataclass(frozen=True)
class Hypercube:
    dim: int


@dataclass(frozen=True)
class FiberDomain:
    """p_strands[i] ordered times on strand i in [-L, L], q free points."""

    strands: tuple        # curve objects
    p_strands: tuple      # times per strand
    q: int
    L: float
    proposal: object = None

    @property
    def p(self):
        return sum(self.p_strands)

    @property
    def dim(self):
        return self.p + 4 * self.q

    def strand_of(self):
        out = []
        for s, ps in enumerate(self.p_strands):
            out.extend([s] * ps)
        return tuple(out)


class _Proposal:
    """Free-vertex importance mixture with an exactly computable density.

    Components: uniform over the curve's padded bounding box; a random dense
    curve sample plus a heavy-tailed isotropic offset whose 3-d density is
    1/(4pi * asinh(r_max/a) * r^2 * sqrt(r^2 + a^2)) out to r_max (this makes
    the summed density near the curve grow like 1/d^2, taming the integrand's
    1/d^2 edge singularities); and the same offset around an earlier free
    vertex, which controls free-free edge collisions.
    """

    def __init__(self, curve, params: MCParams):
        self.w_box = params.w_box
        self.w_curve = params.w_curve
        self.w_pair = params.w_pair
        self.a = params.concentration
        self.r_max = params.r_max if params.r_max is not None else 2.0 * (curve.support_radius + 1.0)
        self.A = math.asinh(self.r_max / self.a)
        tc = np.linspace(-(curve.support_radius + 1.0), curve.support_radius + 1.0,
                         params.n_centers)
        self.centers = curve.point(tc)
        lo, hi = curve.bounding_box(pad=params.box_pad)
        self.box_lo, self.box_hi = lo, hi
        self.box_vol = float(np.prod(hi - lo))

    def weights_for(self, j):
        if j == 0:
            tot = self.w_box + self.w_curve
            return self.w_box / tot, self.w_curve / tot, 0.0
        return self.w_box, self.w_curve, self.w_pair

    def _g(self, r):
        return self._g2(r ** 2)

    def _g2(self, r2):
        with np.errstate(divide="ignore"):
            out = 1.0 / (FOUR_PI * self.A * r2 * np.sqrt(r2 + self.a ** 2))
        return np.where(r2 <= self.r_max ** 2, out, 0.0)

    def sample(self, U, prev):
        """Map (n, 4) uniforms to positions given earlier frees `prev`
        (list of (n, 3) arrays); returns (y, exact mixture density)."""
        n = len(U)
        j = len(prev)
        wb, wc, wp = self.weights_for(j)
        d0, d1, d2, d3 = U[:, 0], U[:, 1], U[:, 2], U[:, 3]
        y = np.empty((n, 3))

        box = d0 < wb
        if np.any(box):
            y[box] = self.box_lo + np.stack([d1[box], d2[box], d3[box]], axis=1) \
                * (self.box_hi - self.box_lo)
        curve = (~box) & (d0 < wb + wc)
        pair = ~(box | curve)

        def radial_points(mask, centers):
            z = 2.0 * d1[mask] - 1.0
            phi = 2.0 * np.pi * d2[mask]
            rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            direction = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
            r = self.a * np.sinh(d3[mask] * self.A)
            return centers + direction * r[:, None]

        if np.any(curve):
            frac = (d0[curve] - wb) / wc
            m = np.minimum((frac * len(self.centers)).astype(int), len(self.centers) - 1)
            y[curve] = radial_points(curve, self.centers[m])
        if np.any(pair):
            frac = (d0[pair] - wb - wc) / wp
            m = np.minimum((frac * j).astype(int), j - 1)
            stacked = np.stack(prev, axis=1)
            y[pair] = radial_points(pair, stacked[np.nonzero(pair)[0], m])

        inside = np.all((y >= self.box_lo) & (y <= self.box_hi), axis=1)
        dens = wb * inside / self.box_vol
        # |y - C|^2 via the Gram identity; the (n, M) product is a GEMM
        c_sq = (self.centers ** 2).sum(-1)
        r2 = (y ** 2).sum(-1)[:, None] + c_sq[None, :] - 2.0 * (y @ self.centers.T)
        np.maximum(r2, 0.0, out=r2)
        dens = dens + wc * self._g2(r2).mean(axis=1)
        if j and wp:
            prev_arr = np.stack(prev, axis=1)
            rp2 = ((y[:, None, :] - prev_arr) ** 2).sum(-1)
            dens = dens + wp * self._g2(rp2).mean(axis=1)
        return y, dens


def _map_samples(U, domain):
    """Uniforms -> (T, Y, weight) for a FiberDomain."""
    n = len(U)
    col = 0
    T = np.empty((n, domain.p))
    weight = np.ones(n)
    for s, ps in enumerate(domain.p_strands):
        block = np.sort(U[:, col:col + ps], axis=1)
        T[:, col:col + ps] = -domain.L + 2.0 * domain.L * block
        weight *= (2.0 * domain.L) ** ps / math.factorial(ps)
        col += ps
    Y = np.empty((n, domain.q, 3))
    prev = []
    for j in range(domain.q):
        y, dens = domain.proposal.sample(U[:, col:col + 4], prev)
        Y[:, j] = y
        with np.errstate(divide="ignore"):
            weight = weight / dens
        prev.append(y)
        col += 4
    return T, Y, weight


# ---------------------------------------------------------------------------
# the estimator


def _sub_seed(seed, tag):
    h = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return int.from_bytes(h[:8], "big")


def mc_integrate(f, domain, params: MCParams, seed=None) -> IntegralEstimate:
    """Randomized-QMC estimate of an integral over the domain.

    f maps a batch to values: f(U) for a Hypercube (plain integrand on
    [0,1)^dim), f(T, Y) for a FiberDomain (simplex volume and importance
    weights applied here).  The standard error comes from the spread of the
    replicate means.
    """
    seed = params.seed if seed is None else seed
    R = params.replicates
    n_rep = max(1, params.n_samples // R)
    dims = domain.dim

    def run_replicate(r):
        rep_seed = _sub_seed(seed, f"rep{r}")
        if params.rng == "qmc":
            eng = qmc.Sobol(d=dims, scramble=True, seed=np.random.default_rng(rep_seed))
            draw = eng.random
        elif params.rng == "mc":
            gen = np.random.default_rng(rep_seed)
            draw = lambda m: gen.random((m, dims))
        else:
            raise IntegratorError(f"unknown rng mode {params.rng!r}")
        total = 0.0
        n_done = 0
        n_bad = 0
        peak = 0.0
        warnings.filterwarnings(
            "ignore", message="The balance properties of Sobol")
        while n_done < n_rep:
            m = min(params.chunk, n_rep - n_done)
            if params.antithetic:
                half = (m + 1) // 2
                U0 = draw(half)
                U = np.vstack([U0, 1.0 - U0])[:m]
            else:
                U = draw(m)
            if isinstance(domain, Hypercube):
                vals = np.asarray(f(U), dtype=float)
            else:
                T, Y, weight = _map_samples(U, domain)
                vals = np.asarray(f(T, Y), dtype=float) * weight
            good = np.isfinite(vals)
            n_bad += int(m - good.sum())
            vals = np.where(good, vals, 0.0)
            if len(vals):
                peak = max(peak, float(np.abs(vals).max()))
            total += float(vals.sum())
            n_done += m
        return total / n_rep, n_done, n_bad, peak

    if params.workers > 1:
        with ThreadPoolExecutor(max_workers=params.workers) as ex:
            results = list(ex.map(run_replicate, range(R)))
    else:
        results = [run_replicate(r) for r in range(R)]

    means = np.array([r[0] for r in results])
    n_total = sum(r[1] for r in results)
    n_bad = sum(r[2] for r in results)
    peak = max(r[3] for r in results)
    if n_bad > max(16, params.max_nonfinite_frac * n_total):
        raise IntegratorError(f"{n_bad} non-finite integrand samples out of {n_total}")
    value = float(means.mean())
    stderr = float(means.std(ddof=1) / math.sqrt(R)) if R > 1 else 0.0
    return IntegralEstimate(
        value=value,
        stderr=stderr,
        n_effective=n_total - n_bad,
        seed=seed,
        diagnostics={
            "replicate_means": means.tolist(),
            "n_rejected": n_bad,
            "max_abs_weighted": peak,
            "n_requested": n_total,
            "rng": params.rng,
        },
    )


# ---------------------------------------------------------------------------
# invariant-level operations


def integrate_diagram(d: Diagram, K: LongCurve, params: MCParams, seed=None,
                      proposal=None, L=None) -> IntegralEstimate:
    """QMC estimate of the configuration space integral of d over K's fiber,
    carried in the diagram-adapted fiber orientation (see fiber_orientation):
    that is the orientation under which the weighted sums over a diagram
    basis become isotopy invariants.

    proposal/L may be pinned externally so that families of nearby curves
    (e.g. the resolutions of one singular knot) share their sample streams
    point for point and their noise cancels in differences.
    """
    _check_degree_zero(d)
    if isinstance(K, LongLink2):
        raise IntegratorError("integrate_diagram takes a single curve; see linking_number")
    if L is None:
        L = params.effective_L(K.support_radius)
    if proposal is None:
        proposal = _Proposal(K, params) if d.q else None
    domain = FiberDomain(strands=(K,), p_strands=(d.p,), q=d.q, L=L, proposal=proposal)
    strand_of = domain.strand_of()
    orient = fiber_orientation(d)

    def f(T, Y):
        vals, _ = _integrand_batch(d, domain.strands, strand_of, T, Y)
        return orient * vals

    est = mc_integrate(f, domain, params, seed=seed)
    est.diagnostics.update({"diagram": encode(d), "L": L, "fiber_orientation": orient})
    return est


def linking_number(link: LongLink2, params: MCParams, seed=None) -> IntegralEstimate:
    """Gauss integral of the 2-strand link; the report carries the nearest
    integer and the distance to it."""
    d = Diagram("odd", 2, 0, ((1, 2),))
    k1, k2 = link.strands()
    L = params.effective_L(link.support_radius)
    domain = FiberDomain(strands=(k1, k2), p_strands=(1, 1), q=0, L=L)

    def f(T, Y):
        vals, _ = _integrand_batch(d, domain.strands, (0, 1), T, Y)
        return vals

    est = mc_integrate(f, domain, params, seed=seed)
    est.diagnostics.update({
        "operation": "linking_number",
        "L": L,
        "nearest_integer": int(round(est.value)),
        "distance_to_integer": abs(est.value - round(est.value)),
    })
    return est


def self_linking_A(K: LongCurve, params: MCParams, seed=None, proposal=None, L=None) -> IntegralEstimate:
    """Writhe-type Gauss integral of K with itself over ordered time pairs."""
    d = Diagram("odd", 2, 0, ((1, 2),))
    est = integrate_diagram(d, K, params, seed=seed, L=L)
    est.diagnostics["operation"] = "self_linking_A"
    return est


def _combine(parts, coeffs, seed):
    """Exact linear combination of estimates through their replicate means."""
    means = None
    n_eff = 0
    bad = 0
    for est, c in zip(parts, coeffs):
        m = float(c) * est.replicate_means
        means = m if means is None else means + m
        n_eff += est.n_effective
        bad += est.diagnostics.get("n_rejected", 0)
    R = len(means)
    value = float(means.mean())
    stderr = float(means.std(ddof=1) / math.sqrt(R)) if R > 1 else 0.0
    return IntegralEstimate(
        value=value, stderr=stderr, n_effective=n_eff, seed=seed,
        diagnostics={
            "replicate_means": means.tolist(),
            "n_rejected": bad,
            "max_abs_weighted": max(e.diagnostics.get("max_abs_weighted", 0.0) for e in parts),
            "parts": [e.report() for e in parts],
        },
    )


def casson_v2(K: LongCurve, params: MCParams, seed=None, proposal=None, L=None) -> IntegralEstimate:
    """The type-2 invariant: crossed-chord integral minus tripod integral."""
    from .diagrams import tripod, x_diagram

    seed = params.seed if seed is None else seed
    ix = integrate_diagram(x_diagram(), K, params,
                           seed=_sub_seed(seed, f"diagram:{encode(x_diagram())}"), L=L)
    it = integrate_diagram(tripod(), K, params,
                           seed=_sub_seed(seed, f"diagram:{encode(tripod())}"),
                           proposal=proposal, L=L)
    est = _combine([ix, it], [1, -1], seed)
    est.diagnostics["operation"] = "casson_v2"
    return est


def type_k_invariant(W, K: LongCurve, params: MCParams, anomaly=None, seed=None) -> IntegralEstimate:
    """Weighted sum of degree-0 diagram integrals over the trivalent basis,
    each divided by its automorphism count, minus the summed per-diagram
    anomaly multiples of the self-linking integral.

    W is a WeightSystem of degree k; anomaly maps diagrams to reals.  The
    default anomaly is 0: it genuinely vanishes at degree 2, is conjectural
    above, and no procedure computes it here -- values are injectable only.
    """
    from .algebra import trivalent_basis
    from .diagrams import aut_count

    seed = params.seed if seed is None else seed
    basis = trivalent_basis(W.degree)
    anomaly = anomaly or {}
    parts, coeffs = [], []
    for g in basis:
        w = W(g)
        if not w:
            continue
        parts.append(integrate_diagram(g, K, params, seed=_sub_seed(seed, f"diagram:{encode(g)}")))
        coeffs.append(float(w) / aut_count(g))
    mu_total = sum(float(anomaly.get(g, 0.0)) for g in basis)
    if mu_total:
        parts.append(self_linking_A(K, params, seed=_sub_seed(seed, "selflink")))
        coeffs.append(-mu_total)
    if not parts:
        return IntegralEstimate(0.0, 0.0, 0, seed,
                                {"replicate_means": [0.0] * params.replicates,
                                 "operation": "type_k_invariant"})
    est = _combine(parts, coeffs, seed)
    est.diagnostics["operation"] = "type_k_invariant"
    return est


def skein_alternating_sum(s, invariant, eps=0.12, params: MCParams = None, seed=None) -> IntegralEstimate:
    """Sum over all 2^k resolutions of (product of signs) * invariant value,
    with a shared seed across resolutions so the variance cancels.

    `invariant` is a callable (curve, params, seed) -> IntegralEstimate, for
    example casson_v2.
    """
    import itertools

    from .geometry import resolve_singular

    params = params or MCParams()
    seed = params.seed if seed is None else seed
    k = len(s.pairs)
    # one proposal and one time box for every resolution: the resolved curves
    # differ only inside the bump windows, so identical sample streams make
    # the alternating sum cancel its noise
    proposal = _Proposal(s.curve, params)
    L = params.effective_L(s.curve.support_radius)
    parts, coeffs = [], []
    for signs in itertools.product((1, -1), repeat=k):
        K = resolve_singular(s, signs, eps=eps)
        parts.append(invariant(K, params, seed, proposal=proposal, L=L))
        coeffs.append(float(np.prod(signs)))
    est = _combine(parts, coeffs, seed)
    est.diagnostics.update({"operation": "skein_alternating_sum",
                            "resolutions": 2 ** k, "eps": eps})
    return est
