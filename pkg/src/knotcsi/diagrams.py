"""Diagrams on an oriented segment: chords, loops, and edges to free vertices.

A diagram has p "segment" vertices sitting on an oriented line and q "free"
vertices off it.  Segment vertices are labeled 1..p in segment order, free
vertices p+1..p+q.  Connections come in three kinds:

* chords   -- between two distinct segment vertices,
* loops    -- a segment vertex to itself (adds 2 to its valence),
* edges    -- at least one endpoint free.

Every vertex must be at least trivalent (the segment contributes 2 to each
segment vertex) and the underlying graph, with the segment treated as a path
through its vertices, must be connected.

Decorations depend on the ambient-dimension parity:

* parity "odd":  chords and edges are oriented; a pair (a, b) means tail a,
  head b.  Loops carry no usable orientation in this encoding.  Relabelings
  of free vertices and orientation reversals cost a sign.
* parity "even": nothing is oriented, but free vertices and edges carry
  labels; an edge's label is its 1-based position in the edges tuple, and the
  coboundary sign rule consumes it.  Relabelings cost the product of the
  permutation signs.  Chord and loop labels are position-canonical (segment
  order): treating them as permutable orientation data is inconsistent with
  δ² = 0 once contractions re-type connections (chord→loop, edge→chord), so
  they carry no sign.  Under contraction, surviving edges keep their relative
  order and re-typed connections join their new class without a sign factor.

``canonical_form`` picks the lexicographically minimal encoding over all free
vertex relabelings, with orientations normalized tail < head (odd) or pairs
stored (min, max) and lists sorted (even).  The reported sign s satisfies
d = s * canonical in the quotient by the relabeling relations; s = 0 when the
diagram is zero there (repeated connection, or equal to its own negative).
The total order is an implementation contract: basis signs elsewhere depend
on it, so it must not change between releases.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

ODD = "odd"
EVEN = "even"


class DiagramError(ValueError):
    pass


class EnumerationBudgetError(RuntimeError):
    """Raised when diagram enumeration exceeds its node budget."""


@dataclass(frozen=True)
class Diagram:
    parity: str
    p: int
    q: int
    chords: tuple = ()
    loops: tuple = ()
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "chords", tuple(tuple(c) for c in self.chords))
        object.__setattr__(self, "loops", tuple(self.loops))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @property
    def n_vertices(self):
        return self.p + self.q

    @property
    def connections(self):
        """Chords, loops (as (v, v)), then edges, in stored order."""
        return tuple(self.chords) + tuple((v, v) for v in self.loops) + tuple(self.edges)

    def is_segment(self, v):
        return 1 <= v <= self.p

    def __repr__(self):
        return f"Diagram({encode(self)!r})"


@dataclass(frozen=True)
class ContractionResult:
    diagram: Diagram
    sign: int
    degenerate: bool = False


# ---------------------------------------------------------------------------
# validation / basic attributes


def validate(d: Diagram) -> list:
    """Return all invariant violations of d (empty list = valid)."""
    out = []
    if d.parity not in (ODD, EVEN):
        out.append(f"unknown parity {d.parity!r}")
    if d.p < 0 or d.q < 0:
        out.append("negative vertex count")
        return out
    n = d.p + d.q
    for a, b in d.chords:
        if not (d.is_segment(a) and d.is_segment(b)):
            out.append(f"chord ({a},{b}) must join segment vertices 1..{d.p}")
        elif a == b:
            out.append(f"chord ({a},{b}) pairs a vertex with itself (use a loop)")
    for v in d.loops:
        if not d.is_segment(v):
            out.append(f"loop at {v} must sit on a segment vertex 1..{d.p}")
    for a, b in d.edges:
        if not (1 <= a <= n and 1 <= b <= n):
            out.append(f"edge ({a},{b}) endpoint out of range 1..{n}")
        elif a == b:
            out.append(f"edge ({a},{b}) is a loop at a free vertex; not allowed")
        elif d.is_segment(a) and d.is_segment(b):
            out.append(f"edge ({a},{b}) joins two segment vertices (use a chord)")

    if out:
        return out

    val = [0] * (n + 1)
    for a, b in d.chords:
        val[a] += 1
        val[b] += 1
    for v in d.loops:
        val[v] += 2
    for a, b in d.edges:
        val[a] += 1
        val[b] += 1
    for v in range(1, n + 1):
        total = val[v] + (2 if v <= d.p else 0)
        if total < 3:
            kind = "segment" if v <= d.p else "free"
            out.append(f"{kind} vertex {v} has valence {total} < 3")

    # connectivity; the segment links its vertices in a path
    if n:
        parent = list(range(n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            parent[find(x)] = find(y)

        for i in range(1, d.p):
            union(i, i + 1)
        for a, b in d.chords:
            union(a, b)
        for a, b in d.edges:
            union(a, b)
        roots = {find(v) for v in range(1, n + 1)}
        if len(roots) > 1:
            out.append("underlying graph is disconnected")
    return out


def check_valid(d: Diagram) -> Diagram:
    bad = validate(d)
    if bad:
        raise DiagramError("; ".join(bad))
    return d


def degree(d: Diagram) -> int:
    """2*(#chords + #loops + #edges) - 3q - p; equals the total excess valence."""
    e = len(d.chords) + len(d.loops) + len(d.edges)
    return 2 * e - 3 * d.q - d.p


def is_trivalent(d: Diagram) -> bool:
    return degree(d) == 0 and not d.loops


def has_multiple_connection(d: Diagram) -> bool:
    pairs = [tuple(sorted(c)) for c in d.connections]
    return len(pairs) != len(set(pairs))


def has_consecutive_chord(d: Diagram) -> bool:
    """True if some chord joins segment-adjacent vertices (a 1T diagram)."""
    return any(abs(a - b) == 1 for a, b in d.chords)


# ---------------------------------------------------------------------------
# canonical form


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _sort_sign(items):
    """Stable sort of items, returning (sorted, sign of the sorting permutation)."""
    order = sorted(range(len(items)), key=lambda i: items[i])
    return [items[i] for i in order], _perm_sign(order)


@lru_cache(maxsize=200000)
def _canonical_cached(d: Diagram):
    if has_multiple_connection(d):
        return d, 0
    p, q = d.p, d.q
    # chords and loops never touch free vertices, so their part is fixed
    if d.parity == ODD:
        sign_fixed = (-1) ** sum(1 for a, b in d.chords if a > b)
        chords = tuple(sorted(tuple(sorted(c)) for c in d.chords))
        loops = tuple(sorted(d.loops))
    else:
        ch, s1 = _sort_sign([tuple(sorted(c)) for c in d.chords])
        lo, s2 = _sort_sign(list(d.loops))
        chords, loops = tuple(ch), tuple(lo)
        sign_fixed = s1 * s2
    if q == 0:
        return Diagram(d.parity, p, q, chords, loops, ()), sign_fixed

    odd = d.parity == ODD
    edges0 = d.edges
    best_enc = None
    best_signs = set()
    for perm in itertools.permutations(range(q)):
        table = list(range(p + 1)) + [p + 1 + perm[i] for i in range(q)]
        # free-vertex swaps exchange odd-dimensional coordinate blocks for
        # odd n (sign) but even-dimensional ones for even n (no sign)
        sign = sign_fixed * (_perm_sign(list(perm)) if odd else 1)
        pairs = [(table[a], table[b]) for a, b in edges0]
        if odd:
            rev = sum(1 for a, b in pairs if a > b)
            sign *= (-1) ** rev
            enc = tuple(sorted((a, b) if a < b else (b, a) for a, b in pairs))
        else:
            es, s3 = _sort_sign([(a, b) if a < b else (b, a) for a, b in pairs])
            enc = tuple(es)
            sign *= s3
        if best_enc is None or enc < best_enc:
            best_enc = enc
            best_signs = {sign}
        elif enc == best_enc:
            best_signs.add(sign)

    best_diag = Diagram(d.parity, p, q, chords, loops, best_enc)
    if len(best_signs) == 2:
        return best_diag, 0
    # d = s * canonical: the transformation carries sign s, and s == s^-1 in {+1,-1}
    return best_diag, best_signs.pop()


def canonical_form(d: Diagram):
    """Minimal representative c and sign s with d = s*c; s = 0 if d is zero.

    Zero happens for a repeated connection (relation: multiple edges) or when
    the minimum is attained with both signs (d equals its own negative).
    """
    check_valid(d)
    return _canonical_cached(d)


def is_canonical(d: Diagram) -> bool:
    c, s = canonical_form(d)
    return s == 1 and c == d


def relabel(d: Diagram, free_perm: dict):
    """Apply a relabeling of free vertices; returns the relabeled diagram.

    free_perm maps old free labels to new free labels (a bijection of
    p+1..p+q).  Orientations travel with the connections.  The relation sign
    between d and the result is recovered through canonical_form.
    """
    mp = {v: v for v in range(1, d.p + 1)}
    mp.update(free_perm)
    return Diagram(
        d.parity,
        d.p,
        d.q,
        tuple((mp[a], mp[b]) for a, b in d.chords),
        tuple(d.loops),
        tuple((mp[a], mp[b]) for a, b in d.edges),
    )


def reverse_connection(d: Diagram, index: int) -> Diagram:
    """Reverse the stored orientation of edge/chord number `index` (combined list)."""
    chords = list(d.chords)
    edges = list(d.edges)
    nc = len(chords)
    if index < nc:
        a, b = chords[index]
        chords[index] = (b, a)
    else:
        a, b = edges[index - nc]
        edges[index - nc] = (b, a)
    return Diagram(d.parity, d.p, d.q, tuple(chords), tuple(d.loops), tuple(edges))


def aut_count(d: Diagram) -> int:
    """Automorphisms fixing the oriented segment pointwise, modulo labels and
    orientations: free-vertex permutations preserving the unoriented
    connection multiset."""
    check_valid(d)
    base = sorted(tuple(sorted(c)) for c in d.connections)
    free = list(range(d.p + 1, d.p + d.q + 1))
    count = 0
    for perm in itertools.permutations(free):
        mp = {old: new for old, new in zip(free, perm)}
        mp.update({v: v for v in range(1, d.p + 1)})
        imgs = sorted(tuple(sorted((mp[a], mp[b]))) for a, b in d.connections)
        if imgs == base:
            count += 1
    return count


# ---------------------------------------------------------------------------
# contraction


def arcs(d: Diagram):
    """Contractible arc identifiers: ("arc", i) joins segment vertices i, i+1.

    The two half-infinite rays are not arcs; contracting them has no
    collision meaning.
    """
    return [("arc", i) for i in range(1, d.p)]


def contractible_elements(d: Diagram):
    return arcs(d) + [("edge", i) for i in range(len(d.edges))]


def _classify(a, b, p):
    if a == b:
        return "loop"
    if a <= p and b <= p:
        return "chord"
    return "edge"


def contract(d: Diagram, element) -> ContractionResult:
    """Identify the two endpoints of an arc or edge of d.

    Odd n: ε = (-1)^j for an element oriented i→j with j > i, (-1)^(i+1)
    otherwise; vertex labels carry all remaining orientation data.

    Even n: arcs get ε = (-1)^(i+1) as in the odd case.  For an edge the
    connections anticommute jointly (chords, then loops, then edges), so
    ε = (-1)^(j + p + 1) with j the edge's joint position #chords + #loops +
    label; on diagrams without chords and loops this is the plain
    (-1)^(label + p + 1) rule.  A connection whose type changes under the
    identification (chord→loop across a contracted arc, edge→chord when a
    free vertex lands on the segment) relocates to the end of its new block
    and the sign picks up one factor of -1 per connection it crosses.

    `degenerate` is set when the identification creates a repeated
    connection, making the result zero in the quotient.  Chords and loops are
    rejected as targets: contracting them does not represent a collision of
    configuration points.
    """
    check_valid(d)
    even = d.parity == EVEN
    kind, which = element
    if kind == "arc":
        i = which
        if not (1 <= i <= d.p - 1):
            raise DiagramError(f"no arc {i}; arcs join successive segment vertices 1..{d.p - 1}")
        lo, hi = i, i + 1
        eps = (-1) ** (i + 1)  # (-1)^j with j = i+1 > i, both parities
        removed = None
    elif kind == "edge":
        if isinstance(which, tuple):
            matches = [k for k, e in enumerate(d.edges) if e == which or e == which[::-1]]
            if not matches:
                raise DiagramError(f"no edge {which} in diagram")
            which = matches[0]
        if not (0 <= which < len(d.edges)):
            raise DiagramError(f"edge index {which} out of range")
        t, h = d.edges[which]
        if even:
            joint = len(d.chords) + len(d.loops) + (which + 1)
            eps = (-1) ** (joint + d.p + 1)
        else:
            eps = (-1) ** h if h > t else (-1) ** (t + 1)
        lo, hi = min(t, h), max(t, h)
        removed = which
    elif kind in ("chord", "loop"):
        raise DiagramError(f"cannot contract a {kind}; only edges and arcs collapse")
    else:
        raise DiagramError(f"unknown element kind {kind!r}")

    # merged vertex keeps label lo; labels above hi shift down by one.
    if kind == "arc":
        new_p, new_q = d.p - 1, d.q
    elif hi <= d.p:
        raise AssertionError("edge with two segment endpoints")
    else:
        new_p, new_q = d.p, d.q - 1

    def mp(v):
        if v == hi:
            v = lo
        elif v > hi:
            v -= 1
        return v

    # survivors keep their block order; re-typed connections relocate after
    new_chords, new_loops, new_edges = [], [], []
    retyped = []  # (old block, old position within block, mapped pair)
    for pos, (a, b) in enumerate(d.chords):
        a2, b2 = mp(a), mp(b)
        if a2 == b2:
            retyped.append(("chord", pos, (a2, b2)))
        else:
            new_chords.append((a2, b2))
    for v in d.loops:
        new_loops.append(mp(v))
    epos = 0
    for k, (a, b) in enumerate(d.edges):
        if k == removed:
            continue
        a2, b2 = mp(a), mp(b)
        if _classify(a2, b2, new_p) == "chord":
            retyped.append(("edge", epos, (a2, b2)))
        else:
            new_edges.append((a2, b2))
        epos += 1

    sign = eps
    n_loops_now = len(new_loops)
    chord_block = len(new_chords)
    edges_passed = 0
    for old_block, pos, (a2, b2) in retyped:
        if old_block == "chord":
            # chord at block position pos (0-based among all old chords)
            # crosses the chords after it and every loop on its way to the
            # end of the loops block
            if even:
                sign *= (-1) ** ((len(d.chords) - 1 - pos) + n_loops_now)
            new_loops.append(a2)
            n_loops_now += 1
        else:
            # edge at current block position pos-edges_passed (0-based)
            # crosses the surviving edges before it and every loop moving
            # left to the end of the chords block
            if even:
                sign *= (-1) ** ((pos - edges_passed) + n_loops_now)
            new_chords.append(tuple(sorted((a2, b2))) if even else (a2, b2))
            edges_passed += 1

    out = Diagram(d.parity, new_p, new_q, tuple(new_chords), tuple(new_loops), tuple(new_edges))
    return ContractionResult(out, sign, has_multiple_connection(out))


# ---------------------------------------------------------------------------
# enumeration


def _connected(p, q, conns):
    n = p + q
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(1, p):
        parent[find(i)] = find(i + 1)
    for a, b in conns:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(1, n + 1)}) <= 1


def enumerate_diagrams(degree_target, parity, *, max_vertices, trivalent_only=False,
                       node_budget=5_000_000):
    """All canonical diagrams of the given degree with at most max_vertices
    vertices, excluding diagrams that are zero in the quotient.

    The empty diagram is skipped.  Raises EnumerationBudgetError when the
    backtracking search visits more than node_budget states.
    """
    if degree_target < 0:
        return []
    found = {}
    budget = [node_budget]
    for p in range(1, max_vertices + 1):
        for q in range(0, max_vertices - p + 1):
            twoe = degree_target + 3 * q + p
            if twoe % 2 or twoe < 0:
                continue
            ne = twoe // 2
            if ne == 0:
                continue
            _search_pq(p, q, ne, parity, trivalent_only, found, budget, degree_target)
    return sorted(found.values(), key=lambda d: (d.p + d.q, d.p, encode(d)))


def _search_pq(p, q, ne, parity, trivalent_only, found, budget, degree_target=None):
    # candidate connections in a fixed global order; choose an increasing
    # subset of size ne respecting valence bounds
    cands = []
    for a in range(1, p + 1):
        for b in range(a + 1, p + 1):
            cands.append((a, b, 1, 1))  # chord
    if not trivalent_only:
        for v in range(1, p + 1):
            cands.append((v, v, 2, 0))  # loop
    for a in range(1, p + 1):
        for f in range(p + 1, p + q + 1):
            cands.append((a, f, 1, 1))
    for f in range(p + 1, p + q + 1):
        for g in range(f + 1, p + q + 1):
            cands.append((f, g, 1, 1))

    n = p + q
    # required incidence count per vertex (excess over the segment's 2)
    lo_need = [0] * (n + 1)
    for v in range(1, n + 1):
        lo_need[v] = 1 if v <= p else 3
    if trivalent_only:
        hi_cap = lo_need[:]
    elif degree_target is not None:
        # the degree equals the total excess valence, so no single vertex
        # can exceed its minimum by more than the degree
        hi_cap = [x + degree_target for x in lo_need]
    else:
        hi_cap = [10 ** 9] * (n + 1)

    # remaining incidence available to each vertex from candidate tail
    suffix = [[0] * (n + 1)]
    for a, b, wa, wb in reversed(cands):
        row = suffix[0][:]
        row[a] += wa
        if a != b:
            row[b] += wb
        suffix.insert(0, row)

    deg = [0] * (n + 1)
    chosen = []

    def rec(idx, left):
        if budget[0] <= 0:
            raise EnumerationBudgetError("diagram enumeration exceeded node budget")
        budget[0] -= 1
        if left == 0:
            if all(deg[v] >= lo_need[v] for v in range(1, n + 1)):
                conns = [(a, b) for a, b, _, _ in chosen]
                if _connected(p, q, conns):
                    _register(p, q, conns, parity, found)
            return
        if idx == len(cands) or len(cands) - idx < left:
            return
        # prune: some vertex can no longer reach its minimum
        for v in range(1, n + 1):
            if deg[v] + suffix[idx][v] < lo_need[v]:
                return
        a, b, wa, wb = cands[idx]
        # take
        ok = deg[a] + wa <= hi_cap[a] and (a == b or deg[b] + wb <= hi_cap[b])
        if ok:
            deg[a] += wa
            if a != b:
                deg[b] += wb
            chosen.append(cands[idx])
            rec(idx + 1, left - 1)
            chosen.pop()
            deg[a] -= wa
            if a != b:
                deg[b] -= wb
        # skip
        rec(idx + 1, left)

    rec(0, ne)


def _register(p, q, conns, parity, found):
    chords = tuple(c for c in conns if c[0] != c[1] and c[1] <= p)
    loops = tuple(a for a, b in conns if a == b)
    edges = tuple(c for c in conns if c[1] > p)
    # cheap pre-filter: the lexicographically minimal free labeling is also
    # minimal under every adjacent label swap, so candidates failing a swap
    # test are redundant relabelings of classes registered elsewhere
    if q >= 2 and edges:
        base = sorted(edges)
        for i in range(q - 1):
            u, v = p + 1 + i, p + 2 + i
            table = {u: v, v: u}
            swapped = sorted(
                tuple(sorted((table.get(a, a), table.get(b, b)))) for a, b in edges
            )
            if swapped < base:
                return
    d = Diagram(parity, p, q, chords, loops, edges)
    c, s = canonical_form(d)
    if s == 0:
        return
    found[encode(c)] = c


# ---------------------------------------------------------------------------
# text encoding (external interface; bit-exact round-trip)


def encode(d: Diagram) -> str:
    ch = ",".join(f"({a},{b})" for a, b in d.chords)
    lo = ",".join(str(v) for v in d.loops)
    ed = ",".join(f"({a},{b})" for a, b in d.edges)
    return f"p={d.p} q={d.q} chords=[{ch}] loops=[{lo}] edges=[{ed}] parity={d.parity}"


_ENC_RE = re.compile(
    r"^p=(\d+) q=(\d+) chords=\[([^\]]*)\] loops=\[([^\]]*)\] edges=\[([^\]]*)\] parity=(odd|even)$"
)


def parse(text: str) -> Diagram:
    m = _ENC_RE.match(text.strip())
    if not m:
        raise DiagramError(f"bad diagram encoding: {text!r}")
    p, q = int(m.group(1)), int(m.group(2))

    def pairs(s):
        if not s:
            return ()
        return tuple(
            tuple(int(x) for x in part.split(","))
            for part in re.findall(r"\(([^()]*)\)", s)
        )

    loops = tuple(int(x) for x in m.group(4).split(",")) if m.group(4) else ()
    return Diagram(m.group(6), p, q, pairs(m.group(3)), loops, pairs(m.group(5)))


# ---------------------------------------------------------------------------
# stock diagrams


def single_chord(parity=ODD) -> Diagram:
    return Diagram(parity, 2, 0, ((1, 2),))


def x_diagram(parity=ODD) -> Diagram:
    """Crossed-chord degree-2 diagram: chords (1,3), (2,4)."""
    return Diagram(parity, 4, 0, ((1, 3), (2, 4)))


def tripod(parity=ODD) -> Diagram:
    """Three segment vertices joined to one free vertex."""
    return Diagram(parity, 3, 1, (), (), ((1, 4), (2, 4), (3, 4)))
