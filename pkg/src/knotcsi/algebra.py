"""Exact rational vector spaces of diagrams, relations, and the coboundary.

Scalars are Fractions throughout: every relation matrix has integer entries,
so ranks over Q equal ranks over R and all combinatorial checks are exact.

The coboundary δ sends a diagram to the signed sum of its edge and arc
contractions (degenerate terms dropped); it raises degree by one and
(Theorem-level fact, verified by the test suite) squares to zero.  STU and
IHX relation generators are read off as rows of the δ matrix restricted to
the trivalent slice: a row whose target carries a loop is a 1T relation, a
4-valent segment vertex gives STU, a 4-valent free vertex gives IHX.  The 4T
relation is also built directly by endpoint sliding and cross-checked against
differences of STU rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import exact
from .diagrams import (
    EVEN,
    ODD,
    Diagram,
    DiagramError,
    canonical_form,
    contract,
    contractible_elements,
    degree,
    encode,
    enumerate_diagrams,
    has_consecutive_chord,
    is_trivalent,
)


class DimensionMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# vectors


class DiagramVector:
    """Finite linear combination of canonical diagrams with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for d, c in terms.items():
                self.add_term(d, c)

    def add_term(self, d: Diagram, coeff):
        coeff = Fraction(coeff)
        if not coeff:
            return
        c, s = canonical_form(d)
        if s == 0:
            return
        new = self.terms.get(c, Fraction(0)) + s * coeff
        if new:
            self.terms[c] = new
        else:
            self.terms.pop(c, None)

    @classmethod
    def of(cls, d: Diagram, coeff=1):
        v = cls()
        v.add_term(d, coeff)
        return v

    def __add__(self, other):
        v = DiagramVector()
        for d, c in self.terms.items():
            v.add_term(d, c)
        for d, c in other.terms.items():
            v.add_term(d, c)
        return v

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        v = DiagramVector()
        for d, c in self.terms.items():
            v.add_term(d, Fraction(scalar) * c)
        return v

    def __neg__(self):
        return (-1) * self

    def __eq__(self, other):
        return isinstance(other, DiagramVector) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, d: Diagram) -> Fraction:
        c, s = canonical_form(d)
        if s == 0:
            return Fraction(0)
        return s * self.terms.get(c, Fraction(0))

    def coordinates(self, basis_index: dict):
        row = [Fraction(0)] * len(basis_index)
        for d, c in self.terms.items():
            try:
                row[basis_index[d]] = c
            except KeyError:
                raise DimensionMismatchError(f"diagram not in basis: {encode(d)}")
        return row

    def degrees(self):
        return {degree(d) for d in self.terms}

    def __repr__(self):
        if not self.terms:
            return "DiagramVector(0)"
        bits = [f"{c}*[{encode(d)}]" for d, c in sorted(self.terms.items(), key=lambda t: encode(t[0]))]
        return "DiagramVector(" + " + ".join(bits) + ")"


@dataclass
class RelationSet:
    kind: str
    degree: int
    parity: str
    generators: list


@dataclass
class WeightSystem:
    """Exact functional on a diagram family, vanishing on its relation sets."""

    degree: int
    family: str
    values: dict

    def __call__(self, obj) -> Fraction:
        if isinstance(obj, Diagram):
            obj = DiagramVector.of(obj)
        total = Fraction(0)
        for d, c in obj.terms.items():
            total += c * self.values.get(d, Fraction(0))
        return total

    def scaled_so(self, d: Diagram, value=1) -> "WeightSystem":
        cur = self(d)
        if not cur:
            raise ValueError("weight system vanishes on the requested diagram")
        f = Fraction(value) / cur
        return WeightSystem(self.degree, self.family, {k: f * v for k, v in self.values.items()})


# ---------------------------------------------------------------------------
# bases


def trivalent_basis(k, parity=ODD):
    """Canonical trivalent diagrams with exactly 2k vertices (the degree-k family)."""
    out = enumerate_diagrams(0, parity, max_vertices=2 * k, trivalent_only=True)
    return [d for d in out if d.n_vertices == 2 * k]


def chord_basis(k, parity=ODD):
    return [d for d in trivalent_basis(k, parity) if d.q == 0]


def _index(basis):
    return {d: i for i, d in enumerate(basis)}


# ---------------------------------------------------------------------------
# coboundary


def coboundary(v, parity=None) -> DiagramVector:
    """Signed sum of all edge and arc contractions; raises degree by one."""
    if isinstance(v, Diagram):
        v = DiagramVector.of(v)
    if parity is not None:
        for d in v.terms:
            if d.parity != parity:
                raise DiagramError(f"diagram parity {d.parity} != requested {parity}")
    out = DiagramVector()
    for d, c in v.terms.items():
        for el in contractible_elements(d):
            res = contract(d, el)
            if res.degenerate:
                continue
            out.add_term(res.diagram, c * res.sign)
    return out


def delta_rows(basis):
    """δ restricted to `basis`, as {canonical target: DiagramVector row}.

    The row for target t collects, over every source diagram, the total signed
    multiplicity with which its contractions land on t.
    """
    rows = {}
    for d in basis:
        for el in contractible_elements(d):
            res = contract(d, el)
            if res.degenerate:
                continue
            t, s = canonical_form(res.diagram)
            if s == 0:
                continue
            row = rows.setdefault(t, DiagramVector())
            row.add_term(d, res.sign * s)
    return {t: row for t, row in rows.items() if row}


def _excess_vertex(d: Diagram):
    """The unique vertex of valence 4 in a degree-1 diagram, with its kind."""
    val = [0] * (d.p + d.q + 1)
    for a, b in d.chords:
        val[a] += 1
        val[b] += 1
    for v in d.loops:
        val[v] += 2
    for a, b in d.edges:
        val[a] += 1
        val[b] += 1
    for v in range(1, d.p + d.q + 1):
        total = val[v] + (2 if v <= d.p else 0)
        if total > 3:
            return v, ("segment" if v <= d.p else "free")
    raise DiagramError("no excess-valence vertex found")


# ---------------------------------------------------------------------------
# relation generators


def relation_generators(kind, k, parity=ODD, family="trivalent") -> RelationSet:
    """All instances of the named relation among degree-k diagrams.

    STU/IHX act on the trivalent (2k-vertex) family and 4T on chord diagrams;
    1T applies to either family (family="chord" restricts it to diagrams
    without free vertices).  multiple-edge and relabel-sign are folded into
    canonical_form, so their generator lists over a canonical basis are empty.
    """
    if kind == "1T":
        pool = chord_basis(k, parity) if family == "chord" else trivalent_basis(k, parity)
        gens = [DiagramVector.of(d) for d in pool if has_consecutive_chord(d)]
    elif kind in ("STU", "IHX"):
        want = "segment" if kind == "STU" else "free"
        gens = []
        for t, row in sorted(delta_rows(trivalent_basis(k, parity)).items(), key=lambda kv: encode(kv[0])):
            if t.loops:
                continue
            _, where = _excess_vertex(t)
            if where == want:
                gens.append(row)
    elif kind == "4T":
        gens = four_t_generators(k, parity)
    elif kind in ("multiple-edge", "relabel-sign"):
        gens = []
    else:
        raise ValueError(f"unknown relation kind {kind!r}")
    return RelationSet(kind, k, parity, gens)


def four_t_generators(k, parity=ODD):
    """Direct 4T instances: slide one chord endpoint x to the four slots
    around the two endpoints of another chord.

    In the undecorated picture the four terms alternate in sign; here each
    term additionally carries the parity of its insertion slot, because
    moving x past a vertex relabels every later vertex and relabelings are
    signed.  Spectator chords keep their transported orientation so the
    canonical fold accounts for x crossing its own partner.
    """
    seen = {}
    for D in chord_basis(k, parity):
        pairing = {a: b for a, b in D.chords}
        pairing.update({b: a for a, b in D.chords})
        n = 2 * k
        for x in range(1, n + 1):
            y = pairing[x]
            base = [v for v in range(1, n + 1) if v != x]
            others = [c for c in D.chords if x not in c]
            for c1, c2 in D.chords:
                if x in (c1, c2) or y in (c1, c2):
                    continue
                gen = DiagramVector()
                alt = 1
                for anchor in (c1, c2):
                    for side in (0, 1):  # 0: just before anchor, 1: just after
                        slot = base.index(anchor) + side
                        order = list(base)
                        order.insert(slot, x)
                        newlab = {old: i + 1 for i, old in enumerate(order)}
                        chords = tuple((newlab[a], newlab[b]) for a, b in others)
                        chords += ((newlab[y], newlab[x]),)
                        term = Diagram(D.parity, D.p, D.q, chords)
                        gen = gen + (alt * (-1) ** slot) * DiagramVector.of(term)
                        alt = -alt
                if gen:
                    key = _gen_key(gen)
                    seen.setdefault(key, gen)
    return [seen[key] for key in sorted(seen)]


def _gen_key(v: DiagramVector):
    items = sorted(((encode(d), c) for d, c in v.terms.items()))
    lead = items[0][1]
    return tuple((e, c / lead) for e, c in items)


def stu_pair_four_t(k, parity=ODD):
    """4T generators rebuilt as differences of two STU rows sharing their
    one-free-vertex diagram; cross-check for four_t_generators."""
    gens = []
    rows = relation_generators("STU", k, parity).generators
    by_s = {}
    for row in rows:
        svs = [d for d in row.terms if d.q == 1]
        if len(svs) != 1:
            continue
        by_s.setdefault(svs[0], []).append(row)
    for s, rws in sorted(by_s.items(), key=lambda kv: encode(kv[0])):
        for i in range(len(rws)):
            for j in range(i + 1, len(rws)):
                a = Fraction(1) / rws[i].coefficient(s)
                b = Fraction(1) / rws[j].coefficient(s)
                g = a * rws[i] - b * rws[j]
                if g:
                    gens.append(g)
    return gens


# ---------------------------------------------------------------------------
# quotients and weight systems


def quotient_rank(space, relations):
    """Rank of span(space)/span(relation generators), plus a surviving basis.

    Exact integer elimination (Bareiss); pivot columns follow the order of
    `space`, pivot rows are first-nonzero.  The basis is the non-pivot
    columns' diagrams.
    """
    idx = _index(space)
    rows = []
    for rs in relations:
        gens = rs.generators if isinstance(rs, RelationSet) else rs
        for g in gens:
            rows.append(g.coordinates(idx))
    if not rows:
        return len(space), list(space)
    r, pivots = exact.bareiss_rank(rows, len(space))
    piv = set(pivots)
    basis = [d for i, d in enumerate(space) if i not in piv]
    return len(space) - r, basis


def weight_system_space(k, family, parity=ODD):
    """Basis of functionals on the degree-k family vanishing on its relations.

    family "chord": chord diagrams mod {1T, 4T}; family "trivalent": trivalent
    diagrams mod {1T, STU, IHX}.
    """
    if family == "chord":
        basis = chord_basis(k, parity)
        rels = [relation_generators(x, k, parity, family) for x in ("1T", "4T")]
    elif family == "trivalent":
        basis = trivalent_basis(k, parity)
        rels = [relation_generators(x, k, parity, family) for x in ("1T", "STU", "IHX")]
    else:
        raise ValueError(f"unknown family {family!r}")
    idx = _index(basis)
    rows = [g.coordinates(idx) for rs in rels for g in rs.generators]
    if not rows:
        rows = [[Fraction(0)] * len(basis)]
    systems = []
    for w in exact.nullspace(rows, len(basis)):
        ws = WeightSystem(k, family, {d: w[i] for d, i in idx.items() if w[i]})
        for rs in rels:
            for g in rs.generators:
                if ws(g):
                    raise AssertionError("weight system fails to vanish on a generator")
        systems.append(ws)
    return systems


def casson_weight_system(parity=ODD) -> WeightSystem:
    """The degree-2 trivalent weight system scaled to 1 on the crossed-chord
    diagram (and hence -1 on the tripod)."""
    from .diagrams import x_diagram

    (ws,) = weight_system_space(2, "trivalent", parity)
    return ws.scaled_so(x_diagram(parity), 1)


# ---------------------------------------------------------------------------
# STU reduction to chord diagrams


def _expand_stu_row(t: Diagram) -> DiagramVector:
    """Row of δ at a target with one 4-valent segment vertex: the S/T/U preimages
    with their total signed multiplicities onto t."""
    v, where = _excess_vertex(t)
    if where != "segment" or t.loops:
        raise DiagramError("target is not an STU collision")
    attached = []  # (other endpoint, original kind) for the two extra incidences at v
    for a, b in t.chords:
        if a == v:
            attached.append(b)
        if b == v:
            attached.append(a)
    for a, b in t.edges:
        if a == v:
            attached.append(b)
        if b == v:
            attached.append(a)
    if len(attached) != 2:
        raise DiagramError("expected exactly two extra incidences at the fat vertex")

    def strip_v():
        chords = [c for c in t.chords if v not in c]
        edges = [e for e in t.edges if v not in e]
        return chords, edges

    preimages = []
    # S: pull the two incidences onto a new free vertex joined to v
    chords, edges = strip_v()
    f = t.p + t.q + 1
    s_edges = list(edges)
    s_chords = list(chords)
    for w in attached:
        s_edges.append((w, f))
    s_edges.append((v, f))
    preimages.append(Diagram(t.parity, t.p, t.q + 1, tuple(s_chords), t.loops, tuple(s_edges)))
    # T/U: split v into segment vertices v, v+1
    for first, second in ((attached[0], attached[1]), (attached[1], attached[0])):
        def shift(w):
            if w <= t.p:
                return w if w <= v else w + 1
            return w + 1

        chords2 = [tuple(sorted((shift(a), shift(b)))) for a, b in strip_v()[0]]
        edges2 = [(shift(a), shift(b)) for a, b in strip_v()[1]]
        loops2 = tuple(w if w <= v else w + 1 for w in t.loops)
        for pos, w in ((v, first), (v + 1, second)):
            w2 = shift(w)
            if w2 <= t.p + 1:
                chords2.append(tuple(sorted((pos, w2))))
            else:
                edges2.append((pos, w2))
        preimages.append(Diagram(t.parity, t.p + 1, t.q, tuple(chords2), loops2, tuple(edges2)))

    row = DiagramVector()
    tc, ts = canonical_form(t)
    distinct = {}
    for P in preimages:
        c, s = canonical_form(P)
        if s:
            distinct[c] = c  # T and U can coincide canonically; count once
    for c in distinct:
        for el in contractible_elements(c):
            res = contract(c, el)
            if res.degenerate:
                continue
            rc, rs = canonical_form(res.diagram)
            if rs == 0 or rc != tc:
                continue
            row.add_term(c, res.sign * rs * ts)
    return row


def stu_reduce(d: Diagram, edge_choice=None) -> DiagramVector:
    """Combination of chord diagrams equal to d modulo STU; removes free
    vertices one at a time through segment-edge collisions.

    edge_choice(diagram, candidate edge indices) may pick the rewriting site;
    default takes the first candidate.  Any two choices agree modulo {1T, 4T}.
    """
    if not is_trivalent(d):
        raise DiagramError("stu_reduce applies to trivalent diagrams")
    work = DiagramVector.of(d)
    done = DiagramVector()
    while work:
        cur = next(iter(sorted(work.terms, key=encode)))
        coeff = work.terms[cur]
        work = work - DiagramVector.of(cur, coeff)
        if cur.q == 0:
            done = done + DiagramVector.of(cur, coeff)
            continue
        cands = [i for i, (a, b) in enumerate(cur.edges) if min(a, b) <= cur.p]
        if edge_choice is not None:
            order = edge_choice(cur, cands)
        else:
            order = cands
        row = None
        for i in order:
            res = contract(cur, ("edge", i))
            if res.degenerate:
                continue
            t, s = canonical_form(res.diagram)
            if s == 0:
                continue
            row = _expand_stu_row(t)
            break
        if row is None:
            raise DiagramError(f"no usable STU site on {encode(cur)}")
        a = row.coefficient(cur)
        if not a:
            raise DiagramError(f"STU row does not involve {encode(cur)}")
        rest = row - DiagramVector.of(cur, a)
        work = work - (coeff / a) * rest
    return done


# ---------------------------------------------------------------------------
# the cochain complex


@dataclass
class ComplexSlice:
    n: int
    parity: str
    degree: int
    basis: list
    target_basis: list
    matrix: list = field(repr=False)  # rows over target_basis, dicts {col: int}

    def rank(self):
        r, _ = exact.bareiss_rank(
            [row for row in self.matrix if row], len(self.basis)
        )
        return r

    def kernel_dim(self):
        return len(self.basis) - self.rank()

    def kernel(self):
        rows = [row for row in self.matrix if row]
        if not rows:
            rows = [[Fraction(0)] * len(self.basis)]
        return exact.nullspace(rows, len(self.basis))


def complex_slice(n, deg, max_vertices, parity=None) -> ComplexSlice:
    """Degree-`deg` slice of the diagram complex for ambient dimension n,
    with its exact boundary matrix into degree deg+1."""
    if parity is None:
        parity = ODD if n % 2 else EVEN
    basis = enumerate_diagrams(deg, parity, max_vertices=max_vertices)
    target = enumerate_diagrams(deg + 1, parity, max_vertices=max_vertices)
    tidx = _index(target)
    bidx = _index(basis)
    matrix = [dict() for _ in target]
    for d in basis:
        col = bidx[d]
        db = coboundary(d)
        for t, c in db.terms.items():
            row = matrix[tidx[t]]
            row[col] = row.get(col, 0) + c
    matrix = [{j: v for j, v in row.items() if v} for row in matrix]
    return ComplexSlice(n, parity, deg, basis, target, matrix)


def compose_is_zero(lower: ComplexSlice, upper: ComplexSlice) -> bool:
    """Exact check that δ∘δ = 0 across two consecutive slices."""
    if lower.target_basis != upper.basis:
        raise DimensionMismatchError("slices are not consecutive")
    for trow in upper.matrix:
        acc = {}
        for mid_col, v in trow.items():
            for col, w in lower.matrix[mid_col].items():
                acc[col] = acc.get(col, 0) + v * w
        if any(acc.values()):
            return False
    return True


def cohomology_rank(slices) -> int:
    """dim ker δ − dim im δ at the middle degree of consecutive slices.

    Accepts [at] (degree-0 case, nothing below) or [below, at].
    """
    if len(slices) == 1:
        below, at = None, slices[0]
    elif len(slices) == 2:
        below, at = slices
        if below.target_basis != at.basis:
            raise DimensionMismatchError("slices do not share the middle basis")
        if below.parity != at.parity or below.degree + 1 != at.degree:
            raise DimensionMismatchError("slices are not degree-consecutive")
    else:
        raise ValueError("need one or two consecutive slices")
    h = at.kernel_dim()
    if below is not None:
        h -= below.rank()
    return h


# ---------------------------------------------------------------------------
# golden dimension tables


def dims_row(family, k, parity=ODD):
    if family == "chord":
        space = chord_basis(k, parity)
        rels = [relation_generators(x, k, parity, family) for x in ("1T", "4T")]
        names = "1T+4T"
    elif family == "trivalent":
        space = trivalent_basis(k, parity)
        rels = [relation_generators(x, k, parity, family) for x in ("1T", "STU", "IHX")]
        names = "1T+STU+IHX"
    else:
        raise ValueError(f"unknown family {family!r}")
    rank, _ = quotient_rank(space, rels)
    return {"family": family, "k": k, "relations": names, "rank": rank}


def write_dims_csv(rows, fh):
    fh.write("family,k,relations,rank\n")
    for r in rows:
        fh.write(f"{r['family']},{r['k']},{r['relations']},{r['rank']}\n")
