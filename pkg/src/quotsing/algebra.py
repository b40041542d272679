"""Finite-dimensional graded algebras given by a basis of paths.

The two constructions here are the character-split forms of the skew group
algebras of the truncated polynomial and exterior algebras: a vertex is a
pair (p, i) with 1 <= p <= d and i a character, and basis elements are
monomials (resp. exterior monomials) placed between vertices.  Products are
composition of morphisms: ``b1 * b2`` means "first b2, then b1", so it is
nonzero only when ``source(b1) == target(b2)``.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

from quotsing import linalg
from quotsing.errors import CapExceeded
from quotsing.monomials import exponents_of_degree
from quotsing.quiver import Quiver, folded_vertices
from quotsing.weights import WeightGroup

DEFAULT_CAP = 5000


@dataclass(frozen=True)
class BasisElement:
    key: tuple
    source: tuple
    target: tuple
    grade: int
    word: str  # "e" for idempotents, otherwise e.g. "x1x2" or "y2y3"

    @property
    def label(self) -> str:
        s = ",".join(str(x) for x in self.source)
        t = ",".join(str(x) for x in self.target)
        return f"{self.word}:({s})->({t})"


@dataclass(frozen=True)
class AtLeast:
    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


@dataclass
class FinDimAlgebra:
    vertices: list
    basis: list
    mult: dict  # (i, j) -> tuple of (k, coeff)
    name: str = ""
    relations: list = field(default_factory=list)

    def __post_init__(self):
        self.index = {b.key: k for k, b in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vertex_idempotents(self) -> dict:
        out = {}
        for k, b in enumerate(self.basis):
            if b.grade == 0 and b.source == b.target and b.word == "e":
                out[b.source] = k
        return out

    def product(self, i: int, j: int) -> tuple:
        return self.mult.get((i, j), ())

    def multiply(self, u: dict, v: dict) -> dict:
        """Product of two sparse vectors {basis index: coeff}."""
        out = defaultdict(Fraction)
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.product(i, j):
                    out[k] += a * b * c
        return {k: c for k, c in out.items() if c}

    def elements_between(self, source, target) -> list:
        return [k for k, b in enumerate(self.basis) if b.source == source and b.target == target]

    def to_dict(self) -> dict:
        def thaw(v):
            return list(v) if isinstance(v, tuple) else v

        return {
            "name": self.name,
            "dim": self.dim,
            "vertices": [thaw(v) for v in self.vertices],
            "basis": [
                {"label": b.label, "word": b.word, "source": thaw(b.source),
                 "target": thaw(b.target), "grade": b.grade}
                for b in self.basis
            ],
            "mult": [[i, j, k, str(c)] for (i, j), terms in sorted(self.mult.items()) for k, c in terms],
            "relations": list(self.relations),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


def _check_cap(G: WeightGroup, d: int, cap: int):
    if d * G.order > cap:
        raise CapExceeded(f"d*|G| = {d * G.order} exceeds cap {cap}")


def _mono_word(mu) -> str:
    if not any(mu):
        return "e"
    parts = []
    for j, e in enumerate(mu):
        if e == 1:
            parts.append(f"x{j + 1}")
        elif e > 1:
            parts.append(f"x{j + 1}^{e}")
    return "".join(parts)


def _subset_word(J) -> str:
    if not J:
        return "e"
    return "".join(f"y{j + 1}" for j in J)


def build_skew_poly(G: WeightGroup, d: int | None = None, cap: int = DEFAULT_CAP) -> FinDimAlgebra:
    """Basis (p, i, mu) with |mu| <= d - p: the monomial mu from (p, i) to (p+|mu|, i+wt mu)."""
    d = G.d if d is None else d
    _check_cap(G, d, cap)
    lab = G.label
    basis = []
    for p in range(1, d + 1):
        for c in G.characters():
            for t in range(0, d - p + 1):
                for mu in exponents_of_degree(G.d, t):
                    basis.append(BasisElement(
                        ("x", p, c, mu), (p, lab(c)), (p + t, lab(G.add(c, G.weight(mu)))), t, _mono_word(mu)))
    index = {b.key: k for k, b in enumerate(basis)}
    mult = {}
    for k2, b2 in enumerate(basis):
        _, p, c, mu = b2.key
        q = p + b2.grade
        c2 = G.add(c, G.weight(mu))
        for t in range(0, d - q + 1):
            for nu in exponents_of_degree(G.d, t):
                k1 = index[("x", q, c2, nu)]
                prod = tuple(a + b for a, b in zip(mu, nu))
                mult[(k1, k2)] = ((index[("x", p, c, prod)], 1),)
    return FinDimAlgebra(folded_vertices(G, d), basis, mult, name="skew_poly",
                         relations=["x_j x_k = x_k x_j"])


def _merge_sign(K, J) -> int:
    """Sign of the permutation sorting the concatenation K ++ J (both sorted, disjoint)."""
    inversions = sum(1 for k in K for j in J if k > j)
    return -1 if inversions % 2 else 1


def build_skew_ext(G: WeightGroup, d: int | None = None, cap: int = DEFAULT_CAP) -> FinDimAlgebra:
    """Basis (p, i, J) with |J| <= d - p: y_J from (p+|J|, i+a_J) to (p, i)."""
    d = G.d if d is None else d
    _check_cap(G, d, cap)
    lab = G.label
    basis = []
    for p in range(1, d + 1):
        for c in G.characters():
            for t in range(0, d - p + 1):
                for J in itertools.combinations(range(G.d), t):
                    basis.append(BasisElement(
                        ("y", p, c, J), (p + t, lab(G.add(c, G.subset_weight(J)))), (p, lab(c)), t, _subset_word(J)))
    index = {b.key: k for k, b in enumerate(basis)}
    mult = {}
    for k1, b1 in enumerate(basis):
        # b1 = y_K at the lower end; b2 = y_J must end where b1 starts
        _, q, c, K = b1.key
        p = q + len(K)
        c2 = G.add(c, G.subset_weight(K))
        for t in range(0, d - p + 1):
            for J in itertools.combinations(range(G.d), t):
                if set(J) & set(K):
                    continue
                k2 = index[("y", p, c2, J)]
                merged = tuple(sorted(K + J))
                mult[(k1, k2)] = ((index[("y", q, c, merged)], _merge_sign(K, J)),)
    return FinDimAlgebra(folded_vertices(G, d), basis, mult, name="skew_ext",
                         relations=["y_j y_k + y_k y_j = 0"])


def _restrict(A: FinDimAlgebra, keep: list, vertices: list, name: str) -> FinDimAlgebra:
    """Subquotient on the basis subset ``keep``; products landing outside are dropped."""
    new_index = {old: new for new, old in enumerate(keep)}
    basis = [A.basis[k] for k in keep]
    mult = {}
    for (i, j), terms in A.mult.items():
        if i in new_index and j in new_index:
            kept = tuple((new_index[k], c) for k, c in terms if k in new_index)
            if kept:
                mult[(new_index[i], new_index[j])] = kept
    return FinDimAlgebra(vertices, basis, mult, name=name, relations=list(A.relations))


def two_sided_ideal(A: FinDimAlgebra, vertices) -> list:
    """Basis of the ideal generated by the idempotents of ``vertices``, as sparse rows."""
    idem = A.vertex_idempotents()
    vertices = set(vertices)
    rows = []
    for v in vertices:
        ev = idem[v]
        left = [k for k, b in enumerate(A.basis) if b.source == v]
        right = [k for k, b in enumerate(A.basis) if b.target == v]
        for i in left:
            for j in right:
                prod = A.multiply({i: Fraction(1)}, A.multiply({ev: Fraction(1)}, {j: Fraction(1)}))
                if prod:
                    rows.append(prod)
    if not rows:
        return []
    dense = [[int(r.get(k, 0)) for k in range(A.dim)] for r in rows]
    return linalg.row_basis(dense, A.dim)


def quotient_by_trivial_block(A: FinDimAlgebra, zero_vertices=None) -> FinDimAlgebra:
    """Quotient by the ideal generated by the vertex idempotents of trivial character.

    The ideal is computed by exact linear algebra; for the constructions in
    this module it is spanned by basis elements, which is checked.
    """
    if zero_vertices is None:
        zero_vertices = [v for v in A.vertices if _is_zero_label(v[1])]
    ideal = two_sided_ideal(A, zero_vertices)
    in_ideal = set()
    for row in ideal:
        support = [k for k, x in enumerate(row) if x]
        if len(support) != 1:
            raise ValueError("ideal is not spanned by basis elements; quotient needs a general basis")
        in_ideal.add(support[0])
    keep = [k for k in range(A.dim) if k not in in_ideal]
    zero = set(zero_vertices)
    verts = [v for v in A.vertices if v not in zero]
    return _restrict(A, keep, verts, name=A.name + "/<e>")


def _is_zero_label(c) -> bool:
    return not any(c) if isinstance(c, tuple) else c == 0


def corner(A: FinDimAlgebra, kept_characters) -> FinDimAlgebra:
    """e'Ae' for e' the sum of the vertex idempotents whose character is kept."""
    kept = set(kept_characters)
    verts = [v for v in A.vertices if v[1] in kept]
    vs = set(verts)
    keep = [k for k, b in enumerate(A.basis) if b.source in vs and b.target in vs]
    return _restrict(A, keep, verts, name=A.name + "_corner")


def nonzero_characters(G: WeightGroup) -> list:
    return [G.label(c) for c in G.characters() if c != G.zero]


@dataclass
class QuiverPresentation:
    quiver: Quiver
    arrow_reps: list  # basis indices, aligned with quiver.arrows


def quiver_presentation(A: FinDimAlgebra) -> QuiverPresentation:
    """Arrows v -> w number dim e_w (J/J^2) e_v, J the positive-grade part."""
    radical = [k for k, b in enumerate(A.basis) if b.grade > 0]
    rad_set = set(radical)
    square = defaultdict(list)  # (source, target) -> sparse rows
    for (i, j), terms in A.mult.items():
        if i in rad_set and j in rad_set:
            row = {k: c for k, c in terms}
            b = A.basis[terms[0][0]]
            square[(b.source, b.target)].append(row)
    arrows = []
    reps = []
    blocks = defaultdict(list)
    for k in radical:
        b = A.basis[k]
        blocks[(b.source, b.target)].append(k)
    for (src, dst), members in blocks.items():
        rows = []
        for r in square.get((src, dst), []):
            rows.append([int(r.get(k, 0)) for k in members])
        base = linalg.rank(rows, len(members))
        unit = [[1 if n == m else 0 for n in range(len(members))] for m in range(len(members))]
        chosen = [p - len(rows) for p in linalg.pivot_rows(rows + unit, len(members)) if p >= len(rows)]
        if len(chosen) != len(members) - base:
            raise ArithmeticError("radical layer bookkeeping failed")
        for m in chosen:
            k = members[m]
            arrows.append((src, dst, A.basis[k].word))
            reps.append(k)
    order = {v: n for n, v in enumerate(A.vertices)}
    paired = sorted(zip(arrows, reps), key=lambda ar: (order[ar[0][0]], order[ar[0][1]], ar[0][2]))
    Q = Quiver(list(A.vertices), [a for a, _ in paired], name="quiver_of_" + A.name,
               relations=list(A.relations))
    return QuiverPresentation(Q, [r for _, r in paired])


def cartan_matrix(A: FinDimAlgebra) -> list:
    order = {v: n for n, v in enumerate(A.vertices)}
    n = len(A.vertices)
    C = [[0] * n for _ in range(n)]
    for b in A.basis:
        C[order[b.target]][order[b.source]] += 1
    return C


def _projective_basis(A: FinDimAlgebra, v) -> list:
    """Basis of the left projective A e_v: elements with source v."""
    return [k for k, b in enumerate(A.basis) if b.source == v]


def global_dimension(A: FinDimAlgebra, cap: int | None = None):
    """Max over vertices of the projective dimension of the vertex simple.

    Minimal projective resolutions of left modules are built layer by layer:
    a submodule M of a free module F = sum_k A e_{v_k} has top M / J M, each
    top element spans a copy of a projective, and the kernel of the cover is
    the next syzygy.
    """
    if not A.vertices:
        return 0
    if cap is None:
        cap = 2 * max(v[0] for v in A.vertices)
    radical = [k for k, b in enumerate(A.basis) if b.grade > 0]
    best = 0
    for v in A.vertices:
        pd = _simple_projdim(A, v, cap, radical)
        if isinstance(pd, AtLeast):
            return AtLeast(cap)
        best = max(best, pd)
    return best


def _act(A: FinDimAlgebra, a: int, vec: dict, slots) -> dict:
    """a * vec for vec in a free module: keys (slot, basis index)."""
    out = defaultdict(Fraction)
    for (s, b), c in vec.items():
        for k, coeff in A.product(a, b):
            out[(s, k)] += c * coeff
    return {key: c for key, c in out.items() if c}


def _simple_projdim(A: FinDimAlgebra, v, cap: int, radical: list):
    # F = A e_v, M = rad(A e_v) = first syzygy of the simple
    slots = [v]
    coords = [(0, k) for k in _projective_basis(A, v)]
    M = [{(0, k): Fraction(1)} for k in _projective_basis(A, v) if A.basis[k].grade > 0]
    n = 0
    while True:
        if not M:
            return n
        if n >= cap:
            return AtLeast(cap)
        # J M
        JM = []
        for a in radical:
            for m in M:
                prod = _act(A, a, m, slots)
                if prod:
                    JM.append(prod)
        cindex = {c: k for k, c in enumerate(coords)}
        top = _top_generators(A, M, JM, cindex, slots)
        # cover P = sum over generators of A e_w; kernel of P -> F
        new_slots = [w for w, _ in top]
        new_coords = []
        images = []
        for s, (w, m) in enumerate(top):
            for k in _projective_basis(A, w):
                new_coords.append((s, k))
                images.append(_act(A, k, m, slots))
        rows = [[img.get(c, 0) for c in coords] for img in images]
        rows = _clear_denominators(rows)
        kernel = linalg.left_kernel(rows, len(coords))
        M = [{new_coords[k]: Fraction(x) for k, x in enumerate(vec) if x} for vec in kernel]
        slots, coords = new_slots, new_coords
        n += 1


def _clear_denominators(rows):
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _top_generators(A, M, JM, cindex, slots):
    """Pick elements of M spanning M / JM, each homogeneous for one vertex idempotent."""
    ncols = len(cindex)
    # split M by target vertex; each basis vector of M is homogeneous if built from
    # homogeneous pieces, so project with e_w
    by_vertex = defaultdict(list)
    idem = A.vertex_idempotents()
    for m in list(M):
        for w, ew in idem.items():
            part = _act(A, ew, m, slots)
            if part:
                by_vertex[w].append(part)
    jm_by_vertex = defaultdict(list)
    for m in JM:
        for w, ew in idem.items():
            part = _act(A, ew, m, slots)
            if part:
                jm_by_vertex[w].append(part)
    top = []
    for w in A.vertices:
        cand = by_vertex.get(w, [])
        if not cand:
            continue
        base = jm_by_vertex.get(w, [])
        dense = _clear_denominators([[r.get(c, 0) for c in cindex] for r in base + cand])
        for p in linalg.pivot_rows(dense, ncols):
            if p >= len(base):
                top.append((w, cand[p - len(base)]))
    return top


def expected_skew_poly_dim(G: WeightGroup, d: int) -> int:
    return G.order * sum((d - t) * comb(t + G.d - 1, G.d - 1) for t in range(d))


def expected_skew_ext_dim(G: WeightGroup, d: int) -> int:
    return G.order * sum((d - t) * comb(G.d, t) for t in range(d))
