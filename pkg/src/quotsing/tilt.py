"""Tilting candidates built from the character-split Koszul complex, and checks on them.

T is the sum of the shifted covariant modules S(p) for p = 0..d-1.  U is R
plus the Koszul images U[p,i] = image of delta_p on character i, twisted
by (p), for i nonzero.  Utilde keeps every character, free parts included.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from math import comb

from quotsing import linalg
from quotsing.algebra import build_skew_ext, corner, nonzero_characters
from quotsing.errors import MismatchReport, NotIsolated, WindowTooLarge
from quotsing.monomials import count_monomials, exponents_of_degree
from quotsing.resolve.ext import CONCLUSIVE, LIMITED, ExtEngine, ExtTable
from quotsing.resolve.modules import (
    MAX_PIECE_DEGREE,
    FullModule,
    covariant_module,
    free_module,
    koszul_ambient,
    koszul_map,
    koszul_subsets,
    koszul_summand,
)
from quotsing.weights import WeightGroup, acts_freely_off_origin


def default_degree_window(G: WeightGroup) -> int:
    return 3 * G.d * max(G.invariant_factors, default=1)


def default_n_range(G: WeightGroup) -> range:
    return range(-(G.d + 2), G.d + 3)


def _check_d(G: WeightGroup, d):
    if d is not None and d != G.d:
        raise ValueError(f"the group acts on {G.d} variables, not {d}")


# -- the Koszul complex, written out on monomial bases -----------------------------


class KoszulComplex:
    """S (x) Lambda^p V for p = 0..d on explicit (monomial, subset) bases.

    A basis element (alpha, J) has internal degree |alpha| + |J| and
    character wt(alpha) + wt(J).  delta_p sends x^alpha e_J to
    sum over positions t of J of (-1)^t x^(alpha + e_J[t]) e_(J minus J[t]).
    """

    def __init__(self, G: WeightGroup, d: int | None = None, window: int | None = None):
        _check_d(G, d)
        self.G = G
        self.d = G.d
        self.window = default_degree_window(G) if window is None else window
        if self.window > MAX_PIECE_DEGREE:
            raise WindowTooLarge(f"degree window {self.window} exceeds {MAX_PIECE_DEGREE}")
        self._bases = {}

    def basis(self, p: int, n: int, c) -> list:
        c = self.G.char(c)
        key = (p, n, c)
        hit = self._bases.get(key)
        if hit is None:
            hit = []
            if 0 <= p <= self.d and n - p >= 0:
                for J in koszul_subsets(self.G, p):
                    wJ = self.G.subset_weight(J)
                    for alpha in exponents_of_degree(self.d, n - p):
                        if self.G.add(self.G.weight(alpha), wJ) == c:
                            hit.append((alpha, J))
            self._bases[key] = hit
        return hit

    def apply(self, p: int, alpha, J) -> list:
        """delta_p(x^alpha e_J) as a list of ((alpha', J'), sign)."""
        out = []
        for t, j in enumerate(J):
            beta = tuple(a + (1 if k == j else 0) for k, a in enumerate(alpha))
            out.append(((beta, J[:t] + J[t + 1:]), -1 if t % 2 else 1))
        return out

    def matrix(self, p: int, n: int, c) -> tuple:
        """Rows: basis of term p; columns: basis of term p-1 (1 <= p <= d)."""
        src = self.basis(p, n, c)
        dst = self.basis(p - 1, n, c)
        pos = {b: k for k, b in enumerate(dst)}
        rows = []
        for alpha, J in src:
            row = [0] * len(dst)
            for b, sign in self.apply(p, alpha, J):
                row[pos[b]] += sign
            rows.append(row)
        return rows, len(dst)

    def rank(self, p: int, n: int, c) -> int:
        """Rank of delta_p; p = 0 is the augmentation onto k."""
        c = self.G.char(c)
        if p == 0:
            return 1 if n == 0 and c == self.G.zero else 0
        if p > self.d:
            return 0
        rows, ncols = self.matrix(p, n, c)
        return linalg.rank(rows, ncols)

    def square_zero_failures(self) -> list:
        """(p, n, c) where delta_(p-1) delta_p is nonzero."""
        bad = []
        for n in range(self.window + 1):
            for c in self.G.characters():
                for p in range(2, self.d + 1):
                    for alpha, J in self.basis(p, n, c):
                        total = {}
                        for (beta, K), s in self.apply(p, alpha, J):
                            for b2, s2 in self.apply(p - 1, beta, K):
                                total[b2] = total.get(b2, 0) + s * s2
                        if any(total.values()):
                            bad.append((p, n, c))
                            break
        return sorted(set(bad))

    def homology_defects(self) -> list:
        """(p, n, c, dim) wherever the augmented complex has homology."""
        bad = []
        for n in range(self.window + 1):
            for c in self.G.characters():
                ranks = [self.rank(p, n, c) for p in range(self.d + 2)]
                for p in range(self.d + 1):
                    h = len(self.basis(p, n, c)) - ranks[p] - ranks[p + 1]
                    if h:
                        bad.append((p, n, c, h))
        return bad

    def euler_characteristic(self, n: int, c) -> int:
        """Alternating sum of term dimensions, with k in position -1."""
        c = self.G.char(c)
        total = sum((-1) ** p * len(self.basis(p, n, c)) for p in range(self.d + 1))
        return total - (1 if n == 0 and c == self.G.zero else 0)


def koszul_complex(G: WeightGroup, d: int | None = None, window: int | None = None) -> KoszulComplex:
    return KoszulComplex(G, d, window)


def syzygy_dimension(d: int, p: int, n: int) -> int:
    """dim of the degree-n piece of the p-th syzygy of k over S, by the Koszul Euler sum."""
    total = 0
    for q in range(0, d - p + 1):
        m = n - p - q
        if m >= 0:
            total += (-1) ** q * comb(d, p + q) * comb(m + d - 1, d - 1)
    return total


# -- candidates -------------------------------------------------------------------------


@dataclass
class TiltingCandidate:
    name: str
    G: WeightGroup
    summands: list  # (label, module)
    provenance: dict = field(default_factory=dict)

    def labels(self) -> list:
        return [lab for lab, _ in self.summands]

    def module(self, label):
        return dict(self.summands)[label]


def _require_isolated(G: WeightGroup):
    if not acts_freely_off_origin(G):
        raise NotIsolated("the group does not act freely off the origin; R is not an isolated singularity")


def build_T(G: WeightGroup, d: int | None = None, window=None) -> TiltingCandidate:
    _check_d(G, d)
    _require_isolated(G)
    summands, prov = [], {}
    for p in range(G.d):
        for c in G.characters():
            label = f"S[{G.label(c)}]({p})"
            summands.append((label, covariant_module(G, c, shift=p)))
            prov[label] = f"covariants of character {G.label(c)}, shifted by {p}"
    return TiltingCandidate("T", G, summands, prov)


def build_U(G: WeightGroup, d: int | None = None, window=None) -> TiltingCandidate:
    _check_d(G, d)
    _require_isolated(G)
    summands = [("R", free_module(G))]
    prov = {"R": "free part, the trivial character of the top Koszul term"}
    for p in range(1, G.d + 1):
        for c in G.characters():
            if c == G.zero:
                continue
            label = f"U[{p},{G.label(c)}]"
            summands.append((label, koszul_summand(G, p, c)))
            prov[label] = f"image of the Koszul differential delta_{p} on character {G.label(c)}"
    return TiltingCandidate("U", G, summands, prov)


def build_Utilde(G: WeightGroup, d: int | None = None) -> TiltingCandidate:
    _check_d(G, d)
    _require_isolated(G)
    summands, prov = [], {}
    for p in range(1, G.d + 1):
        for c in G.characters():
            label = f"U[{p},{G.label(c)}]"
            summands.append((label, koszul_summand(G, p, c)))
            prov[label] = f"image of delta_{p} on character {G.label(c)}, free part kept"
    return TiltingCandidate("Utilde", G, summands, prov)


def mcm_check(C: TiltingCandidate, engine: ExtEngine, twists=None) -> dict:
    """label -> (Ext^n(summand, R(i)) vanishes for 1 <= n <= d and i in twists, conclusive)."""
    G = C.G
    if twists is None:
        w = G.d * max(G.invariant_factors, default=1)
        twists = range(-w, w + 1)
    R = free_module(G)
    out = {}
    for label, M in C.summands:
        zero, ok = True, True
        for n in range(1, G.d + 1):
            for _i, (dim, good) in engine.ext_row(M, R, n, list(twists)).items():
                zero = zero and dim == 0
                ok = ok and good
        out[label] = (zero, ok)
    return out


# -- vanishing grids -------------------------------------------------------------------


@dataclass
class GridReport:
    candidate: str
    group: str
    verdict: str
    cells: list
    conclusive: bool
    runtime: float = 0.0
    nonzero: list = field(default_factory=list)

    def totals(self) -> dict:
        out = {}
        for cell in self.cells:
            out[cell["n"]] = out.get(cell["n"], 0) + cell["dim"]
        return dict(sorted(out.items()))

    def to_dict(self, timestamp: bool = True) -> dict:
        doc = {
            "candidate": self.candidate,
            "group": self.group,
            "verdict": self.verdict,
            "confidence": CONCLUSIVE if self.conclusive else LIMITED,
            "grid": self.cells,
            "totals": {str(n): v for n, v in self.totals().items()},
            "nonzero": self.nonzero,
        }
        if timestamp:
            doc["runtime"] = round(self.runtime, 3)
        return doc

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=True) + "\n"


def verdict_from(cells) -> str:
    pos = any(c["dim"] for c in cells if c["n"] > 0)
    neg = any(c["dim"] for c in cells if c["n"] < 0)
    if not pos and not neg:
        return "TILTING"
    if not pos:
        return "SILTING"
    return "NEITHER"


def vanishing_grid(C: TiltingCandidate, n_range=None, twist: int = 0,
                   engine: ExtEngine | None = None) -> GridReport:
    """dim lhom(a, b(twist)[n]) for every ordered pair of summands and n in range."""
    start = time.perf_counter()
    G = C.G
    engine = engine or ExtEngine(G)
    n_range = list(default_n_range(G) if n_range is None else n_range)
    cells = []
    for (la, A), (lb, B) in itertools.product(C.summands, C.summands):
        for n in n_range:
            dim, ok = engine.shifted_row(A, B, n, [twist])[twist]
            cells.append({"source": la, "target": lb, "n": n, "i": twist, "dim": dim,
                          "confidence": CONCLUSIVE if ok else LIMITED})
    verdict = verdict_from(cells)
    nonzero = [{"source": c["source"], "target": c["target"], "n": c["n"], "dim": c["dim"]}
               for c in cells if c["dim"] and c["n"] != 0]
    conclusive = all(c["confidence"] == CONCLUSIVE for c in cells)
    return GridReport(C.name, G.compact(), verdict, cells, conclusive,
                      time.perf_counter() - start, nonzero)


# -- half-plane vanishing for S ----------------------------------------------------------


def in_region_a(d: int, n: int, i: int) -> bool:
    return n > 0 and d * n + (d - 1) * i > 0


def in_region_b(d: int, n: int, i: int) -> bool:
    return n < d - 1 and d * n + (d - 1) * i < 0


def verify_prop_SS(G: WeightGroup, d: int | None = None, n_range=None, i_range=None,
                   engine: ExtEngine | None = None) -> dict:
    """Grid of dim lhom(S, S(i)[n]) with S the sum of all covariant modules."""
    _check_d(G, d)
    start = time.perf_counter()
    engine = engine or ExtEngine(G)
    d = G.d
    n_range = list(range(-4, 5) if n_range is None else n_range)
    i_range = list(range(-8, 9) if i_range is None else i_range)
    mods = [covariant_module(G, c) for c in G.characters()]
    grid = {}
    ok = {}
    for n in n_range:
        for X in mods:
            for Y in mods:
                for i, (dim, good) in engine.shifted_row(X, Y, n, i_range).items():
                    grid[(n, i)] = grid.get((n, i), 0) + dim
                    ok[(n, i)] = ok.get((n, i), True) and good
    violations, inconclusive, observed = [], [], []
    for (n, i), dim in sorted(grid.items()):
        claimed = in_region_a(d, n, i) or in_region_b(d, n, i)
        if claimed and dim:
            violations.append({"n": n, "i": i, "dim": dim})
        if claimed and not ok[(n, i)]:
            inconclusive.append({"n": n, "i": i})
        if dim and not claimed:
            observed.append({"n": n, "i": i, "dim": dim})
    return {
        "group": G.compact(),
        "grid": [{"n": n, "i": i, "dim": v, "confidence": CONCLUSIVE if ok[(n, i)] else LIMITED,
                  "region": "a" if in_region_a(d, n, i) else "b" if in_region_b(d, n, i) else "-"}
                 for (n, i), v in sorted(grid.items())],
        "violations": violations,
        "inconclusive": inconclusive,
        "observed_nonzero": observed,
        "runtime": time.perf_counter() - start,
    }


# -- Hom sequences induced by the Koszul complex ------------------------------------------


def _quotient_rank(images, kc_target, width) -> int:
    base = linalg.rank(kc_target, width) if kc_target else 0
    return linalg.rank(list(kc_target) + list(images), width) - base


def _matmul_right(m, r, wa, E, wb) -> list:
    """Flattened (r x wa) matrix times the wa x wb scalar matrix E."""
    out = [0] * (r * wb)
    for l in range(r):
        for a in range(wa):
            x = m[l * wa + a]
            if x:
                for b, c in E[a]:
                    out[l * wb + b] += x * c
    return out


def _matmul_left(D, ra, rb, m, w) -> list:
    """The ra x rb scalar matrix D times a flattened (rb x w) matrix."""
    out = [0] * (ra * w)
    for l in range(ra):
        for t, c in D[l]:
            for k in range(w):
                x = m[t * w + k]
                if x:
                    out[l * w + k] += c * x
    return out


def _sparse_rows(phi) -> list:
    return [phi.entries.get(k, []) for k in range(len(phi.source))]


def verify_koszul_hom_exactness(G: WeightGroup, d: int | None = None, i_range=None,
                                window=None, engine: ExtEngine | None = None) -> dict:
    """Exactness of Hom^Z(S(i), K_.) and Hom^Z(K_., S(i)) for K_. the Koszul complex.

    For (a) the sequence runs H_d -> ... -> H_0 with H_p = Hom^Z(S(i), S (x) Lambda^p V)
    and should be exact except that the last map may fail to be onto when i = 0.
    For (b) it runs H'_0 -> ... -> H'_d with H'_p = Hom^Z(S (x) Lambda^p V, S(i)),
    exact except possibly at the last map when i = -d.
    """
    _check_d(G, d)
    engine = engine or ExtEngine(G)
    d = G.d
    if i_range is None:
        i_range = range(-2 * d, 2 * d + 1)
    chars = G.characters()
    cov = {c: covariant_module(G, c) for c in chars}
    terms = {(p, c): FullModule(koszul_ambient(G, p, c), offset=0, name=f"K{p}[{G.label(c)}]")
             for p in range(d + 1) for c in chars}
    maps = {(p, c): _sparse_rows(koszul_map(G, p, c)) for p in range(1, d + 1) for c in chars}
    width = {p: comb(d, p) for p in range(d + 1)}
    report = {"group": G.compact(), "a": [], "b": []}
    for i in i_range:
        defects_a, coker_a = 0, 0
        defects_b, coker_b = 0, 0
        for c in chars:
            for c2 in chars:
                X = cov[c]
                weight = G.sub(c2, c)
                # (a): maps S_c(i) -> K_p[c2]; shift tau has |tau| = -i
                for tau in engine._taus(engine.generators(X), terms[(0, c2)], -i, weight):
                    spaces = {p: engine.hom_space(X, terms[(p, c2)], tau) for p in range(d + 1)}
                    dims, ranks = {}, {d + 1: 0}
                    for p in range(d + 1):
                        adm, kc, r, _w = spaces[p]
                        dims[p] = len(adm) - len(kc)
                    for p in range(1, d + 1):
                        adm, _kc, r, _w = spaces[p]
                        kc_t = spaces[p - 1][1]
                        imgs = [_matmul_right(m, r, width[p], maps[(p, c2)], width[p - 1]) for m in adm]
                        ranks[p] = _quotient_rank(imgs, kc_t, r * width[p - 1])
                    for p in range(1, d + 1):
                        defects_a += dims[p] - ranks[p] - ranks[p + 1]
                    coker_a += dims[0] - ranks[1]
                # (b): maps K_p[c2] -> S_c(i); |tau| = i
                Y = cov[c]
                weight_b = G.sub(c, c2)
                taus = set()
                for p in range(d + 1):
                    taus.update(engine._taus(engine.generators(terms[(p, c2)]), Y, i, weight_b))
                for tau in sorted(taus):
                    spaces = {p: engine.hom_space(terms[(p, c2)], Y, tau) for p in range(d + 1)}
                    dims, ranks = {}, {-1: 0, d: 0}
                    for p in range(d + 1):
                        adm, kc, r, _w = spaces[p]
                        dims[p] = len(adm) - len(kc)
                    for p in range(d):
                        # precompose with delta_{p+1}: Hom(K_p, S) -> Hom(K_{p+1}, S)
                        adm, _kc, r, w = spaces[p]
                        kc_t = spaces[p + 1][1]
                        imgs = [_matmul_left(maps[(p + 1, c2)], width[p + 1], r, m, w) for m in adm]
                        ranks[p] = _quotient_rank(imgs, kc_t, width[p + 1] * w)
                    for p in range(d):
                        defects_b += dims[p] - ranks[p] - ranks[p - 1]
                    coker_b += dims[d] - ranks[d - 1]
        report["a"].append({"i": i, "exactness_defect": defects_a, "cokernel": coker_a,
                            "surjective": coker_a == 0})
        report["b"].append({"i": i, "exactness_defect": defects_b, "cokernel": coker_b,
                            "surjective": coker_b == 0})
    exact = all(r["exactness_defect"] == 0 for r in report["a"] + report["b"])
    fail_a = sorted(r["i"] for r in report["a"] if not r["surjective"])
    fail_b = sorted(r["i"] for r in report["b"] if not r["surjective"])
    report["exact"] = exact
    report["non_surjective_a"] = fail_a
    report["non_surjective_b"] = fail_b
    report["passed"] = exact and set(fail_a) <= {0} and set(fail_b) <= {-d}
    return report


# -- endomorphism reconciliation --------------------------------------------------------


def _algebra_counts(A) -> dict:
    out = {}
    for b in A.basis:
        out[(b.source, b.target)] = out.get((b.source, b.target), 0) + 1
    return out


def cross_check_endomorphisms(G: WeightGroup, d: int | None = None, engine: ExtEngine | None = None,
                              raise_on_mismatch: bool = False) -> dict:
    """Hom dimensions from the resolution pipeline against the algebra constructions.

    (1) Hom^Z(S_a(p), S_b(q)) against monomial counts of degree q - p and
        character b - a.
    (2) Hom^Z(U[q,j], U[p,i]) over all characters against basis elements of
        the exterior skew algebra with source (q, j) and target (p, i).
    (3) stable Hom^Z(U[q,j], U[p,i]) over nonzero characters against the
        corner algebra.
    """
    _check_d(G, d)
    engine = engine or ExtEngine(G)
    d = G.d
    mismatches = []

    T = build_T(G)
    cells_t = []
    shifts = {label: p for p in range(d) for label in [f"S[{G.label(c)}]({p})" for c in G.characters()]}
    chars = {f"S[{G.label(c)}]({p})": c for p in range(d) for c in G.characters()}
    for (la, A), (lb, B) in itertools.product(T.summands, T.summands):
        got, ok = engine.ext_row(A, B, 0, [0])[0]
        deg = shifts[lb] - shifts[la]
        want = count_monomials(G, deg, G.sub(chars[lb], chars[la])) if deg >= 0 else 0
        cells_t.append({"source": la, "target": lb, "pipeline": got, "oracle": want,
                        "confidence": CONCLUSIVE if ok else LIMITED})
        if got != want:
            mismatches.append(("T", la, lb, got, want))

    Ut = build_Utilde(G)
    E = build_skew_ext(G)
    counts = _algebra_counts(E)
    vertex = {}
    for p in range(1, d + 1):
        for c in G.characters():
            vertex[f"U[{p},{G.label(c)}]"] = (p, G.label(c))
    cells_u = []
    for (la, A), (lb, B) in itertools.product(Ut.summands, Ut.summands):
        got, ok = engine.ext_row(A, B, 0, [0])[0]
        want = counts.get((vertex[la], vertex[lb]), 0)
        cells_u.append({"source": la, "target": lb, "pipeline": got, "oracle": want,
                        "confidence": CONCLUSIVE if ok else LIMITED})
        if got != want:
            mismatches.append(("Utilde", la, lb, got, want))

    U = build_U(G)
    Ecorner = corner(E, nonzero_characters(G))
    ccounts = _algebra_counts(Ecorner)
    cells_s = []
    for (la, A), (lb, B) in itertools.product(U.summands, U.summands):
        if la == "R" or lb == "R":
            continue
        got, ok = engine.stable_row(A, B, [0])[0]
        want = ccounts.get((vertex[la], vertex[lb]), 0)
        cells_s.append({"source": la, "target": lb, "pipeline": got, "oracle": want,
                        "confidence": CONCLUSIVE if ok else LIMITED})
        if got != want:
            mismatches.append(("U_stable", la, lb, got, want))

    report = {
        "group": G.compact(),
        "T": cells_t,
        "Utilde": cells_u,
        "U_stable": cells_s,
        "U_stable_total": sum(c["pipeline"] for c in cells_s),
        "mismatches": mismatches,
    }
    if mismatches and raise_on_mismatch:
        raise MismatchReport(f"{len(mismatches)} discrepant cells", mismatches)
    return report
