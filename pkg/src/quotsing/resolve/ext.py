"""Graded Ext, stable Hom and shifted stable Hom over the invariant ring.

Conventions.  A map of multidegree ``tau`` sends the piece of X at gamma to
the piece of Y at gamma + tau; it has coarse degree
``|tau| + offset(Y) - offset(X)``, so Hom^Z(X, Y(i)) collects the tau with
that number equal to i and character ``char(Y) - char(X)``.

Three routes compute dim Ext^n(X, Y(i))_0:

``direct``
    Cohomology of Hom(F_., Y).  Every target here is torsion free, so a map
    phi: F_n -> Y kills the syzygy K_{n+1} = ker d_n exactly when it does so
    after tensoring with the fraction field.  In the basis x^(-beta_g) e_g
    the differential d_n becomes the scalar coefficient matrix C_n and the
    cocycle condition becomes linear in the values of phi.  Only F_{n-1} and
    F_n are needed.

``duality``
    For Y maximal Cohen-Macaulay over an isolated singularity,
    Ext^(d+m)(X, Y) is dual to Tor_m(X, Y^v) for m >= 1 and Ext^d(X, Y) is
    dual to the torsion of X (x) Y^v, where Y^v = Hom(Y, omega) and omega is
    the ideal of monomials with every exponent positive.  Tor is local in
    degree, so only low-degree generators of deep syzygies are touched.

``stable``
    For n = 0, Hom^Z(X, Y(i)) modulo maps factoring through the projective
    cover of Y.  Negative n goes through the Serre rule
    (X, Y)^n_i = (Y, X)^(d-1-n)_(-d-i).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from quotsing import linalg
from quotsing.errors import NotMCM, WindowInsufficient
from quotsing.resolve.modules import (
    Ambient,
    FullModule,
    KernelModule,
    MonomialMap,
    ResidueField,
    TwistedModule,
    _compositions,
    vadd,
    vsub,
)
from quotsing.resolve.resolution import Resolution
from quotsing.weights import acts_freely_off_origin

CONCLUSIVE = "conclusive"
LIMITED = "window-limited"


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("QUOTSING_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ExtTable:
    """(n, i) -> dimension, with a confidence flag and the route used per cell."""

    source: str = ""
    target: str = ""
    entries: dict = field(default_factory=dict)
    confidence: dict = field(default_factory=dict)
    method: dict = field(default_factory=dict)

    def set(self, n: int, i: int, dim: int, conclusive: bool, method: str):
        self.entries[(n, i)] = dim
        self.confidence[(n, i)] = CONCLUSIVE if conclusive else LIMITED
        self.method[(n, i)] = method

    def __getitem__(self, key):
        return self.entries[key]

    def conclusive(self) -> bool:
        return all(v == CONCLUSIVE for v in self.confidence.values())

    def nonzero(self) -> list:
        return sorted(k for k, v in self.entries.items() if v)

    def row(self, n: int) -> dict:
        return {i: v for (m, i), v in sorted(self.entries.items()) if m == n}

    def to_dict(self) -> dict:
        cells = [
            {"n": n, "i": i, "dim": self.entries[(n, i)],
             "confidence": self.confidence[(n, i)], "method": self.method[(n, i)]}
            for n, i in sorted(self.entries)
        ]
        return {"source": self.source, "target": self.target, "cells": cells,
                "conclusive": self.conclusive()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _unwrap(M):
    """(untwisted module, offset of M) so resolutions are shared across twists."""
    base = M
    while isinstance(base, TwistedModule):
        base = base.base
    return base, M.offset


def _full(vec, coords) -> dict:
    return {k: x for k, x in zip(coords, vec) if x}


def _scalar_rows(phi: MonomialMap) -> list:
    ncols = len(phi.target)
    rows = []
    for k in range(len(phi.source)):
        row = [0] * ncols
        for l, c in phi.entries.get(k, ()):
            row[l] += c
        rows.append(row)
    return rows


def _project(vectors, support) -> list:
    if not vectors or not support:
        return []
    rows = [[v[g] for g in support] for v in vectors]
    return linalg.row_basis(rows, len(support))


def _condition_rank(basis, annihilators, support_pos, width_of) -> int:
    """Rank of phi -> (sum_g u_g phi_g[k]) over annihilators u and ambient slots k.

    ``basis`` lists (g, {k: x}) pairs; ``annihilators`` are vectors indexed by
    position in the support; ``width_of`` maps an ambient slot to a column.
    """
    if not basis or not annihilators:
        return 0
    width = len(width_of)
    ncols = len(annihilators) * width
    rows = []
    for g, vals in basis:
        p = support_pos[g]
        row = [0] * ncols
        for a, u in enumerate(annihilators):
            ug = u[p]
            if ug:
                base = a * width
                for k, x in vals.items():
                    row[base + width_of[k]] += ug * x
        rows.append(row)
    return linalg.rank(rows, ncols)


class ExtEngine:
    """Caches resolutions and dual modules; computes Ext tables cell by cell."""

    def __init__(self, G, margin: int | None = None, cap: int | None = None):
        self.G = G
        self.margin = margin
        self.cap = cap
        self._res = {}
        self._duals = {}
        self._annihilators = {}
        self.duality_ok = acts_freely_off_origin(G)
        self._alive = {}
        self._covers = {}

    def _keep(self, M):
        """Untwisted module, pinned so cache keys built from its id stay valid."""
        base, _ = _unwrap(M)
        self._alive.setdefault(id(base), base)
        return base

    def _cover(self, Y):
        base = self._keep(Y)
        hit = self._covers.get(id(base))
        if hit is None:
            hit = FullModule(self.resolution(base).free[0], offset=base.offset, name=f"P0({base.name})")
            self._covers[id(base)] = hit
            self._keep(hit)
        return hit

    # -- caches ------------------------------------------------------------

    def resolution(self, M) -> Resolution:
        base, _ = _unwrap(M)
        hit = self._res.get(id(base))
        if hit is None:
            hit = (base, Resolution(base, margin=self.margin, cap=self.cap))
            self._res[id(base)] = hit
        return hit[1]

    def complete(self, M, s: int) -> bool:
        res = self.resolution(M)
        ok = True
        for t in range(s + 1):
            ok = res.ensure_complete(t) and ok
        return ok and res.conclusive(s)

    def dual(self, Y):
        """Hom(Y, omega) as the kernel of the transposed first differential."""
        base, _ = _unwrap(Y)
        hit = self._duals.get(id(base))
        if hit is not None:
            return hit[1], hit[2]
        ok = self.complete(base, 1)
        res = self.resolution(base)
        one = (1,) * self.G.d
        coset = self.G.neg(base.character)
        F0, F1 = res.free[0], res.free[1]
        A0 = Ambient(self.G, [vsub(one, b) for b in F0.sigmas], coset, name=f"{base.name}^v")
        A1 = Ambient(self.G, [vsub(one, b) for b in F1.sigmas], coset, name=f"{base.name}^v1")
        phi = MonomialMap(A0, A1, res.maps[1].transposed())
        Z = KernelModule(phi, offset=-base.offset, name=f"{base.name}^v")
        self._duals[id(base)] = (base, Z, ok)
        return Z, ok

    def _torsion_annihilators(self, M) -> list:
        """Basis of {u in Q^{F_0} : C_1 u = 0}; torsion in degree 0 is cut out by these."""
        base, _ = _unwrap(M)
        key = (id(base), "torsion")
        hit = self._annihilators.get(key)
        if hit is None:
            res = self.resolution(base)
            rows = _scalar_rows(res.maps[1])
            ncols = len(res.free[0])
            if rows:
                cols = [[rows[r][c] for r in range(len(rows))] for c in range(ncols)]
                hit = linalg.left_kernel(cols, len(rows))
            else:
                hit = [[1 if a == b else 0 for a in range(ncols)] for b in range(ncols)]
            self._annihilators[key] = hit
        return hit

    # -- multidegree bookkeeping --------------------------------------------

    def generators(self, M) -> list:
        """Multidegrees of the minimal generators of M."""
        self.complete(M, 0)
        return self.resolution(M).free[0].sigmas

    def _taus(self, betas, Y, total: int, weight) -> list:
        """Shifts tau with |tau| = total and given character such that some Y_{beta+tau} may be nonzero."""
        low = Y.ambient.lower_corner()
        if low is None or not betas:
            return []
        top = tuple(max(b[j] for b in betas) for j in range(self.G.d))
        corner = vsub(low, top)
        n = total - sum(corner)
        out = []
        for alpha in _compositions(self.G.d, n):
            tau = vadd(corner, alpha)
            if self.G.weight(tau) == weight:
                out.append(tau)
        return out

    def _gammas(self, betas, Z, total: int, weight) -> list:
        low = Z.ambient.lower_corner()
        if low is None or not betas:
            return []
        bottom = tuple(min(b[j] for b in betas) for j in range(self.G.d))
        corner = vadd(low, bottom)
        n = total - sum(corner)
        out = []
        for alpha in _compositions(self.G.d, n):
            gamma = vadd(corner, alpha)
            if self.G.weight(gamma) == weight:
                out.append(gamma)
        return out

    # -- direct route ----------------------------------------------------------
    #
    # A cocycle phi in Hom(F_n, Y)_tau has values C_n M for a scalar matrix M
    # with one row per generator of F_{n-1} (per ambient slot of X when n = 0)
    # and one column per ambient slot of Y.  Such an M is admissible when every
    # value C_n[g] M lies in the piece of Y at beta_g + tau.  Admissible M form
    # N_tau, the M with C_n M = 0 form Kc, and Hom(F_{n-1}, Y)_tau sits inside
    # N_tau as the maps that are coboundaries after composing with d_n.
    # Matrices M are flattened row-major: entry (l, k) sits at l * width + k.

    def _scalar(self, M, n: int) -> dict:
        """Coefficient matrix C_n of d_n with its nullspace, cached per module and step."""
        base, _ = _unwrap(M)
        key = (id(base), "scalar", n)
        hit = self._annihilators.get(key)
        if hit is None:
            res = self.resolution(base)
            phi = res.maps[n]
            ncols = len(phi.target)
            dense = _scalar_rows(phi)
            if dense:
                cols = [[dense[r][c] for r in range(len(dense))] for c in range(ncols)]
                null = linalg.left_kernel(cols, len(dense))
            else:
                null = [[1 if a == b else 0 for a in range(ncols)] for b in range(ncols)]
            hit = {
                "sparse": [phi.entries.get(g, []) for g in range(len(phi.source))],
                "ncols": ncols,
                "null": null,
                "C": np.array(dense, dtype=np.int64).reshape(len(dense), ncols),
                "betas": np.array(phi.source.sigmas, dtype=np.int64).reshape(len(dense), self.G.d),
            }
            # equal coefficient rows share an id, so duplicate conditions can be skipped
            ids = {}
            hit["row_ids"] = [ids.setdefault(tuple(row), len(ids)) for row in dense]
            first = {}
            for g, i in enumerate(hit["row_ids"]):
                first.setdefault(i, g)
            hit["rep"] = first
            hit["ranks"] = {}
            self._annihilators[key] = hit
        return hit

    def _slot_mask(self, betas, Y, tau):
        """Boolean (generators x ambient slots of Y): slot k present at beta_g + tau."""
        sig = np.array(Y.ambient.sigmas, dtype=np.int64).reshape(len(Y.ambient), self.G.d)
        shifted = betas + np.array(tau, dtype=np.int64)
        return (shifted[:, None, :] >= sig[None, :, :]).all(axis=2)

    def _piece_annihilator(self, Y, mu) -> list:
        """Vectors over all ambient slots of Y orthogonal to the piece at mu."""
        base = self._keep(Y)
        key = (id(base), "ann", mu)
        hit = self._annihilators.get(key)
        if hit is None:
            K = len(base.ambient)
            coords = base.ambient.coords(mu)
            piece = base.piece(mu) if coords else []
            if getattr(base, "kind", "") == "full" or len(piece) == len(coords):
                inside = set(coords)
                hit = [[1 if t == k else 0 for t in range(K)] for k in range(K) if k not in inside]
            else:
                full = []
                for v in piece:
                    row = [0] * K
                    for k, x in zip(coords, v):
                        row[k] = x
                    full.append(row)
                cols = [[r[k] for r in full] for k in range(K)]
                hit = linalg.left_kernel(cols, len(full)) if full else \
                    [[1 if t == k else 0 for t in range(K)] for k in range(K)]
            self._annihilators[key] = hit
        return hit

    @staticmethod
    def _distinct(data, selected):
        """Distinct row ids of C at the selected generators."""
        row_ids = data["row_ids"]
        return frozenset(row_ids[g] for g in np.nonzero(selected)[0])

    @staticmethod
    def _rows_rank(data, ids) -> int:
        """Rank of the C rows with these ids; many slots and degrees repeat a set."""
        if not ids:
            return 0
        ranks = data["ranks"]
        if ids not in ranks:
            rep = data["rep"]
            ranks[ids] = linalg.gram_rank(data["C"][sorted(rep[i] for i in ids)])
        return ranks[ids]

    def _piece_annihilator_array(self, Y, mu):
        """The annihilator as an int64 array (None when empty), cached alongside the list."""
        base = self._keep(Y)
        key = (id(base), "ann_np", mu)
        if key not in self._annihilators:
            ann = self._piece_annihilator(base, mu)
            self._annihilators[key] = np.array(ann, dtype=np.int64) if ann else None
        return self._annihilators[key]

    def _is_full(self, Y) -> bool:
        return getattr(self._keep(Y), "kind", "") == "full"

    def _admissible_rank(self, data, Y, tau, mask=None) -> int:
        """Rank of the linear conditions cutting N_tau out of the scalar matrices."""
        C, betas = data["C"], data["betas"]
        if C.shape[0] == 0:
            return 0
        width = len(Y.ambient)
        if mask is None:
            mask = self._slot_mask(betas, Y, tau)
        if self._is_full(Y):
            # conditions split by slot: C_n[g] M[:, k] = 0 wherever slot k is absent
            return sum(self._rows_rank(data, self._distinct(data, ~mask[:, k])) for k in range(width))
        # generators sharing an annihilator contribute (distinct C rows) (x) annihilator
        groups = {}
        absent = ~mask.any(axis=1)
        eye = np.eye(width, dtype=np.int64)
        row_ids = data["row_ids"]
        for g in range(C.shape[0]):
            if absent[g]:
                key, ann = "absent", eye
            else:
                ann = self._piece_annihilator_array(Y, vadd(tuple(int(x) for x in betas[g]), tau))
                if ann is None:
                    continue
                key = ann.tobytes() + bytes(ann.shape)
            entry = groups.get(key)
            if entry is None:
                entry = groups[key] = (ann, set())
            entry[1].add(row_ids[g])
        if not groups:
            return 0
        entries = list(groups.values())
        split = self._adapted(tuple(groups), [ann for ann, _ in entries], width)
        if split is None:
            rep = data["rep"]
            parts = [np.kron(C[sorted(rep[i] for i in ids)], ann) for ann, ids in entries]
            return linalg.gram_rank(np.vstack(parts))
        # in a basis adapted to every annihilator the conditions split by basis vector
        total = 0
        for k in range(width):
            ids = set()
            for (_, group_ids), members in zip(entries, split):
                if k in members:
                    ids |= group_ids
            total += self._rows_rank(data, frozenset(ids))
        return total

    def _adapted(self, key, anns, width):
        """Per annihilator, the adapted-basis indices spanning it (None if no such basis)."""
        cache = self._annihilators
        full_key = ("adapted", key)
        if full_key not in cache:
            found = linalg.adapted_basis([a.tolist() for a in anns], width)
            cache[full_key] = None if found is None else [set(m) for m in found[1]]
        return cache[full_key]

    @staticmethod
    def _kc_rows(null, width) -> list:
        r = len(null[0]) if null else 0
        out = []
        for u in null:
            for k in range(width):
                row = [0] * (r * width)
                for l, x in enumerate(u):
                    if x:
                        row[l * width + k] = x
                out.append(row)
        return out

    def _direct_cell(self, X, Y, n: int, tau) -> int:
        if n == 0 and isinstance(_unwrap(X)[0], ResidueField):
            return 0
        data = self._scalar(X, n)
        mask = self._slot_mask(data["betas"], Y, tau)
        if not mask.any():
            return 0
        width = len(Y.ambient)
        unknowns = data["ncols"] * width
        kc = self._kc_rows(data["null"], width)
        if n > 0:
            prev_betas = self.resolution(X).free[n - 1].sigmas
            cob = self._coboundary_rows(prev_betas, Y, tau, width, unknowns)
            if len(cob) == unknowns:
                return 0
        dim_n = unknowns - self._admissible_rank(data, Y, tau, mask)
        if n == 0:
            return dim_n - len(kc)
        stack = kc + cob
        if not stack:
            return dim_n
        return dim_n - linalg.gram_rank(np.array(stack, dtype=np.int64))

    def _coboundary_rows(self, prev_betas, Y, tau, width, unknowns) -> list:
        """Hom(F_{n-1}, Y)_tau as flattened scalar matrices."""
        rows = []
        for h, b in enumerate(prev_betas):
            mu = vadd(b, tau)
            coords = Y.ambient.coords(mu)
            if not coords:
                continue
            for v in Y.piece(mu):
                row = [0] * unknowns
                for k, x in zip(coords, v):
                    row[h * width + k] = x
                rows.append(row)
        return rows

    def _admissible_dim(self, X, Y, n: int, tau) -> tuple:
        """(dim N_tau, unknown count, Kc rows) for cocycles F_n -> Y of shift tau."""
        data = self._scalar(X, n)
        width = len(Y.ambient)
        unknowns = data["ncols"] * width
        return unknowns - self._admissible_rank(data, Y, tau), unknowns, \
            self._kc_rows(data["null"], width)

    def hom_space(self, X, Y, tau) -> tuple:
        """Bases of N_tau and Kc for Hom(X, Y)_tau, as flattened scalar matrices.

        Hom(X, Y)_tau is N_tau / Kc; each row reshapes to an
        (ambient slots of X) x (ambient slots of Y) matrix.
        """
        self.complete(X, 0)
        data = self._scalar(X, 0)
        r = data["ncols"]
        width = len(Y.ambient)
        rows = []
        for g, b in enumerate(self.resolution(X).free[0].sigmas):
            for q in self._piece_annihilator(Y, vadd(b, tau)):
                row = [0] * (r * width)
                for l, c in data["sparse"][g]:
                    for k, x in enumerate(q):
                        if x:
                            row[l * width + k] += c * x
                rows.append(row)
        unknowns = r * width
        if rows:
            admissible = linalg.left_kernel([[row[t] for row in rows] for t in range(unknowns)], len(rows))
        else:
            admissible = [[1 if a == b else 0 for a in range(unknowns)] for b in range(unknowns)]
        return admissible, self._kc_rows(data["null"], width), r, width

    def _hom_into_cover(self, X, Y, tau):
        """dim of (image of Hom(X, P_0(Y))_tau in scalar form) + Kc."""
        P = self._cover(Y)
        admissible, _kc, r, width_p = self.hom_space(X, P, tau)
        sparse_y = self._scalar(Y, 0)["sparse"]
        width = len(Y.ambient)
        pushed = list(self._kc_rows(self._scalar(X, 0)["null"], width))
        for m in admissible:
            row = [0] * (r * width)
            for l in range(r):
                for p in range(width_p):
                    x = m[l * width_p + p]
                    if x:
                        for k, c in sparse_y[p]:
                            row[l * width + k] += x * c
            pushed.append(row)
        return linalg.rank(pushed, r * width)

    # -- duality route -----------------------------------------------------------

    def _tor_cell(self, X, Z, m: int, gamma) -> int:
        """dim of Tor_m(X, Z)_gamma for m >= 1, or of the torsion of X (x) Z for m = 0."""
        res = self.resolution(X)

        def chain_basis(s):
            out = []
            for g, b in enumerate(res.free[s].sigmas):
                mu = vsub(gamma, b)
                coords = Z.ambient.coords(mu)
                if not coords:
                    continue
                for v in Z.piece(mu):
                    out.append((g, mu, _full(v, coords)))
            return out

        def boundary_rank(s, basis_s):
            """Rank of the boundary out of chain degree s (into chain degree s-1)."""
            if not basis_s:
                return 0
            d_s = res.maps[s]
            cols = {}
            rows = []
            for g, mu, vals in basis_s:
                row = {}
                for h, c in d_s.entries.get(g, ()):
                    for k, x in vals.items():
                        key = (h, k)
                        if key not in cols:
                            cols[key] = len(cols)
                        row[cols[key]] = row.get(cols[key], 0) + c * x
                rows.append(row)
            dense = [[r.get(t, 0) for t in range(len(cols))] for r in rows]
            return linalg.rank(dense, len(cols))

        here = chain_basis(m)
        if not here:
            return 0
        above = chain_basis(m + 1)
        if m >= 1:
            cycles = len(here) - boundary_rank(m, here)
        else:
            support = sorted({g for g, _, _ in here})
            pos = {g: p for p, g in enumerate(support)}
            slots = sorted({k for _, _, vals in here for k in vals})
            width_of = {k: t for t, k in enumerate(slots)}
            ann = _project(self._torsion_annihilators(X), support)
            cycles = len(here) - _condition_rank([(g, vals) for g, _, vals in here], ann, pos, width_of)
        if cycles == 0:
            return 0
        return cycles - boundary_rank(m + 1, above)

    # -- public cell API ---------------------------------------------------------

    def route(self, X, Y, n: int, method: str = "auto") -> str:
        if method != "auto":
            return method
        if n == 0:
            return "direct"
        if n >= self.G.d and self.duality_ok and getattr(Y, "mcm", False) \
                and not isinstance(Y, ResidueField):
            return "duality"
        return "direct"

    def ext_row(self, X, Y, n: int, twists, method: str = "auto") -> dict:
        """{i: (dim Ext^n(X, Y(i))_0, conclusive)} for every i in ``twists``."""
        route = self.route(X, Y, n, method)
        if route == "duality":
            return self._ext_row_duality(X, Y, n, twists)
        if route != "direct":
            raise ValueError(f"unknown route {route!r}")
        return self._ext_row_direct(X, Y, n, twists)

    def _ext_row_direct(self, X, Y, n, twists) -> dict:
        ok = self.complete(X, n)
        res = self.resolution(X)
        weight = self.G.sub(Y.character, X.character)
        betas = res.free[n].sigmas
        out = {}
        for i in twists:
            total = i + X.offset - Y.offset
            dim = sum(self._direct_cell(X, Y, n, tau) for tau in self._taus(betas, Y, total, weight))
            out[i] = (dim, ok)
        return out

    def _ext_row_duality(self, X, Y, n, twists) -> dict:
        m = n - self.G.d
        Z, ok_dual = self.dual(Y)
        res = self.resolution(X)
        base, _ = _unwrap(X)
        weight = self.G.sub(X.character, Y.character)
        zlow = Z.ambient.lower_corner()
        if zlow is None:
            return {i: (0, ok_dual) for i in twists}
        ok = ok_dual
        if m == 0:
            ok = self.complete(X, 1) and ok
        totals = {i: -(i + X.offset - Y.offset) for i in twists}
        if m >= 1:
            # generators that can meet Z below the largest multidegree asked for
            reach = max(totals.values()) - sum(zlow) + base.offset
            res.ensure(m + 1, reach)
            if reach > res.cap:
                ok = False
        out = {}
        for i in twists:
            dim = 0
            for gamma in self._gammas(res.free[m].sigmas, Z, totals[i], weight):
                dim += self._tor_cell(X, Z, m, gamma)
            out[i] = (dim, ok)
        return out

    def stable_row(self, X, Y, twists) -> dict:
        """{i: (dim of stable Hom(X, Y(i)), conclusive)}."""
        okX = self.complete(X, 0)
        okY = self.complete(Y, 0)
        res = self.resolution(X)
        weight = self.G.sub(Y.character, X.character)
        betas = res.free[0].sigmas
        out = {}
        for i in twists:
            total = i + X.offset - Y.offset
            dim = 0
            for tau in self._taus(betas, Y, total, weight):
                full = self._direct_cell(X, Y, 0, tau)
                if full:
                    dim_n, _u, _kc = self._admissible_dim(X, Y, 0, tau)
                    dim += dim_n - self._hom_into_cover(X, Y, tau)
            out[i] = (dim, okX and okY)
        return out

    def shifted_row(self, X, Y, n: int, twists, method: str = "auto") -> dict:
        """{i: dim lhom(X, Y(i)[n])}, negative n through the Serre rule."""
        for M in (X, Y):
            if not getattr(M, "mcm", False) or isinstance(M, ResidueField):
                raise NotMCM(f"{M.name} is not maximal Cohen-Macaulay")
        d = self.G.d
        if n > 0:
            return self.ext_row(X, Y, n, twists, method)
        if n == 0:
            return self.stable_row(X, Y, twists)
        dual_twists = [-d - i for i in twists]
        row = self.shifted_row(Y, X, d - 1 - n, dual_twists, method)
        return {i: row[-d - i] for i in twists}


# -- module-level conveniences ---------------------------------------------------------


def _engine_for(X, engine):
    return engine if engine is not None else ExtEngine(X.G)


def ext_dims(X, Y, n_max: int, twists, engine: ExtEngine | None = None,
             method: str = "auto", strict: bool = False) -> ExtTable:
    """Table of dim Ext^n(X, Y(i))_0 for 0 <= n <= n_max and i in ``twists``."""
    engine = _engine_for(X, engine)
    table = ExtTable(source=X.name, target=Y.name)
    for n in range(n_max + 1):
        for i, (dim, ok) in engine.ext_row(X, Y, n, list(twists), method).items():
            table.set(n, i, dim, ok, engine.route(X, Y, n, method))
    if strict and not table.conclusive():
        raise WindowInsufficient("some Ext entries are window-limited")
    return table


def stable_hom(X, Y, twists, engine: ExtEngine | None = None) -> ExtTable:
    engine = _engine_for(X, engine)
    table = ExtTable(source=X.name, target=Y.name)
    for i, (dim, ok) in engine.stable_row(X, Y, list(twists)).items():
        table.set(0, i, dim, ok, "stable")
    return table


def shifted_stable_hom(X, Y, n: int, i: int, engine: ExtEngine | None = None) -> int:
    engine = _engine_for(X, engine)
    dim, _ok = engine.shifted_row(X, Y, n, [i])[i]
    return dim


def stable_grid(X, Y, ns, twists, engine: ExtEngine | None = None) -> ExtTable:
    """dim lhom(X, Y(i)[n]) for n in ``ns`` (any sign) and i in ``twists``."""
    engine = _engine_for(X, engine)
    d = engine.G.d
    table = ExtTable(source=X.name, target=Y.name)
    twists = list(twists)
    for n in ns:
        row = engine.shifted_row(X, Y, n, twists)
        for i, (dim, ok) in row.items():
            if n > 0:
                how = engine.route(X, Y, n)
            elif n == 0:
                how = "stable"
            else:
                how = "serre:" + engine.route(Y, X, d - 1 - n)
            table.set(n, i, dim, ok, how)
    return table


def parallel_map(fn, items):
    """Map honoring QUOTSING_THREADS; order of results follows ``items``."""
    items = list(items)
    workers = min(thread_cap(), len(items)) if items else 1
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
