"""Minimal multigraded free resolutions over the invariant ring.

Step s keeps the free module F_s (an ambient whose generators sit at the
multidegrees of the chosen minimal generators), the map d_s from F_s onto
the syzygy K_s, and K_s itself.  K_0 is the module being resolved and
K_{s+1} is the kernel of d_s.  Generators are found degree by degree: at a
multidegree gamma the new generators span a complement of
``sum_h x^h K_{gamma-h}`` in ``K_gamma``, h running over the monomial
generators of R.
"""

from __future__ import annotations

from collections import Counter

from quotsing import linalg
from quotsing.errors import WindowInsufficient
from quotsing.monomials import generator_degree_bound, invariant_generators
from quotsing.resolve.modules import (
    Ambient,
    GradedModule,
    KernelModule,
    MaximalIdealModule,
    MonomialMap,
    ResidueField,
    embed,
    vsub,
)


def default_margin(G) -> int:
    return 2 * generator_degree_bound(G)


def default_degree_cap(G) -> int:
    return 3 * G.d * max(G.invariant_factors, default=1)


class Resolution:
    def __init__(self, M, margin: int | None = None, cap: int | None = None):
        G = M.G
        self.G = G
        self.M = M
        self.margin = default_margin(G) if margin is None else margin
        self.cap = default_degree_cap(G) if cap is None else cap
        self.hilbert_basis = invariant_generators(G)
        self.free = []
        self.maps = []
        self.syz = []
        self.done = []
        self.last_gen = []
        if isinstance(M, ResidueField):
            F0 = Ambient(G, [(0,) * G.d], G.zero, name="F0")
            self.free.append(F0)
            self.maps.append(None)
            self.syz.append(None)
            self.done.append(10**9)
            self.last_gen.append(0)
            self._open_step(MaximalIdealModule(F0, offset=0, name="m"))
        else:
            self._open_step(M)

    # -- bookkeeping -------------------------------------------------------

    @property
    def offset(self) -> int:
        return self.M.offset

    def _open_step(self, K):
        s = len(self.free)
        target = K.ambient
        F = Ambient(self.G, [], target.coset, name=f"F{s}")
        self.free.append(F)
        self.maps.append(MonomialMap(F, target))
        self.syz.append(K)
        low = target.lower_corner()
        start = (sum(low) + K.offset) if low is not None else 0
        self.done.append(start - 1)
        self.last_gen.append(None)

    def _ensure_open(self, s: int):
        while len(self.free) <= s:
            prev = len(self.free) - 1
            K = KernelModule(self.maps[prev], offset=self.offset, name=f"K{prev + 1}")
            self._open_step(K)

    def generators(self, s: int) -> list:
        self._ensure_open(s)
        return self.free[s].sigmas

    # -- generator search --------------------------------------------------

    def ensure(self, s: int, n: int):
        """Make the generators of F_s complete through coarse degree n."""
        if n > self.cap:
            n = self.cap
        self._ensure_open(s)
        if self.done[s] >= n:
            return
        if s > 0 and self.syz[s - 1] is not None or (s > 0 and self.maps[s - 1] is not None):
            self.ensure(s - 1, n)
        for t in range(self.done[s] + 1, n + 1):
            self._generators_in_degree(s, t)
            self.done[s] = t

    def ensure_complete(self, s: int) -> bool:
        """Extend step s until ``margin`` degrees pass without a new generator.

        Returns True when that happened below the degree cap.
        """
        self._ensure_open(s)
        while True:
            if self.conclusive(s):
                return True
            if self.done[s] >= self.cap:
                return False
            last = self.last_gen[s]
            base = self.done[s] if last is None else max(self.done[s], last)
            self.ensure(s, min(self.cap, base + self.margin))

    def conclusive(self, s: int) -> bool:
        self._ensure_open(s)
        if self.syz[s] is None:
            return True
        last = self.last_gen[s]
        if last is None:
            # nothing found yet: conclusive once the margin is covered past the start
            low = self.syz[s].ambient.lower_corner()
            if low is None:
                return True
            start = sum(low) + self.syz[s].offset
            return self.done[s] >= start + self.margin and self._previous_conclusive(s)
        return self.done[s] >= last + self.margin and self._previous_conclusive(s)

    def _previous_conclusive(self, s: int) -> bool:
        return s == 0 or self.syz[s - 1] is None or self.conclusive(s - 1)

    def _generators_in_degree(self, s: int, t: int):
        K = self.syz[s]
        if K.ambient.lower_corner() is None:
            return
        F = self.free[s]
        d_s = self.maps[s]
        amb = K.ambient
        new = []
        for gamma in K.multidegrees(t):
            piece = K.piece(gamma)
            if not piece:
                continue
            here = amb.coords(gamma)
            lower = []
            for h in self.hilbert_basis:
                below = vsub(gamma, h)
                for v in K.piece(below):
                    lower.append(embed(v, amb.coords(below), here))
            if lower and linalg.rank(lower, len(here)) == len(piece):
                continue
            picked = [p - len(lower) for p in linalg.pivot_rows(lower + piece, len(here)) if p >= len(lower)]
            for p in picked:
                new.append((gamma, piece[p]))
        if not new:
            return
        start = len(F)
        F.append([g for g, _ in new])
        for off, (gamma, vec) in enumerate(new):
            here = amb.coords(gamma)
            d_s.set_row(start + off, [(here[t2], x) for t2, x in enumerate(vec) if x])
        self.last_gen[s] = t

    # -- reporting ---------------------------------------------------------

    def coarse_degree(self, sigma) -> int:
        return sum(sigma) + self.offset

    def betti(self, s: int) -> Counter:
        return Counter(self.coarse_degree(g) for g in self.generators(s))

    def betti_table(self, s_max: int) -> list:
        return [dict(sorted(self.betti(s).items())) for s in range(s_max + 1)]

    def truncation_flags(self, s_max: int) -> list:
        return [self.conclusive(s) for s in range(s_max + 1)]

    def differential(self, s: int) -> MonomialMap:
        """d_s : F_s -> F_{s-1} (for s = 0, F_0 -> ambient of the module)."""
        self._ensure_open(s)
        return self.maps[s]


def minimal_resolution(M: GradedModule, s_max: int, window: int | None = None,
                       margin: int | None = None, strict: bool = False) -> Resolution:
    """Resolve M through homological degree s_max.

    Every step is extended until ``margin`` degrees pass without a new
    generator or the degree cap ``window`` is reached; ``strict`` turns the
    latter into WindowInsufficient.
    """
    res = Resolution(M, margin=margin, cap=window)
    for s in range(s_max + 1):
        ok = res.ensure_complete(s)
        if strict and not ok:
            raise WindowInsufficient(f"step {s} not conclusive within degree {res.cap}")
    return res
