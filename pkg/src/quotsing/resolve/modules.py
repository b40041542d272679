"""Z^d-graded modules over the invariant ring, presented inside free S-modules.

The invariant ring R is spanned by the monomials of trivial character, so
every module met here is graded by exponent vectors (multidegrees) and not
only by total degree.  A module lives inside an *ambient*: a free S-module
``sum_k S e_k`` with ``e_k`` in multidegree ``sigma_k``, cut down to the
multidegrees of one character.  The ambient piece at ``gamma`` has one
coordinate per ``k`` with ``gamma - sigma_k >= 0`` and multiplication by a
monomial ``x^mu`` just re-indexes coordinates.  A module is described by
its piece at every multidegree, a subspace of the ambient piece given by
integer row vectors.  The coarse (total) degree of multidegree ``gamma`` is
``|gamma| + offset``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from flint import fmpq_mat

from quotsing import linalg
from quotsing.errors import WindowTooLarge
from quotsing.monomials import exponents_of_degree
from quotsing.weights import Character, WeightGroup

MAX_PIECE_DEGREE = 400


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def nonneg(a) -> bool:
    return all(x >= 0 for x in a)


@lru_cache(maxsize=4096)
def _compositions(d: int, n: int) -> tuple:
    if n < 0:
        return ()
    return tuple(exponents_of_degree(d, n))


class Ambient:
    """A free S-module restricted to the multidegrees of one character.

    Generators may be appended (resolutions grow step by step); every
    append bumps ``version`` so dependent caches can be dropped.
    """

    def __init__(self, G: WeightGroup, sigmas, coset: Character, name: str = ""):
        self.G = G
        self.sigmas = [tuple(s) for s in sigmas]
        self.coset = coset
        self.name = name
        self.version = 0
        self._coords = {}

    def append(self, sigmas):
        for s in sigmas:
            self.sigmas.append(tuple(s))
        if sigmas:
            self.version += 1
            self._coords.clear()

    def __len__(self):
        return len(self.sigmas)

    def coords(self, gamma) -> tuple:
        hit = self._coords.get(gamma)
        if hit is None:
            if self.G.weight(gamma) != self.coset:
                hit = ()
            else:
                hit = tuple(k for k, s in enumerate(self.sigmas) if nonneg(vsub(gamma, s)))
            self._coords[gamma] = hit
        return hit

    def lower_corner(self):
        if not self.sigmas:
            return None
        return tuple(min(s[j] for s in self.sigmas) for j in range(self.G.d))

    def multidegrees(self, total: int) -> list:
        """Multidegrees with |gamma| = total where the ambient piece is nonzero."""
        low = self.lower_corner()
        if low is None:
            return []
        n = total - sum(low)
        if n > MAX_PIECE_DEGREE:
            raise WindowTooLarge(f"degree {total} is beyond the enumeration cap")
        out = []
        for alpha in _compositions(self.G.d, n):
            gamma = vadd(low, alpha)
            if self.coords(gamma):
                out.append(gamma)
        return out


def embed(vec, src: tuple, dst: tuple) -> list:
    """Coordinates of ``x^mu * v`` where ``src``/``dst`` are the ambient coordinate tuples."""
    pos = {k: t for t, k in enumerate(dst)}
    out = [0] * len(dst)
    for k, x in zip(src, vec):
        if x:
            out[pos[k]] = x
    return out


class MonomialMap:
    """S-linear map between ambients sending e_k to sum_l c_kl x^(sigma_k - sigma_l) e_l."""

    def __init__(self, source: Ambient, target: Ambient, entries=None):
        if source.coset != target.coset:
            raise ValueError("a monomial map must preserve the character")
        self.source = source
        self.target = target
        self.entries = {}  # k -> list of (l, c)
        for k, terms in (entries or {}).items():
            self.set_row(k, terms)

    def set_row(self, k, terms):
        sk = self.source.sigmas[k]
        clean = []
        for l, c in terms:
            if c == 0:
                continue
            if not nonneg(vsub(sk, self.target.sigmas[l])):
                raise ValueError("monomial map entry needs a negative exponent")
            clean.append((l, int(c)))
        self.entries[k] = clean

    def matrix(self, gamma) -> tuple:
        rows_idx = self.source.coords(gamma)
        cols_idx = self.target.coords(gamma)
        pos = {l: t for t, l in enumerate(cols_idx)}
        rows = []
        for k in rows_idx:
            row = [0] * len(cols_idx)
            for l, c in self.entries.get(k, ()):
                row[pos[l]] += c
            rows.append(row)
        return rows, len(cols_idx)

    def apply(self, vec, gamma) -> list:
        """Image of a source-coordinate vector at gamma, in target coordinates."""
        rows_idx = self.source.coords(gamma)
        cols_idx = self.target.coords(gamma)
        pos = {l: t for t, l in enumerate(cols_idx)}
        out = [0] * len(cols_idx)
        for k, x in zip(rows_idx, vec):
            if x:
                for l, c in self.entries.get(k, ()):
                    out[pos[l]] += x * c
        return out

    def transposed(self) -> dict:
        out = {}
        for k, terms in self.entries.items():
            for l, c in terms:
                out.setdefault(l, []).append((k, c))
        return out


class GradedModule:
    """A submodule of an ambient, given piecewise.

    Subclasses implement ``_compute_piece``.  ``mcm`` records whether the
    module is known to be maximal Cohen-Macaulay.
    """

    kind = "module"

    def __init__(self, ambient: Ambient, offset: int = 0, name: str = "", mcm: bool = True):
        self.ambient = ambient
        self.G = ambient.G
        self.offset = offset
        self.name = name or ambient.name
        self.mcm = mcm
        self._pieces = {}
        self._stamp = None

    @property
    def character(self) -> Character:
        return self.ambient.coset

    def _versions(self):
        return (self.ambient.version,)

    def piece(self, gamma) -> list:
        stamp = self._versions()
        if stamp != self._stamp:
            self._pieces.clear()
            self._stamp = stamp
        hit = self._pieces.get(gamma)
        if hit is None:
            if not self.ambient.coords(gamma):
                hit = []
            else:
                hit = self._compute_piece(gamma)
            self._pieces[gamma] = hit
        return hit

    def _compute_piece(self, gamma) -> list:
        raise NotImplementedError

    def dim(self, gamma) -> int:
        return len(self.piece(gamma))

    def coarse(self, gamma) -> int:
        return sum(gamma) + self.offset

    def multidegrees(self, n: int) -> list:
        """Multidegrees of coarse degree n where the ambient is nonzero."""
        return self.ambient.multidegrees(n - self.offset)

    def hilbert(self, lo: int, hi: int) -> list:
        return [sum(self.dim(g) for g in self.multidegrees(n)) for n in range(lo, hi + 1)]

    def act(self, mu, gamma) -> list:
        """x^mu applied to the basis of the piece at gamma, in ambient coordinates at gamma+mu."""
        src = self.ambient.coords(gamma)
        dst = self.ambient.coords(vadd(gamma, mu))
        return [embed(v, src, dst) for v in self.piece(gamma)]

    def action_matrix(self, mu, gamma) -> list:
        """Matrix of x^mu from the piece basis at gamma to the piece basis at gamma+mu."""
        images = self.act(mu, gamma)
        target = self.piece(vadd(gamma, mu))
        if not images:
            return []
        if not target:
            if any(any(v) for v in images):
                raise ArithmeticError("module is not closed under the action")
            return [[] for _ in images]
        # the target basis has full column rank, so the normal equations are square
        B = fmpq_mat(target).transpose()
        Bt = B.transpose()
        normal = Bt * B
        out = []
        for v in images:
            col = fmpq_mat([[x] for x in v])
            sol = normal.solve(Bt * col)
            if B * sol != col:
                raise ArithmeticError("module is not closed under the action")
            out.append([sol[t, 0] for t in range(len(target))])
        return out

    def twist(self, shift: int) -> "TwistedModule":
        return TwistedModule(self, shift)

    def min_coarse_degree(self, limit: int = 60):
        """Smallest coarse degree with a nonzero piece, searching upward."""
        low = self.ambient.lower_corner()
        if low is None:
            return None
        start = sum(low) + self.offset
        for n in range(start, start + limit):
            if any(self.dim(g) for g in self.multidegrees(n)):
                return n
        return None

    def describe(self) -> str:
        return self.name


class FullModule(GradedModule):
    """The whole ambient: a module of covariants or a free module."""

    kind = "full"

    def _compute_piece(self, gamma):
        n = len(self.ambient.coords(gamma))
        return [[1 if a == b else 0 for a in range(n)] for b in range(n)]


class ImageModule(GradedModule):
    kind = "image"

    def __init__(self, phi: MonomialMap, offset: int = 0, name: str = "", mcm: bool = True):
        super().__init__(phi.target, offset, name, mcm)
        self.phi = phi

    def _versions(self):
        return (self.ambient.version, self.phi.source.version)

    def _compute_piece(self, gamma):
        rows, ncols = self.phi.matrix(gamma)
        return linalg.row_basis(rows, ncols)


class KernelModule(GradedModule):
    kind = "kernel"

    def __init__(self, phi: MonomialMap, offset: int = 0, name: str = "", mcm: bool = True):
        super().__init__(phi.source, offset, name, mcm)
        self.phi = phi

    def _versions(self):
        return (self.ambient.version, self.phi.target.version)

    def _compute_piece(self, gamma):
        rows, ncols = self.phi.matrix(gamma)
        return linalg.left_kernel(rows, ncols)


class MaximalIdealModule(GradedModule):
    """All of a rank-one free module except its generator's own multidegree."""

    kind = "max_ideal"

    def _compute_piece(self, gamma):
        if gamma in self.ambient.sigmas:
            return []
        n = len(self.ambient.coords(gamma))
        return [[1 if a == b else 0 for a in range(n)] for b in range(n)]


class TwistedModule(GradedModule):
    """M(shift): same pieces, coarse degrees lowered by ``shift``."""

    def __init__(self, base: GradedModule, shift: int):
        super().__init__(base.ambient, base.offset - shift, f"{base.name}({shift})", base.mcm)
        self.base = base
        self.kind = base.kind

    def piece(self, gamma):
        return self.base.piece(gamma)

    def __getattr__(self, item):
        return getattr(self.base, item)


class ResidueField:
    """k = R/m in multidegree 0; only usable as the first argument of Ext."""

    kind = "residue_field"
    mcm = False

    def __init__(self, G: WeightGroup):
        self.G = G
        zero = (0,) * G.d
        self.ambient = Ambient(G, [zero], G.zero, name="R")
        self.offset = 0
        self.name = "k"

    @property
    def character(self):
        return self.G.zero

    def describe(self) -> str:
        return "k"


def unit_vector(d: int, subset) -> tuple:
    return tuple(1 if j in subset else 0 for j in range(d))


def covariant_module(G: WeightGroup, i, shift: int = 0, window=None) -> GradedModule:
    """The span of monomials of character i, twisted by ``shift`` (coarse degree |alpha| - shift).

    ``window`` is accepted for interface symmetry; pieces are computed on demand.
    """
    c = G.char(i)
    if window is not None and window[1] > MAX_PIECE_DEGREE:
        raise WindowTooLarge(f"window {window} exceeds {MAX_PIECE_DEGREE}")
    amb = Ambient(G, [(0,) * G.d], c, name=f"S[{G.label(c)}]")
    name = f"S[{G.label(c)}]" + (f"({shift})" if shift else "")
    return FullModule(amb, offset=-shift, name=name, mcm=True)


def free_module(G: WeightGroup, sigma=None, name: str = "R") -> GradedModule:
    sigma = tuple(sigma) if sigma is not None else (0,) * G.d
    amb = Ambient(G, [sigma], G.weight(sigma), name=name)
    return FullModule(amb, offset=0, name=name, mcm=True)


def koszul_ambient(G: WeightGroup, p: int, i) -> Ambient:
    """(S tensor Lambda^p V) restricted to character i; generators e_J at 1_J."""
    c = G.char(i)
    subsets = list(itertools.combinations(range(G.d), p))
    return Ambient(G, [unit_vector(G.d, J) for J in subsets], c, name=f"K{p}[{G.label(c)}]")


def koszul_subsets(G: WeightGroup, p: int) -> list:
    return list(itertools.combinations(range(G.d), p))


def koszul_map(G: WeightGroup, p: int, i) -> MonomialMap:
    """The Koszul differential from S⊗Λ^p V to S⊗Λ^(p-1) V on the character-i part."""
    src = koszul_ambient(G, p, i)
    dst = koszul_ambient(G, p - 1, i)
    target_index = {J: k for k, J in enumerate(koszul_subsets(G, p - 1))}
    entries = {}
    for k, J in enumerate(koszul_subsets(G, p)):
        terms = []
        for pos, j in enumerate(J):
            rest = J[:pos] + J[pos + 1:]
            terms.append((target_index[rest], -1 if pos % 2 else 1))
        entries[k] = terms
    return MonomialMap(src, dst, entries)


def koszul_summand(G: WeightGroup, p: int, i, window=None) -> GradedModule:
    """Image of the p-th Koszul differential on character i, twisted by (p).

    The trivial-character summands with p < d are not MCM: dimension shifting
    along the trivial part of the Koszul complex gives
    Ext^(d-p)(U[p,0], omega) = Ext^d(k, omega), which is nonzero.
    """
    if not 1 <= p <= G.d:
        raise ValueError("p must lie in 1..d")
    phi = koszul_map(G, p, i)
    c = G.char(i)
    mcm = p == G.d or any(c)
    return ImageModule(phi, offset=-p, name=f"U[{p},{G.label(c)}]", mcm=mcm)


def residue_field(G: WeightGroup) -> ResidueField:
    return ResidueField(G)
