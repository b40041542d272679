"""Finite abelian groups acting diagonally on d variables.

A group is ``Z/m_1 x ... x Z/m_r`` and variable ``x_j`` is scaled by the
character ``a_j``.  Characters are tuples of residues, one per invariant
factor; since a finite abelian group is (non-canonically) its own dual, the
same tuples also index group elements.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property

from quotsing.errors import BadGroupSpec, BadModulus, GroupTooLarge, NonFaithful

MAX_ORDER = 10**6

Character = tuple


@dataclass(frozen=True)
class WeightGroup:
    invariant_factors: tuple
    weights: tuple  # d columns, each a tuple of length r

    @property
    def d(self) -> int:
        return len(self.weights)

    @property
    def r(self) -> int:
        return len(self.invariant_factors)

    @cached_property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def zero(self) -> Character:
        return (0,) * self.r

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.invariant_factors) if self.invariant_factors else 1

    def characters(self) -> list:
        """All characters in lexicographic order (zero first)."""
        return [tuple(c) for c in itertools.product(*(range(m) for m in self.invariant_factors))]

    def elements(self) -> list:
        return self.characters()

    def add(self, a: Character, b: Character) -> Character:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.invariant_factors))

    def neg(self, a: Character) -> Character:
        return tuple((-x) % m for x, m in zip(a, self.invariant_factors))

    def sub(self, a: Character, b: Character) -> Character:
        return tuple((x - y) % m for x, y, m in zip(a, b, self.invariant_factors))

    def scale(self, a: Character, k: int) -> Character:
        return tuple((k * x) % m for x, m in zip(a, self.invariant_factors))

    def char(self, value) -> Character:
        """Coerce an int (cyclic groups) or a sequence into a reduced character."""
        if isinstance(value, int):
            if self.r == 0:
                return ()
            if self.r != 1:
                raise BadGroupSpec(f"integer character {value} needs a cyclic group")
            value = (value,)
        value = tuple(int(v) for v in value)
        if len(value) != self.r:
            raise BadGroupSpec(f"character {value} has wrong length for r={self.r}")
        return tuple(v % m for v, m in zip(value, self.invariant_factors))

    def weight(self, alpha) -> Character:
        """Character of the monomial with exponent vector ``alpha``."""
        out = [0] * self.r
        for e, a in zip(alpha, self.weights):
            if e:
                for t in range(self.r):
                    out[t] += e * a[t]
        return tuple(v % m for v, m in zip(out, self.invariant_factors))

    def subset_weight(self, subset) -> Character:
        """Character of the exterior monomial ``e_J``."""
        out = self.zero
        for j in subset:
            out = self.add(out, self.weights[j])
        return out

    @cached_property
    def _char_index(self) -> dict:
        return {c: k for k, c in enumerate(self.characters())}

    def index(self, c: Character) -> int:
        return self._char_index[c]

    def pairing(self, g: Character, a: Character) -> int:
        """Exponent of the eigenvalue of element ``g`` on character ``a``, in Z/exponent."""
        e = self.exponent
        return sum(x * y * (e // m) for x, y, m in zip(g, a, self.invariant_factors)) % e

    def label(self, c: Character):
        """Compact display form: an int for cyclic groups, else a tuple."""
        if self.r == 1:
            return c[0]
        if self.r == 0:
            return 0
        return tuple(c)

    def compact(self) -> str:
        """Inverse of :func:`parse_group`."""
        if self.r == 0:
            return "m=1:a=" + ",".join("0" for _ in range(self.d))
        ms = ",".join(str(m) for m in self.invariant_factors)
        ws = ",".join("/".join(str(x) for x in a) for a in self.weights)
        return f"m={ms}:a={ws}"

    def to_config(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "weights": [list(a) for a in self.weights],
        }

    def __str__(self) -> str:
        return self.compact()


def _generated_subgroup_order(factors, gens) -> int:
    seen = {tuple(0 for _ in factors)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((u + v) % m for u, v, m in zip(x, g, factors))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def validate_group(invariant_factors, weights, d=None) -> WeightGroup:
    """Normalize and check a raw group description.

    ``weights`` lists one entry per variable; an entry is an int (cyclic
    case) or a sequence of length r.  An empty ``invariant_factors`` list
    describes the trivial group.
    """
    factors = tuple(int(m) for m in invariant_factors)
    for m in factors:
        if m < 2:
            raise BadModulus(f"invariant factor {m} is < 2")
    cols = []
    for a in weights:
        if not factors:
            cols.append(())
            continue
        a = (a,) if isinstance(a, int) else tuple(int(x) for x in a)
        if len(a) != len(factors):
            raise BadGroupSpec(f"weight {a} does not have {len(factors)} components")
        cols.append(tuple(x % m for x, m in zip(a, factors)))
    if d is not None and d != len(cols):
        raise BadGroupSpec(f"d={d} but {len(cols)} weights given")
    if len(cols) < 1:
        raise BadGroupSpec("need at least one variable")
    order = math.prod(factors)
    if order > MAX_ORDER:
        raise GroupTooLarge(f"group order {order} exceeds {MAX_ORDER}")
    if _generated_subgroup_order(factors, cols) != order:
        raise NonFaithful("weights generate a proper subgroup of the character group")
    return WeightGroup(factors, tuple(cols))


_COMPACT = re.compile(r"^\s*m=([0-9,x]+)\s*:\s*a=([-0-9,/]+)\s*$")


def parse_group(text: str) -> WeightGroup:
    """Parse ``m=5:a=1,2,2`` or, for products, ``m=2,2:a=1/0,0/1,1/1``.

    ``m=1`` denotes the trivial group; its weights are then ignored except
    for their number.
    """
    match = _COMPACT.match(text)
    if not match:
        raise BadGroupSpec(f"cannot parse group spec {text!r}")
    try:
        factors = [int(m) for m in re.split(r"[,x]", match.group(1)) if m]
        raw = [w for w in match.group(2).split(",") if w]
        weights = [tuple(int(x) for x in w.split("/")) for w in raw]
    except ValueError as exc:
        raise BadGroupSpec(f"cannot parse group spec {text!r}") from exc
    if factors == [1]:
        return validate_group([], [() for _ in weights])
    return validate_group(factors, weights)


def group_from_config(doc: dict) -> WeightGroup:
    if "group" in doc and isinstance(doc["group"], str):
        return parse_group(doc["group"])
    try:
        return validate_group(doc["invariant_factors"], doc["weights"], doc.get("d"))
    except KeyError as exc:
        raise BadGroupSpec(f"group config is missing {exc}") from exc


def is_special_linear(G: WeightGroup) -> bool:
    return G.subset_weight(range(G.d)) == G.zero


def is_small(G: WeightGroup) -> bool:
    """No nontrivial element fixes d-1 or more coordinate axes."""
    for g in G.elements():
        if g == G.zero:
            continue
        fixed = sum(1 for a in G.weights if G.pairing(g, a) == 0)
        if fixed >= G.d - 1:
            return False
    return True


def acts_freely_off_origin(G: WeightGroup) -> bool:
    for g in G.elements():
        if g == G.zero:
            continue
        if any(G.pairing(g, a) == 0 for a in G.weights):
            return False
    return True
