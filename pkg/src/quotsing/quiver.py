"""McKay quivers, their d-folded variants, and quiver serialization."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from quotsing.errors import UnknownFormat
from quotsing.weights import WeightGroup


def _freeze(value):
    """JSON lists back to tuples so vertex labels stay hashable."""
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


def _text(vertex) -> str:
    if isinstance(vertex, tuple):
        return "(" + ",".join(_text(v) for v in vertex) + ")"
    return str(vertex)


@dataclass
class Quiver:
    vertices: list
    arrows: list  # (source, target, label)
    name: str = ""
    group: str = ""
    relations: list = field(default_factory=list)

    def __post_init__(self):
        known = set(self.vertices)
        for src, dst, _ in self.arrows:
            if src not in known or dst not in known:
                raise ValueError(f"arrow {src}->{dst} has an endpoint outside the vertex set")
        order = {v: k for k, v in enumerate(self.vertices)}
        self.arrows = sorted(self.arrows, key=lambda a: (order[a[0]], order[a[1]], a[2]))

    def arrow_multiset(self) -> Counter:
        return Counter(self.arrows)

    def unlabeled_multiset(self) -> Counter:
        return Counter((s, t) for s, t, _ in self.arrows)

    def same_as(self, other: "Quiver") -> bool:
        """Equality as labeled multigraphs, ignoring names and vertex order."""
        return set(self.vertices) == set(other.vertices) and self.arrow_multiset() == other.arrow_multiset()

    def opposite(self) -> "Quiver":
        return Quiver(list(self.vertices), [(t, s, lab) for s, t, lab in self.arrows],
                      name=self.name + "^op", group=self.group)

    def restrict(self, keep) -> "Quiver":
        keep = set(keep)
        verts = [v for v in self.vertices if v in keep]
        arrows = [a for a in self.arrows if a[0] in keep and a[1] in keep]
        return Quiver(verts, arrows, name=self.name, group=self.group, relations=list(self.relations))

    def relabel(self, fn) -> "Quiver":
        return Quiver(list(self.vertices), [(s, t, fn(lab)) for s, t, lab in self.arrows],
                      name=self.name, group=self.group, relations=list(self.relations))

    def out_degree(self, v) -> int:
        return sum(1 for s, _, _ in self.arrows if s == v)

    def in_degree(self, v) -> int:
        return sum(1 for _, t, _ in self.arrows if t == v)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "group": self.group,
            "vertices": [_thaw(v) for v in self.vertices],
            "arrows": [{"src": _thaw(s), "dst": _thaw(t), "label": lab} for s, t, lab in self.arrows],
        }
        if self.relations:
            out["relations"] = list(self.relations)
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "Quiver":
        return cls(
            [_freeze(v) for v in doc["vertices"]],
            [(_freeze(a["src"]), _freeze(a["dst"]), a["label"]) for a in doc["arrows"]],
            name=doc.get("name", ""),
            group=doc.get("group", ""),
            relations=list(doc.get("relations", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Quiver":
        return cls.from_dict(json.loads(text))

    def to_dot(self) -> str:
        title = self.name or "quiver"
        lines = [f'digraph "{title}" {{', "  rankdir=TB;"]
        for v in self.vertices:
            lines.append(f'  "{_text(v)}";')
        for s, t, lab in self.arrows:
            lines.append(f'  "{_text(s)}" -> "{_text(t)}" [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def emit(Q: Quiver, fmt: str) -> str:
    if fmt == "json":
        return Q.to_json()
    if fmt == "dot":
        return Q.to_dot()
    raise UnknownFormat(f"unknown quiver format {fmt!r}")


def mckay_quiver(G: WeightGroup) -> Quiver:
    chars = G.characters()
    arrows = []
    for c in chars:
        for j, a in enumerate(G.weights):
            arrows.append((G.label(c), G.label(G.add(c, a)), f"x{j + 1}"))
    return Quiver([G.label(c) for c in chars], arrows, name="mckay", group=G.compact())


def folded_vertices(G: WeightGroup, d: int) -> list:
    return [(p, G.label(c)) for p in range(1, d + 1) for c in G.characters()]


def folded_quiver(G: WeightGroup, d: int | None = None) -> Quiver:
    d = G.d if d is None else d
    arrows = []
    for p in range(1, d):
        for c in G.characters():
            for j, a in enumerate(G.weights):
                arrows.append(((p, G.label(c)), (p + 1, G.label(G.add(c, a))), f"x{j + 1}"))
    return Quiver(folded_vertices(G, d), arrows, name="folded", group=G.compact(),
                  relations=["x_j x_k = x_k x_j"])


def stable_folded_quiver(G: WeightGroup, d: int | None = None) -> Quiver:
    d = G.d if d is None else d
    zero = G.label(G.zero)
    Q = folded_quiver(G, d).restrict([v for v in folded_vertices(G, d) if v[1] != zero])
    Q.name = "stable_folded"
    return Q
