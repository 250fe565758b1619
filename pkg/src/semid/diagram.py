"""Causal diagrams: mixed graphs of directed edges and bidirected arcs.

A diagram is immutable once built. Paths are walks over the mixed graph that
may traverse a directed edge against its arrow; a path is *unblocked* when no
intermediate variable is a collider (arrowheads from both sides).
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exceptions import (
    DirectedCycle,
    DiagramTooLarge,
    DuplicateEdge,
    DuplicateName,
    NotAnEndpoint,
    UnknownVariable,
    VariableNotOnPath,
)

DIRECTED = "directed"
BIDIRECTED = "bidirected"

MAX_VARIABLES = 64


@dataclass(frozen=True)
class Edge:
    """One edge of the diagram. For a directed edge ``a`` is the tail and ``b`` the head."""

    kind: str
    a: str
    b: str
    param: str
    index: int

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.a, self.b)

    def has_arrowhead_at(self, v: str) -> bool:
        if v not in (self.a, self.b):
            raise NotAnEndpoint(f"{v} is not an endpoint of {self}")
        return self.kind == BIDIRECTED or v == self.b

    def other(self, v: str) -> str:
        if v == self.a:
            return self.b
        if v == self.b:
            return self.a
        raise NotAnEndpoint(f"{v} is not an endpoint of {self}")

    def render(self, start: str | None = None) -> str:
        """Render as ``X -> Y`` / ``X <-> Y``, optionally walked from ``start``."""
        start = self.a if start is None else start
        end = self.other(start)
        if self.kind == BIDIRECTED:
            return f"{start} <-> {end}"
        return f"{start} -> {end}" if start == self.a else f"{start} <- {end}"

    def __str__(self) -> str:
        return f"{self.render()} ({self.param})"


@dataclass(frozen=True)
class Path:
    """A walk ``nodes[0] - edges[0] - nodes[1] - ... - nodes[-1]``.

    ``nodes`` records the traversal direction of every edge; an empty path has
    a single node and no edges.
    """

    edges: tuple[Edge, ...]
    nodes: tuple[str, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("a path needs exactly one more node than edges")
        for i, e in enumerate(self.edges):
            if {self.nodes[i], self.nodes[i + 1]} != set(e.endpoints):
                raise ValueError(f"edge {e} does not join {self.nodes[i]} and {self.nodes[i + 1]}")

    @classmethod
    def empty(cls, v: str) -> "Path":
        return cls((), (v,))

    @property
    def source(self) -> str:
        return self.nodes[0]

    @property
    def sink(self) -> str:
        return self.nodes[-1]

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(e.param for e in self.edges)

    @property
    def intermediates(self) -> tuple[str, ...]:
        return self.nodes[1:-1]

    def __len__(self) -> int:
        return len(self.edges)

    def is_valid(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    def colliders(self) -> list[str]:
        return [
            self.nodes[i]
            for i in range(1, len(self.nodes) - 1)
            if self.edges[i - 1].has_arrowhead_at(self.nodes[i])
            and self.edges[i].has_arrowhead_at(self.nodes[i])
        ]

    def is_unblocked(self) -> bool:
        return not self.colliders()

    def reversed(self) -> "Path":
        return Path(self.edges[::-1], self.nodes[::-1])

    def concat(self, other: "Path") -> "Path":
        if self.sink != other.source:
            raise ValueError(f"cannot join path ending at {self.sink} to one starting at {other.source}")
        return Path(self.edges + other.edges, self.nodes + other.nodes[1:])

    def sort_key(self) -> tuple:
        return tuple(e.index for e in self.edges)

    def __str__(self) -> str:
        if not self.edges:
            return self.source
        out = [self.nodes[0]]
        for e, (u, v) in zip(self.edges, zip(self.nodes, self.nodes[1:])):
            if e.kind == BIDIRECTED:
                arrow = "<->"
            else:
                arrow = "->" if u == e.a else "<-"
            out.append(f"{arrow} {v}")
        return " ".join(out)


@dataclass(frozen=True)
class CausalDiagram:
    """Validated causal diagram; build it with :func:`build_diagram`."""

    variables: tuple[str, ...]
    edges: tuple[Edge, ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    @property
    def directed_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.kind == DIRECTED)

    @property
    def bidirected_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.kind == BIDIRECTED)

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(e.param for e in self.edges)

    def edge_by_param(self, name: str) -> Edge:
        for e in self.edges:
            if e.param == name:
                return e
        raise KeyError(name)

    def check(self, *vs: str) -> None:
        known = self._index
        for v in vs:
            if v not in known:
                raise UnknownVariable(v)

    @property
    def _index(self) -> dict[str, int]:
        if "index" not in self._cache:
            self._cache["index"] = {v: i for i, v in enumerate(self.variables)}
        return self._cache["index"]

    def incident(self, v: str) -> tuple[Edge, ...]:
        if "incident" not in self._cache:
            table: dict[str, list[Edge]] = {u: [] for u in self.variables}
            for e in self.edges:
                table[e.a].append(e)
                table[e.b].append(e)
            self._cache["incident"] = {u: tuple(es) for u, es in table.items()}
        self.check(v)
        return self._cache["incident"][v]

    def parents(self, v: str) -> list[str]:
        return [e.a for e in self.incident(v) if e.kind == DIRECTED and e.b == v]

    def children(self, v: str) -> list[str]:
        return [e.b for e in self.incident(v) if e.kind == DIRECTED and e.a == v]

    def descendants(self, v: str) -> set[str]:
        """Variables reachable from ``v`` by a non-empty chain."""
        seen: set[str] = set()
        stack = self.children(v)
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self.children(u))
        return seen

    def ancestors(self, v: str) -> set[str]:
        seen: set[str] = set()
        stack = self.parents(v)
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self.parents(u))
        return seen

    def to_spec(self) -> dict:
        """Plain-data form accepted by :func:`build_diagram`."""
        return {
            "variables": list(self.variables),
            "directed": [(e.a, e.b, e.param) for e in self.directed_edges],
            "bidirected": [(e.a, e.b, e.param) for e in self.bidirected_edges],
        }

    def __str__(self) -> str:
        parts = [e.render() + f":{e.param}" for e in self.edges]
        return "{" + ", ".join(self.variables) + "; " + ", ".join(parts) + "}"


def build_diagram(
    variables: Sequence[str],
    directed: Iterable[Sequence[str]] = (),
    bidirected: Iterable[Sequence[str]] = (),
) -> CausalDiagram:
    """Validate and build a diagram.

    ``directed`` holds ``(tail, head, param)`` triples and ``bidirected``
    holds ``(a, b, param)`` triples. Edge indices follow declaration order,
    directed edges first.
    """
    variables = tuple(variables)
    if len(variables) > MAX_VARIABLES:
        raise DiagramTooLarge(f"{len(variables)} variables; at most {MAX_VARIABLES} are supported")
    seen: set[str] = set()
    for v in variables:
        if v in seen:
            raise DuplicateName(f"variable {v!r} declared twice")
        seen.add(v)

    edges: list[Edge] = []
    params: set[str] = set()
    pairs: set[tuple] = set()

    def add(kind: str, triple: Sequence[str]) -> None:
        a, b, param = triple
        for v in (a, b):
            if v not in seen:
                raise UnknownVariable(v)
        if a == b:
            raise DuplicateEdge(f"self-loop on {a}")
        if param in params or param in seen:
            raise DuplicateName(f"parameter {param!r} used twice")
        key = (kind, a, b) if kind == DIRECTED else (kind, frozenset((a, b)))
        if key in pairs:
            raise DuplicateEdge(f"second {kind} edge between {a} and {b}")
        pairs.add(key)
        params.add(param)
        edges.append(Edge(kind, a, b, param, len(edges)))

    for t in directed:
        add(DIRECTED, t)
    for t in bidirected:
        add(BIDIRECTED, t)

    d = CausalDiagram(variables, tuple(edges))
    _depths(d)  # rejects directed cycles
    return d


def _depths(d: CausalDiagram) -> dict[str, int]:
    if "depth" in d._cache:
        return d._cache["depth"]
    indeg = {v: 0 for v in d.variables}
    for e in d.directed_edges:
        indeg[e.b] += 1
    depth = {v: 0 for v in d.variables}
    queue = deque(v for v in d.variables if indeg[v] == 0)
    done = 0
    while queue:
        v = queue.popleft()
        done += 1
        for c in d.children(v):
            depth[c] = max(depth[c], depth[v] + 1)
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if done != len(d.variables):
        cyclic = sorted(v for v in d.variables if indeg[v] > 0)
        raise DirectedCycle("directed cycle through " + ", ".join(cyclic))
    d._cache["depth"] = depth
    return depth


def depth(d: CausalDiagram, v: str) -> int:
    """Length of the longest chain ending at ``v``."""
    d.check(v)
    return _depths(d)[v]


def ordering_delta(d: CausalDiagram, seed: int | None = None) -> tuple[str, ...]:
    """Depth-compatible total order.

    Ties at equal depth follow declaration order, or a seeded shuffle when
    ``seed`` is given.
    """
    depths = _depths(d)
    if seed is None:
        tie = {v: i for i, v in enumerate(d.variables)}
    else:
        keys = list(range(len(d.variables)))
        random.Random(seed).shuffle(keys)
        tie = dict(zip(d.variables, keys))
    return tuple(sorted(d.variables, key=lambda v: (depths[v], tie[v])))


def check_ordering(d: CausalDiagram, order: Sequence[str]) -> None:
    if sorted(order) != sorted(d.variables):
        raise ValueError("ordering must list every variable exactly once")
    depths = _depths(d)
    for u, v in zip(order, order[1:]):
        if depths[u] > depths[v]:
            raise ValueError(f"ordering places {u} (depth {depths[u]}) before {v} (depth {depths[v]})")


def inc_set(d: CausalDiagram, y: str, order: Sequence[str] | None = None) -> tuple[Edge, ...]:
    """Edges joining ``y`` to variables that precede it in ``order``, by edge index."""
    d.check(y)
    order = ordering_delta(d) if order is None else order
    pos = {v: i for i, v in enumerate(order)}
    return tuple(e for e in d.incident(y) if pos[e.other(y)] < pos[y])


def enumerate_unblocked_paths(d: CausalDiagram, x: str, y: str) -> tuple[Path, ...]:
    """All valid collider-free paths from ``x`` to ``y`` in canonical order."""
    d.check(x, y)
    if x == y:
        raise ValueError("endpoints of a path must differ")
    key = ("paths", x, y)
    cached = d._cache.get(key)
    if cached is not None:
        return cached
    rev = d._cache.get(("paths", y, x))
    if rev is not None:
        out = tuple(sorted((p.reversed() for p in rev), key=Path.sort_key))
        d._cache[key] = out
        return out

    found: list[Path] = []
    nodes = [x]
    edges: list[Edge] = []
    on_path = {x}

    def walk(v: str) -> None:
        prev = edges[-1] if edges else None
        into_v = prev is not None and prev.has_arrowhead_at(v)
        for e in d.incident(v):
            if e is prev:
                continue
            if into_v and e.has_arrowhead_at(v):
                continue  # v would be a collider
            w = e.other(v)
            if w in on_path:
                continue
            edges.append(e)
            nodes.append(w)
            if w == y:
                found.append(Path(tuple(edges), tuple(nodes)))
            else:
                on_path.add(w)
                walk(w)
                on_path.discard(w)
            edges.pop()
            nodes.pop()

    walk(x)
    out = tuple(sorted(found, key=Path.sort_key))
    d._cache[key] = out
    return out


def subpath(p: Path, u: str, v: str) -> Path:
    """Edges of ``p`` between ``u`` and ``v``, walked from ``u`` to ``v``."""
    try:
        i = p.nodes.index(u)
        j = p.nodes.index(v)
    except ValueError as exc:
        raise VariableNotOnPath(f"{u} or {v} not on path {p}") from exc
    if i <= j:
        return Path(p.edges[i:j], p.nodes[i : j + 1])
    return Path(p.edges[j:i], p.nodes[j : i + 1]).reversed()


def points_to(segment: Path, u: str) -> bool:
    """Whether the edge of ``segment`` adjacent to ``u`` has an arrowhead at ``u``.

    Empty segments never point to anything.
    """
    if not segment.edges:
        if u != segment.source:
            raise NotAnEndpoint(f"{u} is not an endpoint of the empty path at {segment.source}")
        return False
    if u == segment.source:
        return segment.edges[0].has_arrowhead_at(u)
    if u == segment.sink:
        return segment.edges[-1].has_arrowhead_at(u)
    raise NotAnEndpoint(f"{u} is not an endpoint of {segment}")
