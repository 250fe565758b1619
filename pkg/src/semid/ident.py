"""Dependence graphs between per-variable systems and the model-level verdict."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .diagram import BIDIRECTED, CausalDiagram, inc_set, ordering_delta
from .exceptions import IncompleteAssignment
from .gcrit import WitnessSet, all_shallower, build_phi_system, iter_auxiliary_sets

DESCENDANT = "descendant"
TAIL_BIDIRECTED = "tail-bidirected-path"
NEEDS_PARAMETERS = "needs-parameters"

IDENTIFIED = "identified"
NO_AUXILIARY_SET = "no-auxiliary-set"
INCONCLUSIVE = "inconclusive"

CYCLIC_DEPENDENCE = "cyclic-dependence"
COEFFICIENT_UNAVAILABLE = "coefficient-unavailable"

DEFAULT_BUDGET = 10_000


def dependence_cases(
    d: CausalDiagram, z: str, y: str, order: Sequence[str] | None = None
) -> str | None:
    """Why the system for ``z`` must be solved before the one for ``y``, if it must.

    A bare arc ``z <-> y`` counts as a tail-bidirected path only when the arc
    belongs to Inc(z) rather than Inc(y); otherwise its coefficient is the
    constant 1.
    """
    d.check(z, y)
    if z == y:
        raise ValueError("z and y must differ")
    if z in d.descendants(y):
        return DESCENDANT
    spouses = {e.other(y) for e in d.incident(y) if e.kind == BIDIRECTED}
    if z in spouses:
        order = ordering_delta(d) if order is None else order
        if list(order).index(z) > list(order).index(y):
            return TAIL_BIDIRECTED
    # z <- ... <- w <-> y is valid iff w is a proper ancestor of z; y cannot sit on
    # the chain since z is not a descendant of y
    if spouses & d.ancestors(z):
        return TAIL_BIDIRECTED
    return None


@dataclass(frozen=True)
class DependenceGraph:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]  # (before, after, case)

    def successors(self, v: str) -> list[str]:
        return [b for a, b, _ in self.edges if a == v]

    def find_cycle(self) -> list[str] | None:
        return _find_cycle(self.nodes, [(a, b) for a, b, _ in self.edges])

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def schedule(self, order: Sequence[str]) -> list[str]:
        """Topological order, ties broken by position in ``order``."""
        pos = {v: i for i, v in enumerate(order)}
        indeg = {v: 0 for v in self.nodes}
        for _, b, _ in self.edges:
            indeg[b] += 1
        heap = [(pos[v], v) for v in self.nodes if indeg[v] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            _, v = heapq.heappop(heap)
            out.append(v)
            for w in self.successors(v):
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, (pos[w], w))
        if len(out) != len(self.nodes):
            raise ValueError("dependence graph has a cycle")
        return out


def _find_cycle(nodes, edges) -> list[str] | None:
    succ: dict[str, list[str]] = {v: [] for v in nodes}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        succ.setdefault(b, [])
    color = dict.fromkeys(succ, 0)
    stack: list[str] = []

    def visit(v):
        color[v] = 1
        stack.append(v)
        for w in succ[v]:
            if color[w] == 1:
                return stack[stack.index(w):] + [w]
            if color[w] == 0:
                found = visit(w)
                if found:
                    return found
        stack.pop()
        color[v] = 2
        return None

    for v in succ:
        if color[v] == 0:
            found = visit(v)
            if found:
                return found
    return None


def owner(d: CausalDiagram, param: str, order: Sequence[str]) -> str:
    """The variable whose Inc set holds the edge carrying ``param``."""
    e = d.edge_by_param(param)
    pos = {v: i for i, v in enumerate(order)}
    return e.a if pos[e.a] > pos[e.b] else e.b


def _row_requirements(d, z, y, order) -> tuple[str | None, tuple[str, ...]]:
    """Dependence case of row ``z`` for ``y`` and the owners of the parameters it needs."""
    key = ("requires", z, y, tuple(order))
    hit = d._cache.get(key)
    if hit is not None:
        return hit
    case = dependence_cases(d, z, y, order)
    owners: tuple[str, ...] = ()
    if case is not None:
        row = build_phi_system(d, [z], y, order).rows[0]
        params = row.intercept.variables().union(*(c.variables() for c in row.coeffs))
        pos = {v: i for i, v in enumerate(order)}
        owners = tuple(sorted({owner(d, p, order) for p in params} - {y}, key=pos.__getitem__))
    d._cache[key] = (case, owners)
    return case, owners


def _edges_for(d, y, zs, order, nodes) -> list[tuple[str, str, str]]:
    """Dependence edges into ``y`` contributed by the auxiliary set ``zs``.

    Besides the two case-triggered edges, every row that cannot be read off
    the correlations adds an edge from the owner of each parameter its
    polynomials mention, so that an acyclic graph always admits a schedule in
    which those coefficients are known.
    """
    reqs = [(z, *_row_requirements(d, z, y, order)) for z in zs]
    out = [(z, y, case) for z, case, _ in reqs if case is not None and z in nodes]
    seen = {z for z, _, _ in out}
    for _, _, owners in reqs:
        for w in owners:
            if w not in seen:
                out.append((w, y, NEEDS_PARAMETERS))
                seen.add(w)
    return out


def build_dependence_graph(
    d: CausalDiagram,
    assignment: Mapping[str, tuple[Sequence[str], WitnessSet] | Sequence[str]],
    order: Sequence[str] | None = None,
) -> DependenceGraph:
    order = ordering_delta(d) if order is None else tuple(order)
    nodes = tuple(v for v in order if inc_set(d, v, order))
    missing = [v for v in nodes if v not in assignment]
    if missing:
        raise IncompleteAssignment("no auxiliary set given for " + ", ".join(missing))
    edges = []
    for y in nodes:
        entry = assignment[y]
        zs = entry[0] if len(entry) == 2 and isinstance(entry[1], WitnessSet) else entry
        for e in _edges_for(d, y, zs, order, set(nodes)):
            if e not in edges:
                edges.append(e)
    return DependenceGraph(nodes, tuple(edges))


@dataclass
class Verdict:
    status: str
    order: tuple[str, ...]
    assignment: dict[str, tuple[tuple[str, ...], WitnessSet]] = field(default_factory=dict)
    dependence: DependenceGraph | None = None
    schedule: list[str] = field(default_factory=list)
    culprits: list[str] = field(default_factory=list)
    reason: str | None = None
    diagnostics: list[str] = field(default_factory=list)
    notes: dict[str, str] = field(default_factory=dict)
    combinations_tried: int = 0
    backtracked: bool = False
    fast_path: bool = False

    @property
    def identified(self) -> bool:
        return self.status == IDENTIFIED

    def downgraded(self, reason: str, message: str) -> "Verdict":
        return Verdict(
            INCONCLUSIVE,
            self.order,
            self.assignment,
            self.dependence,
            [],
            reason=reason,
            diagnostics=self.diagnostics + [message],
            notes=dict(self.notes),
            combinations_tried=self.combinations_tried,
            backtracked=self.backtracked,
            fast_path=self.fast_path,
        )

    def headline(self) -> str:
        if self.status == IDENTIFIED:
            return "IDENTIFIED; schedule: " + ", ".join(self.schedule)
        if self.status == NO_AUXILIARY_SET:
            return "NOT IDENTIFIED: no auxiliary set for " + ", ".join(self.culprits)
        return f"INCONCLUSIVE: {self.reason}"


class _Candidates:
    """Memoized lazy view over iter_auxiliary_sets."""

    def __init__(self, it):
        self._it = it
        self._seen: list = []
        self._done = False

    def get(self, i: int):
        while len(self._seen) <= i and not self._done:
            try:
                self._seen.append(next(self._it))
            except StopIteration:
                self._done = True
        return self._seen[i] if i < len(self._seen) else None


def analyze(
    d: CausalDiagram,
    order: Sequence[str] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Decide identification by auxiliary sets with an acyclic dependence graph.

    Variables are assigned in ``order``; for each, candidates come from
    :func:`iter_auxiliary_sets` (shallow sets first), so the first assignment
    tried is the all-shallower one whenever it exists.
    """
    order = ordering_delta(d) if order is None else tuple(order)
    nodes = [v for v in order if inc_set(d, v, order)]
    node_set = set(nodes)
    cands = {y: _Candidates(iter_auxiliary_sets(d, y, order)) for y in nodes}

    culprits = [y for y in nodes if cands[y].get(0) is None]
    if culprits:
        return Verdict(NO_AUXILIARY_SET, order, culprits=culprits)

    first = {y: cands[y].get(0) for y in nodes}
    if all(all_shallower(d, first[y][0], y) for y in nodes):
        # every coefficient involves only shallower variables, so depth order suffices
        return Verdict(
            IDENTIFIED,
            order,
            assignment=first,
            dependence=DependenceGraph(tuple(nodes), ()),
            schedule=list(nodes),
            notes={y: "all shallower" for y in nodes},
            combinations_tried=len(nodes),
            fast_path=True,
        )

    chosen: dict[str, tuple] = {}
    edges: list[tuple[str, str, str]] = []
    tried = 0
    exhausted = False

    def search(k: int) -> bool:
        nonlocal tried, exhausted
        if k == len(nodes):
            return True
        y = nodes[k]
        i = 0
        while True:
            cand = cands[y].get(i)
            if cand is None:
                return False
            if tried >= budget:
                exhausted = True
                return False
            tried += 1
            new = _edges_for(d, y, cand[0], order, node_set)
            edges.extend(new)
            if _find_cycle(nodes, [(a, b) for a, b, _ in edges]) is None:
                chosen[y] = cand
                if search(k + 1):
                    return True
                del chosen[y]
            del edges[len(edges) - len(new):]
            if exhausted:
                return False
            i += 1

    ok = search(0)
    notes = {}
    for y in nodes:
        if y in chosen:
            notes[y] = "all shallower" if all_shallower(d, chosen[y][0], y) else "needs dependence order"
    if not ok:
        diag = [f"tried {tried} candidate combinations"]
        if exhausted:
            diag.append(f"assignment budget of {budget} exhausted")
        return Verdict(
            INCONCLUSIVE,
            order,
            reason=CYCLIC_DEPENDENCE,
            diagnostics=diag,
            combinations_tried=tried,
            backtracked=True,
        )
    graph = build_dependence_graph(d, chosen, order)
    return Verdict(
        IDENTIFIED,
        order,
        assignment=dict(chosen),
        dependence=graph,
        schedule=graph.schedule(order),
        notes=notes,
        combinations_tried=tried,
        backtracked=tried > len(nodes),
    )
