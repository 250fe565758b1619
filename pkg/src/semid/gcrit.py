"""Linear systems over Inc(Y) parameters, the G criterion, and auxiliary-set search."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Mapping, Sequence

import numpy as np

from .diagram import (
    CausalDiagram,
    Edge,
    Path,
    depth,
    enumerate_unblocked_paths,
    inc_set,
    ordering_delta,
)
from .exceptions import EmptyIncSet, MalformedWitness
from .wright import PathPolynomial, eval_polynomial, random_parameterization, standardize

RANK_TOL = 1e-7


@dataclass(frozen=True)
class PhiRow:
    z: str
    intercept: PathPolynomial
    coeffs: tuple[PathPolynomial, ...]

    def reconstruct(self, unknowns: Sequence[str]) -> PathPolynomial:
        out = self.intercept
        for poly, lam in zip(self.coeffs, unknowns):
            out = out + poly.times(lam)
        return out


@dataclass(frozen=True)
class PhiSystem:
    """Rows ``rho(Z_i, Y) = a_i0 + sum_j a_ij * lambda_j``."""

    target: str
    unknowns: tuple[str, ...]
    inc: tuple[Edge, ...]
    rows: tuple[PhiRow, ...]

    def evaluate(self, values: Mapping[str, float]) -> tuple[np.ndarray, np.ndarray]:
        """Numeric coefficient matrix and intercept column."""
        A = np.array([[eval_polynomial(c, values) for c in r.coeffs] for r in self.rows], dtype=float)
        a0 = np.array([eval_polynomial(r.intercept, values) for r in self.rows], dtype=float)
        return A.reshape(len(self.rows), len(self.unknowns)), a0

    def __str__(self) -> str:
        lines = []
        for r in self.rows:
            parts = [f"({c})*{lam}" for c, lam in zip(r.coeffs, self.unknowns) if c]
            if r.intercept:
                parts.insert(0, f"({r.intercept})")
            lines.append(f"rho[{r.z},{self.target}] = " + (" + ".join(parts) or "0"))
        return "\n".join(lines)


@dataclass(frozen=True)
class Witness:
    z: str
    path: Path
    edge: Edge


@dataclass(frozen=True)
class WitnessSet:
    target: str
    witnesses: tuple[Witness, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(w.z for w in self.witnesses)

    def __iter__(self):
        return iter(self.witnesses)

    def __len__(self):
        return len(self.witnesses)


def build_phi_system(
    d: CausalDiagram, zs: Sequence[str], y: str, order: Sequence[str] | None = None
) -> PhiSystem:
    d.check(y, *zs)
    if y in zs:
        raise ValueError(f"{y} cannot be in its own auxiliary set")
    order = ordering_delta(d) if order is None else tuple(order)
    inc = inc_set(d, y, order)
    if not inc:
        raise EmptyIncSet(y)
    slot = {e.param: j for j, e in enumerate(inc)}
    rows = []
    for z in zs:
        coeff_terms: list[list[tuple[str, ...]]] = [[] for _ in inc]
        intercept = []
        for p in enumerate_unblocked_paths(d, z, y):
            # y occurs only at the end of a valid path, so an Inc(Y) edge can only be the last one
            j = slot.get(p.edges[-1].param)
            if j is None:
                intercept.append(p.params)
            else:
                coeff_terms[j].append(p.params[:-1])
        rows.append(
            PhiRow(z, PathPolynomial(tuple(intercept)), tuple(PathPolynomial(tuple(t)) for t in coeff_terms))
        )
    return PhiSystem(y, tuple(e.param for e in inc), inc, tuple(rows))


def _inc_paths(d: CausalDiagram, z: str, y: str, inc_params: set[str]) -> list[Path]:
    return [p for p in enumerate_unblocked_paths(d, z, y) if p.edges[-1].param in inc_params]


def _arrowheads(path: Path) -> dict[str, tuple[bool, bool]]:
    """Per node: does the segment before it point to it, does the segment after it."""
    n = len(path.nodes)
    out = {}
    for i, u in enumerate(path.nodes):
        before = i > 0 and path.edges[i - 1].has_arrowhead_at(u)
        after = i < n - 1 and path.edges[i].has_arrowhead_at(u)
        out[u] = (before, after)
    return out


def _conflicts(pi: Path, hi, hj, y: str) -> list[str]:
    bad = []
    for u in pi.nodes:
        if u == y or u not in hj:
            continue
        (bi, ai), (bj, aj) = hi[u], hj[u]
        if not ((bi and aj) or (bj and ai)):
            bad.append(u)
    return bad


def pair_conflicts(wi: Witness, wj: Witness, y: str) -> list[str]:
    """Common variables (other than ``y``) where the two witness paths could be exchanged.

    At such a variable ``U`` neither ``p_i[Z_i..U]`` with ``p_j[U..Y]`` nor
    ``p_j[Z_j..U]`` with ``p_i[U..Y]`` both point to ``U``; empty segments
    never point.
    """
    return _conflicts(wi.path, _arrowheads(wi.path), _arrowheads(wj.path), y)


def check_g_criterion(
    d: CausalDiagram, witness: WitnessSet, y: str, order: Sequence[str] | None = None
) -> bool:
    """Conditions (i) and (ii) of the G criterion for a concrete set of paths.

    Condition (ii) is skipped at the shared sink ``y``; instead the witnesses
    must use pairwise distinct Inc(Y) edges.
    """
    inc = inc_set(d, y, order)
    ws = witness.witnesses
    for w in ws:
        if w.path.source != w.z or w.path.sink != y:
            raise MalformedWitness(f"path {w.path} does not run from {w.z} to {y}")
        if not w.path.is_valid():
            raise MalformedWitness(f"path {w.path} repeats a variable")
        if w.edge not in w.path.edges:
            raise MalformedWitness(f"path {w.path} does not use {w.edge}")
    if len(ws) != len(inc) or len({w.z for w in ws}) != len(ws):
        return False
    if {w.edge for w in ws} != set(inc):
        return False
    for w in ws:
        if not w.path.is_unblocked():
            return False
    for i in range(len(ws)):
        for j in range(i + 1, len(ws)):
            if pair_conflicts(ws[i], ws[j], y):
                return False
    return True


def _has_matching(options: list[set[str]]) -> bool:
    match: dict[str, int] = {}

    def augment(i: int, seen: set[str]) -> bool:
        for e in options[i]:
            if e in seen:
                continue
            seen.add(e)
            if e not in match or augment(match[e], seen):
                match[e] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(options)))


def find_witness(
    d: CausalDiagram, zs: Sequence[str], y: str, order: Sequence[str] | None = None
) -> WitnessSet | None:
    """Backtracking search for paths certifying the G criterion, or None."""
    order = ordering_delta(d) if order is None else tuple(order)
    inc = inc_set(d, y, order)
    if not inc:
        raise EmptyIncSet(y)
    if len(zs) != len(inc) or y in zs:
        return None
    by_param = {e.param: e for e in inc}
    cands = {z: _inc_paths(d, z, y, set(by_param)) for z in zs}
    if not _has_matching([{p.edges[-1].param for p in cands[z]} for z in zs]):
        return None

    heads = {z: [_arrowheads(p) for p in cands[z]] for z in zs}
    compatible: dict[tuple, bool] = {}

    def fits(z1, i1, z2, i2) -> bool:
        key = (z1, i1, z2, i2) if (z1, i1) <= (z2, i2) else (z2, i2, z1, i1)
        hit = compatible.get(key)
        if hit is None:
            hit = not _conflicts(cands[z1][i1], heads[z1][i1], heads[z2][i2], y)
            compatible[key] = hit
        return hit

    chosen: list[tuple[str, int]] = []

    # forward checking: every unplaced Z keeps the paths still consistent with
    # the choices so far, and the domains must still admit a matching
    def search(domains: dict[str, list[int]]) -> bool:
        if not domains:
            return True
        z = min(domains, key=lambda v: len(domains[v]))
        rest = {v: dom for v, dom in domains.items() if v != z}
        for i in domains[z]:
            lam = cands[z][i].edges[-1].param
            pruned = {
                v: [j for j in dom if cands[v][j].edges[-1].param != lam and fits(z, i, v, j)]
                for v, dom in rest.items()
            }
            if any(not dom for dom in pruned.values()):
                continue
            if not _has_matching([{cands[v][j].edges[-1].param for j in dom} for v, dom in pruned.items()]):
                continue
            chosen.append((z, i))
            if search(pruned):
                return True
            chosen.pop()
        return False

    if not search({z: list(range(len(cands[z]))) for z in zs}):
        return None
    by_z = {z: Witness(z, cands[z][i], by_param[cands[z][i].edges[-1].param]) for z, i in chosen}
    return WitnessSet(y, tuple(by_z[z] for z in zs))


def all_shallower(d: CausalDiagram, zs: Sequence[str], y: str) -> bool:
    """Every member of ``zs`` lies strictly above ``y`` in depth."""
    dy = depth(d, y)
    return all(depth(d, z) < dy for z in zs)


def iter_auxiliary_sets(
    d: CausalDiagram, y: str, order: Sequence[str] | None = None
) -> Iterator[tuple[tuple[str, ...], WitnessSet]]:
    """Lazily yield auxiliary sets for ``y`` with their witnesses.

    Sets whose members all lie strictly shallower than ``y`` come first. Each
    group is enumerated as combinations over the reversed ordering, so
    variables nearest to ``y`` are tried first.
    """
    order = ordering_delta(d) if order is None else tuple(order)
    inc = inc_set(d, y, order)
    if not inc:
        raise EmptyIncSet(y)
    k = len(inc)
    dy = depth(d, y)
    others = [v for v in reversed(order) if v != y]
    shallow = [v for v in others if depth(d, v) < dy]
    for zs in combinations(shallow, k):
        w = find_witness(d, zs, y, order)
        if w is not None:
            yield zs, w
    shallow_set = set(shallow)
    for zs in combinations(others, k):
        if shallow_set.issuperset(zs):
            continue
        w = find_witness(d, zs, y, order)
        if w is not None:
            yield zs, w


def find_auxiliary_set(
    d: CausalDiagram, y: str, order: Sequence[str] | None = None
) -> list[tuple[tuple[str, ...], WitnessSet]]:
    return list(iter_auxiliary_sets(d, y, order))


def coefficient_matrix(
    d: CausalDiagram, zs: Sequence[str], y: str, seed: int, order: Sequence[str] | None = None
) -> np.ndarray:
    """The k-by-k matrix of the system at a standardized random parameterization."""
    system = build_phi_system(d, zs, y, order)
    std, _ = standardize(d, random_parameterization(d, seed))
    A, _ = system.evaluate(std.coeffs)
    return A


def _rank_margin(A: np.ndarray) -> tuple[float, float]:
    s = np.linalg.svd(A, compute_uv=False)
    threshold = RANK_TOL * max(float(s[0]) if s.size else 0.0, 1.0)
    return (float(s[-1]) if s.size else 0.0), threshold


def numeric_rank_oracle(
    d: CausalDiagram, zs: Sequence[str], y: str, seed: int, order: Sequence[str] | None = None
) -> bool:
    """Generic full-rank test of the system for ``zs`` by singular values."""
    if len(zs) != len(inc_set(d, y, order)):
        raise ValueError("candidate set size must equal |Inc(Y)|")
    smin, thr = _rank_margin(coefficient_matrix(d, zs, y, seed, order))
    if thr / 10 < smin < thr * 10:
        retry = int(np.random.SeedSequence([seed, 1]).generate_state(1)[0])
        smin, thr = _rank_margin(coefficient_matrix(d, zs, y, retry, order))
    return smin > thr
