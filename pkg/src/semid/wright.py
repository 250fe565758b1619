"""Path-sum decomposition of correlations and the matrix form it must agree with.

Correlations are the data interface everywhere downstream: a raw
parameterization is pushed through :func:`standardize` once, and the
standardized parameters are what path polynomials are evaluated at.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .diagram import BIDIRECTED, CausalDiagram, enumerate_unblocked_paths, ordering_delta
from .exceptions import MissingParameter, NonPositiveDefinitePsi, RetriesExhausted

DEAD_ZONE = 0.05


@dataclass(frozen=True)
class PathPolynomial:
    """Sum of monomials; each term lists the parameter names of one path."""

    terms: tuple[tuple[str, ...], ...] = ()

    @classmethod
    def from_paths(cls, paths) -> "PathPolynomial":
        return cls(tuple(p.params for p in paths))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PathPolynomial") -> "PathPolynomial":
        return PathPolynomial(self.terms + other.terms)

    def times(self, param: str) -> "PathPolynomial":
        return PathPolynomial(tuple(t + (param,) for t in self.terms))

    def canonical(self) -> tuple[tuple[str, ...], ...]:
        """Order-free form for comparing polynomials term-for-term."""
        return tuple(sorted(tuple(sorted(t)) for t in self.terms))

    def variables(self) -> set[str]:
        return {p for t in self.terms for p in t}

    def degree_in(self, names: Iterable[str]) -> int:
        names = set(names)
        return max((sum(1 for p in t if p in names) for t in self.terms), default=0)

    def evaluate(self, values: Mapping[str, float]) -> float:
        return eval_polynomial(self, values)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join("*".join(t) if t else "1" for t in self.terms)


@dataclass(frozen=True)
class Parameterization:
    """Edge parameter values plus error variances (default 1)."""

    coeffs: Mapping[str, float]
    error_variances: Mapping[str, float] = field(default_factory=dict)

    def values(self) -> dict[str, float]:
        return dict(self.coeffs)

    def error_variance(self, v: str) -> float:
        return float(self.error_variances.get(v, 1.0))


class VariableMatrix:
    """Square matrix indexed by variable name."""

    def __init__(self, variables: Sequence[str], values):
        self.variables = tuple(variables)
        self.values = np.array(values, dtype=float)
        n = len(self.variables)
        if self.values.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got shape {self.values.shape}")
        self._pos = {v: i for i, v in enumerate(self.variables)}

    def __getitem__(self, pair: tuple[str, str]) -> float:
        x, y = pair
        return float(self.values[self._pos[x], self._pos[y]])

    def reordered(self, variables: Sequence[str]) -> "VariableMatrix":
        idx = [self._pos[v] for v in variables]
        return type(self)(variables, self.values[np.ix_(idx, idx)])

    def format(self, digits: int = 6) -> str:
        width = max([len(v) for v in self.variables] + [digits + 4])
        head = " " * width + " " + " ".join(v.rjust(width) for v in self.variables)
        rows = [head]
        for v, row in zip(self.variables, self.values):
            rows.append(v.rjust(width) + " " + " ".join(f"{x:{width}.{digits}f}" for x in row))
        return "\n".join(rows)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.variables)!r}, {self.values.tolist()!r})"


class CorrelationMatrix(VariableMatrix):
    def __init__(self, variables, values, tol: float = 1e-9):
        super().__init__(variables, values)
        if not np.allclose(self.values, self.values.T, atol=tol):
            raise ValueError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(self.values), 1.0, atol=tol):
            raise ValueError("correlation matrix must have a unit diagonal")


def decompose(d: CausalDiagram, x: str, y: str) -> PathPolynomial:
    """Correlation of ``x`` and ``y`` as a sum over unblocked paths."""
    return PathPolynomial.from_paths(enumerate_unblocked_paths(d, x, y))


def eval_polynomial(poly: PathPolynomial, values: Mapping[str, float]) -> float:
    total = 0.0
    for term in poly.terms:
        prod = 1.0
        for p in term:
            try:
                prod *= values[p]
            except KeyError:
                raise MissingParameter(p) from None
        total += prod
    return total


def _matrices(d: CausalDiagram, pi: Parameterization, order):
    pos = {v: i for i, v in enumerate(order)}
    n = len(order)
    C = np.zeros((n, n))
    Psi = np.diag([pi.error_variance(v) for v in order])
    for e in d.edges:
        try:
            val = float(pi.coeffs[e.param])
        except KeyError:
            raise MissingParameter(e.param) from None
        i, j = pos[e.a], pos[e.b]
        if e.kind == BIDIRECTED:
            Psi[i, j] = Psi[j, i] = val
        else:
            C[j, i] = val
    return C, Psi


def _check_psi(Psi: np.ndarray) -> None:
    if Psi.size == 0:
        return
    try:
        np.linalg.cholesky(Psi)
    except np.linalg.LinAlgError:
        raise NonPositiveDefinitePsi("error covariance matrix is not positive definite") from None


def implied_covariance(d: CausalDiagram, pi: Parameterization) -> VariableMatrix:
    """(I - C)^-1 Psi (I - C)^-T, rows and columns in depth order."""
    order = ordering_delta(d)
    C, Psi = _matrices(d, pi, order)
    _check_psi(Psi)
    B = np.linalg.inv(np.eye(len(order)) - C)
    Sigma = B @ Psi @ B.T
    return VariableMatrix(order, (Sigma + Sigma.T) / 2)


def standardize(d: CausalDiagram, pi: Parameterization) -> tuple[Parameterization, CorrelationMatrix]:
    """Rescale every variable to unit variance.

    Returns the standardized parameterization together with the implied
    correlation matrix.
    """
    sigma = implied_covariance(d, pi)
    sd = {v: np.sqrt(sigma[v, v]) for v in sigma.variables}
    coeffs = {}
    for e in d.edges:
        val = float(pi.coeffs[e.param])
        if e.kind == BIDIRECTED:
            coeffs[e.param] = val / (sd[e.a] * sd[e.b])
        else:
            coeffs[e.param] = val * sd[e.a] / sd[e.b]
    errs = {v: pi.error_variance(v) / sd[v] ** 2 for v in d.variables}
    s = np.array([sd[v] for v in sigma.variables])
    R = sigma.values / np.outer(s, s)
    np.fill_diagonal(R, 1.0)
    return Parameterization(coeffs, errs), CorrelationMatrix(sigma.variables, R)


def _draw(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(rng.choice((-1.0, 1.0)) * rng.uniform(lo, hi))


def random_parameterization(
    d: CausalDiagram, seed: int, scale: float = 1.0, max_retries: int = 100
) -> Parameterization:
    """Seeded generic parameterization with unit error variances.

    Every magnitude is at least ``DEAD_ZONE * scale``. Bidirected magnitudes
    are capped so that every row of Psi is diagonally dominant.
    """
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    floor = DEAD_ZONE * scale
    degree = Counter()
    for e in d.bidirected_edges:
        degree[e.a] += 1
        degree[e.b] += 1
    bi_cap = min(scale, 0.95 / max(degree.values())) if degree else scale
    if bi_cap <= floor:
        raise RetriesExhausted("too many bidirected arcs at one variable for a dominant Psi")
    for _ in range(max_retries):
        coeffs = {}
        for e in d.edges:
            hi = bi_cap if e.kind == BIDIRECTED else scale
            coeffs[e.param] = _draw(rng, floor, hi)
        pi = Parameterization(coeffs, {v: 1.0 for v in d.variables})
        try:
            _check_psi(_matrices(d, pi, d.variables)[1])
        except NonPositiveDefinitePsi:
            continue
        return pi
    raise RetriesExhausted(f"no positive definite Psi after {max_retries} draws")


def correlation_from_params(d: CausalDiagram, values: Mapping[str, float]) -> CorrelationMatrix:
    """Correlation matrix given by path sums at already-standardized parameters."""
    order = ordering_delta(d)
    n = len(order)
    R = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            R[i, j] = R[j, i] = eval_polynomial(decompose(d, order[i], order[j]), values)
    return CorrelationMatrix(order, R)
