"""Numeric recovery of standardized parameters from a correlation matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .diagram import BIDIRECTED, CausalDiagram
from .exceptions import CoefficientUnavailable, NotIdentified, SingularSystem
from .gcrit import PhiSystem, build_phi_system
from .ident import COEFFICIENT_UNAVAILABLE, Verdict, analyze, dependence_cases
from .wright import CorrelationMatrix, random_parameterization, standardize

COND_CAP = 1e8

SUCCESS = "success"
SINGULAR = "singular-system"


def uses_shortcut(d: CausalDiagram, z: str, y: str, order: Sequence[str]) -> bool:
    """True when the row for ``z`` can be read straight off the correlations."""
    return dependence_cases(d, z, y, order) is None


def numeric_coefficients(
    d: CausalDiagram,
    system: PhiSystem,
    solved: Mapping[str, float],
    rho: CorrelationMatrix,
    order: Sequence[str],
) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrix and intercept column of ``system`` in numbers.

    Rows with no dependence case use ``rho`` directly: the coefficient of a
    directed ``X -> Y`` is ``rho[Z, X]``, that of a bidirected ``V <-> Y`` is 1
    when ``Z == V`` and 0 otherwise. Other rows evaluate their polynomials at
    the already solved parameters.
    """
    y = system.target
    k, m = len(system.rows), len(system.unknowns)
    A = np.zeros((k, m))
    a0 = np.zeros(k)
    missing: set[str] = set()
    for i, row in enumerate(system.rows):
        z = row.z
        if uses_shortcut(d, z, y, order):
            for j, e in enumerate(system.inc):
                if e.kind == BIDIRECTED:
                    A[i, j] = 1.0 if e.other(y) == z else 0.0
                else:
                    A[i, j] = rho[z, e.a]
            continue
        need = row.intercept.variables().union(*(c.variables() for c in row.coeffs))
        absent = need - set(solved)
        if absent:
            missing |= absent
            continue
        A[i] = [c.evaluate(solved) for c in row.coeffs]
        a0[i] = row.intercept.evaluate(solved)
    if missing:
        raise CoefficientUnavailable(sorted(missing))
    return A, a0


def solve_system(A, b, cond_cap: float = COND_CAP) -> tuple[np.ndarray, float]:
    """Solve ``A x = b``; refuses systems with condition number above ``cond_cap``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise SingularSystem(f"system is {A.shape[0]}x{A.shape[1]}, not square")
    cond = float(np.linalg.cond(A)) if A.size else 1.0
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularSystem(f"condition number {cond:.3g} exceeds {cond_cap:.0e}", cond)
    return np.linalg.solve(A, b), cond


@dataclass
class RecoveryReport:
    recovered: dict[str, float] = field(default_factory=dict)
    condition_numbers: dict[str, float] = field(default_factory=dict)
    status: str = SUCCESS
    failed_at: str | None = None
    message: str = ""
    max_abs_error: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == SUCCESS

    def compare(self, truth: Mapping[str, float]) -> float:
        self.max_abs_error = max((abs(self.recovered[p] - truth[p]) for p in truth), default=0.0)
        return self.max_abs_error


def recover_parameters(
    d: CausalDiagram, rho: CorrelationMatrix, verdict: Verdict, cond_cap: float = COND_CAP
) -> RecoveryReport:
    """Solve the per-variable systems along the verdict's schedule.

    Failures are reported through ``status`` rather than raised so that the
    caller keeps the partial solution.
    """
    if not verdict.identified:
        raise NotIdentified(verdict.headline())
    report = RecoveryReport()
    for y in verdict.schedule:
        zs, _ = verdict.assignment[y]
        system = build_phi_system(d, zs, y, verdict.order)
        try:
            A, a0 = numeric_coefficients(d, system, report.recovered, rho, verdict.order)
            b = np.array([rho[z, y] for z in zs]) - a0
            x, cond = solve_system(A, b, cond_cap)
        except CoefficientUnavailable as exc:
            report.status, report.failed_at, report.message = COEFFICIENT_UNAVAILABLE, y, str(exc)
            return report
        except SingularSystem as exc:
            report.status, report.failed_at, report.message = SINGULAR, y, str(exc)
            report.condition_numbers[y] = exc.condition_number
            return report
        report.condition_numbers[y] = cond
        report.recovered.update(zip(system.unknowns, map(float, x)))
    return report


@dataclass
class TrialResult:
    trial: int
    seed: int
    status: str
    error: float | None
    max_condition: float
    message: str = ""


@dataclass
class VerifySummary:
    trials: list[TrialResult]
    n_params: int
    tolerance: float

    @property
    def well_conditioned(self) -> list[TrialResult]:
        return [t for t in self.trials if t.status == SUCCESS]

    @property
    def ill_conditioned(self) -> list[TrialResult]:
        return [t for t in self.trials if t.status == SINGULAR]

    @property
    def worst_error(self) -> float:
        return max((t.error for t in self.well_conditioned), default=0.0)

    @property
    def failures(self) -> list[TrialResult]:
        """Trials that neither recovered within tolerance nor were flagged ill-conditioned."""
        return [
            t
            for t in self.trials
            if t.status == COEFFICIENT_UNAVAILABLE or (t.status == SUCCESS and t.error > self.tolerance)
        ]

    def as_dict(self) -> dict:
        return {
            "trials": len(self.trials),
            "parameters": self.n_params,
            "tolerance": self.tolerance,
            "worst_error": self.worst_error,
            "failures": len(self.failures),
            "ill_conditioned": len(self.ill_conditioned),
            "per_trial": [
                {
                    "trial": t.trial,
                    "seed": t.seed,
                    "status": t.status,
                    "error": t.error,
                    "max_condition": t.max_condition,
                    **({"message": t.message} if t.message else {}),
                }
                for t in self.trials
            ],
        }


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def round_trip_verify(
    d: CausalDiagram,
    seed: int,
    trials: int,
    scale: float = 1.0,
    verdict: Verdict | None = None,
    tolerance: float = 1e-6,
) -> VerifySummary:
    """Sample, standardize, recover, and compare, ``trials`` times."""
    verdict = analyze(d) if verdict is None else verdict
    if not verdict.identified:
        raise NotIdentified(verdict.headline())
    results = []
    for t in range(trials):
        s = trial_seed(seed, t)
        std, rho = standardize(d, random_parameterization(d, s, scale))
        report = recover_parameters(d, rho, verdict)
        conds = report.condition_numbers.values()
        max_cond = max(conds, default=1.0)
        if report.ok:
            err = report.compare({p: std.coeffs[p] for p in d.params})
            results.append(TrialResult(t, s, SUCCESS, err, max_cond))
        else:
            results.append(TrialResult(t, s, report.status, None, max_cond, f"{report.failed_at}: {report.message}"))
    return VerifySummary(results, len(d.params), tolerance)
