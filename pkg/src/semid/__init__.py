"""Graphical identification of recursive linear structural equation models."""

from .diagram import (
    CausalDiagram,
    Edge,
    Path,
    build_diagram,
    depth,
    enumerate_unblocked_paths,
    inc_set,
    ordering_delta,
    points_to,
    subpath,
)
from .estimator import PathIdentifier
from .gcrit import (
    PhiSystem,
    WitnessSet,
    build_phi_system,
    check_g_criterion,
    find_auxiliary_set,
    find_witness,
    iter_auxiliary_sets,
    numeric_rank_oracle,
)
from .ident import DependenceGraph, Verdict, analyze, build_dependence_graph, dependence_cases
from .modelfile import ModelFile, dump_model, load_fixture, load_model, parse_model
from .recover import RecoveryReport, numeric_coefficients, recover_parameters, round_trip_verify, solve_system
from .wright import (
    CorrelationMatrix,
    Parameterization,
    PathPolynomial,
    decompose,
    eval_polynomial,
    implied_covariance,
    random_parameterization,
    standardize,
)

__version__ = "0.1.0"
