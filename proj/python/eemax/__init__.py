"""Maximum-norm a posteriori error estimates for extrapolated Euler time stepping."""

import json as _json

from ._eemax import (
    Breakdown,
    EtaFMode,
    Field,
    GreensBounds,
    GreenWeights,
    InitialApproximation,
    Mesh,
    OracleFailure,
    Problem,
    Reference,
    RunConfig,
    RunRecord,
    SplitPolicy,
    TimeGrid,
    Trajectory,
    builtin_problem,
    builtin_problem_names,
    compute_weights,
    emit_tables,
    error_at_T,
    estimate,
    load_problem,
    run_matrix,
    solve,
    solve_reference,
    table1_csv,
    table2_csv,
)
from ._eemax import problem_from_json as _problem_from_json


def problem_from_dict(description):
    """Build a problem from the same structure the JSON problem files use."""
    return _problem_from_json(_json.dumps(description))


__all__ = [name for name in dir() if not name.startswith("_")]
