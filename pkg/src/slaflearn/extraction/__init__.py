"""Model extraction: belief to SAT instance, satisfying model to action-model rows, entailment queries."""

from .extract import (
    EffectRow,
    Label,
    SatInstance,
    SchemaActionModel,
    belief_to_cnf,
    bias_axioms,
    consistent_bias,
    decode,
    default_phase,
    emit_model,
    extract_model,
    ground_keys,
    group_axioms,
    make_instance,
    model_to_pddl,
    query_prop,
    render_belief,
    row_namer,
    schema_keys,
    schematize,
)
from .solver import DpllSolver, ExternalSolver, SolverResult

__all__ = [
    "EffectRow", "Label", "SatInstance", "SchemaActionModel", "belief_to_cnf", "bias_axioms",
    "consistent_bias", "decode", "default_phase", "emit_model", "extract_model", "ground_keys",
    "group_axioms", "make_instance", "model_to_pddl", "query_prop", "render_belief", "row_namer",
    "schema_keys", "schematize", "DpllSolver", "ExternalSolver", "SolverResult",
]
