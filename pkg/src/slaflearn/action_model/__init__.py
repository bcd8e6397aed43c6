"""Ground transition semantics, the revised action vocabulary and the brute-force oracle."""

from .axioms import action_atoms, tau_eff, vocab_axioms
from .domain import (
    DomainDescription,
    Effect,
    GroundDomain,
    GroundVocabulary,
    State,
    StripsActionModel,
    apply,
    toy_domain,
)
from .oracle import (
    ModelSpace,
    OracleBelief,
    OracleStep,
    VectorOracle,
    enumerate_models_for,
    initial_belief,
    model_space,
    oracle_slaf,
)
from .tiny import TinyVocab, relation_of_interpretation, teff_tiny, th_of_relation

__all__ = [
    "action_atoms", "tau_eff", "vocab_axioms",
    "DomainDescription", "Effect", "GroundDomain", "GroundVocabulary", "State",
    "StripsActionModel", "apply", "toy_domain",
    "ModelSpace", "OracleBelief", "OracleStep", "VectorOracle", "enumerate_models_for",
    "initial_belief", "model_space", "oracle_slaf",
    "TinyVocab", "relation_of_interpretation", "teff_tiny", "th_of_relation",
]
