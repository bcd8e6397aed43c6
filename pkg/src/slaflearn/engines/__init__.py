"""SLAF update engines: SLAF0, factored literal SLAF, always-successful and known-precondition STRIPS."""

from .factored import LiteralSlafTable, factored_step, literal_slaf
from .fluent_factored import (
    AsEngine,
    BeliefRenderer,
    FluentFactoredBelief,
    GroundProvider,
    PropositionProvider,
    as_effect_update,
    as_observe,
)
from .pre import PreBelief, PreEngine, merge_common, pre_step
from .slaf0 import Slaf0Belief, slaf0_step
from .snapshot import dump_belief, load_belief

__all__ = [
    "LiteralSlafTable", "factored_step", "literal_slaf",
    "AsEngine", "BeliefRenderer", "FluentFactoredBelief", "GroundProvider", "PropositionProvider",
    "as_effect_update", "as_observe",
    "PreBelief", "PreEngine", "merge_common", "pre_step",
    "Slaf0Belief", "slaf0_step", "dump_belief", "load_belief",
]
