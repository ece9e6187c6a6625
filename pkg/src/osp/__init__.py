"""Object-spatial programming runtime: typed graphs, walkers and abilities."""

from .abilities import AbilityDef, ExecutionContext, Phase, matching_abilities, register_ability, run_visit_phase
from .engine import EdgeEntry, Engine, TraceEvent, Towards
from .errors import (
    AbilityError,
    AbilityRegistrationError,
    DeadReferenceError,
    EdgeCreationError,
    EngineError,
    ExpansionError,
    InvalidPathError,
    OSPError,
    PathError,
    SchemaError,
    StepBudgetExceeded,
    UnknownInstanceError,
)
from .graph import ArchetypeDef, Direction, Edge, FieldSpec, Instance, SystemState
from .path import (
    PathCollection,
    Violation,
    concat_paths,
    derive_path,
    expand_path,
    filter_path,
    make_path,
    path_query,
    slice_path,
    validate_path,
)
from .values import Ref, render_value

__version__ = "0.1.0"

__all__ = [
    "AbilityDef",
    "AbilityError",
    "AbilityRegistrationError",
    "ArchetypeDef",
    "concat_paths",
    "DeadReferenceError",
    "derive_path",
    "Direction",
    "Edge",
    "EdgeCreationError",
    "EdgeEntry",
    "Engine",
    "EngineError",
    "ExecutionContext",
    "expand_path",
    "ExpansionError",
    "FieldSpec",
    "filter_path",
    "Instance",
    "InvalidPathError",
    "make_path",
    "matching_abilities",
    "OSPError",
    "path_query",
    "PathCollection",
    "PathError",
    "Phase",
    "Ref",
    "register_ability",
    "render_value",
    "run_visit_phase",
    "SchemaError",
    "slice_path",
    "StepBudgetExceeded",
    "SystemState",
    "Towards",
    "TraceEvent",
    "UnknownInstanceError",
    "validate_path",
    "Violation",
]
