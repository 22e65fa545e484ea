"""er2rds: compile ER models to annotated relational schemas and back.

The pipeline is parse_er -> validate_notation -> transform_model ->
emit_rds, and in the other direction parse_rds -> reverse_transform ->
emit_er.  run_roundtrip chains both directions and checks that nothing was
lost.  All functions are pure apart from the CLI, which owns the I/O.
"""

from .er_text import emit_er, parse_er
from .errors import (
    BadSideChoice,
    DanglingFk,
    MissingOwnerRelation,
    MissingSupertypeRelation,
    NameCollision,
    NoChoosableRelation,
    NoDesignatedKey,
    PrerequisiteFailed,
    SchemaInvariantError,
    TransformError,
    UnsupportedParticipant,
)
from .forward import TraceEntry, TransformConfig, transform_model
from .model import (
    Attribute,
    AttributeKind,
    CardinalityPair,
    Diagnostic,
    ERModel,
    FkSuffix,
    RatioKind,
    RdsAttribute,
    RegularEntityType,
    Relation,
    RelationalSchema,
    RelationshipEndpoint,
    RelationshipType,
    Severity,
    Subtype,
    WeakEntityType,
    check_schema,
    designated_key,
    format_diagnostic,
    has_errors,
    ratio_class,
)
from .rds_text import emit_rds, parse_rds
from .reverse import (
    RelationKind,
    canonical_model,
    classify_relations,
    model_diff,
    normalize_model,
    reconstruct_sog_choices,
    reverse_transform,
)
from .validator import validate_notation

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "AttributeKind",
    "BadSideChoice",
    "CardinalityPair",
    "DanglingFk",
    "Diagnostic",
    "ERModel",
    "FkSuffix",
    "MissingOwnerRelation",
    "MissingSupertypeRelation",
    "NameCollision",
    "NoChoosableRelation",
    "NoDesignatedKey",
    "PrerequisiteFailed",
    "RatioKind",
    "RdsAttribute",
    "RegularEntityType",
    "Relation",
    "RelationalSchema",
    "RelationKind",
    "RelationshipEndpoint",
    "RelationshipType",
    "SchemaInvariantError",
    "Severity",
    "Subtype",
    "TraceEntry",
    "TransformConfig",
    "TransformError",
    "UnsupportedParticipant",
    "WeakEntityType",
    "canonical_model",
    "check_schema",
    "classify_relations",
    "designated_key",
    "emit_er",
    "emit_rds",
    "format_diagnostic",
    "has_errors",
    "model_diff",
    "normalize_model",
    "parse_er",
    "parse_rds",
    "ratio_class",
    "reconstruct_sog_choices",
    "reverse_transform",
    "transform_model",
    "validate_notation",
    "__version__",
]
