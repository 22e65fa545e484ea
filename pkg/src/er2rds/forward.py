"""Forward transformation: ER model to annotated relational schema.

Six steps run in a fixed order.  Regular entity types become relations
first, then qualifying subtypes; afterwards one-to-many relationships,
one-to-one relationships involving a subtype, multivalued attributes and
weak entity types are handled, each step appending foreign keys or new
relations.  Foreign keys carry a bracketed suffix naming the relationship
and three cardinality variables, so the whole transformation stays
reversible.

Ordering rules that the reverse direction depends on:

* relations are created in declaration order (entities before subtypes);
* a relation that absorbs a prefixed foreign key during the one-to-one step
  moves to the end of the schema; this is what lets a re-derived schema
  reproduce its source byte-for-byte even though entity relations are
  always created before subtype relations;
* the multivalued step walks owner relations in current schema order, the
  other steps walk model elements in declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BadSideChoice,
    MissingOwnerRelation,
    MissingSupertypeRelation,
    NameCollision,
    NoChoosableRelation,
    PrerequisiteFailed,
    SchemaInvariantError,
    UnsupportedParticipant,
)
from .model import (
    Attribute,
    ERModel,
    FkSuffix,
    RatioKind,
    RdsAttribute,
    RegularEntityType,
    Relation,
    RelationalSchema,
    RelationshipEndpoint,
    RelationshipType,
    Subtype,
    WeakEntityType,
    check_schema,
    designated_key,
    has_errors,
    ratio_class,
)
from .rds_text import render_relation
from .validator import validate_notation

STEP_REGULAR = "REG"
STEP_SUBTYPE = "SUB"
STEP_ONE_TO_MANY = "GNG"
STEP_ONE_TO_ONE = "SOG"
STEP_MULTIVALUED = "MVA"
STEP_WEAK = "WAK"


@dataclass(frozen=True)
class TransformConfig:
    """Knobs for the transformation.

    ``sog_choice`` maps a one-to-one relationship name to the participant
    whose relation takes the foreign key.  Relationships not in the map fall
    back to the default policy: the subtype's relation when it exists,
    otherwise the regular entity's; ``prefer_regular`` flips that default.
    ``extensions`` additionally lets the one-to-many step accept subtype
    endpoints.
    """

    sog_choice: dict[str, str] = field(default_factory=dict)
    prefer_regular: bool = False
    extensions: bool = False


@dataclass(frozen=True)
class TraceEntry:
    step: str
    subject: str
    relation: str
    schema_after: tuple[str, ...]


def transform_regular(entity: RegularEntityType) -> Relation:
    """Entity to relation: designated key first, remaining keys, then simple
    attributes; multivalued attributes are left for their own step."""
    designated = designated_key(entity)
    attributes = [RdsAttribute(designated.name, underlined=True)]
    attributes += [
        RdsAttribute(key.name, underlined=True)
        for key in entity.keys() if key is not designated
    ]
    attributes += [RdsAttribute(a.name) for a in entity.simple_attributes()]
    return Relation(entity.name, attributes)


def subtype_needs_relation(subtype: Subtype, model: ERModel,
                           cfg: TransformConfig) -> bool:
    """A subtype gets its own relation iff it has an intrinsic attribute,
    sits at the N-side of a one-to-many relationship, or an explicit side
    choice routes a one-to-one foreign key into it.  Evaluated before the
    subtype step runs, so the one-to-one step never needs a relation that
    was not created."""
    if subtype.attributes:
        return True
    for rel in model.relationships_involving(subtype.name):
        ratio = ratio_class(rel)
        if (ratio.kind is RatioKind.ONE_TO_MANY
                and rel.endpoints[ratio.n_side].participant == subtype.name):
            return True
        if (ratio.kind is RatioKind.ONE_TO_ONE
                and cfg.sog_choice.get(rel.name) == subtype.name):
            return True
    return False


def transform_subtype(subtype: Subtype, schema: RelationalSchema) -> Relation:
    """Subtype to relation keyed by its supertype's propagated key."""
    supertype_relation = schema.find(subtype.supertype)
    if supertype_relation is None:
        raise MissingSupertypeRelation(
            f"subtype {subtype.name!r} transformed before supertype "
            f"{subtype.supertype!r}"
        )
    attributes = [RdsAttribute(supertype_relation.pk_name(), underlined=True)]
    attributes += [RdsAttribute(a.name) for a in subtype.attributes]
    return Relation(subtype.name, attributes)


def _append_attribute(relation: Relation, attr: RdsAttribute) -> None:
    if any(a.display_name() == attr.display_name() for a in relation.attributes):
        raise SchemaInvariantError(
            f"attribute {attr.display_name()!r} already exists in relation "
            f"{relation.name!r}"
        )
    relation.attributes.append(attr)


def _fk_identity(participant: str, model: ERModel,
                 schema: RelationalSchema) -> tuple[str, str | None]:
    """Foreign-key name and prefix for the side whose key is propagated.

    For a regular entity the key of its own relation travels unprefixed.
    For a subtype the supertype's key travels, prefixed with the subtype
    name so the reader can tell which subtype the reference narrows to."""
    subtype = model.subtype(participant)
    if subtype is None:
        relation = schema.find(participant)
        if relation is None:
            raise UnsupportedParticipant(
                f"participant {participant!r} has no relation to take a key from"
            )
        return relation.pk_name(), None
    supertype_relation = schema.find(subtype.supertype)
    if supertype_relation is None:
        raise MissingSupertypeRelation(
            f"subtype {participant!r} referenced before supertype "
            f"{subtype.supertype!r} was transformed"
        )
    return supertype_relation.pk_name(), subtype.name


def _relationship_payload(rel: RelationshipType) -> list[RdsAttribute]:
    return [RdsAttribute(a.name) for a in rel.attributes]


def transform_one_to_many(rel: RelationshipType, schema: RelationalSchema,
                          model: ERModel, cfg: TransformConfig) -> Relation:
    """Put the 1-side's key into the N-side's relation.

    The suffix records the minimum written nearest the N-side (its maximum
    is 1 by classification and is dropped) and the far side's full pair.
    Returns the modified relation."""
    ratio = ratio_class(rel)
    n_end = rel.endpoints[ratio.n_side]
    far_end = rel.endpoints[1 - ratio.n_side]
    if not cfg.extensions:
        for endpoint in rel.endpoints:
            if model.subtype(endpoint.participant) is not None:
                raise UnsupportedParticipant(
                    f"relationship {rel.name!r} has subtype endpoint "
                    f"{endpoint.participant!r}; enable extensions to allow it"
                )
    host = schema.find(n_end.participant)
    if host is None:
        raise UnsupportedParticipant(
            f"N-side participant {n_end.participant!r} of {rel.name!r} has no relation"
        )
    fk_name, fk_prefix = _fk_identity(far_end.participant, model, schema)
    suffix = FkSuffix(rel.name, n_end.pair.min, far_end.pair.min, far_end.pair.max)
    _append_attribute(host, RdsAttribute(fk_name, prefix=fk_prefix, suffix=suffix))
    for attr in _relationship_payload(rel):
        _append_attribute(host, attr)
    return host


def _resolve_side(rel: RelationshipType, model: ERModel, schema: RelationalSchema,
                  cfg: TransformConfig) -> RelationshipEndpoint:
    """Pick the endpoint whose relation absorbs the one-to-one foreign key."""
    subtype_end = next(
        (ep for ep in rel.endpoints if model.subtype(ep.participant) is not None), None
    )
    regular_end = next(
        (ep for ep in rel.endpoints if model.entity(ep.participant) is not None), None
    )
    if subtype_end is None or regular_end is None:
        raise UnsupportedParticipant(
            f"one-to-one relationship {rel.name!r} must relate a subtype to a "
            f"regular entity type"
        )
    explicit = cfg.sog_choice.get(rel.name)
    if explicit is not None:
        if explicit not in rel.participants():
            raise BadSideChoice(
                f"{explicit!r} is not a participant of relationship {rel.name!r}"
            )
        return subtype_end if explicit == subtype_end.participant else regular_end
    if not cfg.prefer_regular and schema.find(subtype_end.participant) is not None:
        return subtype_end
    return regular_end


def transform_one_to_one_sub(rel: RelationshipType, schema: RelationalSchema,
                             model: ERModel, cfg: TransformConfig) -> Relation:
    """Put the far side's key into the chosen relation.

    When the far side is the subtype (the regular side was chosen), the key
    is the supertype's and gets the subtype name as prefix; a relation that
    absorbs such a prefixed key moves to the end of the schema.  The move
    keeps re-derived schemas byte-identical to their source: the subtype
    relations a reversal discovers first are always created before the
    relationship steps run, so listing order can only be reconciled by
    moving the absorbing relation."""
    chosen_end = _resolve_side(rel, model, schema, cfg)
    far_end = next(ep for ep in rel.endpoints if ep is not chosen_end)
    chosen = schema.find(chosen_end.participant)
    if chosen is None:
        raise NoChoosableRelation(
            f"side {chosen_end.participant!r} of {rel.name!r} has no relation"
        )
    fk_name, fk_prefix = _fk_identity(far_end.participant, model, schema)
    suffix = FkSuffix(rel.name, chosen_end.pair.min, far_end.pair.min,
                      far_end.pair.max)
    _append_attribute(chosen, RdsAttribute(fk_name, prefix=fk_prefix, suffix=suffix))
    for attr in _relationship_payload(rel):
        _append_attribute(chosen, attr)
    if fk_prefix is not None:
        schema.relations.remove(chosen)
        schema.relations.append(chosen)
    return chosen


def transform_multivalued(entity: RegularEntityType, attr: Attribute,
                          schema: RelationalSchema) -> Relation:
    """One relation per multivalued attribute, named after the attribute and
    keyed by owner key plus value."""
    owner = schema.find(entity.name)
    if owner is None:
        raise MissingOwnerRelation(
            f"multivalued attribute {attr.name!r} reached before owner "
            f"{entity.name!r} was transformed"
        )
    if schema.find(attr.name) is not None:
        raise NameCollision(
            f"multivalued attribute {attr.name!r} of {entity.name!r} collides "
            f"with an existing relation"
        )
    return Relation(attr.name, [
        RdsAttribute(owner.pk_name(), underlined=True),
        RdsAttribute(attr.name, underlined=True),
    ])


def transform_weak(weak: WeakEntityType, schema: RelationalSchema) -> Relation:
    """Weak entity to relation keyed by owner key plus partial key."""
    owner = schema.find(weak.owner)
    if owner is None:
        raise MissingOwnerRelation(
            f"weak entity {weak.name!r} reached before owner {weak.owner!r} "
            f"was transformed"
        )
    attributes = [
        RdsAttribute(owner.pk_name(), underlined=True),
        RdsAttribute(weak.partial_key.name, underlined=True),
    ]
    attributes += [RdsAttribute(a.name) for a in weak.attributes]
    return Relation(weak.name, attributes)


def _check_side_choices(model: ERModel, cfg: TransformConfig) -> None:
    for rel_name, participant in cfg.sog_choice.items():
        rel = model.relationship(rel_name)
        if rel is None:
            raise BadSideChoice(f"unknown relationship {rel_name!r} in side choice")
        if ratio_class(rel).kind is not RatioKind.ONE_TO_ONE:
            raise BadSideChoice(
                f"relationship {rel_name!r} is not one-to-one; only one-to-one "
                f"relationships take a side choice"
            )
        if participant not in rel.participants():
            raise BadSideChoice(
                f"{participant!r} is not a participant of relationship {rel_name!r}"
            )


def transform_model(model: ERModel,
                    cfg: TransformConfig | None = None
                    ) -> tuple[RelationalSchema, list[TraceEntry]]:
    """Run all six steps; returns the schema and a step-by-step trace.

    Raises PrerequisiteFailed when notation validation finds errors, and the
    step errors otherwise.  Each trace entry snapshots the rendered schema
    after its event, newest relation states included."""
    cfg = cfg or TransformConfig()
    diagnostics = validate_notation(model, allow_extensions=cfg.extensions)
    if has_errors(diagnostics):
        raise PrerequisiteFailed(diagnostics)
    _check_side_choices(model, cfg)

    schema = RelationalSchema()
    trace: list[TraceEntry] = []

    def record(step: str, subject: str, relation: Relation) -> None:
        snapshot = tuple(render_relation(r) for r in schema.relations)
        trace.append(TraceEntry(step, subject, relation.name, snapshot))

    for entity in model.entities:
        relation = transform_regular(entity)
        schema.relations.append(relation)
        record(STEP_REGULAR, entity.name, relation)

    for subtype in model.subtypes:
        if not subtype_needs_relation(subtype, model, cfg):
            continue
        relation = transform_subtype(subtype, schema)
        schema.relations.append(relation)
        record(STEP_SUBTYPE, subtype.name, relation)

    for rel in model.relationships:
        if ratio_class(rel).kind is RatioKind.ONE_TO_MANY:
            relation = transform_one_to_many(rel, schema, model, cfg)
            record(STEP_ONE_TO_MANY, rel.name, relation)

    for rel in model.relationships:
        if ratio_class(rel).kind is RatioKind.ONE_TO_ONE:
            relation = transform_one_to_one_sub(rel, schema, model, cfg)
            record(STEP_ONE_TO_ONE, rel.name, relation)

    # Walk owner relations in schema order, not declaration order: the
    # one-to-one step may have reordered the schema, and reversal derives
    # declaration order from schema order.
    for relation in list(schema.relations):
        entity = model.entity(relation.name)
        if entity is None:
            continue
        for attr in entity.multivalued_attributes():
            created = transform_multivalued(entity, attr, schema)
            schema.relations.append(created)
            record(STEP_MULTIVALUED, f"{entity.name}.{attr.name}", created)

    for weak in model.weak_entities:
        created = transform_weak(weak, schema)
        schema.relations.append(created)
        record(STEP_WEAK, weak.name, created)

    check_schema(schema)
    return schema, trace
