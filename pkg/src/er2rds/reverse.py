"""Reverse transformation: annotated relational schema back to an ER model.

Relations are classified purely from their shape: a leading underlined
attribute whose first three letters match the relation name marks a regular
entity relation; a single underlined attribute equal to some regular
relation's primary key marks a subtype relation; exactly two attributes,
both underlined, the second named like the relation, mark a multivalued
attribute relation; more than two attributes with exactly the first two
underlined mark a weak entity relation.  Foreign keys are recognized by
their suffix alone; a prefixed foreign key resurrects a subtype even when
the subtype never got a relation of its own.

Reversal is lossless up to documented normalizations, each reported as a
NORM diagnostic: element declaration order is rebuilt from schema order,
entity attributes come back as designated key, remaining keys, simple
attributes, multivalued attributes, and a weak entity's identifying
relationship is renamed ``<Name>Of``.  A model whose names collide with a
regenerated ``<Name>Of`` name cannot round-trip; such inputs are rejected
when the reversed model is re-emitted.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum

from .errors import DanglingFk, NoDesignatedKey
from .model import (
    Attribute,
    AttributeKind,
    CardinalityPair,
    Diagnostic,
    ERModel,
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
    designated_key,
    has_errors,
    leading_underline_count,
    name_prefix,
    ratio_class,
)


class RelationKind(Enum):
    REGULAR_ENTITY = "regular-entity"
    SUBTYPE = "subtype"
    MULTIVALUED = "multivalued"
    WEAK = "weak"
    RELATIONSHIP = "relationship"  # reserved; relationships never own relations


def _pk_owners(schema: RelationalSchema,
               regular: set[str]) -> tuple[dict[str, str], list[Diagnostic]]:
    """Map each primary-key name to the first regular relation owning it."""
    owners: dict[str, str] = {}
    diagnostics: list[Diagnostic] = []
    for relation in schema.relations:
        if relation.name not in regular:
            continue
        pk = relation.pk_name()
        if pk in owners:
            diagnostics.append(
                Diagnostic("CLASSIFY", Severity.WARNING,
                           f"relations {owners[pk]!r} and {relation.name!r} both "
                           f"own primary key {pk!r}; references resolve to "
                           f"{owners[pk]!r}", element=relation.name)
            )
            continue
        owners[pk] = relation.name
    return owners, diagnostics


def classify_relations(schema: RelationalSchema
                       ) -> tuple[dict[str, RelationKind], list[Diagnostic]]:
    """Classify every relation; unclassifiable ones yield an error diagnostic
    and stay out of the returned map."""
    kinds: dict[str, RelationKind] = {}
    diagnostics: list[Diagnostic] = []

    def unclassifiable(relation: Relation, why: str) -> None:
        diagnostics.append(
            Diagnostic("CLASSIFY", Severity.ERROR,
                       f"relation {relation.name!r} is unclassifiable: {why}",
                       element=relation.name)
        )

    shaped: list[Relation] = []
    for relation in schema.relations:
        lead = leading_underline_count(relation)
        if lead == 0:
            unclassifiable(relation, "no leading underlined attribute")
            continue
        if any(a.underlined for a in relation.attributes[lead:]):
            unclassifiable(relation, "underlined attribute after a non-underlined one")
            continue
        shaped.append(relation)
        if name_prefix(relation.attributes[0].name) == name_prefix(relation.name):
            kinds[relation.name] = RelationKind.REGULAR_ENTITY

    regular = {name for name, kind in kinds.items()
               if kind is RelationKind.REGULAR_ENTITY}
    owners, owner_diags = _pk_owners(schema, regular)
    diagnostics.extend(owner_diags)

    def dependent_kind(relation: Relation) -> tuple[RelationKind | None, str]:
        lead = leading_underline_count(relation)
        pk = relation.attributes[0].name
        owner = owners.get(pk)
        if owner is None or owner == relation.name:
            return None, (f"leading attribute {pk!r} is not the primary key of "
                          f"another regular relation")
        underlined = sum(1 for a in relation.attributes if a.underlined)
        if underlined == 1:
            return RelationKind.SUBTYPE, ""
        if lead == 2 and len(relation.attributes) == 2:
            if relation.attributes[1].name == relation.name:
                return RelationKind.MULTIVALUED, ""
            return None, ("two underlined attributes but the second is not "
                          "named after the relation")
        if lead == 2 and len(relation.attributes) > 2:
            return RelationKind.WEAK, ""
        return None, f"{underlined} underlined attributes fit no known shape"

    for relation in shaped:
        if relation.name in kinds:
            # A relation can match the regular-entity shape and a dependent
            # shape at once; the regular reading wins, with a warning.
            other, _ = dependent_kind(relation)
            if other is not None:
                diagnostics.append(
                    Diagnostic("CLASSIFY", Severity.WARNING,
                               f"relation {relation.name!r} also matches the "
                               f"{other.value} shape; treating it as a regular "
                               f"entity relation", element=relation.name)
                )
            continue
        kind, why = dependent_kind(relation)
        if kind is None:
            unclassifiable(relation, why)
        else:
            kinds[relation.name] = kind
    return kinds, diagnostics


@dataclass(frozen=True)
class FkReading:
    """One decoded foreign key: the relationship it encodes, plus the subtype
    its prefix names (if any)."""

    relationship: RelationshipType
    far_subtype: Subtype | None


def _payload_after(relation: Relation, index: int) -> tuple[Attribute, ...]:
    run: list[Attribute] = []
    for attr in relation.attributes[index + 1:]:
        if attr.suffix is not None or attr.underlined:
            break
        run.append(Attribute(attr.name))
    return tuple(run)


def interpret_fk(relation: Relation, attr: RdsAttribute,
                 schema: RelationalSchema) -> FkReading:
    """Decode one suffixed attribute of an entity or subtype relation.

    The holding relation is the near side with pair (v2, 1); the key's owner
    (prefix subtype, or the regular relation owning the key) is the far side
    with pair (v3, v4).  Plain attributes following the foreign key are the
    relationship's own attributes.  Raises DanglingFk when no regular
    relation owns the key name."""
    kinds, _ = classify_relations(schema)
    if kinds.get(relation.name) not in (RelationKind.REGULAR_ENTITY,
                                        RelationKind.SUBTYPE):
        raise DanglingFk(
            f"foreign key {attr.display_name()!r} sits in relation "
            f"{relation.name!r}, which is not an entity or subtype relation"
        )
    regular = {name for name, kind in kinds.items()
               if kind is RelationKind.REGULAR_ENTITY}
    owners, _ = _pk_owners(schema, regular)
    owner = owners.get(attr.name)
    if owner is None:
        raise DanglingFk(
            f"foreign key {attr.display_name()!r} in relation {relation.name!r} "
            f"matches no regular relation's primary key"
        )
    suffix = attr.suffix
    assert suffix is not None
    far_subtype = None
    far_participant = owner
    if attr.prefix is not None:
        far_participant = attr.prefix
        far_subtype = Subtype(attr.prefix, supertype=owner)
    index = relation.attributes.index(attr)
    near = RelationshipEndpoint(relation.name, CardinalityPair(suffix.v2, "1"))
    far = RelationshipEndpoint(far_participant,
                               CardinalityPair(suffix.v3, suffix.v4))
    rel = RelationshipType(suffix.relationship, (near, far),
                           _payload_after(relation, index))
    return FkReading(rel, far_subtype)


class _Rebuilder:
    """Accumulates model elements in schema discovery order."""

    def __init__(self, schema: RelationalSchema, kinds: dict[str, RelationKind]):
        self.schema = schema
        self.kinds = kinds
        self.regular = {name for name, kind in kinds.items()
                        if kind is RelationKind.REGULAR_ENTITY}
        self.owners, _ = _pk_owners(schema, self.regular)
        self.entity_attrs: dict[str, list[Attribute]] = {}
        self.subtypes: dict[str, Subtype] = {}
        self.weaks: list[WeakEntityType] = []
        self.relationships: dict[str, RelationshipType] = {}
        self.diagnostics: list[Diagnostic] = []

    def error(self, rule: str, message: str, element: str) -> None:
        self.diagnostics.append(
            Diagnostic(rule, Severity.ERROR, message, element=element)
        )

    def note(self, message: str, element: str | None = None) -> None:
        self.diagnostics.append(
            Diagnostic("NORM", Severity.WARNING, message, element=element)
        )

    def add_subtype(self, subtype: Subtype, via: str) -> None:
        known = self.subtypes.get(subtype.name)
        if known is None:
            self.subtypes[subtype.name] = subtype
            return
        if known.supertype != subtype.supertype:
            self.error("FK",
                       f"subtype {subtype.name!r} appears with supertypes "
                       f"{known.supertype!r} and {subtype.supertype!r}", via)
        elif subtype.attributes and not known.attributes:
            self.subtypes[subtype.name] = subtype

    def take_entity(self, relation: Relation) -> None:
        lead = leading_underline_count(relation)
        attrs = [Attribute(a.name, AttributeKind.KEY)
                 for a in relation.attributes[:lead]]
        for attr in relation.attributes[lead:]:
            if attr.suffix is not None:
                break
            attrs.append(Attribute(attr.name))
        self.entity_attrs[relation.name] = attrs

    def take_subtype_relation(self, relation: Relation) -> None:
        owner = self.owners[relation.attributes[0].name]
        intrinsics = _payload_after(relation, 0)
        self.add_subtype(Subtype(relation.name, owner, intrinsics), relation.name)

    def take_fk(self, relation: Relation, attr: RdsAttribute) -> None:
        try:
            reading = interpret_fk(relation, attr, self.schema)
        except DanglingFk as exc:
            self.error("FK", str(exc), relation.name)
            return
        rel = reading.relationship
        if rel.name in self.relationships:
            self.error("FK",
                       f"relationship {rel.name!r} is encoded by more than one "
                       f"foreign key", relation.name)
            return
        if reading.far_subtype is not None:
            prefix = reading.far_subtype.name
            prefix_kind = self.kinds.get(prefix)
            if prefix_kind not in (None, RelationKind.SUBTYPE):
                self.error("FK",
                           f"prefix {prefix!r} names a {prefix_kind.value} "
                           f"relation", relation.name)
                return
            self.add_subtype(reading.far_subtype, relation.name)
        self.relationships[rel.name] = rel

    def take_multivalued(self, relation: Relation) -> None:
        owner = self.owners[relation.attributes[0].name]
        self.entity_attrs[owner].append(
            Attribute(relation.name, AttributeKind.MULTIVALUED)
        )

    def take_weak(self, relation: Relation) -> None:
        if any(a.suffix is not None for a in relation.attributes):
            self.error("FK",
                       f"weak entity relation {relation.name!r} carries an "
                       f"unexpected foreign key", relation.name)
            return
        owner = self.owners[relation.attributes[0].name]
        identifying = relation.name + "Of"
        self.note(f"identifying relationship of weak entity {relation.name!r} "
                  f"regenerated as {identifying!r}", relation.name)
        self.weaks.append(
            WeakEntityType(
                relation.name, owner, identifying,
                Attribute(relation.attributes[1].name, AttributeKind.PARTIAL_KEY),
                tuple(Attribute(a.name) for a in relation.attributes[2:]),
            )
        )

    def build(self) -> ERModel:
        entities = tuple(
            RegularEntityType(name, tuple(attrs))
            for name, attrs in self.entity_attrs.items()
        )
        return ERModel(entities, tuple(self.subtypes.values()),
                       tuple(self.weaks), tuple(self.relationships.values()))


def reverse_transform(schema: RelationalSchema
                      ) -> tuple[ERModel | None, list[Diagnostic]]:
    """Rebuild the source model; returns (model, diagnostics), model None when
    classification or interpretation fails."""
    kinds, diagnostics = classify_relations(schema)
    if has_errors(diagnostics):
        return None, diagnostics
    rebuilder = _Rebuilder(schema, kinds)

    for relation in schema.relations:
        if kinds[relation.name] is RelationKind.REGULAR_ENTITY:
            rebuilder.take_entity(relation)
    for relation in schema.relations:
        kind = kinds[relation.name]
        if kind is RelationKind.SUBTYPE:
            rebuilder.take_subtype_relation(relation)
        if kind in (RelationKind.REGULAR_ENTITY, RelationKind.SUBTYPE):
            for attr in relation.attributes:
                if attr.suffix is not None:
                    rebuilder.take_fk(relation, attr)
        elif kind is RelationKind.MULTIVALUED:
            if any(a.suffix is not None for a in relation.attributes):
                rebuilder.error("FK",
                                f"multivalued relation {relation.name!r} carries "
                                f"an unexpected foreign key", relation.name)
            else:
                rebuilder.take_multivalued(relation)
        elif kind is RelationKind.WEAK:
            rebuilder.take_weak(relation)

    rebuilder.note("element declaration order reconstructed from schema order")
    rebuilder.note("entity attribute order reconstructed from relation order: "
                   "designated key first, multivalued attributes last")
    diagnostics.extend(rebuilder.diagnostics)
    if has_errors(diagnostics):
        return None, diagnostics
    return rebuilder.build(), diagnostics


def reconstruct_sog_choices(schema: RelationalSchema) -> dict[str, str]:
    """Recover which side each one-to-one foreign key landed on: the holding
    relation's name is the chosen participant."""
    choices: dict[str, str] = {}
    for relation in schema.relations:
        for attr in relation.attributes:
            if attr.suffix is not None and attr.suffix.v4 == "1":
                choices[attr.suffix.relationship] = relation.name
    return choices


# --------------------------------------------------------------------------
# Normalization and comparison


def normalize_model(model: ERModel) -> ERModel:
    """Apply the rewrites reversal cannot avoid, so that a source model can
    be compared against its round-tripped self: entity attributes reordered
    (designated key, remaining keys, simples, multis) and weak identifying
    relationships renamed ``<Name>Of``."""
    entities = []
    for entity in model.entities:
        try:
            first = designated_key(entity)
        except NoDesignatedKey:
            first = None
        keys = [k for k in entity.keys() if k is not first]
        if first is not None:
            keys.insert(0, first)
        attrs = (*keys, *entity.simple_attributes(),
                 *entity.multivalued_attributes())
        entities.append(RegularEntityType(entity.name, attrs))
    weaks = tuple(
        dataclasses.replace(w, identifying_relationship=w.name + "Of")
        for w in model.weak_entities
    )
    return ERModel(tuple(entities), model.subtypes, weaks, model.relationships)


def _canonical_relationship(rel: RelationshipType) -> RelationshipType:
    ratio = ratio_class(rel)
    if ratio.kind is RatioKind.ONE_TO_MANY:
        ordered = (rel.endpoints[ratio.n_side], rel.endpoints[1 - ratio.n_side])
    else:
        ordered = tuple(sorted(rel.endpoints, key=lambda ep: ep.participant))
    return dataclasses.replace(rel, endpoints=ordered)


def canonical_model(model: ERModel) -> ERModel:
    """Order-insensitive form: element lists sorted by name, relationship
    endpoints in canonical order (N-side first, else lexicographic).  Used
    for comparisons only; emission never canonicalizes."""
    by_name = lambda element: element.name
    return ERModel(
        tuple(sorted(model.entities, key=by_name)),
        tuple(sorted(model.subtypes, key=by_name)),
        tuple(sorted(model.weak_entities, key=by_name)),
        tuple(sorted((_canonical_relationship(r) for r in model.relationships),
                     key=by_name)),
    )


def model_diff(expected: ERModel, actual: ERModel) -> list[str]:
    """Field-by-field differences between two canonicalized models."""
    differences: list[str] = []

    def walk(path: str, left, right) -> None:
        if isinstance(left, dict) and isinstance(right, dict):
            for key in sorted(set(left) | set(right)):
                walk(f"{path}.{key}", left.get(key), right.get(key))
        elif isinstance(left, (tuple, list)) and isinstance(right, (tuple, list)):
            if len(left) != len(right):
                differences.append(
                    f"{path}: {len(left)} elements expected, {len(right)} found"
                )
                return
            for index, (l, r) in enumerate(zip(left, right)):
                walk(f"{path}[{index}]", l, r)
        elif left != right:
            differences.append(f"{path}: expected {left!r}, found {right!r}")

    walk("model",
         dataclasses.asdict(canonical_model(expected)),
         dataclasses.asdict(canonical_model(actual)))
    return differences
