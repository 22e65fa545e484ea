"""Domain types shared by every stage of the ER-to-relational toolchain.

The ER side describes the conceptual schema: regular entity types, subtypes,
weak entity types and binary relationships, each carrying named attributes.
Cardinality is expressed as look-here (min, max) pairs: the pair written
nearest to a participant bounds how many relationship instances one of its
instances may join.  The relational side describes the produced database
schema: relations whose attributes may be underlined (primary key part),
carry a subtype prefix, or carry a bracketed foreign-key suffix recording
the relationship name and three cardinality variables.

Both sides are plain dataclasses with no I/O.  The two derived operations
that the rest of the pipeline leans on live here as well: classifying a
relationship's cardinality ratio and picking an entity's designated key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import NoDesignatedKey, SchemaInvariantError

# Unbounded maximum in a cardinality pair; minima and maxima are kept as the
# strings "0" / "1" / "n" so they serialize without conversion.
MAX_MANY = "n"

# Designated keys are matched on the first three letters of the entity name.
NAME_PREFIX_LEN = 3


def name_prefix(name: str) -> str:
    return name[:NAME_PREFIX_LEN].casefold()


class AttributeKind(Enum):
    SIMPLE = "simple"
    KEY = "key"
    MULTIVALUED = "multi"
    PARTIAL_KEY = "partial"


@dataclass(frozen=True)
class Attribute:
    """A named attribute of an entity, subtype, weak entity or relationship."""

    name: str
    kind: AttributeKind = AttributeKind.SIMPLE


@dataclass(frozen=True)
class RegularEntityType:
    name: str
    attributes: tuple[Attribute, ...] = ()

    def keys(self) -> tuple[Attribute, ...]:
        return tuple(a for a in self.attributes if a.kind is AttributeKind.KEY)

    def simple_attributes(self) -> tuple[Attribute, ...]:
        return tuple(a for a in self.attributes if a.kind is AttributeKind.SIMPLE)

    def multivalued_attributes(self) -> tuple[Attribute, ...]:
        return tuple(a for a in self.attributes if a.kind is AttributeKind.MULTIVALUED)


@dataclass(frozen=True)
class Subtype:
    """An entity subtype; carries only its intrinsic attributes."""

    name: str
    supertype: str
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class WeakEntityType:
    """An entity identified by its owner's key plus a partial key of its own."""

    name: str
    owner: str
    identifying_relationship: str
    partial_key: Attribute
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class CardinalityPair:
    """A look-here (min, max) participation bound; min in {0,1}, max in {1,n}."""

    min: str
    max: str


@dataclass(frozen=True)
class RelationshipEndpoint:
    """One relationship side: the participant plus the pair written nearest it."""

    participant: str
    pair: CardinalityPair


@dataclass(frozen=True)
class RelationshipType:
    name: str
    endpoints: tuple[RelationshipEndpoint, RelationshipEndpoint]
    attributes: tuple[Attribute, ...] = ()

    def participants(self) -> tuple[str, str]:
        return (self.endpoints[0].participant, self.endpoints[1].participant)


@dataclass(frozen=True)
class ERModel:
    """A complete source model; the four element lists keep declaration order."""

    entities: tuple[RegularEntityType, ...] = ()
    subtypes: tuple[Subtype, ...] = ()
    weak_entities: tuple[WeakEntityType, ...] = ()
    relationships: tuple[RelationshipType, ...] = ()

    def entity(self, name: str) -> RegularEntityType | None:
        return next((e for e in self.entities if e.name == name), None)

    def subtype(self, name: str) -> Subtype | None:
        return next((s for s in self.subtypes if s.name == name), None)

    def weak(self, name: str) -> WeakEntityType | None:
        return next((w for w in self.weak_entities if w.name == name), None)

    def relationship(self, name: str) -> RelationshipType | None:
        return next((r for r in self.relationships if r.name == name), None)

    def relationships_involving(self, participant: str) -> tuple[RelationshipType, ...]:
        return tuple(r for r in self.relationships if participant in r.participants())


class RatioKind(Enum):
    ONE_TO_ONE = "1:1"
    ONE_TO_MANY = "1:N"
    MANY_TO_MANY = "N:M"


@dataclass(frozen=True)
class Ratio:
    kind: RatioKind
    n_side: int | None = None  # endpoint index, set only for ONE_TO_MANY


def ratio_class(rel: RelationshipType) -> Ratio:
    """Classify a relationship from its two nearest pairs.

    1:1 when both maxima are 1, N:M when both are unbounded, otherwise 1:N
    with the N-side at the endpoint whose nearest maximum is 1.  Symmetric
    under endpoint swap apart from the reported index.
    """
    first, second = (ep.pair.max for ep in rel.endpoints)
    if first == "1" and second == "1":
        return Ratio(RatioKind.ONE_TO_ONE)
    if first == MAX_MANY and second == MAX_MANY:
        return Ratio(RatioKind.MANY_TO_MANY)
    return Ratio(RatioKind.ONE_TO_MANY, n_side=0 if first == "1" else 1)


def matching_keys(entity: RegularEntityType) -> tuple[Attribute, ...]:
    """Key attributes whose first three letters match the entity name's."""
    prefix = name_prefix(entity.name)
    return tuple(k for k in entity.keys() if name_prefix(k.name) == prefix)


def designated_key(entity: RegularEntityType) -> Attribute:
    """The key propagated into other relations; ties resolve to declaration order."""
    matches = matching_keys(entity)
    if not matches:
        raise NoDesignatedKey(
            f"entity {entity.name!r} has no key attribute whose first "
            f"{NAME_PREFIX_LEN} letters match the entity name"
        )
    return matches[0]


# --------------------------------------------------------------------------
# Relational side


@dataclass(frozen=True)
class FkSuffix:
    """Bracketed annotation on a foreign key: relationship name plus the
    minimum at the holding side and the (min, max) of the far side."""

    relationship: str
    v2: str
    v3: str
    v4: str


@dataclass(frozen=True)
class RdsAttribute:
    name: str
    underlined: bool = False
    prefix: str | None = None
    suffix: FkSuffix | None = None

    def display_name(self) -> str:
        return f"{self.prefix}-{self.name}" if self.prefix else self.name


@dataclass
class Relation:
    name: str
    attributes: list[RdsAttribute] = field(default_factory=list)

    def pk_name(self) -> str:
        # The designated key always lands in position 1.
        return self.attributes[0].name


@dataclass
class RelationalSchema:
    relations: list[Relation] = field(default_factory=list)

    def find(self, name: str) -> Relation | None:
        return next((r for r in self.relations if r.name == name), None)

    def names(self) -> list[str]:
        return [r.name for r in self.relations]


def leading_underline_count(relation: Relation) -> int:
    count = 0
    for attr in relation.attributes:
        if not attr.underlined:
            break
        count += 1
    return count


def check_schema(schema: RelationalSchema) -> None:
    """Assert the structural invariants every produced schema satisfies.

    Raises SchemaInvariantError on: duplicate relation names, an empty
    relation, a relation without underlined attributes, underlined
    attributes after a non-underlined one, a suffix on an underlined
    attribute, a prefix without a suffix, or duplicate display names.
    """
    seen_relations: set[str] = set()
    for relation in schema.relations:
        if relation.name in seen_relations:
            raise SchemaInvariantError(f"duplicate relation name {relation.name!r}")
        seen_relations.add(relation.name)
        if not relation.attributes:
            raise SchemaInvariantError(f"relation {relation.name!r} has no attributes")
        lead = leading_underline_count(relation)
        if lead == 0:
            raise SchemaInvariantError(
                f"relation {relation.name!r} has no underlined attribute"
            )
        seen_names: set[str] = set()
        for index, attr in enumerate(relation.attributes):
            where = f"{relation.name}.{attr.display_name()}"
            if attr.underlined and index >= lead:
                raise SchemaInvariantError(
                    f"underlined attribute after a non-underlined one at {where}"
                )
            if attr.underlined and attr.suffix is not None:
                raise SchemaInvariantError(f"underlined attribute with suffix at {where}")
            if attr.prefix is not None and attr.suffix is None:
                raise SchemaInvariantError(f"prefix without suffix at {where}")
            if attr.display_name() in seen_names:
                raise SchemaInvariantError(f"duplicate attribute {where}")
            seen_names.add(attr.display_name())


# --------------------------------------------------------------------------
# Diagnostics


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One finding about a source text or a model, tagged with a rule id."""

    rule_id: str
    severity: Severity
    message: str
    line: int | None = None
    column: int | None = None
    element: str | None = None


def has_errors(diagnostics) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def format_diagnostic(diag: Diagnostic, path: str) -> str:
    location = path
    if diag.line is not None:
        location += f":{diag.line}"
        if diag.column is not None:
            location += f":{diag.column}"
    text = f"{location}: {diag.severity.value}[{diag.rule_id}]: {diag.message}"
    if diag.element:
        text += f" ({diag.element})"
    return text
