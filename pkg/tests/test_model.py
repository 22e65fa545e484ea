import pytest

from er2rds import (
    Attribute,
    AttributeKind,
    CardinalityPair,
    Diagnostic,
    FkSuffix,
    NoDesignatedKey,
    RatioKind,
    RdsAttribute,
    RegularEntityType,
    Relation,
    RelationalSchema,
    RelationshipEndpoint,
    RelationshipType,
    SchemaInvariantError,
    Severity,
    check_schema,
    designated_key,
    format_diagnostic,
    ratio_class,
)
from er2rds.model import leading_underline_count, matching_keys, name_prefix


def rel(name, max_a, max_b, min_a="1", min_b="1"):
    return RelationshipType(name, (
        RelationshipEndpoint("A", CardinalityPair(min_a, max_a)),
        RelationshipEndpoint("B", CardinalityPair(min_b, max_b)),
    ))


class TestRatioClass:
    def test_one_to_one(self):
        assert ratio_class(rel("R", "1", "1")).kind is RatioKind.ONE_TO_ONE

    def test_many_to_many(self):
        assert ratio_class(rel("R", "n", "n")).kind is RatioKind.MANY_TO_MANY

    @pytest.mark.parametrize("max_a,max_b,n_side", [("1", "n", 0), ("n", "1", 1)])
    def test_one_to_many_sides(self, max_a, max_b, n_side):
        ratio = ratio_class(rel("R", max_a, max_b))
        assert ratio.kind is RatioKind.ONE_TO_MANY
        assert ratio.n_side == n_side

    def test_minimums_do_not_affect_the_ratio(self):
        ratio = ratio_class(rel("R", "1", "n", min_a="0", min_b="0"))
        assert ratio.kind is RatioKind.ONE_TO_MANY


class TestDesignatedKey:
    def test_picks_the_key_sharing_the_name_prefix(self):
        entity = RegularEntityType("Employee", (
            Attribute("SSN", AttributeKind.KEY),
            Attribute("EmpNo", AttributeKind.KEY),
        ))
        assert designated_key(entity).name == "EmpNo"

    def test_prefix_comparison_ignores_case(self):
        entity = RegularEntityType("Employee", (Attribute("EMPNO", AttributeKind.KEY),))
        assert designated_key(entity).name == "EMPNO"

    def test_tie_resolves_to_declaration_order(self):
        entity = RegularEntityType("Employee", (
            Attribute("EmpNo", AttributeKind.KEY),
            Attribute("EmpId", AttributeKind.KEY),
        ))
        assert designated_key(entity).name == "EmpNo"
        assert len(matching_keys(entity)) == 2

    def test_no_matching_key_raises(self):
        entity = RegularEntityType("Employee", (Attribute("SSN", AttributeKind.KEY),))
        with pytest.raises(NoDesignatedKey):
            designated_key(entity)

    def test_simple_attributes_never_qualify(self):
        entity = RegularEntityType("Employee", (
            Attribute("EmpNo"),
            Attribute("SSN", AttributeKind.KEY),
        ))
        with pytest.raises(NoDesignatedKey):
            designated_key(entity)


def test_name_prefix_is_three_casefolded_letters():
    assert name_prefix("Employee") == "emp"
    assert name_prefix("EMPNO") == "emp"
    assert name_prefix("Em") == "em"


class TestEntityAccessors:
    entity = RegularEntityType("Department", (
        Attribute("DepNo", AttributeKind.KEY),
        Attribute("Field"),
        Attribute("Location", AttributeKind.MULTIVALUED),
    ))

    def test_keys(self):
        assert [a.name for a in self.entity.keys()] == ["DepNo"]

    def test_simple_attributes(self):
        assert [a.name for a in self.entity.simple_attributes()] == ["Field"]

    def test_multivalued_attributes(self):
        assert [a.name for a in self.entity.multivalued_attributes()] == ["Location"]


class TestRdsAttributeDisplay:
    def test_plain(self):
        assert RdsAttribute("EmpNo").display_name() == "EmpNo"

    def test_prefixed(self):
        attr = RdsAttribute("EmpNo", prefix="Manager",
                            suffix=FkSuffix("Manages", "1", "1", "1"))
        assert attr.display_name() == "Manager-EmpNo"


def test_leading_underline_count():
    relation = Relation("Dependent", [
        RdsAttribute("EmpNo", underlined=True),
        RdsAttribute("Name", underlined=True),
        RdsAttribute("Sex"),
    ])
    assert leading_underline_count(relation) == 2
    assert relation.pk_name() == "EmpNo"


class TestCheckSchema:
    def good(self):
        return RelationalSchema([
            Relation("Employee", [RdsAttribute("EmpNo", underlined=True),
                                  RdsAttribute("Name")]),
        ])

    def test_accepts_a_well_formed_schema(self):
        check_schema(self.good())

    def test_rejects_duplicate_relation_names(self):
        schema = self.good()
        schema.relations.append(Relation("Employee", [RdsAttribute("X", underlined=True)]))
        with pytest.raises(SchemaInvariantError, match="duplicate relation"):
            check_schema(schema)

    def test_rejects_an_empty_relation(self):
        with pytest.raises(SchemaInvariantError, match="no attributes"):
            check_schema(RelationalSchema([Relation("Empty", [])]))

    def test_rejects_missing_underline(self):
        schema = RelationalSchema([Relation("E", [RdsAttribute("A")])])
        with pytest.raises(SchemaInvariantError, match="no underlined"):
            check_schema(schema)

    def test_rejects_underline_after_gap(self):
        schema = RelationalSchema([Relation("E", [
            RdsAttribute("A", underlined=True),
            RdsAttribute("B"),
            RdsAttribute("C", underlined=True),
        ])])
        with pytest.raises(SchemaInvariantError, match="after a non-underlined"):
            check_schema(schema)

    def test_rejects_suffix_on_underlined_attribute(self):
        schema = RelationalSchema([Relation("E", [
            RdsAttribute("A", underlined=True,
                         suffix=FkSuffix("R", "1", "1", "1")),
        ])])
        with pytest.raises(SchemaInvariantError, match="underlined attribute with suffix"):
            check_schema(schema)

    def test_rejects_prefix_without_suffix(self):
        schema = RelationalSchema([Relation("E", [
            RdsAttribute("A", underlined=True),
            RdsAttribute("B", prefix="Sub"),
        ])])
        with pytest.raises(SchemaInvariantError, match="prefix without suffix"):
            check_schema(schema)

    def test_rejects_duplicate_display_names(self):
        schema = RelationalSchema([Relation("E", [
            RdsAttribute("A", underlined=True),
            RdsAttribute("B"),
            RdsAttribute("B"),
        ])])
        with pytest.raises(SchemaInvariantError, match="duplicate attribute"):
            check_schema(schema)


class TestFormatDiagnostic:
    def test_full_location(self):
        diag = Diagnostic("R2.5.2", Severity.ERROR, "bad name", 3, 7, "entity X")
        assert format_diagnostic(diag, "m.er") == \
            "m.er:3:7: error[R2.5.2]: bad name (entity X)"

    def test_without_position_or_element(self):
        diag = Diagnostic("NORM", Severity.WARNING, "reordered")
        assert format_diagnostic(diag, "s.rds") == "s.rds: warning[NORM]: reordered"
