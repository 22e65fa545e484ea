import pytest

from er2rds import (
    Attribute,
    AttributeKind,
    BadSideChoice,
    ERModel,
    MissingOwnerRelation,
    MissingSupertypeRelation,
    NameCollision,
    PrerequisiteFailed,
    RdsAttribute,
    RegularEntityType,
    Relation,
    RelationalSchema,
    Subtype,
    TransformConfig,
    UnsupportedParticipant,
    WeakEntityType,
    emit_rds,
    parse_er,
    transform_model,
)
from er2rds.forward import (
    transform_multivalued,
    transform_one_to_many,
    transform_subtype,
    transform_weak,
)


def transform_text(text, cfg=None):
    model, diagnostics = parse_er(text, "test.er")
    assert model is not None, diagnostics
    return transform_model(model, cfg)


def states(trace, step):
    return [entry.schema_after for entry in trace if entry.step == step]


REG_DONE = (
    "Employee[_EmpNo_, Name, Address, Salary]",
    "Department[_DepNo_, _Name_, Field]",
    "Project[_ProNo_, Name, Description]",
)


@pytest.fixture(scope="module")
def trace(company_model):
    _, trace = transform_model(company_model)
    return trace


class TestStepByStep:
    def test_step_sequence(self, trace):
        assert [(e.step, e.subject) for e in trace] == [
            ("REG", "Employee"), ("REG", "Department"), ("REG", "Project"),
            ("SUB", "Engineer"),
            ("GNG", "Controls"),
            ("SOG", "Manages"), ("SOG", "Consult"),
            ("MVA", "Department.Location"),
            ("WAK", "Dependent"),
        ]

    def test_regular_entities_only(self, trace):
        assert states(trace, "REG")[-1] == REG_DONE

    def test_subtype_with_intrinsic_attribute_added(self, trace):
        assert states(trace, "SUB")[-1] == (*REG_DONE, "Engineer[_EmpNo_, Grade]")

    def test_one_to_many_appends_the_foreign_key(self, trace):
        assert states(trace, "GNG")[-1] == (
            "Employee[_EmpNo_, Name, Address, Salary]",
            "Department[_DepNo_, _Name_, Field]",
            "Project[_ProNo_, Name, Description, DepNo(Controls, 1, 1, n)]",
            "Engineer[_EmpNo_, Grade]",
        )

    def test_absorbing_a_prefixed_key_moves_the_relation_last(self, trace):
        assert states(trace, "SOG")[0] == (
            "Employee[_EmpNo_, Name, Address, Salary]",
            "Project[_ProNo_, Name, Description, DepNo(Controls, 1, 1, n)]",
            "Engineer[_EmpNo_, Grade]",
            "Department[_DepNo_, _Name_, Field, Manager-EmpNo(Manages, 1, 1, 1), StartDate]",
        )

    def test_absorbing_a_plain_key_keeps_the_position(self, trace):
        assert states(trace, "SOG")[1] == (
            "Employee[_EmpNo_, Name, Address, Salary]",
            "Project[_ProNo_, Name, Description, DepNo(Controls, 1, 1, n)]",
            "Engineer[_EmpNo_, Grade, ProNo(Consult, 1, 1, 1), Hours]",
            "Department[_DepNo_, _Name_, Field, Manager-EmpNo(Manages, 1, 1, 1), StartDate]",
        )

    def test_multivalued_attribute_gets_its_own_relation(self, trace):
        assert states(trace, "MVA")[-1][-1] == "Location[_DepNo_, _Location_]"

    def test_weak_entity_borrows_the_owner_key(self, trace):
        assert states(trace, "WAK")[-1][-1] == "Dependent[_EmpNo_, _Name_, Sex, Relation]"


class TestWholeSchema:
    def test_default_configuration_matches_the_golden_file(
            self, company_model, company_rds_text):
        schema, _ = transform_model(company_model)
        assert emit_rds(schema) == company_rds_text

    def test_transformation_is_deterministic(self, company_model):
        first, _ = transform_model(company_model)
        second, _ = transform_model(company_model)
        assert emit_rds(first) == emit_rds(second)

    def test_explicit_choice_of_the_default_side_changes_nothing(
            self, company_model, company_rds_text):
        cfg = TransformConfig(sog_choice={"Consult": "Engineer",
                                          "Manages": "Department"})
        schema, _ = transform_model(company_model, cfg)
        assert emit_rds(schema) == company_rds_text

    def test_choosing_the_entity_side_relocates_the_foreign_key(
            self, company_model, variant_rds_text):
        cfg = TransformConfig(sog_choice={"Consult": "Project"})
        schema, _ = transform_model(company_model, cfg)
        assert emit_rds(schema) == variant_rds_text

    def test_prefer_regular_routes_every_one_to_one_key_the_same_way(
            self, company_model, variant_rds_text):
        schema, _ = transform_model(company_model, TransformConfig(prefer_regular=True))
        assert emit_rds(schema) == variant_rds_text

    def test_choosing_a_subtype_side_creates_its_relation(self, company_model):
        cfg = TransformConfig(sog_choice={"Manages": "Manager"})
        schema, _ = transform_model(company_model, cfg)
        assert emit_rds(schema) == (
            "Employee[_EmpNo_, Name, Address, Salary]\n"
            "Department[_DepNo_, _Name_, Field]\n"
            "Project[_ProNo_, Name, Description, DepNo(Controls, 1, 1, n)]\n"
            "Engineer[_EmpNo_, Grade, ProNo(Consult, 1, 1, 1), Hours]\n"
            "Manager[_EmpNo_, DepNo(Manages, 1, 1, 1), StartDate]\n"
            "Location[_DepNo_, _Location_]\n"
            "Dependent[_EmpNo_, _Name_, Sex, Relation]\n"
        )


class TestSuffixVariables:
    @pytest.mark.parametrize("department_pair,project_pair,expected", [
        ("1..n", "1..1", "DepNo(Controls, 1, 1, n)"),
        ("0..n", "1..1", "DepNo(Controls, 1, 0, n)"),
        ("1..n", "0..1", "DepNo(Controls, 0, 1, n)"),
        ("0..n", "0..1", "DepNo(Controls, 0, 0, n)"),
    ])
    def test_minimums_travel_into_the_suffix(self, department_pair, project_pair,
                                             expected):
        schema, _ = transform_text(
            "entity Department { key DepNo; }\n"
            "entity Project { key ProNo; }\n"
            f"rel Controls (Department {department_pair}, Project {project_pair}) {{ }}"
        )
        assert emit_rds(schema) == (
            "Department[_DepNo_]\n"
            f"Project[_ProNo_, {expected}]\n"
        )

    def test_one_to_one_minimum_comes_from_the_chosen_side(self):
        schema, _ = transform_text(
            "entity Employee { key EmpNo; }\n"
            "entity Department { key DepNo; }\n"
            "subtype Manager of Employee { }\n"
            "rel Manages (Manager 0..1, Department 1..1) { }"
        )
        # Department hosts, so its minimum leads and Manager's pair follows
        assert "Manager-EmpNo(Manages, 1, 0, 1)" in emit_rds(schema)


class TestExtensions:
    def test_subtype_on_the_referenced_side_gets_a_prefixed_key_without_moving(self):
        schema, _ = transform_text(
            "entity Employee { key EmpNo; }\n"
            "entity Project { key ProNo; }\n"
            "subtype Engineer of Employee { attr Grade; }\n"
            "rel Works (Engineer 1..n, Project 1..1) { }",
            TransformConfig(extensions=True),
        )
        assert emit_rds(schema) == (
            "Employee[_EmpNo_]\n"
            "Project[_ProNo_, Engineer-EmpNo(Works, 1, 1, n)]\n"
            "Engineer[_EmpNo_, Grade]\n"
        )

    def test_attribute_free_subtype_hosting_the_key_gets_a_relation(self):
        schema, _ = transform_text(
            "entity Employee { key EmpNo; }\n"
            "entity Project { key ProNo; }\n"
            "subtype Engineer of Employee { }\n"
            "rel Works (Project 1..n, Engineer 1..1) { }",
            TransformConfig(extensions=True),
        )
        assert emit_rds(schema) == (
            "Employee[_EmpNo_]\n"
            "Project[_ProNo_]\n"
            "Engineer[_EmpNo_, ProNo(Works, 1, 1, n)]\n"
        )

    def test_subtype_endpoints_stay_rejected_without_the_flag(self):
        with pytest.raises(PrerequisiteFailed):
            transform_text(
                "entity Employee { key EmpNo; }\n"
                "entity Project { key ProNo; }\n"
                "subtype Engineer of Employee { attr Grade; }\n"
                "rel Works (Engineer 1..n, Project 1..1) { }"
            )


class TestConfigErrors:
    def test_notation_errors_abort_with_their_diagnostics(self):
        with pytest.raises(PrerequisiteFailed) as info:
            transform_text(
                "entity Alpha { key AlpNo; }\n"
                "entity Bravo { key BraNo; }\n"
                "rel Grove (Alpha 1..n, Bravo 0..n) { }"
            )
        assert any(d.rule_id == "SUBSET" for d in info.value.diagnostics)

    def test_unknown_relationship_in_a_side_choice(self, company_model):
        with pytest.raises(BadSideChoice, match="Ghost"):
            transform_model(company_model, TransformConfig(sog_choice={"Ghost": "Project"}))

    def test_side_choice_must_name_a_participant(self, company_model):
        with pytest.raises(BadSideChoice, match="Department"):
            transform_model(company_model,
                            TransformConfig(sog_choice={"Consult": "Department"}))

    def test_side_choice_only_applies_to_one_to_one_relationships(self, company_model):
        with pytest.raises(BadSideChoice, match="Controls"):
            transform_model(company_model,
                            TransformConfig(sog_choice={"Controls": "Project"}))


class TestStepErrors:
    def test_multivalued_attribute_name_clashing_with_a_relation(self):
        model = ERModel(entities=(
            RegularEntityType("Alpha", (
                Attribute("AlpNo", AttributeKind.KEY),
                Attribute("Bravo", AttributeKind.MULTIVALUED),
            )),
            RegularEntityType("Bravo", (Attribute("BraNo", AttributeKind.KEY),)),
        ))
        with pytest.raises(NameCollision, match="Bravo"):
            transform_model(model)

    def test_subtype_before_its_supertype_relation(self):
        subtype = Subtype("Engineer", "Employee", (Attribute("Grade"),))
        with pytest.raises(MissingSupertypeRelation):
            transform_subtype(subtype, RelationalSchema())

    def test_weak_entity_before_its_owner_relation(self):
        weak = WeakEntityType("Dependent", "Employee", "DependentOf",
                              Attribute("Name", AttributeKind.PARTIAL_KEY))
        with pytest.raises(MissingOwnerRelation):
            transform_weak(weak, RelationalSchema())

    def test_multivalued_attribute_before_its_owner_relation(self):
        entity = RegularEntityType("Department", (
            Attribute("DepNo", AttributeKind.KEY),
            Attribute("Location", AttributeKind.MULTIVALUED),
        ))
        with pytest.raises(MissingOwnerRelation):
            transform_multivalued(entity, Attribute("Location", AttributeKind.MULTIVALUED),
                                  RelationalSchema())

    def test_one_to_many_rejects_subtype_endpoints_by_default(self, company_model):
        works = parse_er(
            "entity Employee { key EmpNo; }\n"
            "entity Project { key ProNo; }\n"
            "subtype Engineer of Employee { attr Grade; }\n"
            "rel Works (Engineer 1..n, Project 1..1) { }"
        )[0]
        schema = RelationalSchema([
            Relation("Employee", [RdsAttribute("EmpNo", underlined=True)]),
            Relation("Project", [RdsAttribute("ProNo", underlined=True)]),
        ])
        with pytest.raises(UnsupportedParticipant):
            transform_one_to_many(works.relationship("Works"), schema, works,
                                  TransformConfig())
