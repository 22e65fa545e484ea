import pathlib

import pytest

from er2rds import parse_er, parse_rds

GOLDEN = pathlib.Path(__file__).parent / "golden"


def golden_path(name: str) -> pathlib.Path:
    return GOLDEN / name


@pytest.fixture(scope="session")
def company_text() -> str:
    return golden_path("company.er").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def company_model(company_text):
    model, diagnostics = parse_er(company_text, "company.er")
    assert model is not None and not diagnostics
    return model


@pytest.fixture(scope="session")
def company_rds_text() -> str:
    return golden_path("company.rds").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def variant_rds_text() -> str:
    return golden_path("company_consult_project.rds").read_text(encoding="utf-8")


@pytest.fixture
def company_schema(company_rds_text):
    # function scoped: schemas are mutable
    schema, diagnostics = parse_rds(company_rds_text, "company.rds")
    assert schema is not None and not diagnostics
    return schema
