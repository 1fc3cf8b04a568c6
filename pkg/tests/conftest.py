import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ofdkit.inference import parse_ofd_text
from ofdkit.ontology import load_ontology
from ofdkit.relation import load_csv

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def clinical():
    return load_csv(str(FIXTURES / "clinical_t1_t7.csv"))


@pytest.fixture(scope="session")
def clinical_onto():
    return load_ontology(str(FIXTURES / "clinical_ontology.json"))


@pytest.fixture(scope="session")
def jaguar_onto():
    return load_ontology(str(FIXTURES / "jaguar_ontology.json"))


@pytest.fixture(scope="session")
def table2():
    inst = load_csv(str(FIXTURES / "defining_ofds.csv"))
    onto = load_ontology(str(FIXTURES / "defining_ofds_ontology.json"))
    return inst, onto


@pytest.fixture(scope="session")
def transitivity():
    inst = load_csv(str(FIXTURES / "transitivity.csv"))
    onto = load_ontology(str(FIXTURES / "transitivity_ontology.json"))
    return inst, onto


@pytest.fixture(scope="session")
def sense_fixture():
    inst = load_csv(str(FIXTURES / "sense_fixture.csv"))
    onto = load_ontology(str(FIXTURES / "sense_ontology.json"))
    sigma = parse_ofd_text((FIXTURES / "sense_fixture.ofds").read_text())
    return inst, onto, sigma


@pytest.fixture(scope="session")
def repair_sample():
    inst = load_csv(str(FIXTURES / "repair_sample.csv"))
    sigma = parse_ofd_text((FIXTURES / "repair_sample.ofds").read_text())
    return inst, sigma
