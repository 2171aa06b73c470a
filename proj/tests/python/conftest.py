import json
import os
import pathlib

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

SOURCE_DIR = pathlib.Path(os.environ.get("ZTAC_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
SCHEMA_DIR = SOURCE_DIR / "schemas"
SCHEMA_BASE = "https://ztac.example.org/schemas/"


def _registry():
    resources = []
    for path in SCHEMA_DIR.glob("*.schema.json"):
        resources.append((SCHEMA_BASE + path.name, Resource.from_contents(json.loads(path.read_text()))))
    return Registry().with_resources(resources)


@pytest.fixture(scope="session")
def validator():
    registry = _registry()

    def make(name):
        schema = json.loads((SCHEMA_DIR / name).read_text())
        return Draft202012Validator(schema, registry=registry)

    return make


@pytest.fixture(scope="session")
def engine():
    import ztac

    return ztac.Engine()


@pytest.fixture(scope="session")
def source_dir():
    return SOURCE_DIR
