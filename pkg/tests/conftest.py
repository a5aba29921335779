import json
from importlib import resources

import numpy as np
import pytest

from lifnet import _accel
from lifnet.data import generate_synthetic, separable_spec, stratified_split


@pytest.fixture(scope="session")
def separable_split():
    """Criterion dataset: d=16, n=800, means 6 std apart, 80/20 stratified split."""
    dataset = generate_synthetic(separable_spec(d=16, n=800, separation=6.0, seed=0))
    return stratified_split(dataset, 0.8, seed=0)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    if request.param == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    previous = _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _schema_registry():
    from referencing import Registry, Resource

    registry = Registry()
    schemas = {}
    for entry in resources.files("lifnet.schemas").iterdir():
        if entry.name.endswith(".schema.json"):
            doc = json.loads(entry.read_text(encoding="utf-8"))
            schemas[entry.name] = doc
            registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    return registry, schemas


@pytest.fixture(scope="session")
def validate_schema():
    import jsonschema

    registry, schemas = _schema_registry()

    def validate(instance, name):
        validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
        validator.validate(instance)

    return validate


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
