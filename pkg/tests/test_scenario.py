import copy
import json

import numpy as np
import pytest

from warpgeo import scenario as sio
from warpgeo.errors import ParseError, ScenarioError


@pytest.fixture
def doc():
    return sio.builtin_document("sphere-in-product-A")


def test_builtin_names():
    names = sio.builtin_names()
    assert len(names) == 9
    assert {"sphere-in-product-A", "hopf-torus", "false-weak-oy-disc"} <= set(names)


def test_round_trip_preserves_every_field(doc):
    sc = sio.from_dict(doc)
    again = sio.from_dict(json.loads(sio.dumps(sc)))
    assert sio.to_dict(again) == sio.to_dict(sc)
    assert np.array_equal(again.x0, sc.x0)
    assert (again.r, again.b, again.seed, again.budget, again.theorems) == (sc.r, sc.b, sc.seed, sc.budget, sc.theorems)
    assert sio.to_dict(sc)["expected_exit"] == 0


def test_numbers_may_be_constant_expressions(doc):
    doc["r"] = "pi/8"
    doc["x0"] = ["1/2", 0, "-sqrt(4)/4"]
    sc = sio.from_dict(doc)
    assert sc.r == pytest.approx(np.pi / 8)
    assert sc.x0.tolist() == [0.5, 0.0, -0.5]
    doc["r"] = "1 +"
    with pytest.raises(ScenarioError, match="r:"):
        sio.from_dict(doc)


@pytest.mark.parametrize("change, message", [
    (lambda d: d.pop("r"), "missing required"),
    (lambda d: d.update(colour="red"), "unknown scenario field"),
    (lambda d: d.update(schema_version=2), "schema_version"),
    (lambda d: d.update(r=True), "boolean"),
    (lambda d: d.update(r=[1]), "expected a number"),
    (lambda d: d.update(budget=50), "at least 100"),
    (lambda d: d.update(r=60), "injectivity radius"),
    (lambda d: d.update(r=0), "positive"),
    (lambda d: d.update(b=4, r=0.9), "pi/\\(2 sqrt\\(b\\)\\)"),
    (lambda d: d.update(theorems=["C"]), "unknown theorem"),
    (lambda d: d.update(asserted={"weak-oy": "yes"}), "booleans"),
    (lambda d: d.update(ambient=[1]), "must be an object"),
])
def test_invalid_documents(doc, change, message):
    bad = copy.deepcopy(doc)
    change(bad)
    with pytest.raises(ScenarioError, match=message):
        sio.from_dict(bad)


def test_overrides_take_precedence(doc, monkeypatch):
    monkeypatch.setenv("WARPGEO_SEED", "11")
    assert sio.from_dict(doc).seed == 0
    assert sio.from_dict(doc, seed=5, budget=300, tolerance=0.01).seed == 5
    del doc["seed"]
    assert sio.from_dict(doc).seed == 11
    monkeypatch.delenv("WARPGEO_SEED")
    assert sio.from_dict(doc).seed == 0


def test_load_by_name_or_path(tmp_path, doc):
    assert sio.load("hopf-torus").id == "hopf-torus"
    assert sio.load("hopf-torus.json").id == "hopf-torus"
    path = tmp_path / "mine.json"
    doc["id"] = "mine"
    path.write_text(json.dumps(doc))
    assert sio.load(path).id == "mine"
    with pytest.raises(ScenarioError, match="no scenario"):
        sio.load("no-such-scenario")


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"id": "x",\n "r": }')
    with pytest.raises(ParseError) as info:
        sio.load(path)
    assert info.value.line == 2
