"""Scenario files: JSON documents describing an immersion, a ball and the theorems to run.

Schema (version 1)::

    {
      "schema_version": 1,
      "id": "sphere-in-product-A",
      "description": "...",
      "ambient":   {"builtin": "product", "params": {"n_X": 3, "n_V": 1}}
                 | {"warped": {"base_dim": 3, "fiber_dim": 1, "psi": "1 + 0.1*x1^2"}}
                 | {"metric": {"coordinates": [...], "chart": [[lo, hi], ...], "components": [[...]]}},
      "immersion": {"builtin": "sphere", "params": {"radius": 0.5}}
                 | {"custom": {"variables": ["u", "v"], "chart": [[lo, hi], ...], "map": ["u", ...]}},
      "x0": [0, 0, 0],
      "r": 0.6, "b": 0, "inj_radius": 50,
      "seed": 0, "budget": 200, "tolerance": 0.001,
      "asserted": {"weak-oy": true},
      "compact": true,
      "theorems": ["A", "sub-sectional"],
      "expected_exit": 0
    }

Numbers may also be given as constant expressions such as ``"pi/2"``.
``expected_exit`` is metadata for regression suites and is not interpreted.
"""

import copy
import json
import os
from importlib import resources
from pathlib import Path

import numpy as np

from . import rng
from .builtins import build_ambient, build_immersion
from .errors import ParseError, ScenarioError
from .estimates import DEFAULT_BUDGET, Scenario
from .expr import evaluate, parse_expression

SCHEMA_VERSION = 1
REQUIRED = ("id", "ambient", "immersion", "x0", "r", "b", "inj_radius")
OPTIONAL = ("schema_version", "description", "seed", "budget", "tolerance", "asserted", "compact", "theorems",
            "expected_exit")


def _number(value, name):
    if isinstance(value, bool):
        raise ScenarioError(f"{name}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(evaluate(parse_expression(value)))
        except ParseError as err:
            raise ScenarioError(f"{name}: {err}") from err
    raise ScenarioError(f"{name}: expected a number or a constant expression, got {type(value).__name__}")


def parse_json(text, source="<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"malformed JSON in {source}: {err.msg}", err.lineno, err.colno) from err


def read_document(path):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ScenarioError(f"cannot read {path}: {err}") from err
    return parse_json(text, str(path))


def from_dict(doc, seed=None, budget=None, tolerance=None):
    """Build a `Scenario`; command-line overrides take precedence over the document."""
    if not isinstance(doc, dict):
        raise ScenarioError("a scenario document must be a JSON object")
    missing = [k for k in REQUIRED if k not in doc]
    if missing:
        raise ScenarioError(f"scenario is missing required field(s) {missing}")
    unknown = [k for k in doc if k not in REQUIRED + OPTIONAL]
    if unknown:
        raise ScenarioError(f"unknown scenario field(s) {unknown}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}; this version reads {SCHEMA_VERSION}")
    for key in ("ambient", "immersion"):
        if not isinstance(doc[key], dict):
            raise ScenarioError(f"{key} must be an object")
    try:
        ambient = build_ambient(doc["ambient"])
        imm = build_immersion(doc["immersion"], ambient)
    except TypeError as err:
        raise ScenarioError(f"bad builtin parameters: {err}") from err
    x0 = doc["x0"] if isinstance(doc["x0"], list) else [doc["x0"]]
    theorems = doc.get("theorems", ["A"])
    if isinstance(theorems, str):
        theorems = [theorems]
    asserted = doc.get("asserted", {})
    if not isinstance(asserted, dict) or not all(isinstance(v, bool) for v in asserted.values()):
        raise ScenarioError("asserted must map hypothesis names to booleans")
    return Scenario(
        id=str(doc["id"]),
        immersion=imm,
        x0=np.array([_number(v, "x0") for v in x0]),
        r=_number(doc["r"], "r"),
        b=_number(doc["b"], "b"),
        inj_radius=_number(doc["inj_radius"], "inj_radius"),
        budget=int(budget if budget is not None else doc.get("budget", DEFAULT_BUDGET)),
        seed=rng.resolve_seed(seed if seed is not None else doc.get("seed")),
        asserted=dict(asserted),
        compact=doc.get("compact"),
        theorems=tuple(theorems),
        tolerance=_number(tolerance if tolerance is not None else doc.get("tolerance", 1e-3), "tolerance"),
        description=str(doc.get("description", "")),
        spec={"ambient": copy.deepcopy(doc["ambient"]), "immersion": copy.deepcopy(doc["immersion"]),
              "expected_exit": doc.get("expected_exit")},
    )


def to_dict(sc):
    """Serialize; the result reloads to an equivalent scenario."""
    if sc.spec is None:
        raise ScenarioError("scenario was not built from a document and cannot be serialized")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "id": sc.id,
        "description": sc.description,
        "ambient": copy.deepcopy(sc.spec["ambient"]),
        "immersion": copy.deepcopy(sc.spec["immersion"]),
        "x0": [float(v) for v in sc.x0],
        "r": sc.r,
        "b": sc.b,
        "inj_radius": sc.inj_radius,
        "seed": int(sc.seed),
        "budget": int(sc.budget),
        "tolerance": float(sc.tolerance),
        "asserted": dict(sc.asserted),
        "compact": bool(sc.compact),
        "theorems": list(sc.theorems),
    }
    if sc.spec.get("expected_exit") is not None:
        doc["expected_exit"] = sc.spec["expected_exit"]
    return doc


def dumps(sc):
    return json.dumps(to_dict(sc), indent=2)


def builtin_names():
    files = resources.files("warpgeo").joinpath("scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def builtin_document(name):
    path = resources.files("warpgeo").joinpath("scenarios").joinpath(f"{name}.json")
    if not path.is_file():
        raise ScenarioError(f"no builtin scenario {name!r}; available: {builtin_names()}")
    return parse_json(path.read_text(), f"builtin:{name}")


def load(ref, seed=None, budget=None, tolerance=None):
    """Load a scenario from a file path or a builtin scenario name."""
    ref = str(ref)
    name = ref[:-5] if ref.endswith(".json") else ref
    if os.path.exists(ref):
        doc = read_document(ref)
    elif name in builtin_names():
        doc = builtin_document(name)
    else:
        raise ScenarioError(f"no scenario file or builtin named {ref!r}")
    return from_dict(doc, seed=seed, budget=budget, tolerance=tolerance)


def load_builtin(name, **overrides):
    return from_dict(builtin_document(name), **overrides)
