"""Command-line interface.

Exit codes: 0 every verdict passes, 1 some verdict fails, 2 a hypothesis
failed (and no verdict failed), 3 input or parse error, 4 numerical failure.
Input and numerical errors abort immediately.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import builtins as bi
from . import estimates as est
from . import geometry as geo
from . import immersion as im
from . import omori_yau as oy
from . import report as rp
from . import rng
from . import scenario as sio
from .errors import HypothesisFailed, InputError, NumericalError, ScenarioError, WarpGeoError
from .expr import compile_expression, evaluate, parse_expression
from .extremum import immersed_sectional_field
from .otsuki import SymmetricBilinearForm, definiteness_check, find_otsuki_pair, random_definite_form, umbilical_form

EXIT_OK, EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3, 4
SWEEP_PARAMS = ("r", "b", "seed", "budget")
R_INDEPENDENT = ("m_points", "sup_K_M", "sup_H", "intrinsic_check")


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p):
    p.add_argument("--out", help="directory for output files (default: standard output)")
    p.add_argument("--format", choices=sorted(rp.FORMATS), default="json")
    p.add_argument("--seed", type=int, help="random seed (default: scenario seed, then $WARPGEO_SEED, then 0)")
    p.add_argument("--budget", type=int, help="sample budget (at least 100)")
    p.add_argument("--tolerance", type=float, help="relative inequality tolerance")
    p.add_argument("--jobs", type=int, default=1, help="scenarios evaluated in parallel")


def build_parser():
    parser = _Parser(prog="warpgeo", description="Verify curvature estimates for immersions into warped products.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run the theorems listed in scenario files")
    p.add_argument("scenarios", nargs="+", help="scenario files or builtin scenario names")
    _common(p)

    p = sub.add_parser("curvature", help="curvature and mean curvature of a scenario's immersion at a point")
    p.add_argument("scenario")
    p.add_argument("--at", required=True, help="comma-separated chart coordinates")

    p = sub.add_parser("otsuki", help="definiteness check and pair search for a bilinear form")
    p.add_argument("form")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = sub.add_parser("oy-check", help="check an (h, gamma) pair against the Omori-Yau conditions")
    p.add_argument("pair")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="rerun a scenario over a range of one parameter")
    p.add_argument("scenario")
    p.add_argument("--param", choices=SWEEP_PARAMS, default="r")
    p.add_argument("--range", required=True, dest="range_", metavar="A:B:N")
    _common(p)
    p.set_defaults(format="csv")

    sub.add_parser("list-builtins", help="list builtin ambients, immersions and scenarios")
    return parser


# -- verify ---------------------------------------------------------------------------------

def aggregate(reports):
    """Exit code from finished reports (hypothesis failures carry the verdict 'hypothesis-failed')."""
    if any(r.verdict == "fail" for r in reports):
        return EXIT_FAIL
    if any(r.verdict == "hypothesis-failed" for r in reports):
        return EXIT_HYPOTHESIS
    return EXIT_OK


def _verify_one(ref, overrides):
    """Worker: ``(reports, error_code, message)`` with plain, picklable data."""
    try:
        sc = sio.load(ref, **overrides)
        return [rep for _, rep, _ in est.verify_all(sc)], None, ""
    except InputError as err:
        return [], EXIT_INPUT, f"{ref}: {type(err).__name__}: {err}"
    except NumericalError as err:
        return [], EXIT_NUMERICAL, f"{ref}: {type(err).__name__}: {err}"


def _overrides(args):
    return {"seed": args.seed, "budget": args.budget, "tolerance": args.tolerance}


def _emit(args, reports, stem, text=None):
    text = rp.render(reports, args.format) if text is None else text
    if args.out:
        path = rp.write_atomic(f"{args.out}/{stem}.{rp.EXTENSIONS[args.format]}", text)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _summary(reports):
    for r in reports:
        lhs = "n/a" if r.lhs is None else f"{r.lhs:.6g}"
        rhs = "n/a" if r.rhs is None else f"{r.rhs:.6g}"
        extra = " (vacuous)" if r.vacuous else ""
        print(f"{r.scenario} [{r.theorem}] {r.verdict}{extra}: lhs {lhs} rhs {rhs}", file=sys.stderr)


def cmd_verify(args):
    overrides = _overrides(args)
    if args.jobs > 1 and len(args.scenarios) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, args.scenarios, [overrides] * len(args.scenarios)))
    else:
        results = []
        for ref in args.scenarios:
            results.append(_verify_one(ref, overrides))
            if results[-1][1] is not None:
                break
    everything = []
    for ref, (reports, code, message) in zip(args.scenarios, results):
        if code is not None:
            print(message, file=sys.stderr)
            return code
        _summary(reports)
        everything.extend(reports)
        if args.out:
            _emit(args, reports, reports[0].scenario if reports else "report")
    if not args.out:
        _emit(args, everything, "report")
    return aggregate(everything)


# -- sweep ----------------------------------------------------------------------------------

def parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must look like A:B:N, got {text!r}")
    a, b = (float(evaluate(parse_expression(s))) for s in parts[:2])
    try:
        n = int(parts[2])
    except ValueError as err:
        raise UsageError(f"range count must be an integer, got {parts[2]!r}") from err
    if n < 1:
        raise UsageError("range count must be positive")
    return np.linspace(a, b, n)


def sweep(sc, param, values):
    """Reports for each value of `param`; r- and b-independent left-hand sides are computed once."""
    rows, first = [], None
    for v in values:
        v = int(round(v)) if param in ("seed", "budget") else float(v)
        sc_v = sc.replace(**{param: v})
        ctx = est.Context(sc_v)
        if first is not None and param in ("r", "b"):
            for name in R_INDEPENDENT:
                if name in first.__dict__:
                    ctx.__dict__[name] = first.__dict__[name]
        for th in sc_v.theorems:
            try:
                rep = est.verify(sc_v, th, ctx)
            except HypothesisFailed as err:
                rep = err.report or est.EstimateReport(th, sc_v.id, tolerance=sc_v.tolerance)
                rep.theorem = th
                rep.caveats.append(f"hypothesis failed: {err.item}")
            rows.append((v, rep))
        first = first or ctx
    return rows


def cmd_sweep(args):
    sc = sio.load(args.scenario, **_overrides(args))
    rows = sweep(sc, args.param, parse_range(args.range_))
    reports = [r for _, r in rows]
    if args.format == "csv":
        text = rp.sweep_csv(args.param, rows)
    elif args.format == "plotdata":
        text = rp.sweep_plotdata(args.param, rows)
    else:
        text = json.dumps([{"param": args.param, "value": v, "report": r.to_dict()} for v, r in rows], indent=2)
    _emit(args, reports, f"{sc.id}-sweep-{args.param}", text)
    return aggregate(reports)


# -- curvature ------------------------------------------------------------------------------

def _point(text):
    return np.array([float(evaluate(parse_expression(s))) for s in text.split(",")])


def cmd_curvature(args):
    sc = sio.load(args.scenario)
    imm = sc.immersion
    p = _point(args.at)
    if p.shape != (imm.dim,):
        raise UsageError(f"--at needs {imm.dim} coordinates, got {len(p)}")
    im.induced_metric(imm, p)
    out = {"scenario": sc.id, "point": p.tolist(), "image": imm(p).tolist(),
           "mean_curvature_norm": float(im.mean_curvature_norm(imm, p))}
    if imm.dim >= 2:
        R = im.gauss_curvature_tensor(imm, p)
        gM = imm.induced_metric_field(p)
        out["sectional_max"] = float(immersed_sectional_field(imm, "sup")(p[None])[0])
        out["sectional_min"] = float(immersed_sectional_field(imm, "inf")(p[None])[0])
        ginv = np.linalg.inv(gM)
        ric = np.einsum("ik,ijkl->jl", ginv, R)
        out["scalar_curvature"] = float(np.einsum("jl,jl->", ginv, ric))
    print(json.dumps(out, indent=2))
    return EXIT_OK


# -- otsuki ---------------------------------------------------------------------------------

def _form_from_doc(doc):
    if not isinstance(doc, dict):
        raise ScenarioError("a form document must be a JSON object")
    kind = doc.get("builtin")
    if kind == "umbilical":
        return umbilical_form(int(doc["n1"]), doc.get("normal"), float(doc.get("scale", 1.0)))
    if kind == "random-definite":
        return random_definite_form(int(doc["n1"]), int(doc["n2"]), int(doc.get("seed", 0)))
    if kind is not None:
        raise ScenarioError(f"unknown builtin form {kind!r}; available: ['random-definite', 'umbilical']")
    if "coeffs" not in doc:
        raise ScenarioError("form document needs 'coeffs' or 'builtin'")
    return SymmetricBilinearForm(np.asarray(doc["coeffs"], float), doc.get("gV"), doc.get("gW"))


def cmd_otsuki(args):
    doc = sio.read_document(args.form)
    try:
        form = _form_from_doc(doc)
    except (KeyError, TypeError, ValueError) as err:
        raise ScenarioError(f"bad form document: {err!r}") from err
    seed = rng.resolve_seed(args.seed if args.seed is not None else doc.get("seed"))
    res = definiteness_check(form, seed=seed)
    out = {"n1": form.n1, "n2": form.n2, "definite": bool(res.definite), "minimum": float(res.minimum),
           "witness": np.asarray(res.witness).tolist()}
    code = EXIT_OK
    if res.definite:
        pair = find_otsuki_pair(form, seed=seed)
        out["pair"] = {"v1": pair.v1.tolist(), "v2": pair.v2.tolist(), "residual": float(pair.residual),
                       "angle": float(pair.angle), "restart": int(pair.restart)}
    else:
        out["note"] = "form is not definite: no pair is guaranteed"
        code = EXIT_HYPOTHESIS
    _write_json(args, out, "otsuki")
    return code


def _write_json(args, out, stem):
    text = json.dumps(est.jsonable(out), indent=2)
    if args.out:
        print(f"wrote {rp.write_atomic(f'{args.out}/{stem}.json', text)}", file=sys.stderr)
    else:
        print(text)


# -- oy-check -------------------------------------------------------------------------------

def _metric_from_doc(spec):
    amb = bi.build_ambient(spec)
    if isinstance(amb, geo.MetricField):
        return amb
    return amb.metric if hasattr(amb, "metric") else amb.total


def cmd_oy_check(args):
    doc = sio.read_document(args.pair)
    if not isinstance(doc, dict) or "h" not in doc or "gamma" not in doc:
        raise ScenarioError("pair document needs 'h' and 'gamma'")
    metric = _metric_from_doc(doc.get("ambient", {"builtin": "euclidean", "params": {"dim": 3}}))
    n = metric.dim
    names = doc.get("variables", [f"x{i + 1}" for i in range(n)])
    h_fn = compile_expression(doc["h"], ["t"])
    gamma = compile_expression(doc["gamma"], names)
    pair = oy.OYPair(lambda t: h_fn(np.asarray(t, float)[..., None]), gamma, doc.get("flavor", "hessian"),
                     float(doc.get("c", 1.0)), float(doc.get("c_prime", 1.0)), float(doc.get("compact_cutoff", 0.0)))
    seed = rng.resolve_seed(args.seed if args.seed is not None else doc.get("seed"))
    extent = float(doc.get("extent", 10.0))
    count = int(doc.get("samples", 200))
    center = np.asarray(doc.get("center", np.zeros(n)), float)
    samples = center + extent * (2 * rng.sobol(n, count, seed, "oy-samples") - 1)
    samples = samples[metric.chart.contains(samples)]
    dirs = rng.unit_vectors(rng.sobol(n, 8, seed, "oy-rays")) if n > 1 else np.array([[1.0], [-1.0]])
    radii = np.geomspace(0.1 * extent, 0.95 * extent, 50)
    rays = [center + radii[:, None] * d for d in dirs]
    rays = [ray for ray in rays if np.all(metric.chart.contains(ray))]
    certificate = doc.get("certificate")
    h_rep = oy.check_h_conditions(pair.h, certificate=certificate)
    g_rep = oy.check_gamma_conditions(pair, metric, samples, rays=rays, compact=bool(doc.get("compact", False)),
                                      certificate=certificate)
    items = {**h_rep.items, **g_rep.items}
    out = {"items": {k: {"status": v.status, "value": v.value, "detail": v.detail, "caveats": v.caveats,
                         "certified": v.certified} for k, v in items.items()},
           "passed": bool(h_rep.passed and g_rep.passed)}
    _write_json(args, out, "oy-check")
    return EXIT_FAIL if any(v.status == "fail" for v in items.values()) else EXIT_OK


# -- list-builtins ----------------------------------------------------------------------------

def cmd_list_builtins(args):
    print("ambients:")
    for name in sorted(bi.AMBIENTS):
        print(f"  {name}")
    print("immersions:")
    for name in sorted(bi.IMMERSIONS):
        print(f"  {name}")
    print("scenarios:")
    for name in sio.builtin_names():
        print(f"  {name}: {sio.builtin_document(name).get('description', '')}")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "curvature": cmd_curvature,
    "otsuki": cmd_otsuki,
    "oy-check": cmd_oy_check,
    "sweep": cmd_sweep,
    "list-builtins": cmd_list_builtins,
}


def run(command, argv=()):
    return main([command, *argv])


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except HypothesisFailed as err:
        print(f"hypothesis failed: {err}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except InputError as err:
        print(f"input error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except WarpGeoError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
