"""Command line front end.

    diffvec run <file> [--out PATH] [--seed N] [--figure-dir DIR]
    diffvec spectral --m M
    diffvec validate <file>
    diffvec batch <dir> [--out-dir DIR] [--workers N]

Exit codes: 0 success, 1 input error, 2 certificate failure, 3 non-convergence.
"""

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np

from .certify import spectral_table
from .convex_sets import AffineLine, Ball, Box, EpiExp, Ensemble, Halfspace, Hyperplane, Translate
from .errors import DimensionError, NonConvergence, UnsupportedDim, UnsupportedM
from .solvers import (
    BANACH,
    FORWARD_BACKWARD,
    Cycle,
    SolverConfig,
    diff_vectors_from_cycle,
    find_cycle,
    solve,
)

EXIT_OK, EXIT_INPUT, EXIT_CERT, EXIT_NONCONV = 0, 1, 2, 3

_NUM_ARRAY = {"type": "array", "items": {"type": "number"}, "minItems": 1}

_SET_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["line", "ball", "halfspace", "hyperplane", "box", "epi_exp", "translate"]},
        "point": _NUM_ARRAY,
        "direction": _NUM_ARRAY,
        "center": _NUM_ARRAY,
        "radius": {"type": "number", "minimum": 0},
        "normal": _NUM_ARRAY,
        "offset": {"type": "number"},
        "lower": _NUM_ARRAY,
        "upper": _NUM_ARRAY,
        "inner": {"$ref": "#/$defs/set"},
        "shift": _NUM_ARRAY,
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": k}}}, "then": {"required": req}}
        for k, req in [
            ("line", ["point", "direction"]),
            ("ball", ["center", "radius"]),
            ("halfspace", ["normal", "offset"]),
            ("hyperplane", ["normal", "offset"]),
            ("box", ["lower", "upper"]),
            ("translate", ["inner", "shift"]),
        ]
    ],
}

SCENARIO_SCHEMA = {
    "$defs": {"set": _SET_SCHEMA},
    "type": "object",
    "required": ["name", "dim", "sets"],
    "properties": {
        "name": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "sets": {"type": "array", "items": {"$ref": "#/$defs/set"}, "minItems": 2},
        "solver": {
            "type": "object",
            "properties": {
                "method": {"enum": ["banach", "fb"]},
                "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "max_iters": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "outputs": {
            "type": "object",
            "properties": {
                k: {"type": "boolean"}
                for k in ["bundle", "cycle", "fixed_point_sets", "certificate", "spectral", "figure_data"]
            },
            "additionalProperties": False,
        },
    },
}


class ScenarioError(ValueError):
    """A scenario file is malformed. The message names the offending field."""


def _field_path(err):
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def build_set(rec):
    """Construct a set descriptor from a scenario record."""
    kind = rec["kind"]
    if kind == "line":
        s = AffineLine(rec["point"], rec["direction"])
    elif kind == "ball":
        s = Ball(rec["center"], rec["radius"])
    elif kind == "halfspace":
        s = Halfspace(rec["normal"], rec["offset"])
    elif kind == "hyperplane":
        s = Hyperplane(rec["normal"], rec["offset"])
    elif kind == "box":
        s = Box(rec["lower"], rec["upper"])
    elif kind == "epi_exp":
        s = EpiExp()
    else:
        s = Translate(build_set(rec["inner"]), rec["shift"])
    if "shift" in rec and kind != "translate":
        s = Translate(s, rec["shift"])
    return s


def parse_scenario(data):
    """Validate a scenario dict and return (ensemble, solver config, outputs)."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ScenarioError(f"{_field_path(err)}: {err.message}")
    sets = []
    for i, rec in enumerate(data["sets"]):
        try:
            s = build_set(rec)
        except (ValueError, DimensionError) as exc:
            raise ScenarioError(f"sets/{i}: {exc}") from exc
        if s.dim != data["dim"]:
            raise ScenarioError(f"sets/{i}: dimension {s.dim} does not match dim {data['dim']}")
        sets.append(s)
    solver = data.get("solver", {})
    method = BANACH if solver.get("method") == "banach" else FORWARD_BACKWARD
    cfg = SolverConfig(
        method=method,
        gamma=solver.get("gamma"),
        outer_tol=solver.get("tol", 1e-9),
        max_outer_iters=solver.get("max_iters", 100000),
    )
    outputs = {"bundle": True, "cycle": True, "fixed_point_sets": True, "certificate": True}
    outputs.update(data.get("outputs", {}))
    return Ensemble(tuple(sets)), cfg, outputs


def load_scenario(path):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    return data, parse_scenario(data)


def _round(a):
    # 12 significant digits keeps output stable across platforms
    return [[float(f"{x:.12g}") + 0.0 for x in row] for row in np.asarray(a)]


def _fixed_point_description(ensemble, v):
    # F_i as a list of (set index, translation) pairs, 1-based
    m = ensemble.m
    out = []
    for i in range(m):
        shift = np.zeros(ensemble.d)
        terms = []
        for k in range(m):
            j = (i - k) % m
            if k > 0:
                shift = shift + v[j]
            terms.append({"set": j + 1, "shift": _round([shift])[0]})
        out.append({"index": i + 1, "intersection_of": terms})
    return out


def run_scenario_data(data, ensemble, cfg, outputs, seed=0, figure_dir=None):
    """Solve one parsed scenario. Returns (exit code, result dict)."""
    result = {"name": data["name"], "m": ensemble.m, "dim": ensemble.d, "seed": seed}
    cfg = replace(cfg, seed=seed)
    try:
        bundle = solve(ensemble, cfg)
        code = EXIT_OK
    except NonConvergence as exc:
        bundle = exc.bundle
        code = EXIT_NONCONV
        result["error"] = str(exc)
    except UnsupportedM as exc:
        result["error"] = str(exc)
        return EXIT_INPUT, result

    result["method"] = bundle.method
    result["iterations"] = bundle.iters
    result["residual"] = float(f"{bundle.residual:.6g}")
    if outputs.get("bundle"):
        result["y"] = _round(bundle.y)
        result["e"] = _round(bundle.e)
        result["v"] = _round(bundle.v)

    cert = bundle.certificate
    if cert is not None and outputs.get("certificate"):
        result["certificate"] = {
            k: (float(f"{val:.6g}") if isinstance(val, float) and math.isfinite(val) else val)
            for k, val in cert.as_dict().items()
        }
    if code == EXIT_OK and cert is not None and not cert.passed:
        code = EXIT_CERT

    cycle = None
    if outputs.get("cycle") or outputs.get("figure_data"):
        cycle = find_cycle(ensemble, bundle)
        if isinstance(cycle, Cycle):
            result["cycle"] = {
                "z": _round(cycle.z),
                "v_from_cycle": _round(diff_vectors_from_cycle(cycle)),
            }
        else:
            result["cycle"] = "none"
            result["cycle_diagnostics"] = {
                "reason": cycle.reason,
                "iterations": cycle.iters,
                "anchor_gap": float(f"{cycle.anchor_gap:.6g}"),
            }
    if outputs.get("fixed_point_sets"):
        result["fixed_point_sets"] = _fixed_point_description(ensemble, bundle.v)
    if outputs.get("spectral"):
        rep = spectral_table(ensemble.m)
        result["spectral"] = {
            "squared_singular_values": [float(f"{s:.12g}") for s in rep.squared_singular_values],
            "operator_norm": float(f"{rep.operator_norm:.12g}"),
        }
    if figure_dir is not None or outputs.get("figure_data"):
        target = Path(figure_dir) if figure_dir is not None else Path(".")
        try:
            written = emit_figure_data(data["name"], ensemble, bundle, cycle, target, seed=seed)
            result["figure_files"] = [p.name for p in written]
        except UnsupportedDim as exc:
            result["figure_error"] = str(exc)
    return code, result


def _sample_set(s, n, rng, radius=5.0):
    # points of s near the origin, ordered for drawing
    if isinstance(s, AffineLine):
        t = np.linspace(-radius, radius, n)
        return s.c + t[:, None] * s.u
    if isinstance(s, EpiExp):
        xi = np.linspace(-radius, np.log(radius + 1.0), n)
        return np.stack([xi, np.exp(xi)], axis=1)
    if isinstance(s, Ball) and s.dim == 2:
        th = np.linspace(0.0, 2.0 * np.pi, n)
        return s.center + s.radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    if isinstance(s, Translate):
        return s.shift + _sample_set(s.inner, n, rng, radius)
    pts = s.project(rng.uniform(-radius, radius, (n, s.dim)))
    return pts[np.lexsort(pts.T[::-1])]


def emit_figure_data(name, ensemble, bundle, cycle, out_dir, seed=0, samples=200):
    """Write plotting data as CSV: set samples, cycle points and difference arrows.

    Columns are series, point_index, x, y and, for d = 3, z. Arrows run from
    z_i to z_i + v_i; without a cycle they start at e_i instead. Returns the
    list of written paths.
    """
    d = ensemble.d
    if d > 3:
        raise UnsupportedDim(f"figure data needs d <= 3, got d = {d}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    cols = ["x", "y", "z"][: max(d, 2)]

    def pad(p):
        p = np.asarray(p, dtype=float)
        return list(p) + [0.0] * (len(cols) - p.size)

    rows = []
    for i, s in enumerate(ensemble.sets, start=1):
        for k, p in enumerate(_sample_set(s, samples, rng)):
            rows.append([f"set{i}", k] + pad(p))
    base = cycle.z if isinstance(cycle, Cycle) else bundle.e
    if isinstance(cycle, Cycle):
        for k, p in enumerate(base):
            rows.append(["cycle", k] + pad(p))
    for i, (p, v) in enumerate(zip(base, bundle.v), start=1):
        rows.append([f"arrow{i}", 0] + pad(p))
        rows.append([f"arrow{i}", 1] + pad(p + v))

    path = out_dir / f"{name}.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["series", "point_index"] + cols)
        for r in rows:
            w.writerow(r[:2] + [f"{x:.12g}" for x in r[2:]])
    return [path]


def _dump(result):
    return json.dumps(result, sort_keys=True, indent=2) + "\n"


def cmd_run(args):
    try:
        data, (ensemble, cfg, outputs) = load_scenario(args.file)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, result = run_scenario_data(data, ensemble, cfg, outputs, seed=args.seed, figure_dir=args.figure_dir)
    text = _dump(result)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def cmd_validate(args):
    try:
        load_scenario(args.file)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print("ok")
    return EXIT_OK


def cmd_spectral(args):
    if args.m < 2:
        print("error: m must be at least 2", file=sys.stderr)
        return EXIT_INPUT
    rep = spectral_table(args.m)
    sys.stdout.write(
        _dump(
            {
                "m": rep.m,
                "squared_singular_values": [float(f"{s:.15g}") for s in rep.squared_singular_values],
                "operator_norm": float(f"{rep.operator_norm:.15g}"),
                "contraction": rep.contraction,
            }
        )
    )
    return EXIT_OK


def _run_one(path, out_dir, seed):
    try:
        data, (ensemble, cfg, outputs) = load_scenario(path)
    except ScenarioError as exc:
        return path.name, EXIT_INPUT, {"error": str(exc)}
    code, result = run_scenario_data(data, ensemble, cfg, outputs, seed=seed)
    if out_dir is not None:
        (out_dir / f"{path.stem}.json").write_text(_dump(result))
    return path.name, code, result


def cmd_batch(args):
    paths = sorted(Path(args.dir).glob("*.json"))
    if not paths:
        print(f"error: no scenario files in {args.dir}", file=sys.stderr)
        return EXIT_INPUT
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(lambda p: _run_one(p, out_dir, args.seed), paths))
    summary = {name: code for name, code, _ in results}
    sys.stdout.write(_dump(summary))
    return max(summary.values())


def build_parser():
    parser = argparse.ArgumentParser(prog="diffvec", description="Difference vectors of cyclic projections.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve a scenario file")
    p.add_argument("file")
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for sampling (default 0)")
    p.add_argument("--figure-dir", help="write CSV plot data into this directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("spectral", help="singular values of 1/2 Id - T")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("validate", help="check a scenario file against the schema")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("batch", help="run every scenario in a directory")
    p.add_argument("dir")
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
