"""Batch front-end.

Parses inequality spec files, runs condition and lower-bound computations
and the verification pipeline, and emits machine-readable reports (JSON)
and plot-ready sweep tables (CSV).  Exit codes: 0 success, 1 malformed
input, 2 computed-but-hypotheses-unmet (or a degenerate function where a
discretization was requested).
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .conditions import (
    InequalitySpec,
    RegimeError,
    chain_A,
    chain_B,
    compute_condition,
    discrete_A,
    discrete_D,
    json_float,
)
from .gridutil import DEFAULT_GRID_POINTS, DEFAULT_WINDOW, QuadratureError
from .oracle import estimate_best_constant
from .quasiconcave import (
    DegenerateFunctionError,
    build_discretizing_sequence,
    fundamental_function,
    least_majorant,
    verify_sequence,
)
from .weights import WeightError

# fixed sweep/report table schema; parameter columns go in front
CSV_COLUMNS = ("formula", "value", "c_lo", "ratio", "error_est", "warnings", "error")

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_WARNINGS = 2


class CliError(Exception):
    """Input or computation failure with a CLI exit code."""

    def __init__(self, message: str, code: int = EXIT_BAD_INPUT):
        super().__init__(message)
        self.code = code


def _parse_window(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise CliError(f"--window expects LO:HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise CliError(f"--window expects numbers, got {text!r}") from exc
    if not (0.0 < lo < hi < math.inf):
        raise CliError(f"--window needs 0 < LO < HI < inf, got {text!r}")
    return lo, hi


def _load_json(path: str) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise CliError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}") from exc


def _parse_spec(data: dict, path: str) -> InequalitySpec:
    try:
        return InequalitySpec.from_json(data)
    except (ValueError, WeightError) as exc:
        raise CliError(f"invalid spec {path}: {exc}") from exc


def _sanitize(obj):
    """Recursively JSON-encode floats with 'inf'/'nan' literals."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float):
        return json_float(obj)
    return obj


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(_sanitize(payload), indent=2, sort_keys=True) + "\n", out)


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        x = json_float(x)
    if isinstance(x, (list, tuple)):
        return "; ".join(str(v) for v in x)
    return str(x)


def _dump_csv(param_names: list[str], rows: list[dict], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(param_names) + list(CSV_COLUMNS))
    for row in rows:
        cells = [_csv_cell(row.get(name)) for name in param_names]
        cells += [_csv_cell(row.get(col)) for col in CSV_COLUMNS]
        writer.writerow(cells)
    _emit(buf.getvalue(), out)


def _resolved_config(args, spec_json=None) -> dict:
    cfg = {
        "command": args.command,
        "spec_path": args.spec,
        "out": args.out,
        "format": args.format,
        "window": list(args.window),
        "grid_points": args.grid_points,
    }
    for name in ("atoms", "seed", "ratio"):
        if hasattr(args, name):
            cfg[name] = getattr(args, name)
    if spec_json is not None:
        cfg["spec"] = spec_json
    return cfg


def _oracle_levels(atoms: int) -> tuple[int, ...]:
    return (max(9, atoms // 2 + 1), atoms)


# -- subcommands ------------------------------------------------------------


def cmd_compute_condition(args) -> int:
    data = _load_json(args.spec)
    spec = _parse_spec(data, args.spec)
    try:
        rep = compute_condition(spec, window=args.window, grid_points=args.grid_points)
    except (RegimeError, WeightError, QuadratureError, ValueError) as exc:
        raise CliError(f"cannot compute condition: {exc}") from exc
    payload = {"config": _resolved_config(args, spec.to_json()), "report": rep.to_json()}
    if args.format == "csv":
        row = {
            "formula": rep.formula,
            "value": rep.value,
            "error_est": rep.error_est,
            "warnings": rep.warnings,
            "error": "",
        }
        _dump_csv([], [row], args.out)
    else:
        _dump_json(payload, args.out)
    return EXIT_WARNINGS if rep.warnings else EXIT_OK


def _sequence_bundle(spec, window, grid_points, a):
    """Discretizing sequence + discrete condition for the 3.x family."""
    if spec.inequality == "3.1":
        r = spec.q / spec.p
        phi = fundamental_function(spec.w, spec.U, r, window=window, n=grid_points)
    elif spec.inequality == "3.2":
        r = 1.0 / spec.p
        phi = least_majorant(spec.w, spec.U, spec.p, window=window, n=grid_points)
    else:
        return None, None, None, None
    seq = build_discretizing_sequence(phi, spec.U, r, a=a, window=window)
    check = verify_sequence(seq, phi, spec.U, r)
    disc = discrete_A(spec, seq) if spec.inequality == "3.1" else discrete_D(spec, seq)
    return phi, seq, check, disc


def cmd_verify(args) -> int:
    data = _load_json(args.spec)
    spec = _parse_spec(data, args.spec)
    try:
        rep = compute_condition(spec, window=args.window, grid_points=args.grid_points)
        est = estimate_best_constant(
            spec, window=args.window, seed=args.seed, levels=_oracle_levels(args.atoms)
        )
    except (RegimeError, WeightError, QuadratureError, ValueError) as exc:
        raise CliError(f"cannot verify: {exc}") from exc

    if rep.value > 0 and math.isfinite(rep.value) and math.isfinite(est.c_lo):
        ratio = est.c_lo / rep.value
    else:
        ratio = math.nan
    lo_b, hi_b = args.bracket
    passed = math.isfinite(ratio) and lo_b <= ratio <= hi_b

    chain = None
    discrete = None
    sequence = None
    if spec.inequality in ("3.1", "3.2"):
        try:
            _, seq, check, disc = _sequence_bundle(
                spec, args.window, args.grid_points, a=args.ratio
            )
        except DegenerateFunctionError as exc:
            sequence = {"ok": False, "error": str(exc)}
        else:
            sequence = {
                "ok": check.ok,
                "constants": check.constants,
                "failures": check.failures(),
            }
            discrete = {
                "formula": disc.formula,
                "value": disc.value,
                "vs_condition": (
                    disc.value / rep.value
                    if rep.value > 0 and math.isfinite(rep.value)
                    and math.isfinite(disc.value)
                    else math.nan
                ),
                "warnings": disc.warnings,
            }
            if spec.inequality == "3.1":
                try:
                    vals = (
                        chain_A(spec, seq, window=args.window, grid_points=args.grid_points)
                        if spec.p < 1.0
                        else chain_B(spec, seq, window=args.window, grid_points=args.grid_points)
                    )
                    names = sorted(vals)
                    adjacent = {
                        f"{a_}/{b_}": (
                            vals[a_] / vals[b_]
                            if vals[b_] > 0 and math.isfinite(vals[b_])
                            and math.isfinite(vals[a_])
                            else math.nan
                        )
                        for a_, b_ in zip(names, names[1:])
                    }
                    chain = {"values": vals, "adjacent_ratios": adjacent}
                except (ValueError, RegimeError) as exc:
                    chain = {"error": str(exc)}

    payload = {
        "config": _resolved_config(args, spec.to_json()),
        "condition": rep.to_json(),
        "oracle": est.to_json(),
        "ratio": ratio,
        "bracket": [lo_b, hi_b],
        "passed": passed,
        "hypotheses_unmet": bool(rep.warnings),
        "chain": chain,
        "discrete": discrete,
        "sequence": sequence,
    }
    _dump_json(payload, args.out)
    return EXIT_WARNINGS if rep.warnings else EXIT_OK


def _set_by_path(data, path: str, value):
    """Assign value at a dotted path of dict keys / list indices."""
    keys = path.split(".")
    node = data
    for i, key in enumerate(keys):
        last = i == len(keys) - 1
        if isinstance(node, list):
            try:
                idx = int(key)
            except ValueError as exc:
                raise CliError(f"sweep param {path!r}: {key!r} is not a list index") from exc
            if not 0 <= idx < len(node):
                raise CliError(f"sweep param {path!r}: index {idx} out of range")
            if last:
                node[idx] = value
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if key not in node and not last:
                raise CliError(f"sweep param {path!r}: no field {key!r}")
            if last:
                node[key] = value
            else:
                node = node[key]
        else:
            raise CliError(f"sweep param {path!r}: cannot descend into {type(node).__name__}")
    return data


def _sweep_row(args, template: dict, param: str, value) -> dict:
    patched = _set_by_path(copy.deepcopy(template), param, value)
    row = {param: value, "error": ""}
    try:
        spec = InequalitySpec.from_json(patched)
        rep = compute_condition(spec, window=args.window, grid_points=args.grid_points)
        est = estimate_best_constant(
            spec, window=args.window, seed=args.seed, levels=_oracle_levels(args.atoms)
        )
        ratio = (
            est.c_lo / rep.value
            if rep.value > 0 and math.isfinite(rep.value) and math.isfinite(est.c_lo)
            else math.nan
        )
        row.update(
            formula=rep.formula,
            value=rep.value,
            c_lo=est.c_lo,
            ratio=ratio,
            error_est=rep.error_est,
            warnings=rep.warnings,
        )
    except (RegimeError, WeightError, QuadratureError, ValueError, CliError) as exc:
        row["error"] = str(exc)
    return row


def cmd_sweep(args) -> int:
    data = _load_json(args.spec)
    if not isinstance(data, dict) or set(data) != {"spec", "sweep"}:
        raise CliError(
            "sweep file must be an object with exactly the fields 'spec' and 'sweep'"
        )
    sweep = data["sweep"]
    if not isinstance(sweep, dict) or set(sweep) != {"param", "values"}:
        raise CliError("'sweep' must be an object with fields 'param' and 'values'")
    param = str(sweep["param"])
    values = sweep["values"]
    if not isinstance(values, list):
        raise CliError("'sweep.values' must be a list")
    template = data["spec"]
    _parse_spec(copy.deepcopy(template), args.spec)  # validate before patching

    if values:
        workers = min(len(values), os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(lambda v: _sweep_row(args, template, param, v), values)
            )
    else:
        rows = []
    if args.format == "json":
        payload = {
            "config": _resolved_config(args, template),
            "param": param,
            "rows": rows,
        }
        _dump_json(payload, args.out)
    else:
        _dump_csv([param], rows, args.out)
    return EXIT_OK


def cmd_discretize(args) -> int:
    data = _load_json(args.spec)
    spec = _parse_spec(data, args.spec)
    if args.ratio < 2.0:
        raise CliError("a must be >= 2 (step ratio --ratio)")
    if spec.inequality not in ("3.1", "3.2"):
        raise CliError(
            f"discretize supports the 3.x family, got inequality {spec.inequality}"
        )
    try:
        _, seq, check, disc = _sequence_bundle(
            spec, args.window, args.grid_points, a=args.ratio
        )
    except DegenerateFunctionError as exc:
        payload = {
            "config": _resolved_config(args, spec.to_json()),
            "error": f"degenerate function: {exc}",
        }
        _dump_json(payload, args.out)
        return EXIT_WARNINGS
    except (ValueError, WeightError, QuadratureError) as exc:
        raise CliError(f"cannot discretize: {exc}") from exc
    payload = {
        "config": _resolved_config(args, spec.to_json()),
        "sequence": seq.to_json(),
        "verification": {
            "ok": check.ok,
            "constants": check.constants,
            "failures": check.failures(),
        },
        "discrete_condition": {"formula": disc.formula, "value": disc.value},
    }
    _dump_json(payload, args.out)
    return EXIT_OK if check.ok else EXIT_WARNINGS


# -- argument parsing --------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iterhardy",
        description="Weight-condition and best-constant computations "
        "for iterated Hardy-type and Stieltjes inequalities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, atoms=False, seed=False, ratio=False, bracket=False):
        p.add_argument("--spec", required=True, help="path to the JSON spec file")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument(
            "--format", choices=("json", "csv"), default=None,
            help="output format",
        )
        p.add_argument(
            "--grid-points", type=int, default=DEFAULT_GRID_POINTS,
            help="log-grid resolution for quadrature",
        )
        p.add_argument(
            "--window", type=str, default=None,
            help="working window LO:HI (default 1e-8:1e8)",
        )
        if atoms:
            p.add_argument(
                "--atoms", type=int, default=129,
                help="test-function resolution for the lower-bound search",
            )
        if seed:
            p.add_argument("--seed", type=int, default=0, help="optimizer seed")
        if ratio:
            p.add_argument(
                "--ratio", type=float, default=2.0,
                help="geometric step ratio a >= 2 for discretizing sequences",
            )
        if bracket:
            p.add_argument(
                "--bracket", type=str, default="1:50",
                help="acceptance band LO:HI for c_lo/condition",
            )

    p = sub.add_parser("compute-condition", help="evaluate the matched condition")
    common(p)
    p = sub.add_parser("verify", help="condition + oracle + chains + sequence check")
    common(p, atoms=True, seed=True, ratio=True, bracket=True)
    p = sub.add_parser("sweep", help="table of condition/oracle values over a range")
    common(p, atoms=True, seed=True)
    p = sub.add_parser("discretize", help="build and verify a discretizing sequence")
    common(p, ratio=True)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract reserves 2 for
        # hypothesis warnings, so usage problems map to 1
        return EXIT_BAD_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        args.window = (
            _parse_window(args.window) if args.window else tuple(DEFAULT_WINDOW)
        )
        if args.grid_points < 16:
            raise CliError("--grid-points must be at least 16")
        if hasattr(args, "atoms") and args.atoms < 9:
            raise CliError("--atoms must be at least 9")
        if hasattr(args, "bracket"):
            b = args.bracket
            args.bracket = (
                _parse_window(b) if isinstance(b, str) else tuple(b)
            )
        if args.format is None:
            args.format = "csv" if args.command == "sweep" else "json"
        handler = {
            "compute-condition": cmd_compute_condition,
            "verify": cmd_verify,
            "sweep": cmd_sweep,
            "discretize": cmd_discretize,
        }[args.command]
        return handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
