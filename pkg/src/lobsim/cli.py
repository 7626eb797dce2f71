"""Command-line experiment runner.

Scenarios map one-to-one onto library drivers and emit machine-readable
results (CSV or JSON) plus a human summary on stdout.  Outputs are fully
deterministic for a fixed config and seed: no timestamps, stable row
order, floats rounded to 12 significant digits.

Exit codes: 0 success, 1 internal invariant violation, 2 config error,
3 cutoff saturation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .analyzers import identified_bell, run_b_alpha, run_b_p
from .encodings import (
    BellIndex,
    Encoding,
    EncodingParams,
    LogicalAmplitudes,
    make_coherent_bell,
    make_polarization_bell,
)
from .errors import (
    CutoffSaturationError,
    InvariantViolationError,
    LobsimError,
    MixedBranchError,
)
from .fock import CutoffPolicy, fidelity
from .kerrgen import (
    KerrGenParams,
    expected_uncompensated_fidelity,
    generate_ecs_via_bs,
    generate_hybrid_pair,
    hybrid_pair_target,
    rotation_exactness_check,
)
from .teleport import (
    Metrics,
    TeleportConfig,
    analytic_success,
    sweep_alpha,
    teleport,
)

SCHEMA_VERSION = 1

SCENARIOS = ("bp-table", "balpha-table", "teleport", "sweep", "gen-hybrid", "gen-ecs")

#: Every key a config file may carry; unknown keys are rejected.
CONFIG_KEYS = {
    "scenario": str,
    "encoding": str,
    "alpha": float,
    "alpha_grid": list,
    "a_re": float,
    "a_im": float,
    "b_re": float,
    "b_im": float,
    "gamma": float,
    "parity": str,
    "seed": int,
    "tail_epsilon": float,
    "trials": int,
    "ideal_z": bool,
    "remove_90_plate": bool,
    "format": str,
    "out": str,
}


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    """12-significant-digit text form used in both CSV and summaries."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _round12(x):
    if isinstance(x, float):
        return float(f"{x:.12g}")
    return x


def load_config_file(path: str) -> dict:
    """Read a TOML or JSON config; a previously emitted JSON result file
    is accepted too (its embedded resolved config is reused)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    data = None
    if path.endswith(".json"):
        data = json.loads(raw.decode("utf-8"))
    else:
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError:
            try:
                data = json.loads(raw.decode("utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {path!r} is neither TOML nor JSON") from exc
    if isinstance(data, dict) and "config" in data and "schema" in data:
        data = data["config"]  # round-trip from an emitted result file
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a key-value table")
    for key, value in data.items():
        if key in ("out",) and value is None:
            continue
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        want = CONFIG_KEYS[key]
        if want is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            continue
        if want is int and isinstance(value, int) and not isinstance(value, bool):
            continue
        if not isinstance(value, want):
            raise ConfigError(f"config key {key!r} should be {want.__name__}")
    return data


def _parse_complex(text: str, what: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse {what} amplitude {text!r}") from None


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad alpha grid {text!r}") from None
    if not grid:
        raise ConfigError("alpha grid is empty")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lobsim",
        description="Linear-optics Bell-measurement and teleportation experiments",
    )
    sub = parser.add_subparsers(dest="scenario", required=True)

    def add_common(p):
        p.add_argument("--config", help="TOML/JSON config file; flags override")
        p.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
        p.add_argument("--tail-epsilon", type=float, default=None,
                       help="coherent-tail mass allowed past each cutoff")
        p.add_argument("--out", default=None, help="result file path")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--trials", type=int, default=None,
                       help="sampled mode with this many trials (default exact)")
        p.add_argument("--exact", action="store_true",
                       help="force exact enumeration (the default)")
        p.add_argument("--ideal-z", action="store_true", default=None,
                       help="allow the non-physical coherent-basis Z")

    p = sub.add_parser("bp-table", help="polarization analyzer classification table")
    add_common(p)
    p.add_argument("--remove-90-plate", action="store_true", default=None)

    p = sub.add_parser("balpha-table", help="coherent analyzer classification table")
    add_common(p)
    p.add_argument("--alpha", type=float, default=None)

    p = sub.add_parser("teleport", help="run one teleportation experiment")
    add_common(p)
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--a", default=None, help="logical amplitude a (complex ok)")
    p.add_argument("--b", default=None, help="logical amplitude b (complex ok)")

    p = sub.add_parser("sweep", help="teleportation metrics over an alpha grid")
    add_common(p)
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default=None)
    p.add_argument("--alpha-grid", default=None, help="comma-separated alphas")
    p.add_argument("--a", default=None)
    p.add_argument("--b", default=None)

    p = sub.add_parser("gen-hybrid", help="weak-Kerr hybrid pair generation")
    add_common(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)

    p = sub.add_parser("gen-ecs", help="entangled coherent state via cat splitting")
    add_common(p)
    p.add_argument("--alpha", type=float, default=None, help="per-mode ECS amplitude")
    p.add_argument("--parity", choices=("even", "odd"), default=None)

    return parser


_DEFAULTS = {
    "encoding": "hybrid",
    "alpha": 1.0,
    "alpha_grid": [0.5, 1.0, 1.4, 2.0],
    "a_re": 1 / math.sqrt(2),
    "a_im": 0.0,
    "b_re": 1 / math.sqrt(2),
    "b_im": 0.0,
    "gamma": 6.0,
    "parity": "even",
    "seed": 0,
    "tail_epsilon": 1e-12,
    "trials": 0,
    "ideal_z": False,
    "remove_90_plate": False,
    "format": "json",
    "out": None,
}


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and command-line flags (flags win)."""
    merged = dict(_DEFAULTS)
    merged["scenario"] = args.scenario
    if args.config:
        file_cfg = load_config_file(args.config)
        if "scenario" in file_cfg and file_cfg["scenario"] != args.scenario:
            raise ConfigError(
                f"config file is for scenario {file_cfg['scenario']!r}, "
                f"not {args.scenario!r}"
            )
        merged.update({k: v for k, v in file_cfg.items() if k != "scenario"})
    flag_map = {
        "seed": args.seed,
        "tail_epsilon": getattr(args, "tail_epsilon", None),
        "out": args.out,
        "format": args.format,
        "trials": args.trials,
        "ideal_z": getattr(args, "ideal_z", None),
        "encoding": getattr(args, "encoding", None),
        "alpha": getattr(args, "alpha", None),
        "gamma": getattr(args, "gamma", None),
        "parity": getattr(args, "parity", None),
        "remove_90_plate": getattr(args, "remove_90_plate", None),
    }
    for key, value in flag_map.items():
        if value is not None:
            merged[key] = value
    if getattr(args, "alpha_grid", None) is not None:
        merged["alpha_grid"] = _parse_grid(args.alpha_grid)
    if getattr(args, "a", None) is not None:
        a = _parse_complex(args.a, "a")
        merged["a_re"], merged["a_im"] = a.real, a.imag
    if getattr(args, "b", None) is not None:
        b = _parse_complex(args.b, "b")
        merged["b_re"], merged["b_im"] = b.real, b.imag
    if getattr(args, "exact", False):
        merged["trials"] = 0
    _validate(merged)
    return merged


def _validate(cfg: dict):
    if cfg["trials"] < 0:
        raise ConfigError("trials must be >= 0")
    if not 0.0 < cfg["tail_epsilon"] < 1.0:
        raise ConfigError("tail_epsilon must lie in (0, 1)")
    if cfg["alpha"] < 0:
        raise ConfigError("alpha must be >= 0")
    if cfg["encoding"] not in [e.value for e in Encoding]:
        raise ConfigError(f"unknown encoding {cfg['encoding']!r}")
    grid = cfg["alpha_grid"]
    if not grid or not all(isinstance(a, (int, float)) and not isinstance(a, bool)
                           for a in grid):
        raise ConfigError("alpha_grid must be a non-empty list of numbers")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("alpha_grid must be strictly ascending")
    if cfg["seed"] < 0 or cfg["seed"] >= 1 << 64:
        raise ConfigError("seed must fit in 64 bits")


def _policy(cfg: dict) -> CutoffPolicy:
    return CutoffPolicy(tail_epsilon=cfg["tail_epsilon"])


def _amps(cfg: dict) -> LogicalAmplitudes:
    return LogicalAmplitudes.normalized(
        complex(cfg["a_re"], cfg["a_im"]), complex(cfg["b_re"], cfg["b_im"])
    )


# ---------------------------------------------------------------------------
# scenario runners: each returns (columns, rows, summary-dict)
# ---------------------------------------------------------------------------


def run_bp_table(cfg: dict):
    include_plate = not cfg["remove_90_plate"]
    columns = ["input_state", "outcome", "pattern", "probability", "identifies"]
    rows = []
    success = 0.0
    for index in BellIndex:
        state = make_polarization_bell(index, pairs=("q1", "q2"))
        agg = {}
        for branch in run_b_p(state, "q1", "q2", include_90_plate=include_plate):
            out = branch.outcome
            ident = identified_bell(out, include_plate)
            key = (out.classification.value,
                   f"({out.pattern[0]},{out.pattern[1]})" if out.pattern else "",
                   ident.name if ident else "")
            agg[key] = agg.get(key, 0.0) + branch.probability
        for (cls, pattern, ident) in sorted(agg):
            rows.append([index.name, cls, pattern, agg[(cls, pattern, ident)], ident])
            if cls != "fail":
                success += agg[(cls, pattern, ident)] / len(BellIndex)
    summary = {"success_probability_uniform_prior": success}
    return columns, rows, summary


def run_balpha_table(cfg: dict):
    policy = _policy(cfg)
    params = EncodingParams(Encoding.COHERENT, cfg["alpha"], policy)
    columns = ["alpha", "input_state", "outcome", "probability"]
    rows = []
    fail_phi_plus = 0.0
    for index in BellIndex:
        state = make_coherent_bell(index, params)
        agg = {}
        for branch in run_b_alpha(state, "f1", "f2"):
            cls = branch.outcome.classification.value
            agg[cls] = agg.get(cls, 0.0) + branch.probability
        for cls in sorted(agg):
            rows.append([cfg["alpha"], index.name, cls, agg[cls]])
            if index is BellIndex.PHI_PLUS and cls == "fail":
                fail_phi_plus = agg[cls]
    a2 = cfg["alpha"] ** 2
    summary = {
        "fail_given_phi_plus": fail_phi_plus,
        "fail_given_phi_plus_analytic":
            2 * math.exp(-2 * a2) / (1 + math.exp(-4 * a2)),
    }
    return columns, rows, summary


def _teleport_rows(metrics: Metrics, cfg: dict):
    columns = ["encoding", "alpha", "outcome", "status", "j", "k",
               "probability", "fidelity"]
    rows = []
    for run in metrics.branches:
        ff = run.feedforward
        rows.append([
            cfg["encoding"], cfg["alpha"], run.outcome, run.status.value,
            ff.j if ff else None, ff.k if ff else None,
            run.probability, run.fidelity,
        ])
    return columns, rows


def run_teleport(cfg: dict):
    config = TeleportConfig(
        encoding=Encoding(cfg["encoding"]),
        alpha=cfg["alpha"],
        amps=_amps(cfg),
        ideal_z=cfg["ideal_z"],
        trials=cfg["trials"],
        seed=cfg["seed"],
        policy=_policy(cfg),
    )
    metrics = teleport(config)
    columns, rows = _teleport_rows(metrics, cfg)
    analytic = analytic_success(config.encoding, cfg["alpha"])
    summary = {
        "p_success": metrics.success_probability,
        "p_success_analytic": analytic,
        "abs_dev": abs(metrics.success_probability - analytic),
        "mean_fidelity_on_success": metrics.mean_fidelity_on_success,
        "cutoff_used": metrics.cutoff_used,
    }
    if metrics.bsm_success_probability is not None:
        summary["p_bsm_success"] = metrics.bsm_success_probability
    if cfg["trials"]:
        summary["sampled_trials"] = cfg["trials"]
    return columns, rows, summary


def run_sweep(cfg: dict):
    points = sweep_alpha(
        Encoding(cfg["encoding"]), list(cfg["alpha_grid"]), _amps(cfg),
        ideal_z=cfg["ideal_z"], trials=cfg["trials"], seed=cfg["seed"],
        policy=_policy(cfg),
    )
    columns = ["alpha", "p_success_sim", "p_success_analytic", "abs_dev",
               "mean_fidelity_success", "cutoff_used"]
    rows = [
        [pt.alpha, pt.metrics.success_probability, pt.analytic, pt.abs_dev,
         pt.metrics.mean_fidelity_on_success, pt.metrics.cutoff_used]
        for pt in points
    ]
    summary = {"max_abs_dev": max(pt.abs_dev for pt in points)}
    return columns, rows, summary


def run_gen_hybrid(cfg: dict):
    policy = _policy(cfg)
    params = KerrGenParams(cfg["alpha"], cfg["gamma"])
    compensated = generate_hybrid_pair(params, policy, compensate=True)
    uncompensated = generate_hybrid_pair(params, policy, compensate=False)
    cutoff = compensated.layout.mode("f").cutoff
    target = hybrid_pair_target(cfg["alpha"], cutoff)
    columns = ["alpha", "gamma", "theta", "fidelity_compensated",
               "fidelity_uncompensated", "fidelity_uncompensated_expected",
               "rotation_residual", "cutoff_used"]
    rows = [[
        cfg["alpha"], cfg["gamma"], params.theta,
        fidelity(compensated, target), fidelity(uncompensated, target),
        expected_uncompensated_fidelity(params),
        rotation_exactness_check(params), cutoff,
    ]]
    summary = {"fidelity_compensated": rows[0][3]}
    return columns, rows, summary


def run_gen_ecs(cfg: dict):
    policy = _policy(cfg)
    beta = cfg["alpha"]
    parity = cfg["parity"]
    ecs = generate_ecs_via_bs(beta, parity, policy)
    index = BellIndex.PHI_PLUS if parity == "even" else BellIndex.PHI_MINUS
    direct = make_coherent_bell(
        index, EncodingParams(Encoding.COHERENT, beta, policy)
    )
    fid = fidelity(ecs.normalized(), direct.normalized())
    columns = ["beta", "parity", "matches", "fidelity_vs_direct", "cutoff_used"]
    rows = [[beta, parity, index.name, fid, ecs.layout.mode("f1").cutoff]]
    summary = {"fidelity_vs_direct": fid}
    return columns, rows, summary


_RUNNERS = {
    "bp-table": run_bp_table,
    "balpha-table": run_balpha_table,
    "teleport": run_teleport,
    "sweep": run_sweep,
    "gen-hybrid": run_gen_hybrid,
    "gen-ecs": run_gen_ecs,
}

#: Columns holding probabilities, which must stay inside [0, 1].
_PROBABILITY_COLUMNS = {
    "probability", "p_success_sim", "p_success_analytic",
    "fidelity", "mean_fidelity_success",
}


def _validate_rows(columns, rows):
    for row in rows:
        for name, value in zip(columns, row):
            if value is None or isinstance(value, (str, bool)):
                continue
            if not math.isfinite(value):
                raise InvariantViolationError(
                    f"non-finite value in column {name!r}"
                )
            if name in _PROBABILITY_COLUMNS and not -1e-12 <= value <= 1 + 1e-12:
                raise InvariantViolationError(
                    f"column {name!r} outside [0, 1]: {value!r}"
                )


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def emit_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_json(columns, rows, summary, cfg) -> str:
    payload = {
        "schema": SCHEMA_VERSION,
        "seed": cfg["seed"],
        "tail_epsilon": cfg["tail_epsilon"],
        "config": {k: _round12(v) if isinstance(v, float) else v
                   for k, v in cfg.items() if k != "out"},
        "columns": list(columns),
        "rows": [[_round12(v) for v in row] for row in rows],
        "summary": {k: _round12(v) for k, v in summary.items()},
    }
    return json.dumps(payload, indent=2) + "\n"


def _print_summary(cfg, columns, rows, summary):
    print(f"scenario: {cfg['scenario']}")
    widths = [max(len(str(c)), *(len(_fmt(r[i])) for r in rows))
              for i, c in enumerate(columns)] if rows else [len(c) for c in columns]
    print("  " + "  ".join(c.ljust(w) for c, w in zip(columns, widths)))
    for row in rows:
        print("  " + "  ".join(_fmt(v).ljust(w) for v, w in zip(row, widths)))
    for key, value in summary.items():
        print(f"{key}: {_fmt(value)}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = resolve_config(args)
        columns, rows, summary = _RUNNERS[cfg["scenario"]](cfg)
        _validate_rows(columns, rows)
        if cfg["out"]:
            text = (emit_csv(columns, rows) if cfg["format"] == "csv"
                    else emit_json(columns, rows, summary, cfg))
            try:
                with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                print(f"error: cannot write {cfg['out']!r}: {exc}", file=sys.stderr)
                return 2
        _print_summary(cfg, columns, rows, summary)
        return 0
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CutoffSaturationError as exc:
        print(f"cutoff saturation: {exc}", file=sys.stderr)
        return 3
    except (InvariantViolationError, MixedBranchError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 1
    except LobsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
