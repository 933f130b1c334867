"""Deterministic command-line experiments with CSV or JSON output.

Five experiments: table1 (the three canonical states), werner-sweep (witness
across the Werner family), quality-scan (the four purity combinations with
the interference ratio R), simulate-counts (finite statistics for one state),
and setup-sim (optical chain versus the abstract pipeline).

Identical configuration, including the seed, gives byte-identical output.
Computed columns never mix with reference annotations: every column whose
name starts with ref_ carries previously reported values for comparison only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import counts, optics, states, witness
from .exceptions import InvariantViolation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2
EXIT_IO = 3

EXPERIMENTS = ("table1", "werner-sweep", "quality-scan", "simulate-counts", "setup-sim")

_POLICY_TOKENS = {p.value: p for p in witness.NormalizationPolicy}

DEFAULT_SEED = 7
DEFAULT_P = {"bell": 0.5, "mixed": 0.5, "werner": 0.5, "separable": 0.01}
WERNER_GRID_STEPS = 20

# reference annotations: (reported value, reported error, reported theory)
REFERENCE_TABLE1 = {
    "bell": (-0.21, 0.03, -0.25),
    "mixed": (0.69, 0.06, 0.75),
    "separable": (-0.01, 0.03, 0.00),
}
REFERENCE_WERNER = {
    0.0: (0.69, 0.06, 0.75),
    0.2: (0.65, 0.06, 0.71),
    0.4: (0.55, 0.06, 0.59),
    0.6: (0.37, 0.06, 0.39),
    0.8: (0.11, 0.06, 0.11),
    1.0: (-0.21, 0.03, -0.25),
}
REFERENCE_QUALITY = {
    ("pure", "pure"): (-0.21, 0.03, -0.25),
    ("pure", "mixed"): (0.71, 0.06, 0.75),
    ("mixed", "pure"): (0.70, 0.06, 0.75),
    ("mixed", "mixed"): (0.69, 0.06, 0.75),
}

_SETTING_LABELS = {s: "++" if s == witness.PLUS_SETTING else f"{s[0]}{s[1]}" for s in witness.SETTINGS}


@dataclass(frozen=True)
class ResolvedConfig:
    """All knobs after merging defaults, config file, and flags."""

    experiment: str
    state: states.CanonicalState
    P: float
    policy: witness.NormalizationPolicy
    visibility: float
    pairs: int
    pairs_source: str
    seed: int
    bootstrap: int
    format: str
    out: str | None
    setup: str


@dataclass(frozen=True)
class Report:
    """One experiment's output: a main table, side scans, and summary values."""

    header: tuple
    rows: list
    scans: dict
    summary: dict


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for invariant violations; usage errors are 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collectikit", description="entanglement witness experiments")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON file with flat option keys; flags override it")
    parser.add_argument("--state", help="bell | separable | mixed | werner:p")
    parser.add_argument("--policy", choices=sorted(_POLICY_TOKENS))
    parser.add_argument("--P", dest="P", type=float, help="splitting parameter in [0, 1]")
    parser.add_argument("--visibility", type=float, help="temporal overlap tau in [0, 1]")
    parser.add_argument("--pairs", type=int, help="photon pairs per setting")
    parser.add_argument("--seed", type=int, help="base random seed")
    parser.add_argument("--bootstrap", type=int, help="bootstrap resamples")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out", help="output file path (CSV scans go next to it)")
    parser.add_argument("--setup", help="optical layout name")
    return parser


_CONFIG_KEYS = (
    "state",
    "policy",
    "P",
    "visibility",
    "pairs",
    "seed",
    "bootstrap",
    "format",
    "out",
    "setup",
)


def _merge_config_file(args: argparse.Namespace) -> None:
    if args.config is None:
        return
    with open(args.config, encoding="utf-8") as fh:
        loaded = json.load(fh)
    if not isinstance(loaded, dict):
        raise ValueError(f"config file {args.config} must hold a JSON object")
    unknown = sorted(set(loaded) - set(_CONFIG_KEYS))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    for key in _CONFIG_KEYS:
        if key in loaded and getattr(args, key) is None:
            setattr(args, key, loaded[key])


def _require_int(name: str, value) -> int:
    # bool is an int subclass but makes no sense for any of these knobs
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return value


def _require_fraction(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} {value} outside [0, 1]")
    return value


def _resolve(args: argparse.Namespace) -> ResolvedConfig:
    state = states.CanonicalState.parse(args.state if args.state is not None else "bell")
    policy_token = args.policy if args.policy is not None else witness.DEFAULT_POLICY.value
    if policy_token not in _POLICY_TOKENS:
        raise ValueError(f"unknown policy {policy_token!r}")
    P = _require_fraction("P", args.P) if args.P is not None else DEFAULT_P[state.kind]
    visibility = _require_fraction("visibility", args.visibility) if args.visibility is not None else 1.0
    if args.pairs is not None:
        pairs = _require_int("pairs", args.pairs)
        if pairs < 0:
            raise ValueError(f"pairs {pairs} negative")
        pairs_source = "explicit"
    else:
        pairs = counts.calibrate_default_pairs()
        pairs_source = "calibrated"
    seed = _require_int("seed", args.seed) if args.seed is not None else DEFAULT_SEED
    if seed < 0:
        raise ValueError(f"seed {seed} negative")
    bootstrap = _require_int("bootstrap", args.bootstrap) if args.bootstrap is not None else counts.DEFAULT_RESAMPLES
    if bootstrap < 2:
        raise ValueError(f"bootstrap {bootstrap} below 2")
    fmt = args.format if args.format is not None else "csv"
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    setup = args.setup if args.setup is not None else optics.SETUP_NAMES[0]
    if setup not in optics.SETUP_NAMES:
        raise ValueError(f"unknown setup {setup!r}, available: {optics.SETUP_NAMES}")
    if args.out is not None and not isinstance(args.out, str):
        raise ValueError(f"out must be a path string, got {args.out!r}")
    return ResolvedConfig(
        experiment=args.experiment,
        state=state,
        P=P,
        policy=_POLICY_TOKENS[policy_token],
        visibility=visibility,
        pairs=pairs,
        pairs_source=pairs_source,
        seed=seed,
        bootstrap=bootstrap,
        format=fmt,
        out=args.out,
        setup=setup,
    )


def _point_seed(base: int, index: int) -> int:
    """Stable per-row seed derived from the base seed and the row index."""
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def _state_row(
    cfg: ResolvedConfig, state: states.CanonicalState, P: float, row_seed: int
) -> tuple[float, tuple, object]:
    """Exact witness, exact quartet, and finite-statistics estimate."""
    table = witness.prob_table(states.hes_state(state))
    quartet = witness.normalize(table, cfg.policy)
    exact = witness.witness_formula(P, quartet, cfg.policy)
    record = counts.sample_counts(table, cfg.pairs, row_seed)
    estimate = counts.estimate_witness(record, P, cfg.policy, cfg.bootstrap)
    return exact.w, quartet, estimate


def run_table1(cfg: ResolvedConfig) -> Report:
    header = (
        "state",
        "P",
        "policy",
        "pairs",
        "pairs_source",
        "seed",
        "bootstrap",
        "W_exact",
        "W_sim",
        "sigma",
        "p00",
        "p01",
        "p11",
        "ppp",
        "ref_W",
        "ref_W_err",
        "ref_W_th",
    )
    rows = []
    for index, state in enumerate((states.BELL, states.MIXED, states.SEPARABLE)):
        P = cfg.P if cfg.P is not None else DEFAULT_P[state.kind]
        row_seed = _point_seed(cfg.seed, index)
        w_exact, quartet, estimate = _state_row(cfg, state, P, row_seed)
        ref = REFERENCE_TABLE1[state.kind]
        rows.append(
            {
                "state": state.label(),
                "P": P,
                "policy": cfg.policy.value,
                "pairs": cfg.pairs,
                "pairs_source": cfg.pairs_source,
                "seed": row_seed,
                "bootstrap": cfg.bootstrap,
                "W_exact": w_exact,
                "W_sim": None if estimate is None else estimate.value,
                "sigma": None if estimate is None else estimate.std_error,
                "p00": quartet[0],
                "p01": quartet[1],
                "p11": quartet[2],
                "ppp": quartet[3],
                "ref_W": ref[0],
                "ref_W_err": ref[1],
                "ref_W_th": ref[2],
            }
        )
    return Report(header, rows, {}, {})


def run_werner_sweep(cfg: ResolvedConfig) -> Report:
    header = ("p", "W_exact", "W_interp", "W_sim", "sigma")
    w_bell = witness.witness_of_state(states.hes_state(states.werner(1.0)), cfg.P, cfg.policy).w
    w_mixed = witness.witness_of_state(states.hes_state(states.werner(0.0)), cfg.P, cfg.policy).w
    rows = []
    for k in range(WERNER_GRID_STEPS + 1):
        p = k / WERNER_GRID_STEPS
        table = witness.prob_table(states.hes_state(states.werner(p)))
        exact = witness.witness_formula(cfg.P, witness.normalize(table, cfg.policy), cfg.policy)
        record = counts.sample_counts(table, cfg.pairs, _point_seed(cfg.seed, k))
        estimate = counts.estimate_witness(record, cfg.P, cfg.policy, cfg.bootstrap)
        rows.append(
            {
                "p": p,
                "W_exact": exact.w,
                "W_interp": witness.werner_interpolate(w_bell, w_mixed, p),
                "W_sim": None if estimate is None else estimate.value,
                "sigma": None if estimate is None else estimate.std_error,
            }
        )
    summary = {"W_endpoint_bell": w_bell, "W_endpoint_mixed": w_mixed}
    if w_bell < 0.0 < w_mixed:
        summary["p_star"] = witness.detection_threshold(w_bell, w_mixed)
    summary["reference"] = {
        repr(p): {"W": ref[0], "W_err": ref[1], "W_th": ref[2]} for p, ref in REFERENCE_WERNER.items()
    }
    return Report(header, rows, {}, summary)


def run_quality_scan(cfg: ResolvedConfig) -> Report:
    header = ("rho_p", "rho_s", "P", "policy", "tau", "W_exact", "R", "ref_W", "ref_W_err", "ref_W_th")
    rows = []
    scans = {}
    grid = optics.default_phase_grid()
    for pol_label, spatial_label in REFERENCE_QUALITY:
        pol_mixed = pol_label == "mixed"
        spatial_mixed = spatial_label == "mixed"
        rho = states.hes_product(
            states.single_copy(states.MIXED if pol_mixed else states.BELL, states.POLARIZATION_PAIR),
            states.single_copy(states.MIXED if spatial_mixed else states.BELL, states.SPATIAL_PAIR),
        )
        w_exact = witness.witness_of_state(rho, cfg.P, cfg.policy).w
        ensemble = optics.prepare_hybrid(pol_mixed, spatial_mixed, cfg.visibility)
        scan = optics.phase_scan_mixture(ensemble, grid)
        ref = REFERENCE_QUALITY[(pol_label, spatial_label)]
        rows.append(
            {
                "rho_p": pol_label,
                "rho_s": spatial_label,
                "P": cfg.P,
                "policy": cfg.policy.value,
                "tau": cfg.visibility,
                "W_exact": w_exact,
                "R": optics.ratio_R(scan),
                "ref_W": ref[0],
                "ref_W_err": ref[1],
                "ref_W_th": ref[2],
            }
        )
        scans[f"{pol_label}-{spatial_label}"] = (
            ("phi", "cc"),
            [{"phi": phi, "cc": cc} for phi, cc in scan],
        )
    return Report(header, rows, scans, {})


def run_simulate_counts(cfg: ResolvedConfig) -> Report:
    header = (
        "state",
        "P",
        "policy",
        "pairs",
        "pairs_source",
        "seed",
        "bootstrap",
        "n00",
        "n01",
        "n10",
        "n11",
        "npp",
        "W_sim",
        "sigma",
        "W_exact",
    )
    table = witness.prob_table(states.hes_state(cfg.state))
    exact = witness.witness_formula(cfg.P, witness.normalize(table, cfg.policy), cfg.policy)
    record = counts.sample_counts(table, cfg.pairs, cfg.seed)
    estimate = counts.estimate_witness(record, cfg.P, cfg.policy, cfg.bootstrap)
    row = {
        "state": cfg.state.label(),
        "P": cfg.P,
        "policy": cfg.policy.value,
        "pairs": cfg.pairs,
        "pairs_source": cfg.pairs_source,
        "seed": cfg.seed,
        "bootstrap": cfg.bootstrap,
        "n00": record.n00,
        "n01": record.n01,
        "n10": record.n10,
        "n11": record.n11,
        "npp": record.npp,
        "W_sim": None if estimate is None else estimate.value,
        "sigma": None if estimate is None else estimate.std_error,
        "W_exact": exact.w,
    }
    return Report(header, [row], {}, {})


def run_setup_sim(cfg: ResolvedConfig) -> Report:
    header = ("state", "setup", "tau", "setting", "p_optical", "p_model", "abs_diff")
    ensemble = optics.prepare_setup(cfg.setup, cfg.state, cfg.visibility)
    simulated = optics.simulate_settings(ensemble)
    table = witness.prob_table(states.hes_state(cfg.state))
    model = {
        (0, 0): table.p00,
        (0, 1): table.p01,
        (1, 0): table.p10,
        (1, 1): table.p11,
        witness.PLUS_SETTING: table.ppp,
    }
    rows = []
    for setting in witness.SETTINGS:
        diff = abs(simulated[setting] - model[setting])
        rows.append(
            {
                "state": cfg.state.label(),
                "setup": cfg.setup,
                "tau": cfg.visibility,
                "setting": _SETTING_LABELS[setting],
                "p_optical": simulated[setting],
                "p_model": model[setting],
                "abs_diff": diff,
            }
        )
    summary = {"max_abs_diff": max(row["abs_diff"] for row in rows)}
    return Report(header, rows, {}, summary)


_RUNNERS = {
    "table1": run_table1,
    "werner-sweep": run_werner_sweep,
    "quality-scan": run_quality_scan,
    "simulate-counts": run_simulate_counts,
    "setup-sim": run_setup_sim,
}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        # plain-float repr: shortest round-trip form, no numpy scalar wrapper
        return repr(float(value))
    return str(value)


def _render_csv(header: tuple, rows: list) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[name]) for name in header])
    return buffer.getvalue()


def _jsonify(value):
    if isinstance(value, float):
        return "inf" if math.isinf(value) else float(value)
    if isinstance(value, dict):
        return {key: _jsonify(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(item) for item in value]
    return value


def _config_echo(cfg: ResolvedConfig) -> dict:
    return {
        "experiment": cfg.experiment,
        "state": cfg.state.label(),
        "P": cfg.P,
        "policy": cfg.policy.value,
        "visibility": cfg.visibility,
        "pairs": cfg.pairs,
        "pairs_source": cfg.pairs_source,
        "seed": cfg.seed,
        "bootstrap": cfg.bootstrap,
        "setup": cfg.setup,
    }


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _emit(cfg: ResolvedConfig, report: Report) -> None:
    if cfg.format == "json":
        payload = {
            "config": _config_echo(cfg),
            "columns": list(report.header),
            "rows": [_jsonify(row) for row in report.rows],
        }
        if report.summary:
            payload["summary"] = _jsonify(report.summary)
        if report.scans:
            payload["scans"] = {
                tag: [_jsonify(row) for row in rows] for tag, (_, rows) in report.scans.items()
            }
        text = json.dumps(payload, indent=2, allow_nan=False) + "\n"
        if cfg.out is None:
            sys.stdout.write(text)
        else:
            _write_text(cfg.out, text)
        return
    text = _render_csv(report.header, report.rows)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        _write_text(cfg.out, text)
        stem = cfg.out[: -len(".csv")] if cfg.out.endswith(".csv") else cfg.out
        for tag, (scan_header, scan_rows) in report.scans.items():
            _write_text(f"{stem}_scan_{tag}.csv", _render_csv(scan_header, scan_rows))
    for key, value in report.summary.items():
        if not isinstance(value, dict):
            print(f"# {key} = {_cell(value)}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config_file(args)
        cfg = _resolve(args)
        report = _RUNNERS[cfg.experiment](cfg)
        _emit(cfg, report)
    except InvariantViolation as error:
        print(f"collectikit: invariant violation: {error}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as error:
        print(f"collectikit: invalid input: {error}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as error:
        print(f"collectikit: i/o error: {error}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
