"""Command-line entry point.

Exit codes: 0 on success, 2 on configuration errors, 3 when the LP solver
fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from cohest import harness
from cohest.harness import ConfigError, ExperimentConfig
from cohest.lp import SolverError
from cohest.majorization import ConcavityViolation
from cohest.stabilizer import get_state, state_labels

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def parse_w_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad --w list {text!r}") from None


def parse_m_range(text: str) -> tuple[int, int]:
    """``'a..b'`` or a single integer."""
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise ConfigError(f"bad --m range {text!r}") from None
    return a, b


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--state")
    p.add_argument("--noise", help="none | depolarizing:<lambda> | dephasing:<gamma>")
    p.add_argument("--target-fidelity", type=float,
                   help="calibrate the noise strength to this fidelity")
    p.add_argument("--shots", type=int)
    p.add_argument("--exact", action="store_true", default=None,
                   help="use exact expectations and diagonal")
    p.add_argument("--w", help="comma-separated interval half-widths")
    p.add_argument("--m", help="subset sizes a..b")
    p.add_argument("--max-subsets", type=int)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--summary", help="write the scan summary table here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cohest", description="Bound the relative entropy of "
                     "coherence of stabilizer states from simulated measurements.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [
        ("run", "bounds from the full stabilizer group"),
        ("w-scan", "lower bound over a list of w values"),
        ("subset-scan", "lower bounds over subsets of m stabilizer elements"),
        ("exact", "bounds from exact expectations (no shot noise)"),
    ]:
        _common(sub.add_parser(name, help=help_))
    sio = sub.add_parser("verify-sio", help="check the incoherent-channel construction")
    sio.add_argument("--count", type=int, default=200)
    sio.add_argument("--seed", type=int, default=0)
    sio.add_argument("--tol", type=float, default=1e-9)
    sub.add_parser("list-states", help="list registered state labels")
    return parser


def config_from_args(args) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    overrides = {
        "state": args.state,
        "target_fidelity": args.target_fidelity,
        "shots": args.shots,
        "exact": args.exact,
        "max_subsets": args.max_subsets,
        "n_samples": args.n_samples,
        "seed": args.seed,
        "out": args.out,
        "format": args.format,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.noise is not None:
        data["noise"], data["noise_param"] = harness.parse_noise(args.noise)
    if args.w is not None:
        data["w"] = parse_w_list(args.w)
    if args.m is not None:
        data["m_min"], data["m_max"] = parse_m_range(args.m)
    if args.command == "exact":
        data["exact"] = True
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _emit(reports, cfg: ExperimentConfig):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            harness.write_reports(reports, fh, cfg.format)
    else:
        harness.write_reports(reports, sys.stdout, cfg.format)


def _emit_summary(summary, path):
    text = summary.table() + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)


def _run_experiment(args) -> int:
    cfg = config_from_args(args)
    if args.command == "w-scan":
        summary, reports = harness.run_w_scan(cfg)
        _emit_summary(summary, args.summary)
    elif args.command == "subset-scan":
        summary, reports = harness.run_subset_scan(cfg)
        _emit_summary(summary, args.summary)
    else:
        reports = [harness.run_full(cfg)]
    _emit(reports, cfg)
    return EXIT_OK


def _verify_sio(args) -> int:
    from cohest.sio import verify_random

    if args.count < 1:
        raise ConfigError("--count must be positive")
    checks = verify_random(args.count, seed=args.seed)
    failed = sum(not c.passed(args.tol) for c in checks)
    worst = {
        "deviation": max(c.deviation for c in checks),
        "completeness": max(c.completeness for c in checks),
        "coherence_gap_min": min(c.coherence_gap for c in checks),
    }
    print(f"{'PASS' if not failed else 'FAIL'}: {len(checks) - failed}/{len(checks)} "
          f"states reconstructed")
    for key, value in worst.items():
        print(f"  {key}: {value:.3e}")
    return EXIT_OK if not failed else 1


def _list_states() -> int:
    for label in state_labels():
        try:
            print(f"{label}\t{get_state(label).n}")
        except KeyError:  # the parametric cluster family
            print(label)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False)
                        else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "list-states":
            return _list_states()
        if args.command == "verify-sio":
            return _verify_sio(args)
        return _run_experiment(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ConcavityViolation) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def dump_config(cfg: ExperimentConfig) -> str:
    """JSON text that ``--config`` accepts back."""
    return json.dumps(asdict(cfg), indent=1)


if __name__ == "__main__":
    sys.exit(main())
