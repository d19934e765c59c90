"""Command-line interface.

Exit codes: 0 success, 1 a preset expectation failed, 2 bad configuration
or arguments, 3 file-system error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import voting as vt
from .config import ConfigError, ScenarioConfig, from_dict, to_dict
from .engine import ScenarioResult, run_scenario
from .experiments import get_preset, list_presets, run_preset, sweep

EXIT_OK, EXIT_EXPECTATION, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
CONFIG_FORMAT = "groupsim-config/json"
ROUNDS_HEADER = ["run", "round", "problem", "n_j", "group_correct", "stimulus", "psi_group"]
SUMMARY_HEADER = ["run", "problem", "accuracy", "mean_agents", "approp_share"]


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _f6(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6f}"


# -- bundle writing ---------------------------------------------------------

def manifest_for(cfg: ScenarioConfig) -> dict:
    return {"tool": "groupsim", "version": __version__, "format": CONFIG_FORMAT, "seed": cfg.seed,
            "config": to_dict(cfg)}


def write_rounds(path: Path, result: ScenarioResult) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROUNDS_HEADER)
        for tr in result.traces:
            m = tr.n_j.shape[1]
            for t in range(tr.rounds):
                for j in range(m):
                    w.writerow([tr.run, t, j, int(tr.n_j[t, j]), int(tr.group_correct[t, j]),
                                _f6(float(tr.stimulus[t, j])), _f6(float(tr.psi_group[t, j]))])


def write_summary(path: Path, result: ScenarioResult) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for s in result.summaries:
            for j, acc in enumerate(s.accuracy):
                w.writerow([s.run, j, _f6(acc), _f6(s.mean_agents[j]), _f6(s.approp_by_problem[j])])
            w.writerow([s.run, "aggregate", _f6(s.aggregate), _f6(sum(s.mean_agents)), _f6(s.approp_share)])


def summary_text(result: ScenarioResult) -> str:
    cfg = result.config
    lines = [f"agents {cfg.n_agents}, problems {cfg.n_problems}, runs {cfg.runs}, rounds {cfg.rounds}, "
             f"seed {cfg.seed}", ""]
    for j, acc in enumerate(result.mean("accuracy")):
        lines.append(f"problem {j}: accuracy {acc:.6f}, mean agents {result.mean('mean_agents')[j]:.6f}")
    lines.append(f"aggregate accuracy {result.mean('aggregate'):.6f}")
    share = result.mean("approp_share")
    if share is not None:
        lines.append(f"appropriate allocation share {share:.6f}")
    return "\n".join(lines) + "\n"


def write_bundle(out: Path, result: ScenarioResult, report: Optional[str] = None) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_rounds(out / "rounds.csv", result)
    write_summary(out / "summary.csv", result)
    (out / "manifest.json").write_text(json.dumps(manifest_for(result.config), indent=2) + "\n")
    (out / "report.txt").write_text(report if report is not None else summary_text(result))


# -- commands ---------------------------------------------------------------

def load_config(path: str) -> ScenarioConfig:
    """Read a config file or a manifest written by a previous run."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"not valid JSON: {exc}") from None
    if isinstance(data, dict) and data.get("format") == CONFIG_FORMAT and "config" in data:
        data = data["config"]
    return from_dict(data)


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    changes = {k: getattr(args, k) for k in ("seed", "runs", "rounds") if getattr(args, k) is not None}
    try:
        cfg = replace(cfg, **changes)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run_scenario(cfg, workers=args.workers)
    try:
        write_bundle(Path(args.out), result)
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    sys.stdout.write(summary_text(result))
    return EXIT_OK


def _parse_sets(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        path, sep, raw = item.partition("=")
        if not sep or not path:
            raise ConfigError(item, "expected PATH=VALUE")
        try:
            out[path] = json.loads(raw)
        except json.JSONDecodeError:
            out[path] = raw
    return out


def cmd_preset(args) -> int:
    if args.name == "list":
        for name in list_presets():
            print(f"{name}: {get_preset(name).description}")
        return EXIT_OK
    try:
        overrides = _parse_sets(args.set)
        report = run_preset(args.name, seed=args.seed, overrides=overrides or None, cases=args.case,
                            workers=args.workers)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.to_text()
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for case, result in report.results.items():
                write_bundle(out / case, result)
            (out / "report.txt").write_text(text)
            manifest = {"tool": "groupsim", "version": __version__, "format": CONFIG_FORMAT,
                        "preset": report.name, "seed": args.seed, "overrides": overrides,
                        "cases": list(report.results)}
            (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
        except OSError as exc:
            print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK if report.passed else EXIT_EXPECTATION


def cmd_sweep(args) -> int:
    try:
        values = [json.loads(v) for v in args.values.split(",")]
    except json.JSONDecodeError:
        print(f"error: malformed value list {args.values!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rows = sweep(args.name, args.parameter, values, seed=args.seed, case=args.case, workers=args.workers)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    header = list(rows[0]) if rows else [args.parameter]
    try:
        fh = open(args.out, "w", newline="") if args.out else sys.stdout
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([r[args.parameter]] + [_f6(r.get(h)) for h in header[1:]])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_config(args) -> int:
    try:
        preset = get_preset(args.name)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    case = args.case or preset.sweep_case or next(iter(preset.cases))
    if case not in preset.cases:
        print(f"error: preset {args.name!r} has no case {case!r}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(to_dict(preset.cases[case]), indent=2))
    return EXIT_OK


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number list {text!r}") from None


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability out of range: {text}")
    return p


def cmd_oracle(args) -> int:
    try:
        if args.oracle == "majority":
            print(f"{vt.analytic_majority_accuracy(args.n, args.p):.6f}")
        elif args.oracle == "bounds":
            lo, hi = vt.majority_accuracy_bounds(sorted(args.accuracies))
            print(f"{lo:.6f} {hi:.6f}")
        else:
            print(f"{vt.enumerate_group_accuracy(args.accuracies, args.weights):.6f}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="groupsim", description="Collective decision and task-allocation simulator.")
    parser.add_argument("--version", action="version", version=f"groupsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    s = sub.add_parser("simulate", help="run a scenario from a config or manifest file")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--runs", type=int)
    s.add_argument("--rounds", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preset", help="run a named preset, or 'list'")
    p.add_argument("name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--case", action="append", help="run only this case (repeatable)")
    p.add_argument("--set", action="append", metavar="PATH=VALUE", help="override a config field")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_preset)

    w = sub.add_parser("sweep", help="rerun one preset case over a parameter")
    w.add_argument("name")
    w.add_argument("parameter")
    w.add_argument("values", help="comma-separated values")
    w.add_argument("--case")
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out")
    w.add_argument("--workers", type=int, default=1)
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("config", help="print the config of a preset case")
    c.add_argument("name")
    c.add_argument("case", nargs="?")
    c.set_defaults(func=cmd_config)

    o = sub.add_parser("oracle", help="closed-form and enumeration accuracy oracles")
    osub = o.add_subparsers(dest="oracle", required=True, parser_class=_ArgumentParser)
    om = osub.add_parser("majority")
    om.add_argument("--n", type=int, required=True)
    om.add_argument("--p", type=_probability, required=True)
    ob = osub.add_parser("bounds")
    ob.add_argument("--accuracies", type=_float_list, required=True)
    oe = osub.add_parser("enumerate")
    oe.add_argument("--accuracies", type=_float_list, required=True)
    oe.add_argument("--weights", type=_float_list, required=True)
    o.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
