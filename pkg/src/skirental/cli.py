"""Command-line front end: ``skirental {solve-wc,solve-sg,solve-pi,sweep,eval-seq}``.

Exit codes: 0 success, 2 bad arguments, 3 solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from skirental.bayes import bayes_opt_costs
from skirental.instance import SkiInstance, hindsight_cost
from skirental.pi_solver import (
    build_cover,
    evaluate_against_worst_prior,
    solve_pi,
    threshold_mixture_policies,
    worst_grid_point,
)
from skirental.subgame import (
    policy_cost_on_sequence,
    policy_expected_cost,
    sg_benchmark_ratio,
    subgame_policy,
)
from skirental.worstcase import (
    competitive_ratio,
    conditional_stop_probs,
    wc_cost_on_sequence,
    worst_case_mixture,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3

DEFAULTS = {
    "eps": 0.01,
    "delta": 1e-3,
    "pitch": None,
    "max_rounds": 200_000,
    "out": None,
    "algorithms": "wc,sg,pi",
    "trace": None,
    "algorithm": "wc",
    "sequence": None,
}
ALGORITHMS = ("wc", "sg", "pi")
CSV_COLUMNS = ["T", "B", "algorithm", "metric", "worst_p", "ratio"]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepConfig:
    horizons: tuple[int, ...]
    stop_costs: tuple[float, ...]
    eps: float
    delta: float
    pitch: float | None
    max_rounds: int
    out: str | None
    algorithms: tuple[str, ...]

    def __post_init__(self):
        if not self.horizons or not self.stop_costs:
            raise UsageError("sweep ranges must be nonempty")
        if not self.eps > 0:
            raise UsageError("--eps must be positive")
        if not 0 < self.delta < 1:
            raise UsageError("--delta must lie in (0, 1)")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise UsageError(f"--algorithms must be a nonempty subset of {','.join(ALGORITHMS)}")


def parse_values(text, kind=float) -> tuple:
    """'2,3,4' or 'lo:hi[:step]' (inclusive) or a single number."""
    if isinstance(text, (int, float)):
        return (kind(text),)
    if isinstance(text, list):
        return tuple(kind(v) for v in text)
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1.0
            if step <= 0 or hi < lo:
                raise ValueError
            n = int(np.floor((hi - lo) / step + 1e-9))
            vals = [lo + i * step for i in range(n + 1)]
            return tuple(kind(round(v, 12)) for v in vals)
        return tuple(kind(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"cannot parse value list {text!r}") from None


def _instance(T, B, delta) -> SkiInstance:
    try:
        return SkiInstance(int(T), float(B), float(delta))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _settings(args) -> dict:
    """Merge defaults < JSON config < explicit flags."""
    merged = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        merged.update({k.replace("-", "_"): v for k, v in cfg.items()})
    for name, value in vars(args).items():
        if value is not None and name not in ("command", "config", "func"):
            merged[name] = value
    for required in ("T", "B"):
        if merged.get(required) is None:
            raise UsageError(f"--{required} is required (flag or config)")
    return merged


def cmd_worst_case(s: dict, out) -> int:
    inst = _instance(s["T"], s["B"], s["delta"])
    mix = worst_case_mixture(inst)
    print(f"instance T={inst.T} B={inst.B:g}", file=out)
    if inst.trivial:
        print("note: trivial instance (B >= T), always continue", file=out)
    print(f"value {_fmt(mix.value)}", file=out)
    support = ", ".join(f"{level}:{_fmt(p)}" for level, p in zip(mix.support, mix.probs))
    print(f"support {{{support}}}", file=out)
    sched = conditional_stop_probs(inst).probs
    print("stop_probs " + " ".join(_fmt(e) for e in sched), file=out)
    return EXIT_OK


def cmd_subgame(s: dict, out) -> int:
    inst = _instance(s["T"], s["B"], s["delta"])
    policy = subgame_policy(inst)
    print(f"instance T={inst.T} B={inst.B:g}", file=out)
    print(f"worst-case ratio {_fmt(competitive_ratio(inst))}", file=out)
    print(f"wc vs sg benchmark ratio {_fmt(sg_benchmark_ratio(inst))}", file=out)
    for t in range(1, inst.T + 1):
        row = " ".join(_fmt(policy.good_stop[t, k]) for k in range(1, t + 1))
        print(f"day {t}: {row}", file=out)
    if s["out"]:
        _write(s["out"], policy.to_json())
    return EXIT_OK


def cmd_solve_pi(s: dict, out) -> int:
    inst = _instance(s["T"], s["B"], s["delta"])
    sol = _solve(inst, s)
    print(f"instance T={inst.T} B={inst.B:g} delta={inst.prior_floor:g}", file=out)
    print(f"value {_fmt(sol.value)}", file=out)
    print(f"certified_gap {sol.certified_gap:.6g}", file=out)
    print(f"rounds {sol.rounds}, grid points {len(sol.grid)}, policies {len(sol.algorithm_mixture)}",
          file=out)
    if s["out"]:
        _write(s["out"], sol.to_json())
    if not sol.converged:
        print(f"did not converge: gap {sol.certified_gap:.6g} > target {sol.eps / 4:.6g}",
              file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _solve(inst, s):
    try:
        return solve_pi(inst, float(s["eps"]), pitch_override=_opt_float(s["pitch"]),
                        max_rounds=int(s["max_rounds"]), trace_path=s.get("trace"))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _opt_float(x):
    return None if x is None else float(x)


def sweep_rows(cfg: SweepConfig) -> tuple[list[list], bool]:
    """CSV rows in config order, plus whether every PI solve converged."""
    rows = []
    converged = True
    for T in cfg.horizons:
        for B in cfg.stop_costs:
            inst = _instance(T, B, cfg.delta)
            try:
                grid = build_cover(inst, cfg.eps, cfg.pitch)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            for alg in cfg.algorithms:
                if alg == "wc":
                    mix = threshold_mixture_policies(worst_case_mixture(inst))
                    p, r = evaluate_against_worst_prior(mix, grid, inst)
                elif alg == "sg":
                    ratios = (policy_expected_cost(subgame_policy(inst), grid.points)
                              / bayes_opt_costs(inst, grid.points))
                    p, r = worst_grid_point(ratios, grid.points)
                else:
                    sol = solve_pi(inst, cfg.eps, pitch_override=cfg.pitch,
                                   max_rounds=cfg.max_rounds)
                    converged &= sol.converged
                    p, r = evaluate_against_worst_prior(sol.algorithm_mixture, grid, inst)
                rows.append([T, f"{B:g}", alg, "pi_framework", f"{p:.10g}", f"{r:.10g}"])
    return rows, converged


def cmd_sweep(s: dict, out) -> int:
    cfg = SweepConfig(
        horizons=parse_values(s["T"], int),
        stop_costs=parse_values(s["B"], float),
        eps=float(s["eps"]),
        delta=float(s["delta"]),
        pitch=_opt_float(s["pitch"]),
        max_rounds=int(s["max_rounds"]),
        out=s["out"],
        algorithms=tuple(a.strip() for a in str(s["algorithms"]).split(",") if a.strip())
        if not isinstance(s["algorithms"], list) else tuple(s["algorithms"]),
    )
    rows, converged = sweep_rows(cfg)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    if cfg.out:
        _write(cfg.out, buf.getvalue())
    else:
        out.write(buf.getvalue())
    if not converged:
        print("some prior-independent solves did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_eval_sequence(s: dict, out) -> int:
    inst = _instance(s["T"], s["B"], s["delta"])
    text = str(s.get("sequence") or "").strip()
    if len(text) != inst.T or any(c not in "01" for c in text):
        raise UsageError(f"--sequence must be {inst.T} characters of 0/1, got {text!r}")
    seq = [int(c) for c in text]
    if s["algorithm"] not in ("wc", "sg"):
        raise UsageError("--algorithm must be wc or sg")
    if s["algorithm"] == "wc":
        cost = wc_cost_on_sequence(worst_case_mixture(inst), seq, inst)
    else:
        cost = policy_cost_on_sequence(subgame_policy(inst), seq)
    opt = hindsight_cost(sum(seq), inst.B)
    print(f"expected cost {_fmt(cost)}", file=out)
    print(f"hindsight optimum {_fmt(opt)}", file=out)
    if opt == 0:
        print("ratio 1.000000 (no good days: 0/0 reported as 1)", file=out)
    else:
        print(f"ratio {_fmt(cost / opt)}", file=out)
    return EXIT_OK


def _write(path: str, text: str):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skirental", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, sweep=False):
        p.add_argument("--T", default=None, type=None if sweep else int,
                       help="horizon" + (" (value, list a,b or range lo:hi)" if sweep else ""))
        p.add_argument("--B", default=None, type=None if sweep else float,
                       help="stop cost" + (" (value, list or lo:hi:step)" if sweep else ""))
        p.add_argument("--delta", type=float, default=None, help="prior floor (default 1e-3)")
        p.add_argument("--config", help="JSON file with option values; flags override it")

    def pi_opts(p):
        p.add_argument("--eps", type=float, default=None, help="target accuracy (default 0.01)")
        p.add_argument("--pitch", type=float, default=None,
                       help="grid pitch; default is the theoretical pitch")
        p.add_argument("--max-rounds", dest="max_rounds", type=int, default=None)

    p = sub.add_parser("solve-wc", help="worst-case optimal threshold mixture")
    common(p)
    p.set_defaults(func=cmd_worst_case)

    p = sub.add_parser("solve-sg", help="subgame-optimal behavioral policy")
    common(p)
    p.add_argument("--out", default=None, help="write the policy as JSON")
    p.set_defaults(func=cmd_subgame)

    p = sub.add_parser("solve-pi", help="approximate prior-independent optimum")
    common(p)
    pi_opts(p)
    p.add_argument("--out", default=None, help="write the solution as JSON")
    p.add_argument("--trace", default=None, help="per-round CSV trace path")
    p.set_defaults(func=cmd_solve_pi)

    p = sub.add_parser("sweep", help="worst-prior ratios over a parameter grid as CSV")
    common(p, sweep=True)
    pi_opts(p)
    p.add_argument("--algorithms", default=None, help="subset of wc,sg,pi")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval-seq", help="cost of wc or sg on a fixed weather sequence")
    common(p)
    p.add_argument("--algorithm", choices=("wc", "sg"), default=None)
    p.add_argument("--sequence", default=None, help="0/1 string of length T")
    p.set_defaults(func=cmd_eval_sequence)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(_settings(args), out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
