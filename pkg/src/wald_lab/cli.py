"""Command-line front end.

Every subcommand takes its parameters from defaults, then an optional flat
``key = value`` config file (``--config``), then command-line flags. Results go
to ``--out`` (or stdout) as CSV or JSON; errors go to stderr as one JSON line
and set the exit code (2 invalid input, 3 numerical failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from typing import Any, Callable

from . import discounting, effort, info_cost, montecarlo, probe, stats, tables
from .boundaries import solve_boundaries
from .core import PayoffMatrix, Problem, canonicalize
from .errors import ValidationError, WaldLabError

COMMON_KEYS = {"out", "format", "quiet"}
PROBLEM_KEYS = {"mu", "sigma", "c", "payoffs", "delta", "p_tilde"}
KEYS: dict[str, set[str]] = {
    "solve": PROBLEM_KEYS,
    "sweep": PROBLEM_KEYS | {"grid"},
    "simulate": PROBLEM_KEYS | {"seed", "paths", "dt", "workers"},
    "effort": PROBLEM_KEYS | {"grid", "cost", "lambda_lo", "lambda_hi"},
    "cost": {"grid", "cost"},
    "discount": {"r", "mu", "sigma", "grid"},
    "probe": {"problems", "shares", "eps"},
}
DEFAULTS: dict[str, Any] = {
    "format": "csv",
    "quiet": False,
    "mu": 1.0,
    "sigma": 1.0,
    "c": 1.0,
    "seed": 0,
    "paths": 100_000,
    "dt": 1e-4,
    "workers": 1,
    "cost": None,
    "lambda_lo": 1.0,
    "lambda_hi": 4.0,
    "r": 0.5,
}
GRID_DEFAULTS = {
    "sweep": "0.05:20:200:log",
    "effort": "0.05:20:50:log",
    "cost": "0.01:100:200:log",
}
CONVERTERS: dict[str, Callable[[str], Any]] = {
    "mu": float, "sigma": float, "c": float, "delta": float, "p_tilde": float,
    "dt": float, "r": float, "eps": float, "lambda_lo": float, "lambda_hi": float,
    "seed": int, "paths": int, "workers": int,
    "quiet": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def parse_grid(text: str) -> list[float]:
    """MIN:MAX:N:{log|lin} -> N points."""
    try:
        lo_s, hi_s, n_s, kind = text.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError:
        raise ValidationError(f"grid must look like MIN:MAX:N:log|lin, got {text!r}") from None
    if n < 1:
        raise ValidationError("grid is empty")
    if kind not in ("log", "lin"):
        raise ValidationError(f"grid spacing must be log or lin, got {kind!r}")
    if not hi >= lo or (kind == "log" and lo <= 0):
        raise ValidationError(f"invalid grid range {lo}..{hi}")
    if n == 1:
        return [lo]
    if kind == "lin":
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    return [math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * i / (n - 1)) for i in range(n)]


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValidationError(f"{path}:{n}: expected key = value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def resolve(command: str, flags: dict[str, Any]) -> dict[str, Any]:
    allowed = KEYS[command] | COMMON_KEYS
    cfg = {k: v for k, v in DEFAULTS.items() if k in allowed}
    if command in GRID_DEFAULTS:
        cfg["grid"] = GRID_DEFAULTS[command]
    if flags.get("config"):
        file_vals = read_config(flags["config"])
        unknown = sorted(set(file_vals) - allowed)
        if unknown:
            raise ValidationError(f"unknown config keys for {command}: {', '.join(unknown)}")
        for k, v in file_vals.items():
            try:
                cfg[k] = CONVERTERS.get(k, str)(v)
            except ValueError:
                raise ValidationError(f"bad value for {k}: {v!r}") from None
    for k, v in flags.items():
        if k == "config" or v is None:
            continue
        if k not in allowed:
            raise ValidationError(f"option --{k.replace('_', '-')} does not apply to {command}")
        cfg[k] = v
    if cfg.get("format") not in ("csv", "json"):
        raise ValidationError("format must be csv or json")
    return cfg


def build_problem(cfg: dict[str, Any]) -> Problem:
    if cfg.get("payoffs") is not None and (cfg.get("delta") is not None or cfg.get("p_tilde") is not None):
        raise ValidationError("give either payoffs or (delta, p_tilde), not both")
    if cfg.get("payoffs") is not None:
        try:
            vals = [float(v) for v in str(cfg["payoffs"]).split(",")]
        except ValueError:
            raise ValidationError("payoffs must be four comma-separated numbers") from None
        if len(vals) != 4:
            raise ValidationError("payoffs must be u_aa,u_ab,u_ba,u_bb")
        pay = PayoffMatrix(*vals)
    elif cfg.get("delta") is not None or cfg.get("p_tilde") is not None:
        pay = PayoffMatrix.from_stakes(cfg.get("delta") or 2.0, cfg.get("p_tilde") or 0.5)
    else:
        pay = PayoffMatrix.identity()
    return Problem(pay, mu=cfg["mu"], sigma=cfg["sigma"], c=cfg["c"])


def _problem_meta(problem: Problem) -> dict[str, Any]:
    cp = canonicalize(problem)
    return {"k": cp.k, "c_tilde": cp.c_tilde, "ell_tilde": cp.ell_tilde, "delta": problem.payoffs.delta}


def cmd_solve(cfg):
    problem = build_problem(cfg)
    cp = canonicalize(problem)
    b = solve_boundaries(cp)
    st = stats.stop_stats(b, cp.k)
    row = {
        "ell_lo": b.ell_lo, "ell_hi": b.ell_hi, "p_lo": b.p_lo, "p_hi": b.p_hi,
        "residual_1": b.residual_1, "residual_2": b.residual_2,
        "immediate_stop": b.immediate_stop, "accuracy": st.accuracy,
        "expected_time": st.expected_time, "prob_choose_a": st.prob_choose_a,
    }
    return "solve", [row], _problem_meta(problem)


def cmd_sweep(cfg):
    problem = build_problem(cfg)
    rows = [asdict(r) for r in stats.sweep(problem, parse_grid(cfg["grid"]))]
    meta = _problem_meta(problem)
    del meta["k"]
    return "sweep", rows, meta


def cmd_simulate(cfg):
    problem = build_problem(cfg)
    cp = canonicalize(problem)
    b = solve_boundaries(cp)
    exact = stats.stop_stats(b, cp.k)
    sim_cfg = montecarlo.SimConfig(n_paths=cfg["paths"], dt=cfg["dt"], seed=cfg["seed"], workers=cfg["workers"])
    mc = montecarlo.simulate(problem, b, sim_cfg)
    rows = []
    for q in ("accuracy", "expected_time", "prob_choose_a"):
        se = mc.std_err[q]
        diff = getattr(mc, q) - getattr(exact, q)
        z = diff / se if se > 0 else (0.0 if diff == 0 else math.copysign(math.inf, diff))
        rows.append({"quantity": q, "closed_form": getattr(exact, q), "monte_carlo": getattr(mc, q),
                     "std_err": se, "z_score": z})
    meta = {**mc.metadata, "ell_lo": b.ell_lo, "ell_hi": b.ell_hi, **_problem_meta(problem)}
    return "simulate", rows, meta


def cmd_effort(cfg):
    problem = build_problem(cfg)
    cost = effort.parse_cost(cfg["cost"] or "quadratic_fixed:1,1")
    lam_lo, lam_hi = cfg["lambda_lo"], cfg["lambda_hi"]
    e_star = effort.solve_effort(cost)
    k_under, k_over = effort.ability_thresholds(problem, lam_lo, lam_hi, cost)
    rows = []
    for k in parse_grid(cfg["grid"]):
        base = Problem(problem.payoffs, mu=k * problem.sigma, sigma=problem.sigma, c=problem.c)
        out = {"k": k}
        for tag, lam in (("lo", lam_lo), ("hi", lam_hi)):
            cp = canonicalize(effort.effective_problem(base, lam, cost))
            st = stats.stop_stats(solve_boundaries(cp), cp.k)
            out[f"k_eff_{tag}"] = cp.k
            out[f"accuracy_{tag}"] = st.accuracy
            out[f"expected_time_{tag}"] = st.expected_time
        rows.append(out)
    meta = {"cost": cost.name, "e_star": e_star, "flow_cost": cost.c(e_star),
            "lambda_lo": lam_lo, "lambda_hi": lam_hi, "k_under": k_under, "k_over": k_over}
    return "effort", rows, meta


def cmd_cost(cfg):
    cost = info_cost.named_cost(cfg["cost"] or "entropy")
    rows = [asdict(p) for p in info_cost.expected_time_curve(parse_grid(cfg["grid"]), cost)]
    return "cost", rows, {"cost": cost.name}


def cmd_discount(cfg):
    r = cfg["r"]
    if cfg.get("grid"):
        ks = parse_grid(cfg["grid"])
    else:
        ks = [cfg["mu"] / cfg["sigma"]]
    rows = []
    for k in ks:
        dp = discounting.DiscountedProblem(r, k)
        st = discounting.disc_stats(dp)
        rows.append({"k": k, "ell_star": discounting.disc_boundary(dp),
                     "accuracy": st.accuracy, "expected_time": st.expected_time})
    return "discount", rows, {"r": r}


def _load_problems(path: str) -> tuple[list[str], list[Problem]]:
    try:
        doc = json.load(open(path, encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read problem list {path}: {exc}") from None
    if not isinstance(doc, list) or not doc:
        raise ValidationError("problem list must be a non-empty JSON array")
    ids, problems = [], []
    allowed = {"id"} | PROBLEM_KEYS
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise ValidationError(f"problem {i} is not an object")
        unknown = set(entry) - allowed
        if unknown:
            raise ValidationError(f"problem {i}: unknown keys {sorted(unknown)}")
        merged = {"mu": 1.0, "sigma": 1.0, "c": 1.0, **entry}
        if isinstance(merged.get("payoffs"), list):
            merged["payoffs"] = ",".join(str(v) for v in merged["payoffs"])
        ids.append(str(entry.get("id", f"p{i}")))
        problems.append(build_problem(merged))
    return ids, problems


def cmd_probe(cfg):
    if bool(cfg.get("problems")) == bool(cfg.get("shares")):
        raise ValidationError("probe needs exactly one of --problems or --shares")
    if cfg.get("problems"):
        ids, problems = _load_problems(cfg["problems"])
        ranking = probe.rank_problems(problems, eps=cfg.get("eps"), ids=ids)
        meta = {"source": "model", "eps": cfg.get("eps") if cfg.get("eps") is not None else "0.01*delta"}
    else:
        try:
            text = open(cfg["shares"], encoding="utf-8").read()
        except OSError as exc:
            raise ValidationError(f"cannot read shares {cfg['shares']}: {exc}") from None
        cols = ("problem_id", "baseline_share_b", "shifted_share_b", "n_obs")
        try:
            obs = [
                probe.ShareObservation(r["problem_id"], float(r["baseline_share_b"]),
                                       float(r["shifted_share_b"]), int(r["n_obs"]))
                for r in tables.read_plain_csv(text, cols)
            ]
        except ValueError as exc:
            raise ValidationError(f"bad shares row: {exc}") from None
        ranking = probe.rank_from_data(obs)
        meta = {"source": "data"}
    rows = [asdict(r) for r in ranking.rows]
    meta["separated"] = ";".join("1" if s else "0" for s in ranking.separated)
    return "probe", rows, meta


COMMANDS = {
    "solve": cmd_solve, "sweep": cmd_sweep, "simulate": cmd_simulate, "effort": cmd_effort,
    "cost": cmd_cost, "discount": cmd_discount, "probe": cmd_probe,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--quiet", action="store_const", const=True)
    common.add_argument("--seed", type=int)
    common.add_argument("--paths", type=int)
    common.add_argument("--dt", type=float)
    common.add_argument("--grid", metavar="MIN:MAX:N:{log|lin}")

    prob = argparse.ArgumentParser(add_help=False)
    prob.add_argument("--mu", type=float)
    prob.add_argument("--sigma", type=float)
    prob.add_argument("--c", type=float, help="flow cost per unit time")
    prob.add_argument("--payoffs", metavar="U_AA,U_AB,U_BA,U_BB")
    prob.add_argument("--delta", type=float, help="stakes (with --p-tilde)")
    prob.add_argument("--p-tilde", type=float, dest="p_tilde")

    parser = argparse.ArgumentParser(prog="wald-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common, prob], help="optimal thresholds and statistics")
    sub.add_parser("sweep", parents=[common, prob], help="statistics along a k grid")
    sim = sub.add_parser("simulate", parents=[common, prob], help="Monte Carlo vs closed form")
    sim.add_argument("--workers", type=int)
    eff = sub.add_parser("effort", parents=[common, prob], help="ability crossover table")
    eff.add_argument("--cost", help="e.g. quadratic_fixed:1,1")
    eff.add_argument("--lambda-lo", type=float, dest="lambda_lo")
    eff.add_argument("--lambda-hi", type=float, dest="lambda_hi")
    cost = sub.add_parser("cost", parents=[common], help="expected-time curve over kappa")
    cost.add_argument("--cost", help="entropy | quadratic | tabulated:PATH")
    disc = sub.add_parser("discount", parents=[common], help="discounting variant")
    disc.add_argument("--r", type=float)
    disc.add_argument("--mu", type=float)
    disc.add_argument("--sigma", type=float)
    pr = sub.add_parser("probe", parents=[common], help="complexity ranking by bonus response")
    pr.add_argument("--problems", metavar="JSON")
    pr.add_argument("--shares", metavar="CSV")
    pr.add_argument("--eps", type=float)
    return parser


def _emit_error(exc: WaldLabError) -> int:
    sys.stderr.write(json.dumps({"error": exc.code, "exit_code": exc.exit_code, "message": str(exc)}) + "\n")
    return exc.exit_code


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    try:
        cfg = resolve(args.command, flags)
        table, rows, meta = COMMANDS[args.command](cfg)
        render = tables.to_json if cfg["format"] == "json" else tables.to_csv
        text = render(table, rows, meta)
        if cfg.get("out"):
            with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            if not cfg["quiet"]:
                sys.stderr.write(f"wrote {len(rows)} rows to {cfg['out']}\n")
        else:
            sys.stdout.write(text)
    except WaldLabError as exc:
        return _emit_error(exc)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
