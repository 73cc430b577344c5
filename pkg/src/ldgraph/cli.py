"""``ldgraph`` command line.

Exit codes: 0 every check passed, 1 a check failed, 2 infeasible or over
budget, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .errors import BudgetExceededError, InfeasibleError
from .graphs import parse_graph
from .hom import (
    TargetGraph,
    deletion_witness,
    hard_core_k2,
    hom_count,
    ising_target,
    lambda_limit,
    lambda_schedule,
    maxcut_from_beta,
    random_soft_core_target,
)
from .measures import build_measures, project_tk, prokhorov_to_projection, random_real_coloring
from .neighborhoods import bs_frequencies, colored_frequency_set
from .quotients import ENUMERATION_BUDGET, Quotient, partition_set, quotient
from .rates import RateQuery, rate_cells, rate_exact, rate_sampled
from .report import Report, emit
from .scenarios import DEFAULTS, run_scenario
from .variational import gibbs_bucket_decomposition, variational_free_energy

EXIT_PASS, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2, 3


def _json_arg(text: str):
    """Inline JSON or a path to a JSON file."""
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def parse_target(text: str) -> TargetGraph:
    """``hardcore``, ``ising:BETA``, ``random:K:SEED`` or a JSON object / file."""
    if text == "hardcore":
        return hard_core_k2()
    if text.startswith("ising:"):
        return ising_target(float(text.split(":", 1)[1]))
    if text.startswith("random:"):
        _, k, seed = text.split(":")
        return random_soft_core_target(int(k), int(seed))
    return TargetGraph.from_dict(_json_arg(text))


def _coloring(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


# ---------------------------------------------------------------------------
# subcommands; each fills a report


def cmd_gen(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    rep.data["graph"] = g
    rep.tables["edges"] = [{"u": u, "v": v} for u, v in g.edge_list]


def cmd_quotient(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    sigma = _coloring(a.coloring)
    q = quotient(g, sigma, a.k or max(sigma))
    rep.data["quotient"] = q
    rep.check("edge_mass", q.edge_total() == Fraction(2 * g.num_edges, g.n), edge_total=q.edge_total())


def cmd_partition_set(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    s = partition_set(g, a.k, a.method, a.budget, a.samples, a.seed)
    rep.data["partition_set"] = s
    rep.data["size"] = len(s)
    rep.tables["points"] = [{f"c{i}": v for i, v in enumerate(q.flat())} for q in s]


def cmd_measures(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    sigma = random_real_coloring(g.n, a.seed)
    m = build_measures(g, sigma)
    lo, hi = prokhorov_to_projection(m, a.k)
    rep.data["measures"] = m
    rep.data["projection"] = project_tk(m, a.k)
    rep.check("projection_within_one_over_k", hi <= 1 / a.k, lower=lo, upper=hi, bound=Fraction(1, a.k))


def cmd_rate(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    center = Quotient.from_dict(_json_arg(a.center), g.degree_bound)
    q = RateQuery(g, center.k, center, Fraction(a.delta))
    if a.method == "exact":
        est = rate_exact(q, a.budget)
    elif a.method == "cells":
        est = rate_cells(q, Fraction(a.pitch or a.delta), a.budget)
    else:
        est = rate_sampled(q, a.method, a.samples, a.seed, pitch=Fraction(a.pitch) if a.pitch else None)
    rep.data["rate"] = est


def cmd_hom(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    h = parse_target(a.target)
    lp = hom_count(g, h, a.algorithm, a.budget)
    rep.data["target"] = h
    rep.data["hom"] = lp


def cmd_free_energy(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    h = parse_target(a.target)
    lams = [float(v) for v in a.lambdas.split(",")] if a.lambdas else lambda_schedule()
    t = lambda_limit(g, h, lams, budget=a.budget)
    rep.tables["lambda"] = t.rows
    rep.data["estimate"] = t.estimate
    rep.check("monotone_in_lambda", t.monotone)


def cmd_witness(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    w = deletion_witness(g, parse_target(a.target), a.epsilon, a.lam, a.budget)
    rep.data["witness"] = w
    rep.check("witness_feasible", w.feasible, reasons=w.reasons)


def cmd_maxcut(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    r = maxcut_from_beta(g, [float(b) for b in a.beta.split(",")], a.budget)
    rep.tables["maxcut"] = r.rows
    rep.data["exact"] = r.exact
    if r.exact is not None:
        rep.check("bracketed", r.bracketed, exact=r.exact)


def cmd_neighborhood(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    if a.colors:
        vecs = colored_frequency_set(g, a.colors, a.r, a.method, samples=a.samples, seed=a.seed)
        rep.data["vectors"] = sorted((v.to_dict() for v in vecs), key=lambda d: json.dumps(d, sort_keys=True))
        rep.data["size"] = len(vecs)
    else:
        fv = bs_frequencies(g, a.r)
        rep.data["frequencies"] = fv
        rep.data["table"] = fv.decoding_table()


def cmd_variational(a, rep: Report) -> None:
    g = parse_graph(a.graph)
    h = parse_target(a.target)
    v = variational_free_energy(g, h, Fraction(a.delta), a.budget)
    rep.data["variational"] = v
    rep.check("gap_within_slack", v.within_slack, gap=v.gap)
    if h.soft_core:
        gr = gibbs_bucket_decomposition(g, h, Fraction(a.delta), a.budget)
        rep.data["gibbs"] = gr
        rep.check("gibbs_sandwich", gr.contained and gr.upper - gr.lower <= gr.width_bound + 1e-12)


COMMANDS = {
    "gen": cmd_gen,
    "quotient": cmd_quotient,
    "partition-set": cmd_partition_set,
    "measures": cmd_measures,
    "rate": cmd_rate,
    "hom": cmd_hom,
    "free-energy": cmd_free_energy,
    "witness": cmd_witness,
    "maxcut": cmd_maxcut,
    "neighborhood": cmd_neighborhood,
    "variational": cmd_variational,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="directory for the report bundle")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of option defaults")

    p = argparse.ArgumentParser(prog="ldgraph", parents=[common],
                                description="Colorings, quotients and partition functions of small graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        if name != "scenario":
            sp.add_argument("graph", help="spec such as cycle:5, 8*complete:2, lattice:1:3, or a file")
        return sp

    add("gen", "build a graph and print it")
    sp = add("quotient", "quotient of one coloring")
    sp.add_argument("--coloring", required=True, help="comma separated colors, 1-based")
    sp.add_argument("--k", type=int)
    sp = add("partition-set", "all achievable quotients")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--method", choices=("exact", "sampled"), default="exact")
    sp.add_argument("--samples", type=int, default=10_000)
    sp = add("measures", "measure pair of a random real coloring and its projection")
    sp.add_argument("--k", type=int, required=True)
    sp = add("rate", "empirical rate at a center")
    sp.add_argument("--center", required=True, help='JSON such as {"x": ["1/2","1/2"], "X": [[0,"1/2"],["1/2",0]]}')
    sp.add_argument("--delta", required=True)
    sp.add_argument("--method", choices=("exact", "cells", "iid", "wang_landau"), default="exact")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--pitch")
    for name, help_ in (("hom", "log hom(G, H)"), ("free-energy", "free energy along a lambda schedule"),
                        ("witness", "edge-deletion witness"), ("variational", "energy-entropy minimizer")):
        sp = add(name, help_)
        sp.add_argument("--target", required=True, help="hardcore, ising:BETA, random:K:SEED or JSON")
        if name == "hom":
            sp.add_argument("--algorithm", choices=("components", "brute", "transfer"), default="components")
        if name == "free-energy":
            sp.add_argument("--lambdas", help="comma separated; default 2^-1..2^-10")
        if name == "witness":
            sp.add_argument("--epsilon", type=float, default=0.2)
            sp.add_argument("--lam", type=float, default=0.01)
        if name == "variational":
            sp.add_argument("--delta", required=True)
    sp = add("maxcut", "MaxCut bounds from Ising partition functions")
    sp.add_argument("--beta", default="20")
    sp = add("neighborhood", "rooted ball statistics")
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--colors", type=int, default=0, help="colored statistics with this many colors")
    sp.add_argument("--method", choices=("exact", "sampled"), default="exact")
    sp.add_argument("--samples", type=int, default=1000)
    sp = add("scenario", "run a scripted experiment")
    sp.add_argument("name", choices=sorted(DEFAULTS))
    sp.add_argument("--params", help="JSON overriding scenario parameters")
    return p


BASE_DEFAULTS = {"seed": 0, "budget": ENUMERATION_BUDGET, "out": None, "format": "json"}


def _parse(argv) -> tuple[argparse.Namespace, str | None]:
    """Layer built-in defaults, then the config file, then the command line."""
    parser = build_parser()
    args = parser.parse_args(argv)
    raw = None
    cfg: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            raw = fh.read()
        cfg = json.loads(raw)
        if not isinstance(cfg, dict):
            raise ValueError("config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        if isinstance(cfg.get("params"), dict):
            cfg["params"] = json.dumps(cfg["params"], sort_keys=True)
        sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        sub.choices[args.command].set_defaults(**cfg)
        args = parser.parse_args(argv)
    for key, val in BASE_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, cfg.get(key, val))
    return args, raw


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args, raw = _parse(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    except (ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.command == "scenario":
            params = json.loads(args.params) if args.params else None
            rep = run_scenario(args.name, params, args.seed, args.budget)
        else:
            params = {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "out", "format")}
            rep = Report(args.command, params)
            COMMANDS[args.command](args, rep)
        rep.config = raw
        files = emit(rep, args.out, args.format)
    except (BudgetExceededError, InfeasibleError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, KeyError, TypeError, OSError, ZeroDivisionError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        status = "truncated" if rep.truncated else ("pass" if rep.passed else "fail")
        stdout.write(f"{rep.name}: {status} ({len(files)} files in {args.out})\n")
    else:
        main_file = "report.json" if args.format == "json" else "checks.csv"
        stdout.write(files[main_file])
    if rep.truncated:
        return EXIT_INFEASIBLE
    return EXIT_PASS if rep.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
