"""Command-line front end: ``famfft <problem> --input FILE [options]``."""
from __future__ import annotations

import argparse
import os
import random
import sys
import time
from dataclasses import dataclass

from . import oracle
from .errors import BudgetExceeded, ParseError
from .graphs import Graph, WeightedDigraph, parse_dimacs
from .solvers.coloring import chromatic_avg_degree_info, chromatic_number
from .solvers.domatic import domatic_number_info
from .solvers.matchings import count_perfect_matchings
from .solvers.report import SolveReport
from .solvers.tsp import tsp_avg_degree, tsp_bounded_max_degree, tsp_fft

PROBLEMS = ("tsp", "color", "domatic", "matchings", "selfcheck")
TIERS = ("auto", "brute", "fft2n", "infants-max", "infants-avg")

EXIT_OK, EXIT_PARSE, EXIT_MISMATCH, EXIT_BUDGET = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    problem: str
    tier: str = "auto"
    input: str | None = None
    format: str = "dimacs"
    verify: bool = False
    d: int | None = None
    M: int | None = None
    max_degree_cap: int = 4
    threads: int = 1
    output: str = "text"
    seed: int = 0


def _as_digraph(G, M=None) -> WeightedDigraph:
    if isinstance(G, WeightedDigraph):
        return G if M is None else WeightedDigraph(G.n, G.arcs, M)
    return WeightedDigraph.symmetric(G, M=M)


def _as_graph(G) -> Graph:
    return G.underlying() if isinstance(G, WeightedDigraph) else G


def _solve_tsp(G, cfg: RunConfig, report: SolveReport):
    D = _as_digraph(G, cfg.M)
    tier = cfg.tier
    if tier == "auto":
        tier = "infants-max" if D.underlying().max_degree <= cfg.max_degree_cap else "infants-avg"
    if tier == "brute":
        report.tier = "brute"
        return oracle.held_karp(D)
    if tier == "fft2n":
        res = tsp_fft(D)
    elif tier == "infants-max":
        res = tsp_bounded_max_degree(D, cfg.max_degree_cap)
    else:
        res = tsp_avg_degree(D, cfg.d)
    report.tier = res.tier
    report.fallbacks += res.fallbacks
    report.domain_size = res.domain_size
    report.moduli = res.moduli
    report.details.update(res.details)
    report.details["guess_count"] = res.guess_count
    report.details["cycle_multiplicity"] = res.cycle_multiplicity
    return res.optimum


def _solve_color(G, cfg: RunConfig, report: SolveReport):
    G = _as_graph(G)
    tier = cfg.tier
    if tier == "infants-max":
        report.fallbacks.append("no bounded-max-degree tier for colouring")
        tier = "infants-avg"
    if tier == "auto":
        tier = "infants-avg"
    if tier == "brute":
        report.tier = "brute"
        return oracle.brute_chromatic(G)
    if tier == "fft2n":
        report.tier = "fft2n"
        return chromatic_number(G)
    report.tier = "infants-avg"
    k = 0 if G.n == 0 else 1
    while True:
        ok, info = chromatic_avg_degree_info(G, k, cfg.d)
        report.fallbacks += [f for f in info.get("fallbacks", []) if f not in report.fallbacks]
        if ok:
            report.details.update({key: v for key, v in info.items() if key != "fallbacks"})
            return k
        k += 1


def _solve_domatic(G, cfg: RunConfig, report: SolveReport):
    G = _as_graph(G)
    tier = cfg.tier
    if tier == "brute":
        report.tier = "brute"
        return oracle.brute_domatic(G)
    if tier == "infants-avg":
        report.fallbacks.append("no bounded-average-degree tier for domatic number")
    res = domatic_number_info(G, "fft2n" if tier == "fft2n" else "infants")
    report.tier = "fft2n" if res.tier == "fft2n" else "infants-max"
    report.fallbacks += res.fallbacks
    if res.system is not None:
        report.details.update({"p": res.system.p, "q": res.system.q})
    return res.value


def _solve_matchings(G, cfg: RunConfig, report: SolveReport):
    G = _as_graph(G)
    if cfg.tier == "brute":
        report.tier = "brute"
        return oracle.brute_count_matchings(G)
    if cfg.tier.startswith("infants"):
        report.fallbacks.append("matchings run in the plain tier only")
    res = count_perfect_matchings(G, cfg.d)
    report.tier = "fft2n"
    report.domain_size = res.domain_size
    report.moduli = res.moduli
    report.details.update({"per_t": res.per_t, "selfloop_cases": res.selfloop_cases})
    return res.total


SOLVERS = {
    "tsp": (_solve_tsp, lambda G, cfg: oracle.held_karp(_as_digraph(G, cfg.M))),
    "color": (_solve_color, lambda G, cfg: oracle.brute_chromatic(_as_graph(G))),
    "domatic": (_solve_domatic, lambda G, cfg: oracle.brute_domatic(_as_graph(G))),
    "matchings": (_solve_matchings, lambda G, cfg: oracle.brute_count_matchings(_as_graph(G))),
}


def selfcheck(seed: int = 0, rounds: int = 6) -> list[str]:
    """Cross-check every solver against the oracles on small random graphs."""
    rng = random.Random(seed)
    failures = []
    for r in range(rounds):
        n = rng.randint(4, 7)
        edges = {(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < 0.5}
        G = Graph(n, frozenset(edges))
        D = WeightedDigraph.symmetric(G, {e: rng.randint(1, 4) for e in edges}, M=4)
        expect = oracle.held_karp(D)
        for fn in (tsp_fft, tsp_bounded_max_degree, tsp_avg_degree):
            got = fn(D).optimum
            if got != expect:
                failures.append(f"round {r}: {fn.__name__} gave {got}, expected {expect}")
        if chromatic_number(G) != oracle.brute_chromatic(G):
            failures.append(f"round {r}: chromatic number mismatch")
        if domatic_number_info(G).value != oracle.brute_domatic(G):
            failures.append(f"round {r}: domatic number mismatch")
        H = Graph(2 * (n // 2), frozenset(e for e in edges if max(e) <= 2 * (n // 2)))
        if count_perfect_matchings(H).total != oracle.brute_count_matchings(H):
            failures.append(f"round {r}: matching count mismatch")
    return failures


def run(cfg: RunConfig, out=None) -> tuple[int, SolveReport]:
    out = out or sys.stdout
    report = SolveReport(cfg.problem, None, cfg.tier)
    report.details["threads"] = cfg.threads
    start = time.perf_counter()
    if cfg.problem == "selfcheck":
        failures = selfcheck(cfg.seed)
        report.answer = not failures
        report.tier = "all"
        report.details["failures"] = len(failures)
        report.fallbacks = failures
        report.wall_time = time.perf_counter() - start
        _emit(report, cfg, out)
        return (EXIT_OK if not failures else EXIT_MISMATCH), report
    try:
        with open(cfg.input, encoding="utf-8") as fh:
            G = parse_dimacs(fh.read())
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE, report
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE, report
    solve, check = SOLVERS[cfg.problem]
    report.answer = solve(G, cfg, report)
    code = EXIT_OK
    if cfg.verify:
        try:
            expected = check(G, cfg)
        except BudgetExceeded as exc:
            print(f"verification refused: {exc}", file=sys.stderr)
            report.verified = None
            code = EXIT_BUDGET
        else:
            report.verified = expected == report.answer
            if not report.verified:
                print(f"oracle mismatch: solver {report.answer}, oracle {expected}", file=sys.stderr)
                code = EXIT_MISMATCH
    report.wall_time = time.perf_counter() - start
    _emit(report, cfg, out)
    return code, report


def _emit(report: SolveReport, cfg: RunConfig, out) -> None:
    if cfg.output == "json":
        print(report.to_json(), file=out)
    else:
        print(report.to_text(), file=out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="famfft", description="Exact graph problems by monomial detection.")
    ap.add_argument("problem", choices=PROBLEMS)
    ap.add_argument("--input", "-i")
    ap.add_argument("--format", default="dimacs", choices=("dimacs",))
    ap.add_argument("--tier", default="auto", choices=TIERS)
    ap.add_argument("--verify", action="store_true", help="also run the brute-force oracle and compare")
    ap.add_argument("--degree-bound", "-d", type=int, dest="d")
    ap.add_argument("--weight-bound", "-M", type=int, dest="M")
    ap.add_argument("--max-degree-cap", type=int, default=4)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--output", default="text", choices=("text", "json"))
    ap.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.problem != "selfcheck" and not args.input:
        print("--input is required", file=sys.stderr)
        return EXIT_PARSE
    threads = args.threads if args.threads is not None else int(os.environ.get("FAMFFT_THREADS", "1"))
    cfg = RunConfig(
        problem=args.problem,
        tier=args.tier,
        input=args.input,
        format=args.format,
        verify=args.verify,
        d=args.d,
        M=args.M,
        max_degree_cap=args.max_degree_cap,
        threads=max(1, threads),
        output=args.output,
        seed=args.seed,
    )
    code, _ = run(cfg)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
