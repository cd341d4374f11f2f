"""Command-line interface: ``semigame <subcommand> [flags]``.

Machine output is JSON (exact rationals as "num/den") or CSV, written to
stdout or ``--out``.  Exit status: 0 on success, 1 on bad input or usage,
2 when an internal consistency check fails.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence, TextIO

from semigame import oblivious as obl
from semigame import restricted as rst
from semigame import simulate as sim
from semigame.algebra import fmt_rational, spectral_report
from semigame.errors import InputError, InternalError
from semigame.graph import (
    ENUMERATION_CAP,
    Digraph,
    cycle3,
    enumerate_eulerian_tournaments,
    enumerate_tournaments,
    parse_graph_spec,
)
from semigame.solver import (
    ValueTable,
    cache_path,
    greedy_diagonal_values,
    load_cache,
    optimal_face,
    save_cache,
    solve_box,
)
from semigame.strategies import (
    FixedVertex,
    GreedyRPS,
    OptimalFromTable,
    PerRoundBestResponse,
    TrimmedProportional,
    UniformUntilDepletion,
    realize,
    spec_from_dict,
    spec_to_dict,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def parse_ns(text: str) -> list[int]:
    """``10..100``, ``10..100:5`` or ``10,20,40``."""
    try:
        if ".." in text:
            rng, _, step = text.partition(":")
            lo, hi = (int(x) for x in rng.split(".."))
            ns = list(range(lo, hi + 1, int(step) if step else 1))
        else:
            ns = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad --ns value {text!r}") from None
    if not ns or min(ns) < 1:
        raise InputError("--ns needs positive values")
    return ns


# -- value tables with the on-disk cache --------------------------------------------------


def load_or_solve(D: Digraph, box: Sequence[int], backend: str = "exact", cache_dir: str | None = None,
                  use_cache: bool = True) -> ValueTable:
    table = None
    path = cache_path(cache_dir, D, backend) if use_cache else None
    if path and os.path.exists(path):
        table = load_cache(path, D, backend)
    before = len(table) if table is not None else 0
    table = solve_box(D, box, table, backend)
    if path and len(table) != before:
        save_cache(table, path)
    return table


# -- output helpers -------------------------------------------------------------------------


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


# -- subcommands --------------------------------------------------------------------------------


def cmd_graph(args) -> int:
    if args.enumerate is not None:
        k = args.enumerate
        it = enumerate_eulerian_tournaments(k, args.cap) if args.eulerian else enumerate_tournaments(k, args.cap)
        if args.list:
            _emit(args, "\n".join(D.to_json() for D in it))
        else:
            _emit(args, _json({"k": k, "eulerian": args.eulerian, "count": sum(1 for _ in it)}))
        return 0
    if not args.graph:
        raise InputError("graph: pass --graph or --enumerate")
    D = parse_graph_spec(args.graph)
    out = D.to_dict()
    if args.info:
        out.update(
            fingerprint=D.fingerprint,
            tournament=D.is_tournament(),
            eulerian=D.is_eulerian(),
            out_degrees=[D.out_degree(v) for v in D.vertices()],
            in_degrees=[D.in_degree(v) for v in D.vertices()],
        )
    _emit(args, json.dumps(out))
    return 0


def cmd_solve(args) -> int:
    D = parse_graph_spec(args.graph)
    box = parse_vector(args.box)
    table = load_or_solve(D, box, args.backend, args.cache_dir, not args.no_cache)
    val = table[box]
    out = {
        "graph": D.to_dict(),
        "fingerprint": D.fingerprint,
        "backend": args.backend,
        "box": list(box),
        "states": len(table),
        "value": fmt_rational(val) if args.backend == "exact" else float(val),
    }
    if not args.no_cache:
        out["cache"] = cache_path(args.cache_dir, D, args.backend)
    _emit(args, _json(out))
    return 0


def cmd_query(args) -> int:
    D = parse_graph_spec(args.graph)
    r = parse_vector(args.r)
    table = load_or_solve(D, r, args.backend, args.cache_dir, not args.no_cache)
    val = table[r]
    _emit(args, json.dumps({"r": list(r), "value": fmt_rational(val) if args.backend == "exact" else float(val)}))
    return 0


def cmd_face(args) -> int:
    D = parse_graph_spec(args.graph)
    r = parse_vector(args.r)
    table = load_or_solve(D, r, "exact", args.cache_dir, not args.no_cache)
    face = optimal_face(D, r, table)
    _emit(args, _json({"r": list(r), **face.to_dict()}))
    return 0


def scaling_values(D: Digraph, ns: Sequence[int], backend: str, cache_dir=None, use_cache=True) -> list[float]:
    top = max(ns)
    if backend == "greedy-exact":
        vals = greedy_diagonal_values(D, top)
        return [vals[n] for n in ns]
    if backend not in ("exact", "float"):
        raise InputError(f"unknown backend {backend!r}")
    table = load_or_solve(D, (top,) * D.k, backend, cache_dir, use_cache)
    return [table[(n,) * D.k] for n in ns]


def cmd_scaling(args) -> int:
    D = parse_graph_spec(args.graph)
    ns = parse_ns(args.ns)
    vals = scaling_values(D, ns, args.backend, args.cache_dir, not args.no_cache)
    fit = sim.scaling_fit([(n, float(v)) for n, v in zip(ns, vals)])
    exact = args.backend != "float"
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "S_n", "S_n_over_sqrt_n"])
        for n, v in zip(ns, vals):
            w.writerow([n, fmt_rational(v) if exact else repr(float(v)), repr(float(v) / math.sqrt(n))])
        _emit(args, buf.getvalue())
        print(f"slope={fit.slope:.6f} intercept={fit.intercept:.6f} c_hat={fit.c_hat:.6f}", file=sys.stderr)
    else:
        rows = [
            {"n": n, "S_n": fmt_rational(v) if exact else float(v), "S_n_over_sqrt_n": float(v) / math.sqrt(n)}
            for n, v in zip(ns, vals)
        ]
        _emit(args, _json({"backend": args.backend, "table": rows, "slope": fit.slope,
                           "intercept": fit.intercept, "c_hat": fit.c_hat}))
    return 0


def _rei_spec(name: str, D: Digraph, r0: tuple, cache_dir=None, use_cache=True):
    if name == "greedy_rps":
        return GreedyRPS()
    if name == "uniform_until_depletion":
        return UniformUntilDepletion()
    if name == "trimmed_proportional":
        return TrimmedProportional(r0)
    if name == "optimal_from_table":
        return OptimalFromTable(load_or_solve(D, r0, "exact", cache_dir, use_cache))
    if os.path.exists(name):
        with open(name) as fh:
            return _bind(spec_from_dict(json.load(fh)), D, r0, cache_dir, use_cache)
    raise InputError(f"unknown Rei strategy {name!r}")


def _bind(spec, D, r0, cache_dir=None, use_cache=True):
    if isinstance(spec, OptimalFromTable) and spec.table is None:
        return OptimalFromTable(load_or_solve(D, r0, "exact", cache_dir, use_cache))
    return spec


def _norman_spec(name: str):
    if name == "best_response":
        return PerRoundBestResponse()
    if name.startswith("fixed:"):
        try:
            return FixedVertex(int(name.split(":", 1)[1]))
        except ValueError:
            raise InputError(f"bad Norman strategy {name!r}") from None
    raise InputError(f"unknown Norman strategy {name!r}")


def cmd_simulate(args) -> int:
    if args.mode == "depletion":
        s = sim.depletion_stats(args.k, args.n, args.reps, args.seed)
        _emit(args, json.dumps({"k": args.k, "n": args.n, "mean": s.mean, "stderr": s.stderr, "reps": s.reps,
                                "mean_over_sqrt_n": s.mean / math.sqrt(args.n)}))
        return 0
    if args.mode == "tail":
        p = float(Fraction(args.p))
        t = sim.geometric_tail(p, args.N, args.reps, args.seed)
        _emit(args, json.dumps({"p": args.p, "N": args.N, "estimate": t.estimate, "stderr": t.stderr,
                                "ratio": t.ratio}))
        return 0
    # game
    if args.config:
        with open(args.config) as fh:
            cfg = sim.ExperimentConfig.from_dict(json.load(fh))
        D = parse_graph_spec(cfg.graph)
        rei = _bind(spec_from_dict(cfg.rei), D, cfg.r0, args.cache_dir)
        norman = spec_from_dict(cfg.norman)
        r0, reps, seed = cfg.r0, cfg.reps, cfg.seed
    else:
        if not (args.graph and args.r0):
            raise InputError("simulate game: pass --config, or --graph and --r0")
        D = parse_graph_spec(args.graph)
        r0 = parse_vector(args.r0)
        rei = _rei_spec(args.rei, D, r0, args.cache_dir)
        norman = _norman_spec(args.norman)
        reps, seed = args.reps, args.seed
    res = sim.monte_carlo(D, r0, rei, norman, reps, seed, check=True)
    out = {"graph": D.to_dict(), "r0": list(r0), "rei": spec_to_dict(rei), "norman": spec_to_dict(norman),
           **res.to_dict()}
    _emit(args, _json(out))
    return 0


def cmd_spectral(args) -> int:
    D = parse_graph_spec(args.graph)
    _emit(args, spectral_report(D).to_json())
    return 0


def cmd_oblivious(args) -> int:
    if args.mode == "rate":
        rate = obl.oblivious_rate(args.k, args.samples, args.seed)
        _emit(args, json.dumps({"k": args.k, "samples": args.samples, "seed": args.seed, "certificate_rate": rate}))
        return 0
    D = parse_graph_spec(args.graph)
    if args.mode == "certificate":
        cert = obl.find_certificate(D, seed=args.seed)
        exhaustive = D.k <= obl.SUBSET_CAP
        _emit(args, json.dumps({"certificate": list(cert.S) if cert else None, "exhaustive": exhaustive}))
        return 0
    box = parse_vector(args.box)
    table = load_or_solve(D, box, "exact", args.cache_dir, not args.no_cache)
    verdict = obl.decide_oblivious_on_box(D, box, table)
    out = obl.verdict_to_dict(verdict)
    if isinstance(verdict, obl.ObliviousOnBox):
        out["max_violations"] = len(obl.lead_violations(D, verdict.table))
    _emit(args, _json(out))
    return 0


def cmd_restricted(args) -> int:
    G = rst.load_game(args.game)
    pair = rst.RestrictionPair(parse_vector(args.a), parse_vector(args.b))
    M = rst.restricted_value(G, pair)
    out = {
        "a": list(pair.a),
        "b": list(pair.b),
        "M": fmt_rational(M),
        "alice_best_vs_uniform": fmt_rational(rst.restricted_best_response(G, pair, rst.uniform_strategy("bob"), "alice")),
        "bob_best_vs_uniform": fmt_rational(rst.restricted_best_response(G, pair, rst.uniform_strategy("alice"), "bob")),
    }
    if args.reps:
        mean, se = rst.simulate_uniform(G, pair, args.reps, args.seed)
        out["uniform_vs_uniform"] = {"mean": mean, "stderr": se, "reps": args.reps, "seed": args.seed}
    _emit(args, _json(out))
    return 0


def cmd_cache(args) -> int:
    cache_dir = args.cache_dir or os.environ.get("SEMIGAME_CACHE", "cache")
    if args.mode == "list":
        entries = []
        if os.path.isdir(cache_dir):
            for name in sorted(os.listdir(cache_dir)):
                if name.endswith(".csv"):
                    with open(os.path.join(cache_dir, name)) as fh:
                        header = fh.readline().strip()
                        rows = sum(1 for line in fh if line.strip())
                    entries.append({"file": name, "header": header, "states": rows})
        _emit(args, _json({"cache_dir": cache_dir, "entries": entries}))
        return 0
    if args.mode == "verify":
        D = parse_graph_spec(args.graph)
        path = cache_path(cache_dir, D, args.backend)
        if not os.path.exists(path):
            raise InputError(f"no cache file for this digraph at {path}")
        table = load_cache(path, D, args.backend)
        _emit(args, json.dumps({"file": path, "states": len(table), "level": table.level, "ok": True}))
        return 0
    # clear
    removed = 0
    if os.path.isdir(cache_dir):
        for name in os.listdir(cache_dir):
            if name.endswith(".csv"):
                os.remove(os.path.join(cache_dir, name))
                removed += 1
    _emit(args, json.dumps({"cache_dir": cache_dir, "removed": removed}))
    return 0


# -- interactive play ----------------------------------------------------------------------


def commitment(move: int, nonce: str) -> str:
    return hashlib.sha256(f"{move}:{nonce}".encode()).hexdigest()


def play_session(D: Digraph, r0: Sequence[int], rei, seed: int, stdin: TextIO, stdout: TextIO,
                 exact_value: Fraction | None = None) -> int:
    """Human plays Norman.  Rei's move is drawn and committed before the human's input is read."""
    r = tuple(r0)
    rng = sim.rep_rng(seed, 0)
    score = 0
    rnd = 0
    say = lambda *a: print(*a, file=stdout)  # noqa: E731
    say(f"You are Norman on a {D.k}-vertex digraph with arcs {D.sorted_arcs()} (u->v: u beats v).")
    say(f"Rei's remaining counts: {list(r)}")
    while any(r):
        rnd += 1
        p = realize(rei, D, r)
        move = sim.sample(p, rng)
        nonce = rng.bytes(8).hex()
        committed = commitment(move, nonce)
        say(f"round {rnd}: Rei committed {committed}")
        while True:
            stdout.write(f"your vertex [0-{D.k - 1}]: ")
            stdout.flush()
            line = stdin.readline()
            if not line:
                raise InputError("input ended before the game finished")
            try:
                v = int(line.strip())
                D._check_vertex(v)
                break
            except (ValueError, InputError):
                say(f"not a vertex: {line.strip()!r}")
        if commitment(move, nonce) != committed:
            raise InternalError("revealed move does not match the commitment")
        delta = D.table[v][move]
        score += delta
        r = r[:move] + (r[move] - 1,) + r[move + 1 :]
        say(f"  Rei played {move} (nonce {nonce}); you played {v}; round score {delta:+d}; total {score}")
        say(f"  Rei's remaining counts: {list(r)}")
    say(f"final score: {score}")
    if exact_value is not None:
        say(f"value of the game under optimal play: {fmt_rational(exact_value)} (~{float(exact_value):.4f})")
    return score


def cmd_play(args) -> int:
    D = parse_graph_spec(args.graph)
    if args.r0:
        r0 = parse_vector(args.r0)
    else:
        r0 = (args.n,) * D.k
    if len(r0) != D.k or min(r0) < 0:
        raise InputError(f"r0 {r0} does not fit a {D.k}-vertex digraph")
    if args.rei == "greedy_rps" or (args.rei == "auto" and D == cycle3() and sum(r0) > args.solve_limit):
        rei = GreedyRPS()
        exact = greedy_value(r0)
    else:
        table = load_or_solve(D, r0, "exact", args.cache_dir, not args.no_cache)
        rei = OptimalFromTable(table)
        exact = table[r0]
    stdin = open(args.input) if args.input else sys.stdin
    try:
        play_session(D, r0, rei, args.seed, stdin, sys.stdout, exact)
    finally:
        if args.input:
            stdin.close()
    return 0


def greedy_value(r0: Sequence[int]) -> Fraction:
    from semigame.solver import best_response_value

    return best_response_value(cycle3(), r0, GreedyRPS())


# -- parser -------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="semigame", description="Exact solver and experiments for semi-restricted digraph games.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, graph=True, cache=True):
        sp.add_argument("--out", help="write output here instead of stdout")
        if graph:
            sp.add_argument("--graph", required=True,
                            help="cycle3 | path:<n> | circulant:<k>:<offsets> | random:<k>:<seed> | empty:<k> | JSON file")
        if cache:
            sp.add_argument("--cache-dir", help="cache directory (default $SEMIGAME_CACHE or ./cache)")
            sp.add_argument("--no-cache", action="store_true", help="neither read nor write cache files")

    g = sub.add_parser("graph", help="print a digraph or enumerate tournaments")
    g.add_argument("--out")
    g.add_argument("--graph")
    g.add_argument("--info", action="store_true", help="add fingerprint, degrees and tournament/Eulerian flags")
    g.add_argument("--enumerate", type=int, metavar="K", help="enumerate labeled tournaments on K vertices")
    g.add_argument("--eulerian", action="store_true", help="with --enumerate: Eulerian tournaments only")
    g.add_argument("--list", action="store_true", help="with --enumerate: print every digraph as JSON lines")
    g.add_argument("--cap", type=int, default=ENUMERATION_CAP, help="largest K enumerated (default %(default)s)")
    g.set_defaults(func=cmd_graph)

    s = sub.add_parser("solve", help="solve every state up to a box")
    common(s)
    s.add_argument("--box", required=True, help="comma-separated restriction vector")
    s.add_argument("--backend", choices=["exact", "float"], default="exact")
    s.set_defaults(func=cmd_solve)

    q = sub.add_parser("query", help="value of one restriction vector")
    common(q)
    q.add_argument("--r", required=True)
    q.add_argument("--backend", choices=["exact", "float"], default="exact")
    q.set_defaults(func=cmd_query)

    f = sub.add_parser("face", help="extremes of Rei's optimal mixtures at one state")
    common(f)
    f.add_argument("--r", required=True)
    f.set_defaults(func=cmd_face)

    sc = sub.add_parser("scaling", help="S(n,...,n) over a range of n with a log-log fit")
    common(sc)
    sc.add_argument("--ns", default="10..100", help="a..b, a..b:step or a comma list (default %(default)s)")
    sc.add_argument("--backend", choices=["greedy-exact", "exact", "float"], default="greedy-exact")
    sc.add_argument("--format", choices=["json", "csv"], default="json")
    sc.set_defaults(func=cmd_scaling)

    sm = sub.add_parser("simulate", help="Monte Carlo experiments")
    smsub = sm.add_subparsers(dest="mode", parser_class=_Parser)
    smsub.required = True
    gm = smsub.add_parser("game", help="play full games between two strategies")
    gm.add_argument("--out")
    gm.add_argument("--config", help="experiment config JSON (overrides the other flags)")
    gm.add_argument("--graph")
    gm.add_argument("--r0")
    gm.add_argument("--rei", default="optimal_from_table",
                    help="greedy_rps | uniform_until_depletion | trimmed_proportional | optimal_from_table | spec file")
    gm.add_argument("--norman", default="best_response", help="best_response | fixed:<v>")
    gm.add_argument("--reps", type=int, default=1000)
    gm.add_argument("--seed", type=int, default=0)
    gm.add_argument("--cache-dir")
    dp = smsub.add_parser("depletion", help="E[kn - T] for uniform strings")
    dp.add_argument("--out")
    dp.add_argument("--k", type=int, required=True)
    dp.add_argument("--n", type=int, required=True)
    dp.add_argument("--reps", type=int, default=1000)
    dp.add_argument("--seed", type=int, default=0)
    tl = smsub.add_parser("tail", help="lower-tail deviation of a sum of geometrics")
    tl.add_argument("--out")
    tl.add_argument("--p", required=True, help="success probability, e.g. 1/3")
    tl.add_argument("--N", type=int, required=True)
    tl.add_argument("--reps", type=int, default=10000)
    tl.add_argument("--seed", type=int, default=0)
    sm.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("spectral", help="kernel dimension, lambda2, alpha and determinant parity")
    common(sp, cache=False)
    sp.set_defaults(func=cmd_spectral)

    ob = sub.add_parser("oblivious", help="certificates and box-level obliviousness")
    obsub = ob.add_subparsers(dest="mode", parser_class=_Parser)
    obsub.required = True
    oc = obsub.add_parser("certificate", help="search for a certificate on a tournament")
    common(oc, cache=False)
    oc.add_argument("--seed", type=int, default=0, help="subset sampling seed above the exhaustive cap")
    orate = obsub.add_parser("rate", help="certificate frequency over random tournaments")
    orate.add_argument("--out")
    orate.add_argument("--k", type=int, required=True)
    orate.add_argument("--samples", type=int, default=200)
    orate.add_argument("--seed", type=int, default=0)
    od = obsub.add_parser("decide", help="decide obliviousness relative to a solved box")
    common(od)
    od.add_argument("--box", required=True)
    ob.set_defaults(func=cmd_oblivious)

    rs = sub.add_parser("restricted", help="both players restricted: M(a,b) and best responses to uniform")
    rs.add_argument("--out")
    rs.add_argument("--game", default="rps", help="rps or a game JSON file")
    rs.add_argument("--a", required=True)
    rs.add_argument("--b", required=True)
    rs.add_argument("--reps", type=int, default=0, help="also simulate uniform vs uniform")
    rs.add_argument("--seed", type=int, default=0)
    rs.set_defaults(func=cmd_restricted)

    pl = sub.add_parser("play", help="play Norman against Rei in the terminal")
    pl.add_argument("--graph", default="cycle3")
    pl.add_argument("--r0", help="Rei's restriction vector")
    pl.add_argument("--n", type=int, default=3, help="use n in every coordinate when --r0 is absent")
    pl.add_argument("--rei", choices=["auto", "optimal_from_table", "greedy_rps"], default="auto")
    pl.add_argument("--solve-limit", type=int, default=60, help="auto: above this total use greedy on cycle3")
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--input", help="read moves from this file instead of stdin")
    pl.add_argument("--cache-dir")
    pl.add_argument("--no-cache", action="store_true")
    pl.set_defaults(func=cmd_play)

    ca = sub.add_parser("cache", help="inspect or clear cache files")
    casub = ca.add_subparsers(dest="mode", parser_class=_Parser)
    casub.required = True
    for name in ("list", "verify", "clear"):
        c = casub.add_parser(name)
        c.add_argument("--out")
        c.add_argument("--cache-dir")
        if name == "verify":
            c.add_argument("--graph", required=True)
            c.add_argument("--backend", choices=["exact", "float"], default="exact")
    ca.set_defaults(func=cmd_cache)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
