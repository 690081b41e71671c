"""Command line entry point ``dln``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from importlib import metadata

from . import bench as _bench
from .benchgen import GenConfig, apply_rates, gen_base, sample_queries
from .engine import Metrics
from .modularity import BOTTOM, TOPP, tbstar_mod_di, x_mod
from .parser import DLNSyntaxError, format_kb, load_kb, parse_query
from .priority import compute_rank
from .query import STRATEGIES, dln_entails
from .syntax import Signature, signature_of


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _version() -> str:
    try:
        v = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        v = "unknown"
    return f"dln {v} (Python {sys.version.split()[0]})"


def _fmt_rank(r) -> str:
    return "inf" if r == float("inf") else str(r)


def cmd_query(a) -> int:
    kb = load_kb(a.kb)
    q = parse_query(a.query)
    m = Metrics()
    r = dln_entails(kb, q, a.priority, a.strategy, seed=a.seed, guard=a.guard, metrics=m)
    print("entailed" if r.entailed else "not entailed")
    if a.metrics:
        buf = io.StringIO()
        di_rate = len(kb.defeasible) / len(kb) if len(kb) else 0.0
        csv.writer(buf, lineterminator="\n").writerow([
            "cli", a.seed, len(kb), f"{di_rate:.4f}", "", a.priority, a.strategy, 0,
            int(r.entailed), f"{m.wall_ms:.3f}", m.checks, m.rebuilds, m.module_size,
        ])
        sys.stdout.write(buf.getvalue())
    return 0 if r.entailed else 1


def cmd_rank(a) -> int:
    kb = load_kb(a.kb)
    rank = compute_rank(kb)
    for d in kb.defeasible:
        print(f"{d.id}\t{_fmt_rank(rank[d.id])}")
    return 0


def cmd_module(a) -> int:
    kb = load_kb(a.kb)
    known_roles = signature_of(kb).roles
    names, roles = set(), set()
    for tok in (t.strip() for t in a.sig.split(",")):
        if tok:
            (roles if tok in known_roles else names).add(tok)
    sig = Signature(frozenset(names), frozenset(roles))
    if a.polarity == "tbstar":
        mod = tbstar_mod_di(sig, kb)
    else:
        mod = x_mod(kb, sig, BOTTOM if a.polarity == "bot" else TOPP)
    for ax in mod.axioms:
        print(ax)
    return 0


def cmd_gen(a) -> int:
    if a.ci_rate and a.synth_rate:
        raise ValueError("give either --ci-rate or --synth-rate, not both")
    cfg = GenConfig(
        base_axioms=a.axioms, base_concepts=a.concepts, ci_rate=a.ci_rate, synth_rate=a.synth_rate,
        da_rate=a.da_rate, n_inject=a.n_inject, seed=a.seed,
    )
    kb = apply_rates(gen_base(cfg, a.seed), cfg, a.seed)
    text = format_kb(kb)
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if a.queries:
        qs = sample_queries(kb, a.queries, a.seed)
        out = open(a.queries_out, "w", encoding="utf-8") if a.queries_out else sys.stdout
        try:
            for q in qs:
                out.write(f"{q}\n")
        finally:
            if a.queries_out:
                out.close()
    return 0


def cmd_bench(a) -> int:
    cfg = _bench.load_suite(a.config)
    if a.output:
        cfg.output = a.output
    if a.timeout is not None:
        cfg.timeout_secs = a.timeout
    if a.seed is not None:
        cfg.seed = a.seed

    def progress(rec):
        if a.verbose:
            print(",".join(map(str, rec.row())), file=sys.stderr)

    _, rows = _bench.run_bench(cfg, progress)
    for row in rows:
        print(
            f"{row['suite']}\tdi={row['di_rate']:.2f}\tda={row['da_rate']:.2f}\t{row['priority']}\t"
            f"{row['strategy']}\t{row['mean_wall_ms']:.2f} ms\ttimeouts={row['timeouts']}"
        )
    print(f"wrote {cfg.output} and {_bench.summary_path(cfg.output)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dln", description="Nonmonotonic description logic reasoner.")
    p.add_argument("--version", action="version", version=_version())
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    q = sub.add_parser("query", help="answer a query; exit 0 if entailed, 1 if not")
    q.add_argument("--kb", required=True)
    q.add_argument("--query", required=True, help='e.g. "N(A) <= B"')
    q.add_argument("--priority", choices=["spec", "rank"], default="spec")
    q.add_argument("--strategy", choices=STRATEGIES, default="naive")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--guard", choices=["fallback", "refuse"], default="fallback",
                   help="what opt/modopt do when the KB is not N-free")
    q.add_argument("--metrics", action="store_true", help="also print one CSV line of counters")
    q.set_defaults(func=cmd_query)

    r = sub.add_parser("rank", help="print the rank of every DI")
    r.add_argument("--kb", required=True)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_rank)

    m = sub.add_parser("module", help="extract a locality-based module")
    m.add_argument("--kb", required=True)
    m.add_argument("--sig", required=True, help="comma separated names and roles")
    m.add_argument("--polarity", choices=["bot", "top", "tbstar"], default="tbstar")
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_module)

    g = sub.add_parser("gen", help="generate a synthetic KB")
    g.add_argument("--axioms", type=int, default=1000)
    g.add_argument("--concepts", type=int, default=0)
    g.add_argument("--ci-rate", type=float, default=0.0)
    g.add_argument("--synth-rate", type=float, default=0.0)
    g.add_argument("--da-rate", type=float, default=0.0)
    g.add_argument("--n-inject", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", "-o")
    g.add_argument("--queries", type=int, default=0, help="also sample this many queries")
    g.add_argument("--queries-out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run a benchmark suite file")
    b.add_argument("config")
    b.add_argument("--output", "-o")
    b.add_argument("--timeout", type=float)
    b.add_argument("--seed", type=int, help="override the suite's base seed")
    b.add_argument("--verbose", "-v", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        return a.func(a)
    except SystemExit as e:  # --help and --version
        return int(e.code or 0)
    except _UsageError as e:
        print(str(e), file=sys.stderr)
        return 2
    except DLNSyntaxError as e:
        print(f"dln: syntax error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, RuntimeError) as e:
        print(f"dln: {type(e).__name__}: {e}".replace("\n", " "), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
