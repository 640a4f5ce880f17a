"""Command line front end: ``mmclust {mine,concepts,sweep,measure,convert}``.

Exit codes: 0 ok, 2 usage, 3 parse error, 4 size guard, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from contextlib import contextmanager

from . import __version__
from . import io as mio
from .clustering import (deduplicate, default_grid, filter_density, filter_weak, finalize,
                         online_from_context, OnlineClusters, sweep)
from .concepts import (DYADIC_LIMIT, NADIC_LIMIT, concept_cliques, mine_dyadic_concepts,
                       mine_nadic_concepts_bruteforce)
from .context import NContext
from .errors import EncodingError, MMClustError, ParseError, SizeGuardError
from .onemode import context_to_graph
from .quality import EXP2_BINS, collection_summary, measure, uniform_bins

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_GUARD, EXIT_IO = 0, 2, 3, 4, 5
THREADS_ENV = "MMCLUST_THREADS"

log = logging.getLogger("mmclust")


class UsageError(MMClustError):
    pass


def _unit(text: str) -> float:
    try:
        value = mio.parse_decimal(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"density must lie in [0, 1], got {text}")
    return value


def _grid(text: str) -> list:
    values = [_unit(v) for v in text.replace(";", " ").replace(",", " ").split()]
    if any(b < a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("grid must be ascending")
    return values


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return _positive(env)
        except argparse.ArgumentTypeError:
            log.warning("ignoring invalid %s=%r", THREADS_ENV, env)
    return os.cpu_count() or 1


class Timer:
    def __init__(self):
        self.phases = {}

    @contextmanager
    def phase(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.phases[name] = self.phases.get(name, 0.0) + time.perf_counter() - t0


def _input_args(p, arity=True):
    p.add_argument("input", help="input file, or '-' for stdin")
    p.add_argument("--format", default="auto",
                   choices=("auto", "cxt", "tuples", "edges", "bipartite"),
                   help="input format (auto: by suffix; .cxt, .edges, else tuples)")
    if arity:
        p.add_argument("--arity", type=_positive, help="fields per tuple line")
    p.add_argument("--encoding", default="reflexive", choices=("reflexive", "irreflexive"),
                   help="square encoding of one-mode edge lists")
    p.add_argument("--delimiter", help="tuple field separator (default: tab, comma or spaces)")
    p.add_argument("--header", action="store_true", help="skip the first data line")
    p.add_argument("--limit", type=_positive, help="read only the first N tuples")
    p.add_argument("--strict", action="store_true",
                   help="fail on the first malformed line instead of skipping it")


def _output_args(p, what):
    p.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS,
                   help="suppress warnings")
    p.add_argument("-o", "--output", default="-", help=f"{what} path (default stdout)")
    p.add_argument("--summary", help="JSON run summary path (default stderr)")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall times so that summaries are reproducible byte for byte")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmclust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="generate, measure and filter clusters")
    _input_args(p)
    p.add_argument("--rho-min", type=_unit, default=0.0, help="minimum density (default 0)")
    p.add_argument("--float-compat", action="store_true",
                   help="compare densities in sequential floating point")
    p.add_argument("--weak", action="store_true", help="keep only weak communities (dyadic)")
    p.add_argument("--keep-duplicates", action="store_true",
                   help="emit one record per generating tuple")
    p.add_argument("--threads", type=_positive, default=None,
                   help=f"worker threads for measuring (default ${THREADS_ENV} or CPU count)")
    _output_args(p, "cluster records")

    p = sub.add_parser("concepts", help="enumerate formal concepts exactly")
    _input_args(p)
    p.add_argument("--cliques", action="store_true",
                   help="flag concepts whose extent equals their intent (square contexts)")
    p.add_argument("--override", action="store_true", help="ignore the size guard")
    _output_args(p, "concept records")

    p = sub.add_parser("sweep", help="cluster and concept coverage counts over a density grid")
    _input_args(p, arity=False)
    p.add_argument("--grid", type=_grid, help="ascending densities (default 0, 0.05, ..., 1)")
    p.add_argument("--float-compat", action="store_true",
                   help="compare densities in sequential floating point")
    p.add_argument("--no-coverage", action="store_true", help="skip concept mining")
    p.add_argument("--override", action="store_true", help="ignore the concept size guard")
    p.add_argument("--threads", type=_positive, default=None)
    _output_args(p, "sweep CSV")

    p = sub.add_parser("measure", help="quality report for a cluster file")
    _input_args(p)
    p.add_argument("--clusters", required=True, help="cluster records written by 'mine'")
    p.add_argument("--bins", default="uniform", choices=("uniform", "exp2"),
                   help="density histogram bins")
    p.add_argument("--exact-limit", type=_positive, default=24,
                   help="largest enumeration space for exact stability")
    p.add_argument("--no-concepts", action="store_true", help="skip concept coverage")
    p.add_argument("--override", action="store_true", help="ignore the concept size guard")
    p.add_argument("--csv", help="also write per-cluster scores as CSV")
    _output_args(p, "JSON report")

    p = sub.add_parser("convert", help="convert between edge list, CXT and tuple formats")
    _input_args(p)
    p.add_argument("--to", required=True, choices=("cxt", "tuples", "edges"))
    p.add_argument("--force", action="store_true", help="allow lossy conversions")
    _output_args(p, "converted file")
    return parser


def _load(args, timer, skipped) -> NContext:
    with timer.phase("read"):
        return mio.context_from_file(args.input, args.format, getattr(args, "arity", None),
                                     args.encoding, args.delimiter, args.header, args.limit,
                                     args.strict, skipped)


def _manifest(args, extra_params=None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("summary", "no_timing", "quiet", "command")}
    if extra_params:
        params.update(extra_params)
    return {"tool": "mmclust", "version": __version__, "command": args.command,
            "parameters": params}


def _describe(ctx: NContext) -> dict:
    return {"arity": ctx.arity, "mode_names": list(ctx.mode_names), "sizes": list(ctx.sizes),
            "tuples": len(ctx)}


def _emit_summary(args, summary, timer):
    if not args.no_timing:
        summary["timings_s"] = {k: round(v, 6) for k, v in timer.phases.items()}
    if args.summary:
        mio.write_json(summary, args.summary)
    else:
        mio.write_json(summary, sys.stderr)


def cmd_mine(args) -> int:
    timer = Timer()
    skipped = []
    threads = args.threads or default_threads()
    fmt = args.format
    if fmt == "auto" and not str(args.input).lower().endswith((".cxt", ".edges")):
        fmt = "tuples"
    if fmt == "tuples":
        # stream straight into the online generator
        with timer.phase("read+generate"):
            records = mio.iter_tuples(args.input, args.arity, args.delimiter, args.header,
                                      args.limit, args.strict, skipped)
            first = next(records, None)
            online = OnlineClusters(args.arity or (len(first.labels) if first else 2))
            if first is not None:
                online.extend([first], strict=True)
                online.extend(records, strict=True)
            context = online.context()
    else:
        context = _load(args, timer, skipped)
        with timer.phase("generate"):
            online = online_from_context(context)
    if not len(context):
        log.warning("input holds no tuples; writing an empty collection")
    with timer.phase("density+dedup"):
        coll = finalize(online, context, threads)
        if not args.keep_duplicates:
            coll = deduplicate(coll)
    with timer.phase("filter"):
        coll = filter_density(coll, args.rho_min, args.float_compat)
        if args.weak:
            coll = filter_weak(coll, context)
    with timer.phase("write"):
        mio.write_clusters(coll, args.output, context)
    s = collection_summary(coll, len(context))
    summary = _manifest(args, {"threads": threads})
    summary["input"] = _describe(context)
    summary["input"]["skipped_lines"] = len(skipped)
    summary["results"] = {
        "operations": coll.meta.get("operations"),
        "clusters": len(coll),
        "generated": coll.generated,
        "mean_rho": s.rho, "mean_mass": s.mass, "mean_vol": s.vol, "mean_rho_mass": s.rho_mass,
    }
    _emit_summary(args, summary, timer)
    return EXIT_OK


def cmd_concepts(args) -> int:
    timer = Timer()
    skipped = []
    context = _load(args, timer, skipped)
    with timer.phase("concepts"):
        if context.arity == 2:
            concepts = mine_dyadic_concepts(context, DYADIC_LIMIT, args.override)
        else:
            concepts = mine_nadic_concepts_bruteforce(context, NADIC_LIMIT, args.override)
    cliques = None
    if args.cliques:
        cliques = concept_cliques(context, concepts)
    with timer.phase("write"):
        mio.write_concepts(concepts, context, args.output, cliques)
    summary = _manifest(args)
    summary["input"] = _describe(context)
    summary["input"]["skipped_lines"] = len(skipped)
    summary["results"] = {"concepts": len(concepts),
                          "proper": sum(1 for c in concepts if c.is_proper())}
    if cliques is not None:
        summary["results"]["cliques"] = len(cliques)
    _emit_summary(args, summary, timer)
    return EXIT_OK


def cmd_sweep(args) -> int:
    timer = Timer()
    skipped = []
    context = _load(args, timer, skipped)
    threads = args.threads or default_threads()
    grid = args.grid if args.grid is not None else default_grid()
    with timer.phase("generate"):
        online = online_from_context(context)
    with timer.phase("density+dedup"):
        coll = deduplicate(finalize(online, context, threads))
    concepts = None
    if not args.no_coverage:
        with timer.phase("concepts"):
            concepts = mine_dyadic_concepts(context, DYADIC_LIMIT, args.override) \
                if context.arity == 2 else \
                mine_nadic_concepts_bruteforce(context, NADIC_LIMIT, args.override)
    with timer.phase("sweep"):
        report = sweep(context, grid, args.float_compat, concepts, coll,
                       coverage=not args.no_coverage)
    with timer.phase("write"):
        mio.write_sweep(report, args.output)
    summary = _manifest(args, {"grid": grid, "threads": threads})
    summary["input"] = _describe(context)
    summary["input"]["skipped_lines"] = len(skipped)
    summary["results"] = {"rows": len(report.rows), "proper_concepts": report.n_concepts,
                          "unique_at_first": report.rows[0].unique if report.rows else None}
    _emit_summary(args, summary, timer)
    return EXIT_OK


def cmd_measure(args) -> int:
    timer = Timer()
    skipped = []
    context = _load(args, timer, skipped)
    with timer.phase("read"):
        coll = mio.read_clusters(args.clusters, context)
    concepts = None
    if not args.no_concepts:
        with timer.phase("concepts"):
            concepts = mine_dyadic_concepts(context, DYADIC_LIMIT, args.override) \
                if context.arity == 2 else \
                mine_nadic_concepts_bruteforce(context, NADIC_LIMIT, args.override)
    bins = EXP2_BINS if args.bins == "exp2" else uniform_bins(10)
    with timer.phase("measure"):
        report = measure(coll, context, concepts, args.exact_limit, bins)
    with timer.phase("write"):
        mio.write_json(mio.report_to_dict(report), args.output)
        if args.csv:
            mio.write_report_csv(report, context, args.csv)
    summary = _manifest(args)
    summary["input"] = _describe(context)
    summary["results"] = {"clusters": len(coll)}
    _emit_summary(args, summary, timer)
    return EXIT_OK


def cmd_convert(args) -> int:
    timer = Timer()
    skipped = []
    context = _load(args, timer, skipped)
    with timer.phase("write"):
        if args.to == "cxt":
            if context.arity != 2:
                raise UsageError(f"CXT needs a dyadic input, got arity {context.arity}")
            mio.write_cxt(context, args.output)
        elif args.to == "tuples":
            isolated = sum(1 for i in range(context.arity) for x in range(context.sizes[i])
                           if not context.degree(i, x))
            if isolated and not args.force:
                raise UsageError(f"{isolated} element(s) occur in no tuple and would be lost; "
                                 "pass --force to convert anyway")
            mio.write_tuples(context, args.output)
        else:
            try:
                graph, encoding = context_to_graph(context)
            except EncodingError as exc:
                raise UsageError(f"cannot write an edge list: {exc}") from None
            if encoding == "reflexive":
                log.info("dropping the reflexive diagonal")
            mio.write_edges(graph, args.output)
    summary = _manifest(args)
    summary["input"] = _describe(context)
    summary["input"]["skipped_lines"] = len(skipped)
    _emit_summary(args, summary, timer)
    return EXIT_OK


COMMANDS = {"mine": cmd_mine, "concepts": cmd_concepts, "sweep": cmd_sweep,
            "measure": cmd_measure, "convert": cmd_convert}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="mmclust: %(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"mmclust: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeGuardError as exc:
        print(f"mmclust: refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"mmclust: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"mmclust: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
