"""Readers and writers: Burmeister CXT, delimited tuples, edge lists,
line-delimited JSON cluster and concept records, sweep and report CSV.

Every path argument also accepts ``"-"`` for stdin/stdout or an open text
file. Text is UTF-8; labels are trimmed but keep their case.
"""

from __future__ import annotations

import contextlib
import csv
import io as _io
import json
import logging
import sys
from pathlib import Path
from typing import Iterator, NamedTuple

from .clustering import ClusterCollection, NCluster, SweepReport, SweepRow
from .concepts import NConcept
from .context import Interner, NContext, default_mode_names
from .errors import ArityError, ElementError, ParseError, SchemaError
from .onemode import SimpleGraph

log = logging.getLogger(__name__)

RECORD_VERSION = 1
CLUSTER_FORMAT = "mmclust-clusters"
CONCEPT_FORMAT = "mmclust-concepts"
SWEEP_COLUMNS = ("rho", "covered_concepts", "unique_biclusters", "biclusters",
                 "fraction", "fraction_exact")


class TupleRecord(NamedTuple):
    """One data line: a label per mode and its 1-based source line."""

    labels: tuple
    line: int | None = None


@contextlib.contextmanager
def _open(path, mode="r"):
    if hasattr(path, "read") or hasattr(path, "write"):
        yield path
    elif str(path) == "-":
        yield sys.stdin if "r" in mode else sys.stdout
    else:
        with open(path, mode, encoding="utf-8", newline="" if "w" in mode else None) as fh:
            yield fh


def _name(path):
    return getattr(path, "name", None) if hasattr(path, "read") else str(path)


def parse_decimal(text: str) -> float:
    """Float from ``"0.85"`` or ``"0,85"``."""
    return float(text.strip().replace(",", "."))


def _fmt_rho(r) -> str:
    return f"{float(r):.10g}"


# -- Burmeister CXT ---------------------------------------------------------

def read_cxt(path) -> NContext:
    """Parse a Burmeister cross table.

    Layout: ``B``, an optional name line, ``|G|``, ``|M|``, then object
    names, attribute names and ``|G|`` rows of ``.``/``X`` cells. Blank lines
    between sections are allowed.
    """
    where = _name(path)
    with _open(path) as fh:
        lines = fh.read().splitlines()
    pos = 0

    def fail(msg, k=None):
        raise ParseError(msg, (k if k is not None else pos) + 1, where)

    def skip_blank():
        nonlocal pos
        while pos < len(lines) and not lines[pos].strip():
            pos += 1

    if not lines or lines[0].strip() != "B":
        fail("expected 'B' header", 0)
    pos = 1
    dims = []
    name_seen = False
    while len(dims) < 2:
        skip_blank()
        if pos >= len(lines):
            fail("missing context dimensions")
        text = lines[pos].strip()
        if text.isdigit():
            dims.append(int(text))
        elif not dims and not name_seen:
            name_seen = True
        else:
            fail(f"expected a non-negative integer dimension, got {text!r}")
        pos += 1
    n_g, n_m = dims

    def names(count, what):
        nonlocal pos
        skip_blank()
        out = []
        for _ in range(count):
            if pos >= len(lines):
                fail(f"file ends before all {count} {what} names")
            label = lines[pos].strip()
            if not label:
                fail(f"empty {what} name")
            if label in out:
                fail(f"duplicate {what} name {label!r}")
            out.append(label)
            pos += 1
        return out

    objects = names(n_g, "object")
    attributes = names(n_m, "attribute")
    pairs = []
    if n_g:
        skip_blank()
    for g in range(n_g):
        if pos >= len(lines):
            fail(f"file ends after {g} of {n_g} rows")
        row = lines[pos].strip()
        if len(row) != n_m:
            fail(f"row has {len(row)} cells, expected {n_m}")
        for m, cell in enumerate(row):
            if cell in "Xx":
                pairs.append((g, m))
            elif cell != ".":
                fail(f"invalid cell {cell!r}; use '.' or 'X'")
        pos += 1
    skip_blank()
    if pos < len(lines):
        fail("unexpected content after the last row")
    return NContext(pairs, [objects, attributes], ("object", "attribute"))


def write_cxt(context: NContext, path) -> None:
    if context.arity != 2:
        raise ArityError("CXT holds dyadic contexts only")
    with _open(path, "w") as fh:
        fh.write(f"B\n\n{context.sizes[0]}\n{context.sizes[1]}\n\n")
        for mode in (0, 1):
            for lab in context.labels[mode]:
                fh.write(f"{lab}\n")
        for g in range(context.sizes[0]):
            row = context.row(g)
            fh.write("".join("X" if m in row else "." for m in range(context.sizes[1])) + "\n")


# -- delimited tuples -------------------------------------------------------

def _split(line: str, delimiter):
    if delimiter is None:
        if "\t" in line:
            return line.split("\t")
        if "," in line:
            return line.split(",")
        return line.split()
    return line.split(delimiter)


def iter_tuples(path, arity: int | None = None, delimiter=None, header: bool = False,
                limit: int | None = None, strict: bool = True,
                skipped: list | None = None) -> Iterator[TupleRecord]:
    """Stream well-formed data lines as :class:`TupleRecord` objects.

    Blank lines and lines starting with ``#`` are ignored. With ``arity``
    unset, the first data line fixes it. ``limit`` stops after that many
    accepted records (duplicates included), which is how a "first k tuples"
    prefix is taken. In lenient mode malformed lines are appended to
    ``skipped`` as ``(line, message)`` and a warning gives their count.
    """
    where = _name(path)
    bad = skipped if skipped is not None else []
    start = len(bad)
    taken = 0
    with _open(path) as fh:
        for k, raw in enumerate(fh, 1):
            if limit is not None and taken >= limit:
                break
            text = raw.rstrip("\r\n")
            if not text.strip() or text.lstrip().startswith("#"):
                continue
            if header:
                header = False
                continue
            fields = [f.strip() for f in _split(text, delimiter)]
            if arity is None:
                arity = len(fields)
            problem = None
            if len(fields) != arity:
                problem = f"expected {arity} fields, got {len(fields)}"
            elif not all(fields):
                problem = "empty label"
            if problem:
                if strict:
                    raise ParseError(problem, k, where)
                bad.append((k, problem))
                continue
            taken += 1
            yield TupleRecord(tuple(fields), k)
    if len(bad) > start:
        log.warning("%s: skipped %d malformed line(s)", where, len(bad) - start)


def read_tuples(path, arity: int | None = None, delimiter=None, header: bool = False,
                limit: int | None = None, strict: bool = True, mode_names=None,
                skipped: list | None = None) -> NContext:
    """Load a delimited tuple file into a context (duplicates collapse)."""
    records = (r.labels for r in iter_tuples(path, arity, delimiter, header, limit,
                                             strict, skipped))
    interner = Interner(arity) if arity is not None else None
    ids = []
    for labels in records:
        if interner is None:
            interner = Interner(len(labels))
        ids.append(interner.intern_tuple(labels))
    if interner is None:
        n = arity or (len(mode_names) if mode_names else 2)
        return NContext([], [[] for _ in range(n)], mode_names)
    return NContext(ids, interner.labels, mode_names)


def write_tuples(context: NContext, path, delimiter: str = "\t") -> None:
    """One line per tuple in id order. Elements outside every tuple are lost."""
    with _open(path, "w") as fh:
        for t in sorted(context.tuples):
            fh.write(delimiter.join(str(context.labels[i][x]) for i, x in enumerate(t)) + "\n")


# -- edge lists -------------------------------------------------------------

def read_edges(path, mode: str = "onemode", strict: bool = True,
               skipped: list | None = None):
    """Read a whitespace- or comma-separated edge list.

    ``onemode`` returns a :class:`SimpleGraph`: a line holding one label
    declares an isolated vertex, and self-loops are dropped with a warning.
    ``bipartite`` returns a dyadic context with the first column as objects.
    Repeated edges collapse.
    """
    if mode not in ("onemode", "bipartite"):
        raise ValueError(f"mode must be 'onemode' or 'bipartite', got {mode!r}")
    where = _name(path)
    graph = SimpleGraph()
    interner = Interner(2)
    pairs = []
    bad = skipped if skipped is not None else []
    start = len(bad)
    loops = 0
    with _open(path) as fh:
        for k, raw in enumerate(fh, 1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            fields = [f.strip() for f in (text.split(",") if "," in text else text.split())]
            ok = (len(fields) == 2 or (len(fields) == 1 and mode == "onemode")) and all(fields)
            if not ok:
                msg = f"expected two labels, got {len(fields)} field(s)"
                if strict:
                    raise ParseError(msg, k, where)
                bad.append((k, msg))
                continue
            if mode == "bipartite":
                pairs.append(interner.intern_tuple(fields))
            elif len(fields) == 1:
                graph.add_vertex(fields[0])
            elif fields[0] == fields[1]:
                graph.add_vertex(fields[0])
                loops += 1
            else:
                graph.add_edge(fields[0], fields[1])
    if loops:
        log.warning("%s: ignored %d self-loop(s)", where, loops)
    if len(bad) > start:
        log.warning("%s: skipped %d malformed line(s)", where, len(bad) - start)
    if mode == "bipartite":
        return NContext(pairs, interner.labels, ("object", "attribute"))
    return graph


def write_edges(graph: SimpleGraph, path) -> None:
    """Edge list with isolated vertices written as single-label lines."""
    with _open(path, "w") as fh:
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")
        for v in graph.vertices:
            if not graph.degree(v):
                fh.write(f"{v}\n")


# -- JSON line records ------------------------------------------------------

def label_key(label):
    """Natural sort key: numeric labels by value, before text labels."""
    text = str(label)
    try:
        return (0, int(text), text)
    except ValueError:
        return (1, 0, text)


def _labels(context, mode, ids):
    return sorted((context.labels[mode][x] for x in ids), key=label_key)


def _header(fmt, arity, mode_names, count, **extra):
    head = {"format": fmt, "version": RECORD_VERSION, "arity": arity,
            "mode_names": list(mode_names), "count": count}
    head.update(extra)
    return head


def _dump(fh, obj):
    fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n")


def write_clusters(collection: ClusterCollection, path, context: NContext | None = None) -> None:
    """Header line followed by one JSON object per cluster, in collection order."""
    context = context or collection.context
    if context is None:
        raise ValueError("writing clusters needs the context that owns their ids")
    with _open(path, "w") as fh:
        _dump(fh, _header(CLUSTER_FORMAT, context.arity, context.mode_names, len(collection),
                          deduplicated=collection.deduplicated))
        for c in collection:
            _dump(fh, {
                "generator": [context.labels[i][x] for i, x in enumerate(c.generator)],
                "components": [_labels(context, i, z) for i, z in enumerate(c.components)],
                "rho": c.rho,
                "mass": c.mass,
                "vol": c.vol,
                "multiplicity": c.multiplicity,
                "is_concept": c.is_concept,
                "passes_weak": c.passes_weak,
            })


def _read_records(path, fmt):
    where = _name(path)
    with _open(path) as fh:
        lines = [(k, ln) for k, ln in enumerate(fh, 1) if ln.strip()]
    if not lines:
        raise SchemaError("missing header line", 1, where)
    parsed = []
    for k, ln in lines:
        try:
            parsed.append((k, json.loads(ln)))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", k, where) from None
    k, head = parsed[0]
    if not isinstance(head, dict) or head.get("format") != fmt:
        raise SchemaError(f"not a {fmt} file", k, where)
    if head.get("version") != RECORD_VERSION:
        raise SchemaError(f"unsupported record version {head.get('version')!r}", k, where)
    arity = head.get("arity")
    if not isinstance(arity, int) or arity < 1:
        raise SchemaError("header arity must be a positive integer", k, where)
    if head.get("count") != len(parsed) - 1:
        raise SchemaError(f"header announces {head.get('count')} records, found {len(parsed) - 1}",
                          k, where)
    return where, head, parsed[1:]


def _components(rec, key, arity, k, where):
    comps = rec.get(key)
    if (not isinstance(comps, list) or len(comps) != arity
            or not all(isinstance(z, list) for z in comps)):
        raise SchemaError(f"'{key}' must hold {arity} label lists", k, where)
    return comps


def _resolve(context, comps, k, where):
    if context is None:
        return tuple(frozenset(z) for z in comps)
    try:
        return tuple(context.ids(i, z) for i, z in enumerate(comps))
    except ElementError as exc:
        raise SchemaError(f"record does not match the context: {exc}", k, where) from None


def read_clusters(path, context: NContext | None = None) -> ClusterCollection:
    """Inverse of :func:`write_clusters`.

    With a context, labels are mapped back to its ids; without one the
    components are frozensets of labels and ``generator`` a label tuple.
    """
    where, head, records = _read_records(path, CLUSTER_FORMAT)
    arity = head["arity"]
    if context is not None and context.arity != arity:
        raise SchemaError(f"file arity {arity} does not match context arity {context.arity}",
                          1, where)
    clusters = []
    for k, rec in records:
        if not isinstance(rec, dict):
            raise SchemaError("record must be a JSON object", k, where)
        comps = _resolve(context, _components(rec, "components", arity, k, where), k, where)
        gen = rec.get("generator")
        if not isinstance(gen, list) or len(gen) != arity:
            raise SchemaError(f"'generator' must list {arity} labels", k, where)
        if context is not None:
            try:
                gen = context.tuple_ids(gen)
            except ElementError as exc:
                raise SchemaError(f"record does not match the context: {exc}", k, where) from None
        mass, vol, mult = rec.get("mass"), rec.get("vol"), rec.get("multiplicity", 1)
        if not all(isinstance(v, int) and v >= 0 for v in (mass, vol, mult)) or mass > vol:
            raise SchemaError("mass, vol and multiplicity must be integers with mass <= vol",
                              k, where)
        clusters.append(NCluster(tuple(gen), comps, mass, vol, mult,
                                 rec.get("is_concept"), rec.get("passes_weak")))
    return ClusterCollection(clusters, context, bool(head.get("deduplicated", False)),
                             {"mode_names": head.get("mode_names")})


def write_concepts(concepts, context: NContext, path, cliques=None) -> None:
    """Concept records in the cluster record layout. Extents of clique
    concepts, if given, are flagged with ``"clique": true``."""
    cliques = set(cliques or ())
    with _open(path, "w") as fh:
        _dump(fh, _header(CONCEPT_FORMAT, context.arity, context.mode_names, len(concepts)))
        for c in concepts:
            rec = {"components": [_labels(context, i, z) for i, z in enumerate(c.components)],
                   "proper": c.is_proper()}
            if cliques:
                rec["clique"] = c.extent in cliques
            _dump(fh, rec)


def read_concepts(path, context: NContext | None = None) -> list:
    where, head, records = _read_records(path, CONCEPT_FORMAT)
    out = []
    for k, rec in records:
        if not isinstance(rec, dict):
            raise SchemaError("record must be a JSON object", k, where)
        comps = _components(rec, "components", head["arity"], k, where)
        out.append(NConcept(_resolve(context, comps, k, where)))
    return out


# -- CSV reports ------------------------------------------------------------

def write_sweep(report: SweepReport, path) -> None:
    """Sweep table with 2-decimal fractions and a full-precision sidecar."""
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in report.rows:
            frac = r.fraction
            w.writerow([_fmt_rho(r.rho),
                        "" if r.covered_concepts is None else r.covered_concepts,
                        r.unique, r.generated,
                        "" if frac is None else f"{frac:.2f}",
                        "" if frac is None else repr(frac)])


def read_sweep(path) -> list:
    """Rows of a sweep table as dicts of numbers.

    Accepts this package's CSV and hand-made tables separated by tabs or
    semicolons, where decimals may use a comma. Unknown columns are kept as
    text.
    """
    where = _name(path)
    with _open(path) as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        return []
    first = lines[0]
    delim = "\t" if "\t" in first else ";" if ";" in first else ","
    reader = csv.reader(_io.StringIO("\n".join(lines)), delimiter=delim)
    cols = [c.strip() for c in next(reader)]
    rows = []
    for k, fields in enumerate(reader, 2):
        if len(fields) != len(cols):
            raise ParseError(f"expected {len(cols)} fields, got {len(fields)}", k, where)
        row = {}
        for c, v in zip(cols, fields):
            v = v.strip()
            if c in ("covered_concepts", "unique_biclusters", "biclusters"):
                row[c] = int(v) if v else None
            elif c in ("rho", "fraction", "fraction_exact"):
                row[c] = parse_decimal(v) if v else None
            else:
                row[c] = v
        rows.append(row)
    return rows


def sweep_from_rows(rows, n_concepts=None) -> SweepReport:
    return SweepReport([SweepRow(r["rho"], r.get("covered_concepts"), r["unique_biclusters"],
                                 r["biclusters"], n_concepts) for r in rows], n_concepts)


REPORT_COLUMNS = ("generator", "rho", "mass", "vol", "g_score", "local_modularity",
                  "stability", "stability_exact", "weak_test")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def write_report_csv(report, context: NContext, path) -> None:
    """Per-cluster quality rows; the generator is written as ``label|label``."""
    with _open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for s in report.clusters:
            st = s.stability
            w.writerow([
                "|".join(str(context.labels[i][x]) for i, x in enumerate(s.generator)),
                _cell(s.rho), s.mass, s.vol, _cell(s.g_score), _cell(s.local_modularity),
                _cell(st.value if st else None), _cell(st.exact if st else None),
                _cell(s.weak_test)])


def report_to_dict(report) -> dict:
    """Collection-level part of a quality report as plain JSON data."""
    s = report.summary
    cc = report.coverage_concepts
    return {
        "count": s.count,
        "mean_rho": s.rho,
        "mean_vol": s.vol,
        "mean_mass": s.mass,
        "mean_rho_mass": s.rho_mass,
        "mean_tuple_coverage": s.coverage,
        "diversity": report.diversity,
        "diversity_modes": report.diversity_modes,
        "coverage_tuples": report.coverage_tuples,
        "coverage_modes": report.coverage_modes,
        "coverage_concepts": None if cc is None else {"count": cc[0], "fraction": cc[1]},
        "histogram": [{"lower": a, "upper": b, "count": n} for a, b, n in report.histogram],
    }


def write_json(obj, path) -> None:
    with _open(path, "w") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=2, sort_keys=False)
        fh.write("\n")


def context_from_file(path, fmt: str = "auto", arity: int | None = None,
                      encoding: str = "reflexive", delimiter=None, header: bool = False,
                      limit: int | None = None, strict: bool = True,
                      skipped: list | None = None) -> NContext:
    """Load any supported input as a context.

    ``fmt`` is ``cxt``, ``tuples``, ``edges`` (one-mode, encoded with
    ``encoding``), ``bipartite`` or ``auto`` (by file suffix: ``.cxt``,
    ``.edges``, anything else read as tuples).
    """
    from .onemode import graph_to_context

    if fmt == "auto":
        suffix = Path(str(path)).suffix.lower()
        fmt = {".cxt": "cxt", ".edges": "edges"}.get(suffix, "tuples")
    if fmt == "cxt":
        return read_cxt(path)
    if fmt == "edges":
        return graph_to_context(read_edges(path, "onemode", strict, skipped), encoding)
    if fmt == "bipartite":
        return read_edges(path, "bipartite", strict, skipped)
    if fmt == "tuples":
        names = default_mode_names(arity) if arity else None
        return read_tuples(path, arity, delimiter, header, limit, strict, names, skipped)
    raise ValueError(f"unknown input format {fmt!r}")
