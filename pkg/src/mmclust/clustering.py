"""OA-biclusters and prime-based n-clusters.

Generation is a single pass over the tuple stream. For every incoming tuple
the prime sets of its (n-1)-subtuples are extended in place, and the tuple is
recorded as the generator of a cluster whose components *are* those prime
sets. Nothing is copied until :func:`finalize`, which snapshots components,
counts mass and volume, and orders clusters by generator.

Density thresholds are compared in one of two ways:

* exact (default): ``mass / vol >= rho_min`` in rational arithmetic, with the
  threshold read as a short decimal (``0.6000000000000001`` means ``3/5``);
* float-compatible: ``mass / |Z1| / ... / |Zn| >= rho_min`` evaluated in
  double precision, left to right, against the raw float threshold. Grids
  built as ``i * 0.05`` then drop some clusters whose density sits exactly
  on a grid point; older reference sweep tables were produced this way.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .context import Box, Interner, NContext, count_mass, volume, _require_dyadic
from .errors import ArityError, ParseError

DEFAULT_STEP = 0.05


@dataclass(frozen=True, slots=True)
class NCluster:
    """A finalized cluster generated by one tuple of the relation."""

    generator: tuple
    components: tuple
    mass: int
    vol: int
    multiplicity: int = 1
    is_concept: bool | None = None
    passes_weak: bool | None = None

    @property
    def rho(self) -> float | None:
        return self.mass / self.vol if self.vol else None

    @property
    def rho_exact(self) -> Fraction | None:
        return Fraction(self.mass, self.vol) if self.vol else None

    @property
    def rho_sequential(self) -> float | None:
        """Density as ``mass / |Z1| / ... / |Zn|`` in floating point."""
        if not self.vol:
            return None
        r = float(self.mass)
        for z in self.components:
            r /= len(z)
        return r

    @property
    def key(self) -> tuple:
        return self.components

    def box(self) -> Box:
        return self.components


@dataclass
class ClusterCollection:
    """Finalized clusters in generator order.

    ``generated`` counts every generating tuple, including those whose
    cluster duplicates an earlier one (see ``NCluster.multiplicity``).
    """

    clusters: list
    context: NContext | None = None
    deduplicated: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def __getitem__(self, k):
        return self.clusters[k]

    @property
    def generated(self) -> int:
        return sum(c.multiplicity for c in self.clusters)

    @property
    def unique(self) -> int:
        return len({c.components for c in self.clusters})

    @property
    def arity(self) -> int | None:
        if self.context is not None:
            return self.context.arity
        return len(self.clusters[0].components) if self.clusters else None

    def stats(self, edges=None) -> dict:
        from .quality import density_histogram, uniform_bins

        edges = edges or uniform_bins(10)
        return {
            "generated": self.generated,
            "unique": self.unique,
            "histogram": density_histogram(self, edges),
        }

    def _derive(self, clusters, **changes) -> "ClusterCollection":
        return ClusterCollection(clusters, self.context,
                                 changes.get("deduplicated", self.deduplicated), dict(self.meta))


class OnlineClusters:
    """Single-writer online generator of prime-based n-clusters.

    ``index[i]`` maps the tuple with mode ``i`` removed (a bare element for
    dyadic input) to the mutable set of mode-``i`` elements completing it.
    Every accepted tuple costs exactly ``arity`` index updates, counted in
    ``operations``.
    """

    def __init__(self, arity: int = 2, mode_names=None, universes=None):
        if arity < 2:
            raise ArityError("clusters need at least two modes")
        self.arity = arity
        self.mode_names = tuple(mode_names) if mode_names else None
        self.interner = Interner(arity)
        if universes is not None:
            if len(universes) != arity:
                raise ArityError(f"{len(universes)} universes for arity {arity}")
            for i, labels in enumerate(universes):
                for lab in labels:
                    self.interner.intern(i, lab)
        self.index = [{} for _ in range(arity)]
        self.generators = []
        self.operations = 0
        self.duplicates = 0
        self.errors = []

    def __len__(self):
        return len(self.generators)

    def _key(self, t: tuple, i: int):
        if self.arity == 2:
            return t[1 - i]
        return t[:i] + t[i + 1:]

    def add_ids(self, t: tuple) -> bool:
        """Consume an already-interned tuple; returns False for a repeat."""
        index = self.index
        if self.arity == 2:
            g, m = t
            ext = index[0].get(m)
            if ext is not None and g in ext:
                self.duplicates += 1
                return False
            if ext is None:
                ext = index[0][m] = set()
            ext.add(g)
            intent = index[1].get(g)
            if intent is None:
                intent = index[1][g] = set()
            intent.add(m)
            self.operations += 2
        else:
            first = index[0].get(t[1:])
            if first is not None and t[0] in first:
                self.duplicates += 1
                return False
            for i in range(self.arity):
                key = t[:i] + t[i + 1:]
                s = index[i].get(key)
                if s is None:
                    s = index[i][key] = set()
                s.add(t[i])
                self.operations += 1
        self.generators.append(t)
        return True

    def add(self, labels: Sequence, line: int | None = None) -> bool:
        """Consume one labelled tuple."""
        if len(labels) != self.arity:
            raise ParseError(f"expected {self.arity} fields, got {len(labels)}", line)
        intern = self.interner.intern
        ids = []
        for i, lab in enumerate(labels):
            if isinstance(lab, str):
                lab = lab.strip()
                if not lab:
                    raise ParseError(f"empty label in field {i + 1}", line)
            ids.append(intern(i, lab))
        return self.add_ids(tuple(ids))

    def extend(self, stream: Iterable, strict: bool = False, start: int = 1) -> "OnlineClusters":
        """Consume a stream of label sequences or ``TupleRecord`` objects.

        Malformed records are logged in ``errors`` as ``(line, message)`` and
        skipped unless ``strict`` is set, in which case the ParseError
        propagates.
        """
        for k, rec in enumerate(stream, start):
            line = getattr(rec, "line", None) or k
            labels = getattr(rec, "labels", rec)
            try:
                self.add(labels, line)
            except ParseError as exc:
                if strict:
                    raise
                self.errors.append((exc.line, exc.message))
        return self

    def components(self, k: int) -> tuple:
        """Live prime sets of the ``k``-th cluster (not copies)."""
        t = self.generators[k]
        return tuple(self.index[i][self._key(t, i)] for i in range(self.arity))

    def context(self) -> NContext:
        return NContext(self.generators, self.interner.labels, self.mode_names)


def mine_online(tuple_stream: Iterable, existing: OnlineClusters | None = None,
                arity: int | None = None, strict: bool = False) -> OnlineClusters:
    """Run (or resume) the online pass over ``tuple_stream``."""
    if existing is None:
        if arity is None:
            stream = iter(tuple_stream)
            first = next(stream, None)
            if first is None:
                return OnlineClusters(2)
            labels = getattr(first, "labels", first)
            existing = OnlineClusters(len(labels))
            existing.extend([first], strict=strict)
            return existing.extend(stream, strict=strict, start=2)
        existing = OnlineClusters(arity)
    elif arity is not None and arity != existing.arity:
        raise ArityError(f"stream arity {arity} does not match collection arity {existing.arity}")
    return existing.extend(tuple_stream, strict=strict)


def online_from_context(context: NContext) -> OnlineClusters:
    """Online pass over the tuples of ``context`` in sorted id order."""
    online = OnlineClusters(context.arity, context.mode_names, universes=context.labels)
    for t in sorted(context.tuples):
        online.add_ids(t)
    return online


def weak_cut(context: NContext, components: Box) -> int:
    """Incidences between cluster members and elements outside the cluster."""
    _require_dyadic(context)
    ext, intent = components
    rows, cols = context.adjacency(0), context.adjacency(1)
    return (sum(len(rows[g] - intent) for g in ext)
            + sum(len(cols[m] - ext) for m in intent))


def weak_test(context: NContext, components: Box, mass: int | None = None) -> bool:
    """``rho >= cut / (2 |A| |B|)``, i.e. ``2 * mass >= cut`` in integers."""
    if mass is None:
        mass = count_mass(context, components)
    return 2 * mass >= weak_cut(context, components)


def _translate(online: OnlineClusters, context: NContext):
    """Maps from online ids to ``context`` ids, or None if they coincide."""
    labels = online.interner.labels
    if all(tuple(ls) == context.labels[i][:len(ls)] for i, ls in enumerate(labels)):
        return None
    return [[context.element_id(i, lab) for lab in ls] for i, ls in enumerate(labels)]


def _measure(context: NContext, box: Box):
    vol = volume(box)
    mass = count_mass(context, box) if vol else 0
    dyadic = context.arity == 2
    is_concept = (mass == vol and vol > 0) if dyadic else None
    weak = weak_test(context, box, mass) if dyadic else None
    return mass, vol, is_concept, weak


def finalize(collection: OnlineClusters, context: NContext | None = None,
             threads: int = 1) -> ClusterCollection:
    """Snapshot the live components and measure every generated cluster.

    Density is computed once per distinct component list. Result order is
    lexicographic on generator ids.
    """
    if context is None:
        context = collection.context()
    elif context.arity != collection.arity:
        raise ArityError(f"context arity {context.arity} vs clusters arity {collection.arity}")
    mapping = _translate(collection, context)
    snap = {}
    rows = []
    for k, t in enumerate(collection.generators):
        comps = collection.components(k)
        if mapping is not None:
            t = tuple(mapping[i][x] for i, x in enumerate(t))
            comps = tuple(frozenset(mapping[i][x] for x in z) for i, z in enumerate(comps))
        else:
            comps = tuple(frozenset(z) for z in comps)
        comps = snap.setdefault(comps, comps)
        rows.append((t, comps))
    distinct = list(snap)
    if threads > 1 and len(distinct) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            measured = list(pool.map(lambda b: _measure(context, b), distinct,
                                     chunksize=max(1, len(distinct) // (4 * threads))))
    else:
        measured = [_measure(context, b) for b in distinct]
    info = dict(zip(distinct, measured))
    rows.sort(key=lambda r: r[0])
    clusters = []
    for t, comps in rows:
        mass, vol, is_concept, weak = info[comps]
        clusters.append(NCluster(t, comps, mass, vol, 1, is_concept, weak))
    return ClusterCollection(clusters, context, False,
                             {"operations": collection.operations,
                              "duplicate_tuples": collection.duplicates,
                              "record_errors": len(collection.errors)})


def deduplicate(collection: ClusterCollection) -> ClusterCollection:
    """One representative per distinct component list, keeping the first
    generator and summing multiplicities."""
    first = {}
    for c in collection.clusters:
        kept = first.get(c.components)
        if kept is None:
            first[c.components] = c
        else:
            first[c.components] = replace(kept, multiplicity=kept.multiplicity + c.multiplicity)
    clusters = sorted(first.values(), key=lambda c: c.generator)
    return collection._derive(clusters, deduplicated=True)


def as_threshold(rho_min) -> Fraction:
    """Exact rational reading of a density threshold."""
    if isinstance(rho_min, Fraction):
        value = rho_min
    elif isinstance(rho_min, str):
        value = Fraction(rho_min.replace(",", "."))
    elif isinstance(rho_min, int):
        value = Fraction(rho_min)
    else:
        if not math.isfinite(rho_min):
            raise ValueError(f"density threshold must be finite, got {rho_min!r}")
        value = Fraction(rho_min).limit_denominator(10 ** 6)
    if not 0 <= value <= 1:
        raise ValueError(f"density threshold must lie in [0, 1], got {rho_min!r}")
    return value


def dense_predicate(rho_min, float_compat: bool = False):
    """Return ``keep(cluster) -> bool`` for the threshold ``rho_min``."""
    exact = as_threshold(rho_min)
    if float_compat:
        limit = float(rho_min)
        return lambda c: c.vol > 0 and c.rho_sequential >= limit
    num, den = exact.numerator, exact.denominator
    return lambda c: c.vol > 0 and c.mass * den >= num * c.vol


def filter_density(collection: ClusterCollection, rho_min, float_compat: bool = False) -> ClusterCollection:
    """Keep clusters with density at least ``rho_min``."""
    keep = dense_predicate(rho_min, float_compat)
    return collection._derive([c for c in collection.clusters if keep(c)])


def filter_weak(collection: ClusterCollection, context: NContext | None = None) -> ClusterCollection:
    """Keep clusters whose density dominates their normalized cut."""
    context = context or collection.context
    if context is None:
        raise ValueError("filter_weak needs a context")
    _require_dyadic(context)
    kept = []
    for c in collection.clusters:
        ok = c.passes_weak
        if ok is None:
            ok = weak_test(context, c.components, c.mass)
        if ok:
            kept.append(c)
    return collection._derive(kept)


def mine(context: NContext, rho_min=0, float_compat: bool = False, weak: bool = False,
         threads: int = 1) -> ClusterCollection:
    """Online pass, finalize, deduplicate and filter in one call."""
    coll = deduplicate(finalize(online_from_context(context), context, threads))
    coll = filter_density(coll, rho_min, float_compat)
    if weak:
        coll = filter_weak(coll, context)
    return coll


def default_grid(step: float = DEFAULT_STEP) -> list:
    """Thresholds ``0, step, 2*step, ..., 1`` built as ``i * step``."""
    n = round(1 / step)
    if not math.isclose(n * step, 1.0):
        raise ValueError(f"step {step} does not divide [0, 1]")
    return [i * step for i in range(n + 1)]


@dataclass(frozen=True)
class SweepRow:
    rho: float
    covered_concepts: int | None
    unique: int
    generated: int
    n_concepts: int | None

    @property
    def fraction(self) -> float | None:
        if not self.n_concepts or self.covered_concepts is None:
            return None
        return self.covered_concepts / self.n_concepts


@dataclass
class SweepReport:
    rows: list
    n_concepts: int | None
    float_compat: bool = False

    def row(self, rho) -> SweepRow:
        for r in self.rows:
            if math.isclose(r.rho, float(rho), abs_tol=1e-9):
                return r
        raise KeyError(rho)


def _coverage_scores(concepts, clusters, float_compat: bool):
    """Best density among clusters covering each concept (None if uncovered)."""
    scores = []
    for c in concepts:
        best = None
        for b in clusters:
            if all(x <= y for x, y in zip(c.components, b.components)):
                s = b.rho_sequential if float_compat else b.rho_exact
                if best is None or s > best:
                    best = s
        scores.append(best)
    return scores


def sweep(context: NContext, rho_grid=None, float_compat: bool = False, concepts=None,
          collection: ClusterCollection | None = None, coverage: bool = True,
          concept_limit: int | None = None, override: bool = False) -> SweepReport:
    """Per-threshold counts of generated and unique clusters and covered concepts.

    Concepts default to the proper (non-empty extent and intent) formal
    concepts of a dyadic context.
    """
    if rho_grid is None:
        rho_grid = default_grid()
    grid = list(rho_grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("density grid must be ascending")
    preds = [dense_predicate(r, float_compat) for r in grid]
    if collection is None:
        collection = deduplicate(finalize(online_from_context(context), context))
    elif not collection.deduplicated:
        collection = deduplicate(collection)
    if coverage and concepts is None:
        from .concepts import DYADIC_LIMIT, mine_dyadic_concepts

        _require_dyadic(context)
        concepts = mine_dyadic_concepts(context, concept_limit or DYADIC_LIMIT, override)
    if coverage:
        concepts = [c for c in concepts if c.is_proper()]
        scores = _coverage_scores(concepts, collection.clusters, float_compat)
    rows = []
    for r, keep in zip(grid, preds):
        kept = [c for c in collection.clusters if keep(c)]
        covered = None
        if coverage:
            covered = 0
            for s in scores:
                if s is None:
                    continue
                if float_compat:
                    if s >= float(r):
                        covered += 1
                elif s >= as_threshold(r):
                    covered += 1
        rows.append(SweepRow(float(r), covered, len(kept),
                             sum(c.multiplicity for c in kept),
                             len(concepts) if coverage else None))
    return SweepReport(rows, len(concepts) if coverage else None, float_compat)
