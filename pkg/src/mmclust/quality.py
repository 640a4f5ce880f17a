"""Quality measures for clusters and cluster collections."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .clustering import as_threshold
from .context import NContext, _require_dyadic
from .errors import ArityError

EXP2_BINS = (0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1)


def uniform_bins(k: int = 10) -> tuple:
    return tuple(i / k for i in range(k + 1))


def _components(cluster):
    return getattr(cluster, "components", cluster)


def g_score(cluster) -> float:
    """Least-squares contribution ``rho * mass`` (equal to ``rho**2 * vol``)."""
    return cluster.rho * cluster.mass if cluster.vol else 0.0


def g_score_volume(cluster) -> float:
    return cluster.rho ** 2 * cluster.vol if cluster.vol else 0.0


def modularity_entry(context: NContext, g: int, m: int) -> float:
    """Bipartite modularity matrix entry ``[gIm] - deg(g) deg(m) / |I|``."""
    _require_dyadic(context)
    a = 1 if m in context.row(g) else 0
    return a - len(context.row(g)) * len(context.col(m)) / len(context)


def local_modularity(cluster, context: NContext) -> float:
    """Density minus the mean extent degree times mean intent degree over ``|I|``."""
    _require_dyadic(context)
    ext, intent = _components(cluster)
    if not ext or not intent or not len(context):
        raise ValueError("local modularity needs a non-empty cluster in a non-empty context")
    deg_g = sum(len(context.row(g)) for g in ext) / len(ext)
    deg_m = sum(len(context.col(m)) for m in intent) / len(intent)
    return cluster.mass / cluster.vol - deg_g * deg_m / len(context)


class Stability(NamedTuple):
    value: float
    exact: bool
    lower_bound: float


def _bits(ids) -> int:
    m = 0
    for x in ids:
        m |= 1 << x
    return m


def _count_escaping(space: int, family: frozenset) -> int:
    """Subsets of ``space`` not contained in any member of ``family``."""

    @lru_cache(maxsize=None)
    def count(x: int, fam: frozenset) -> int:
        sets = {s & x for s in fam}
        if x in sets:
            return 0
        maximal = frozenset(s for s in sets if not any(s != t and s & t == s for t in sets))
        if not maximal:
            return 1 << x.bit_count()
        low = x & -x
        rest = x & ~low
        without = count(rest, maximal)
        with_low = count(rest, frozenset(s & ~low for s in maximal if s & low))
        return without + with_low

    return count(space, family)


def stability(cluster, context: NContext, exact_limit: int = 24) -> Stability:
    """Intensional stability of a bicluster ``(A, B)``.

    Counts subsets ``C`` of ``A`` with ``C' = B`` over ``2**|A|``. Only
    subsets of ``A & B'`` can qualify, so that is the enumeration space.
    When it holds more than ``exact_limit`` objects the closed-form lower
    bound ``2**(|B'| - 1 - |A|)`` is returned instead, flagged inexact.
    """
    _require_dyadic(context)
    ext, intent = _components(cluster)
    if intent:
        closed = frozenset.intersection(*(context.col(m) for m in intent))
    else:
        closed = context.universe(0)
    space = ext & closed
    bound = Fraction(2) ** (len(space) - 1 - len(ext)) if space else Fraction(0)
    if len(space) > exact_limit:
        return Stability(float(bound), False, float(bound))
    family = frozenset(_bits(context.col(m) & space)
                       for m in range(context.sizes[1]) if m not in intent)
    hits = _count_escaping(_bits(space), family)
    value = Fraction(hits, 2 ** len(ext))
    return Stability(float(value), True, float(bound))


def intersect(a, b, mode: int | None = None) -> bool:
    """Whether two clusters overlap in every mode, or in ``mode`` only."""
    ca, cb = _components(a), _components(b)
    if mode is not None:
        return not ca[mode].isdisjoint(cb[mode])
    return all(not x.isdisjoint(y) for x, y in zip(ca, cb))


def _diversity(clusters, mode) -> float:
    n = len(clusters)
    if n <= 1:
        return 1.0
    comps = [_components(c) for c in clusters]
    overlapping = 0
    for j in range(n):
        cj = comps[j]
        for i in range(j):
            if intersect(comps[i], cj, mode):
                overlapping += 1
    return 1 - overlapping / (n * (n - 1) / 2)


def diversity(collection) -> float:
    """One minus the fraction of cluster pairs overlapping in all modes."""
    return _diversity(list(collection), None)


def diversity_mode(collection, mode: int) -> float:
    return _diversity(list(collection), mode)


def covered_tuples(collection, context: NContext) -> set:
    covered = set()
    for c in collection:
        box = _components(c)
        if any(not z for z in box):
            continue
        mode = min(range(context.arity), key=lambda i: len(box[i]))
        for x in box[mode]:
            for t in context.tuples_with(mode, x):
                if all(t[i] in z for i, z in enumerate(box)):
                    covered.add(t)
    return covered


def coverage_tuples(collection, context: NContext) -> float:
    """Fraction of tuples of Y inside at least one cluster box."""
    if not len(context):
        return 0.0
    return len(covered_tuples(collection, context)) / len(context)


def coverage_mode(collection, context: NContext, mode: int) -> float:
    """Fraction of mode elements appearing in at least one cluster component."""
    size = context.sizes[mode]
    if not size:
        return 0.0
    seen = set()
    for c in collection:
        seen |= _components(c)[mode]
    return len(seen) / size


def coverage_concepts(collection, concepts) -> tuple:
    """(count, fraction) of proper concepts covered by some cluster."""
    proper = [c for c in concepts if c.is_proper()]
    clusters = [_components(c) for c in collection]
    count = 0
    for concept in proper:
        comps = concept.components
        if clusters and len(comps) != len(clusters[0]):
            raise ArityError("concept and cluster arities differ")
        if any(all(a <= b for a, b in zip(comps, cl)) for cl in clusters):
            count += 1
    return count, (count / len(proper) if proper else None)


@dataclass(frozen=True)
class Summary:
    count: int
    rho: float | None
    vol: float | None
    mass: float | None
    rho_mass: float | None
    coverage: float | None


def collection_summary(collection, n_tuples: int | None = None) -> Summary:
    """Averages of density, volume, mass, ``rho * mass`` and per-cluster
    tuple coverage (``mass / |Y|``). Averages of an empty collection are
    ``None``."""
    clusters = list(collection)
    if n_tuples is None:
        ctx = getattr(collection, "context", None)
        n_tuples = len(ctx) if ctx is not None else None
    n = len(clusters)
    if not n:
        return Summary(0, None, None, None, None, None)
    rho = sum(c.rho for c in clusters) / n
    vol = sum(c.vol for c in clusters) / n
    mass = sum(c.mass for c in clusters) / n
    rho_mass = sum(g_score(c) for c in clusters) / n
    cov = sum(c.mass for c in clusters) / n / n_tuples if n_tuples else None
    return Summary(n, rho, vol, mass, rho_mass, cov)


def density_histogram(collection, edges=uniform_bins(10)) -> list:
    """``(lower, upper, count)`` per ``[lower, upper)`` bin; the last bin is closed."""
    edges = list(edges)
    if len(edges) < 2:
        raise ValueError("need at least two bin edges")
    exact = [as_threshold(e) for e in edges]
    if exact[0] != 0 or exact[-1] != 1 or any(b <= a for a, b in zip(exact, exact[1:])):
        raise ValueError("bin edges must ascend strictly from 0 to 1")
    counts = [0] * (len(edges) - 1)
    for c in collection:
        if not c.vol:
            continue
        r = Fraction(c.mass, c.vol)
        for k in range(len(counts)):
            last = k == len(counts) - 1
            if exact[k] <= r and (r < exact[k + 1] or (last and r <= exact[k + 1])):
                counts[k] += 1
                break
    return [(float(edges[k]), float(edges[k + 1]), counts[k]) for k in range(len(counts))]


@dataclass
class ClusterScore:
    generator: tuple
    rho: float
    mass: int
    vol: int
    g_score: float
    local_modularity: float | None = None
    stability: Stability | None = None
    weak_test: bool | None = None


@dataclass
class QualityReport:
    clusters: list
    summary: Summary
    diversity: float
    diversity_modes: list
    coverage_tuples: float
    coverage_modes: list
    coverage_concepts: tuple | None = None
    histogram: list = field(default_factory=list)


def measure(collection, context: NContext, concepts=None, exact_limit: int = 24,
            bins=uniform_bins(10)) -> QualityReport:
    """Compute every per-cluster and per-collection measure."""
    dyadic = context.arity == 2
    scores = []
    for c in collection:
        s = ClusterScore(c.generator, c.rho, c.mass, c.vol, g_score(c))
        if dyadic and c.vol:
            s.local_modularity = local_modularity(c, context)
            s.stability = stability(c, context, exact_limit)
            s.weak_test = c.passes_weak
        scores.append(s)
    return QualityReport(
        clusters=scores,
        summary=collection_summary(collection, len(context)),
        diversity=diversity(collection),
        diversity_modes=[diversity_mode(collection, i) for i in range(context.arity)],
        coverage_tuples=coverage_tuples(collection, context),
        coverage_modes=[coverage_mode(collection, context, i) for i in range(context.arity)],
        coverage_concepts=coverage_concepts(collection, concepts) if concepts is not None else None,
        histogram=density_histogram(collection, bins),
    )
