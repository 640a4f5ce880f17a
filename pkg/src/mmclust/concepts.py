"""Exact formal concepts: dyadic (Close-by-One) and n-adic (brute force).

Both miners are desk-scale ground truth for coverage statistics and property
tests. They refuse inputs above a size guard instead of truncating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .context import NContext, _require_dyadic
from .errors import ArityError, EncodingError, SizeGuardError

DYADIC_LIMIT = 64
NADIC_LIMIT = 12


@dataclass(frozen=True)
class NConcept:
    """A maximal box fully inside the relation."""

    components: tuple

    @property
    def arity(self) -> int:
        return len(self.components)

    @property
    def extent(self) -> frozenset:
        return self.components[0]

    @property
    def intent(self) -> frozenset:
        return self.components[1]

    @property
    def modus(self) -> frozenset:
        return self.components[2]

    def is_proper(self) -> bool:
        """True if every component is non-empty."""
        return all(self.components)


def _mask(ids) -> int:
    m = 0
    for x in ids:
        m |= 1 << x
    return m


def _members(mask: int) -> frozenset:
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return frozenset(out)


def _lectic_key(ids, n: int) -> int:
    # first element is the most significant bit
    return sum(1 << (n - 1 - x) for x in ids)


def _close_by_one(n_closed: int, n_other: int, closed_cols, other_rows):
    """Enumerate all closed subsets of the ``closed`` side.

    ``closed_cols[j]`` is the mask of other-side elements related to closed
    element ``j``; ``other_rows[t]`` the mask of closed elements related to
    other-side element ``t``. Yields ``(other_mask, closed_mask)`` pairs.
    """
    full_closed = (1 << n_closed) - 1
    full_other = (1 << n_other) - 1

    def close(other_mask):
        result = full_closed
        t = 0
        m = other_mask
        while m:
            if m & 1:
                result &= other_rows[t]
                if not result:
                    break
            m >>= 1
            t += 1
        return result

    start = close(full_other)
    stack = [(full_other, start, 0)]
    while stack:
        other, closed, y = stack.pop()
        yield other, closed
        children = []
        for j in range(y, n_closed):
            if closed >> j & 1:
                continue
            new_other = other & closed_cols[j]
            new_closed = close(new_other)
            low = (1 << j) - 1
            if (new_closed ^ closed) & low == 0:
                children.append((new_other, new_closed, j + 1))
        stack.extend(reversed(children))


def mine_dyadic_concepts(context: NContext, limit: int = DYADIC_LIMIT,
                         override: bool = False) -> list:
    """All formal concepts of a dyadic context, in lectic order of intents.

    The top and bottom concepts are included even when their extent or
    intent is empty. Raises :class:`SizeGuardError` when
    ``min(|G|, |M|) > limit`` unless ``override`` is set.
    """
    _require_dyadic(context)
    n_g, n_m = context.sizes
    if min(n_g, n_m) > limit and not override:
        raise SizeGuardError(
            f"min(|G|, |M|) = {min(n_g, n_m)} exceeds the concept size guard {limit}; "
            "the number of concepts may be exponential. Pass override to force.")
    rows = [_mask(r) for r in context.adjacency(0)]
    cols = [_mask(c) for c in context.adjacency(1)]
    concepts = []
    if n_m <= n_g:
        for ext, intent in _close_by_one(n_m, n_g, cols, rows):
            concepts.append(NConcept((_members(ext), _members(intent))))
    else:
        for intent, ext in _close_by_one(n_g, n_m, rows, cols):
            concepts.append(NConcept((_members(ext), _members(intent))))
    concepts.sort(key=lambda c: _lectic_key(c.intent, n_m))
    return concepts


def _dyadic_proper(tuples, n_a: int, n_b: int) -> list:
    rows = [0] * n_a
    cols = [0] * n_b
    for a, b in tuples:
        rows[a] |= 1 << b
        cols[b] |= 1 << a
    out = []
    for ext, intent in _close_by_one(n_b, n_a, cols, rows):
        if ext and intent:
            out.append((_members(ext), _members(intent)))
    return out


def _nadic(tuples: set, sizes: tuple) -> list:
    n = len(sizes)
    if n == 1:
        members = frozenset(t[0] for t in tuples)
        return [(members,)] if members else []
    if n == 2:
        return _dyadic_proper(tuples, sizes[0], sizes[1])
    rest = {}
    for t in tuples:
        rest.setdefault(t[0], set()).add(t[1:])
    firsts = sorted(rest)
    found = []

    def extend(chosen, relation, start):
        if chosen:
            for sub in _nadic(relation, sizes[1:]):
                cells = list(itertools.product(*sub))
                closed = frozenset(x for x in firsts if all(c in rest[x] for c in cells))
                if closed == frozenset(chosen):
                    found.append((closed,) + tuple(sub))
        for k in range(start, len(firsts)):
            x = firsts[k]
            narrowed = rest[x] if relation is None else relation & rest[x]
            if narrowed:
                chosen.append(x)
                extend(chosen, narrowed, k + 1)
                chosen.pop()

    extend([], None, 0)
    return found


def mine_nadic_concepts_bruteforce(context: NContext, per_mode_limit: int = NADIC_LIMIT,
                                   override: bool = False) -> list:
    """All n-adic concepts with every component non-empty.

    Enumerates candidate first components depth-first and recurses on the
    (n-1)-ary relation they share; a candidate is kept when it equals the set
    of first-mode elements compatible with the recursive concept. Intended as
    an oracle, so every mode is bounded by ``per_mode_limit``.
    """
    if not override and max(context.sizes, default=0) > per_mode_limit:
        raise SizeGuardError(
            f"mode sizes {context.sizes} exceed the brute-force limit {per_mode_limit}")
    raw = _nadic(set(context.tuples), context.sizes)
    concepts = [NConcept(tuple(c)) for c in raw]
    concepts.sort(key=lambda c: tuple(tuple(sorted(z)) for z in c.components))
    return concepts


def concept_covered(concept, cluster) -> bool:
    """True if every concept component is a subset of the matching cluster component."""
    a = getattr(concept, "components", concept)
    b = getattr(cluster, "components", cluster)
    if len(a) != len(b):
        raise ArityError(f"concept arity {len(a)} vs cluster arity {len(b)}")
    return all(x <= y for x, y in zip(a, b))


def _aligned_square(context: NContext) -> list:
    """Map attribute ids onto object ids by label for a square context."""
    _require_dyadic(context)
    objs, attrs = context.labels
    if len(objs) != len(attrs) or set(objs) != set(attrs):
        raise EncodingError("clique concepts need a square context with one shared vertex set")
    return [context.element_id(0, lab) for lab in attrs]


def concept_cliques(context: NContext, concepts=None) -> list:
    """Extents of concepts ``(A, B)`` with ``A = B`` in a reflexive symmetric
    one-mode encoding; each is a maximal clique of the underlying graph."""
    to_obj = _aligned_square(context)
    pairs = {(g, to_obj[m]) for g, m in context.tuples}
    if any((b, a) not in pairs for a, b in pairs):
        raise EncodingError("relation is not symmetric")
    if any((g, g) not in pairs for g in range(context.sizes[0])):
        raise EncodingError("relation is not reflexive")
    if concepts is None:
        concepts = mine_dyadic_concepts(context)
    cliques = []
    for c in concepts:
        mapped = frozenset(to_obj[m] for m in c.intent)
        if c.extent and c.extent == mapped:
            cliques.append(c.extent)
    cliques.sort(key=lambda s: (-len(s), sorted(s)))
    return cliques
