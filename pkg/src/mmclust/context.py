"""n-adic formal contexts and their derivation operators.

A context is an n-ary relation ``Y`` over ``n`` element universes. Elements
are interned to dense integers per mode at construction time; every set in
this package is a ``frozenset`` of such ids, and a *box* is a tuple holding
one set per mode.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple, Sequence

from .errors import ArityError, ElementError

Box = tuple  # tuple[frozenset[int], ...], one component per mode


class Density(NamedTuple):
    """Density of a box. ``rho`` is ``None`` for an empty box (0/0)."""

    rho: float | None
    mass: int
    vol: int


class NContext:
    """Immutable n-adic context ``(X1, ..., Xn, Y)``.

    Parameters
    ----------
    tuples:
        Iterable of n-tuples of element ids. Duplicates are collapsed.
    labels:
        One sequence of labels per mode; ``labels[i][x]`` names element ``x``
        of mode ``i``. Labels must be unique within a mode.
    mode_names:
        Display names of the modes.
    """

    def __init__(self, tuples, labels: Sequence[Sequence[Hashable]], mode_names=None):
        self.arity = len(labels)
        if self.arity < 1:
            raise ArityError("a context needs at least one mode")
        self.labels = tuple(tuple(ls) for ls in labels)
        self.sizes = tuple(len(ls) for ls in self.labels)
        if mode_names is None:
            mode_names = default_mode_names(self.arity)
        if len(mode_names) != self.arity:
            raise ArityError(f"{len(mode_names)} mode names for arity {self.arity}")
        self.mode_names = tuple(mode_names)
        self._ids = []
        for i, ls in enumerate(self.labels):
            ids = {lab: x for x, lab in enumerate(ls)}
            if len(ids) != len(ls):
                raise ValueError(f"duplicate labels in mode {self.mode_names[i]!r}")
            self._ids.append(ids)
        sizes = self.sizes
        ys = set()
        for t in tuples:
            t = tuple(t)
            if len(t) != self.arity:
                raise ArityError(f"tuple {t!r} does not have arity {self.arity}")
            for i, x in enumerate(t):
                if not 0 <= x < sizes[i]:
                    raise ElementError(f"element id {x!r} out of range for mode {i}")
            ys.add(t)
        self.tuples = frozenset(ys)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_records(cls, records: Iterable[Sequence[Hashable]], arity=None,
                     mode_names=None, universes=None) -> "NContext":
        """Build a context from labelled records, interning labels in order
        of first appearance (after any labels listed in ``universes``)."""
        if arity is None:
            if universes is not None:
                arity = len(universes)
            elif mode_names is not None:
                arity = len(mode_names)
        interner = Interner(arity) if arity is not None else None
        if universes is not None:
            interner = Interner(len(universes))
            for i, ls in enumerate(universes):
                for lab in ls:
                    interner.intern(i, lab)
        ids = []
        for rec in records:
            if interner is None:
                interner = Interner(len(rec))
            if len(rec) != interner.arity:
                raise ArityError(f"record {rec!r} does not have arity {interner.arity}")
            ids.append(interner.intern_tuple(rec))
        if interner is None:
            raise ArityError("cannot infer arity of an empty record stream")
        return cls(ids, interner.labels, mode_names)

    @classmethod
    def from_pairs(cls, pairs, objects=None, attributes=None, mode_names=None):
        """Dyadic convenience constructor from (object, attribute) label pairs."""
        universes = [list(objects or []), list(attributes or [])]
        return cls.from_records(pairs, universes=universes,
                                mode_names=mode_names or ("object", "attribute"))

    # -- basic accessors --------------------------------------------------

    def __len__(self):
        return len(self.tuples)

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def __repr__(self):
        dims = "x".join(str(s) for s in self.sizes)
        return f"NContext({dims}, |Y|={len(self.tuples)})"

    def universe(self, mode: int) -> frozenset:
        return frozenset(range(self.sizes[mode]))

    def element_id(self, mode: int, label) -> int:
        try:
            return self._ids[mode][label]
        except KeyError:
            raise ElementError(f"unknown label {label!r} in mode {self.mode_names[mode]!r}") from None

    def ids(self, mode: int, labels: Iterable) -> frozenset:
        return frozenset(self.element_id(mode, lab) for lab in labels)

    def box(self, *label_sets) -> Box:
        """Box from one iterable of labels per mode."""
        if len(label_sets) != self.arity:
            raise ArityError(f"{len(label_sets)} components for arity {self.arity}")
        return tuple(self.ids(i, ls) for i, ls in enumerate(label_sets))

    def tuple_ids(self, labels: Sequence) -> tuple:
        return tuple(self.element_id(i, lab) for i, lab in enumerate(labels))

    def label_list(self, mode: int, ids: Iterable[int]) -> list:
        """Labels of ``ids`` in id order."""
        ls = self.labels[mode]
        return [ls[x] for x in sorted(ids)]

    def check_element(self, mode: int, x: int) -> None:
        if not 0 <= mode < self.arity:
            raise ArityError(f"mode {mode} out of range for arity {self.arity}")
        if not (isinstance(x, int) and 0 <= x < self.sizes[mode]):
            raise ElementError(f"element id {x!r} out of range for mode {mode}")

    # -- indices ----------------------------------------------------------

    @cached_property
    def _inverted(self):
        index = [[[] for _ in range(s)] for s in self.sizes]
        for t in sorted(self.tuples):
            for i, x in enumerate(t):
                index[i][x].append(t)
        return tuple(tuple(tuple(ts) for ts in per_mode) for per_mode in index)

    def tuples_with(self, mode: int, x: int) -> tuple:
        """Sorted tuples of ``Y`` whose ``mode`` coordinate is ``x``."""
        return self._inverted[mode][x]

    @cached_property
    def _rest(self):
        index = [{} for _ in range(self.arity)]
        for t in self.tuples:
            for i in range(self.arity):
                key = t[:i] + t[i + 1:]
                index[i].setdefault(key, set()).add(t[i])
        return tuple({k: frozenset(v) for k, v in d.items()} for d in index)

    def rest_index(self, mode: int) -> dict:
        """Mapping from (n-1)-tuples (``mode`` removed) to their prime sets."""
        return self._rest[mode]

    @cached_property
    def _adjacency(self):
        if self.arity != 2:
            raise ArityError("adjacency sets are defined for dyadic contexts only")
        rows = [set() for _ in range(self.sizes[0])]
        cols = [set() for _ in range(self.sizes[1])]
        for g, m in self.tuples:
            rows[g].add(m)
            cols[m].add(g)
        return (tuple(frozenset(r) for r in rows), tuple(frozenset(c) for c in cols))

    def row(self, g: int) -> frozenset:
        """``g'`` in a dyadic context."""
        return self._adjacency[0][g]

    def col(self, m: int) -> frozenset:
        """``m'`` in a dyadic context."""
        return self._adjacency[1][m]

    def adjacency(self, side: int) -> tuple:
        """Per-element prime sets of mode ``side`` (dyadic only)."""
        return self._adjacency[side]

    def degree(self, mode: int, x: int) -> int:
        if self.arity == 2:
            return len(self._adjacency[mode][x])
        return len(self.tuples_with(mode, x))


class Interner:
    """Maps labels to dense ids, one table per mode, in order of appearance."""

    __slots__ = ("arity", "tables", "labels")

    def __init__(self, arity: int):
        self.arity = arity
        self.tables = [{} for _ in range(arity)]
        self.labels = [[] for _ in range(arity)]

    def intern(self, mode: int, label) -> int:
        table = self.tables[mode]
        x = table.get(label)
        if x is None:
            x = table[label] = len(table)
            self.labels[mode].append(label)
        return x

    def intern_tuple(self, labels) -> tuple:
        return tuple(self.intern(i, lab) for i, lab in enumerate(labels))


def default_mode_names(arity: int) -> tuple:
    if arity == 2:
        return ("object", "attribute")
    if arity == 3:
        return ("object", "attribute", "condition")
    return tuple(f"mode{i}" for i in range(arity))


def _require_dyadic(context: NContext) -> None:
    if context.arity != 2:
        raise ArityError(f"operation needs a dyadic context, got arity {context.arity}")


def galois(context: NContext, side: int, A: Iterable[int]) -> frozenset:
    """Derivation ``A'`` of a set of mode-``side`` elements in a dyadic context.

    The derivation of the empty set is the whole opposite universe.
    """
    _require_dyadic(context)
    if side not in (0, 1):
        raise ArityError(f"side must be 0 or 1, got {side}")
    primes = context.adjacency(side)
    result = None
    for x in A:
        context.check_element(side, x)
        result = primes[x] if result is None else result & primes[x]
        if not result:
            return frozenset()
    if result is None:
        return context.universe(1 - side)
    return result


def closure(context: NContext, side: int, A: Iterable[int]) -> frozenset:
    """``A''``: the closure of ``A`` on the same side."""
    return galois(context, 1 - side, galois(context, side, A))


def prime_element(context: NContext, mode: int, x: int) -> frozenset:
    """All (n-1)-tuples completing element ``x`` of ``mode`` to a tuple of Y.

    For a dyadic context the 1-tuples are unwrapped, so this is ``g'`` or
    ``m'``.
    """
    context.check_element(mode, x)
    if context.arity == 2:
        return context.adjacency(mode)[x]
    return frozenset(t[:mode] + t[mode + 1:] for t in context.tuples_with(mode, x))


def prime_rest(context: NContext, mode: int, partial: Sequence[int]) -> frozenset:
    """Elements ``z`` of ``mode`` such that inserting ``z`` into ``partial``
    at position ``mode`` gives a tuple of Y."""
    partial = tuple(partial)
    if len(partial) != context.arity - 1:
        raise ArityError(f"partial tuple {partial!r} must have {context.arity - 1} elements")
    for i, x in enumerate(partial):
        context.check_element(i if i < mode else i + 1, x)
    return context.rest_index(mode).get(partial, frozenset())


def volume(box: Box) -> int:
    return math.prod(len(z) for z in box)


def _check_box(context: NContext, box: Box) -> None:
    if len(box) != context.arity:
        raise ArityError(f"box with {len(box)} components for arity {context.arity}")
    for i, z in enumerate(box):
        if z and (min(z) < 0 or max(z) >= context.sizes[i]):
            raise ElementError(f"box component {i} has ids out of range")


def _index_cost(context: NContext, box: Box):
    """Mode whose members touch the fewest tuples, and that tuple count."""
    best = None
    for i, z in enumerate(box):
        cost = sum(context.degree(i, x) for x in z)
        if best is None or cost < best[1]:
            best = (i, cost)
    return best


def count_mass(context: NContext, box: Box, strategy: str = "auto") -> int:
    """Number of tuples of Y inside ``box``.

    ``strategy`` is one of ``"index"`` (walk the tuples of the mode whose
    members are rarest), ``"cells"`` (probe every cell of the box),
    ``"scan"`` (test every tuple of Y) or ``"auto"``, which picks the cheaper
    of index and cells.
    """
    if any(not z for z in box):
        return 0
    if strategy == "auto":
        mode, cost = _index_cost(context, box)
        strategy = "cells" if volume(box) < cost else "index"
    if strategy == "cells":
        ys = context.tuples
        return sum(1 for cell in itertools.product(*box) if cell in ys)
    if strategy == "scan":
        return sum(1 for t in context.tuples if all(x in z for x, z in zip(t, box)))
    if strategy != "index":
        raise ValueError(f"unknown mass strategy {strategy!r}")
    mode, _ = _index_cost(context, box)
    if context.arity == 2:
        primes = context.adjacency(mode)
        other = box[1 - mode]
        return sum(len(primes[x] & other) for x in box[mode])
    others = [(i, z) for i, z in enumerate(box) if i != mode]
    mass = 0
    for x in box[mode]:
        for t in context.tuples_with(mode, x):
            if all(t[i] in z for i, z in others):
                mass += 1
    return mass


def box_density(context: NContext, box: Box) -> Density:
    """Density, mass and volume of ``box``; ``rho`` is ``None`` if it is empty."""
    _check_box(context, box)
    vol = volume(box)
    if vol == 0:
        return Density(None, 0, 0)
    mass = count_mass(context, box)
    return Density(mass / vol, mass, vol)
