"""Bundled example datasets."""

from __future__ import annotations

from importlib import resources

from .context import NContext
from .io import read_cxt, read_edges, read_tuples
from .onemode import SimpleGraph, graph_to_context

FILES = {
    "southern_women": "southern_women.cxt",
    "readers": "readers.cxt",
    "toybib": "toybib.tsv",
    "karate": "karate.edges",
    "florentine_marriage": "florentine_marriage.edges",
    "florentine_business": "florentine_business.edges",
}


def path(name: str):
    """Filesystem path of a bundled file (a ``Traversable``)."""
    try:
        return resources.files("mmclust") / "data" / FILES[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; choose from {sorted(FILES)}") from None


def _text(name):
    import io

    return io.StringIO(path(name).read_text(encoding="utf-8"))


def southern_women() -> NContext:
    return read_cxt(_text("southern_women"))


def readers() -> NContext:
    return read_cxt(_text("readers"))


def toybib() -> NContext:
    return read_tuples(_text("toybib"), arity=3, mode_names=("user", "tag", "resource"))


def graph(name: str) -> SimpleGraph:
    """One-mode graph: ``karate``, ``florentine_marriage`` or ``florentine_business``."""
    return read_edges(_text(name), "onemode")


def karate(encoding: str = "reflexive") -> NContext:
    return graph_to_context(graph("karate"), encoding)
