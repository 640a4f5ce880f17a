import random

import networkx as nx
import pytest

import oracles
from mmclust import (ArityError, EncodingError, NConcept, NContext, SizeGuardError, concept_cliques,
                     concept_covered, graph_to_context, mine_dyadic_concepts,
                     mine_nadic_concepts_bruteforce)
from mmclust.onemode import SimpleGraph


def _named(ctx, concepts):
    return {tuple(frozenset(ctx.label_list(i, z)) for i, z in enumerate(c.components))
            for c in concepts}


def test_readers_has_nine_concepts(readers):
    concepts = mine_dyadic_concepts(readers)
    assert len(concepts) == 9
    named = _named(readers, concepts)
    for ext, intent in [({"Kate", "Mike"}, {"Romeo and Juliet"}),
                        ({"Alex", "David"}, {"The Puppet Masters", "Ubik"}),
                        ({"Kate", "David"}, {"Ivanhoe"}),
                        ({"Mike", "Alex", "David"}, {"Ubik"})]:
        assert (frozenset(ext), frozenset(intent)) in named


def test_empty_relation_has_two_boundary_concepts():
    ctx = NContext([], [["a", "b"], ["x", "y", "z"]])
    concepts = mine_dyadic_concepts(ctx)
    assert {c.components for c in concepts} == {
        (frozenset({0, 1}), frozenset()), (frozenset(), frozenset({0, 1, 2}))}


def test_women_concept_counts(women):
    concepts = mine_dyadic_concepts(women)
    # 65 proper concepts plus top and bottom
    assert sum(c.is_proper() for c in concepts) == 65
    assert len(concepts) == 67


def test_concepts_are_closed_and_distinct(women):
    concepts = mine_dyadic_concepts(women)
    assert len({c.components for c in concepts}) == len(concepts)
    for c in concepts:
        assert oracles.derive_objects(women, c.extent) == c.intent
        assert oracles.derive_attributes(women, c.intent) == c.extent


def test_lectic_order_of_intents(women):
    concepts = mine_dyadic_concepts(women)
    n = women.sizes[1]
    keys = [tuple(m in c.intent for m in range(n)) for c in concepts]
    assert keys == sorted(keys)


@pytest.mark.parametrize("seed", range(40))
def test_dyadic_miner_matches_subset_closure(seed):
    rng = random.Random(seed)
    sizes = (rng.randint(1, 8), rng.randint(1, 8))
    ctx = oracles.random_context(rng, sizes, rng.random())
    got = {c.components for c in mine_dyadic_concepts(ctx)}
    assert got == oracles.dyadic_concepts(ctx)


def test_dyadic_size_guard():
    ctx = NContext([(0, 0)], [[f"g{i}" for i in range(70)], [f"m{i}" for i in range(70)]])
    with pytest.raises(SizeGuardError):
        mine_dyadic_concepts(ctx)
    assert len(mine_dyadic_concepts(ctx, override=True)) == 3


def test_toybib_triconcepts(toybib):
    concepts = mine_nadic_concepts_bruteforce(toybib)
    got = _named(toybib, concepts)
    communities = {
        (frozenset({"u2", "u4"}), frozenset({"t1", "t2"}), frozenset({"p1"})),
        (frozenset({"u1", "u3"}), frozenset({"t2", "t3"}), frozenset({"p3"})),
        (frozenset({"u1", "u2", "u3", "u4"}), frozenset({"t2"}), frozenset({"p2"})),
    }
    assert communities <= got
    # the shared tag t2 also yields two mixed-resource triconcepts
    assert got - communities == {
        (frozenset({"u1", "u3"}), frozenset({"t2"}), frozenset({"p2", "p3"})),
        (frozenset({"u2", "u4"}), frozenset({"t2"}), frozenset({"p1", "p2"})),
    }
    assert {c.components for c in concepts} == oracles.nadic_concepts(toybib)


def test_full_relation_is_one_concept():
    ctx = NContext([(a, b, c) for a in range(2) for b in range(3) for c in range(2)],
                   [["a0", "a1"], ["b0", "b1", "b2"], ["c0", "c1"]])
    concepts = mine_nadic_concepts_bruteforce(ctx)
    assert [c.components for c in concepts] == [(ctx.universe(0), ctx.universe(1), ctx.universe(2))]


@pytest.mark.parametrize("seed", range(30))
def test_nadic_miner_matches_maximal_box_oracle(seed):
    rng = random.Random(100 + seed)
    sizes = tuple(rng.randint(1, 3) for _ in range(3))
    ctx = oracles.random_context(rng, sizes, rng.uniform(0.2, 0.9))
    got = {c.components for c in mine_nadic_concepts_bruteforce(ctx)}
    assert got == oracles.nadic_concepts(ctx)


@pytest.mark.parametrize("seed", range(20))
def test_nadic_miner_on_dyadic_input_gives_proper_concepts(seed):
    rng = random.Random(200 + seed)
    ctx = oracles.random_context(rng, (rng.randint(1, 7), rng.randint(1, 7)), rng.random())
    proper = {c.components for c in mine_dyadic_concepts(ctx) if c.is_proper()}
    assert {c.components for c in mine_nadic_concepts_bruteforce(ctx)} == proper


def test_nadic_size_guard():
    ctx = NContext([(0, 0, 0)], [[str(i) for i in range(13)], ["x"], ["y"]])
    with pytest.raises(SizeGuardError):
        mine_nadic_concepts_bruteforce(ctx)


def test_concept_covered(women):
    c1 = women.box([f"w{i}" for i in (0, 1, 2, 3, 5, 6, 7)], ["e5", "e7"])
    b1 = women.box([f"w{i}" for i in (0, 1, 2, 3, 5, 6, 7, 8)], ["e2", "e4", "e5", "e7"])
    assert concept_covered(NConcept(c1), b1)
    assert not concept_covered(NConcept(b1), c1)
    assert concept_covered(c1, c1)
    with pytest.raises(ArityError):
        concept_covered(c1, (c1[0],))


def test_karate_cliques(karate):
    cliques = concept_cliques(karate)
    named = {frozenset(karate.label_list(0, c)) for c in cliques}
    for q in ({"0", "1", "2", "3", "7"}, {"0", "1", "2", "3", "13"}, {"32", "33", "29", "23"}):
        assert frozenset(q) in named


def test_triangle_has_one_clique():
    ctx = graph_to_context(SimpleGraph("abc", [("a", "b"), ("b", "c"), ("a", "c")]))
    assert concept_cliques(ctx) == [frozenset({0, 1, 2})]


def test_cliques_need_reflexive_symmetric_encoding():
    g = SimpleGraph("abc", [("a", "b")])
    with pytest.raises(EncodingError):
        concept_cliques(graph_to_context(g, "irreflexive"))
    with pytest.raises(EncodingError):
        concept_cliques(NContext([(0, 1), (0, 0), (1, 1)], [["a", "b"], ["a", "b"]]))


@pytest.mark.parametrize("seed", range(40))
def test_cliques_match_networkx(seed):
    rng = random.Random(300 + seed)
    n = rng.randint(1, 12)
    edges = oracles.random_graph_edges(rng, n, rng.random())
    g = SimpleGraph(range(n), edges)
    ctx = graph_to_context(g, "reflexive")
    got = {frozenset(ctx.labels[0][x] for x in q) for q in concept_cliques(ctx)}
    ref = nx.Graph()
    ref.add_nodes_from(range(n))
    ref.add_edges_from(edges)
    assert got == {frozenset(q) for q in nx.find_cliques(ref)}
