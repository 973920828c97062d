from __future__ import annotations

import pytest

from graphrigidity.corpus import brute_force_corpus, corpus_gen, iter_corpus_with_named, kernels
from graphrigidity.iso import isomorphic
from graphrigidity.reconstruction import validate_hypotheses


@pytest.mark.parametrize("n, size", [(3, 1), (4, 3), (5, 7), (6, 17)])
def test_corpus_matches_brute_force(n, size):
    fast, slow = corpus_gen(n), brute_force_corpus(n)
    assert len(fast) == len(slow) == size
    for G in fast:
        assert sum(isomorphic(G, H)[0] for H in slow) == 1


def test_corpus_members_are_distinct_and_valid():
    C = corpus_gen(7)
    for i, G in enumerate(C):
        assert validate_hypotheses(G).passed
        assert list(G.vertices) == list(range(G.n_vertices))
        for H in C[:i]:
            assert not isomorphic(G, H)[0]


def test_kernels_have_minimum_degree_three():
    for K in kernels(7):
        assert K.min_degree() >= 3


def test_named_graphs_follow_corpus():
    names = [name for name, _ in iter_corpus_with_named(4)]
    assert names[:2] == ["corpus-000", "corpus-001"]
    assert {"K4", "petersen", "theta"} <= set(names)
    assert "bowtie" not in names
