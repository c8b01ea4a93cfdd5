from __future__ import annotations

import itertools

import numpy as np
import pytest

from rota.decompose import decompose, verify
from rota.errors import TooLarge
from rota.exact import (
    FOUND,
    INDETERMINATE,
    NONE_EXISTS,
    SearchBudget,
    enumerate_ordered_bases,
    oracle_decompose,
)
from rota.field import FieldSpec
from rota.sample import BasisFamily, RngStream, TSpec, sample_family

from oracles import cayley_trees, naive_rank, vector_to_edge

F2 = FieldSpec.prime(2)
F5 = FieldSpec.prime(5)


def test_identity_n3_found():
    res = oracle_decompose(BasisFamily.identity(F2, 3))
    assert res.status == FOUND
    assert verify(BasisFamily.identity(F2, 3), res.decomposition).ok


def test_small_example_found():
    fam = BasisFamily(F2, np.array([[[1, 0], [0, 1]], [[1, 0], [1, 1]]]))
    res = oracle_decompose(fam)
    assert res.found
    assert sorted(map(sorted, res.decomposition.classes)) == [[(0, 0), (1, 1)], [(0, 1), (1, 0)]]


def test_all_gf2_dim2_families():
    bases = enumerate_ordered_bases(TSpec.full(F2, 2))
    assert len(bases) == 6
    for a, b in itertools.product(bases, repeat=2):
        fam = BasisFamily(F2, np.array([a, b]))
        res = oracle_decompose(fam)
        assert res.status == FOUND
        assert verify(fam, res.decomposition).ok


def test_none_exists_when_no_transversal_basis():
    # not a valid family (rows are dependent) but exercises the exhaustion path
    fam = BasisFamily(F2, np.array([[[1, 0], [1, 0]], [[1, 0], [1, 0]]]))
    assert oracle_decompose(fam).status == NONE_EXISTS


def test_budget_gives_indeterminate():
    fam = sample_family(TSpec.full(F2, 4), RngStream(0))
    res = oracle_decompose(fam, SearchBudget(node_limit=3))
    assert res.status == INDETERMINATE and res.decomposition is None


def test_oracle_agrees_with_construction():
    for seed in range(40):
        fam = sample_family(TSpec.full(F2, 4), RngStream(seed))
        res = oracle_decompose(fam)
        assert res.status == FOUND
        if decompose(fam).success:
            assert res.found


def test_enumeration_examples():
    assert len(enumerate_ordered_bases(TSpec.full(F2, 2))) == 6
    assert len(enumerate_ordered_bases(TSpec.entry_set(F5, 2, [0, 1]))) == 6
    g = enumerate_ordered_bases(TSpec.graphic(3))
    assert len(g) == 6
    trees = {frozenset(vector_to_edge(v) for v in tup) for tup in g}
    assert trees == set(cayley_trees(3))
    with pytest.raises(TooLarge):
        enumerate_ordered_bases(TSpec.full(F2, 6), budget=1000)


def test_enumeration_counts_against_formula():
    # ordered bases of GF(p)^n number prod (p^n - p^i)
    for p, n in [(2, 3), (3, 2)]:
        want = 1
        for i in range(n):
            want *= p**n - p**i
        got = enumerate_ordered_bases(TSpec.full(FieldSpec.prime(p), n))
        assert len(got) == want
        assert all(naive_rank(t, p) == n for t in got)
