from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rota.errors import DimensionMismatch, EmptyList, TooLarge
from rota.field import FieldSpec
from rota.linalg import (
    EchelonBasis,
    TSet,
    intersection_dim,
    is_dispersed,
    multiset_independent,
    rank,
)
from rota.sample import RngStream, TSpec, sample_family

from oracles import all_subspaces, dispersed_by_all_subspaces, naive_rank, span_set

F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)
F5 = FieldSpec.prime(5)
QQ = FieldSpec.exact()


def eb(field, vs, n):
    return EchelonBasis.from_vectors(field, vs, n)


def test_try_extend_examples():
    e = eb(F2, [(1, 0, 0)], 3)
    assert e.try_extend((1, 0, 0)) is None
    e2 = e.try_extend((0, 1, 0))
    assert e2 is not None and e2.dim == 2
    assert e.dim == 1  # unchanged
    f = eb(F2, [(1, 0, 1), (0, 1, 1)], 3)
    assert f.try_extend((1, 1, 0)) is None
    assert f.contains((1, 1, 0))


def test_try_extend_dimension_check():
    with pytest.raises(DimensionMismatch):
        eb(F2, [(1, 0)], 2).try_extend((1, 0, 0))


def test_rank_examples():
    assert rank([(1, 0), (0, 1), (1, 1)], F2) == 2
    assert rank([], F2, 3) == 0
    fam = sample_family(TSpec.full(F2, 40), RngStream(5))
    row = fam.rows[7]
    assert rank(row, F2) == 40 == naive_rank(row.tolist(), 2)


def test_rank_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        rank([(1, 0), (1, 0, 0)], F2)
    with pytest.raises(DimensionMismatch):
        multiset_independent([(1, 0)], F2, 3)


def test_multiset_independent_examples():
    assert not multiset_independent([(1, 0), (1, 0)], F2)
    assert multiset_independent(np.eye(6, dtype=int), F3)
    assert not multiset_independent([(1, 0), (0, 1), (1, 1)], F2)


@pytest.mark.parametrize("field", [F2, F3, F5, FieldSpec.prime(7919), QQ])
def test_rank_agrees_with_textbook_elimination(field):
    rng = random.Random(field.p or 0)
    lo, hi = (0, field.p - 1) if field.p else (-3, 3)
    for _ in range(150):
        k, n = rng.randint(1, 9), rng.randint(1, 9)
        rows = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(k)]
        if rng.random() < 0.3 and k > 1:
            rows[-1] = list(rows[0])
        want = naive_rank(rows, field.p)
        assert rank(rows, field, n) == want
        assert eb(field, rows, n).dim == want


def test_gf2_rank_wide_vectors():
    rng = np.random.default_rng(3)
    for n in (63, 64, 65, 130):
        A = rng.integers(0, 2, size=(n + 5, n))
        A[3] = A[1] ^ A[2]
        assert rank(A, F2) == naive_rank(A.tolist(), 2)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_incremental_equals_one_shot(data):
    field = data.draw(st.sampled_from([F2, F3, F5, QQ]))
    n = data.draw(st.integers(1, 6))
    lo, hi = (0, field.p - 1) if field.p else (-2, 2)
    rows = data.draw(st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), max_size=8))
    e = EchelonBasis.empty(field, n)
    for v in rows:
        nxt = e.try_extend(v)
        if nxt is not None:
            assert nxt.dim == e.dim + 1
            e = nxt
    assert e.dim == rank(rows, field, n)
    for v in rows:
        assert e.contains(v)


def test_full_extension_spans_everything():
    rng = np.random.default_rng(0)
    e = EchelonBasis.empty(F3, 5)
    while e.dim < 5:
        e = e.try_extend(rng.integers(0, 3, 5)) or e
    for v in itertools.product(range(3), repeat=5):
        assert e.contains(v)


def test_canonical_form_is_span_invariant():
    a = eb(F5, [(1, 2, 0), (0, 1, 3)], 3)
    b = eb(F5, [(1, 3, 3), (2, 4, 0)], 3)
    assert a == b and hash(a) == hash(b)
    q1 = eb(QQ, [(2, 4, 0), (0, 3, 3)], 3)
    q2 = eb(QQ, [(1, 3, 1), (1, 2, 0)], 3)
    assert q1 == q2


def test_intersection_examples():
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    assert intersection_dim([eb(F2, [e1, e2], 3), eb(F2, [e2, e3], 3)]) == 1
    assert intersection_dim([eb(F2, [e1], 3)]) == 1
    assert intersection_dim([eb(F2, [e1, e2], 3), eb(F2, [e3], 3)]) == 0
    with pytest.raises(EmptyList):
        intersection_dim([])
    with pytest.raises(DimensionMismatch):
        intersection_dim([eb(F2, [e1], 3), eb(F2, [(1, 0)], 2)])


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (2, 4)])
def test_intersection_against_point_sets(p, n):
    field = FieldSpec.prime(p)
    rng = random.Random(p * 10 + n)
    for _ in range(80):
        gens = [
            [tuple(rng.randrange(p) for _ in range(n)) for _ in range(rng.randint(0, n))]
            for _ in range(rng.randint(1, 3))
        ]
        common = frozenset.intersection(*(span_set(g, p, n) for g in gens))
        want = round(np.log(len(common)) / np.log(p))
        spaces = [eb(field, g, n) for g in gens]
        assert intersection_dim(spaces) == want
        assert intersection_dim(spaces[::-1]) == want


def test_rational_intersection():
    a = eb(QQ, [(1, 1, 0), (0, 1, 1)], 3)
    b = eb(QQ, [(1, 0, 0), (0, 0, 1)], 3)
    # the two planes meet in the line through (1, 0, -1)
    assert intersection_dim([a, b]) == 1
    assert a.intersect(b).contains((1, 0, -1))


# ------------------------------------------------------------- dispersedness


def test_dispersed_examples():
    t01 = TSet.of([(0, 0), (0, 1), (1, 0), (1, 1)])
    assert is_dispersed(t01, Fraction(1, 2), F5).dispersed
    line = TSet.of([(1, 0), (2, 0), (3, 0), (4, 0)])
    rep = is_dispersed(line, Fraction(1, 2), F5)
    assert not rep.dispersed
    w = rep.witness
    assert w.dim == 1 and w.count == 4 and w.bound == 2
    assert eb(F5, w.generators, 2) == eb(F5, [(1, 0)], 2)
    full = TSet.of(list(itertools.product(range(2), repeat=2)))
    assert is_dispersed(full, Fraction(1, 2), F2).dispersed


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2)])
def test_dispersed_matches_all_subspace_enumeration(p, n):
    field = FieldSpec.prime(p)
    vecs = list(itertools.product(range(p), repeat=n))
    rng = random.Random(p + n)
    assert len(all_subspaces(p, n)) == (16 if (p, n) == (2, 3) else 6)
    for _ in range(120):
        t = rng.sample(vecs, rng.randint(1, len(vecs)))
        c = Fraction(rng.randint(1, 5), 6)
        got = is_dispersed(TSet.of(t), c, field).dispersed
        assert got == dispersed_by_all_subspaces(t, c, p, n), (t, c)


def test_dispersed_budget():
    t = TSet.of(list(itertools.product(range(3), repeat=3)))
    with pytest.raises(TooLarge):
        is_dispersed(t, Fraction(1, 3), F3, budget=50)


def test_tset_rejects_duplicates():
    with pytest.raises(ValueError):
        TSet.of([(1, 0), (1, 0)])
