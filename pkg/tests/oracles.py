"""Independent reference implementations used only by the test suite.

Everything here is written for obviousness, with no code shared with the
package: textbook elimination, brute-force subspace enumeration, permutation
matching, and union-find forests.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def naive_rank_mod_p(rows, p: int) -> int:
    """Textbook Gauss-Jordan elimination mod p on a copy of the rows."""
    M = [[int(a) % p for a in r] for r in rows]
    if not M:
        return 0
    rank, ncols = 0, len(M[0])
    for col in range(ncols):
        piv = None
        for r in range(rank, len(M)):
            if M[r][col]:
                piv = r
                break
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], p - 2, p)
        M[rank] = [(a * inv) % p for a in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                f = M[r][col]
                M[r] = [(a - f * b) % p for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def naive_rank_rational(rows) -> int:
    M = [[Fraction(a) for a in r] for r in rows]
    if not M:
        return 0
    rank, ncols = 0, len(M[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][col] != 0:
                f = M[r][col] / M[rank][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def naive_rank(rows, p: int | None) -> int:
    return naive_rank_rational(rows) if p is None else naive_rank_mod_p(rows, p)


def all_vectors(p: int, n: int):
    return [tuple(v) for v in itertools.product(range(p), repeat=n)]


def span_set(gens, p: int, n: int) -> frozenset:
    """All F_p-combinations of ``gens``."""
    out = {tuple([0] * n)}
    for g in gens:
        out = {tuple((a + c * b) % p for a, b in zip(v, g)) for v in out for c in range(p)}
    return frozenset(out)


def all_subspaces(p: int, n: int) -> dict[frozenset, int]:
    """Every subspace of F_p^n as a point set, mapped to its dimension."""
    vecs = all_vectors(p, n)
    found = {frozenset({tuple([0] * n)}): 0}
    frontier = list(found)
    while frontier:
        nxt = []
        for s in frontier:
            for v in vecs:
                if v in s:
                    continue
                bigger = frozenset(
                    tuple((a + c * b) % p for a, b in zip(u, v)) for u in s for c in range(p)
                )
                if bigger not in found:
                    found[bigger] = found[s] + 1
                    nxt.append(bigger)
        frontier = nxt
    return found


def dispersed_by_all_subspaces(T, c: Fraction, p: int, n: int) -> bool:
    T = set(map(tuple, T))
    return all(
        len(S & T) <= c ** (n - d) * len(T) for S, d in all_subspaces(p, n).items()
    )


def brute_matching(adj) -> int:
    """Largest matching by trying every injective assignment of left to right."""
    m_left = len(adj)
    m_right = len(adj[0]) if m_left else 0
    best = 0
    for size in range(min(m_left, m_right), 0, -1):
        for lefts in itertools.combinations(range(m_left), size):
            for rights in itertools.permutations(range(m_right), size):
                if all(adj[a][b] for a, b in zip(lefts, rights)):
                    return size
    return best


def is_spanning_tree(edges, v: int) -> bool:
    parent = list(range(v))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return len(edges) == v - 1 and len({find(x) for x in range(v)}) == 1


def vector_to_edge(vec) -> tuple[int, int]:
    nz = [i for i, a in enumerate(vec) if a]
    assert len(nz) == 2, vec
    return nz[0], nz[1]


def cayley_trees(v: int) -> list[frozenset]:
    """All spanning trees of K_v by exhaustive subset enumeration."""
    edges = list(itertools.combinations(range(v), 2))
    return [
        frozenset(s) for s in itertools.combinations(edges, v - 1) if is_spanning_tree(s, v)
    ]


def direct_product(c: Fraction, terms: int = 200) -> Fraction:
    """prod_{i <= terms} (1 - c^i) in rational arithmetic, rounded to 300 bits per step."""
    out = Fraction(1)
    for i in range(1, terms + 1):
        out *= 1 - c**i
        out = Fraction(round(out * 2**300), 2**300)
    return out
