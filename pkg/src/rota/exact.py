"""Brute-force ground truth for tiny instances.

These searches are meant to be obviously correct rather than fast; they
validate the matching-based construction and the samplers.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import lru_cache

from .decompose import Decomposition, IndependenceGraph
from .errors import TooLarge
from .linalg import EchelonBasis, multiset_independent
from .sample import ENUMERATION_BUDGET, BasisFamily, TSpec, t_enumerate

FOUND = "found"
NONE_EXISTS = "none"
INDETERMINATE = "indeterminate"

MAX_ORACLE_MATCHING = 10


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int = 10**7
    time_limit: float | None = None


@dataclass
class OracleResult:
    status: str
    decomposition: Decomposition | None
    nodes: int

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_json(self) -> dict:
        out = {"status": self.status, "nodes": self.nodes}
        if self.decomposition is not None:
            out.update(self.decomposition.to_json())
        return out


class _OutOfBudget(Exception):
    pass


def oracle_decompose(fam: BasisFamily, budget: SearchBudget | None = None) -> OracleResult:
    """Decide exactly whether the family splits into ``r`` transversal bases.

    Classes are filled one at a time; class ``k`` always starts with position
    ``k`` of basis 0, which removes the ordering symmetry of the classes. A
    partial class is abandoned as soon as it becomes dependent.
    """
    budget = budget or SearchBudget()
    r = fam.r
    vecs = [[fam.vector(i, j) for j in range(r)] for i in range(r)]
    used = [[False] * r for _ in range(r)]
    chosen: list[list[tuple[int, int]]] = [[] for _ in range(r)]
    deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > budget.node_limit:
            raise _OutOfBudget
        if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
            raise _OutOfBudget

    def fill(k: int, i: int, span: EchelonBasis) -> bool:
        tick()
        if k == r:
            return True
        if i == r:
            return fill(k + 1, 1, _start(k + 1))
        for j in range(r):
            if used[i][j]:
                continue
            nxt = span.try_extend(vecs[i][j])
            if nxt is None:
                continue
            used[i][j] = True
            chosen[k].append((i, j))
            if fill(k, i + 1, nxt):
                return True
            chosen[k].pop()
            used[i][j] = False
        return False

    def _start(k: int) -> EchelonBasis | None:
        if k == r:
            return None
        chosen[k] = [(0, k)]
        used[0][k] = True
        return EchelonBasis.from_vectors(fam.field, [vecs[0][k]], fam.n)

    if r == 0:
        return OracleResult(FOUND, Decomposition([]), 0)
    try:
        ok = fill(0, 1, _start(0))
    except _OutOfBudget:
        return OracleResult(INDETERMINATE, None, nodes)
    if not ok:
        return OracleResult(NONE_EXISTS, None, nodes)
    return OracleResult(FOUND, Decomposition([list(c) for c in chosen]), nodes)


def oracle_matching(g: IndependenceGraph) -> int:
    """Maximum matching size by exhaustive search over used-right-vertex sets."""
    if max(g.m_left, g.m_right) > MAX_ORACLE_MATCHING:
        raise TooLarge(f"oracle matching is limited to m <= {MAX_ORACLE_MATCHING}")
    nbrs = [tuple(int(b) for b in row.nonzero()[0]) for row in g.adj]

    @lru_cache(maxsize=None)
    def best(i: int, mask: int) -> int:
        if i == len(nbrs):
            return 0
        out = best(i + 1, mask)
        for b in nbrs[i]:
            if not mask >> b & 1:
                out = max(out, 1 + best(i + 1, mask | 1 << b))
        return out

    return best(0, 0)


def enumerate_ordered_bases(
    spec: TSpec, budget: int = ENUMERATION_BUDGET
) -> list[tuple[tuple[int, ...], ...]]:
    """Every ordered ``r``-tuple of elements of T that is a basis, in lexicographic order."""
    t = t_enumerate(spec, budget)
    r = spec.rank
    if len(t) ** r > budget:
        raise TooLarge(f"|T|^r = {len(t)}^{r} exceeds the enumeration budget {budget}")
    return [
        tup
        for tup in itertools.product(sorted(t.vectors), repeat=r)
        if multiset_independent(tup, spec.field, spec.n)
    ]
