"""Transversal-basis decomposition by bipartite matching.

Each ordered basis row is cut at ``n'``: ``X_h`` collects the first ``n'``
bases' vectors at position ``h`` and ``Y_j`` the remaining bases' vectors at
position ``j``. Left vertex ``h`` and right vertex ``j`` are adjacent iff
``X_h ∪ Y_j`` is independent, so a perfect matching yields ``r`` disjoint
transversal bases covering every vector exactly once.

Indices are 0-based in Python objects and 1-based in JSON.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .errors import BadSplitPoint, TooLarge
from .linalg import EchelonBasis, intersection_dim, rank
from .matching import hall_violator, hopcroft_karp
from .sample import BasisFamily, RngStream

RETRY_LABEL = 0x5E7
DEFAULT_RETRIES = 3


@dataclass(frozen=True)
class SplitView:
    family: BasisFamily
    n_prime: int

    @property
    def r(self) -> int:
        return self.family.r

    @property
    def m(self) -> int:
        return self.family.r

    def X(self, h: int) -> np.ndarray:
        """``(n', n)`` array: position ``h`` of bases ``0..n'-1``."""
        return self.family.rows[: self.n_prime, h]

    def Y(self, j: int, k: int = 0) -> np.ndarray:
        """Position ``j`` of bases ``n'..r-1``, dropping the last ``k`` (the truncation Y_j^(k))."""
        return self.family.rows[self.n_prime : self.r - k, j]


def split(fam: BasisFamily, n_prime: int | None = None) -> SplitView:
    r = fam.r
    allowed = {r // 2, (r + 1) // 2}
    if n_prime is None:
        n_prime = r // 2
    if n_prime not in allowed:
        raise BadSplitPoint(f"n' must be one of {sorted(allowed)} for r = {r}, got {n_prime}")
    return SplitView(fam, n_prime)


@dataclass
class IndependenceGraph:
    """Bipartite graph; ``adj[a, b]`` joins left ``left_ids[a]`` to right ``right_ids[b]``."""

    adj: np.ndarray
    left_ids: tuple[int, ...]
    right_ids: tuple[int, ...]

    @classmethod
    def from_matrix(cls, adj) -> IndependenceGraph:
        adj = np.asarray(adj, dtype=bool)
        return cls(adj, tuple(range(adj.shape[0])), tuple(range(adj.shape[1])))

    @property
    def m_left(self) -> int:
        return self.adj.shape[0]

    @property
    def m_right(self) -> int:
        return self.adj.shape[1]

    def adjacency_lists(self) -> list[list[int]]:
        return [np.flatnonzero(row).tolist() for row in self.adj]

    def edges(self) -> list[tuple[int, int]]:
        return [(self.left_ids[a], self.right_ids[b]) for a, b in zip(*np.nonzero(self.adj))]


def _python_graph(sv: SplitView, ids: Sequence[int]) -> np.ndarray:
    fam = sv.family
    adj = np.zeros((len(ids), len(ids)), dtype=bool)
    for a, h in enumerate(ids):
        e = EchelonBasis.from_vectors(fam.field, sv.X(h).tolist(), fam.n)
        if e.dim < sv.n_prime:
            continue
        for b, j in enumerate(ids):
            cur = e
            for v in sv.Y(j).tolist():
                cur = cur.try_extend(v)
                if cur is None:
                    break
            adj[a, b] = cur is not None
    return adj


def build_graph(
    sv: SplitView, restrict: tuple[int, int] | None = None, backend: str = "auto"
) -> IndependenceGraph:
    """Independence graph on positions ``restrict = (start, stop)`` (default: all).

    ``backend="python"`` forces the generic echelon path; ``"auto"`` uses the
    bit-packed kernel for GF(2) and the dense kernel for other small primes.
    """
    fam = sv.family
    start, stop = restrict if restrict is not None else (0, fam.r)
    ids = tuple(range(start, stop))
    p = fam.field.p
    k1, k2 = sv.n_prime, fam.r - sv.n_prime
    if not ids:
        adj = np.zeros((0, 0), dtype=bool)
    elif backend == "python" or p is None or k1 == 0 or k2 == 0 or p >= K.MAX_DENSE_P:
        adj = _python_graph(sv, ids)
    elif p == 2 and k1 + k2 == fam.n:
        P = fam.packed
        X = np.ascontiguousarray(P[:k1, start:stop].transpose(1, 0, 2))
        Y = np.ascontiguousarray(P[k1:, start:stop].transpose(1, 0, 2))
        adj = K.gf2_graph(X, Y, fam.n)
    else:
        R = fam.rows.astype(np.int64)
        X = np.ascontiguousarray(R[:k1, start:stop].transpose(1, 0, 2))
        Y = np.ascontiguousarray(R[k1:, start:stop].transpose(1, 0, 2))
        adj = K.gfp_graph(X, Y, p)
    return IndependenceGraph(np.asarray(adj, dtype=bool), ids, ids)


def max_matching(g: IndependenceGraph) -> list[tuple[int, int]]:
    """Maximum-cardinality matching as ``(left_id, right_id)`` pairs."""
    match_l, _ = hopcroft_karp(g.adjacency_lists(), g.m_right)
    return [(g.left_ids[a], g.right_ids[b]) for a, b in enumerate(match_l) if b >= 0]


@dataclass(frozen=True)
class DegreeStats:
    min_left: int
    min_right: int
    density: float
    left: tuple[int, ...]
    right: tuple[int, ...]


def degree_stats(g: IndependenceGraph) -> DegreeStats:
    left = g.adj.sum(axis=1).astype(int)
    right = g.adj.sum(axis=0).astype(int)
    cells = g.m_left * g.m_right
    return DegreeStats(
        int(left.min()) if len(left) else 0,
        int(right.min()) if len(right) else 0,
        float(g.adj.sum() / cells) if cells else 0.0,
        tuple(left.tolist()),
        tuple(right.tolist()),
    )


# ---------------------------------------------------------------- results


@dataclass
class Decomposition:
    """``classes[k]`` lists ``(i, j)``: basis ``i`` contributes its position ``j``."""

    classes: list[list[tuple[int, int]]]

    def to_json(self) -> dict:
        return {"classes": [[[i + 1, j + 1] for i, j in cls] for cls in self.classes]}

    @classmethod
    def from_json(cls, obj: dict) -> Decomposition:
        return cls([[(int(i) - 1, int(j) - 1) for i, j in c] for c in obj["classes"]])

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass
class Diagnostics:
    """What one matching attempt saw. ``stage`` names the graph that failed, if any."""

    attempt: int
    mode: str
    n_prime: int
    degrees_left: list[int]
    degrees_right: list[int]
    density: float
    matching_size: int
    stage: str | None = None
    deficient_set: list[int] = dc_field(default_factory=list)
    deficient_neighborhood: list[int] = dc_field(default_factory=list)
    bad_pairs: list | None = None

    @property
    def ok(self) -> bool:
        return self.stage is None

    @property
    def deficiency(self) -> int:
        return len(self.deficient_set) - len(self.deficient_neighborhood)

    def to_json(self) -> dict:
        out = {
            "attempt": self.attempt,
            "mode": self.mode,
            "n_prime": self.n_prime,
            "degrees_left": self.degrees_left,
            "degrees_right": self.degrees_right,
            "min_degree_left": min(self.degrees_left, default=0),
            "min_degree_right": min(self.degrees_right, default=0),
            "density": self.density,
            "matching_size": self.matching_size,
            "failed_stage": self.stage,
        }
        if self.deficient_set:
            out["deficient_set"] = [h + 1 for h in self.deficient_set]
            out["deficient_neighborhood"] = [j + 1 for j in self.deficient_neighborhood]
        if self.bad_pairs is not None:
            out["bad_pairs"] = [b.to_json() for b in self.bad_pairs]
        return out


@dataclass
class DecomposeResult:
    success: bool
    decomposition: Decomposition | None
    attempts: list[Diagnostics]

    @property
    def first_attempt_success(self) -> bool:
        return self.attempts[0].ok

    @property
    def retries_used(self) -> int:
        return len(self.attempts) - 1

    @property
    def diagnostics(self) -> Diagnostics:
        return self.attempts[-1]

    def to_json(self) -> dict:
        out = {"success": self.success, "diagnostics": [d.to_json() for d in self.attempts]}
        if self.decomposition is not None:
            out.update(self.decomposition.to_json())
        return out


@dataclass
class VerifyReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations}


def verify(fam: BasisFamily, d: Decomposition) -> VerifyReport:
    """Check a decomposition against the family, sharing no code with the matcher.

    (a) each basis uses every position exactly once over all classes,
    (b) each class takes exactly one vector from every basis,
    (c) each class is a basis (rank r).
    """
    r = fam.r
    bad = []
    if len(d.classes) != r:
        bad.append(f"expected {r} classes, found {len(d.classes)}")
    used = [[0] * r for _ in range(r)]
    for k, cls in enumerate(d.classes):
        bases = [i for i, _ in cls]
        if sorted(bases) != list(range(r)):
            bad.append(f"(b) class {k + 1} does not take exactly one vector from each basis")
        in_range = [(i, j) for i, j in cls if 0 <= i < r and 0 <= j < r]
        if len(in_range) != len(cls):
            bad.append(f"class {k + 1} has out-of-range indices")
        for i, j in in_range:
            used[i][j] += 1
        if len(cls) == r and len(in_range) == r:
            vecs = np.stack([fam.rows[i, j] for i, j in in_range])
            if rank(vecs, fam.field) != r:
                bad.append(f"(c) class {k + 1} is not a basis")
        else:
            bad.append(f"(c) class {k + 1} has {len(cls)} vectors, a basis needs {r}")
    for i in range(r):
        if any(c != 1 for c in used[i]):
            bad.append(f"(a) basis {i + 1} positions are not used exactly once")
    return VerifyReport(bad)


# ------------------------------------------------------------ decompose


def _attempt(fam: BasisFamily, n_prime: int, mode: str, attempt: int):
    sv = split(fam, n_prime)
    r = fam.r
    if mode == "full":
        stages = [("full", (0, r))]
    elif mode == "halves":
        stages = [("top", (0, n_prime)), ("bottom", (n_prime, r))]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    pairs, deg_l, deg_r, edges, cells = [], [], [], 0, 0
    diag = None
    for name, rng_ in stages:
        g = build_graph(sv, rng_)
        stats = degree_stats(g)
        deg_l += stats.left
        deg_r += stats.right
        edges += int(g.adj.sum())
        cells += g.m_left * g.m_right
        adj = g.adjacency_lists()
        match_l, match_r = hopcroft_karp(adj, g.m_right)
        pairs += [(g.left_ids[a], g.right_ids[b]) for a, b in enumerate(match_l) if b >= 0]
        if diag is None and any(b < 0 for b in match_l):
            z, nz = hall_violator(adj, match_l, match_r)
            diag = (name, [g.left_ids[a] for a in z], [g.right_ids[b] for b in nz])
    out = Diagnostics(
        attempt=attempt,
        mode=mode,
        n_prime=n_prime,
        degrees_left=list(deg_l),
        degrees_right=list(deg_r),
        density=edges / cells if cells else 0.0,
        matching_size=len(pairs),
    )
    if diag is not None:
        out.stage, out.deficient_set, out.deficient_neighborhood = diag
        return out, None
    return out, pairs


def decompose(
    fam: BasisFamily,
    mode: str = "full",
    n_prime: int | None = None,
    retries: int = DEFAULT_RETRIES,
    rng: RngStream | int | None = None,
) -> DecomposeResult:
    """Find ``r`` transversal bases by perfect matching on the independence graph.

    ``mode="full"`` matches the whole graph; ``"halves"`` needs perfect
    matchings on positions ``[0, n')`` and ``[n', r)`` separately. After a
    failure each row's order is re-drawn uniformly at random (the bases
    themselves are untouched) up to ``retries`` times. A returned success has
    already passed :func:`verify`.
    """
    if retries < 0:
        raise ValueError("retries must be non-negative")
    r = fam.r
    n_prime = split(fam, n_prime).n_prime
    if rng is None:
        rng = RngStream(fam.seed or 0, fam.label + (RETRY_LABEL,))
    elif not isinstance(rng, RngStream):
        rng = RngStream(int(rng))
    perms = np.tile(np.arange(r), (r, 1))
    current = fam
    history = []
    for attempt in range(retries + 1):
        if attempt:
            perms = np.stack([rng.gen.permutation(r) for _ in range(r)])
            current = fam.permuted(perms)
        diag, pairs = _attempt(current, n_prime, mode, attempt)
        history.append(diag)
        if pairs is None:
            continue
        classes = []
        for h, j in sorted(pairs):
            cls = [(i, int(perms[i, h])) for i in range(n_prime)]
            cls += [(i, int(perms[i, j])) for i in range(n_prime, r)]
            classes.append(cls)
        d = Decomposition(classes)
        report = verify(fam, d)
        if not report.ok:
            raise RuntimeError(f"matching produced an invalid decomposition: {report.violations}")
        return DecomposeResult(True, d, history)
    return DecomposeResult(False, None, history)


# ------------------------------------------------------------- bad pairs


@dataclass(frozen=True)
class BadPair:
    H: tuple[int, ...]
    j: int
    k: int
    dim: int

    def to_json(self) -> dict:
        return {"H": [h + 1 for h in self.H], "j": self.j + 1, "k": self.k, "dim": self.dim}


def bad_pairs(
    sv: SplitView,
    L_max: int,
    K_max: int,
    m: int | None = None,
    budget: int = 10**6,
) -> list[BadPair]:
    """All ``(H, j, k)`` with ``dim ∩_{h∈H} span(X_h ∪ Y_j^(k)) > r - k|H|``.

    ``H`` ranges over subsets of the first ``m`` positions (default ``n'``)
    with ``1 <= |H| <= L_max``, ``j < m`` and ``1 <= k <= K_max``. Each subspace
    intersection costs one unit of ``budget``.
    """
    fam = sv.family
    r = fam.r
    if m is None:
        m = sv.n_prime
    if K_max > r - sv.n_prime:
        raise ValueError(f"k can be at most |Y_j| = {r - sv.n_prime}")
    work = sum(
        len(list(itertools.combinations(range(m), s))) for s in range(1, L_max + 1)
    ) * m * K_max
    if work > budget:
        raise TooLarge(f"bad-pair scan needs {work} intersections, budget is {budget}")
    found = []
    for j in range(m):
        for k in range(1, K_max + 1):
            tail = sv.Y(j, k).tolist()
            spans = [
                EchelonBasis.from_vectors(fam.field, sv.X(h).tolist() + tail, fam.n)
                for h in range(m)
            ]
            for size in range(1, L_max + 1):
                for H in itertools.combinations(range(m), size):
                    d = intersection_dim([spans[h] for h in H])
                    if d > r - k * size:
                        found.append(BadPair(H, j, k, d))
    return found
