"""Uniform random ordered bases drawn from an allowed vector set T.

Three samplers, each exact for its target distribution (uniform over ordered
independent r-tuples of T):

* full space  -- sequential: every new vector is uniform over F^n minus the
  current span (greedy scan of an i.i.d. uniform candidate stream);
* entry set / explicit -- rejection: r i.i.d. uniform draws from T, accepted
  iff independent;
* graphic     -- Wilson's uniform spanning tree of K_v, edges in uniformly
  random order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _kernels as K
from .errors import DimensionMismatch, RejectionBudgetExceeded, TooLarge
from .field import FieldSpec
from .linalg import EchelonBasis, TSet, rank

KINDS = ("full", "entries", "explicit", "graphic")
DEFAULT_REJECTION_BUDGET = 10_000
ENUMERATION_BUDGET = 2**22


@dataclass(frozen=True)
class TSpec:
    """Description of the allowed vector set T ⊆ F^n."""

    kind: str
    n: int
    field: FieldSpec
    entries: tuple[int, ...] = ()
    vectors: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown T kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension must be at least 1")
        p = self.field.p
        if self.kind == "full" and p is None:
            raise ValueError("full-space T needs a finite prime field")
        if self.kind == "entries":
            s = tuple(int(a) % p for a in self.entries) if p else tuple(map(int, self.entries))
            if len(s) < 2 or len(set(s)) != len(s):
                raise ValueError(f"entry set needs at least 2 distinct scalars, got {self.entries}")
            object.__setattr__(self, "entries", s)
        if self.kind == "explicit":
            t = TSet.of(self.vectors, self.field)
            if t.n != self.n:
                raise DimensionMismatch(f"explicit vectors have dimension {t.n}, expected {self.n}")
            object.__setattr__(self, "vectors", t.vectors)
            if rank(list(t.vectors), self.field, self.n) != self.n:
                raise ValueError("explicit T does not span F^n, so no basis inside T exists")
        if self.kind == "graphic":
            if p is not None:
                raise ValueError("graphic T requires exact-integer mode")
            if self.n < 2:
                raise ValueError("graphic T needs at least 2 vertices")

    @classmethod
    def full(cls, field: FieldSpec, n: int) -> TSpec:
        return cls("full", n, field)

    @classmethod
    def entry_set(cls, field: FieldSpec, n: int, entries) -> TSpec:
        return cls("entries", n, field, entries=tuple(entries))

    @classmethod
    def explicit(cls, field: FieldSpec, vectors) -> TSpec:
        vs = tuple(tuple(int(a) for a in v) for v in vectors)
        return cls("explicit", len(vs[0]), field, vectors=vs)

    @classmethod
    def graphic(cls, v: int) -> TSpec:
        return cls("graphic", v, FieldSpec.exact())

    @classmethod
    def parse(cls, text: str, field: FieldSpec, n: int | None = None) -> TSpec:
        """Parse ``full``, ``entries:<csv>``, ``file:<path>`` or ``graphic:<v>``."""
        kind, _, arg = text.partition(":")
        if kind == "full":
            return cls.full(field, _need_n(n))
        if kind == "entries":
            return cls.entry_set(field, _need_n(n), [int(a) for a in arg.split(",") if a.strip()])
        if kind == "graphic":
            return cls.graphic(int(arg) if arg else _need_n(n))
        if kind == "file":
            obj = json.loads(Path(arg).read_text())
            vectors = obj["vectors"] if isinstance(obj, dict) else obj
            spec = cls.explicit(field, vectors)
            if n is not None and spec.n != n:
                raise DimensionMismatch(f"file vectors have dimension {spec.n}, expected {n}")
            return spec
        raise ValueError(f"bad T spec {text!r}")

    @property
    def rank(self) -> int:
        """Size of a basis inside T: n, or v-1 for graphic T."""
        return self.n - 1 if self.kind == "graphic" else self.n

    def with_n(self, n: int) -> TSpec:
        if self.kind == "explicit":
            if n != self.n:
                raise DimensionMismatch("explicit T has a fixed dimension")
            return self
        return TSpec(self.kind, n, self.field, self.entries)

    def size(self) -> int:
        if self.kind == "full":
            return self.field.p**self.n
        if self.kind == "entries":
            return len(self.entries) ** self.n
        if self.kind == "explicit":
            return len(self.vectors)
        return self.n * (self.n - 1) // 2

    def contains(self, v) -> bool:
        v = [int(a) for a in v]
        if len(v) != self.n:
            return False
        p = self.field.p
        if self.kind == "full":
            return all(0 <= a < p for a in v)
        if self.kind == "entries":
            return all(a in self.entries for a in v)
        if self.kind == "explicit":
            return tuple(v) in set(self.vectors)
        nz = [a for a in v if a]
        return sorted(nz) == [-1, 1] and v.index(1) < v.index(-1)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        if self.kind == "entries":
            out["entries"] = list(self.entries)
        if self.kind == "explicit":
            out["vectors"] = [list(v) for v in self.vectors]
        return out

    @classmethod
    def from_json(cls, obj: dict, field: FieldSpec) -> TSpec:
        return cls(
            obj["kind"],
            int(obj["n"]),
            field,
            tuple(obj.get("entries", ())),
            tuple(tuple(v) for v in obj.get("vectors", ())),
        )


def _need_n(n):
    if n is None:
        raise ValueError("this T kind needs an explicit dimension n")
    return n


class RngStream:
    """Deterministic stream keyed by ``(seed, label)``.

    Children extend the label, so streams for different rows or trials never
    share state and do not depend on the order in which they are created.
    """

    def __init__(self, seed: int, label: tuple[int, ...] = ()):
        self.seed = int(seed) & (2**64 - 1)
        self.label = tuple(int(x) for x in label)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.label)
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, *label: int) -> RngStream:
        return RngStream(self.seed, self.label + tuple(label))

    def derive_seed(self, *label: int) -> int:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.label + tuple(label))
        return int(ss.generate_state(1, np.uint64)[0])

    def __repr__(self):
        return f"RngStream(seed={self.seed}, label={self.label})"


def _as_stream(rng) -> RngStream:
    return rng if isinstance(rng, RngStream) else RngStream(int(rng))


# -------------------------------------------------------------- T handling


def _graphic_vectors(v: int, edges) -> np.ndarray:
    out = np.zeros((len(edges), v), dtype=np.int64)
    for row, (i, j) in enumerate(edges):
        out[row, i] = 1
        out[row, j] = -1
    return out


def t_enumerate(spec: TSpec, budget: int = ENUMERATION_BUDGET) -> TSet:
    """Materialize T as an explicit deduplicated list."""
    size = spec.size()
    if size > budget:
        raise TooLarge(f"|T| = {size} exceeds the enumeration budget {budget}")
    if spec.kind == "full":
        alphabet = range(spec.field.p)
    elif spec.kind == "entries":
        alphabet = spec.entries
    elif spec.kind == "explicit":
        return TSet(spec.vectors, spec.n)
    else:
        edges = list(itertools.combinations(range(spec.n), 2))
        vs = _graphic_vectors(spec.n, edges)
        return TSet(tuple(tuple(int(a) for a in r) for r in vs), spec.n)
    vs = tuple(tuple(reversed(t)) for t in itertools.product(alphabet, repeat=spec.n))
    return TSet(vs, spec.n)


def _draw(spec: TSpec, gen: np.random.Generator, count: int) -> np.ndarray:
    """``count`` i.i.d. uniform vectors from T as a ``(count, n)`` int64 array."""
    n = spec.n
    if spec.kind == "full":
        return gen.integers(0, spec.field.p, size=(count, n), dtype=np.int64)
    if spec.kind == "entries":
        s = np.asarray(spec.entries, dtype=np.int64)
        return s[gen.integers(0, len(s), size=(count, n))]
    if spec.kind == "explicit":
        t = np.asarray(spec.vectors, dtype=np.int64)
        return t[gen.integers(0, len(t), size=count)]
    edges = list(itertools.combinations(range(n), 2))
    picks = gen.integers(0, len(edges), size=count)
    return _graphic_vectors(n, [edges[k] for k in picks])


def sample_vector(spec: TSpec, rng) -> tuple[int, ...]:
    """One uniform element of T."""
    return tuple(int(a) for a in _draw(spec, _as_stream(rng).gen, 1)[0])


def _greedy_independent(cands: np.ndarray, field: FieldSpec, target: int) -> np.ndarray:
    p = field.p
    if p == 2:
        return K.gf2_greedy(K.pack_gf2(cands), cands.shape[1], target)
    if p is not None and p < K.MAX_DENSE_P:
        return K.gfp_greedy(np.ascontiguousarray(cands), p, target)
    e = EchelonBasis.empty(field, cands.shape[1])
    picked = []
    for i, v in enumerate(cands.tolist()):
        if len(picked) == target:
            break
        bigger = e.try_extend(v)
        if bigger is not None:
            e = bigger
            picked.append(i)
    return np.asarray(picked, dtype=np.int64)


def _full_rank(A: np.ndarray, field: FieldSpec) -> bool:
    return rank(A, field) == A.shape[0]


def wilson_tree(v: int, rng) -> list[tuple[int, int]]:
    """Uniform spanning tree of the complete graph K_v by loop-erased random walks.

    Vertices are ``0..v-1``; edges are returned as ``(i, j)`` with ``i < j``.
    """
    if v < 1:
        raise ValueError("need at least one vertex")
    gen = _as_stream(rng).gen
    in_tree = [False] * v
    nxt = [-1] * v
    in_tree[0] = True
    for start in range(1, v):
        u = start
        while not in_tree[u]:
            # uniform neighbour of u in K_v
            w = int(gen.integers(0, v - 1))
            nxt[u] = w + (w >= u)
            u = nxt[u]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    return sorted((min(u, nxt[u]), max(u, nxt[u])) for u in range(1, v))


def _basis_tuple(spec: TSpec, stream: RngStream, budget: int) -> tuple[np.ndarray, int]:
    """One ordered basis tuple and the number of attempts it took."""
    gen = stream.gen
    r = spec.rank
    if spec.kind == "full":
        pool = _draw(spec, gen, r + 32)
        while True:
            idx = _greedy_independent(pool, spec.field, r)
            if len(idx) == r:
                return pool[idx], 1
            pool = np.concatenate([pool, _draw(spec, gen, r + 32)])
    if spec.kind == "graphic":
        edges = wilson_tree(spec.n, stream)
        order = gen.permutation(len(edges))
        return _graphic_vectors(spec.n, [edges[k] for k in order]), 1
    for attempt in range(1, budget + 1):
        cand = _draw(spec, gen, r)
        if _full_rank(cand, spec.field):
            return cand, attempt
    raise RejectionBudgetExceeded(budget, 0)


def sample_basis_tuple(spec: TSpec, rng, budget: int = DEFAULT_REJECTION_BUDGET) -> np.ndarray:
    """Uniform ordered basis tuple inside T, as an ``(r, n)`` array of rows."""
    return _basis_tuple(spec, _as_stream(rng), budget)[0]


def acceptance_rate(spec: TSpec, rng, trials: int) -> float:
    """Fraction of i.i.d. r-tuples from T that are independent (the rejection acceptance rate)."""
    gen = _as_stream(rng).gen
    hits = sum(_full_rank(_draw(spec, gen, spec.rank), spec.field) for _ in range(trials))
    return hits / trials


# ------------------------------------------------------------------ family


@dataclass(eq=False)
class BasisFamily:
    """``rows[i, j]`` is the j-th vector of the i-th ordered basis (0-based)."""

    field: FieldSpec
    rows: np.ndarray
    tspec: TSpec | None = None
    seed: int | None = None
    label: tuple[int, ...] = ()
    attempts: tuple[int, ...] = dc_field(default=(), repr=False)

    def __post_init__(self):
        rows = np.asarray(self.rows)
        if rows.ndim != 3 or rows.shape[0] != rows.shape[1]:
            raise DimensionMismatch(f"family rows must have shape (r, r, n), got {rows.shape}")
        if self.field.p is not None:
            rows = np.mod(rows, self.field.p)
        dtype = np.uint8 if self.field.p == 2 else np.int64
        self.rows = np.ascontiguousarray(rows.astype(dtype))

    @property
    def r(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[2]

    @cached_property
    def packed(self) -> np.ndarray:
        """GF(2) rows bit-packed, shape ``(r, r, words)``."""
        if self.field.p != 2:
            raise ValueError("bit packing only applies to GF(2)")
        return K.pack_gf2(self.rows)

    def vector(self, i: int, j: int) -> tuple[int, ...]:
        return tuple(int(a) for a in self.rows[i, j])

    def __eq__(self, other):
        return (
            isinstance(other, BasisFamily)
            and self.field == other.field
            and self.tspec == other.tspec
            and self.seed == other.seed
            and self.label == other.label
            and np.array_equal(self.rows, other.rows)
        )

    def problems(self) -> list[str]:
        """Invariant violations: dependent rows, or vectors outside T."""
        out = []
        for i in range(self.r):
            if rank(self.rows[i], self.field) != self.r:
                out.append(f"row {i} is not linearly independent")
        if self.tspec is not None:
            for i, j in itertools.product(range(self.r), repeat=2):
                if not self.tspec.contains(self.rows[i, j]):
                    out.append(f"vector ({i}, {j}) lies outside T")
        return out

    def permuted(self, perms) -> BasisFamily:
        """Reorder within rows: new position ``j`` of row ``i`` holds old position ``perms[i][j]``."""
        perms = np.asarray(perms)
        rows = np.stack([self.rows[i, perms[i]] for i in range(self.r)])
        return BasisFamily(self.field, rows, self.tspec, self.seed, self.label)

    def to_json(self, hex_rows: bool = False) -> dict:
        out = {
            "field": self.field.to_json(),
            "n": self.n,
            "rank": self.r,
            "tspec": self.tspec.to_json() if self.tspec else None,
            "seed": self.seed,
        }
        if self.label:
            out["label"] = list(self.label)
        if hex_rows:
            if self.field.p != 2:
                raise ValueError("hex export is only defined for GF(2)")
            out["rows_hex"] = [[_hex_vector(v) for v in row] for row in self.rows]
        else:
            out["rows"] = self.rows.astype(np.int64).tolist()
        return out

    def dumps(self, hex_rows: bool = False) -> str:
        return json.dumps(self.to_json(hex_rows), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict) -> BasisFamily:
        field = FieldSpec.from_json(obj["field"])
        n = int(obj["n"])
        if "rows_hex" in obj:
            rows = np.array(
                [[_unhex_vector(h, n) for h in row] for row in obj["rows_hex"]], dtype=np.uint8
            )
        else:
            rows = np.array(obj["rows"], dtype=np.int64)
            if rows.size == 0:
                rows = rows.reshape(0, 0, n)
        tspec = TSpec.from_json(obj["tspec"], field) if obj.get("tspec") else None
        return cls(field, rows, tspec, obj.get("seed"), tuple(obj.get("label", ())))

    @classmethod
    def loads(cls, text: str) -> BasisFamily:
        return cls.from_json(json.loads(text))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> BasisFamily:
        """Every row is the standard basis in order."""
        eye = np.eye(n, dtype=np.int64)
        return cls(field, np.broadcast_to(eye, (n, n, n)).copy())


def _hex_vector(v) -> str:
    x = 0
    for i, a in enumerate(v):
        if a:
            x |= 1 << i
    return format(x, "x")


def _unhex_vector(h: str, n: int) -> list[int]:
    x = int(h, 16)
    if x >> n:
        raise DimensionMismatch(f"hex vector {h} has bits beyond dimension {n}")
    return [(x >> i) & 1 for i in range(n)]


def sample_family(
    spec: TSpec, rng, count: int | None = None, budget: int = DEFAULT_REJECTION_BUDGET
) -> BasisFamily:
    """``count`` (default: the rank of T) independent ordered bases, row ``i`` from stream label ``i``."""
    stream = _as_stream(rng)
    r = spec.rank
    if count is not None and count != r:
        raise ValueError(f"a family for this T has exactly {r} bases, not {count}")
    rows, attempts = [], []
    for i in range(r):
        tup, tries = _basis_tuple(spec, stream.child(i), budget)
        rows.append(tup)
        attempts.append(tries)
    data = np.stack(rows) if rows else np.zeros((0, 0, spec.n), dtype=np.int64)
    return BasisFamily(spec.field, data, spec, stream.seed, stream.label, tuple(attempts))
