"""Exact linear algebra over the field modes of :mod:`rota.field`.

Vectors are plain integer sequences of length ``n`` (tuples, lists or numpy
rows). One-shot rank dispatches to compiled kernels for prime fields and to
Bareiss elimination in exact-integer mode; :class:`EchelonBasis` is the
incremental, persistent counterpart used by oracles and diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import DimensionMismatch, EmptyList, TooLarge
from .field import FieldSpec


def as_matrix(vs, n: int | None = None, field: FieldSpec | None = None) -> np.ndarray:
    """Stack vectors into a ``(k, n)`` array, reduced mod p for prime fields."""
    if isinstance(vs, np.ndarray) and vs.ndim == 2:
        A = vs
    else:
        vs = list(vs)
        if not vs:
            return np.zeros((0, n or 0), dtype=np.int64)
        lengths = {len(v) for v in vs}
        if len(lengths) != 1:
            raise DimensionMismatch(f"vectors of differing lengths {sorted(lengths)}")
        try:
            A = np.array(vs, dtype=np.int64)
        except OverflowError:
            A = np.array(vs, dtype=object)
    if n is not None and A.shape[1] != n:
        raise DimensionMismatch(f"expected dimension {n}, got {A.shape[1]}")
    if field is not None and field.p is not None:
        A = np.mod(A, field.p).astype(np.int64)
    return A


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free (Bareiss) elimination."""
    M = [[int(x) for x in r] for r in rows]
    if not M:
        return 0
    k, n = len(M), len(M[0])
    rank = 0
    prev = 1
    for col in range(n):
        if rank == k:
            break
        sel = next((r for r in range(rank, k) if M[r][col] != 0), None)
        if sel is None:
            continue
        M[rank], M[sel] = M[sel], M[rank]
        piv = M[rank][col]
        for r in range(rank + 1, k):
            f = M[r][col]
            row = M[r]
            top = M[rank]
            for u in range(col + 1, n):
                # exact division is the Bareiss invariant
                row[u] = (piv * row[u] - f * top[u]) // prev
            row[col] = 0
        prev = piv
        rank += 1
    return rank


def rank(vs, field: FieldSpec, n: int | None = None) -> int:
    """Rank of the span of ``vs``; equals ``len(vs)`` iff they are independent."""
    A = as_matrix(vs, n, field)
    if A.shape[0] == 0:
        return 0
    if field.p is None:
        return bareiss_rank(A.tolist())
    if field.p == 2:
        return int(K.gf2_rank(K.pack_gf2(A), A.shape[1]))
    if field.p < K.MAX_DENSE_P:
        return int(K.gfp_rank(A, field.p))
    return EchelonBasis.from_vectors(field, A.tolist(), A.shape[1]).dim


def multiset_independent(vs, field: FieldSpec, n: int | None = None) -> bool:
    A = as_matrix(vs, n, field)
    return rank(A, field) == A.shape[0]


# ------------------------------------------------------------------ echelon


def _primitive(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
        if g == 1:
            return v
    if g > 1:
        v = [x // g for x in v]
    return v


class EchelonBasis:
    """Reduced row-echelon basis of a subspace of F^n. Never mutated after creation.

    GF(2) rows are Python ints (bit ``c`` = coordinate ``c``). Other prime
    fields keep unit-pivot RREF tuples; exact-integer mode keeps primitive
    integer rows with positive pivots, eliminated fraction-free. In every mode
    the row list is a canonical form of the subspace.
    """

    __slots__ = ("field", "n", "rows", "pivots", "_mask")

    def __init__(self, field: FieldSpec, n: int, rows=(), pivots=()):
        self.field = field
        self.n = n
        self.rows = tuple(rows)
        self.pivots = tuple(pivots)
        mask = 0
        for c in self.pivots:
            mask |= 1 << c
        self._mask = mask

    @classmethod
    def empty(cls, field: FieldSpec, n: int) -> EchelonBasis:
        return cls(field, n)

    @classmethod
    def from_vectors(cls, field: FieldSpec, vs: Iterable, n: int) -> EchelonBasis:
        e = cls(field, n)
        for v in vs:
            e = e.try_extend(v) or e
        return e

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, EchelonBasis)
            and self.field == other.field
            and self.n == other.n
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.field, self.n, self.rows))

    def __repr__(self):
        return f"EchelonBasis({self.field.label()}, n={self.n}, dim={self.dim})"

    def key(self):
        return self.rows

    # internal form conversions

    def _encode(self, v):
        if len(v) != self.n:
            raise DimensionMismatch(f"expected dimension {self.n}, got {len(v)}")
        p = self.field.p
        if p == 2:
            x = 0
            for i, a in enumerate(v):
                if int(a) & 1:
                    x |= 1 << i
            return x
        if p is None:
            return [int(a) for a in v]
        return [int(a) % p for a in v]

    def _decode(self, row) -> tuple[int, ...]:
        if self.field.p == 2:
            return tuple((row >> i) & 1 for i in range(self.n))
        return tuple(row)

    def vectors(self) -> list[tuple[int, ...]]:
        return [self._decode(r) for r in self.rows]

    def _reduce(self, x):
        p = self.field.p
        if p == 2:
            t = x & self._mask
            while t:
                low = t & -t
                x ^= self.rows[self.pivots.index(low.bit_length() - 1)]
                t ^= low
            return x
        if p is None:
            for c, r in zip(self.pivots, self.rows):
                f = x[c]
                if f:
                    pc = r[c]
                    x = [pc * a - f * b for a, b in zip(x, r)]
            return _primitive(x)
        for c, r in zip(self.pivots, self.rows):
            f = x[c]
            if f:
                x = [(a - f * b) % p for a, b in zip(x, r)]
        return x

    @staticmethod
    def _is_zero(x) -> bool:
        return x == 0 if isinstance(x, int) else not any(x)

    def contains(self, v) -> bool:
        return self._is_zero(self._reduce(self._encode(v)))

    def try_extend(self, v) -> EchelonBasis | None:
        """The basis of ``span(self) + <v>``, or ``None`` when ``v`` is already in the span."""
        x = self._reduce(self._encode(v))
        if self._is_zero(x):
            return None
        p = self.field.p
        if p == 2:
            c = (x & -x).bit_length() - 1
            rows = [r ^ x if (r >> c) & 1 else r for r in self.rows]
        else:
            c = next(i for i, a in enumerate(x) if a)
            if p is None:
                if x[c] < 0:
                    x = [-a for a in x]
                pc = x[c]
                rows = []
                for r in self.rows:
                    f = r[c]
                    if f:
                        r = tuple(_primitive([pc * a - f * b for a, b in zip(r, x)]))
                    rows.append(r)
            else:
                inv = pow(x[c], -1, p)
                x = [(a * inv) % p for a in x]
                rows = []
                for r in self.rows:
                    f = r[c]
                    if f:
                        r = tuple((a - f * b) % p for a, b in zip(r, x))
                    rows.append(r)
            x = tuple(x)
        order = sorted(range(len(rows) + 1), key=lambda i: (list(self.pivots) + [c])[i])
        all_rows = rows + [x]
        all_piv = list(self.pivots) + [c]
        return EchelonBasis(
            self.field, self.n, [all_rows[i] for i in order], [all_piv[i] for i in order]
        )

    def intersect(self, other: EchelonBasis) -> EchelonBasis:
        """Basis of ``span(self) ∩ span(other)`` via the left kernel of the stacked rows."""
        if self.n != other.n or self.field != other.field:
            raise DimensionMismatch("subspaces live in different ambient spaces")
        a = self.vectors()
        stacked = a + other.vectors()
        kernel = _left_kernel(stacked, self.field)
        out = EchelonBasis(self.field, self.n)
        for coeffs in kernel:
            x = coeffs[: len(a)]
            w = [0] * self.n
            for c, v in zip(x, a):
                if c:
                    w = [s + c * t for s, t in zip(w, v)]
            if self.field.p is not None:
                w = [int(s) % self.field.p for s in w]
            else:
                den = 1
                for s in w:
                    den = den * s.denominator // gcd(den, s.denominator)
                w = [int(s * den) for s in w]
            out = out.try_extend(w) or out
        return out


def _left_kernel(rows: list[Sequence[int]], field: FieldSpec) -> list[list]:
    """Basis of {x : sum_i x_i rows[i] = 0}, by elimination on ``[rows | I]``."""
    k = len(rows)
    if k == 0:
        return []
    n = len(rows[0])
    p = field.p
    if p is None:
        aug = [[Fraction(a) for a in r] + [Fraction(int(i == j)) for j in range(k)]
               for i, r in enumerate(rows)]
    else:
        aug = [[int(a) % p for a in r] + [int(i == j) for j in range(k)]
               for i, r in enumerate(rows)]
    rank = 0
    for col in range(n):
        sel = next((r for r in range(rank, k) if aug[r][col] != 0), None)
        if sel is None:
            continue
        aug[rank], aug[sel] = aug[sel], aug[rank]
        top = aug[rank]
        if p is None:
            piv = top[col]
            top = [a / piv for a in top]
        else:
            inv = pow(top[col], -1, p)
            top = [(a * inv) % p for a in top]
        aug[rank] = top
        for r in range(k):
            if r != rank and aug[r][col] != 0:
                f = aug[r][col]
                if p is None:
                    aug[r] = [a - f * b for a, b in zip(aug[r], top)]
                else:
                    aug[r] = [(a - f * b) % p for a, b in zip(aug[r], top)]
        rank += 1
    return [r[n:] for r in aug[rank:]]


def intersection_dim(subspaces: Sequence[EchelonBasis]) -> int:
    if not subspaces:
        raise EmptyList("intersection of an empty list of subspaces")
    n = subspaces[0].n
    if any(s.n != n for s in subspaces):
        raise DimensionMismatch("subspaces have different ambient dimensions")
    acc = subspaces[0]
    for s in subspaces[1:]:
        if acc.dim == 0:
            break
        acc = acc.intersect(s)
    return acc.dim


# ------------------------------------------------------------ dispersedness


@dataclass(frozen=True)
class TSet:
    """An explicit finite set of vectors in F^n."""

    vectors: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        if any(len(v) != self.n for v in self.vectors):
            raise DimensionMismatch(f"all vectors must have dimension {self.n}")
        if len(set(self.vectors)) != len(self.vectors):
            raise ValueError("TSet contains duplicate vectors")

    @classmethod
    def of(cls, vectors, field: FieldSpec | None = None) -> TSet:
        vs = [tuple(int(a) for a in v) for v in vectors]
        if field is not None and field.p is not None:
            vs = [tuple(a % field.p for a in v) for v in vs]
        if not vs:
            raise ValueError("empty TSet needs an explicit dimension")
        return cls(tuple(vs), len(vs[0]))

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)


@dataclass(frozen=True)
class Witness:
    generators: tuple[tuple[int, ...], ...]
    dim: int
    count: int
    bound: Fraction


@dataclass(frozen=True)
class DispersionReport:
    dispersed: bool
    witness: Witness | None
    flats_checked: int
    evaluations: int

    def to_json(self) -> dict:
        out = {
            "dispersed": self.dispersed,
            "flats_checked": self.flats_checked,
            "evaluations": self.evaluations,
        }
        if self.witness is not None:
            w = self.witness
            out["witness"] = {
                "generators": [list(g) for g in w.generators],
                "dim": w.dim,
                "count": w.count,
                "bound": str(w.bound),
            }
        return out


def _as_fraction(c) -> Fraction:
    if isinstance(c, float):
        return Fraction(repr(c))
    return Fraction(c)


def is_dispersed(t: TSet, c, field: FieldSpec, budget: int = 2**20) -> DispersionReport:
    """Exact c-dispersedness check over the spans of subsets of ``t``.

    ``|V ∩ T| = |span(V ∩ T) ∩ T|`` and ``dim span(V ∩ T) <= dim V``, so a
    violating subspace exists iff one spanned by elements of ``T`` violates.
    Those flats are enumerated breadth-first and deduplicated by canonical
    echelon form. Every membership or extension test costs one unit of
    ``budget``; exhausting it raises :class:`TooLarge`.
    """
    c = _as_fraction(c)
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    if len(t) == 0:
        raise ValueError("T must be non-empty")
    n, size = t.n, len(t)
    vecs = list(t)
    start = EchelonBasis.empty(field, n)
    seen = {start.key()}
    frontier = [(start, ())]
    evaluations = 0
    flats = 0
    while frontier:
        nxt = []
        for flat, gens in frontier:
            evaluations += size
            if evaluations > budget:
                raise TooLarge(f"dispersedness check exceeded budget of {budget} evaluations")
            inside = [flat.contains(v) for v in vecs]
            count = sum(inside)
            bound = c ** (n - flat.dim) * size
            flats += 1
            if count > bound:
                return DispersionReport(
                    False, Witness(gens, flat.dim, count, bound), flats, evaluations
                )
            for v, ins in zip(vecs, inside):
                if ins:
                    continue
                evaluations += 1
                bigger = flat.try_extend(v)
                if bigger.key() not in seen:
                    seen.add(bigger.key())
                    nxt.append((bigger, gens + (v,)))
        frontier = nxt
    return DispersionReport(True, None, flats, evaluations)
