"""Exact scalar arithmetic: prime fields GF(p) and an exact-integer mode over Q.

In exact-integer mode scalars are Python ints and linear algebra runs
fraction-free (Bareiss / integer row combinations), so there is no modulus
and no division.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import NonPrimeModulus, UnsupportedInExactIntegerMode, ZeroInverse


def is_prime(p: int) -> bool:
    """Trial-division primality test."""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either ``prime`` mode with characteristic ``p`` or ``exact-integer`` mode (p is None)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or isinstance(self.p, bool):
                raise TypeError(f"modulus must be an int, got {self.p!r}")
            if not is_prime(self.p):
                raise NonPrimeModulus(f"{self.p} is not prime")

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls(p)

    @classmethod
    def exact(cls) -> FieldSpec:
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Parse ``gf:<p>`` or ``zz``."""
        text = text.strip().lower()
        if text in ("zz", "z", "q", "exact"):
            return cls.exact()
        if text.startswith("gf:"):
            try:
                p = int(text[3:])
            except ValueError:
                raise ValueError(f"bad field spec {text!r}") from None
            return cls.prime(p)
        raise ValueError(f"bad field spec {text!r}; expected gf:<p> or zz")

    @property
    def mode(self) -> str:
        return "exact-integer" if self.p is None else "prime"

    @property
    def is_gf2(self) -> bool:
        return self.p == 2

    def label(self) -> str:
        return "zz" if self.p is None else f"gf:{self.p}"

    def to_json(self) -> dict:
        if self.p is None:
            return {"mode": "exact-integer"}
        return {"mode": "prime", "p": self.p}

    @classmethod
    def from_json(cls, obj: dict | str) -> FieldSpec:
        if isinstance(obj, str):
            return cls.parse(obj)
        if obj["mode"] == "prime":
            return cls.prime(int(obj["p"]))
        if obj["mode"] == "exact-integer":
            return cls.exact()
        raise ValueError(f"unknown field mode {obj['mode']!r}")


class Field:
    """Arithmetic context for a :class:`FieldSpec`. Immutable and shareable."""

    __slots__ = ("spec", "p")

    def __init__(self, spec: FieldSpec):
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "p", spec.p)

    def __setattr__(self, name, value):
        raise AttributeError("Field contexts are immutable")

    def __repr__(self):
        return f"Field({self.spec.label()})"

    @property
    def exact(self) -> bool:
        return self.p is None

    def normalize(self, a: int) -> int:
        return int(a) if self.p is None else int(a) % self.p

    def add(self, a: int, b: int) -> int:
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a: int) -> int:
        return -a if self.p is None else (-a) % self.p

    def is_zero(self, a: int) -> bool:
        return a == 0 if self.p is None else a % self.p == 0

    def inv(self, a: int) -> int:
        if self.p is None:
            raise UnsupportedInExactIntegerMode(
                "exact-integer mode has no inverses; use fraction-free elimination"
            )
        a %= self.p
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        return pow(a, -1, self.p)


@lru_cache(maxsize=None)
def field_make(spec: FieldSpec) -> Field:
    """Return the arithmetic context for ``spec``."""
    if spec.p is not None and not is_prime(spec.p):
        raise NonPrimeModulus(f"{spec.p} is not prime")
    return Field(spec)


def scalar_inv(f: Field, a: int) -> int:
    return f.inv(a)
