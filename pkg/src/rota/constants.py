"""Certified evaluation of the constants that bound the matching construction.

Every quantity is an interval computed with ``mpmath.iv`` (outward-rounded
arithmetic) plus an explicit bound for the truncated tail of each infinite
product, so the true value always lies inside the returned enclosure.

The integers ``L``, ``K`` and ``n0`` are the smallest values for which the
defining inequalities hold for every point of the enclosures. They are proof
constants; the matching construction works at far smaller ``n`` in practice.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction

from mpmath import iv, mp, mpf

from .errors import TailDiverges

DEFAULT_EPS = 1e-12
MAX_TERMS = 1 << 22
REL_WIDTH = 2.0**-50
PROOF_CONSTANTS_NOTE = (
    "L, K and n0 are proof constants for the asymptotic argument, "
    "not runtime thresholds; the matching succeeds at much smaller n."
)


@contextmanager
def _precision(bits: int):
    old = iv.prec
    iv.prec = max(int(bits), 53)
    try:
        yield
    finally:
        iv.prec = old


def _lo(x) -> mpf:
    return mp.make_mpf(x._mpi_[0])


def _hi(x) -> mpf:
    return mp.make_mpf(x._mpi_[1])


def _mpf_fraction(x: mpf) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if not man:
        return Fraction(0)
    v = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -v if sign else v


def _exact(c) -> Fraction:
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(repr(c))
    return Fraction(str(c))


def _iv_of(c: Fraction):
    return iv.mpf(c.numerator) / iv.mpf(c.denominator)


def _check_c(c) -> Fraction:
    cf = _exact(c)
    if not 0 < cf < 1:
        raise ValueError(f"c must lie strictly between 0 and 1, got {c}")
    return cf


def _bits_for(eps: float, extra: int = 32) -> int:
    return 53 + extra + max(0, int(-math.log2(eps)))


def _round(x: Fraction, digits: int, mode: str) -> str:
    ctx = Context(prec=digits, rounding=mode)
    return str(ctx.divide(Decimal(x.numerator), Decimal(x.denominator)))


@dataclass(frozen=True)
class CertifiedValue:
    """A closed interval ``[lower, upper]`` known to contain the true value."""

    lower: mpf
    upper: mpf

    @classmethod
    def of(cls, x) -> CertifiedValue:
        return cls(_lo(x), _hi(x))

    @property
    def width(self) -> Fraction:
        return self.exact_upper - self.exact_lower

    def tight(self, eps: float) -> bool:
        """Positive, with absolute width <= eps and relative width <= 2^-50."""
        lo = self.exact_lower
        return lo > 0 and self.width <= Fraction(eps) and self.width <= Fraction(REL_WIDTH) * lo

    @property
    def exact_lower(self) -> Fraction:
        return _mpf_fraction(self.lower)

    @property
    def exact_upper(self) -> Fraction:
        return _mpf_fraction(self.upper)

    def interval(self):
        return iv.mpf([self.lower, self.upper])

    def contains(self, x) -> bool:
        v = x if isinstance(x, Fraction) else _exact(x)
        return self.exact_lower <= v <= self.exact_upper

    def contains_interval(self, other: CertifiedValue) -> bool:
        return self.exact_lower <= other.exact_lower and other.exact_upper <= self.exact_upper

    def midpoint(self) -> float:
        return float((self.exact_lower + self.exact_upper) / 2)

    def to_json(self, digits: int = 20) -> dict:
        return {
            "lower": _round(self.exact_lower, digits, ROUND_FLOOR),
            "upper": _round(self.exact_upper, digits, ROUND_CEILING),
        }

    def __repr__(self):
        j = self.to_json(12)
        return f"CertifiedValue([{j['lower']}, {j['upper']}])"


# ------------------------------------------------------------------ c'


def c_prime_bounds(c, terms: int, prec: int = 128) -> CertifiedValue:
    """Enclosure of ``prod_{i>=1} (1 - c^i)`` from the first ``terms`` factors.

    The missing factors multiply to at least ``1 - c^(terms+1)/(1-c)``, so the
    lower end may be negative (hence useless) for short prefixes when c >= 1/2.
    """
    cf = _check_c(c)
    with _precision(prec):
        ci = _iv_of(cf)
        prod = iv.mpf(1)
        power = iv.mpf(1)
        for _ in range(terms):
            power = power * ci
            prod = prod * (1 - power)
        tail = 1 - power * ci / (1 - ci)
        return CertifiedValue(_lo(prod * tail), _hi(prod))


def c_prime(c, eps: float = DEFAULT_EPS, prec: int | None = None) -> CertifiedValue:
    """``prod (1 - c^i)`` to absolute width ``eps`` (and relative width 2^-50)."""
    cf = _check_c(c)
    bits = prec or _bits_for(eps)
    terms = 8
    while terms <= MAX_TERMS:
        v = c_prime_bounds(cf, terms, bits)
        if v.tight(eps):
            return v
        terms *= 2
    raise TailDiverges(f"c' did not converge within {MAX_TERMS} factors for c = {c}")


# --------------------------------------------------------------- alpha


def _u(cp, ci, k: int):
    ck = ci**k
    return (cp / 2) * (1 - ck) / ck


def alpha(cp: CertifiedValue, c, k: int, prec: int = 128) -> CertifiedValue:
    """``1 / (1 + (c'/2)(1 - c^k)/c^k)``, checked against ``alpha_k < (2/c') c^k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    cf = _check_c(c)
    # the gap to the bound is relatively about c^k, so resolve it explicitly
    bits = max(prec, int(k * math.log2(1 / float(cf))) + 64)
    with _precision(bits):
        ci = _iv_of(cf)
        a = 1 / (1 + _u(cp.interval(), ci, k))
        bound = 2 * ci**k / iv.mpf(cp.lower)
        if not _hi(a) < _lo(bound):
            raise ArithmeticError(f"alpha_{k} enclosure too wide to certify alpha_k < 2c^k/c'")
        return CertifiedValue.of(a)


def _one_minus_alpha(cp_iv, ci, k: int):
    # u / (1 + u) written with a single occurrence of u to avoid widening
    return 1 / (1 + 1 / _u(cp_iv, ci, k))


# --------------------------------------------------------------- delta


def delta_bounds(c, terms: int, cp: CertifiedValue, prec: int = 128) -> CertifiedValue:
    """Enclosure of ``(1/3) prod_k (1 - alpha_k)`` from the first ``terms`` factors.

    Since ``alpha_k < (2/c') c^k``, the tail is at least ``1 - (2/c') c^(terms+1)/(1-c)``.
    """
    cf = _check_c(c)
    with _precision(prec):
        ci = _iv_of(cf)
        cp_iv = cp.interval()
        prod = iv.mpf(1)
        for k in range(1, terms + 1):
            prod = prod * _one_minus_alpha(cp_iv, ci, k)
        tail = 1 - (2 / iv.mpf(cp.lower)) * ci ** (terms + 1) / (1 - ci)
        if not _lo(tail) > 0:
            return CertifiedValue(mp.mpf(0), _hi(prod / 3))
        return CertifiedValue(_lo(prod * iv.mpf(_lo(tail)) / 3), _hi(prod / 3))


def delta(c, eps: float = DEFAULT_EPS, prec: int | None = None) -> CertifiedValue:
    """``delta`` to absolute width ``eps`` and relative width 2^-50."""
    cf = _check_c(c)
    bits = prec or _bits_for(eps)
    cp = c_prime(cf, min(eps, 1e-30), bits + 64)
    terms = 8
    while terms <= MAX_TERMS:
        v = delta_bounds(cf, terms, cp, bits + 64)
        if v.tight(eps):
            if not (v.upper < mp.mpf(1) / 3):
                raise ArithmeticError("delta enclosure is not below 1/3")
            return v
        terms *= 2
    raise TailDiverges(
        f"no truncation up to {MAX_TERMS} terms makes c^l < (c'/2)(1-c) certify for c = {c}"
    )


# ------------------------------------------------------------ integers


def _bits_for_tiny(x: mpf) -> int:
    # enough bits that 1 - 3x is represented with plenty of relative accuracy in 3x
    return 128 + max(0, -int(mp.log(x, 2)))


def L_holds(d: CertifiedValue, L: int) -> bool:
    """Certified ``(1 - 3 delta)^L <= delta / 2`` for every delta in the enclosure."""
    with _precision(_bits_for_tiny(d.lower) + 64):
        lo = iv.mpf(d.lower)
        lhs = iv.exp(L * iv.log(1 - 3 * lo))
        return _hi(lhs) <= _lo(lo / 2)


def choose_L(d: CertifiedValue) -> int:
    """Smallest ``L >= 1`` with ``(1 - 3 delta)^L <= delta/2`` over the whole enclosure.

    The worst case is the lower end of the delta enclosure, which also covers
    the variant with the upper end inside the power.
    """
    with mp.workprec(_bits_for_tiny(d.lower) + 64):
        lo = d.lower
        est = mp.log(lo / 2) / mp.log1p(-3 * lo)
        L = max(1, int(mp.floor(est)))
    while not L_holds(d, L):
        L += 1
    while L > 1 and L_holds(d, L - 1):
        L -= 1
    return L


def K_holds(c, cp: CertifiedValue, d: CertifiedValue, L: int, K: int) -> bool:
    """Certified ``L (2/c') c^K / (1-c) <= delta/2`` for every point of the enclosures."""
    cf = _check_c(c)
    with _precision(_bits_for_tiny(d.lower)):
        ci = _iv_of(cf)
        lhs = L * (2 / iv.mpf(cp.lower)) * ci**K / (1 - ci)
        return _hi(lhs) <= _lo(iv.mpf(d.lower) / 2)


def choose_K(c, cp: CertifiedValue, d: CertifiedValue, L: int) -> int:
    """Smallest ``K >= 1`` with ``L (2/c') c^K / (1-c) <= delta/2``."""
    cf = _check_c(c)
    with mp.workprec(_bits_for_tiny(d.lower)):
        x = mp.mpf(cf.numerator) / cf.denominator
        target = d.lower / 2 * cp.lower * (1 - x) / (2 * L)
        K = max(1, int(mp.floor(mp.log(target) / mp.log(x))))
    while not K_holds(cf, cp, d, L, K):
        K += 1
    while K > 1 and K_holds(cf, cp, d, L, K - 1):
        K -= 1
    return K


def n_holds(c, n: int) -> bool:
    """Certified ``c^(n/2) <= (1-c)/2``."""
    cf = _check_c(c)
    with _precision(128):
        ci = _iv_of(cf)
        return _hi(iv.sqrt(ci**n)) <= _lo((1 - ci) / 2)


def min_n(c, K: int) -> int:
    """Smallest ``n`` with ``c^(n/2) <= (1-c)/2`` and ``n >= 2K``."""
    cf = _check_c(c)
    x = float(cf)
    n = max(1, int(math.floor(2 * math.log((1 - x) / 2) / math.log(x))))
    while not n_holds(cf, n):
        n += 1
    while n > 1 and n_holds(cf, n - 1):
        n -= 1
    return max(n, 2 * K)


# -------------------------------------------------------------- report


@dataclass
class ConstantsReport:
    c: Fraction
    c_prime: CertifiedValue
    alpha: list[CertifiedValue]
    delta: CertifiedValue
    L: int
    K: int
    n0: int

    def to_json(self, digits: int = 20) -> dict:
        return {
            "c": str(self.c),
            "c_prime": self.c_prime.to_json(digits),
            "alpha": [a.to_json(digits) for a in self.alpha],
            "delta": self.delta.to_json(digits),
            "L": self.L,
            "K": self.K,
            "n0": self.n0,
            "note": PROOF_CONSTANTS_NOTE,
        }


def constants_report(c, k_max: int = 20, eps: float = DEFAULT_EPS) -> ConstantsReport:
    cf = _check_c(c)
    d = delta(cf, eps)
    bits = _bits_for(eps) + 64
    cp = c_prime(cf, min(eps, 1e-30), bits)
    alphas = [alpha(cp, cf, k, bits) for k in range(1, k_max + 1)]
    L = choose_L(d)
    K = choose_K(cf, cp, d, L)
    return ConstantsReport(cf, c_prime(cf, eps), alphas, d, L, K, min_n(cf, K))
