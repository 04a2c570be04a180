"""Shrinking targets B_d and their Lebesgue measures.

``B_d`` is the set of phases f in [0, 1) such that the first d digits of
``10**f`` are all in 0..4 with a nonzero leading digit.  A d-digit prefix P
owns the phase interval ``[log10 P - (d-1), log10 (P+1) - (d-1))``; the
five children ``10Q .. 10Q+4`` of a prefix Q telescope into one interval
``[log10 10Q, log10 (10Q+5))`` so depth d >= 2 needs only 4*5**(d-2) of
them.

The phase of ``2**k`` is ``{k*c}`` with ``c = log10 2``.  It is computed in
192-bit fixed point from a stored constant so that the digit count
``floor(k*c) + 1`` is exact far beyond any exponent we can scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import CapacityError, ConfigError

FRAC_BITS = 192
FIXED_ONE = 1 << FRAC_BITS
# floor(log10(2) * 2**192)
LOG10_2_FIXED = 0x4D104D427DE7FBCC47C4ACD605BE48BC13569862A1E8F9A4

LOG10_2 = math.log10(2)
LN10 = math.log(10)
ENUMERATION_LIMIT = 10
MULTIPLICITY_BOUND = math.ceil(1 / LOG10_2)


def d_of_k(k: int) -> int:
    """Number of decimal digits of ``2**k``, i.e. ``floor(k*log10 2) + 1``.

    The stored constant is a floor, so the true product lies in
    ``[k*C, k*C + k)`` ulps.  If that window straddles an integer the floor
    is undecidable at this precision and ArithmeticError is raised.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    whole, frac = divmod(k * LOG10_2_FIXED, FIXED_ONE)
    if frac + k >= FIXED_ONE:
        raise ArithmeticError(f"floor(k*log10(2)) not resolvable at k={k}")
    return whole + 1


def phase_from_decimal(x0: str) -> int:
    """Parse a decimal string in [0, 1) into a 192-bit fraction (floor)."""
    try:
        x = Fraction(x0)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a decimal fraction: {x0!r}") from None
    if not 0 <= x < 1:
        raise ConfigError(f"phase x0={x0} outside [0, 1)")
    return (x.numerator << FRAC_BITS) // x.denominator


def fixed_to_decimal(x: int) -> str:
    """Exact decimal string of the fraction ``x / 2**192``."""
    if not 0 <= x < FIXED_ONE:
        raise ValueError("fixed-point phase outside [0, 1)")
    digits = str(x * 5**FRAC_BITS).rjust(FRAC_BITS, "0")
    return ("0." + digits).rstrip("0").rstrip(".") if x else "0"


def check_depth(d: int) -> int:
    if d < 1:
        raise ConfigError(f"depth d must be at least 1, got {d}")
    if d > ENUMERATION_LIMIT:
        raise CapacityError("depth", d, ENUMERATION_LIMIT)
    return d


@lru_cache(maxsize=None)
def _prefixes(d: int) -> np.ndarray:
    """Sorted allowed d-digit prefixes: leading digit 1..4, then 0..4."""
    if d == 1:
        return np.arange(1, 5, dtype=np.int64)
    parent = _prefixes(d - 1)
    return (parent[:, None] * 10 + np.arange(5, dtype=np.int64)).ravel()


def prefixes(d: int) -> np.ndarray:
    return _prefixes(check_depth(d)).copy()


@dataclass(frozen=True, eq=False)
class PrefixIntervalSet:
    """B_d as sorted, disjoint half-open intervals ``[lo[i], hi[i])``."""

    d: int
    lo: np.ndarray
    hi: np.ndarray
    lengths: np.ndarray

    def __len__(self):
        return len(self.lo)

    def __contains__(self, f: float) -> bool:
        i = int(np.searchsorted(self.lo, f, side="right")) - 1
        return i >= 0 and f < self.hi[i]

    @property
    def measure(self) -> float:
        return math.fsum(self.lengths)

    def fixed_endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints as 64-bit fractions ``floor(x * 2**64)``.

        Scaling a double by a power of two is exact, so these compare
        exactly with the top word of a fixed-point phase.
        """
        scale = 2.0**64
        lo = np.array([int(x * scale) for x in self.lo.tolist()], dtype=np.uint64)
        hi = np.array([int(x * scale) for x in self.hi.tolist()], dtype=np.uint64)
        return lo, hi


@lru_cache(maxsize=None)
def _build(d: int) -> PrefixIntervalSet:
    if d == 1:
        p = _prefixes(1).astype(np.float64)
        lo = np.log10(p)
        hi = np.log10(p + 1)
        lengths = np.log1p(1 / p) / LN10
    else:
        q = _prefixes(d - 1).astype(np.float64)
        lo = np.log10(q / 10.0 ** (d - 2))
        hi = np.log10((10 * q + 5) / 10.0 ** (d - 1))
        lengths = np.log1p(0.5 / q) / LN10
    for a in (lo, hi, lengths):
        a.setflags(write=False)
    return PrefixIntervalSet(d, lo, hi, lengths)


def build_B_d(d: int) -> PrefixIntervalSet:
    """Fraction-space intervals of B_d, merged within prefix blocks."""
    return _build(check_depth(d))


def upper_bound(d: int) -> float:
    """``2**(3-d) / ln 10``, the bound obtained from ``1/y <= 1`` on [1, 5)."""
    return 2.0 ** (3 - d) / LN10


@dataclass(frozen=True)
class MeasureReport:
    d: int
    exact_measure: float
    upper_bound: float
    decay_rate: Optional[float]


def measure_B_d(d: int) -> MeasureReport:
    exact = build_B_d(d).measure
    bound = upper_bound(d)
    if not 0 < exact <= min(1.0, bound):
        raise ArithmeticError(f"m(B_{d})={exact!r} violates bound {bound!r}")
    rate = exact / build_B_d(d - 1).measure if d >= 2 else None
    return MeasureReport(d, exact, bound, rate)


@dataclass(frozen=True)
class SummabilityReport:
    d_max: int
    per_d_measures: tuple[float, ...]
    multiplicity_bound: int
    partial_sum: float
    tail_bound: float

    @property
    def total_bound(self) -> float:
        return self.partial_sum + self.tail_bound


def summability(d_max: int) -> SummabilityReport:
    """Rigorous upper bound for the sum over k of m(B_{d(k)}).

    At most ``ceil(1/c) = 4`` exponents share a digit count, so the sum is
    at most 4 times the sum over depths.  Depths past ``d_max`` are bounded
    by the geometric series of ``2**(3-d)/ln 10``, whose tail from
    ``d_max + 1`` is ``2**(3-d_max)/ln 10``.
    """
    check_depth(d_max)
    measures = tuple(build_B_d(d).measure for d in range(1, d_max + 1))
    m = MULTIPLICITY_BOUND
    return SummabilityReport(
        d_max=d_max,
        per_d_measures=measures,
        multiplicity_bound=m,
        partial_sum=m * math.fsum(measures),
        tail_bound=m * upper_bound(d_max),
    )


HEURISTIC_MODES = ("paper_geometric", "exact_dk")


def heuristic_expected_count(mode: str = "paper_geometric", tol: float = 1e-12) -> float:
    """Expected number of k >= 1 with all digits of ``2**k`` at most 4.

    Treats each of the d(k) digits as an independent fair coin for "<= 4".
    ``paper_geometric`` approximates d(k) by k*c, giving ``q/(1-q)`` with
    ``q = 2**-c``.  ``exact_dk`` sums ``2**-d(k)`` directly, stopping once
    the tail, bounded by ``sum q**k`` because d(k) > k*c, drops below tol.
    """
    q = 2.0**-LOG10_2
    if mode == "paper_geometric":
        return q / (1 - q)
    if mode != "exact_dk":
        raise ConfigError(f"unknown heuristic mode {mode!r}; expected one of {HEURISTIC_MODES}")
    terms = []
    k = 1
    while q ** (k + 1) / (1 - q) >= tol:
        terms.append(2.0 ** -d_of_k(k))
        k += 1
    terms.append(2.0 ** -d_of_k(k))
    return math.fsum(terms)


def format_measure_table(reports) -> str:
    lines = ["d\texact_measure\tupper_bound\tdecay_rate"]
    for r in reports:
        rate = "-" if r.decay_rate is None else f"{r.decay_rate:.12f}"
        lines.append(f"{r.d}\t{r.exact_measure:.12f}\t{r.upper_bound:.12f}\t{rate}")
    return "\n".join(lines) + "\n"
