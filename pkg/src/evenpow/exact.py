"""Exact decimal powers of two and the digit predicates used to verify hits.

Doubling a number whose digits are all at most 4 produces no carries, so
``2**n`` has only even digits exactly when every digit of ``2**(n-1)`` is
in 0..4.  :func:`verify_even_power` checks both sides of that equivalence
on every call.
"""

from __future__ import annotations

import decimal
import enum
import math
from dataclasses import dataclass
from typing import Iterator

from .errors import CapacityError
from .residue import LIMB_BASE, LIMB_DIGITS, Residue, check_digits

EXACT_LIMIT = 10**6

_LOG10_2 = math.log10(2)


class Status(str, enum.Enum):
    CONFIRMED = "confirmed_solution"
    REFUTED = "refuted"
    UNVERIFIED = "unverified"

    def __str__(self):
        return self.value


class EquivalenceViolation(AssertionError):
    """The even-digit and digits-at-most-4 tests disagreed."""


class BigDecimalNat:
    """Natural number as little-endian base-10**18 limbs.

    Canonical: no zero top limb except for the value 0 itself, which is
    ``[0]``.
    """

    __slots__ = ("limbs",)

    def __init__(self, limbs=(0,)):
        limbs = list(limbs) or [0]
        while len(limbs) > 1 and limbs[-1] == 0:
            limbs.pop()
        if any(not 0 <= x < LIMB_BASE for x in limbs):
            raise ValueError("limb out of range [0, 10**18)")
        self.limbs = limbs

    @classmethod
    def from_int(cls, value: int) -> BigDecimalNat:
        if value < 0:
            raise ValueError("BigDecimalNat is unsigned")
        limbs = []
        while True:
            value, low = divmod(value, LIMB_BASE)
            limbs.append(low)
            if not value:
                return cls(limbs)

    @classmethod
    def from_str(cls, digits: str) -> BigDecimalNat:
        if not digits.isdigit():
            raise ValueError(f"not a decimal natural number: {digits[:40]!r}")
        limbs = [
            int(digits[max(0, end - LIMB_DIGITS):end])
            for end in range(len(digits), 0, -LIMB_DIGITS)
        ]
        return cls(limbs)

    def to_int(self) -> int:
        v = 0
        for limb in reversed(self.limbs):
            v = v * LIMB_BASE + limb
        return v

    def __str__(self):
        head = str(self.limbs[-1])
        return head + "".join(f"{x:018d}" for x in reversed(self.limbs[:-1]))

    def __repr__(self):
        s = str(self)
        if len(s) > 40:
            s = f"{s[:18]}...{s[-18:]}"
        return f"BigDecimalNat({s})"

    def __eq__(self, other):
        if not isinstance(other, BigDecimalNat):
            return NotImplemented
        return self.limbs == other.limbs

    def __hash__(self):
        return hash(tuple(self.limbs))

    def digit_count(self) -> int:
        return LIMB_DIGITS * (len(self.limbs) - 1) + len(str(self.limbs[-1]))

    def double_inplace(self) -> None:
        limbs = self.limbs
        carry = 0
        for i, x in enumerate(limbs):
            x = 2 * x + carry
            if x >= LIMB_BASE:
                limbs[i] = x - LIMB_BASE
                carry = 1
            else:
                limbs[i] = x
                carry = 0
        if carry:
            limbs.append(1)

    def doubled(self) -> BigDecimalNat:
        out = BigDecimalNat(self.limbs)
        out.double_inplace()
        return out

    def fold(self, digits: int) -> Residue:
        """Reduce modulo ``10**digits`` into a :class:`Residue`."""
        check_digits(digits)
        n = -(-digits // LIMB_DIGITS)
        low = self.limbs[:n] + [0] * (n - len(self.limbs))
        low[-1] %= 10 ** (digits - LIMB_DIGITS * (n - 1))
        return Residue(tuple(low), digits)


def _limb_digits(x: int):
    while x:
        x, d = divmod(x, 10)
        yield d


def all_digits_le4(x: BigDecimalNat) -> bool:
    """Every decimal digit of ``x`` is in 0..4 (true for 0)."""
    return all(d <= 4 for limb in x.limbs for d in _limb_digits(limb))


def all_digits_even(x: BigDecimalNat) -> bool:
    """Every decimal digit of ``x`` is in {0, 2, 4, 6, 8} (true for 0)."""
    # padding zeros inside a limb are even, so only nonzero tails matter
    return all(d % 2 == 0 for limb in x.limbs for d in _limb_digits(limb))


def pow2_exact(p: int, limit: int = EXACT_LIMIT) -> BigDecimalNat:
    """Exact ``2**p`` in decimal limbs.

    Computed with libmpdec (``decimal``) at a precision wide enough to hold
    every digit; the Inexact trap guarantees nothing was rounded away.
    """
    if p < 0:
        raise ValueError(f"exponent must be nonnegative, got {p}")
    if p > limit:
        raise CapacityError("exponent", p, limit)
    digits = int(p * _LOG10_2) + 2
    ctx = decimal.Context(
        prec=digits,
        Emax=decimal.MAX_EMAX,
        traps=[decimal.Inexact, decimal.Rounded, decimal.Overflow],
    )
    value = ctx.power(decimal.Decimal(2), p)
    return BigDecimalNat.from_str(str(value))


def verify_even_power(n: int, limit: int = EXACT_LIMIT) -> Status:
    """Decide whether ``2**n`` has only even digits.

    Raises :class:`EquivalenceViolation` if the answer disagrees with the
    digits-at-most-4 test on ``2**(n-1)``.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    even = all_digits_even(pow2_exact(n, limit))
    half = all_digits_le4(pow2_exact(n - 1, limit))
    if even != half:
        raise EquivalenceViolation(
            f"n={n}: all_digits_even(2^n)={even} but all_digits_le4(2^(n-1))={half}"
        )
    return Status.CONFIRMED if even else Status.REFUTED


def iter_powers(k_max: int, limit: int = EXACT_LIMIT) -> Iterator[tuple[int, BigDecimalNat]]:
    """Yield ``(k, 2**k)`` for k = 0..k_max from a single doubled value.

    The yielded object is mutated on the next step; copy it to keep it.
    """
    if k_max > limit:
        raise CapacityError("exponent", k_max, limit)
    x = BigDecimalNat([1])
    for k in range(k_max + 1):
        yield k, x
        if k < k_max:
            x.double_inplace()


@dataclass(frozen=True)
class ExactScan:
    n_max: int
    even_n: tuple[int, ...]
    le4_p: tuple[int, ...]


def scan_exact(n_max: int, limit: int = EXACT_LIMIT) -> ExactScan:
    """Brute-force both digit conditions over every power up to ``2**n_max``.

    ``even_n`` lists n in 1..n_max with all digits of ``2**n`` even;
    ``le4_p`` lists p in 0..n_max-1 with all digits of ``2**p`` at most 4.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    even_n = []
    le4_p = []
    le4_prev = False
    for k, x in iter_powers(n_max, limit):
        if k >= 1:
            even = all_digits_even(x)
            if even != le4_prev:
                raise EquivalenceViolation(
                    f"n={k}: even digits {even}, previous power digits<=4 {le4_prev}"
                )
            if even:
                even_n.append(k)
        if k < n_max:
            le4_prev = all_digits_le4(x)
            if le4_prev:
                le4_p.append(k)
    return ExactScan(n_max, tuple(even_n), tuple(le4_p))


def format_golden(values) -> str:
    """One integer per line, for fixture files."""
    return "".join(f"{v}\n" for v in values)
