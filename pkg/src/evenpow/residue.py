"""Residues of powers of two modulo 10**D held in base-10**18 limbs.

A :class:`Residue` stores ``value mod 10**D`` as ``L = ceil(D / 18)``
little-endian limbs, each holding 18 decimal digits.  Decimal limbs make
digit inspection a matter of dividing a machine word by ten, with no
binary-to-decimal conversion anywhere.

The functions here are the reference implementation.  The sieve's hot loops
live in :mod:`evenpow._kernels` and are tested against these.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

LIMB_DIGITS = 18
LIMB_BASE = 10**LIMB_DIGITS
MAX_LIMBS = 4
MAX_DIGITS = LIMB_DIGITS * MAX_LIMBS
DEFAULT_DIGITS = 54


def limb_count(digits: int) -> int:
    return -(-digits // LIMB_DIGITS)


def top_modulus(digits: int) -> int:
    """Capacity of the most significant limb, ``10**(D - 18*(L-1))``."""
    return 10 ** (digits - LIMB_DIGITS * (limb_count(digits) - 1))


def check_digits(digits: int) -> int:
    if not isinstance(digits, int) or not 1 <= digits <= MAX_DIGITS:
        raise ConfigError(f"digit width D={digits!r} outside [1, {MAX_DIGITS}]")
    return digits


@dataclass(frozen=True)
class Residue:
    """A value modulo ``10**digits`` as little-endian decimal limbs."""

    limbs: tuple[int, ...]
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        check_digits(self.digits)
        if len(self.limbs) != limb_count(self.digits):
            raise ValueError(
                f"expected {limb_count(self.digits)} limbs for D={self.digits}, "
                f"got {len(self.limbs)}"
            )
        if any(not 0 <= x < LIMB_BASE for x in self.limbs):
            raise ValueError("limb out of range [0, 10**18)")
        if self.limbs[-1] >= top_modulus(self.digits):
            raise ValueError("value does not fit in D digits")

    @classmethod
    def from_int(cls, value: int, digits: int = DEFAULT_DIGITS) -> Residue:
        """Reduce ``value`` modulo ``10**digits``."""
        check_digits(digits)
        value %= 10**digits
        limbs = []
        for _ in range(limb_count(digits)):
            value, low = divmod(value, LIMB_BASE)
            limbs.append(low)
        return cls(tuple(limbs), digits)

    @classmethod
    def one(cls, digits: int = DEFAULT_DIGITS) -> Residue:
        return cls.from_int(1, digits)

    @property
    def value(self) -> int:
        v = 0
        for limb in reversed(self.limbs):
            v = v * LIMB_BASE + limb
        return v

    @property
    def modulus(self) -> int:
        return 10**self.digits

    def tail_digits(self) -> str:
        """The value zero-padded to exactly ``digits`` characters."""
        return "".join(f"{x:018d}" for x in reversed(self.limbs))[-self.digits:]

    def __str__(self):
        return self.tail_digits()


def double_mod(r: Residue) -> Residue:
    """Return ``2*r mod 10**D``."""
    out = []
    carry = 0
    for limb in r.limbs:
        x = 2 * limb + carry
        # 2*(B-1) + 1 < 2*B, so the carry is at most one
        if x >= LIMB_BASE:
            x -= LIMB_BASE
            carry = 1
        else:
            carry = 0
        out.append(x)
    out[-1] %= top_modulus(r.digits)
    return Residue(tuple(out), r.digits)


def mul_mod(a: Residue, b: Residue) -> Residue:
    """Return ``a*b mod 10**D`` by schoolbook limb products.

    Only the columns below ``L`` contribute to the residue, so the upper
    half of the full product is never formed.
    """
    if a.digits != b.digits:
        raise ValueError(f"digit widths differ: {a.digits} != {b.digits}")
    n = len(a.limbs)
    cols = [0] * n
    for i, x in enumerate(a.limbs):
        if not x:
            continue
        for j in range(n - i):
            cols[i + j] += x * b.limbs[j]
    out = []
    carry = 0
    for s in cols:
        carry, low = divmod(s + carry, LIMB_BASE)
        out.append(low)
    out[-1] %= top_modulus(a.digits)
    return Residue(tuple(out), a.digits)


def pow2_mod(p: int, digits: int = DEFAULT_DIGITS) -> Residue:
    """``2**p mod 10**digits`` by right-to-left square-and-multiply."""
    check_digits(digits)
    if p < 0:
        raise ConfigError(f"exponent must be nonnegative, got {p}")
    result = Residue.one(digits)
    base = Residue.from_int(2, digits)
    while p:
        if p & 1:
            result = mul_mod(result, base)
        p >>= 1
        if p:
            base = mul_mod(base, base)
    return result


def digits_all_le4(r: Residue) -> bool:
    """True iff every one of the ``D`` digits of ``r`` is at most 4.

    Digits are read from the least significant end and the first digit
    above 4 rejects immediately.  Padding zeros above the value pass.
    """
    for limb in r.limbs:
        while limb:
            limb, digit = divmod(limb, 10)
            if digit > 4:
                return False
    return True
