import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evenpow import _kernels
from evenpow.errors import ConfigError
from evenpow.residue import (
    LIMB_BASE,
    Residue,
    digits_all_le4,
    double_mod,
    mul_mod,
    pow2_mod,
    top_modulus,
)

C = 0.30102999566398120
widths = st.integers(1, 72)


def chain(p):
    """Independent oracle: 2**p by repeated integer doubling."""
    x = 1
    for _ in range(p):
        x *= 2
    return x


def naive_le4(value, digits):
    for _ in range(digits):
        value, d = divmod(value, 10)
        if d > 4:
            return False
    return True


@st.composite
def residues(draw, digits=None):
    d = draw(widths) if digits is None else digits
    return Residue.from_int(draw(st.integers(0, 10**d - 1)), d)


def test_from_int_roundtrip():
    r = Residue.from_int(123456789012345678901234567890, 54)
    assert r.limbs == (345678901234567890, 123456789012, 0)
    assert r.value == 123456789012345678901234567890
    assert r.tail_digits() == "0" * 24 + "123456789012345678901234567890"


@pytest.mark.parametrize("limbs, digits", [((0, 0), 54), ((LIMB_BASE, 0, 0), 54), ((0, 0, 10**18 - 1), 50)])
def test_invalid_residues_rejected(limbs, digits):
    with pytest.raises(ValueError):
        Residue(limbs, digits)


@pytest.mark.parametrize("digits", [0, 73, -1])
def test_digit_width_range(digits):
    with pytest.raises(ConfigError):
        pow2_mod(3, digits)


def test_double_mod_examples():
    assert double_mod(Residue.one()).value == 2
    assert double_mod(Residue.from_int(5 * 10**53)).value == 0
    r = Residue.from_int(chain(179) % 10**54)
    assert double_mod(r).value == chain(180) % 10**54


def test_pow2_mod_examples():
    assert pow2_mod(0, 54).value == 1
    assert pow2_mod(10, 54).value == 1024


def test_pow2_mod_large_exponent_two_oracles():
    p = 10**9
    r = pow2_mod(p, 54)
    assert r.value == pow(2, p, 10**54)
    # second route: double up from an earlier checkpoint
    s = pow2_mod(p - 1000, 54)
    for _ in range(1000):
        s = double_mod(s)
    assert s == r
    assert len(r.tail_digits()) == 54


def test_mul_mod_examples():
    x = Residue.from_int(98765432109876543210)
    assert mul_mod(Residue.one(), x) == x
    a = Residue.from_int(10**27)
    assert mul_mod(a, a).value == 0
    got = mul_mod(Residue.from_int(chain(60)), Residue.from_int(chain(61)))
    assert got.value == chain(121) % 10**54


def test_mul_mod_width_mismatch():
    with pytest.raises(ValueError):
        mul_mod(Residue.one(54), Residue.one(36))


def test_digits_all_le4_examples():
    assert digits_all_le4(Residue.from_int(1024))
    assert not digits_all_le4(Residue.from_int(2048))
    assert digits_all_le4(Residue.from_int(0))


@given(st.integers(0, 5000), widths)
def test_pow2_step_is_doubling(p, d):
    assert pow2_mod(p + 1, d) == double_mod(pow2_mod(p, d))


@given(st.integers(0, 10**12), st.integers(0, 10**12), widths)
def test_pow2_additive(p, s, d):
    assert pow2_mod(p + s, d) == mul_mod(pow2_mod(p, d), pow2_mod(s, d))
    assert pow2_mod(p, d).value == pow(2, p, 10**d)


@given(st.data())
def test_mul_mod_matches_integers(data):
    d = data.draw(widths)
    a = data.draw(residues(d))
    b = data.draw(residues(d))
    assert mul_mod(a, b).value == a.value * b.value % 10**d


@given(st.data())
def test_digits_all_le4_matches_naive(data):
    d = data.draw(widths)
    # bias toward all-small digits so both outcomes show up
    if data.draw(st.booleans()):
        digs = data.draw(st.lists(st.integers(0, 4), min_size=d, max_size=d))
        r = Residue.from_int(int("".join(map(str, digs))), d)
    else:
        r = data.draw(residues(d))
    assert digits_all_le4(r) == naive_le4(r.value, d)


@given(widths, st.data())
def test_small_powers_fit_exactly(d, data):
    p = data.draw(st.integers(0, int(d / C)))
    value = chain(p)
    assert value < 10**d
    exact = all(ch in "01234" for ch in str(value))
    assert digits_all_le4(pow2_mod(p, d)) == exact


# compiled kernels against the reference implementation

@settings(max_examples=200)
@given(st.data())
def test_kernel_mul_mod(data):
    d = data.draw(st.sampled_from([18, 19, 36, 40, 54, 71, 72]))
    a = data.draw(residues(d))
    b = data.draw(residues(d))
    state = np.array(a.limbs, dtype=np.uint64)
    halves = np.array([x for limb in b.limbs for x in (limb % 10**9, limb // 10**9)], dtype=np.uint64)
    n = 2 * len(a.limbs)
    _kernels.mul_mod_inplace(state, halves, np.uint64(top_modulus(d)), np.empty(n, np.uint64), np.empty(n, np.uint64))
    assert tuple(int(x) for x in state) == mul_mod(a, b).limbs


@given(st.data())
def test_kernel_double_and_check(data):
    d = data.draw(st.integers(18, 72))
    r = data.draw(residues(d))
    state = np.array(r.limbs, dtype=np.uint64)
    assert _kernels.all_le4(state) == digits_all_le4(r)
    _kernels.double_inplace(state, np.uint64(top_modulus(d)))
    assert tuple(int(x) for x in state) == double_mod(r).limbs
