"""Orbits of the rotation ``x -> {x + log10 2}`` against the targets B_d(k).

Phases are 192-bit fractions advanced by the same stored constant that
:func:`evenpow.measure.d_of_k` uses.  Membership at step k is tested at
depth ``min(d(k), d_cap)``.  Since B_d shrinks as d grows, a capped test
can only over-report, and ``truncated`` flags when the cap was binding.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ConfigError
from .measure import (
    FIXED_ONE,
    FRAC_BITS,
    LOG10_2_FIXED,
    build_B_d,
    check_depth,
    d_of_k,
    fixed_to_decimal,
    phase_from_decimal,
)

GENERATOR = "numpy.random.PCG64 via SeedSequence.spawn"
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class OrbitConfig:
    x0: str = "0"
    k_max: int = 20
    d_cap: int = 8
    sample_count: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        phase_from_decimal(self.x0)
        if self.k_max < 1:
            raise ConfigError(f"k_max must be at least 1, got {self.k_max}")
        check_depth(self.d_cap)
        if self.sample_count < 1:
            raise ConfigError(f"sample_count must be at least 1, got {self.sample_count}")


@dataclass(frozen=True)
class OrbitReport:
    x0: str
    k_max: int
    d_cap: int
    hit_ks: tuple[int, ...]
    truncated: bool

    @property
    def hit_count(self) -> int:
        return len(self.hit_ks)


def _words(x: int) -> np.ndarray:
    return np.array([(x >> s) & _MASK64 for s in (128, 64, 0)], dtype=np.uint64)


_C_WORDS = _words(LOG10_2_FIXED)


@lru_cache(maxsize=None)
def _targets(d_cap: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fixed-point endpoints for depths 1..d_cap, concatenated."""
    los, his, offsets = [], [], [0]
    for d in range(1, d_cap + 1):
        lo, hi = build_B_d(d).fixed_endpoints()
        los.append(lo)
        his.append(hi)
        offsets.append(offsets[-1] + len(lo))
    return np.concatenate(los), np.concatenate(his), np.array(offsets, dtype=np.int64)


def _run(x0_fixed: int, k_max: int, d_cap: int, keep: int):
    lo, hi, offsets = _targets(d_cap)
    out = np.empty(keep, dtype=np.int64)
    count, truncated, bad_k = _kernels.orbit_count(
        _words(x0_fixed), _C_WORDS, k_max, d_cap, lo, hi, offsets, out
    )
    if bad_k:
        raise ArithmeticError(f"floor(k*log10(2)) not resolvable at k={bad_k}")
    return int(count), bool(truncated), out


def orbit_hits(cfg: OrbitConfig) -> OrbitReport:
    """Every k in 1..k_max with ``{x0 + k*c}`` in ``B_min(d(k), d_cap)``."""
    x0 = phase_from_decimal(cfg.x0)
    keep = 1024
    while True:
        count, truncated, out = _run(x0, cfg.k_max, cfg.d_cap, keep)
        if count <= keep:
            break
        keep = count
    return OrbitReport(cfg.x0, cfg.k_max, cfg.d_cap, tuple(out[:count].tolist()), truncated)


def expected_hit_count(k_max: int, d_cap: int, k_min: int = 1) -> float:
    """Exact mean of hit counts over uniform x0, by linearity of expectation.

    Sums ``m(B_min(d(k), d_cap))`` over k in k_min..k_max.
    """
    check_depth(d_cap)
    per_depth = [0] * (d_cap + 1)
    k = k_min
    while k <= k_max:
        d = d_of_k(k)
        if d >= d_cap:
            per_depth[d_cap] += k_max - k + 1
            break
        per_depth[d] += 1
        k += 1
    return math.fsum(n * build_B_d(d).measure for d, n in enumerate(per_depth) if n)


def random_phases(sample_count: int, seed: int) -> list[int]:
    """One uniform 64-bit fraction per sample, each from its own spawned seed."""
    children = np.random.SeedSequence(seed).spawn(sample_count)
    return [
        int(np.random.Generator(np.random.PCG64(s)).integers(0, 2**64, dtype=np.uint64))
        << (FRAC_BITS - 64)
        for s in children
    ]


@dataclass(frozen=True)
class EnsembleReport:
    sample_count: int
    k_max: int
    d_cap: int
    rng_seed: int
    mean_hits: float
    std_error: float
    max_hits: int
    histogram: dict[int, int]
    expected_hits: float
    truncated: bool
    generator: str = GENERATOR
    counts: tuple[int, ...] = field(default=(), repr=False)


def ensemble_stats(cfg: OrbitConfig, workers: int = 1) -> EnsembleReport:
    """Hit counts for ``sample_count`` seeded random starting phases."""
    phases = random_phases(cfg.sample_count, cfg.rng_seed)
    _targets(cfg.d_cap)

    def one(x0):
        return _run(x0, cfg.k_max, cfg.d_cap, 0)[:2]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, phases))
    else:
        results = [one(x) for x in phases]
    counts = np.array([c for c, _ in results], dtype=np.float64)
    n = len(counts)
    std_error = float(counts.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    ints = tuple(int(c) for c, _ in results)
    return EnsembleReport(
        sample_count=n,
        k_max=cfg.k_max,
        d_cap=cfg.d_cap,
        rng_seed=cfg.rng_seed,
        mean_hits=float(counts.mean()),
        std_error=std_error,
        max_hits=max(ints),
        histogram=dict(sorted(Counter(ints).items())),
        expected_hits=expected_hit_count(cfg.k_max, cfg.d_cap),
        truncated=any(t for _, t in results),
        counts=ints,
    )


def shifted_phase(x0: str, steps: int) -> str:
    """Decimal string of ``x0 + steps*C`` in the fixed-point representation."""
    x = (phase_from_decimal(x0) + steps * LOG10_2_FIXED) % FIXED_ONE
    return fixed_to_decimal(x)


def format_orbit_report(r: OrbitReport) -> str:
    lines = [
        f"x0={r.x0}",
        f"k_max={r.k_max}",
        f"d_cap={r.d_cap}",
        f"hit_count={r.hit_count}",
        f"truncated={str(r.truncated).lower()}",
        "k",
    ]
    lines.extend(str(k) for k in r.hit_ks)
    return "\n".join(lines) + "\n"


def format_ensemble_report(r: EnsembleReport) -> str:
    lines = [
        f"samples={r.sample_count}",
        f"k_max={r.k_max}",
        f"d_cap={r.d_cap}",
        f"seed={r.rng_seed}",
        f"generator={r.generator}",
        f"mean_hits={r.mean_hits:.6f}",
        f"std_error={r.std_error:.6f}",
        f"expected_hits={r.expected_hits:.6f}",
        f"max_hits={r.max_hits}",
        f"truncated={str(r.truncated).lower()}",
        "hit_count\tsamples",
    ]
    lines.extend(f"{h}\t{n}" for h, n in r.histogram.items())
    return "\n".join(lines) + "\n"
