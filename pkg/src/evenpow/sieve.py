"""Trailing-digit sieve over ranges of exponents.

If ``2**n`` has only even digits, every digit of ``2**(n-1)`` is at most 4,
and in particular so are its last D digits.  The sieve tests that necessary
condition on ``2**p mod 10**D`` for each p in a range.  It can report false
positives but never misses a genuine solution.

The range is processed in segments of ``checkpoint_interval`` exponents.
Each segment is split among workers; the calling thread collects hits,
verifies small ones exactly, appends them to the hit log and rewrites the
checkpoint.  Workers run GIL-free compiled kernels and share nothing.
"""

from __future__ import annotations

import logging
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import CheckpointError, ConfigError
from .exact import EXACT_LIMIT, Status, verify_even_power
from .residue import (
    DEFAULT_DIGITS,
    MAX_DIGITS,
    Residue,
    pow2_mod,
    top_modulus,
)

log = logging.getLogger(__name__)

CHECKPOINT_MAGIC = "evenpow-checkpoint v1"
MIN_SIEVE_DIGITS = 18
PARTITIONS = ("blocks", "stride")
_HIT_BUFFER = 4096


@dataclass(frozen=True)
class ScanConfig:
    p_start: int
    p_end: int
    digits: int = DEFAULT_DIGITS
    workers: int = 1
    partition: str = "blocks"
    checkpoint_path: Optional[Path] = None
    checkpoint_interval: int = 10**8
    verify_limit: int = EXACT_LIMIT
    hits_path: Optional[Path] = None

    def __post_init__(self):
        if self.p_start < 0:
            raise ConfigError(f"p_start must be nonnegative, got {self.p_start}")
        if self.p_end < self.p_start:
            raise ConfigError(f"p_end={self.p_end} is below p_start={self.p_start}")
        if not MIN_SIEVE_DIGITS <= self.digits <= MAX_DIGITS:
            raise ConfigError(
                f"digit width D={self.digits} outside [{MIN_SIEVE_DIGITS}, {MAX_DIGITS}]"
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.partition not in PARTITIONS:
            raise ConfigError(f"partition must be one of {PARTITIONS}, got {self.partition!r}")
        if self.checkpoint_interval < 1:
            raise ConfigError("checkpoint_interval must be at least 1")
        if self.verify_limit > EXACT_LIMIT:
            raise ConfigError(f"verify_limit={self.verify_limit} exceeds exact limit {EXACT_LIMIT}")


@dataclass(frozen=True)
class SieveHit:
    p: int
    tail_digits: str
    verified: Status = Status.UNVERIFIED
    wall_time: Optional[float] = None

    @property
    def n(self) -> int:
        return self.p + 1

    def to_line(self) -> str:
        return f"{self.p}\t{self.n}\t{self.tail_digits}\t{self.verified}\n"

    @classmethod
    def from_line(cls, line: str) -> SieveHit:
        try:
            p, n, tail, status = line.rstrip("\n").split("\t")
            hit = cls(int(p), tail, Status(status))
        except ValueError:
            raise CheckpointError(f"malformed hit record: {line!r}") from None
        if hit.n != int(n) or not set(tail) <= set("01234"):
            raise CheckpointError(f"inconsistent hit record: {line!r}")
        return hit


@dataclass(frozen=True)
class Checkpoint:
    digits: int
    next_p: int
    hits: tuple[SieveHit, ...] = ()

    def dumps(self) -> str:
        head = f"{CHECKPOINT_MAGIC}\nD={self.digits}\nnext_p={self.next_p}\n"
        return head + "".join(h.to_line() for h in self.hits)

    @classmethod
    def loads(cls, text: str) -> Checkpoint:
        lines = text.splitlines()
        if len(lines) < 3 or lines[0] != CHECKPOINT_MAGIC:
            raise CheckpointError("not an evenpow v1 checkpoint")
        try:
            key_d, digits = lines[1].split("=")
            key_p, next_p = lines[2].split("=")
            if (key_d, key_p) != ("D", "next_p"):
                raise ValueError
            digits, next_p = int(digits), int(next_p)
        except ValueError:
            raise CheckpointError("malformed checkpoint header") from None
        hits = tuple(SieveHit.from_line(line) for line in lines[3:] if line)
        if any(h.p >= next_p for h in hits):
            raise CheckpointError("checkpoint records a hit at or beyond next_p")
        return cls(digits, next_p, hits)

    @classmethod
    def read(cls, path: Path) -> Checkpoint:
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    def write(self, path: Path) -> None:
        """Write atomically: temp file in the same directory, then rename."""
        path = Path(path)
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(self.dumps())
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise


@dataclass(frozen=True)
class WorkerPlan:
    """Exponents ``seed, seed+step, ..., seed+(count-1)*step``."""

    seed: int
    step: int
    count: int

    def exponents(self) -> range:
        return range(self.seed, self.seed + self.step * self.count, self.step)


def partition_range(p_start: int, p_end: int, workers: int, strategy: str = "blocks") -> list[WorkerPlan]:
    """Split ``[p_start, p_end]`` among workers with no gaps or overlaps.

    ``stride`` gives worker t every exponent congruent to ``p_start + t``
    modulo the worker count.  ``blocks`` gives contiguous runs whose sizes
    differ by at most one.  Workers left with nothing get no plan.
    """
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")
    total = p_end - p_start + 1
    if total <= 0:
        return []
    if strategy == "stride":
        plans = [
            WorkerPlan(p_start + t, workers, (total - t + workers - 1) // workers)
            for t in range(workers)
        ]
    elif strategy == "blocks":
        size, extra = divmod(total, workers)
        plans = []
        seed = p_start
        for t in range(workers):
            count = size + (t < extra)
            plans.append(WorkerPlan(seed, 1, count))
            seed += count
    else:
        raise ConfigError(f"unknown partition strategy {strategy!r}")
    return [p for p in plans if p.count > 0]


def _halves(r: Residue) -> np.ndarray:
    h = 10**9
    return np.array([x for limb in r.limbs for x in (limb % h, limb // h)], dtype=np.uint64)


def run_plan(plan: WorkerPlan, digits: int) -> list[int]:
    """Exponents in ``plan`` whose residue mod ``10**digits`` has digits <= 4."""
    state = np.array(pow2_mod(plan.seed, digits).limbs, dtype=np.uint64)
    top = np.uint64(top_modulus(digits))
    out = np.empty(_HIT_BUFFER, dtype=np.int64)
    mult = _halves(pow2_mod(plan.step, digits)) if plan.step != 1 else None
    hits = []
    done = 0
    while done < plan.count:
        if mult is None:
            found, processed = _kernels.scan_doubling(state, top, plan.count - done, out)
        else:
            found, processed = _kernels.scan_stride(state, mult, top, plan.count - done, out)
        hits.extend(plan.seed + (done + int(i)) * plan.step for i in out[:found])
        done += processed
    return hits


@dataclass(frozen=True)
class ScanReport:
    hits: tuple[SieveHit, ...]
    exponents_scanned: int
    elapsed: float
    resumed_from: Optional[int] = None

    @property
    def throughput(self) -> float:
        return self.exponents_scanned / self.elapsed if self.elapsed > 0 else float("inf")


def _load_resume(cfg: ScanConfig) -> Optional[Checkpoint]:
    path = cfg.checkpoint_path
    if path is None or not Path(path).exists():
        return None
    cp = Checkpoint.read(path)
    if cp.digits != cfg.digits:
        raise CheckpointError(f"checkpoint {path} has D={cp.digits}, scan requested D={cfg.digits}")
    if not cfg.p_start <= cp.next_p <= cfg.p_end + 1:
        raise CheckpointError(
            f"checkpoint next_p={cp.next_p} outside scan range [{cfg.p_start}, {cfg.p_end}]"
        )
    return cp


def _make_hit(p: int, cfg: ScanConfig) -> SieveHit:
    tail = pow2_mod(p, cfg.digits).tail_digits()
    status = verify_even_power(p + 1) if p + 1 <= cfg.verify_limit else Status.UNVERIFIED
    return SieveHit(p, tail, status, time.time())


def scan_range(
    cfg: ScanConfig,
    on_checkpoint: Optional[Callable[[int, tuple[SieveHit, ...]], None]] = None,
) -> ScanReport:
    """Sieve every exponent in ``[cfg.p_start, cfg.p_end]``.

    With a checkpoint file present the scan resumes at its ``next_p`` and
    keeps its recorded hits; the hit log is rewritten to match the
    checkpoint before appending, so a crash between checkpoints leaves no
    duplicates.  ``on_checkpoint(next_p, hits)`` runs after each checkpoint
    write.
    """
    cp = _load_resume(cfg)
    hits = list(cp.hits) if cp else []
    next_p = cp.next_p if cp else cfg.p_start

    # probe writability before any scanning
    if cfg.checkpoint_path is not None:
        Checkpoint(cfg.digits, next_p, tuple(hits)).write(cfg.checkpoint_path)
    hit_log = None
    if cfg.hits_path is not None:
        hit_log = open(cfg.hits_path, "w", encoding="utf-8")
        hit_log.writelines(h.to_line() for h in hits)
        hit_log.flush()

    start_p = next_p
    t0 = time.perf_counter()
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        while next_p <= cfg.p_end:
            # boundaries stay aligned to p_start across resumes
            done = next_p - cfg.p_start
            seg_end = min(cfg.p_end, cfg.p_start + (done // cfg.checkpoint_interval + 1) * cfg.checkpoint_interval - 1)
            plans = partition_range(next_p, seg_end, cfg.workers, cfg.partition)
            if pool is None:
                found = [run_plan(plan, cfg.digits) for plan in plans]
            else:
                found = list(pool.map(run_plan, plans, [cfg.digits] * len(plans)))
            for p in sorted(p for chunk in found for p in chunk):
                hit = _make_hit(p, cfg)
                log.info("hit p=%d n=%d %s", hit.p, hit.n, hit.verified)
                hits.append(hit)
                if hit_log is not None:
                    hit_log.write(hit.to_line())
                    hit_log.flush()
            next_p = seg_end + 1
            if cfg.checkpoint_path is not None:
                Checkpoint(cfg.digits, next_p, tuple(hits)).write(cfg.checkpoint_path)
            elapsed = time.perf_counter() - t0
            log.info(
                "scanned through p=%d (%.3g exponents/s)",
                seg_end,
                (next_p - start_p) / elapsed if elapsed else float("inf"),
            )
            if on_checkpoint is not None:
                on_checkpoint(next_p, tuple(hits))
    finally:
        if pool is not None:
            pool.shutdown()
        if hit_log is not None:
            hit_log.close()
    return ScanReport(
        hits=tuple(hits),
        exponents_scanned=next_p - start_p,
        elapsed=time.perf_counter() - t0,
        resumed_from=cp.next_p if cp else None,
    )


def format_scan_report(report: ScanReport, cfg: ScanConfig) -> str:
    lines = [
        f"range=[{cfg.p_start}, {cfg.p_end}]",
        f"digits={cfg.digits}",
        f"workers={cfg.workers}",
        f"partition={cfg.partition}",
    ]
    if report.resumed_from is not None:
        lines.append(f"resumed_from={report.resumed_from}")
    lines += [
        f"exponents_scanned={report.exponents_scanned}",
        f"elapsed_s={report.elapsed:.3f}",
        f"throughput={report.throughput:.4g} exponents/s",
        f"hits={len(report.hits)}",
        "p\tn\ttail_digits\tstatus",
    ]
    lines.extend(h.to_line().rstrip("\n") for h in report.hits)
    return "\n".join(lines) + "\n"

