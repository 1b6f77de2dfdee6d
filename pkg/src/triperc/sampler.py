"""Boltzmann sampling of percolated triangulations through their walk encoding.

Two samplers produce member walks with probability proportional to
``3^{-N}``:

* :func:`sample_walk` runs i.i.d. uniform steps until a coordinate turns
  negative and accepts when the walk exits at ``(-1, -1)``;
* :func:`sample_walk_peeling` runs the peeling chain whose transition
  probabilities are ratios of the total weights ``W_k`` of boundary sum
  ``k = ell_L + ell_R``.  It never rejects, which makes large boundaries
  (and hence long walks) cheap.

Every random draw is derived from a 64-bit seed through
``numpy.random.SeedSequence``; sample ``i`` of a stream uses the substream
``(seed, i)`` so that results do not depend on how samples are split
between workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, lgamma, log

import numpy as np

from . import combmap
from ._kernels import peeling_walk, rejection_rate, rejection_walk, seed_kernel
from .combmap import RED, Triangulation
from .errors import BudgetExceeded, InvalidInput
from .matebij import phi_inverse
from .walkcore import Walk, is_member

DEFAULT_MAX_STEPS = 10_000_000
ENUMERATION_LIMIT = 22


@dataclass(frozen=True)
class SamplerConfig:
    """``boundary`` is ``(ell_L, ell_R)`` or a monochromatic boundary length ``ell >= 2``."""

    boundary: tuple[int, int] | int = (0, 0)
    seed: int = 0
    max_steps: int = DEFAULT_MAX_STEPS
    fixed_n: int | None = None
    max_attempts: int = 10_000_000
    split: tuple[int, int] = field(init=False)

    def __post_init__(self):
        b = self.boundary
        if isinstance(b, (int, np.integer)):
            if b < 2:
                raise InvalidInput("a monochromatic boundary has length at least 2")
            split = (int(b) - 2, 0)
        else:
            split = (int(b[0]), int(b[1]))
        if min(split) < 0:
            raise InvalidInput("boundary lengths must be nonnegative")
        if self.max_steps < 2 * split[0] + 2 * split[1] + 1:
            raise InvalidInput("max_steps is shorter than the shortest member walk")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInput("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "split", split)


@dataclass(frozen=True)
class Truncated:
    """No walk accepted: every attempt was rejected or hit ``max_steps``."""

    attempts: int
    truncated_attempts: int


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def _seed_kernel_from(rng: np.random.Generator) -> None:
    seed_kernel(int(rng.integers(0, 2**32 - 1)))


def _expected_length(split, n):
    return 3 * n + 2 * split[0] + 2 * split[1] + 1


# ---------------------------------------------------------------------------
# rejection sampler


def sample_walk(cfg: SamplerConfig, rng: np.random.Generator | None = None) -> Walk | Truncated:
    """Rejection sample from i.i.d. uniform steps.

    With both boundary arcs nonempty, exiting at ``(-1, -1)`` no longer
    implies membership, so accepted walks are additionally filtered by
    :func:`is_member`.  ``fixed_n`` rejects on the number of inner vertices.
    """
    rng = substream(cfg.seed) if rng is None else rng
    _seed_kernel_from(rng)
    lL, lR = cfg.split
    buf = np.empty(cfg.max_steps, dtype=np.int8)
    attempts = truncated = 0
    while attempts < cfg.max_attempts:
        n, a, t = rejection_walk(lL, lR, cfg.max_steps, cfg.max_attempts - attempts, buf)
        attempts += a
        truncated += t
        if n < 0:
            break
        w = Walk((lL, lR), buf[:n])
        if lL > 0 and lR > 0 and not is_member(w):
            continue
        if cfg.fixed_n is not None and n != _expected_length(cfg.split, cfg.fixed_n):
            continue
        return w
    return Truncated(attempts, truncated)


def acceptance_rate(ell_L: int, ell_R: int, attempts: int, seed: int = 0,
                    max_steps: int = DEFAULT_MAX_STEPS) -> tuple[float, float]:
    """Fraction of i.i.d. attempts exiting at ``(-1, -1)`` and fraction truncated."""
    _seed_kernel_from(substream(seed))
    acc, trunc = rejection_rate(ell_L, ell_R, attempts, max_steps)
    return acc / attempts, trunc / attempts


# ---------------------------------------------------------------------------
# exact peeling sampler


def log_W(kmax: int) -> np.ndarray:
    """``log W_k`` for ``k = 0..kmax``, where ``W_k = Z_k 3^{-(2k+1)}``."""
    k = np.arange(kmax, dtype=np.float64)
    out = np.empty(kmax + 1)
    out[0] = log(3.0 / 8.0)
    out[1:] = out[0] + np.cumsum(np.log((2 * k + 1) / (2 * (k + 3))))
    return out


_LOG_W_CACHE = [log_W(1024)]


def _log_w_upto(kmax: int) -> np.ndarray:
    if _LOG_W_CACHE[0].shape[0] <= kmax:
        _LOG_W_CACHE[0] = log_W(max(kmax, 2 * _LOG_W_CACHE[0].shape[0]))
    return _LOG_W_CACHE[0]


def Z_ell(ell: int) -> float:
    """Partition function of the walks started from ``(ell, 0)``."""
    return comb(2 * ell, ell) / ((ell + 1) * (ell + 2)) * (9 / 4) ** (ell + 1)


def log_Z_ell(ell: int) -> float:
    return lgamma(2 * ell + 1) - lgamma(ell + 1) - lgamma(ell + 3) + (ell + 1) * log(9 / 4)


def sample_walk_peeling(cfg: SamplerConfig, rng: np.random.Generator | None = None) -> Walk | Truncated:
    """Exact Boltzmann sample produced by the peeling chain (no rejection on the boundary)."""
    rng = substream(cfg.seed) if rng is None else rng
    _seed_kernel_from(rng)
    lL, lR = cfg.split
    lw = _log_w_upto(lL + lR + cfg.max_steps + 2)
    buf = np.empty(cfg.max_steps, dtype=np.int8)
    for attempt in range(1, cfg.max_attempts + 1):
        n = peeling_walk(lL, lR, lw, cfg.max_steps, buf)
        if n == -2:
            raise RuntimeError("peeling chain lost its probability mass")
        if n < 0:
            continue
        if cfg.fixed_n is not None and n != _expected_length(cfg.split, cfg.fixed_n):
            continue
        return Walk((lL, lR), buf[:n])
    return Truncated(cfg.max_attempts, 0)


def sample_walk_in_window(split, lo: int, hi: int, rng: np.random.Generator,
                          max_attempts: int = 1_000_000) -> Walk:
    """Peeling sample conditioned on ``lo <= N <= hi``."""
    cfg = SamplerConfig(split, max_steps=max(hi, 2 * sum(split) + 1), max_attempts=1)
    lw = _log_w_upto(sum(split) + cfg.max_steps + 2)
    buf = np.empty(cfg.max_steps, dtype=np.int8)
    _seed_kernel_from(rng)
    for _ in range(max_attempts):
        n = peeling_walk(split[0], split[1], lw, cfg.max_steps, buf)
        if lo <= n <= hi:
            return Walk(tuple(split), buf[:n])
    raise BudgetExceeded(f"no walk of length in [{lo}, {hi}] after {max_attempts} attempts")


def sample_walks(cfg: SamplerConfig, count: int, method: str = "rejection", offset: int = 0):
    """``count`` samples; sample ``i`` uses the substream ``(cfg.seed, offset + i)``."""
    fn = {"rejection": sample_walk, "peeling": sample_walk_peeling}[method]
    return [fn(cfg, substream(cfg.seed, offset + i)) for i in range(count)]


def sample_map(ell: int, rng: np.random.Generator | None = None, method: str = "peeling",
               max_steps: int = DEFAULT_MAX_STEPS) -> Triangulation:
    """Percolated Boltzmann triangulation with a red boundary of length ``ell``."""
    cfg = SamplerConfig(ell, max_steps=max_steps)
    fn = sample_walk_peeling if method == "peeling" else sample_walk
    rng = substream(0) if rng is None else rng
    while True:
        w = fn(cfg, rng)
        if isinstance(w, Walk):
            return combmap.restore_monochromatic(phi_inverse(w), RED)


# ---------------------------------------------------------------------------
# exhaustive enumeration


def iter_walks(ell_L: int, ell_R: int, N_max: int):
    """Member walks with at most ``N_max`` steps, by length then lexicographically."""
    if N_max > ENUMERATION_LIMIT:
        raise BudgetExceeded(f"N_max={N_max} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    base = 2 * ell_L + 2 * ell_R + 1
    for N in range(base, N_max + 1, 3):
        yield from _walks_of_length(ell_L, ell_R, N)


def _walks_of_length(ell_L, ell_R, N):
    # depth-first in lexicographic order; positions stay >= 0 and no simultaneous
    # strict new minimum may occur before the last step
    word = []

    def rec(x, y, mx, my):
        k = len(word)
        rem = N - k
        if rem == 0:
            if x == -1 and y == -1:
                yield "".join(word)
            return
        if rem < max(x, y) + 1:
            return
        for ch, nx, ny in (("a", x + 1, y), ("b", x, y + 1), ("c", x - 1, y - 1)):
            last = rem == 1
            if not last and (nx < 0 or ny < 0 or (nx < mx and ny < my)):
                continue
            word.append(ch)
            yield from rec(nx, ny, min(mx, nx), min(my, ny))
            word.pop()

    for w in rec(ell_L, ell_R, ell_L, ell_R):
        yield Walk.from_word(w, (ell_L, ell_R))


def enumerate_walks(ell_L: int, ell_R: int, N_max: int) -> list[Walk]:
    return list(iter_walks(ell_L, ell_R, N_max))


def count_by_inner(ell_L: int, ell_R: int, n_max: int) -> list[int]:
    """``#K(n; ell_L, ell_R)`` for ``n = 0..n_max``."""
    counts = [0] * (n_max + 1)
    for w in iter_walks(ell_L, ell_R, 3 * n_max + 2 * ell_L + 2 * ell_R + 1):
        counts[w.inner_count()] += 1
    return counts


@dataclass(frozen=True)
class PartitionCheck:
    partial_sums: list[float]
    target: float

    @property
    def ok(self) -> bool:
        s = self.partial_sums
        return all(a < b for a, b in zip(s, s[1:])) and s[-1] < self.target


def partition_check(ell: int, n_max: int) -> PartitionCheck:
    """Partial sums of ``#K^r(n; ell) 27^{-n}`` against ``Z_ell``."""
    counts = count_by_inner(ell, 0, n_max)
    sums = np.cumsum([c / 27.0**n for n, c in enumerate(counts)])
    return PartitionCheck([float(s) for s in sums], Z_ell(ell))
