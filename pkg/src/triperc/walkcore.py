"""Lattice walks with steps a=(1,0), b=(0,1), c=(-1,-1).

Steps are numbered from 1 and positions from 0: step ``i`` moves the walk
from position ``i-1`` to position ``i``.  A time ``j`` is an *ancestor* of an
earlier time ``i`` (``j < i`` is excluded) when both coordinates at ``j`` are
strictly below their values on ``[i, j-1]``.

The matching of steps is computed with monotone stacks.  A c-step at ``j``
is an ancestor of ``i < j`` exactly when every step it matches lies at or
before ``i``; all ancestor queries below reduce to that observation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import IndexOutOfRange, InvalidInput

A_STEP, B_STEP, C_STEP = 0, 1, 2
_LETTERS = "abc"
_CODE = {"a": A_STEP, "b": B_STEP, "c": C_STEP}
_DX = np.array([1, 0, -1], dtype=np.int64)
_DY = np.array([0, 1, -1], dtype=np.int64)

# scaling constants of the rescaled observables
SCALE_A = (2.0 / 3.0) ** 0.25
SCALE_B = 3.0
SCALE_C = (3.0 / 2.0) ** 0.5
SCALE_S = 6.0 * SCALE_C ** 1.5


@dataclass(frozen=True, eq=False)
class Walk:
    """A word over ``{a, b, c}`` started from ``start = (ell_L, ell_R)``."""

    start: tuple[int, int]
    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int8)
        if codes.ndim != 1 or (codes.size and (codes.min() < 0 or codes.max() > 2)):
            raise InvalidInput("step codes must be 0 (a), 1 (b) or 2 (c)")
        codes = codes.copy()
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "start", (int(self.start[0]), int(self.start[1])))

    # construction -------------------------------------------------------
    @classmethod
    def from_word(cls, word: str, start=(0, 0)) -> "Walk":
        try:
            codes = np.fromiter((_CODE[ch] for ch in word), dtype=np.int8, count=len(word))
        except KeyError as exc:
            raise InvalidInput(f"letter {exc} is not in the alphabet abc") from exc
        return cls(tuple(start), codes)

    @classmethod
    def from_text(cls, text: str) -> "Walk":
        lines = text.strip().splitlines()
        if not lines:
            raise InvalidInput("empty walk document")
        try:
            lL, lR = (int(x) for x in lines[0].split())
        except ValueError as exc:
            raise InvalidInput("first line must hold two integers") from exc
        word = lines[1].strip() if len(lines) > 1 else ""
        return cls.from_word(word, (lL, lR))

    def to_text(self) -> str:
        return f"{self.start[0]} {self.start[1]}\n{self.word}\n"

    # basic views ----------------------------------------------------------
    @property
    def word(self) -> str:
        return "".join(_LETTERS[c] for c in self.codes)

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    @property
    def N(self) -> int:
        return len(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Walk):
            return NotImplemented
        return self.start == other.start and np.array_equal(self.codes, other.codes)

    def __hash__(self):
        return hash((self.start, self.codes.tobytes()))

    def __repr__(self) -> str:
        w = self.word if len(self) <= 40 else self.word[:37] + "..."
        return f"Walk(start={self.start}, word={w!r})"

    @cached_property
    def L(self) -> np.ndarray:
        out = np.empty(len(self) + 1, dtype=np.int64)
        out[0] = self.start[0]
        np.cumsum(_DX[self.codes], out=out[1:])
        out[1:] += self.start[0]
        out.setflags(write=False)
        return out

    @cached_property
    def R(self) -> np.ndarray:
        out = np.empty(len(self) + 1, dtype=np.int64)
        out[0] = self.start[1]
        np.cumsum(_DY[self.codes], out=out[1:])
        out[1:] += self.start[1]
        out.setflags(write=False)
        return out

    def positions(self) -> np.ndarray:
        return np.stack([self.L, self.R], axis=1)

    def step(self, i: int) -> int:
        """Code of step ``i`` (1-based)."""
        if not 1 <= i <= len(self):
            raise IndexOutOfRange(f"step {i} outside [1, {len(self)}]")
        return int(self.codes[i - 1])

    def counts(self) -> tuple[int, int, int]:
        c = np.bincount(self.codes, minlength=3)
        return int(c[0]), int(c[1]), int(c[2])

    def inner_count(self) -> int:
        """``n`` such that ``N = 3n + 2 ell_L + 2 ell_R + 1`` (only meaningful for members)."""
        return (len(self) - 2 * self.start[0] - 2 * self.start[1] - 1) // 3

    def segment(self, first_step: int, last_step: int, start=None) -> "Walk":
        """Sub-walk made of steps ``first_step..last_step`` (1-based, inclusive)."""
        if start is None:
            start = (int(self.L[first_step - 1]), int(self.R[first_step - 1]))
        return Walk(tuple(start), self.codes[first_step - 1:last_step])

    # matching -------------------------------------------------------------
    @cached_property
    def _matching(self):
        return _matching_arrays(self.codes, self.L, self.R)

    @property
    def match_of(self) -> np.ndarray:
        """For a- and b-steps, the matching c-step (0 if none), indexed by step."""
        return self._matching[0]

    @property
    def match_a(self) -> np.ndarray:
        """For c-steps, the matching a-step (0 if none), indexed by step."""
        return self._matching[1]

    @property
    def match_b(self) -> np.ndarray:
        """For c-steps, the matching b-step (0 if none), indexed by step."""
        return self._matching[2]

    @cached_property
    def ancestor_key(self) -> np.ndarray:
        """``key[j]`` for a c-step ``j``: ``j`` is an ancestor of ``i < j`` iff ``key[j] <= i``.

        Non-c steps get a key larger than any index.
        """
        key = np.maximum(self.match_a, self.match_b)
        big = len(self) + 1
        key = np.where(np.concatenate([[False], self.codes == C_STEP]), key, big)
        key[0] = big
        key.setflags(write=False)
        return key


def _matching_arrays(codes, L, R):
    N = codes.shape[0]
    match_of = np.zeros(N + 1, dtype=np.int64)
    match_a = np.zeros(N + 1, dtype=np.int64)
    match_b = np.zeros(N + 1, dtype=np.int64)
    if N == 0:
        return match_of, match_a, match_b
    from ._kernels import matching_kernel

    matching_kernel(codes, L, R, match_of, match_a, match_b)
    for arr in (match_of, match_a, match_b):
        arr.setflags(write=False)
    return match_of, match_a, match_b


# ---------------------------------------------------------------------------
# predicates and queries


def precedes(w: Walk, j: int, i: int) -> bool:
    """Direct test of ``j`` being an ancestor of ``i`` (quadratic reference)."""
    if not i < j:
        return False
    L, R = w.L, w.R
    return bool(np.all(L[i:j] > L[j]) and np.all(R[i:j] > R[j]))


def is_member(w: Walk, n: int | None = None, ell_L: int | None = None, ell_R: int | None = None) -> bool:
    """Membership in the walk family with ``n`` inner vertices and boundary ``(ell_L, ell_R)``.

    Arguments left as ``None`` are read off the walk.
    """
    lL, lR = w.start
    if ell_L is None:
        ell_L = lL
    if ell_R is None:
        ell_R = lR
    N = len(w)
    if n is None:
        n = (N - 2 * ell_L - 2 * ell_R - 1) // 3
    if n < 0 or ell_L < 0 or ell_R < 0:
        return False
    if (lL, lR) != (ell_L, ell_R) or N != 3 * n + 2 * ell_L + 2 * ell_R + 1:
        return False
    L, R = w.L, w.R
    if L[-1] != -1 or R[-1] != -1:
        return False
    # first simultaneous strict running minimum after time 0 must be N
    runL = np.minimum.accumulate(L[:-1])
    runR = np.minimum.accumulate(R[:-1])
    hits = (L[1:] < runL) & (R[1:] < runR)
    first = int(np.argmax(hits)) + 1 if hits.any() else -1
    return first == N


def matching_step(w: Walk, i: int, coordinate: str | None = None) -> int | None:
    """Matching partner of step ``i`` (1-based), or ``None``.

    For an a-step (b-step) the partner is the c-step where the first (second)
    coordinate first returns to its level before step ``i``.  A c-step can be
    matched on both coordinates; ``coordinate='L'`` or ``'R'`` selects one, and
    the default returns the a-step partner when it exists and the b-step
    partner otherwise.
    """
    N = len(w)
    if not 1 <= i <= N:
        raise IndexOutOfRange(f"step {i} outside [1, {N}]")
    code = int(w.codes[i - 1])
    if code != C_STEP:
        j = int(w.match_of[i])
        return j or None
    a, b = int(w.match_a[i]), int(w.match_b[i])
    if coordinate == "L":
        return a or None
    if coordinate == "R":
        return b or None
    if coordinate is not None:
        raise InvalidInput("coordinate must be 'L', 'R' or None")
    return a or b or None


def ancestor_free_times(w: Walk, t: int) -> np.ndarray:
    """Times ``i <= t`` such that no ``j`` in ``[i, t]`` is an ancestor of ``i``."""
    N = len(w)
    if not 0 <= t <= N:
        raise IndexOutOfRange(f"time {t} outside [0, {N}]")
    key = w.ancestor_key[: t + 1]
    # suffix minimum over j in (i, t]
    suffix = np.empty(t + 1, dtype=np.int64)
    suffix[t] = N + 1
    if t > 0:
        suffix[:t] = np.minimum.accumulate(key[1:][::-1])[::-1]
    i = np.arange(t + 1)
    return np.nonzero(suffix > i)[0].astype(np.int64)


def cone_points(w: Walk, i: int, m: int | None = None) -> np.ndarray:
    """All ``xi`` in ``[i+1, m]`` that are ancestors of ``i`` (``m`` defaults to ``N``)."""
    N = len(w)
    if m is None:
        m = N
    if not 0 <= i <= N or not 0 <= m <= N:
        raise IndexOutOfRange("time outside the walk")
    key = w.ancestor_key
    js = np.arange(i + 1, m + 1)
    return js[key[i + 1:m + 1] <= i].astype(np.int64)


def first_ancestor(w: Walk, i: int, lo: int | None = None, hi: int | None = None) -> int | None:
    """Smallest ``j`` in ``[lo, hi]`` that is an ancestor of ``i``."""
    N = len(w)
    lo = i + 1 if lo is None else max(lo, i + 1)
    hi = N if hi is None else hi
    key = w.ancestor_key[lo:hi + 1]
    hit = np.nonzero(key <= i)[0]
    return int(lo + hit[0]) if hit.size else None


def rescale(w: Walk, n: float):
    """Rescaled walk on the grid ``k / (b n)``: returns ``(times, values)``.

    ``values[k] = c^{-1} n^{-1/2} (L_k, R_k)`` with ``b = 3`` and ``c = sqrt(3/2)``.
    """
    if n <= 0:
        raise InvalidInput("scale must be positive")
    k = np.arange(len(w) + 1)
    times = k / (SCALE_B * n)
    values = w.positions() / (SCALE_C * np.sqrt(n))
    return times, values


def rescale_at(w: Walk, n: float, t) -> np.ndarray:
    """Evaluate the piecewise-constant rescaled walk at real times ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.floor(SCALE_B * n * t + 1e-12).astype(np.int64)
    k = np.clip(k, 0, len(w))
    return w.positions()[k] / (SCALE_C * np.sqrt(n))
