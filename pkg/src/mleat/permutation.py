"""Permutation p-values for a difference-of-sums statistic.

Given pooled per-stimulus values ``v`` whose first ``n_first`` entries form
the observed first group, the statistic of a split is
``sum(first part) - sum(second part)``. Exact mode enumerates every way of
choosing the first part; Monte Carlo draws splits by seeded shuffles.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import PartitionOverflow

DEFAULT_SAMPLES = 100_000
DEFAULT_EXACT_LIMIT = 200_000
MC_CHUNK = 8192
# relative width within which two split statistics count as tied
TIE_RTOL = 1e-11


class Mode(str, enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"
    AUTO = "auto"


_MODE_ALIASES = {"mc": Mode.MONTE_CARLO, "montecarlo": Mode.MONTE_CARLO, "monte-carlo": Mode.MONTE_CARLO}


@dataclass(frozen=True)
class PermutationStrategy:
    mode: Mode = Mode.AUTO
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    exact_limit: int = DEFAULT_EXACT_LIMIT
    workers: int = 1

    def __post_init__(self):
        mode = _MODE_ALIASES.get(str(self.mode).lower(), self.mode)
        object.__setattr__(self, "mode", Mode(mode))
        if self.samples <= 0 or self.exact_limit <= 0 or self.workers <= 0:
            raise ValueError("samples, exact_limit and workers must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def resolve(self, n_first: int, n_second: int) -> Mode:
        """Concrete mode for a split of sizes (n_first, n_second)."""
        if self.mode is not Mode.AUTO:
            return self.mode
        if n_first == n_second and math.comb(n_first + n_second, n_first) <= self.exact_limit:
            return Mode.EXACT
        return Mode.MONTE_CARLO

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        del d["workers"]
        return d


@dataclass(frozen=True)
class PermutationResult:
    p_greater: float
    p_less: float
    p_equal: float
    mode: Mode
    permutations: int
    observed: float
    diagnostic: str = ""


def split_statistic(values: np.ndarray, n_first: int) -> float:
    v = np.asarray(values, dtype=np.float64)
    return math.fsum(v[:n_first]) - math.fsum(v[n_first:])


def _tolerance(values: np.ndarray) -> float:
    return TIE_RTOL * max(1.0, math.fsum(np.abs(values)))


def _split_stats(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, values, 0.0).sum(axis=1) - np.where(mask, 0.0, values).sum(axis=1)


def _exact(values: np.ndarray, n_first: int) -> PermutationResult:
    N = values.size
    combos = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(N), n_first)),
                         dtype=np.intp).reshape(-1, n_first)
    mask = np.zeros((combos.shape[0], N), dtype=bool)
    np.put_along_axis(mask, combos, True, axis=1)
    stats = _split_stats(values, mask)
    # the first combination is the observed split, evaluated by the same arithmetic
    observed = stats[0]
    tol = _tolerance(values)
    total = stats.size
    greater = int(np.count_nonzero(stats > observed + tol))
    less = int(np.count_nonzero(stats < observed - tol))
    equal = total - greater - less
    diag = "all splits tie with the observed statistic" if equal == total else ""
    return PermutationResult(greater / total, less / total, equal / total, Mode.EXACT, total,
                             float(observed), diag)


def _mc_chunk(values: np.ndarray, n_first: int, size: int, seed_seq: np.random.SeedSequence,
              observed: float, tol: float) -> tuple[int, int, int]:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    perms = rng.permuted(np.tile(np.arange(values.size), (size, 1)), axis=1)
    mask = np.zeros(perms.shape, dtype=bool)
    np.put_along_axis(mask, perms[:, :n_first], True, axis=1)
    stats = _split_stats(values, mask)
    g = int(np.count_nonzero(stats > observed + tol))
    le = int(np.count_nonzero(stats < observed - tol))
    return g, le, size - g - le


def _monte_carlo(values: np.ndarray, n_first: int, samples: int, seed: int, workers: int) -> PermutationResult:
    N = values.size
    observed = float(_split_stats(values, (np.arange(N) < n_first)[None, :])[0])
    tol = _tolerance(values)
    n_chunks = -(-samples // MC_CHUNK)
    sizes = [MC_CHUNK] * (n_chunks - 1) + [samples - MC_CHUNK * (n_chunks - 1)]
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)
    args = [(values, n_first, s, ss, observed, tol) for s, ss in zip(sizes, seeds)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _mc_chunk(*a), args))
    else:
        parts = [_mc_chunk(*a) for a in args]
    g, le, eq = (sum(p[i] for p in parts) for i in range(3))
    diag = "all sampled splits tie with the observed statistic" if eq == samples else ""
    return PermutationResult((g + 1) / (samples + 1), (le + 1) / (samples + 1), eq / samples,
                             Mode.MONTE_CARLO, samples, observed, diag)


def permutation_test(values, n_first: int, strategy: PermutationStrategy | None = None) -> PermutationResult:
    """p-values for the observed split of ``values`` at ``n_first``.

    Exact mode returns literal fractions over all C(N, n_first) splits,
    with ties (within a tiny relative tolerance) reported in ``p_equal``.
    Monte Carlo smooths with (count + 1) / (samples + 1).
    """
    strategy = strategy or PermutationStrategy()
    v = np.ascontiguousarray(values, dtype=np.float64)
    n_second = v.size - n_first
    if n_first <= 0 or n_second <= 0:
        raise ValueError("both sides of the split must be non-empty")
    mode = strategy.resolve(n_first, n_second)
    if mode is Mode.EXACT:
        count = math.comb(v.size, n_first)
        if count > strategy.exact_limit:
            raise PartitionOverflow(f"{count} splits exceed exact_limit={strategy.exact_limit}")
        return _exact(v, n_first)
    return _monte_carlo(v, n_first, strategy.samples, strategy.seed, strategy.workers)
