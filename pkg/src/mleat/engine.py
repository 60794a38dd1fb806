"""The three ML-EAT levels and the assembled per-test result."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field

import numpy as np

from .association import CellStats, association_s_values, association_u_values, cell_stats, cosine_matrix, fmean, fstd
from .embeddings import ResolvedGroup, validate_query
from .errors import DegenerateDistribution, MleatError, UnequalAttributeSizes, UnequalTargetSizes
from .permutation import Mode, PermutationResult, PermutationStrategy, permutation_test

DEFAULT_ALPHA = 0.05
DEFAULT_EFFECT_THRESHOLD = 0.2


@dataclass(frozen=True)
class Options:
    """Knobs that change how results are computed or judged."""

    alpha: float = DEFAULT_ALPHA
    effect_threshold: float = DEFAULT_EFFECT_THRESHOLD
    two_sided: bool = False
    population_std: bool = False
    allow_unequal: bool = False

    @property
    def ddof(self) -> int:
        return 0 if self.population_std else 1


@dataclass(frozen=True)
class EffectSize:
    d: float
    p_greater: float
    p_less: float
    p_equal: float
    significant: bool
    method: str = "exact"
    permutations: int = 0
    two_sided: bool = False
    diagnostic: str = ""

    @property
    def p_two_sided(self) -> float:
        return min(1.0, 2.0 * min(self.p_greater, self.p_less))

    @property
    def p_directional(self) -> float:
        """p-value in the direction of the sign of ``d`` (two-sided if configured)."""
        if self.two_sided:
            return self.p_two_sided
        return self.p_greater if self.d >= 0 else self.p_less

    def to_dict(self) -> dict:
        return {
            "d": self.d, "p_greater": self.p_greater, "p_less": self.p_less, "p_equal": self.p_equal,
            "significant": self.significant, "method": self.method, "permutations": self.permutations,
            "two_sided": self.two_sided, "diagnostic": self.diagnostic,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EffectSize":
        return cls(float(d["d"]), float(d["p_greater"]), float(d["p_less"]), float(d["p_equal"]),
                   bool(d["significant"]), d.get("method", "exact"), int(d.get("permutations", 0)),
                   bool(d.get("two_sided", False)), d.get("diagnostic", ""))


@dataclass(frozen=True)
class MlEatResult:
    level1: EffectSize
    level2_x: EffectSize
    level2_y: EffectSize
    level3: dict[str, CellStats]
    metadata: dict = field(default_factory=dict)

    CELLS = ("XA", "XB", "YA", "YB")

    def to_dict(self) -> dict:
        return {
            "level1": self.level1.to_dict(),
            "level2_x": self.level2_x.to_dict(),
            "level2_y": self.level2_y.to_dict(),
            "level3": {k: self.level3[k].to_dict() for k in self.CELLS},
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlEatResult":
        return cls(EffectSize.from_dict(d["level1"]), EffectSize.from_dict(d["level2_x"]),
                   EffectSize.from_dict(d["level2_y"]),
                   {k: CellStats.from_dict(d["level3"][k]) for k in cls.CELLS}, d.get("metadata", {}))


def standardized_difference(values, n_first: int, ddof: int = 1) -> float:
    """(mean of first part - mean of rest) / std of all values."""
    vals = np.asarray(values, dtype=np.float64).tolist()
    if len(set(vals)) <= 1:
        raise DegenerateDistribution("pooled association values are all identical")
    sd = fstd(vals, ddof=ddof)
    return (fmean(vals[:n_first]) - fmean(vals[n_first:])) / sd


def _level1_values(X, Y, A, B) -> np.ndarray:
    return association_s_values(np.vstack([X.vectors, Y.vectors]), A, B)


def _level2_values(T, A, B) -> np.ndarray:
    return association_u_values(T, np.vstack([_vecs(A), _vecs(B)]))


def _vecs(g):
    return g.vectors if hasattr(g, "vectors") else np.asarray(g, dtype=np.float64)


def _size(g) -> int:
    return len(g) if hasattr(g, "vectors") else np.atleast_2d(g).shape[0]


def level1_effect(X: ResolvedGroup, Y: ResolvedGroup, A: ResolvedGroup, B: ResolvedGroup, *, ddof: int = 1) -> float:
    """WEAT effect size of targets X vs Y over attributes A vs B."""
    return standardized_difference(_level1_values(X, Y, A, B), len(X), ddof)


def level2_effect(T, A, B, *, ddof: int = 1) -> float:
    """Effect size of one target group's differential association with A vs B."""
    return standardized_difference(_level2_values(T, A, B), _size(A), ddof)


def sc_eat(w, A, B, *, ddof: int = 1) -> float:
    """Single-category EAT of one vector ``w`` against attributes A and B."""
    cos = cosine_matrix(np.atleast_2d(np.asarray(w, dtype=np.float64)), np.vstack([_vecs(A), _vecs(B)]))[0]
    return standardized_difference(cos, _size(A), ddof)


def _check_exact(strategy: PermutationStrategy, n1: int, n2: int, exc) -> None:
    if n1 != n2 and strategy.resolve(n1, n2) is Mode.EXACT:
        raise exc(f"exact permutation requires equal group sizes, got {n1} and {n2}")


def level1_pvalue(X, Y, A, B, strategy: PermutationStrategy | None = None) -> PermutationResult:
    """Permutation test shuffling the target stimuli of X and Y."""
    strategy = strategy or PermutationStrategy()
    _check_exact(strategy, len(X), len(Y), UnequalTargetSizes)
    return permutation_test(_level1_values(X, Y, A, B), len(X), strategy)


def level2_pvalue(T, A, B, strategy: PermutationStrategy | None = None) -> PermutationResult:
    """Permutation test shuffling the attribute stimuli of A and B for target T."""
    strategy = strategy or PermutationStrategy()
    _check_exact(strategy, _size(A), _size(B), UnequalAttributeSizes)
    return permutation_test(_level2_values(T, A, B), _size(A), strategy)


def _effect(d: float, perm: PermutationResult, options: Options, threshold: float) -> EffectSize:
    p_two = min(1.0, 2.0 * min(perm.p_greater, perm.p_less))
    p_pos = p_two if options.two_sided else perm.p_greater
    p_neg = p_two if options.two_sided else perm.p_less
    significant = (d >= threshold and p_pos < options.alpha) or (d <= -threshold and p_neg < options.alpha)
    if threshold == 0.0 and d == 0.0:
        significant = False
    return EffectSize(d, perm.p_greater, perm.p_less, perm.p_equal, significant, perm.mode.value,
                      perm.permutations, options.two_sided, perm.diagnostic)


@contextlib.contextmanager
def _at_level(level: int):
    try:
        yield
    except MleatError as exc:
        if exc.level is None:
            exc.level = level
        raise


def run_ml_eat(X: ResolvedGroup, Y: ResolvedGroup, A: ResolvedGroup, B: ResolvedGroup,
               strategy: PermutationStrategy | None = None, options: Options | None = None) -> MlEatResult:
    """Compute all three levels for one query.

    Level 1 significance is direction-aware on p alone. Level 2
    significance additionally requires ``|d| >= effect_threshold`` in the
    direction of the significant tail.
    """
    strategy = strategy or PermutationStrategy()
    options = options or Options()
    with _at_level(0):
        validate_query(X, Y, A, B, allow_unequal=options.allow_unequal).raise_for_errors()
    with _at_level(1):
        d1 = level1_effect(X, Y, A, B, ddof=options.ddof)
        l1 = _effect(d1, level1_pvalue(X, Y, A, B, strategy), options, 0.0)
    l2 = []
    for T in (X, Y):
        with _at_level(2):
            d2 = level2_effect(T, A, B, ddof=options.ddof)
            l2.append(_effect(d2, level2_pvalue(T, A, B, strategy), options, options.effect_threshold))
    with _at_level(3):
        cells = {"XA": cell_stats(X, A), "XB": cell_stats(X, B), "YA": cell_stats(Y, A), "YB": cell_stats(Y, B)}
    meta = {
        "groups": {"X": X.name, "Y": Y.name, "A": A.name, "B": B.name},
        "sizes": {"X": len(X), "Y": len(Y), "A": len(A), "B": len(B)},
        "strategy": strategy.to_dict(),
        "alpha": options.alpha,
        "effect_threshold": options.effect_threshold,
        "population_std": options.population_std,
    }
    return MlEatResult(l1, l2[0], l2[1], cells, meta)
