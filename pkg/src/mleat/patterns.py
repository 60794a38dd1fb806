"""Nine-way EAT pattern taxonomy and the anisotropy flag."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .association import CellStats
from .engine import DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD, EffectSize, MlEatResult

DEFAULT_ANISOTROPY_MEAN = 0.95
DEFAULT_ANISOTROPY_STD = 0.05


class Toward(str, enum.Enum):
    A = "A"
    B = "B"
    NONE = "none"


class Direction(str, enum.Enum):
    DIVERGENT = "Divergent"
    UNIFORM = "Uniform"
    SINGULAR = "Singular"
    NON_DIRECTIONAL = "Non-Directional"


class EatPattern(str, enum.Enum):
    AB_DIVERGENT = "AB-Divergent"
    BA_DIVERGENT = "BA-Divergent"
    A_UNIFORM = "A-Uniform"
    B_UNIFORM = "B-Uniform"
    AX_SINGULAR = "AX-Singular"
    AY_SINGULAR = "AY-Singular"
    BX_SINGULAR = "BX-Singular"
    BY_SINGULAR = "BY-Singular"
    NON_DIRECTIONAL = "Non-Directional"

    @property
    def direction(self) -> Direction:
        if self is EatPattern.NON_DIRECTIONAL:
            return Direction.NON_DIRECTIONAL
        return Direction(self.value.split("-", 1)[1])

    @property
    def verdicts(self) -> tuple[Toward, Toward]:
        """The (X, Y) verdict pair this pattern arises from."""
        return _INVERSE[self]


_PATTERNS = {
    (Toward.A, Toward.B): EatPattern.AB_DIVERGENT,
    (Toward.B, Toward.A): EatPattern.BA_DIVERGENT,
    (Toward.A, Toward.A): EatPattern.A_UNIFORM,
    (Toward.B, Toward.B): EatPattern.B_UNIFORM,
    (Toward.A, Toward.NONE): EatPattern.AX_SINGULAR,
    (Toward.NONE, Toward.A): EatPattern.AY_SINGULAR,
    (Toward.B, Toward.NONE): EatPattern.BX_SINGULAR,
    (Toward.NONE, Toward.B): EatPattern.BY_SINGULAR,
    (Toward.NONE, Toward.NONE): EatPattern.NON_DIRECTIONAL,
}
_INVERSE = {p: k for k, p in _PATTERNS.items()}


@dataclass(frozen=True)
class Level2Verdict:
    toward: Toward
    d: float
    p_used: float


def verdict(level2: EffectSize, threshold: float = DEFAULT_EFFECT_THRESHOLD,
            alpha: float = DEFAULT_ALPHA) -> Level2Verdict:
    """Which attribute, if any, a target group is significantly associated with."""
    p_pos = level2.p_two_sided if level2.two_sided else level2.p_greater
    p_neg = level2.p_two_sided if level2.two_sided else level2.p_less
    if level2.d >= threshold and p_pos < alpha:
        return Level2Verdict(Toward.A, level2.d, p_pos)
    if level2.d <= -threshold and p_neg < alpha:
        return Level2Verdict(Toward.B, level2.d, p_neg)
    return Level2Verdict(Toward.NONE, level2.d, p_pos if level2.d >= 0 else p_neg)


def classify(vx: Level2Verdict | Toward, vy: Level2Verdict | Toward) -> EatPattern:
    tx = vx.toward if isinstance(vx, Level2Verdict) else Toward(vx)
    ty = vy.toward if isinstance(vy, Level2Verdict) else Toward(vy)
    return _PATTERNS[(tx, ty)]


def classify_result(result: MlEatResult, threshold: float = DEFAULT_EFFECT_THRESHOLD,
                    alpha: float = DEFAULT_ALPHA) -> EatPattern:
    return classify(verdict(result.level2_x, threshold, alpha), verdict(result.level2_y, threshold, alpha))


@dataclass(frozen=True)
class AnisotropyDiagnostic:
    flagged: bool
    max_cell_mean: float
    min_cell_mean: float
    max_cell_std: float
    rationale: str

    def to_dict(self) -> dict:
        return {"flagged": self.flagged, "max_cell_mean": self.max_cell_mean, "min_cell_mean": self.min_cell_mean,
                "max_cell_std": self.max_cell_std, "rationale": self.rationale}

    @classmethod
    def from_dict(cls, d: dict) -> "AnisotropyDiagnostic":
        return cls(bool(d["flagged"]), float(d["max_cell_mean"]), float(d["min_cell_mean"]),
                   float(d["max_cell_std"]), d["rationale"])


def anisotropy_diagnostic(level3: Mapping[str, CellStats], mean_threshold: float = DEFAULT_ANISOTROPY_MEAN,
                          std_threshold: float = DEFAULT_ANISOTROPY_STD) -> AnisotropyDiagnostic:
    """Flag spaces where every cell has near-1 mean cosine and little spread."""
    means = {k: c.mean for k, c in level3.items()}
    stds = {k: c.std for k, c in level3.items()}
    low_mean = [k for k, m in means.items() if m < mean_threshold]
    high_std = [k for k, s in stds.items() if s > std_threshold]
    flagged = not low_mean and not high_std
    if flagged:
        rationale = (f"all cells ({', '.join(means)}) have mean cosine >= {mean_threshold} and "
                     f"std <= {std_threshold}; cosine-based associations are unreliable here")
    else:
        parts = []
        if low_mean:
            parts.append(f"mean below {mean_threshold} in {', '.join(low_mean)}")
        if high_std:
            parts.append(f"std above {std_threshold} in {', '.join(high_std)}")
        rationale = "not anisotropic: " + "; ".join(parts)
    return AnisotropyDiagnostic(flagged, max(means.values()), min(means.values()), max(stds.values()), rationale)
