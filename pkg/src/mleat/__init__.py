"""Multilevel embedding association tests (ML-EAT)."""

__version__ = "0.1.0"

from .association import CellStats, association_s, association_u, cell_stats, cosine, cosine_matrix
from .eatmap import EatMapShading, render, shading_for_pattern, shading_from_verdicts
from .embeddings import (
    EmbeddingSpace,
    MissingPolicy,
    ResolvedGroup,
    Role,
    StimulusGroupSpec,
    load_embedding_space,
    lookup,
    resolve_group,
    validate_query,
)
from .engine import (
    EffectSize,
    MlEatResult,
    Options,
    level1_effect,
    level1_pvalue,
    level2_effect,
    level2_pvalue,
    run_ml_eat,
    sc_eat,
)
from .patterns import (
    AnisotropyDiagnostic,
    Direction,
    EatPattern,
    Level2Verdict,
    Toward,
    anisotropy_diagnostic,
    classify,
    verdict,
)
from .permutation import Mode, PermutationStrategy, permutation_test
from .stimuli import get_builtin, list_builtin_stimuli

__all__ = [
    "CellStats", "association_s", "association_u", "cell_stats", "cosine", "cosine_matrix",
    "EatMapShading", "render", "shading_for_pattern", "shading_from_verdicts", "EmbeddingSpace",
    "MissingPolicy", "ResolvedGroup", "Role", "StimulusGroupSpec", "load_embedding_space", "lookup",
    "resolve_group", "validate_query", "EffectSize", "MlEatResult", "Options", "level1_effect",
    "level1_pvalue", "level2_effect", "level2_pvalue", "run_ml_eat", "sc_eat",
    "AnisotropyDiagnostic", "Direction", "EatPattern", "Level2Verdict", "Toward",
    "anisotropy_diagnostic", "classify", "verdict", "Mode", "PermutationStrategy",
    "permutation_test", "get_builtin", "list_builtin_stimuli",
]
