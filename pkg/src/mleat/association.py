"""Cosine similarity and the association statistics built on it.

Every reduction over stimuli goes through :func:`math.fsum`, which is
exactly rounded. Results are therefore independent of stimulus order and
identical whichever group shape the same pairs arrive in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroNormVector

_CHUNK_ELEMENTS = 1 << 22


def _as_matrix(v) -> np.ndarray:
    if hasattr(v, "vectors"):
        v = v.vectors
    m = np.asarray(v, dtype=np.float64)
    return m[None, :] if m.ndim == 1 else m


def cosine_matrix(U, V) -> np.ndarray:
    """Pairwise cosines between rows of ``U`` and rows of ``V``, clamped to [-1, 1].

    Each entry is computed from its own pair only (elementwise product then
    a per-row sum), so a pair yields the same float regardless of the
    surrounding matrix.
    """
    U, V = _as_matrix(U), _as_matrix(V)
    if U.shape[1] != V.shape[1]:
        raise DimensionMismatch(f"dimension {U.shape[1]} vs {V.shape[1]}")
    nu2 = np.sum(U * U, axis=1)
    nv2 = np.sum(V * V, axis=1)
    if not (np.all(nu2 > 0) and np.all(nv2 > 0)):
        raise ZeroNormVector([i for i, n in enumerate(nu2) if n == 0] + [i for i, n in enumerate(nv2) if n == 0])
    step = max(1, _CHUNK_ELEMENTS // max(1, V.shape[0] * V.shape[1]))
    dots = np.empty((U.shape[0], V.shape[0]))
    for i in range(0, U.shape[0], step):
        dots[i:i + step] = np.sum(U[i:i + step, None, :] * V[None, :, :], axis=2)
    # one sqrt of the product keeps cosine(v, v) == 1.0 exactly
    return np.clip(dots / np.sqrt(np.outer(nu2, nv2)), -1.0, 1.0)


def cosine(u, v) -> float:
    return float(cosine_matrix(u, v)[0, 0])


def fmean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def fstd(values, ddof: int = 1) -> float:
    values = list(values)
    n = len(values)
    if n - ddof <= 0:
        return 0.0
    m = math.fsum(values) / n
    return math.sqrt(math.fsum((x - m) ** 2 for x in values) / (n - ddof))


def association_s_values(W, A, B) -> np.ndarray:
    """s(w, A, B) for every row w of ``W``."""
    ca, cb = cosine_matrix(W, A), cosine_matrix(W, B)
    return np.array([fmean(ra) - fmean(rb) for ra, rb in zip(ca.tolist(), cb.tolist())])


def association_s(w, A, B) -> float:
    """Mean cosine of ``w`` with ``A`` minus mean cosine of ``w`` with ``B``."""
    return float(association_s_values(w, A, B)[0])


def association_u_values(T, X) -> np.ndarray:
    """u(T, x) = mean over t in T of cos(t, x), for every row x of ``X``."""
    c = cosine_matrix(T, X)
    return np.array([fmean(col) for col in c.T.tolist()])


def association_u(T, a) -> float:
    return float(association_u_values(T, a)[0])


@dataclass(frozen=True)
class CellStats:
    """Distribution of all pairwise cosines between a target and an attribute group."""

    mean: float
    std: float
    count: int

    @property
    def degenerate(self) -> bool:
        return self.count == 1

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "count": self.count, "degenerate": self.degenerate}

    @classmethod
    def from_dict(cls, d: dict) -> "CellStats":
        return cls(float(d["mean"]), float(d["std"]), int(d["count"]))


def cell_stats(T, A) -> CellStats:
    flat = cosine_matrix(T, A).ravel().tolist()
    # nm - 1 denominator; a single pair reports std 0 (see CellStats.degenerate)
    return CellStats(fmean(flat), fstd(flat, ddof=1), len(flat))
