"""Embedding spaces, stimulus groups and query validation.

Text format is GloVe-style: one ``token f1 f2 ... fd`` record per line,
fields separated by ASCII spaces. A binary cache format (magic ``MLEA``)
is also supported for fast reloads of large spaces.
"""

from __future__ import annotations

import enum
import io
import logging
import os
import pickle
import struct
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import BinaryIO, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateToken,
    EmbeddingFormatError,
    EmptyFile,
    EmptyGroupAfterResolution,
    MalformedFloat,
    MissingToken,
    UnequalAttributeSizes,
    UnequalTargetSizes,
    ZeroNormVector,
)

log = logging.getLogger(__name__)

MIN_GROUP_SIZE = 8
CACHE_MAGIC = b"MLEA"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


class Role(str, enum.Enum):
    TARGET_X = "target_X"
    TARGET_Y = "target_Y"
    ATTRIBUTE_A = "attribute_A"
    ATTRIBUTE_B = "attribute_B"


class MissingPolicy(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class EmbeddingSpace:
    """Immutable token -> vector store.

    Vectors live in one read-only matrix; ``index`` maps each token to its
    row. Lookups are exact and case-sensitive.
    """

    dimension: int
    index: Mapping[str, int]
    matrix: np.ndarray
    source_label: str = ""

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if self.matrix.ndim != 2 or self.matrix.shape[1] != self.dimension:
            raise ValueError(f"matrix shape {self.matrix.shape} does not match dimension {self.dimension}")
        if len(self.index) != self.matrix.shape[0]:
            raise ValueError("index and matrix row count differ")
        if not isinstance(self.index, MappingProxyType):
            object.__setattr__(self, "index", MappingProxyType(dict(self.index)))
        if self.matrix.flags.writeable:
            m = self.matrix.copy()
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)

    @classmethod
    def from_mapping(cls, entries: Mapping[str, Sequence[float]], source_label: str = "",
                     dtype=np.float64) -> "EmbeddingSpace":
        if not entries:
            raise EmptyFile("no entries")
        tokens = list(entries)
        matrix = np.asarray([entries[t] for t in tokens], dtype=dtype)
        if matrix.ndim != 2:
            raise DimensionMismatch("vectors have inconsistent lengths")
        return cls(matrix.shape[1], {t: i for i, t in enumerate(tokens)}, matrix, source_label)

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, token: object) -> bool:
        return token in self.index

    @property
    def tokens(self) -> list[str]:
        return list(self.index)

    def lookup(self, token: str) -> np.ndarray:
        try:
            return self.matrix[self.index[token]]
        except KeyError:
            raise MissingToken(token) from None


def lookup(space: EmbeddingSpace, token: str) -> np.ndarray:
    return space.lookup(token)


def _open_binary(source) -> tuple[BinaryIO, bool]:
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(source), True
    if isinstance(source, (str, os.PathLike)):
        return open(source, "rb"), True
    return source, False


def _parse_floats(fields: list[bytes], line_no: int, dtype) -> np.ndarray:
    try:
        vec = np.array([float(f) for f in fields], dtype=np.float64)
    except ValueError:
        bad = next(f for f in fields if not _is_float(f))
        raise MalformedFloat(f"cannot parse {bad[:40]!r} as a decimal float", line_no) from None
    if not np.all(np.isfinite(vec)):
        raise MalformedFloat("non-finite value", line_no)
    return vec.astype(dtype, copy=False)


def _is_float(b: bytes) -> bool:
    try:
        float(b)
        return True
    except ValueError:
        return False


def load_embedding_space(source, expected_dimension: int | None = None, *,
                         source_label: str = "", vocabulary: Iterable[str] | None = None,
                         spaced_tokens: bool = False, dtype=np.float32) -> EmbeddingSpace:
    """Parse a GloVe-style text embedding file.

    Parameters
    ----------
    source : path, bytes or binary stream
    expected_dimension : int, optional
        When given, every line must carry exactly this many components.
        Otherwise the dimension is inferred from the first record.
    vocabulary : iterable of str, optional
        Keep only these tokens. Other lines are still checked for field
        count and duplicate tokens, but their floats are not parsed.
    spaced_tokens : bool
        Treat all but the last ``dimension`` fields as the token, for files
        (notably GloVe 840B) containing tokens with embedded spaces.
        Requires ``expected_dimension``.
    dtype : numpy dtype
        Storage precision. Computations always accumulate in float64.
    """
    if spaced_tokens and expected_dimension is None:
        raise ValueError("spaced_tokens requires expected_dimension")
    keep = None if vocabulary is None else set(vocabulary)
    stream, owned = _open_binary(source)
    dim = expected_dimension
    seen: set[str] = set()
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    n_lines = 0
    try:
        for line_no, raw in enumerate(stream, start=1):
            line = raw.rstrip(b"\r\n").rstrip(b" ")
            if not line.strip():
                continue
            fields = line.split(b" ")
            if spaced_tokens and len(fields) > dim + 1:
                fields = [b" ".join(fields[:-dim])] + fields[-dim:]
            try:
                token = fields[0].decode("utf-8")
            except UnicodeDecodeError:
                raise EmbeddingFormatError("token is not valid UTF-8", line_no) from None
            n = len(fields) - 1
            if dim is None:
                if n == 0:
                    raise DimensionMismatch("record has no vector components", line_no)
                dim = n
            if n != dim:
                raise DimensionMismatch(f"expected {dim} components, found {n}", line_no)
            if token in seen:
                raise DuplicateToken(token, line_no)
            seen.add(token)
            n_lines += 1
            if keep is not None and token not in keep:
                continue
            rows.append(_parse_floats(fields[1:], line_no, dtype))
            tokens.append(token)
    finally:
        if owned:
            stream.close()
    if n_lines == 0:
        raise EmptyFile("no embedding records found")
    matrix = np.vstack(rows) if rows else np.empty((0, dim), dtype=dtype)
    log.debug("loaded %d of %d records (dim=%d) from %s", len(tokens), n_lines, dim, source_label or source)
    return EmbeddingSpace(dim, {t: i for i, t in enumerate(tokens)}, matrix, source_label)


def dump_embedding_space(space: EmbeddingSpace, stream: BinaryIO) -> None:
    """Write ``space`` in text format with 9 significant digits per component."""
    for token, row in space.index.items():
        vals = " ".join(f"{v:.9g}" for v in space.matrix[row].tolist())
        stream.write(f"{token} {vals}\n".encode("utf-8"))


def write_binary_cache(space: EmbeddingSpace, stream: BinaryIO) -> None:
    stream.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, space.dimension, len(space)))
    m = np.ascontiguousarray(space.matrix, dtype="<f4")
    for token, row in space.index.items():
        b = token.encode("utf-8")
        stream.write(struct.pack("<I", len(b)))
        stream.write(b)
        stream.write(m[row].tobytes())


def load_binary_cache(source, *, source_label: str = "") -> EmbeddingSpace:
    stream, owned = _open_binary(source)
    try:
        head = stream.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise EmptyFile("truncated cache header")
        magic, version, dim, count = _HEADER.unpack(head)
        if magic != CACHE_MAGIC:
            raise EmbeddingFormatError(f"bad cache magic {magic!r}")
        if version != CACHE_VERSION:
            raise EmbeddingFormatError(f"unsupported cache version {version}")
        if count == 0:
            raise EmptyFile("cache holds no entries")
        matrix = np.empty((count, dim), dtype=np.float32)
        index: dict[str, int] = {}
        nbytes = 4 * dim
        for i in range(count):
            (length,) = struct.unpack("<I", stream.read(4))
            token = stream.read(length).decode("utf-8")
            if token in index:
                raise DuplicateToken(token)
            buf = stream.read(nbytes)
            if len(buf) != nbytes:
                raise EmbeddingFormatError(f"truncated vector for entry {i}")
            matrix[i] = np.frombuffer(buf, dtype="<f4")
            index[token] = i
    finally:
        if owned:
            stream.close()
    return EmbeddingSpace(dim, index, matrix, source_label)


class _PlainUnpickler(pickle.Unpickler):
    # vocabulary pickles hold only lists of strings; refuse anything that needs a class
    def find_class(self, module, name):
        if (module, name) == ("_codecs", "encode"):  # how protocol-2 pickles spell bytes
            return super().find_class(module, name)
        raise EmbeddingFormatError(f"refusing to unpickle {module}.{name}")


def load_npy_pair(prefix: str, *, source_label: str = "", vocabulary: Iterable[str] | None = None) -> EmbeddingSpace:
    """Load a ``<prefix>-w.npy`` matrix with its ``<prefix>-vocab.pkl`` token list.

    This is the layout the HistWords slices ship in. All-zero rows (words
    absent from a slice) are kept; resolving them raises ZeroNormVector.
    """
    with open(prefix + "-vocab.pkl", "rb") as fh:
        raw = _PlainUnpickler(fh, encoding="bytes").load()
    tokens = [t.decode("utf-8") if isinstance(t, bytes) else str(t) for t in raw]
    matrix = np.load(prefix + "-w.npy", mmap_mode="r", allow_pickle=False)
    if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
        raise DimensionMismatch(f"{prefix}: matrix {matrix.shape} vs {len(tokens)} tokens")
    keep = range(len(tokens))
    if vocabulary is not None:
        vocab = set(vocabulary)
        keep = [i for i, t in enumerate(tokens) if t in vocab]
    index: dict[str, int] = {}
    for j, i in enumerate(keep):
        if tokens[i] in index:
            raise DuplicateToken(tokens[i])
        index[tokens[i]] = j
    if not index:
        raise EmptyFile(f"{prefix}: no entries")
    rows = np.asarray(matrix[list(keep)], dtype=np.float32)
    return EmbeddingSpace(rows.shape[1], index, rows, source_label)


def load_vector_file(source, expected_dimension: int | None = None) -> np.ndarray:
    """Read one whitespace-separated vector per line into a float64 matrix."""
    stream, owned = _open_binary(source)
    rows = []
    dim = expected_dimension
    try:
        for line_no, raw in enumerate(stream, start=1):
            fields = raw.split()
            if not fields:
                continue
            if dim is None:
                dim = len(fields)
            if len(fields) != dim:
                raise DimensionMismatch(f"expected {dim} components, found {len(fields)}", line_no)
            rows.append(_parse_floats(fields, line_no, np.float64))
    finally:
        if owned:
            stream.close()
    if not rows:
        raise EmptyFile("vector file holds no vectors")
    return np.vstack(rows)


@dataclass(frozen=True)
class StimulusGroupSpec:
    name: str
    role: Role
    tokens: tuple[str, ...] | None = None
    vector_file: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))
        if (self.tokens is None) == (self.vector_file is None):
            raise ValueError(f"group {self.name!r}: exactly one of tokens / vector_file must be set")
        if self.tokens is not None:
            toks = tuple(self.tokens)
            if not toks:
                raise ValueError(f"group {self.name!r}: token list is empty")
            if len(set(toks)) != len(toks):
                dups = sorted({t for t in toks if toks.count(t) > 1})
                raise ValueError(f"group {self.name!r}: duplicate tokens {dups}")
            object.__setattr__(self, "tokens", toks)


@dataclass(frozen=True)
class ResolvedGroup:
    """Ordered stimulus vectors (float64) with per-row provenance."""

    name: str
    vectors: np.ndarray
    provenance: tuple = ()

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.float64)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[0] == 0:
            raise EmptyGroupAfterResolution(f"group {self.name!r} has no vectors")
        norms = np.sqrt(np.sum(v * v, axis=1))
        zero = np.flatnonzero(norms == 0)
        if zero.size:
            prov = self.provenance or tuple(range(v.shape[0]))
            raise ZeroNormVector(prov[i] for i in zero)
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)
        if not self.provenance:
            object.__setattr__(self, "provenance", tuple(range(v.shape[0])))

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


def resolve_group(space: EmbeddingSpace | None, spec: StimulusGroupSpec,
                  policy: MissingPolicy = MissingPolicy.STRICT, *, lowercase: bool = False,
                  base_dir: str | os.PathLike | None = None) -> tuple[ResolvedGroup, list[str]]:
    """Turn a group spec into vectors. Returns the group and a list of warnings."""
    policy = MissingPolicy(policy)
    warnings: list[str] = []
    if spec.vector_file is not None:
        path = spec.vector_file
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        dim = space.dimension if space is not None else None
        vectors = load_vector_file(path, dim)
        group = ResolvedGroup(spec.name, vectors, tuple(range(len(vectors))))
    else:
        if space is None:
            raise ValueError(f"group {spec.name!r} needs an embedding space")
        rows, prov, zero = [], [], []
        for tok in spec.tokens:
            key = tok
            if key not in space and lowercase and tok.lower() in space:
                key = tok.lower()
                warnings.append(f"{spec.name}: {tok!r} matched as {key!r}")
            if key not in space:
                if policy is MissingPolicy.STRICT:
                    raise MissingToken(tok)
                warnings.append(f"{spec.name}: dropped missing token {tok!r}")
                continue
            vec = space.lookup(key)
            if not np.any(vec):
                zero.append(tok)
            rows.append(vec)
            prov.append(tok)
        if zero:
            raise ZeroNormVector(zero)
        if not rows:
            raise EmptyGroupAfterResolution(f"group {spec.name!r}: no tokens resolved")
        group = ResolvedGroup(spec.name, np.vstack(rows), tuple(prov))
    if len(group) < MIN_GROUP_SIZE:
        warnings.append(f"{spec.name}: {len(group)} stimuli, below the recommended minimum of {MIN_GROUP_SIZE}")
    return group, warnings


@dataclass
class ValidationReport:
    errors: list[Exception] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_for_errors(self) -> None:
        if self.errors:
            raise self.errors[0]


def validate_query(X: ResolvedGroup, Y: ResolvedGroup, A: ResolvedGroup, B: ResolvedGroup,
                   *, allow_unequal: bool = False) -> ValidationReport:
    """Check group-size rules for a query.

    Unequal target (or attribute) sizes are hard errors unless
    ``allow_unequal``, in which case they are reported as warnings; only
    Monte Carlo permutation can handle such queries.
    """
    report = ValidationReport()
    dims = {g.dimension for g in (X, Y, A, B)}
    if len(dims) != 1:
        report.errors.append(DimensionMismatch(f"groups have differing dimensions {sorted(dims)}"))
    for cls, g1, g2, what in ((UnequalTargetSizes, X, Y, "target"), (UnequalAttributeSizes, A, B, "attribute")):
        if len(g1) != len(g2):
            msg = f"{what} groups differ in size: {g1.name}={len(g1)}, {g2.name}={len(g2)}"
            if allow_unequal:
                report.warnings.append(msg + " (exact permutation unavailable)")
            else:
                report.errors.append(cls(msg))
    for g in (X, Y, A, B):
        if len(g) < MIN_GROUP_SIZE:
            report.warnings.append(f"{g.name}: {len(g)} stimuli, below the recommended minimum of {MIN_GROUP_SIZE}")
    return report


__all__ = [
    "EmbeddingSpace", "StimulusGroupSpec", "ResolvedGroup", "ValidationReport", "Role", "MissingPolicy",
    "load_embedding_space", "dump_embedding_space", "write_binary_cache", "load_binary_cache",
    "load_vector_file", "load_npy_pair", "lookup", "resolve_group", "validate_query", "MIN_GROUP_SIZE",
]
