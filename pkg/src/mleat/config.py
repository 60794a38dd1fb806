"""JSON suite configuration.

Top-level keys::

    embeddings  list of {"label", "path", "format": "text"|"binary"|"histwords",
                "dimension", "spaced_tokens"}
    groups      {name: {"role": "target_X"|..., "tokens": [...]} or
                {"role": ..., "vectors": "file.txt"}}
    tests       list of {"name", "X", "Y", "A", "B", "embedding"} or
                {"builtin": "<test name>", "name"?, "embedding"?}
    suite       optional built-in suite name ("classic10") appended to tests
    strategy    {"mode": "exact"|"monte_carlo"|"auto", "samples", "seed",
                "exact_limit", "workers"}
    thresholds  {"alpha", "effect", "anisotropy_mean", "anisotropy_std",
                "two_sided"}
    options     {"missing": "strict"|"lenient", "lowercase", "population_std",
                "allow_unequal"}
    output      {"format": "table"|"csv"|"json", "destination", "eatmap_dir",
                "eatmap_format"}

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from .embeddings import (
    EmbeddingSpace,
    MissingPolicy,
    Role,
    StimulusGroupSpec,
    load_binary_cache,
    load_embedding_space,
    load_npy_pair,
)
from .engine import DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD, Options
from .errors import ConfigError
from .patterns import DEFAULT_ANISOTROPY_MEAN, DEFAULT_ANISOTROPY_STD
from .permutation import PermutationStrategy
from .stimuli import BUILTIN_TESTS, CLASSIC10

ROLE_OF = {"X": Role.TARGET_X, "Y": Role.TARGET_Y, "A": Role.ATTRIBUTE_A, "B": Role.ATTRIBUTE_B}
BUILTIN_SUITES = {"classic10": CLASSIC10}


@dataclass(frozen=True)
class EmbeddingSource:
    label: str
    path: str
    format: str = "text"
    dimension: int | None = None
    spaced_tokens: bool = False

    def load(self, vocabulary=None) -> EmbeddingSpace:
        if self.format == "binary":
            return load_binary_cache(self.path, source_label=self.label)
        if self.format == "histwords":
            return load_npy_pair(self.path, source_label=self.label, vocabulary=vocabulary)
        if self.format != "text":
            raise ConfigError(f"embedding {self.label!r}: unknown format {self.format!r}")
        return load_embedding_space(self.path, self.dimension, source_label=self.label,
                                    vocabulary=vocabulary, spaced_tokens=self.spaced_tokens)


@dataclass(frozen=True)
class TestDef:
    name: str
    X: str
    Y: str
    A: str
    B: str
    embedding: str | None = None

    def group_names(self) -> dict[str, str]:
        return {r: getattr(self, r) for r in "XYAB"}


@dataclass(frozen=True)
class Thresholds:
    alpha: float = DEFAULT_ALPHA
    effect: float = DEFAULT_EFFECT_THRESHOLD
    anisotropy_mean: float = DEFAULT_ANISOTROPY_MEAN
    anisotropy_std: float = DEFAULT_ANISOTROPY_STD
    two_sided: bool = False


@dataclass(frozen=True)
class RunOptions:
    missing: MissingPolicy = MissingPolicy.STRICT
    lowercase: bool = False
    population_std: bool = False
    allow_unequal: bool = False


@dataclass(frozen=True)
class OutputSpec:
    format: str = "table"
    destination: str | None = None
    eatmap_dir: str | None = None
    eatmap_format: str = "svg"


@dataclass
class SuiteConfig:
    embeddings: list[EmbeddingSource] = field(default_factory=list)
    groups: dict[str, StimulusGroupSpec] = field(default_factory=dict)
    tests: list[TestDef] = field(default_factory=list)
    strategy: PermutationStrategy = field(default_factory=PermutationStrategy)
    thresholds: Thresholds = field(default_factory=Thresholds)
    options: RunOptions = field(default_factory=RunOptions)
    output: OutputSpec = field(default_factory=OutputSpec)
    base_dir: str | None = None

    def engine_options(self) -> Options:
        return Options(alpha=self.thresholds.alpha, effect_threshold=self.thresholds.effect,
                       two_sided=self.thresholds.two_sided, population_std=self.options.population_std,
                       allow_unequal=self.options.allow_unequal)

    def embedding(self, label: str | None) -> EmbeddingSource | None:
        if label is None:
            return self.embeddings[0] if self.embeddings else None
        for e in self.embeddings:
            if e.label == label:
                return e
        raise ConfigError(f"unknown embedding {label!r}")

    def validate(self) -> None:
        labels = [e.label for e in self.embeddings]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate embedding labels in {labels}")
        names = [t.name for t in self.tests]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate test names in {names}")
        for t in self.tests:
            used = t.group_names()
            if len(set(used.values())) != 4:
                raise ConfigError(f"test {t.name!r}: X, Y, A, B must be four distinct groups")
            for r, g in used.items():
                if g not in self.groups:
                    raise ConfigError(f"test {t.name!r}: undefined group {g!r}")
                if self.groups[g].role is not ROLE_OF[r]:
                    raise ConfigError(f"test {t.name!r}: group {g!r} has role {self.groups[g].role.value}, "
                                      f"needed {ROLE_OF[r].value}")
            needs_space = any(self.groups[g].tokens is not None for g in used.values())
            if needs_space and not self.embeddings:
                raise ConfigError(f"test {t.name!r} uses token groups but no embeddings are configured")
            if t.embedding is not None:
                self.embedding(t.embedding)


def _get(d: Mapping, key: str, typ, default):
    v = d.get(key, default)
    if v is None:
        return v
    try:
        return typ(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {v!r}") from exc


def _resolve(base_dir, path):
    if path is None or base_dir is None or os.path.isabs(path):
        return path
    return os.path.join(base_dir, path)


def parse_group(name: str, d: Mapping, role: Role | None = None, base_dir=None) -> StimulusGroupSpec:
    try:
        role = Role(d.get("role", role.value if role else None))
        tokens, vectors = d.get("tokens"), d.get("vectors")
        return StimulusGroupSpec(name, role, tuple(tokens) if tokens is not None else None,
                                 _resolve(base_dir, vectors))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"group {name!r}: {exc}") from exc


def parse_strategy(d: Mapping | None) -> PermutationStrategy:
    d = d or {}
    try:
        return PermutationStrategy(mode=d.get("mode", "auto"), samples=int(d.get("samples", 100_000)),
                                   seed=int(d.get("seed", 0)), exact_limit=int(d.get("exact_limit", 200_000)),
                                   workers=int(d.get("workers", 1)))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"strategy: {exc}") from exc


def parse_thresholds(d: Mapping | None) -> Thresholds:
    d = d or {}
    return Thresholds(_get(d, "alpha", float, DEFAULT_ALPHA), _get(d, "effect", float, DEFAULT_EFFECT_THRESHOLD),
                      _get(d, "anisotropy_mean", float, DEFAULT_ANISOTROPY_MEAN),
                      _get(d, "anisotropy_std", float, DEFAULT_ANISOTROPY_STD),
                      bool(d.get("two_sided", False)))


def parse_options(d: Mapping | None) -> RunOptions:
    d = d or {}
    try:
        missing = MissingPolicy(d.get("missing", "strict"))
    except ValueError as exc:
        raise ConfigError(f"options: {exc}") from exc
    return RunOptions(missing, bool(d.get("lowercase", False)), bool(d.get("population_std", False)),
                      bool(d.get("allow_unequal", False)))


def _add_builtin(groups: dict, name: str) -> TestDef:
    if name not in BUILTIN_TESTS:
        raise ConfigError(f"unknown built-in test {name!r}")
    bt = BUILTIN_TESTS[name]
    names = {}
    for r, spec in bt.groups().items():
        groups.setdefault(spec.name, spec)
        names[r] = spec.name
    return TestDef(bt.title, **names)


def parse_config(data: Mapping[str, Any], base_dir: str | None = None) -> SuiteConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    embeddings = []
    raw_emb = data.get("embeddings", [])
    if isinstance(raw_emb, Mapping):
        raw_emb = [{"label": k, **v} for k, v in raw_emb.items()]
    for e in raw_emb:
        if "label" not in e or "path" not in e:
            raise ConfigError("each embedding needs 'label' and 'path'")
        embeddings.append(EmbeddingSource(e["label"], _resolve(base_dir, e["path"]), e.get("format", "text"),
                                          _get(e, "dimension", int, None), bool(e.get("spaced_tokens", False))))
    groups = {n: parse_group(n, g, base_dir=base_dir) for n, g in data.get("groups", {}).items()}
    tests = []
    for t in data.get("tests", []):
        if "builtin" in t:
            td = _add_builtin(groups, t["builtin"])
            td = replace(td, name=t.get("name", td.name), embedding=t.get("embedding"))
        else:
            missing = [k for k in ("name", "X", "Y", "A", "B") if k not in t]
            if missing:
                raise ConfigError(f"test definition missing keys {missing}")
            td = TestDef(t["name"], t["X"], t["Y"], t["A"], t["B"], t.get("embedding"))
        tests.append(td)
    if "suite" in data:
        if data["suite"] not in BUILTIN_SUITES:
            raise ConfigError(f"unknown built-in suite {data['suite']!r}")
        tests.extend(_add_builtin(groups, n) for n in BUILTIN_SUITES[data["suite"]])
    out = data.get("output", {}) or {}
    output = OutputSpec(out.get("format", "table"), _resolve(base_dir, out.get("destination")),
                        _resolve(base_dir, out.get("eatmap_dir")), out.get("eatmap_format", "svg"))
    cfg = SuiteConfig(embeddings, groups, tests, parse_strategy(data.get("strategy")),
                      parse_thresholds(data.get("thresholds")), parse_options(data.get("options")),
                      output, base_dir)
    cfg.validate()
    return cfg


def load_config(path: str) -> SuiteConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data, os.path.dirname(os.path.abspath(path)))
