"""Suite execution, report rendering and diachronic sweeps."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .config import EmbeddingSource, SuiteConfig, TestDef
from .embeddings import EmbeddingSpace, MissingPolicy, StimulusGroupSpec, resolve_group, validate_query
from .engine import MlEatResult, Options, run_ml_eat
from .errors import MleatError
from .patterns import AnisotropyDiagnostic, EatPattern, anisotropy_diagnostic, classify_result
from .permutation import PermutationStrategy

log = logging.getLogger(__name__)

REPORT_SCHEMA = "mleat-report/1"
DIACHRONIC_COLUMNS = ("label", "d1", "p1", "d2x", "p2x", "d2y", "p2y", "pattern")


@dataclass
class ReportRow:
    name: str
    embedding: str | None = None
    result: MlEatResult | None = None
    pattern: EatPattern | None = None
    anisotropy: AnisotropyDiagnostic | None = None
    warnings: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def stars(self) -> tuple[bool, bool, bool]:
        r = self.result
        if r is None:
            return (False, False, False)
        return (r.level1.significant, r.level2_x.significant, r.level2_y.significant)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "embedding": self.embedding,
            "result": self.result.to_dict() if self.result else None,
            "pattern": self.pattern.value if self.pattern else None,
            "direction": self.pattern.direction.value if self.pattern else None,
            "anisotropy": self.anisotropy.to_dict() if self.anisotropy else None,
            "warnings": list(self.warnings),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ReportRow":
        return cls(d["name"], d.get("embedding"),
                   MlEatResult.from_dict(d["result"]) if d.get("result") else None,
                   EatPattern(d["pattern"]) if d.get("pattern") else None,
                   AnisotropyDiagnostic.from_dict(d["anisotropy"]) if d.get("anisotropy") else None,
                   list(d.get("warnings", [])), d.get("error"))


def evaluate(groups: Mapping[str, StimulusGroupSpec], space: EmbeddingSpace | None, strategy: PermutationStrategy,
             options: Options, *, missing: MissingPolicy = MissingPolicy.STRICT, lowercase: bool = False,
             anisotropy_mean: float = 0.95, anisotropy_std: float = 0.05, name: str = "",
             embedding: str | None = None) -> ReportRow:
    """Resolve the four groups (keyed X/Y/A/B) and run one ML-EAT, capturing any error in the row."""
    row = ReportRow(name, embedding)
    try:
        resolved = {}
        for r in "XYAB":
            resolved[r], warns = resolve_group(space, groups[r], missing, lowercase=lowercase)
            row.warnings.extend(warns)
        report = validate_query(*(resolved[r] for r in "XYAB"), allow_unequal=options.allow_unequal)
        row.warnings.extend(w for w in report.warnings if w not in row.warnings)
        row.result = run_ml_eat(*(resolved[r] for r in "XYAB"), strategy, options)
    except MleatError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    row.pattern = classify_result(row.result, options.effect_threshold, options.alpha)
    row.anisotropy = anisotropy_diagnostic(row.result.level3, anisotropy_mean, anisotropy_std)
    if row.anisotropy.flagged:
        row.warnings.append("anisotropy: " + row.anisotropy.rationale)
    return row


def _vocabulary(specs: Iterable[StimulusGroupSpec], lowercase: bool) -> set[str]:
    vocab = set()
    for s in specs:
        for t in s.tokens or ():
            vocab.add(t)
            if lowercase:
                vocab.add(t.lower())
    return vocab


def run_suite(config: SuiteConfig, *, spaces: Mapping[str, EmbeddingSpace] | None = None,
              workers: int = 1) -> list[ReportRow]:
    """Run every test in config order. Per-test failures land in the row's ``error``.

    Each embedding source is loaded once (restricted to the tokens the suite
    needs) and shared by all tests that use it. ``spaces`` may supply
    already-loaded spaces keyed by label.
    """
    config.validate()
    loaded = dict(spaces or {})
    opts = config.options
    for src in config.embeddings:
        if src.label in loaded:
            continue
        users = [t for t in config.tests if (t.embedding or config.embeddings[0].label) == src.label]
        if not users:
            continue
        specs = [config.groups[g] for t in users for g in t.group_names().values()]
        loaded[src.label] = src.load(_vocabulary(specs, opts.lowercase))
    engine_opts = config.engine_options()
    th = config.thresholds

    def one(t: TestDef) -> ReportRow:
        label = t.embedding or (config.embeddings[0].label if config.embeddings else None)
        groups = {r: config.groups[g] for r, g in t.group_names().items()}
        return evaluate(groups, loaded.get(label), config.strategy, engine_opts, missing=opts.missing,
                        lowercase=opts.lowercase, anisotropy_mean=th.anisotropy_mean,
                        anisotropy_std=th.anisotropy_std, name=t.name, embedding=label)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, config.tests))
    return [one(t) for t in config.tests]


# -- rendering ---------------------------------------------------------------

def fmt2(x: float) -> str:
    """Two decimals with the leading zero dropped: 0.60 -> .60, -0.69 -> -.69."""
    s = f"{x:.2f}"
    if s in ("-0.00", "0.00"):
        return ".00"
    if s.startswith("0."):
        return s[1:]
    if s.startswith("-0."):
        return "-" + s[2:]
    return s


_ANSI = {"+": "\x1b[31m", "-": "\x1b[34m", "·": "\x1b[90m"}
TABLE_HEADER = ("EAT", "A,B,X,Y", "A,B,X", "A,B,Y", "A,X", "B,X", "A,Y", "B,Y", "Pattern")
_WIDTHS = (None, 9, 10, 10, 10, 10, 10, 10, 15)


def _marker(es, threshold_sig: bool) -> str:
    if not threshold_sig:
        return "·"
    return "+" if es.d > 0 else "-"


def _table(rows: Sequence[ReportRow], color: bool, markers: bool = True) -> str:
    w0 = max([len(TABLE_HEADER[0]), 30] + [len(r.name) for r in rows])
    widths = (w0,) + _WIDTHS[1:]

    def line(cells):
        return "  ".join(f"{c:<{w}}" for c, w in zip(cells, widths)).rstrip()

    levels = ("Level", "Level 1", "Level 2", "", "Level 3", "", "", "", "")
    out = [line(levels), line(TABLE_HEADER)]
    notes = []
    for row in rows:
        if row.result is None:
            out.append(line((row.name, f"ERROR: {row.error}")))
            continue
        r = row.result
        l1 = fmt2(r.level1.d) + ("*" if r.level1.significant else "")
        l2 = []
        for es in (r.level2_x, r.level2_y):
            mk = _marker(es, es.significant)
            cell = f"{fmt2(es.d)}{'*' if es.significant else ''}"
            if markers:
                cell = f"{mk} {cell}"
            l2.append(cell)
        l3 = [f"{fmt2(r.level3[k].mean)} ({fmt2(r.level3[k].std)})" for k in ("XA", "XB", "YA", "YB")]
        pat = row.pattern.value if row.pattern else ""
        if row.anisotropy and row.anisotropy.flagged:
            pat += " !"
        text = line((row.name, l1, *l2, *l3, pat))
        if color:
            for cell, es in zip(l2, (r.level2_x, r.level2_y)):
                text = text.replace(cell, f"{_ANSI[_marker(es, es.significant)]}{cell}\x1b[0m", 1)
        out.append(text)
        notes.extend(f"# {row.name}: {w}" for w in row.warnings)
    out.extend(notes)
    return "\n".join(out) + "\n"


CSV_COLUMNS = (
    ["name", "embedding"]
    + [f"{lv}_{k}" for lv in ("l1", "l2x", "l2y") for k in ("d", "p_greater", "p_less", "p_equal", "significant", "method")]
    + [f"{c}_{k}" for c in ("XA", "XB", "YA", "YB") for k in ("mean", "std", "count")]
    + ["pattern", "direction", "anisotropic", "warnings", "error"]
)


def _csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        rec = [row.name, row.embedding or ""]
        r = row.result
        if r is not None:
            for es in (r.level1, r.level2_x, r.level2_y):
                rec += [repr(es.d), repr(es.p_greater), repr(es.p_less), repr(es.p_equal), es.significant, es.method]
            for k in ("XA", "XB", "YA", "YB"):
                c = r.level3[k]
                rec += [repr(c.mean), repr(c.std), c.count]
        else:
            rec += [""] * (18 + 12)
        rec += [row.pattern.value if row.pattern else "", row.pattern.direction.value if row.pattern else "",
                row.anisotropy.flagged if row.anisotropy else "", " | ".join(row.warnings), row.error or ""]
        w.writerow(rec)
    return buf.getvalue()


def render_report(rows: Sequence[ReportRow], format: str = "table", *, color: bool = False,
                  markers: bool = True) -> str:
    """Render rows as ``table``, ``csv`` or ``json``.

    In table output the Level 2 cells carry a ``+``/``-``/``·`` marker for
    significant-positive, significant-negative and non-significant; pass
    ``markers=False`` for bare values.
    """
    if format == "table":
        return _table(rows, color, markers)
    if format == "csv":
        return _csv(rows)
    if format == "json":
        return json.dumps({"schema": REPORT_SCHEMA, "rows": [r.to_dict() for r in rows]}, indent=2) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def rows_from_json(text: str) -> list[ReportRow]:
    data = json.loads(text)
    if isinstance(data, list):
        items = data
    elif "rows" in data:
        items = data["rows"]
    else:
        items = [data]
    return [ReportRow.from_dict(d) for d in items]


# -- diachronic --------------------------------------------------------------

@dataclass
class DiachronicRecord:
    label: str
    level1: object
    level2_x: object
    level2_y: object
    pattern: EatPattern

    def csv_row(self) -> list:
        return [self.label, repr(self.level1.d), repr(self.level1.p_directional), repr(self.level2_x.d),
                repr(self.level2_x.p_directional), repr(self.level2_y.d), repr(self.level2_y.p_directional),
                self.pattern.value]


@dataclass
class DiachronicResult:
    records: list[DiachronicRecord]
    failures: list[tuple[str, str]]
    rows: list[ReportRow]

    def to_csv(self) -> str:
        return diachronic_csv(self.records)


def diachronic_csv(records: Sequence[DiachronicRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DIACHRONIC_COLUMNS)
    for rec in records:
        w.writerow(rec.csv_row())
    return buf.getvalue()


def diachronic_run(slices: Sequence[EmbeddingSource | EmbeddingSpace], groups: Mapping[str, StimulusGroupSpec],
                   strategy: PermutationStrategy | None = None, options: Options | None = None, *,
                   missing: MissingPolicy = MissingPolicy.STRICT, lowercase: bool = False,
                   workers: int = 1) -> DiachronicResult:
    """Run one test on each slice, in input order.

    Slices that fail (missing or zero-norm stimuli, unreadable files) are
    recorded in ``failures`` and skipped. Raises the last error only when
    every slice fails.
    """
    strategy = strategy or PermutationStrategy()
    options = options or Options()
    vocab = _vocabulary(groups.values(), lowercase)

    def one(sl) -> ReportRow:
        label = sl.label if isinstance(sl, EmbeddingSource) else sl.source_label
        try:
            space = sl.load(vocab) if isinstance(sl, EmbeddingSource) else sl
        except (MleatError, OSError) as exc:
            return ReportRow(label, label, error=f"{type(exc).__name__}: {exc}")
        return evaluate(groups, space, strategy, options, missing=missing, lowercase=lowercase,
                        name=label, embedding=label)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, slices))
    else:
        rows = [one(s) for s in slices]
    records, failures = [], []
    for row in rows:
        if row.result is None:
            log.warning("slice %s skipped: %s", row.name, row.error)
            failures.append((row.name, row.error))
        else:
            r = row.result
            records.append(DiachronicRecord(row.name, r.level1, r.level2_x, r.level2_y, row.pattern))
    if rows and not records:
        raise MleatError(f"all {len(rows)} slices failed; last: {failures[-1][1]}")
    return DiachronicResult(records, failures, rows)
