"""Command-line entry point: ``mleat <verb> ...``.

Exit codes: 0 success, 1 per-test failures present, 2 config/IO error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import replace

from . import __version__
from .config import EmbeddingSource, load_config, parse_group, parse_options, parse_strategy, parse_thresholds
from .eatmap import render, shading_for_pattern
from .embeddings import MissingPolicy, load_embedding_space, resolve_group, validate_query, write_binary_cache
from .engine import Options
from .errors import ConfigError, MleatError
from .report import diachronic_run, render_report, rows_from_json, run_suite
from .stimuli import BUILTIN_TESTS

EXIT_OK, EXIT_FAILURES, EXIT_CONFIG = 0, 1, 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--strategy", choices=["exact", "mc", "auto"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--effect-threshold", type=float)
    p.add_argument("--allow-missing", action="store_true", help="drop missing tokens with a warning")
    p.add_argument("--lowercase", action="store_true", help="retry missing tokens lowercased")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mleat", description="Multilevel embedding association tests")
    parser.add_argument("--version", action="version", version=f"mleat {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="run a suite config and print a report")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=["table", "csv", "json"])
    p.add_argument("--color", action="store_true", help="ANSI colors for Level 2 markers in table output")
    p.add_argument("--no-markers", action="store_true", help="omit +/-/· markers from Level 2 table cells")
    _add_common(p)

    p = sub.add_parser("diachronic", help="run one test across embedding slices, emit CSV")
    p.add_argument("--config", required=True, help="slice manifest JSON")
    _add_common(p)

    p = sub.add_parser("eatmap", help="render EAT-Maps from a JSON report")
    p.add_argument("report", help="JSON report (or '-' for stdin)")
    p.add_argument("--format", choices=["svg", "ascii"], default="ascii")
    p.add_argument("--out", help="directory for one file per row; stdout when omitted")

    p = sub.add_parser("stimuli", help="list or export built-in stimulus sets")
    p.add_argument("action", choices=["list", "export"], nargs="?", default="list")
    p.add_argument("name", nargs="?")
    p.add_argument("--out")

    p = sub.add_parser("validate", help="check a config against its embeddings")
    p.add_argument("--config", required=True)
    p.add_argument("--allow-missing", action="store_true")
    p.add_argument("--lowercase", action="store_true")

    p = sub.add_parser("cache", help="convert a text embedding file to the binary cache format")
    p.add_argument("source")
    p.add_argument("dest")
    p.add_argument("--dimension", type=int)
    p.add_argument("--spaced-tokens", action="store_true")
    return parser


def _strategy_overrides(strategy, args):
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.samples is not None:
        kw["samples"] = args.samples
    if args.strategy is not None:
        kw["mode"] = args.strategy
    if getattr(args, "workers", 1) > 1:
        kw["workers"] = args.workers
    return replace(strategy, **kw) if kw else strategy


def _apply_overrides(cfg, args):
    cfg.strategy = _strategy_overrides(cfg.strategy, args)
    th = {}
    if args.alpha is not None:
        th["alpha"] = args.alpha
    if args.effect_threshold is not None:
        th["effect"] = args.effect_threshold
    if th:
        cfg.thresholds = replace(cfg.thresholds, **th)
    if args.allow_missing:
        cfg.options = replace(cfg.options, missing=MissingPolicy.LENIENT)
    if args.lowercase:
        cfg.options = replace(cfg.options, lowercase=True)
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    rows = run_suite(cfg, workers=args.workers)
    fmt = args.format or cfg.output.format
    _emit(render_report(rows, fmt, color=args.color, markers=not args.no_markers), args.out or cfg.output.destination)
    if cfg.output.eatmap_dir:
        _write_eatmaps(rows, cfg.output.eatmap_dir, cfg.output.eatmap_format)
    return EXIT_FAILURES if any(r.error for r in rows) else EXIT_OK


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", name).strip("-").lower() or "test"


def _labels(row):
    g = (row.result.metadata.get("groups") if row.result else None) or {}
    return tuple(g.get(k, k).split(":")[-1] for k in "XYAB")


def _write_eatmaps(rows, directory, fmt) -> None:
    os.makedirs(directory, exist_ok=True)
    ext = "svg" if fmt == "svg" else "txt"
    for i, row in enumerate(rows):
        if row.pattern is None:
            continue
        doc = render(shading_for_pattern(row.pattern, _labels(row)), fmt)
        with open(os.path.join(directory, f"{i:02d}-{_slug(row.name)}.{ext}"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc)


def cmd_eatmap(args) -> int:
    text = sys.stdin.read() if args.report == "-" else open(args.report, encoding="utf-8").read()
    try:
        rows = rows_from_json(text)
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise ConfigError(f"cannot parse report: {exc}") from exc
    if args.out:
        _write_eatmaps(rows, args.out, args.format)
    else:
        for row in rows:
            if row.pattern is not None:
                if len(rows) > 1 and args.format == "ascii":
                    sys.stdout.write(f"== {row.name}\n")
                sys.stdout.write(render(shading_for_pattern(row.pattern, _labels(row)), args.format))
    return EXIT_FAILURES if any(r.pattern is None for r in rows) else EXIT_OK


def _load_manifest(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    base = os.path.dirname(os.path.abspath(path))
    slices = []
    for s in data.get("slices", []):
        p = s["path"] if os.path.isabs(s["path"]) else os.path.join(base, s["path"])
        slices.append(EmbeddingSource(str(s["label"]), p, s.get("format", "text"), s.get("dimension"),
                                      bool(s.get("spaced_tokens", False))))
    test = data.get("test")
    if not test:
        raise ConfigError("manifest needs a 'test'")
    if "builtin" in test:
        if test["builtin"] not in BUILTIN_TESTS:
            raise ConfigError(f"unknown built-in test {test['builtin']!r}")
        groups = BUILTIN_TESTS[test["builtin"]].groups()
    else:
        from .config import ROLE_OF
        groups = {r: parse_group(test[r].get("name", r), test[r], ROLE_OF[r], base) for r in "XYAB"}
    return data, slices, groups


def cmd_diachronic(args) -> int:
    data, slices, groups = _load_manifest(args.config)
    strategy = _strategy_overrides(parse_strategy(data.get("strategy")), args)
    th = parse_thresholds(data.get("thresholds"))
    opts = parse_options(data.get("options"))
    options = Options(alpha=args.alpha if args.alpha is not None else th.alpha,
                      effect_threshold=args.effect_threshold if args.effect_threshold is not None else th.effect,
                      two_sided=th.two_sided, population_std=opts.population_std, allow_unequal=opts.allow_unequal)
    missing = MissingPolicy.LENIENT if args.allow_missing else opts.missing
    result = diachronic_run(slices, groups, strategy, options, missing=missing,
                            lowercase=args.lowercase or opts.lowercase, workers=args.workers)
    _emit(result.to_csv(), args.out)
    for label, err in result.failures:
        print(f"slice {label} skipped: {err}", file=sys.stderr)
    return EXIT_FAILURES if result.failures else EXIT_OK


def cmd_stimuli(args) -> int:
    if args.action == "list":
        for t in BUILTIN_TESTS.values():
            print(f"{t.name:28} {'/'.join(map(str, t.sizes())):12} {t.title}")
        return EXIT_OK
    tests = list(BUILTIN_TESTS.values())
    if args.name:
        if args.name not in BUILTIN_TESTS:
            raise ConfigError(f"unknown built-in test {args.name!r}")
        tests = [BUILTIN_TESTS[args.name]]
    _emit(json.dumps([t.to_dict() for t in tests], indent=2, ensure_ascii=False) + "\n", args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    missing = MissingPolicy.LENIENT if args.allow_missing else cfg.options.missing
    lowercase = args.lowercase or cfg.options.lowercase
    spaces = {}
    failed = False
    for t in cfg.tests:
        src = cfg.embedding(t.embedding)
        space = None
        if src is not None:
            if src.label not in spaces:
                spaces[src.label] = src.load()
            space = spaces[src.label]
        try:
            groups = [resolve_group(space, cfg.groups[g], missing, lowercase=lowercase) for g in t.group_names().values()]
            warnings = [w for _, ws in groups for w in ws]
            report = validate_query(*(g for g, _ in groups), allow_unequal=cfg.options.allow_unequal)
            warnings += [w for w in report.warnings if w not in warnings]
            errors = [f"{type(e).__name__}: {e}" for e in report.errors]
        except MleatError as exc:
            warnings, errors = [], [f"{type(exc).__name__}: {exc}"]
        status = "ok" if not errors else "FAIL"
        failed |= bool(errors)
        print(f"{status:4} {t.name}")
        for e in errors:
            print(f"     error: {e}")
        for w in warnings:
            print(f"     warning: {w}")
    return EXIT_FAILURES if failed else EXIT_OK


def cmd_cache(args) -> int:
    try:
        space = load_embedding_space(args.source, args.dimension, spaced_tokens=args.spaced_tokens)
        with open(args.dest, "wb") as fh:
            write_binary_cache(space, fh)
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"wrote {len(space)} vectors (dim {space.dimension}) to {args.dest}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "diachronic": cmd_diachronic, "eatmap": cmd_eatmap, "stimuli": cmd_stimuli,
            "validate": cmd_validate, "cache": cmd_cache}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.verb](args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MleatError as exc:
        # errors outside per-test isolation (e.g. every diachronic slice failed, bad embedding file)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
