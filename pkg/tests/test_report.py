import json
import struct
from pathlib import Path

import numpy as np
import pytest

from mleat.config import parse_config
from mleat.embeddings import EmbeddingSpace
from mleat.errors import MleatError
from mleat.patterns import EatPattern
from mleat.permutation import Mode, PermutationStrategy
from mleat.report import (
    DIACHRONIC_COLUMNS,
    TABLE_HEADER,
    diachronic_run,
    fmt2,
    render_report,
    rows_from_json,
    run_suite,
)
from mleat.stimuli import get_builtin

from . import oracles

DATA = Path(__file__).parent / "data"
FIXTURE = DATA / "fixture20.txt"


def fixture_config(**extra):
    groups = {g: {"role": r, "tokens": [f"{g.lower()}{i}" for i in range(1, 6)]}
              for g, r in zip("XYAB", ("target_X", "target_Y", "attribute_A", "attribute_B"))}
    data = {"embeddings": [{"label": "fixture", "path": "fixture20.txt"}], "groups": groups,
            "tests": [{"name": "fixture", "X": "X", "Y": "Y", "A": "A", "B": "B"}],
            "strategy": {"mode": "exact"}}
    data.update(extra)
    return parse_config(data, base_dir=str(DATA))


def fixture_vectors():
    # independent parse; values are stored as float32
    out = {}
    for line in FIXTURE.read_text().splitlines():
        tok, *vals = line.split(" ")
        out[tok] = [struct.unpack("f", struct.pack("f", float(v)))[0] for v in vals]
    return {g: [out[f"{g.lower()}{i}"] for i in range(1, 6)] for g in "XYAB"}


def test_fixture_suite_matches_oracle():
    (row,) = run_suite(fixture_config())
    assert row.error is None and row.embedding == "fixture"
    v = fixture_vectors()
    r = row.result
    assert r.level1.d == pytest.approx(oracles.weat_d(v["X"], v["Y"], v["A"], v["B"]), abs=1e-12)
    assert (r.level1.p_greater, r.level1.p_less, r.level1.p_equal) == oracles.level1_p(v["X"], v["Y"], v["A"], v["B"])
    for es, T in ((r.level2_x, v["X"]), (r.level2_y, v["Y"])):
        assert es.d == pytest.approx(oracles.level2_d(T, v["A"], v["B"]), abs=1e-12)
        assert (es.p_greater, es.p_less, es.p_equal) == oracles.level2_p(T, v["A"], v["B"])
    for k, (T, A) in {"XA": "XA", "XB": "XB", "YA": "YA", "YB": "YB"}.items():
        m, s, n = oracles.cell(v[T], v[A])
        assert r.level3[k].count == n
        assert r.level3[k].mean == pytest.approx(m, abs=1e-12)
        assert r.level3[k].std == pytest.approx(s, abs=1e-12)
    # frozen values guard against silent drift in the fixture or the engine
    assert r.level1.d == pytest.approx(1.6362, abs=5e-4)
    assert r.level2_x.p_greater == pytest.approx(15 / 252)  # just above alpha
    assert row.pattern is EatPattern.BY_SINGULAR


def test_empty_suite_and_header_only():
    assert run_suite(fixture_config(tests=[])) == []
    assert render_report([], "csv").count("\n") == 1
    table = render_report([], "table")
    assert table.splitlines()[1].split() == list(TABLE_HEADER)
    assert len(table.splitlines()) == 2
    assert json.loads(render_report([], "json")) == {"schema": "mleat-report/1", "rows": []}


def test_golden_table_header():
    lines = render_report([], "table").splitlines()
    assert lines[0].split() == ["Level", "Level", "1", "Level", "2", "Level", "3"]
    assert lines[1].split() == ["EAT", "A,B,X,Y", "A,B,X", "A,B,Y", "A,X", "B,X", "A,Y", "B,Y", "Pattern"]


def test_fmt2():
    assert [fmt2(x) for x in (1.5, 0.6, -0.694, 0.0, -0.001, 1.234)] == ["1.50", ".60", "-.69", ".00", ".00", "1.23"]


def test_table_row_layout():
    rows = run_suite(fixture_config())
    bare = render_report(rows, "table", markers=False).splitlines()[2].split()
    r = rows[0].result
    assert bare[0] == "fixture"
    assert bare[1] == fmt2(r.level1.d) + "*"
    assert bare[2].rstrip("*") == fmt2(r.level2_x.d) and bare[3].rstrip("*") == fmt2(r.level2_y.d)
    assert bare[4] == fmt2(r.level3["XA"].mean) and bare[5] == f"({fmt2(r.level3['XA'].std)})"
    marked = render_report(rows, "table").splitlines()[2]
    assert "· " + fmt2(r.level2_x.d) + " " in marked and "- " + fmt2(r.level2_y.d) + "*" in marked
    colored = render_report(rows, "table", color=True)
    assert "\x1b[90m" in colored and "\x1b[34m" in colored and "\x1b[31m" not in colored


def test_json_round_trip_exact():
    rows = run_suite(fixture_config())
    text = render_report(rows, "json")
    back = rows_from_json(text)
    assert back[0].result == rows[0].result
    assert back[0].pattern is rows[0].pattern and back[0].anisotropy == rows[0].anisotropy
    assert render_report(back, "json") == text


def test_outputs_deterministic():
    cfg = fixture_config(strategy={"mode": "mc", "samples": 3000, "seed": 5})
    for fmt in ("csv", "json", "table"):
        assert render_report(run_suite(cfg), fmt) == render_report(run_suite(cfg), fmt)
    assert render_report(run_suite(cfg, workers=3), "csv") == render_report(run_suite(cfg), "csv")


def test_per_test_error_isolation():
    groups = {"Z": {"role": "target_Y", "tokens": ["nope", "x1"]}}
    cfg = fixture_config()
    bad = parse_config({"embeddings": [{"label": "fixture", "path": "fixture20.txt"}],
                        "groups": {**{g: {"role": r, "tokens": list(s.tokens)} for g, r, s in
                                      zip("XYAB", ("target_X", "target_Y", "attribute_A", "attribute_B"),
                                          (cfg.groups[k] for k in "XYAB"))}, **groups},
                        "tests": [{"name": "broken", "X": "X", "Y": "Z", "A": "A", "B": "B"},
                                  {"name": "fine", "X": "X", "Y": "Y", "A": "A", "B": "B"}],
                        "strategy": {"mode": "exact"}}, base_dir=str(DATA))
    rows = run_suite(bad)
    assert [r.name for r in rows] == ["broken", "fine"]
    assert "MissingToken" in rows[0].error and rows[1].error is None
    assert "ERROR" in render_report(rows, "table")
    csv = render_report(rows, "csv").splitlines()
    assert len(csv) == 3 and "MissingToken" in csv[1]


def _slice_spaces(n, seed=0):
    rng = np.random.default_rng(seed)
    t = get_builtin("young-old-pu8")
    words = [w for r in "XYAB" for w in getattr(t, r)[2]]
    return [EmbeddingSpace.from_mapping({w: rng.normal(size=8) for w in words}, source_label=f"{1950 + 10 * i}")
            for i in range(n)]


def test_diachronic_order_and_determinism():
    groups = get_builtin("young-old-pu8").groups()
    s = PermutationStrategy(Mode.MONTE_CARLO, samples=2000, seed=3)
    a = diachronic_run(_slice_spaces(5), groups, s)
    b = diachronic_run(_slice_spaces(5), groups, s, workers=3)
    assert a.to_csv() == b.to_csv()
    lines = a.to_csv().splitlines()
    assert tuple(lines[0].split(",")) == DIACHRONIC_COLUMNS
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1950", "1960", "1970", "1980", "1990"]


def test_diachronic_identical_slices_give_identical_records():
    space = _slice_spaces(1)[0]
    res = diachronic_run([space, space], get_builtin("young-old-pu8").groups(), PermutationStrategy(seed=1))
    assert res.records[0].csv_row() == res.records[1].csv_row()


def test_diachronic_skips_and_all_fail():
    groups = get_builtin("young-old-pu8").groups()
    spaces = _slice_spaces(3)
    broken = EmbeddingSpace.from_mapping({"Tiffany": np.ones(8)}, source_label="1800")
    res = diachronic_run([spaces[0], broken, spaces[2]], groups, PermutationStrategy(seed=1))
    assert [r.label for r in res.records] == ["1950", "1970"]
    assert res.failures[0][0] == "1800"
    with pytest.raises(MleatError):
        diachronic_run([broken, broken], groups)
