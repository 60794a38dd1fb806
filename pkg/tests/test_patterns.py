import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mleat.association import CellStats
from mleat.engine import EffectSize
from mleat.patterns import (
    Direction,
    EatPattern,
    Level2Verdict,
    Toward,
    anisotropy_diagnostic,
    classify,
    verdict,
)


def es(d, p_greater, p_less):
    return EffectSize(d, p_greater, p_less, 0.0, False)


def test_verdict_examples():
    assert verdict(es(0.60, 0.001, 0.999)).toward is Toward.A
    assert verdict(es(-1.39, 0.999, 0.001)).toward is Toward.B
    assert verdict(es(0.31, 0.2, 0.8)).toward is Toward.NONE
    # significant p but effect below the small-effect threshold
    assert verdict(es(0.15, 0.01, 0.99)).toward is Toward.NONE
    # large d whose own tail is not significant
    assert verdict(es(0.9, 0.5, 0.01)).toward is Toward.NONE


def test_verdict_two_sided():
    e = EffectSize(0.5, 0.03, 0.97, 0.0, False, two_sided=True)
    assert verdict(e).toward is Toward.NONE  # 2 * 0.03 = 0.06
    e = EffectSize(0.5, 0.02, 0.98, 0.0, False, two_sided=True)
    assert verdict(e).toward is Toward.A and verdict(e).p_used == pytest.approx(0.04)


@given(st.floats(-3, 3), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_verdict_monotone_in_p(d, pg, pl, bump):
    worse = verdict(es(d, min(1.0, pg + bump), min(1.0, pl + bump)))
    if verdict(es(d, pg, pl)).toward is Toward.NONE:
        assert worse.toward is Toward.NONE


def test_classify_table():
    A, B, N = Toward.A, Toward.B, Toward.NONE
    assert classify(A, B) is EatPattern.AB_DIVERGENT
    assert classify(A, A) is EatPattern.A_UNIFORM
    assert classify(N, N) is EatPattern.NON_DIRECTIONAL
    assert classify(N, B) is EatPattern.BY_SINGULAR
    assert classify(Level2Verdict(A, 1.0, 0.0), Level2Verdict(N, 0.0, 1.0)) is EatPattern.AX_SINGULAR


def test_classify_bijective_with_directions():
    pairs = list(itertools.product(Toward, repeat=2))
    patterns = [classify(x, y) for x, y in pairs]
    assert len(set(patterns)) == 9 == len(EatPattern)
    for (x, y), p in zip(pairs, patterns):
        none_count = (x is Toward.NONE) + (y is Toward.NONE)
        if none_count == 2:
            assert p.direction is Direction.NON_DIRECTIONAL
        elif none_count == 1:
            assert p.direction is Direction.SINGULAR
        elif x is y:
            assert p.direction is Direction.UNIFORM
        else:
            assert p.direction is Direction.DIVERGENT
        assert p.verdicts == (x, y)


def test_serialized_names():
    assert [p.value for p in EatPattern] == [
        "AB-Divergent", "BA-Divergent", "A-Uniform", "B-Uniform", "AX-Singular", "AY-Singular",
        "BX-Singular", "BY-Singular", "Non-Directional"]


def cells(mean, std):
    return {k: CellStats(mean, std, 100) for k in ("XA", "XB", "YA", "YB")}


def test_anisotropy_examples():
    assert anisotropy_diagnostic(cells(0.99, 0.01)).flagged
    assert not anisotropy_diagnostic(cells(0.10, 0.10)).flagged
    assert not anisotropy_diagnostic(cells(0.29, 0.05)).flagged
    mixed = cells(0.99, 0.01)
    mixed["YB"] = CellStats(0.90, 0.01, 100)
    diag = anisotropy_diagnostic(mixed)
    assert not diag.flagged and "YB" in diag.rationale
    assert diag.min_cell_mean == 0.90 and diag.max_cell_mean == 0.99


@given(st.floats(0.5, 1.0), st.floats(0.0, 0.2), st.floats(0, 0.5), st.floats(0, 0.5))
def test_anisotropy_monotone_in_thresholds(mean, std, up, down):
    c = cells(mean, std)
    base = anisotropy_diagnostic(c, 0.95, 0.05).flagged
    stricter = anisotropy_diagnostic(c, 0.95 + up, max(0.0, 0.05 - down)).flagged
    assert not (stricter and not base)
    if stricter:
        d = anisotropy_diagnostic(c, 0.95 + up, max(0.0, 0.05 - down))
        assert d.min_cell_mean >= 0.95 + up and d.max_cell_std <= 0.05 - down or down > 0.05
