import hashlib
import json
from pathlib import Path

import pytest

from mleat.embeddings import Role
from mleat.stimuli import BUILTIN_TESTS, CLASSIC10, MATH, ART, get_builtin, list_builtin_stimuli

REFERENCE = json.loads((Path(__file__).parent / "data" / "stimuli_reference.json").read_text(encoding="utf-8"))
CHECKSUM = "9043a260f6dbd28388e5fca1a86fe145da68f27e1c1e391ef718e06025caed1b"


def stimuli_checksum():
    blob = json.dumps([t.to_dict() for t in BUILTIN_TESTS.values()], sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode()).hexdigest()


def test_ten_classic_tests_present_in_order():
    assert list(CLASSIC10) == list(REFERENCE)
    assert set(CLASSIC10) < set(list_builtin_stimuli())


@pytest.mark.parametrize("name", list(REFERENCE))
def test_verbatim_against_reference(name):
    t = get_builtin(name)
    for role in "XYAB":
        assert list(t.to_dict()[role]["tokens"]) == REFERENCE[name][role]


def test_frozen_checksum():
    assert stimuli_checksum() == CHECKSUM


def test_group_sizes():
    assert get_builtin("flower-insect-pu25").sizes() == (25, 25, 25, 25)
    assert get_builtin("eaaa32-pu25").sizes() == (32, 32, 25, 25)
    assert get_builtin("eaaa16-pu8").sizes() == (16, 16, 8, 8)
    assert get_builtin("young-old-pu8").sizes() == (8, 8, 8, 8)
    # targets are Mental/Physical (6 each), attributes Temporary/Permanent (7 each)
    assert get_builtin("mental-physical-tempperm").sizes() == (6, 6, 7, 7)


def test_histwords_substitutions():
    t = get_builtin("math-arts-histwords")
    x, y = t.to_dict()["X"]["tokens"], t.to_dict()["Y"]["tokens"]
    assert "mathematics" in x and "calculation" in x and "math" not in x and "calculus" not in x
    assert "music" in y and "symphony" not in y
    assert len(x) == len(MATH) and len(y) == len(ART)
    assert [w for w in x if w not in ("mathematics", "calculation")] == [w for w in MATH if w not in ("math", "calculus")]


def test_group_specs():
    g = get_builtin("flower-insect-pu25").groups()
    assert g["X"].name == "flower-insect-pu25:Flower" and g["X"].role is Role.TARGET_X
    assert g["B"].role is Role.ATTRIBUTE_B and g["B"].tokens[-1] == "prison"


def test_unknown_builtin():
    with pytest.raises(KeyError):
        get_builtin("nope")
