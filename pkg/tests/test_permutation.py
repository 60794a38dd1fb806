import math

import numpy as np
import pytest

from mleat.errors import PartitionOverflow
from mleat.permutation import Mode, PermutationStrategy, permutation_test

from . import oracles


def test_auto_resolution():
    s = PermutationStrategy()
    assert s.resolve(8, 8) is Mode.EXACT
    assert s.resolve(10, 10) is Mode.EXACT  # C(20,10) = 184756
    assert s.resolve(16, 16) is Mode.MONTE_CARLO
    assert s.resolve(25, 25) is Mode.MONTE_CARLO
    assert s.resolve(7, 8) is Mode.MONTE_CARLO
    assert PermutationStrategy(exact_limit=100).resolve(4, 4) is Mode.EXACT
    assert PermutationStrategy(exact_limit=69).resolve(4, 4) is Mode.MONTE_CARLO
    assert PermutationStrategy("mc").mode is Mode.MONTE_CARLO


def test_strategy_validation():
    with pytest.raises(ValueError):
        PermutationStrategy(samples=0)
    with pytest.raises(ValueError):
        PermutationStrategy(seed=-1)
    with pytest.raises(ValueError):
        PermutationStrategy(mode="bogus")


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_exact_matches_enumeration(n, rng):
    for _ in range(5):
        v = rng.normal(size=2 * n)
        r = permutation_test(v, n, PermutationStrategy(Mode.EXACT))
        assert (r.p_greater, r.p_less, r.p_equal) == oracles.enumerate_p(v, n)
        assert r.permutations == math.comb(2 * n, n)
        assert r.p_greater + r.p_less + r.p_equal == pytest.approx(1.0, abs=1e-15)


def test_exact_with_ties():
    v = np.array([1.0, 1.0, 2.0, 2.0])
    r = permutation_test(v, 2, PermutationStrategy(Mode.EXACT))
    assert (r.p_greater, r.p_less, r.p_equal) == oracles.enumerate_p(v, 2)
    # ulp-level noise must not break a genuine tie
    w = np.array([0.1 + 0.2, 0.7, 0.3, 0.7])
    r = permutation_test(w, 2, PermutationStrategy(Mode.EXACT))
    assert r.p_equal == pytest.approx(4 / 6)


def test_all_tie_diagnostic():
    r = permutation_test(np.full(6, 0.25), 3, PermutationStrategy(Mode.EXACT))
    assert (r.p_greater, r.p_less, r.p_equal) == (0.0, 0.0, 1.0)
    assert r.diagnostic


def test_exact_overflow():
    with pytest.raises(PartitionOverflow):
        permutation_test(np.arange(20.0), 10, PermutationStrategy(Mode.EXACT, exact_limit=1000))


def test_monte_carlo_deterministic_and_worker_independent(rng):
    v = rng.normal(size=30)
    s = PermutationStrategy(Mode.MONTE_CARLO, samples=20_000, seed=7)
    a = permutation_test(v, 15, s)
    b = permutation_test(v, 15, s)
    c = permutation_test(v, 15, PermutationStrategy(Mode.MONTE_CARLO, samples=20_000, seed=7, workers=4))
    assert a == b == c
    d = permutation_test(v, 15, PermutationStrategy(Mode.MONTE_CARLO, samples=20_000, seed=8))
    assert d.p_greater != a.p_greater


def test_monte_carlo_smoothing_never_zero():
    v = np.arange(12.0)[::-1]  # observed split is the most extreme one
    r = permutation_test(v, 6, PermutationStrategy(Mode.MONTE_CARLO, samples=1000, seed=0))
    assert r.p_greater == pytest.approx(1 / 1001)
    assert r.p_greater > 0


def test_monte_carlo_unequal_sizes(rng):
    v = rng.normal(size=11)
    exact = oracles.enumerate_p(v, 4)
    r = permutation_test(v, 4, PermutationStrategy(Mode.MONTE_CARLO, samples=50_000, seed=1))
    sigma = math.sqrt(exact[0] * (1 - exact[0]) / 50_000)
    assert abs(r.p_greater - exact[0]) < 4 * sigma + 1e-4
