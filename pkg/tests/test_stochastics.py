import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iindex.metrics import DomainError, UndefinedMetricError, i_index
from iindex.records import AuthorCorpus, Publication, make_corpus
from iindex.stochastics import (
    NoiseSpec,
    SimulationResult,
    binomial_rms,
    brute_force_sign_rms,
    dirichlet_concentration,
    expected_delta_rms,
    sample_credit_split,
    sigma_prediction,
    significant_papers,
    simulate_i_distribution,
    simulate_trials,
    trial_generator,
)


def binomial_sum_rms(l):
    """sqrt((1/2^l) * sum_i C(l,i) (l-2i)^2), evaluated exactly."""
    total = sum(Fraction(math.comb(l, i) * (l - 2 * i) ** 2) for i in range(l + 1))
    return math.sqrt(total / 2 ** l)


def itertools_sign_rms(l):
    return math.sqrt(sum(sum(s) ** 2 for s in product((-1, 1), repeat=l)) / 2 ** l)


def test_binomial_rms_examples():
    assert binomial_rms(1) == 1.0
    assert binomial_rms(4) == 2.0
    assert binomial_sum_rms(4) == 2.0
    assert binomial_rms(20) == pytest.approx(4.4721, abs=1e-4)
    with pytest.raises(DomainError):
        binomial_rms(0)


@pytest.mark.parametrize("l", [2, 3, 10])
def test_brute_force_sign_rms_examples(l):
    assert brute_force_sign_rms(l) == pytest.approx(math.sqrt(l), rel=1e-12)
    assert brute_force_sign_rms(l) == pytest.approx(itertools_sign_rms(l), rel=1e-12)


def test_brute_force_matches_binomial_sum():
    for l in range(1, 15):
        assert brute_force_sign_rms(l) == pytest.approx(binomial_sum_rms(l), rel=1e-12)


def test_brute_force_budget():
    with pytest.raises(ValueError):
        brute_force_sign_rms(0)
    with pytest.raises(ValueError):
        brute_force_sign_rms(25)


def test_expected_delta_rms():
    assert expected_delta_rms(10, 2, 25) == 1.0
    assert expected_delta_rms(0, 3, 7) == 0.0
    # spread up to 20%, a few authors, h around 30: well below 1 point against I ~ 40
    assert expected_delta_rms(10, 3, 30) < 1
    with pytest.raises(DomainError):
        expected_delta_rms(1, 0.5, 4)


def test_sigma_prediction():
    assert sigma_prediction(10, 3, 25) == pytest.approx(0.6667, abs=1e-4)
    assert sigma_prediction(10, 3, 50) == pytest.approx(sigma_prediction(10, 3, 25) / math.sqrt(2))
    assert sigma_prediction(20, 1, 1) == 20.0


def test_sample_split_degenerate_cases():
    rng = trial_generator(1, 0)
    assert sample_credit_split(7.0, 1, 15, rng).tolist() == [7.0]
    assert sample_credit_split(12.0, 4, 0, rng).tolist() == [3.0] * 4


def test_sample_split_moments():
    rng = np.random.default_rng(2024)
    draws = np.array([sample_credit_split(100.0, 4, 10, rng) for _ in range(100_000)])
    assert abs(draws.mean() - 25) < 0.1
    assert abs(draws[:, 0].mean() - 25) < 0.1
    assert draws[:, 0].std() == pytest.approx(2.5, rel=0.10)


@pytest.mark.parametrize("n", [2, 3, 7, 50])
@pytest.mark.parametrize("x", [1.0, 10.0, 20.0])
def test_concentration_hits_target_variance(n, x):
    alpha = dirichlet_concentration(n, x)
    var = (1 / n) * (1 - 1 / n) / (n * alpha + 1)
    assert math.sqrt(var) == pytest.approx(x / 100 / n, rel=1e-12)


def test_vanishing_spread_is_equal_split():
    y = sample_credit_split(1.0, 2, 5.7e-176, np.random.default_rng(0))
    assert y.tolist() == [0.5, 0.5]


def test_unreachable_spread_clamps_with_warning():
    with pytest.warns(RuntimeWarning):
        alpha = dirichlet_concentration(2, 150.0)
    assert alpha > 0


@settings(max_examples=200)
@given(st.floats(0.5, 1e5), st.integers(1, 60), st.floats(0, 20), st.integers(0, 2**32))
def test_split_sums_to_credit_and_is_positive(c, n, x, seed):
    y = sample_credit_split(c, n, x, np.random.default_rng(seed))
    assert len(y) == n
    assert math.isclose(y.sum(), c, rel_tol=1e-9)
    assert (y > 0).all() and (y <= c * (1 + 1e-12)).all()


def test_noise_spec_range():
    with pytest.raises(DomainError):
        NoiseSpec(25)
    with pytest.raises(DomainError):
        NoiseSpec(5, {"p1": -1})
    spec = NoiseSpec(5, {"p1": 12})
    assert spec.x_for(Publication("p1", 1, 1, 2000)) == 12
    assert spec.x_for(Publication("p2", 1, 1, 2000)) == 5


def test_single_author_corpus_is_deterministic():
    corpus = make_corpus([30, 20, 10], 1)
    values = simulate_trials(corpus, NoiseSpec(15), 200, 3)
    assert (values == 100.0).all()
    result = simulate_i_distribution(corpus, NoiseSpec(15), 200, 3)
    assert result.empirical_mean == 100.0 and result.empirical_std == 0.0
    assert result.skewness is None


def test_zero_spread_reproduces_equal_split_exactly():
    corpus = make_corpus(list(range(10, 0, -1)), [1, 2, 3, 4, 5, 6, 7, 8, 9, 10])
    result = simulate_i_distribution(corpus, NoiseSpec(0), 500, 9)
    assert result.empirical_mean == i_index(corpus)
    assert result.empirical_std == 0.0
    assert sum(n for _, n in result.histogram) == 500


def test_requires_citations():
    with pytest.raises(UndefinedMetricError):
        simulate_i_distribution(make_corpus([0, 0], 2), NoiseSpec(), 10, 0)
    with pytest.raises(ValueError):
        simulate_trials(make_corpus([3], 2), NoiseSpec(), 0, 0)


def test_significant_papers_tie_break_by_input_order():
    corpus = make_corpus([5, 9, 5, 5, 1, 4], 2)
    top = significant_papers(corpus)
    assert [p.id for p in top] == ["p2", "p1", "p3", "p4"]


def test_predictions_use_h_core():
    corpus = AuthorCorpus("x", [Publication("a", 100, 2, 2000), Publication("b", 100, 4, 2001),
                                Publication("c", 1, 50, 2002)])
    result = simulate_i_distribution(corpus, NoiseSpec(10, {"a": 20}), 100, 0)
    assert result.significant_papers == 2
    assert result.n_bar == 3.0
    assert result.x_bar == 15.0
    assert result.predicted_sigma == pytest.approx(15 / (3 * math.sqrt(2)))


def test_bitwise_reproducible_and_partition_independent():
    corpus = make_corpus([40, 30, 30, 12, 5, 2], [2, 3, 5, 2, 8, 1])
    a = simulate_trials(corpus, NoiseSpec(12), 3000, 77)
    b = simulate_trials(corpus, NoiseSpec(12), 3000, 77)
    c = simulate_trials(corpus, NoiseSpec(12), 3000, 77, workers=3)
    assert a.tobytes() == b.tobytes() == c.tobytes()
    d = simulate_trials(corpus, NoiseSpec(12), 3000, 78)
    assert a.tobytes() != d.tobytes()


def test_prefix_stability():
    corpus = make_corpus([40, 30, 12], 3)
    short = simulate_trials(corpus, NoiseSpec(12), 100, 5)
    long = simulate_trials(corpus, NoiseSpec(12), 400, 5)
    assert short.tobytes() == long[:100].tobytes()


def test_books_split_per_chapter():
    corpus = AuthorCorpus("x", [Publication("b", 300, 3, 2000, chapters=5), Publication("p", 50, 2, 2001)])
    result = simulate_i_distribution(corpus, NoiseSpec(10), 20_000, 4)
    expected = i_index(corpus)
    assert abs(result.empirical_mean - expected) < 3 * result.standard_error + 1e-12
    # per-publication sds: 0.1*20 (book chapter share) and 0.1*25
    sigma = 100 * math.hypot(2.0, 2.5) / 350
    assert result.empirical_std == pytest.approx(sigma, rel=0.05)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mean_unbiased_mixed_corpus(seed):
    corpus = make_corpus([120, 80, 80, 45, 30, 22, 10, 3], [2, 3, 7, 1, 4, 2, 12, 3])
    result = simulate_i_distribution(corpus, NoiseSpec(20), 20_000, seed)
    assert abs(result.empirical_mean - result.predicted_mean) < 3 * result.standard_error


def test_result_dict_round_trip():
    result = simulate_i_distribution(make_corpus([10, 8, 3], 2), NoiseSpec(5), 50, 1, bins=5)
    assert SimulationResult.from_dict(result.to_dict()) == result
    assert sum(n for _, n in result.histogram) == 50
