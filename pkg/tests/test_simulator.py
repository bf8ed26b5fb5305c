import os

import numpy as np
import pytest
from numpy.random import Generator, Philox

import allpay_eq as ap
from allpay_eq.simulate import _simulate_block, _trial_block


# ---------------------------------------------------------------------------
# single auctions with forced draws
# ---------------------------------------------------------------------------


def test_forced_draws_two_bidders():
    cfg = ap.build_config([0.5, 1.0])
    out = ap.run_auction(cfg, [0.1, 0.0, 0.9, 0.9])
    assert out.participated == (True, True)
    # quantiles at u = 0.9: bidder 1 -> 0.45, bidder 2 -> 0.40
    assert out.bids == (pytest.approx(0.45), pytest.approx(0.40))
    assert out.winners == frozenset({1})
    assert out.bidder_utilities == (pytest.approx(0.55), pytest.approx(-0.40))
    assert out.sum_revenue == pytest.approx(0.85)
    assert out.max_revenue == pytest.approx(0.45)


def test_no_participants():
    cfg = ap.build_config([0.5, 0.5])
    out = ap.run_auction(cfg, [0.9, 0.9])
    assert out.participated == (False, False)
    assert out.winners == frozenset()
    assert out.bidder_utilities == (0.0, 0.0)
    assert out.sum_revenue == 0.0 and out.max_revenue == 0.0


def test_single_participant_keeps_surplus():
    cfg = ap.build_config([0.5, 0.5])
    out = ap.run_auction(cfg, [0.1, 0.9, 0.7])
    b = out.bids[0]
    assert out.participated == (True, False)
    assert out.bidder_utilities[0] == pytest.approx(1.0 - b)
    assert out.sum_revenue == pytest.approx(b) and out.max_revenue == pytest.approx(b)


def test_exact_tie_splits_item():
    cfg = ap.build_config([0.5, 0.5])
    out = ap.run_auction(cfg, [0.1, 0.1, 0.7, 0.7])
    assert out.bids[0] == out.bids[1]
    assert out.winners == frozenset({1, 2})
    assert out.bidder_utilities[0] == pytest.approx(0.5 - out.bids[0])


def test_single_bidder_auction():
    cfg = ap.build_config([0.6])
    present = ap.run_auction(cfg, [0.1])
    assert present.bids == (0.0,) and present.bidder_utilities == (1.0,)
    absent = ap.run_auction(cfg, [0.9])
    assert absent.bids == (None,) and absent.bidder_utilities == (0.0,)


def test_run_auction_accepts_generator(example4):
    out = ap.run_auction(example4, Generator(Philox(key=5)))
    assert len(out.bids) == 4


# ---------------------------------------------------------------------------
# Monte Carlo engine
# ---------------------------------------------------------------------------


def test_trials_validation(example4):
    with pytest.raises(ap.ValidationError):
        ap.monte_carlo(example4, 0)
    with pytest.raises(ap.ValidationError):
        ap.monte_carlo(example4, -5)


def test_identical_seeds_identical_reports(example4):
    a = ap.monte_carlo(example4, 30_000, seed=42)
    b = ap.monte_carlo(example4, 30_000, seed=42)
    assert a == b
    c = ap.monte_carlo(example4, 30_000, seed=43)
    assert a != c


def test_thread_count_does_not_change_report(example4):
    base = ap.monte_carlo(example4, 200_000, seed=9, threads=1)
    for threads in (2, 4, 7):
        assert ap.monte_carlo(example4, 200_000, seed=9, threads=threads) == base


def test_env_var_caps_threads(example4, monkeypatch):
    monkeypatch.setenv("ALLPAY_EQ_THREADS", "2")
    capped = ap.monte_carlo(example4, 50_000, seed=3, threads=16)
    monkeypatch.delenv("ALLPAY_EQ_THREADS")
    assert capped == ap.monte_carlo(example4, 50_000, seed=3, threads=1)


def test_philox_blocks_are_stream_slices(example4):
    whole = _trial_block(example4, 7, 0, 512)
    parts = [_trial_block(example4, 7, t0, 128) for t0 in range(0, 512, 128)]
    assert np.array_equal(np.vstack(parts), whole)


def test_vectorized_trials_replay_exactly(example4):
    """Feeding a trial's word block to run_auction reproduces the vectorized row."""
    words = _trial_block(example4, 7, 0, 64)
    part, bids, utils, srev, mrev = _simulate_block(example4, 7, 0, 64)
    for t in range(64):
        out = ap.run_auction(example4, iter(words[t]))
        assert out.participated == tuple(part[t])
        for j in range(4):
            if part[t, j]:
                assert out.bids[j] == bids[t, j]
            else:
                assert out.bids[j] is None
        assert out.bidder_utilities == tuple(utils[t])
        assert out.sum_revenue == srev[t] and out.max_revenue == mrev[t]


def test_report_serialization(example4):
    report = ap.monte_carlo(example4, 5_000, seed=1)
    payload = report.to_dict()
    assert payload["trials"] == 5_000 and payload["seed"] == 1
    assert len(payload["bidders_sorted"]) == 4
    assert set(payload["sum_revenue"]) == {"mean", "variance", "mean_se", "variance_se"}


@pytest.fixture(scope="module")
def example4_mc():
    cfg = ap.build_config([1 / 3, 1 / 2, 3 / 4, 1.0])
    return cfg, ap.monte_carlo(cfg, 400_000, seed=21)


def test_mc_utilities_match_closed_form(example4_mc):
    cfg, report = example4_mc
    lam = ap.lambda_value(cfg)
    for i in range(1, 5):
        stats = report.bidders[i - 1]
        target = cfg.probabilities[i - 1] * lam
        assert abs(stats.utility_mean - target) <= 4 * stats.utility_mean_se


def test_mc_revenues_match_closed_forms(example4_mc):
    cfg, report = example4_mc
    assert abs(report.sum_revenue.mean - ap.sum_profit(cfg)) <= 4 * report.sum_revenue.mean_se
    assert abs(report.max_revenue.mean - ap.max_profit(cfg)) <= 4 * report.max_revenue.mean_se


def test_mc_bid_means_match_closed_forms(example4_mc):
    cfg, report = example4_mc
    for i in range(1, 5):
        stats = report.bidders[i - 1]
        assert abs(stats.bid_mean - ap.expected_bid(cfg, i)) <= 4 * stats.bid_mean_se


def test_mc_atom_frequency(example4_mc):
    cfg, report = example4_mc
    stats = report.bidders[3]
    assert abs(stats.zero_bid_rate - 0.25) <= 4 * stats.zero_bid_rate_se
    for i in (1, 2, 3):
        assert report.bidders[i - 1].zero_bid_rate == 0.0


def test_mc_random_configs_utilities():
    rng = np.random.default_rng(57)
    for _ in range(4):
        n = int(rng.integers(2, 7))
        cfg = ap.build_config(list(1.0 - rng.random(n)))
        report = ap.monte_carlo(cfg, 150_000, seed=int(rng.integers(1_000_000)))
        lam = ap.lambda_value(cfg)
        for i in range(1, n + 1):
            stats = report.bidders[i - 1]
            target = cfg.probabilities[i - 1] * lam
            assert abs(stats.utility_mean - target) <= 4 * max(stats.utility_mean_se, 1e-12)


def test_mc_single_bidder():
    cfg = ap.build_config([0.25])
    report = ap.monte_carlo(cfg, 200_000, seed=2)
    stats = report.bidders[0]
    assert abs(stats.utility_mean - 0.25) <= 4 * stats.utility_mean_se
    assert stats.bid_mean == 0.0
    assert report.sum_revenue.mean == 0.0 and report.max_revenue.mean == 0.0


# ---------------------------------------------------------------------------
# best-response audit
# ---------------------------------------------------------------------------


def test_audit_equilibrium_has_no_profitable_deviation(example4):
    for i in range(1, 5):
        res = ap.best_response_audit(example4, i, 10_001)
        assert res.deviation_gain <= 1e-9
        assert res.baseline == pytest.approx(ap.lambda_value(example4), rel=1e-14)


def test_audit_all_reliable_profile():
    cfg = ap.build_config([1.0, 1.0, 1.0])
    for i in (1, 2, 3):
        res = ap.best_response_audit(cfg, i, 10_001)
        assert res.deviation_gain <= 1e-9
        assert res.baseline == 0.0


def test_audit_grid_validation(example4):
    with pytest.raises(ap.ValidationError):
        ap.best_response_audit(example4, 1, 1)


def test_audit_detects_corrupted_profile(example4):
    """Replace the least reliable bidder's CDF with the straight line over its
    support; someone else must now see a profitable deviation."""
    s = ap.breakpoints(example4)
    corrupted = ap.equilibrium_cdf_callables(example4)
    corrupted[0] = lambda xs: np.clip(
        (np.asarray(xs, dtype=float) - s[1]) / (s[0] - s[1]), 0.0, 1.0
    )
    gains = [
        ap.best_response_audit(example4, i, 10_001, cdfs=corrupted).deviation_gain
        for i in range(1, 5)
    ]
    assert max(gains) > 0.01
    # the corrupted bidder itself keeps its payoff function, no self-gain
    assert gains[0] == pytest.approx(0.0, abs=1e-9)


def test_audit_with_explicit_equilibrium_callables(example4):
    cdfs = ap.equilibrium_cdf_callables(example4)
    res = ap.best_response_audit(example4, 2, 5_001, cdfs=cdfs)
    assert abs(res.deviation_gain) <= 1e-9
    assert res.baseline == pytest.approx(ap.lambda_value(example4), abs=1e-11)
