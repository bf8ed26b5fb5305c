"""Seeded Monte Carlo auction runs and grid-based best-response audits.

Randomness is counter-based: trial t owns the 2n-word block [t*2n, (t+1)*2n)
of the Philox stream keyed by the seed, so any partition of the trial range
reproduces the same draws.  Within a trial the words are consumed in a fixed
order: participation uniforms for bidders 1..n first, then one bid uniform per
participant in index order.  Reports are therefore bit-for-bit identical for a
given (config, trials, seed, chunk_size) regardless of thread count.

Per-chunk moment sums are reduced sequentially in chunk order, never in
completion order, which keeps the float accumulation deterministic under
parallel execution.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.random import Generator, Philox

from .config import AuctionConfig, ValidationError
from .equilibrium import _cdf_array, _quantile_array, equilibrium_profile

_DEFAULT_CHUNK = 65536  # even, so chunk word offsets stay Philox-block aligned
_THREADS_ENV = "ALLPAY_EQ_THREADS"


# ---------------------------------------------------------------------------
# Single-auction semantics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuctionOutcome:
    """One realized auction: tie-splitting winners, all-pay utilities, and the
    revenue of both auctioneer models."""

    participated: tuple[bool, ...]
    bids: tuple[float | None, ...]
    winners: frozenset[int]
    bidder_utilities: tuple[float, ...]
    sum_revenue: float
    max_revenue: float


def run_auction(config: AuctionConfig, randomness) -> AuctionOutcome:
    """Play one auction.

    ``randomness`` is either a numpy Generator or an iterable of uniforms in
    [0, 1).  Draws are consumed in the documented order (participation flags
    for bidders 1..n, then bids for participants in index order), so a replay
    from a recorded stream is exact.  A single-bidder auction needs no bid
    draw: the sole bidder bids 0 and wins whenever present.
    """
    n = config.n
    draw = _make_drawer(randomness)
    participated = [draw() < p for p in config.probabilities]
    bids: list[float | None] = [None] * n
    if n == 1:
        if participated[0]:
            bids[0] = 0.0
    else:
        prof = equilibrium_profile(config)
        for i in range(1, n + 1):
            if participated[i - 1]:
                u = np.asarray([draw()])
                bids[i - 1] = float(_quantile_array(config, prof, i, u)[0])
    return _settle(participated, bids)


def _make_drawer(randomness) -> Callable[[], float]:
    if isinstance(randomness, Generator):
        return lambda: float(randomness.random())
    iterator = iter(randomness)
    return lambda: float(next(iterator))


def _settle(participated: Sequence[bool], bids: Sequence[float | None]) -> AuctionOutcome:
    active = [i for i, flag in enumerate(participated, start=1) if flag]
    if not active:
        return AuctionOutcome(
            participated=tuple(participated),
            bids=tuple(bids),
            winners=frozenset(),
            bidder_utilities=tuple(0.0 for _ in participated),
            sum_revenue=0.0,
            max_revenue=0.0,
        )
    top = max(bids[i - 1] for i in active)
    winners = frozenset(i for i in active if bids[i - 1] == top)
    share = 1.0 / len(winners)
    utilities = []
    for i, flag in enumerate(participated, start=1):
        if not flag:
            utilities.append(0.0)
        elif i in winners:
            utilities.append(share - bids[i - 1])
        else:
            utilities.append(-bids[i - 1])
    return AuctionOutcome(
        participated=tuple(participated),
        bids=tuple(bids),
        winners=winners,
        bidder_utilities=tuple(utilities),
        sum_revenue=float(sum(bids[i - 1] for i in active)),
        max_revenue=float(top),
    )


# ---------------------------------------------------------------------------
# Monte Carlo aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BidderStats:
    """Per-bidder empirical summary.  Bid statistics condition on
    participation; utility statistics count absences as zero."""

    participations: int
    bid_mean: float
    bid_variance: float
    bid_mean_se: float
    bid_variance_se: float
    zero_bid_rate: float
    zero_bid_rate_se: float
    utility_mean: float
    utility_variance: float
    utility_mean_se: float
    utility_variance_se: float


@dataclass(frozen=True)
class RevenueStats:
    mean: float
    variance: float
    mean_se: float
    variance_se: float


@dataclass(frozen=True)
class SimulationReport:
    config: AuctionConfig
    trials: int
    seed: int
    bidders: tuple[BidderStats, ...]
    sum_revenue: RevenueStats
    max_revenue: RevenueStats

    def to_dict(self) -> dict:
        cfg = self.config
        rows = [
            {
                "bidder": i,
                "caller_position": cfg.caller_position(i),
                "probability": cfg.probabilities[i - 1],
                **vars(self.bidders[i - 1]),
            }
            for i in range(1, cfg.n + 1)
        ]
        return {
            "trials": self.trials,
            "seed": self.seed,
            "bidders_sorted": rows,
            "bidders_caller_order": sorted(rows, key=lambda r: r["caller_position"]),
            "sum_revenue": vars(self.sum_revenue),
            "max_revenue": vars(self.max_revenue),
        }


def monte_carlo(
    config: AuctionConfig,
    trials: int,
    seed: int = 0,
    threads: int | None = None,
    chunk_size: int = _DEFAULT_CHUNK,
) -> SimulationReport:
    """Run ``trials`` independent auctions and aggregate moment statistics.

    Deterministic for fixed (config, trials, seed, chunk_size) under any
    thread count.  ``threads`` defaults to 1 and is capped by the
    ALLPAY_EQ_THREADS environment variable when that is set.
    """
    if not isinstance(trials, int) or trials < 1:
        raise ValidationError(f"trials must be a positive integer, got {trials!r}")
    if chunk_size < 2 or chunk_size % 2:
        raise ValidationError("chunk_size must be even and >= 2")
    seed = int(seed)
    starts = list(range(0, trials, chunk_size))
    workers = _resolve_threads(threads)
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(
                pool.map(
                    lambda t0: _chunk_sums(config, seed, t0, min(chunk_size, trials - t0)),
                    starts,
                )
            )
    else:
        chunks = [_chunk_sums(config, seed, t0, min(chunk_size, trials - t0)) for t0 in starts]
    total = chunks[0]
    for part in chunks[1:]:  # fixed order: chunk index, not completion order
        total = _merge(total, part)
    return _finalize(config, trials, seed, total)


def _resolve_threads(threads: int | None) -> int:
    cap = os.environ.get(_THREADS_ENV)
    cap_value = max(1, int(cap)) if cap else None
    requested = threads if threads is not None else (cap_value or 1)
    if cap_value is not None:
        requested = min(requested, cap_value)
    return max(1, requested)


def _trial_block(config: AuctionConfig, seed: int, t0: int, m: int) -> np.ndarray:
    """Uniform draws for trials t0..t0+m-1, one 2n-word row per trial."""
    words_per_trial = 2 * config.n
    offset_words = t0 * words_per_trial
    bit_gen = Philox(key=seed)
    if offset_words:
        assert offset_words % 4 == 0  # Philox advances in 4-word blocks
        bit_gen.advance(offset_words // 4)
    return Generator(bit_gen).random((m, words_per_trial))


def _simulate_block(
    config: AuctionConfig, seed: int, t0: int, m: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized trials: (participation, bids, utilities, sum_rev, max_rev)."""
    n = config.n
    words = _trial_block(config, seed, t0, m)
    p = np.asarray(config.probabilities)
    part = words[:, :n] < p
    bids = np.zeros((m, n))
    if n == 1:
        pass  # sole bidder bids 0 when present
    else:
        prof = equilibrium_profile(config)
        # participants take bid words in index order from the block's back half
        rank = np.cumsum(part, axis=1) - 1
        u_bid = np.take_along_axis(words[:, n:], np.maximum(rank, 0), axis=1)
        for i in range(1, n + 1):
            col = part[:, i - 1]
            if np.any(col):
                bids[col, i - 1] = _quantile_array(config, prof, i, u_bid[col, i - 1])
    masked = np.where(part, bids, -np.inf)
    top = masked.max(axis=1)
    any_part = part.any(axis=1)
    winners = part & (masked == top[:, None])
    n_win = winners.sum(axis=1)
    share = np.zeros(m)
    np.divide(1.0, n_win, out=share, where=n_win > 0)
    utilities = np.where(part, -bids, 0.0) + winners * share[:, None]
    sum_rev = np.where(part, bids, 0.0).sum(axis=1)
    max_rev = np.where(any_part, top, 0.0)
    return part, bids, utilities, sum_rev, max_rev


def _moment_sums(values: np.ndarray) -> np.ndarray:
    v = values
    return np.array([v.sum(), (v**2).sum(), (v**3).sum(), (v**4).sum()])


def _chunk_sums(config: AuctionConfig, seed: int, t0: int, m: int) -> dict:
    n = config.n
    part, bids, utilities, sum_rev, max_rev = _simulate_block(config, seed, t0, m)
    bid_moments = np.zeros((n, 4))
    util_moments = np.zeros((n, 4))
    zero_counts = np.zeros(n)
    for j in range(n):
        col = part[:, j]
        b = bids[col, j]
        bid_moments[j] = _moment_sums(b)
        zero_counts[j] = np.count_nonzero(b == 0.0)
        util_moments[j] = _moment_sums(utilities[:, j])
    return {
        "trials": m,
        "participations": part.sum(axis=0).astype(float),
        "bid_moments": bid_moments,
        "zero_counts": zero_counts,
        "util_moments": util_moments,
        "sum_rev": _moment_sums(sum_rev),
        "max_rev": _moment_sums(max_rev),
    }


def _merge(a: dict, b: dict) -> dict:
    return {key: a[key] + b[key] for key in a}


def _mean_var_se(moments: np.ndarray, count: float) -> tuple[float, float, float, float]:
    """(mean, sample variance, SE of mean, asymptotic SE of the variance)."""
    if count < 2:
        nan = float("nan")
        mean = moments[0] / count if count else nan
        return mean, nan, nan, nan
    s1, s2, s3, s4 = (float(v) for v in moments)
    mean = s1 / count
    m2 = max(s2 / count - mean**2, 0.0)
    m4 = max(
        s4 / count - 4 * mean * s3 / count + 6 * mean**2 * s2 / count - 3 * mean**4, 0.0
    )
    variance = m2 * count / (count - 1)
    se_mean = math.sqrt(variance / count)
    se_var = math.sqrt(max(m4 - m2**2, 0.0) / count)
    return mean, variance, se_mean, se_var


def _finalize(config: AuctionConfig, trials: int, seed: int, tot: dict) -> SimulationReport:
    bidders = []
    for j in range(config.n):
        cnt = float(tot["participations"][j])
        b_mean, b_var, b_se, b_var_se = _mean_var_se(tot["bid_moments"][j], cnt)
        u_mean, u_var, u_se, u_var_se = _mean_var_se(tot["util_moments"][j], float(trials))
        if cnt:
            zero_rate = float(tot["zero_counts"][j]) / cnt
            zero_se = math.sqrt(max(zero_rate * (1 - zero_rate), 0.0) / cnt)
        else:
            zero_rate, zero_se = float("nan"), float("nan")
        bidders.append(
            BidderStats(
                participations=int(cnt),
                bid_mean=b_mean,
                bid_variance=b_var,
                bid_mean_se=b_se,
                bid_variance_se=b_var_se,
                zero_bid_rate=zero_rate,
                zero_bid_rate_se=zero_se,
                utility_mean=u_mean,
                utility_variance=u_var,
                utility_mean_se=u_se,
                utility_variance_se=u_var_se,
            )
        )
    return SimulationReport(
        config=config,
        trials=trials,
        seed=seed,
        bidders=tuple(bidders),
        sum_revenue=RevenueStats(*_mean_var_se(tot["sum_rev"], float(trials))),
        max_revenue=RevenueStats(*_mean_var_se(tot["max_rev"], float(trials))),
    )


# ---------------------------------------------------------------------------
# Best-response audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditResult:
    bidder: int
    max_payoff: float
    argmax_bid: float
    baseline: float
    deviation_gain: float


def best_response_audit(
    config: AuctionConfig,
    i: int,
    grid_size: int,
    cdfs: Sequence[Callable[[np.ndarray], np.ndarray]] | None = None,
) -> AuditResult:
    """Scan a bid grid over [0, s_0] (plus every breakpoint) for bidder i's
    best response payoff against a strategy profile.

    With the default profile (the equilibrium), the baseline payoff is lam and
    the deviation gain of a correct equilibrium is numerical noise.  Passing
    ``cdfs`` (one CDF callable per sorted bidder) audits a perturbed profile:
    the baseline is then bidder i's expected payoff under its own listed
    strategy, integrated against the grid, so a profitable deviation shows up
    as a positive gain.
    """
    if grid_size < 2:
        raise ValidationError("grid_size must be >= 2")
    prof = equilibrium_profile(config)
    grid = np.union1d(np.linspace(0.0, prof.breakpoints[0], grid_size), prof.breakpoints)
    payoff_grid = _profile_payoff(config, i, grid, cdfs)
    best = int(np.argmax(payoff_grid))
    if cdfs is None:
        baseline = prof.lam
    else:
        own = cdfs[i - 1]
        mids = 0.5 * (grid[1:] + grid[:-1])
        payoff_mids = _profile_payoff(config, i, mids, cdfs)
        f_grid = np.asarray(own(grid), dtype=float)
        baseline = float(f_grid[0]) * float(payoff_grid[0]) + float(
            np.sum(payoff_mids * np.diff(f_grid))
        )
    return AuditResult(
        bidder=i,
        max_payoff=float(payoff_grid[best]),
        argmax_bid=float(grid[best]),
        baseline=float(baseline),
        deviation_gain=float(payoff_grid[best] - baseline),
    )


def equilibrium_cdf_callables(
    config: AuctionConfig,
) -> list[Callable[[np.ndarray], np.ndarray]]:
    """The equilibrium profile as plain callables, handy for building perturbed
    profiles to audit."""
    prof = equilibrium_profile(config)

    def make(i: int) -> Callable[[np.ndarray], np.ndarray]:
        return lambda xs: _cdf_array(config, prof, i, np.asarray(xs, dtype=float))

    return [make(i) for i in range(1, config.n + 1)]


def _profile_payoff(
    config: AuctionConfig,
    i: int,
    xs: np.ndarray,
    cdfs: Sequence[Callable[[np.ndarray], np.ndarray]] | None,
) -> np.ndarray:
    prof = equilibrium_profile(config)
    prod = np.ones_like(xs, dtype=float)
    for j in range(1, config.n + 1):
        if j == i:
            continue
        p_j = config.probabilities[j - 1]
        f_j = (
            _cdf_array(config, prof, j, xs)
            if cdfs is None
            else np.asarray(cdfs[j - 1](xs), dtype=float)
        )
        prod *= p_j * f_j + 1.0 - p_j
    return prod - xs
