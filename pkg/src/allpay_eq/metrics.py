"""Closed-form expected bids and auctioneer revenue for both profit models.

Two revenue models are covered: the sum-profit auctioneer collects every
submitted bid, the max-profit auctioneer collects only the winning bid.  Each
closed form here has an independent numerical route (piecewise quadrature of
the bid densities or of the winning-bid CDF) used by the test suite; the
quadrature helpers never integrate across a breakpoint, since the integrands
are smooth only inside pieces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .config import AuctionConfig, DegenerateAuctionError
from .equilibrium import (
    _cdf_array,
    _pdf_array,
    equilibrium_profile,
    lambda_value,
)

_QUAD_KW = dict(epsabs=1e-11, epsrel=1e-11, limit=200)


def expected_bid(config: AuctionConfig, i: int) -> float:
    """Expected equilibrium bid of bidder i, conditional on participating.

    For i <= n-1:

        E[bid_i] = (1/p_i) * ( 1/n
                   + sum_{k=1}^{i} (1-p_k)**(n-k) * prod_{j<=k}(1-p_j)
                                   / ((n-k)(n-k+1))
                   - (1-p_i)**(n-i) * prod_{j<=i}(1-p_j) / (n-i)
                   - p_i * lam )

    and the last bidder scales the second most reliable one:
    E[bid_n] = (p_{n-1}/p_n) * E[bid_{n-1}].
    """
    prof = equilibrium_profile(config)
    p = config.probabilities
    n = config.n
    if not 1 <= i <= n:
        raise DegenerateAuctionError(f"bidder index {i} outside 1..{n}")
    if i == n:
        return p[n - 2] / p[n - 1] * expected_bid(config, n - 1)
    pref = prof.prefix_products
    p_i = p[i - 1]
    total = 1.0 / n
    for k in range(1, i + 1):
        total += (1.0 - p[k - 1]) ** (n - k) * pref[k + 1] / ((n - k) * (n - k + 1))
    total -= (1.0 - p_i) ** (n - i) * pref[i + 1] / (n - i)
    total -= p_i * prof.lam
    return total / p_i


def expected_bids(config: AuctionConfig) -> tuple[float, ...]:
    """Expected bids of all bidders in sorted order."""
    return tuple(expected_bid(config, i) for i in range(1, config.n + 1))


def sum_profit(config: AuctionConfig) -> float:
    """Sum-profit auctioneer's expected revenue, 1 - lam * (1 + sum_{i<n} p_i).

    Identical to sum_i p_i * E[bid_i]; the test suite holds both routes to
    1e-9 relative agreement.
    """
    prof = equilibrium_profile(config)
    p = config.probabilities
    return 1.0 - prof.lam * (1.0 + sum(p[: config.n - 1]))


def winning_bid_cdf(config: AuctionConfig, x) -> float | np.ndarray:
    """CDF of the winning (maximum submitted) bid,

        G(x) = prod_i (p_i F_i(x) + 1 - p_i),

    with G(0) the probability that the winning bid is 0 (nobody outbids the
    atom, or nobody shows up at all).
    """
    prof = equilibrium_profile(config)
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    prod = np.ones_like(xs, dtype=float)
    for j in range(1, config.n + 1):
        p_j = config.probabilities[j - 1]
        prod *= p_j * _cdf_array(config, prof, j, xs) + 1.0 - p_j
    return float(prod[0]) if scalar else prod


def max_profit(config: AuctionConfig) -> float:
    """Max-profit auctioneer's expected revenue,

        n/(2n-1) - lam
          + sum_{k=1}^{n-1} (1-p_k)**(2n-2k-1) * prod_{j<=k}(1-p_j)**2
                            / (4(n-k)**2 - 1).
    """
    prof = equilibrium_profile(config)
    p = config.probabilities
    n = config.n
    pref = prof.prefix_products
    total = n / (2.0 * n - 1.0) - prof.lam
    for k in range(1, n):
        total += (1.0 - p[k - 1]) ** (2 * n - 2 * k - 1) * pref[k + 1] ** 2 / (
            4.0 * (n - k) ** 2 - 1.0
        )
    return total


@dataclass(frozen=True)
class NoFailureBaseline:
    """Fully-reliable benchmark quantities (means and variances) for n bidders."""

    n: int
    expected_bid: float
    bid_variance: float
    bidder_utility: float
    utility_variance: float
    sum_profit: float
    sum_profit_variance: float
    max_profit: float
    max_profit_variance: float


def no_failure_baseline(n: int) -> NoFailureBaseline:
    """Benchmark table for the classic auction where everyone always shows up:
    expected bid 1/n, bidder utility 0, sum revenue 1, max revenue n/(2n-1),
    with the matching variances."""
    if n < 2:
        raise DegenerateAuctionError("degenerate auction: n >= 2 required")
    return NoFailureBaseline(
        n=n,
        expected_bid=1.0 / n,
        bid_variance=1.0 / (2 * n - 1) - 1.0 / n**2,
        bidder_utility=0.0,
        utility_variance=(n - 1) / (n * (2.0 * n - 1)),
        sum_profit=1.0,
        sum_profit_variance=n / (2.0 * n - 1) - 1.0 / n,
        max_profit=n / (2.0 * n - 1),
        max_profit_variance=n * (n - 1) ** 2 / ((3.0 * n - 2) * (2.0 * n - 1) ** 2),
    )


@dataclass(frozen=True)
class RevenueReport:
    """Closed-form revenue summary for one auction config."""

    config: AuctionConfig
    lam: float
    expected_bids: tuple[float, ...]
    expected_utilities: tuple[float, ...]
    sum_profit: float
    max_profit: float
    atom_at_zero_last: float

    def to_dict(self) -> dict:
        """JSON-ready dict with bidder arrays in sorted and in caller order."""
        cfg = self.config
        sorted_rows = [
            {
                "bidder": i,
                "caller_position": cfg.caller_position(i),
                "probability": cfg.probabilities[i - 1],
                "expected_bid": self.expected_bids[i - 1],
                "expected_utility": self.expected_utilities[i - 1],
                "atom_at_zero": self.atom_at_zero_last if i == cfg.n else 0.0,
            }
            for i in range(1, cfg.n + 1)
        ]
        caller_rows = sorted(sorted_rows, key=lambda r: r["caller_position"])
        caller_rows = [dict(r) for r in caller_rows]
        for pos in cfg.dropped:
            caller_rows.append(
                {
                    "bidder": None,
                    "caller_position": pos,
                    "probability": 0.0,
                    "expected_bid": None,
                    "expected_utility": 0.0,
                    "atom_at_zero": 0.0,
                }
            )
        caller_rows.sort(key=lambda r: r["caller_position"])
        return {
            "n": cfg.n,
            "lambda": self.lam,
            "breakpoints": list(equilibrium_profile(cfg).breakpoints),
            "sum_profit": self.sum_profit,
            "max_profit": self.max_profit,
            "bidders_sorted": sorted_rows,
            "bidders_caller_order": caller_rows,
            "dropped_caller_positions": list(cfg.dropped),
        }


def revenue_report(config: AuctionConfig) -> RevenueReport:
    """Assemble every closed-form quantity for the config."""
    prof = equilibrium_profile(config)
    p = config.probabilities
    return RevenueReport(
        config=config,
        lam=prof.lam,
        expected_bids=expected_bids(config),
        expected_utilities=tuple(p_i * prof.lam for p_i in p),
        sum_profit=sum_profit(config),
        max_profit=max_profit(config),
        atom_at_zero_last=prof.atom_n,
    )


# ---------------------------------------------------------------------------
# Quadrature routes (independent checks of the closed forms above)
# ---------------------------------------------------------------------------


def _nonempty_pieces(config: AuctionConfig, k_max: int) -> list[tuple[int, float, float]]:
    prof = equilibrium_profile(config)
    s = prof.breakpoints
    return [(k, s[k], s[k - 1]) for k in range(1, k_max + 1) if s[k] < s[k - 1]]


def expected_bid_quadrature(config: AuctionConfig, i: int) -> float:
    """E[bid_i] by adaptive quadrature of x * f_i(x) piece by piece (the atom
    at 0, if any, contributes nothing)."""
    prof = equilibrium_profile(config)
    k_max = config.n - 1 if i == config.n else i
    total = 0.0
    for _, lo, hi in _nonempty_pieces(config, k_max):
        total += quad(
            lambda t: t * float(_pdf_array(config, prof, i, np.asarray([t]))[0]),
            lo,
            hi,
            **_QUAD_KW,
        )[0]
    return total


def distribution_mass_quadrature(config: AuctionConfig, i: int) -> float:
    """Total probability mass of bidder i: atom plus quadrature of the density."""
    prof = equilibrium_profile(config)
    k_max = config.n - 1 if i == config.n else i
    total = prof.atom_n if i == config.n else 0.0
    for _, lo, hi in _nonempty_pieces(config, k_max):
        total += quad(
            lambda t: float(_pdf_array(config, prof, i, np.asarray([t]))[0]),
            lo,
            hi,
            **_QUAD_KW,
        )[0]
    return total


def max_profit_quadrature(config: AuctionConfig) -> float:
    """E of the winning bid by piecewise Stieltjes integration of x dG.

    Within each smooth piece, integrate by parts so only G itself is ever
    evaluated: int_a^b x dG = b G(b) - a G(a) - int_a^b G dx.  The atom of G
    at 0 contributes 0.
    """
    total = 0.0
    for _, lo, hi in _nonempty_pieces(config, config.n - 1):
        g_lo = float(winning_bid_cdf(config, lo))
        g_hi = float(winning_bid_cdf(config, hi))
        inner = quad(lambda t: float(winning_bid_cdf(config, t)), lo, hi, **_QUAD_KW)[0]
        total += hi * g_hi - lo * g_lo - inner
    return total
