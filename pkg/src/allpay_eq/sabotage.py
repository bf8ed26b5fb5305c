"""Optimal bidding after secretly lowering a rival's participation probability.

Bidder i sabotages bidder r: everyone else best-responds to the announced
probabilities p_1..p_n, but r's true probability is p'_r < p_r, and only i
knows.  Bidder i's expected profit from bid x against the announced
equilibrium is

    pi(x) = (p'_r F_r(x) + 1 - p'_r) * prod_{j != i, r} (p_j F_j(x) + 1 - p_j) - x.

On pieces shared by both supports (k <= min(i, r)) this reduces to

    pi(x) = theta * (lam + x) * ((C_k / (lam + x))**(1/(n-k)) - 1) + lam,

with theta = (p_r - p'_r)/p_r and C_k = prod_{j<k}(1 - p_j), which is concave
per piece.  The optimum over the whole bid range therefore lives at one of at
most min(i, r) candidates: an interior stationary point when 1/(n-k) lies in
[p_{k-1}, p_k], otherwise the piece endpoint nearest the stationary point.
Candidate locations do not depend on p'_r (only the profit scale theta does),
and every candidate profit is lam plus a nonnegative term, so sabotage never
hurts the saboteur.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import AuctionConfig, ValidationError
from .equilibrium import _cdf_array, equilibrium_profile

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class SabotageScenario:
    """Saboteur i, target r != i (sorted 1-based indices), announced config,
    and the target's true probability after sabotage."""

    config: AuctionConfig
    saboteur: int
    target: int
    true_target_probability: float

    def __post_init__(self) -> None:
        self.config.require_competition()
        n = self.config.n
        for name, idx in (("saboteur", self.saboteur), ("target", self.target)):
            if not 1 <= idx <= n:
                raise ValidationError(f"{name} index {idx} outside 1..{n}")
        if self.saboteur == self.target:
            raise ValidationError("saboteur and target must differ")
        p_r = self.config.probabilities[self.target - 1]
        if not 0.0 <= self.true_target_probability < p_r:
            raise ValidationError(
                f"true target probability must lie in [0, {p_r}), "
                f"got {self.true_target_probability}"
            )

    @property
    def announced_target_probability(self) -> float:
        return self.config.probabilities[self.target - 1]

    @property
    def theta(self) -> float:
        """Relative sabotage depth (p_r - p'_r)/p_r in (0, 1]."""
        p_r = self.announced_target_probability
        return (p_r - self.true_target_probability) / p_r


@dataclass(frozen=True)
class SabotageCandidate:
    piece: int
    bid: float
    profit: float
    branch: str  # "interior", "upper_endpoint" or "lower_endpoint"


@dataclass(frozen=True)
class SabotagePlan:
    scenario: SabotageScenario
    candidates: tuple[SabotageCandidate, ...]
    chosen: SabotageCandidate

    @property
    def bid(self) -> float:
        return self.chosen.bid

    @property
    def expected_profit(self) -> float:
        return self.chosen.profit

    def to_dict(self) -> dict:
        sc = self.scenario
        return {
            "saboteur": sc.saboteur,
            "target": sc.target,
            "announced_probabilities": list(sc.config.probabilities),
            "true_target_probability": sc.true_target_probability,
            "lambda": equilibrium_profile(sc.config).lam,
            "candidates": [
                {"piece": c.piece, "bid": c.bid, "profit": c.profit, "branch": c.branch}
                for c in self.candidates
            ],
            "chosen_piece": self.chosen.piece,
            "bid": self.chosen.bid,
            "expected_profit": self.chosen.profit,
        }


def sabotaged_payoff(scenario: SabotageScenario, x) -> float | np.ndarray:
    """Saboteur's expected profit from bid x, target's factor taken at the true
    probability while everyone still plays the announced equilibrium.  x must
    lie in [0, s_0]."""
    cfg = scenario.config
    prof = equilibrium_profile(cfg)
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any((xs < 0.0) | (xs > prof.breakpoints[0])):
        raise ValidationError(f"bid outside [0, {prof.breakpoints[0]}]")
    prod = np.ones_like(xs, dtype=float)
    for j in range(1, cfg.n + 1):
        if j == scenario.saboteur:
            continue
        p_j = (
            scenario.true_target_probability
            if j == scenario.target
            else cfg.probabilities[j - 1]
        )
        prod *= p_j * _cdf_array(cfg, prof, j, xs) + 1.0 - p_j
    out = prod - xs
    return float(out[0]) if scalar else out


def joint_support_profit(scenario: SabotageScenario, k: int, x) -> float | np.ndarray:
    """Closed form of the sabotaged payoff on a joint-support piece
    k <= min(i, r):  theta (lam+x) ((C_k/(lam+x))**(1/(n-k)) - 1) + lam."""
    cfg = scenario.config
    prof = equilibrium_profile(cfg)
    n = cfg.n
    if not 1 <= k <= min(scenario.saboteur, scenario.target):
        raise ValidationError(f"piece {k} outside the joint support range")
    c_k = prof.prefix_products[k]
    xs = np.asarray(x, dtype=float)
    out = scenario.theta * (prof.lam + xs) * (
        (c_k / (prof.lam + xs)) ** (1.0 / (n - k)) - 1.0
    ) + prof.lam
    return float(out) if np.ndim(x) == 0 else out


def optimal_sabotage_bid(scenario: SabotageScenario) -> SabotagePlan:
    """Enumerate the per-piece optima of the sabotaged payoff and pick the best.

    For each nonempty joint-support piece k = 1..min(i, r), with m = n - k,
    C = prod_{j<k}(1-p_j) and the dummy p_0 = 0:

    * 1/m in [p_{k-1}, p_k]: interior stationary point
        bid    = (1 - 1/m)**m * C - lam
        profit = (1/m) (1 - 1/m)**(m-1) * C * theta + lam
    * 1/m < p_{k-1}: the payoff still rises at the piece top, take s_{k-1}
        profit = p_{k-1} (1 - p_{k-1})**(m-1) * C * theta + lam
    * 1/m > p_k: the payoff already falls at the piece bottom, take s_k
        profit = p_k (1 - p_k)**(m-1) * C * theta + lam

    Boundary ties of 1/m with p_{k-1} or p_k fall to the interior branch; the
    adjacent endpoint branch agrees there algebraically.  Profit ties within
    1e-12 resolve to the cheaper bid.
    """
    cfg = scenario.config
    prof = equilibrium_profile(cfg)
    p = cfg.probabilities
    n = cfg.n
    lam = prof.lam
    s = prof.breakpoints
    theta = scenario.theta
    candidates: list[SabotageCandidate] = []
    for k in range(1, min(scenario.saboteur, scenario.target) + 1):
        if s[k] == s[k - 1]:  # zero-width piece, nothing to bid on
            continue
        m = n - k
        c_k = prof.prefix_products[k]
        p_lo = p[k - 2] if k >= 2 else 0.0
        p_hi = p[k - 1]
        inv = 1.0 / m
        if p_lo <= inv <= p_hi:
            bid = (1.0 - inv) ** m * c_k - lam
            profit = inv * (1.0 - inv) ** (m - 1) * c_k * theta + lam
            branch = "interior"
        elif inv < p_lo:
            bid = s[k - 1]
            profit = p_lo * (1.0 - p_lo) ** (m - 1) * c_k * theta + lam
            branch = "upper_endpoint"
        else:
            bid = s[k]
            profit = p_hi * (1.0 - p_hi) ** (m - 1) * c_k * theta + lam
            branch = "lower_endpoint"
        candidates.append(SabotageCandidate(piece=k, bid=bid, profit=profit, branch=branch))
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.profit > best.profit + _TIE_TOL:
            best = cand
        elif abs(cand.profit - best.profit) <= _TIE_TOL and cand.bid < best.bid:
            best = cand
    return SabotagePlan(scenario=scenario, candidates=tuple(candidates), chosen=best)
