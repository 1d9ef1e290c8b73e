"""Exact marginals, entropies and mutual information of reduced distributions.

Marginalization expands every orbit over its rotations: summing a window
extraction over all N cyclic shifts visits each distinct rotation N/N_orbit
times, so accumulating orbit_mass / N per shift reproduces the per-state
weights exactly.  Cost is O(N * M) ~ O(2^N) state visits per region.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolution import (ReducedDistribution, SuccessorMap, build_successor,
                        detect_period, initial_distribution, jump_map,
                        push_forward)
from .necklaces import NecklaceIndex, _rotl_array, enumerate_representatives
from .rules import U64, rule_table

NEG_PROB_TOL = -1e-12   # below this a probability is a data error
MI_FLOOR = -1e-10       # tiny negative MI is clamped to zero

Region = tuple[int, int]


@dataclass(frozen=True)
class RegionMarginal:
    """Distribution over the bit configurations of a (possibly split) region."""

    region: tuple[Region, ...]
    probs: np.ndarray

    @property
    def width(self) -> int:
        return sum(b - a + 1 for a, b in self.region)


@dataclass(frozen=True)
class InfoReport:
    """Late-time entropy and mutual information of one (rule, N, q) run."""

    rule_number: int
    n: int
    q: float
    s_total: float      # bits
    i_half: float       # bits
    i_quarter: float    # bits; NaN when n % 4 != 0
    period: int | None  # attractor period if found within t_av, else None
    t_av_used: int


def _normalize_region(region) -> tuple[Region, ...]:
    if isinstance(region, tuple) and len(region) == 2 and isinstance(region[0], int):
        region = (region,)
    out = []
    for a, b in region:
        if a > b:
            raise ValueError(f"region interval ({a}, {b}) is empty")
        out.append((int(a), int(b)))
    return tuple(out)


def _check_region(region: tuple[Region, ...], n: int) -> None:
    covered = set()
    for a, b in region:
        if not (1 <= a and b <= n):
            raise ValueError(f"region interval ({a}, {b}) outside sites 1..{n}")
        sites = set(range(a, b + 1))
        if covered & sites:
            raise ValueError("region intervals overlap")
        covered |= sites


def marginal(d: ReducedDistribution, region) -> RegionMarginal:
    """Exact marginal of the full 2^N distribution over a set of site intervals.

    Bits are concatenated in interval order, first interval most significant.
    """
    region = _normalize_region(region)
    n = d.n
    _check_region(region, n)
    width = sum(b - a + 1 for a, b in region)
    probs = np.zeros(1 << width, dtype=np.float64)
    weights = d.orbit_mass / n
    rot = d.index.representatives
    for k in range(n):
        if k:
            rot = _rotl_array(rot, 1, n)
        val = np.zeros(len(rot), dtype=U64)
        for a, b in region:
            w = b - a + 1
            val = (val << U64(w)) | ((rot >> U64(n - b)) & U64((1 << w) - 1))
        probs += np.bincount(val.astype(np.int64), weights=weights, minlength=1 << width)
    return RegionMarginal(region, probs)


def entropy(probs: np.ndarray) -> float:
    """Base-2 Shannon entropy with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=np.float64)
    if np.any(p < NEG_PROB_TOL):
        raise ValueError(f"negative probability {p.min()} in distribution")
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def total_entropy(d: ReducedDistribution) -> float:
    """Entropy of the full 2^N distribution, evaluated on the reduced vector.

    S = -sum over orbits of mass * log2(mass / orbit_size), since all states
    of an orbit carry equal probability.
    """
    mass = d.orbit_mass
    keep = mass > 0
    m = mass[keep]
    s = d.index.orbit_size[keep]
    return float(-np.sum(m * np.log2(m / s)))


def _covers_ring(region: tuple[Region, ...], n: int) -> bool:
    return sum(b - a + 1 for a, b in region) == n


def mutual_information(d: ReducedDistribution, region_a, region_b) -> float:
    """I = S_A + S_B - S_AB in bits, from exact marginals.

    When A and B partition the whole ring, S_AB is the total entropy and is
    taken from the reduced vector directly.
    """
    region_a = _normalize_region(region_a)
    region_b = _normalize_region(region_b)
    combined = _normalize_region(tuple(sorted(region_a + region_b)))
    _check_region(combined, d.n)  # also rejects overlapping A, B
    s_a = entropy(marginal(d, region_a).probs)
    s_b = entropy(marginal(d, region_b).probs)
    if _covers_ring(combined, d.n):
        s_ab = total_entropy(d)
    else:
        s_ab = entropy(marginal(d, combined).probs)
    return s_a + s_b - s_ab


def half_mi(d: ReducedDistribution) -> float:
    """Mutual information between the two halves of the ring."""
    n = d.n
    if n % 2:
        raise ValueError(f"half cut needs even N, got {n}")
    return mutual_information(d, (1, n // 2), (n // 2 + 1, n))


def quarter_mi(d: ReducedDistribution) -> float:
    """Mutual information between two diametrically opposite quarters."""
    n = d.n
    if n % 4:
        raise ValueError(f"quarter cut needs N divisible by 4, got {n}")
    quarter = n // 4
    return mutual_information(d, (1, quarter), (n // 2 + 1, n // 2 + quarter))


def _clamp_mi(value: float, what: str) -> float:
    if value < MI_FLOOR:
        raise ValueError(f"{what} = {value} is negative beyond the numerical floor")
    return max(value, 0.0)


def asymptotic_report(rule_number: int, n: int, q: float, t_av: int = 10,
                      index: NecklaceIndex | None = None) -> InfoReport:
    """Late-time information measures of a rule: jump to t = 2^N, detect the
    attractor period, and average S, I_half and I_quarter over
    min(t_av, period) consecutive steps."""
    if n % 2:
        raise ValueError(f"bipartite cut needs even N, got {n}")
    if t_av < 1:
        raise ValueError("t_av must be at least 1")
    table = rule_table(rule_number)
    if index is None:
        index = enumerate_representatives(n)
    elif index.n != n:
        raise ValueError("supplied index was built for a different N")

    one = build_successor(table, index)
    d = push_forward(initial_distribution(index, q), jump_map(table, index))
    period = detect_period(d, one, t_max=t_av)
    n_av = min(t_av, period) if period is not None else t_av

    s_vals, ih_vals, iq_vals = [], [], []
    cur = d
    for t in range(n_av):
        s_vals.append(total_entropy(cur))
        ih_vals.append(half_mi(cur))
        iq_vals.append(quarter_mi(cur) if n % 4 == 0 else math.nan)
        if t + 1 < n_av:
            cur = push_forward(cur, one)

    i_half = _clamp_mi(float(np.mean(ih_vals)), "half-cut MI")
    i_quarter = float(np.mean(iq_vals))
    if not math.isnan(i_quarter):
        i_quarter = _clamp_mi(i_quarter, "quarter MI")
    return InfoReport(rule_number, n, q, float(np.mean(s_vals)), i_half,
                      i_quarter, period, n_av)
