"""Deterministic evolution on the reduced (necklace) state space.

The transition of a rule restricted to orbit representatives is a plain
index map of length M.  Repeated self-composition squares the advance count,
so t = 2^N is reached in N composition passes, after which every state sits
on its limit cycle.  Distributions are stored as orbit totals: orbit_mass[i]
is the summed probability of all rotations of representative i, which makes
the push-forward a unit-weight accumulation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .necklaces import NecklaceIndex, canonical_array
from .rules import RuleTable, apply_rule_array

MASS_TOL = 1e-12


@dataclass(frozen=True)
class SuccessorMap:
    """Representative-to-representative map advancing ``steps`` time steps."""

    rule_number: int
    n: int
    steps: int
    next_index: np.ndarray  # int64, len M, values in [0, M)


@dataclass(frozen=True)
class ReducedDistribution:
    """Probability per rotation orbit; orbit_mass[i] sums all states in orbit i."""

    index: NecklaceIndex
    q: float
    orbit_mass: np.ndarray  # float64, len M

    @property
    def n(self) -> int:
        return self.index.n

    def state_probabilities(self) -> np.ndarray:
        """Per-state probability of each representative (mass / orbit size)."""
        return self.orbit_mass / self.index.orbit_size

    def total_mass(self) -> float:
        return float(np.sum(self.orbit_mass))


def initial_distribution(index: NecklaceIndex, q: float) -> ReducedDistribution:
    """Uncorrelated product ensemble: each site is 1 with probability q.

    orbit_mass[i] = orbit_size[i] * q^w (1-q)^(n-w) with w the population
    count of the representative.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"fill probability must be in [0, 1], got {q}")
    w = np.bitwise_count(index.representatives).astype(np.int64)
    mass = index.orbit_size * np.power(q, w) * np.power(1.0 - q, index.n - w)
    return ReducedDistribution(index, q, mass)


def build_successor(table: RuleTable, index: NecklaceIndex) -> SuccessorMap:
    """One-step successor map: apply the rule to each representative and
    canonicalize the image."""
    image = apply_rule_array(table, index.representatives, index.n)
    canon = canonical_array(image, index.n)
    return SuccessorMap(table.rule_number, index.n, 1, index.lookup(canon).astype(np.int64))


def compose(a: SuccessorMap, b: SuccessorMap) -> SuccessorMap:
    """Map advancing a.steps + b.steps: first a, then b."""
    if a.rule_number != b.rule_number or a.n != b.n:
        raise ValueError("can only compose successor maps of the same rule and ring size")
    return SuccessorMap(a.rule_number, a.n, a.steps + b.steps, b.next_index[a.next_index])


def jump_map(table: RuleTable, index: NecklaceIndex) -> SuccessorMap:
    """Map advancing 2^n steps, built by n successive self-compositions.

    No cycle is longer than the state count, so the image of this map lies
    entirely on limit cycles.
    """
    m = build_successor(table, index)
    for _ in range(index.n):
        m = compose(m, m)
    return m


def push_forward(d: ReducedDistribution, m: SuccessorMap) -> ReducedDistribution:
    """Advance a distribution through a successor map, conserving total mass."""
    if m.n != d.n:
        raise ValueError("distribution and successor map have different ring sizes")
    mass = np.bincount(m.next_index, weights=d.orbit_mass, minlength=d.index.m)
    return ReducedDistribution(d.index, d.q, mass)


def detect_period(d_late: ReducedDistribution, one_step: SuccessorMap,
                  t_max: int) -> int | None:
    """Smallest T <= t_max with p(t+T) = p(t) on the attractor, else None.

    Comparison is in the max norm with tolerance 1e-12; exact equality is
    unreliable once float accumulation order differs between pushes.
    """
    cur = d_late
    for t in range(1, t_max + 1):
        cur = push_forward(cur, one_step)
        if np.max(np.abs(cur.orbit_mass - d_late.orbit_mass)) <= MASS_TOL:
            return t
    return None
