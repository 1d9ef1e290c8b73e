"""Closed-form mutual information of the two-species annihilating particle model.

Sites are initially black with probability q_black (a +1 step of the
imbalance walk) or white otherwise.  At long times the joint law of the two
surviving particles nearest to an interface is

    p_ij = (p - q)/(2 q) * f_{i+j+1}   for i + j odd, else 0,

with p = q_black, q = 1 - q_black and f the first-return probabilities of
the biased walk.  Entropies of this law are evaluated by summing exactly up
to a cutoff and converting the remainder to integrals of Gaussian-tail
kernels, which keeps the cost and accuracy controlled by the cutoff alone,
no matter how large the correlation length xi = -1/ln(4 p q) grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import erfc, erfcx

QUAD_TOL = 1e-10

# Exact summation runs to twice the requested cutoff before switching to the
# integral tails; at the formula's O(1/n) Stirling accuracy this keeps the
# oracle mismatch below 1e-4 down to q_black = 0.55 with m = 500.
_JUNCTION_FACTOR = 2


@dataclass(frozen=True)
class RWModelParams:
    """Bias and cutoff of the particle model, q_black strictly in (0.5, 1)."""

    q_black: float
    m: int = 500

    def __post_init__(self):
        if not 0.5 < self.q_black < 1.0:
            raise ValueError(f"q_black must be in (0.5, 1), got {self.q_black}")
        if self.m < 10:
            raise ValueError(f"cutoff m must be at least 10, got {self.m}")

    @property
    def p_up(self) -> float:
        """Probability of a +1 step of the imbalance walk (a black site)."""
        return self.q_black

    @property
    def q_down(self) -> float:
        return 1.0 - self.q_black

    @property
    def xi(self) -> float:
        """Correlation length -1/ln(4 p q); diverges as |q_black - 0.5|^-2."""
        return -1.0 / math.log(4.0 * self.p_up * self.q_down)

    @property
    def prefactor(self) -> float:
        """(p - q) / (2 q) of the joint law."""
        return (self.p_up - self.q_down) / (2.0 * self.q_down)


@dataclass(frozen=True)
class RWAnalyticResult:
    """Assembled MI with its intermediates."""

    q_black: float
    m: int
    i_nats: float
    i_bits: float
    s_single: float          # marginal entropy S_i = S_j, nats
    s_joint: float           # joint entropy S_ij, nats
    p_i_table: np.ndarray    # marginal p_i for i below a small horizon
    critical: bool = False   # q_black was exactly 0.5
    mirrored: bool = False   # computed at 1 - q_black


# --- first-return probabilities ---

def first_return(k: int, params: RWModelParams) -> float:
    """f_{2k}: probability that the walk first revisits its origin at step 2k.

    f_{2k} = (p q)^k C(2k, k) / (2k - 1), via a multiplicative recurrence so
    no factorial ever overflows.  Returns at odd step counts are impossible.
    """
    if k < 1:
        raise ValueError(f"first return needs k >= 1, got {k}")
    pq = params.p_up * params.q_down
    f = 2.0 * pq
    for j in range(1, k):
        f *= 4.0 * pq * (2 * j - 1) / (2 * j + 2)
    return f


def first_return_sequence(r_max: int, params: RWModelParams) -> np.ndarray:
    """Array f[0 .. r_max] indexed by step count; odd entries are zero."""
    f = np.zeros(r_max + 1)
    n_pairs = r_max // 2
    if n_pairs >= 1:
        pq = params.p_up * params.q_down
        j = np.arange(1, n_pairs)
        ratios = 4.0 * pq * (2 * j - 1) / (2 * j + 2)
        vals = np.concatenate([[2.0 * pq], 2.0 * pq * np.cumprod(ratios)])
        f[2 : 2 * n_pairs + 1 : 2] = vals
    return f


def stirling_tail(k: int, params: RWModelParams) -> float:
    """Large-k form of f_{2k}: e^(-k/xi) / (2 sqrt(pi) k^(3/2)).

    Relative error is about 3/(8k); it drops below 1% for k >= 38 and below
    0.5% around k = 75 (checked against the exact recurrence in the tests).
    """
    if k < 1:
        raise ValueError(f"stirling tail needs k >= 1, got {k}")
    return math.exp(-k / params.xi) / (2.0 * math.sqrt(math.pi) * k**1.5)


def joint_pij(i: int, j: int, params: RWModelParams) -> float:
    """Joint law of the nearest surviving particles at distances i >= 0 and
    j >= 1 from the interface; zero whenever i + j is even."""
    if i < 0 or j < 1:
        raise ValueError(f"need i >= 0 and j >= 1, got ({i}, {j})")
    if (i + j) % 2 == 0:
        return 0.0
    return params.prefactor * first_return((i + j + 1) // 2, params)


# --- Gaussian-tail kernels of the integral parts ---

def g(x):
    """g(x) = e^-x / sqrt(pi x) - erfc(sqrt x), the first-return tail kernel.

    Written with erfcx so the subtraction keeps relative accuracy at large x,
    where the two naive terms agree to all but O(1/x) of their digits.
    Positive everywhere, integrably divergent at 0, integral over (0, inf)
    equal to 1/2.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("g is defined for x >= 0")
    with np.errstate(divide="ignore"):
        out = np.exp(-x) * (1.0 / np.sqrt(np.pi * x) - erfcx(np.sqrt(x)))
    return out if out.ndim else float(out)


def s(x):
    """s(x) = (2x + 1) erfc(sqrt x) - 2 sqrt(x/pi) e^-x = 2 * integral of g over (x, inf)."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("s is defined for x >= 0")
    out = (2 * x + 1) * erfc(np.sqrt(x)) - 2 * np.sqrt(x / np.pi) * np.exp(-x)
    return out if out.ndim else float(out)


def Q(x):
    """Q(x) = (1 - 4x) erfc(sqrt x) + 4 sqrt(x/pi) e^-x; Q(0) = 1."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("Q is defined for x >= 0")
    out = (1 - 4 * x) * erfc(np.sqrt(x)) + 4 * np.sqrt(x / np.pi) * np.exp(-x)
    return out if out.ndim else float(out)


def h(x: float) -> float:
    """Entropy kernel of the joint-law tail.

    h(x) = -ln(2 sqrt(pi e)) erfc(sqrt x) - sqrt(x/pi) e^-x
           - 3/(2 sqrt pi) * integral over (x, inf) of y^(-1/2) e^-y ln y.

    The integral is evaluated under y = u^2, which removes the endpoint
    singularity; h(0) = (3 gamma + ln(16/pi) - 1) / 2 ~ 1.179753.
    """
    if x < 0:
        raise ValueError("h is defined for x >= 0")
    tail, _ = integrate.quad(lambda u: 4.0 * math.exp(-u * u) * math.log(u),
                             math.sqrt(x), np.inf, epsabs=QUAD_TOL, limit=200)
    return (-math.log(2.0 * math.sqrt(math.pi * math.e)) * erfc(math.sqrt(x))
            - math.sqrt(x / math.pi) * math.exp(-x)
            - 1.5 / math.sqrt(math.pi) * tail)


def _g_ln_g_tail(x: float) -> float:
    """Integral over (x, inf) of g ln g; integrand set to 0 once g underflows."""
    def integrand(y):
        gy = g(y) if y > 0 else math.inf
        return gy * math.log(gy) if 0 < gy < math.inf else 0.0
    val, _ = integrate.quad(integrand, x, np.inf, epsabs=QUAD_TOL, limit=400)
    return val


def P(x: float) -> float:
    """P(x) = h(x) - 4 * integral over (x, inf) of g ln g; P(0) ~ 1.013141."""
    if x < 0:
        raise ValueError("P is defined for x >= 0")
    return h(x) - 4.0 * _g_ln_g_tail(x)


def c1_constant() -> float:
    """c1 = 2 * integral over (0, inf) of g ln g ~ 0.083306, by quadrature."""
    return 2.0 * _g_ln_g_tail(0.0)


# --- marginal and entropies ---

def _suffix_sums(f: np.ndarray, r_hi: int) -> np.ndarray:
    """suffix[r] = sum of f over steps r .. r_hi."""
    suffix = np.zeros(r_hi + 2)
    suffix[: r_hi + 1] = np.cumsum(f[r_hi::-1])[::-1]
    return suffix


def _ptilde(params: RWModelParams, r_hi: int, f: np.ndarray) -> np.ndarray:
    """Reduced marginal ptilde_i for i = 0 .. r_hi - 2: the exact partial sum
    of f from i+2 to r_hi plus the integral tail beyond."""
    xi = params.xi
    tail_const = g((r_hi + 1.0) / (2.0 * xi)) / math.sqrt(xi)
    suffix = _suffix_sums(f, r_hi)
    return tail_const + suffix[2 : r_hi + 1]


def marginal_pi(i: int, params: RWModelParams) -> float:
    """Marginal p_i of the nearest-left particle: exact partial sum plus
    integral tail, accurate for m >> 1 independent of xi."""
    if i < 0:
        raise ValueError(f"need i >= 0, got {i}")
    xi = params.xi
    r_hi = _JUNCTION_FACTOR * params.m
    if i < r_hi - 1:
        f = first_return_sequence(r_hi, params)
        tail_const = g((r_hi + 1.0) / (2.0 * xi)) / math.sqrt(xi)
        return params.prefactor * (tail_const + float(np.sum(f[i + 2 : r_hi + 1])))
    return params.prefactor * g(i / (2.0 * xi)) / math.sqrt(xi)


def _plogp_sum(values: np.ndarray) -> float:
    v = values[values > 0]
    return float(np.sum(v * np.log(v)))


def mi_analytic(q_black: float, m: int = 500, p_i_horizon: int = 32) -> RWAnalyticResult:
    """Split-sum evaluation of the asymptotic interface MI, in nats and bits.

    For q_black < 0.5 the model is mirrored (q -> 1 - q); exactly at 0.5 the
    critical limit P(0) is returned and flagged.  Entropies follow the exact
    sums up to the junction and the P/Q/s/h kernels beyond, with the tail
    integrals anchored at the midpoints of their first omitted terms.
    """
    if not 0.0 < q_black < 1.0:
        raise ValueError(f"q_black must be in (0, 1), got {q_black}")
    mirrored = q_black < 0.5
    if mirrored:
        q_black = 1.0 - q_black
    if q_black == 0.5:
        i_nats = P(0.0)
        return RWAnalyticResult(0.5, m, i_nats, i_nats / math.log(2.0),
                                math.nan, math.nan, np.zeros(0), critical=True,
                                mirrored=mirrored)

    params = RWModelParams(q_black, m)
    pref = params.prefactor
    xi = params.xi
    r_hi = _JUNCTION_FACTOR * m
    f = first_return_sequence(r_hi + 2, params)
    ptil = _ptilde(params, r_hi, f)

    # S_i = -ln(pref) - pref [ sum_{i<=r_hi-2} ptilde ln ptilde
    #        + 2 sqrt(xi) int_{x_i} g ln g - sqrt(xi) ln(sqrt xi) s(x_i) ]
    x_i = (r_hi - 1.5) / (2.0 * xi)
    sum_i = _plogp_sum(ptil[: r_hi - 1])
    s_single = -math.log(pref) - pref * (
        sum_i + 2.0 * math.sqrt(xi) * _g_ln_g_tail(x_i)
        - math.sqrt(xi) * math.log(math.sqrt(xi)) * s(x_i))

    # S_ij = -ln(pref) - pref [ sum_{r<r_hi} (r-1) f_r ln f_r
    #        + sqrt(xi) h(x_ij) - 3 sqrt(xi) ln(sqrt xi) erfc(sqrt x_ij) ]
    x_ij = (r_hi - 1.0) / (2.0 * xi)
    r = np.arange(2, r_hi)
    fr = f[2:r_hi]
    pos = fr > 0
    sum_ij = float(np.sum((r[pos] - 1) * fr[pos] * np.log(fr[pos])))
    s_joint = -math.log(pref) - pref * (
        sum_ij + math.sqrt(xi) * h(x_ij)
        - 3.0 * math.sqrt(xi) * math.log(math.sqrt(xi)) * erfc(math.sqrt(x_ij)))

    i_nats = 2.0 * s_single - s_joint
    horizon = min(p_i_horizon, r_hi - 2)
    p_i_table = pref * ptil[:horizon]
    return RWAnalyticResult(q_black, m, i_nats, i_nats / math.log(2.0),
                            s_single, s_joint, p_i_table, mirrored=mirrored)


def mi_bruteforce_oracle(q_black: float, cutoff: int = 10**4) -> float:
    """Independent check: build the truncated joint table from the exact
    first-return values and sum the entropies directly.  Nats."""
    params = RWModelParams(q_black, m=10)
    pref = params.prefactor
    f = first_return_sequence(cutoff, params)
    r = np.arange(2, cutoff + 1)
    pij = pref * f[2:]

    mass = float(np.sum((r - 1) * pij))
    if abs(mass - 1.0) > 1e-8:
        raise ValueError(
            f"truncated joint law holds {mass} of the mass at cutoff {cutoff}; "
            "increase the cutoff or the bias")

    pos = pij > 0
    s_joint = -float(np.sum((r[pos] - 1) * pij[pos] * np.log(pij[pos])))
    suffix = _suffix_sums(f, cutoff)
    p_i = pref * suffix[2:]          # p_i for i = 0 .. cutoff - 1
    pos = p_i > 0
    s_single = -float(np.sum(p_i[pos] * np.log(p_i[pos])))
    return 2.0 * s_single - s_joint
