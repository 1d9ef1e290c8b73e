"""Elementary cellular automaton rules and ring-state updates.

A ring state of N sites is packed into an integer: site 1 occupies the most
significant bit and site N the least, so reading the bit string s_1 .. s_N as
a binary number gives the packed value.  All dynamics are synchronous with
periodic boundaries (site N+1 = site 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

U64 = np.uint64


@dataclass(frozen=True)
class RuleTable:
    """Lookup table of an elementary CA rule.

    ``outputs[k]`` is the updated cell value for the neighborhood whose three
    bits (left, center, right) read as a binary number equal k, left neighbor
    being the most significant bit.  ``outputs[k]`` equals bit k of
    ``rule_number``.
    """

    rule_number: int
    outputs: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.rule_number <= 255:
            raise ValueError(f"rule number must be in [0, 255], got {self.rule_number}")
        if len(self.outputs) != 8:
            raise ValueError("rule table needs exactly 8 outputs")


@dataclass(frozen=True)
class RingState:
    """N binary sites on a ring, packed into a machine-word-sized integer."""

    value: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ring needs at least one site")
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"packed value {self.value} has bits outside {self.n} sites")

    def bits(self) -> list[int]:
        """Site values s_1 .. s_N."""
        return [(self.value >> (self.n - i)) & 1 for i in range(1, self.n + 1)]

    def __str__(self):
        return format(self.value, f"0{self.n}b")


def rule_table(rule_number: int) -> RuleTable:
    """Build the 8-entry lookup table of an elementary CA rule."""
    if not isinstance(rule_number, (int, np.integer)) or not 0 <= rule_number <= 255:
        raise ValueError(f"rule number must be an integer in [0, 255], got {rule_number!r}")
    outputs = tuple((int(rule_number) >> k) & 1 for k in range(8))
    return RuleTable(int(rule_number), outputs)


def rotate_left(value: int, k: int, n: int) -> int:
    """Cyclic shift of a packed ring state: site i takes the value of site i+k."""
    k %= n
    if k == 0:
        return value
    mask = (1 << n) - 1
    return ((value << k) & mask) | (value >> (n - k))


def apply_rule(table: RuleTable, s: RingState) -> RingState:
    """One synchronous update of every site, with periodic wraparound.

    Bit-parallel: the left/right neighbor words are ring rotations of the
    packed state, and the rule is evaluated as an 8-term disjunction over
    neighborhood patterns.
    """
    n = s.n
    v = s.value
    mask = (1 << n) - 1
    left = rotate_left(v, -1, n) if n > 1 else v    # site i holds s_{i-1}
    right = rotate_left(v, 1, n) if n > 1 else v    # site i holds s_{i+1}
    out = 0
    for k in range(8):
        if table.outputs[k]:
            a = left if k & 4 else ~left
            b = v if k & 2 else ~v
            c = right if k & 1 else ~right
            out |= a & b & c & mask
    return RingState(out, n)


def apply_rule_array(table: RuleTable, values: np.ndarray, n: int) -> np.ndarray:
    """Vectorized :func:`apply_rule` on a uint64 array of packed states."""
    if not 1 <= n <= 63:
        raise ValueError("packed-array updates support 1 <= n <= 63 sites")
    v = values.astype(U64, copy=False)
    mask = U64((1 << n) - 1)
    if n > 1:
        left = (v >> U64(1)) | ((v & U64(1)) << U64(n - 1))
        right = ((v << U64(1)) & mask) | (v >> U64(n - 1))
    else:
        left = right = v
    out = np.zeros_like(v)
    not_l, not_c, not_r = ~left & mask, ~v & mask, ~right & mask
    for k in range(8):
        if table.outputs[k]:
            a = left if k & 4 else not_l
            b = v if k & 2 else not_c
            c = right if k & 1 else not_r
            out |= a & b & c
    return out


# --- big rings packed into word arrays (site j -> bit j%64 of word j//64) ---

def pack_sites(bits: np.ndarray) -> np.ndarray:
    """Pack an array of 0/1 site values (length divisible by 64) into uint64 words."""
    if len(bits) % 64:
        raise ValueError("site count must be divisible by 64 for word packing")
    b = np.asarray(bits, dtype=np.uint8).reshape(-1, 8)
    return np.packbits(b, axis=1, bitorder="little").reshape(-1, 8).view(U64).ravel()


def unpack_sites(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack_sites`."""
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:n]


def _shift_up(words: np.ndarray) -> np.ndarray:
    # site j of the result holds site j-1 of the input (cyclic)
    carry = np.roll(words, 1) >> U64(63)
    return (words << U64(1)) | carry


def _shift_down(words: np.ndarray) -> np.ndarray:
    # site j of the result holds site j+1 of the input (cyclic)
    carry = np.roll(words, -1) << U64(63)
    return (words >> U64(1)) | carry


def apply_rule_words(table: RuleTable, words: np.ndarray) -> np.ndarray:
    """One synchronous update of a big ring packed into uint64 words.

    The ring size is 64 * len(words).  Used for rings far beyond machine-word
    width, e.g. the rule-184 particle runs.
    """
    left = _shift_up(words)      # holds s_{j-1} at site j
    right = _shift_down(words)   # holds s_{j+1} at site j
    out = np.zeros_like(words)
    not_l, not_c, not_r = ~left, ~words, ~right
    for k in range(8):
        if table.outputs[k]:
            a = left if k & 4 else not_l
            b = words if k & 2 else not_c
            c = right if k & 1 else not_r
            out |= a & b & c
    return out


# --- rule equivalence algebra ---

def _reverse3(k: int) -> int:
    # abc -> cba on a 3-bit neighborhood index
    return ((k & 1) << 2) | (k & 2) | (k >> 2)


def mirror(rule_number: int) -> int:
    """Left-right mirrored rule: outputs[abc] taken from outputs[cba]."""
    table = rule_table(rule_number)
    out = 0
    for k in range(8):
        out |= table.outputs[_reverse3(k)] << k
    return out


def negate(rule_number: int) -> int:
    """0/1-relabeled rule: outputs[k] -> NOT outputs[7 - k]."""
    table = rule_table(rule_number)
    out = 0
    for k in range(8):
        out |= (1 - table.outputs[7 - k]) << k
    return out


def rule_orbit(rule_number: int) -> tuple[int, ...]:
    """Orbit of a rule under identity, mirror, negate and their composition."""
    r = int(rule_number)
    return tuple(sorted({r, mirror(r), negate(r), mirror(negate(r))}))


@lru_cache(maxsize=1)
def nonequivalent_rules() -> tuple[int, ...]:
    """The 88 rules not equivalent under mirroring and/or negation.

    One representative per orbit, the minimal rule number; sorted ascending.
    """
    reps = sorted({rule_orbit(r)[0] for r in range(256)})
    return tuple(reps)


def negation_twin(rule_number: int) -> int:
    """Partner rule with identical ensemble statistics at q = 1/2.

    Appending a global 0/1 negation to every update leaves any
    negation-symmetric ensemble invariant, pairing the dynamics of rule r
    with that of 255 - r.  Returned is that rule's orbit representative, so
    e.g. 142 <-> 43 and 150 <-> 105.
    """
    return rule_orbit(255 - int(rule_number))[0]
