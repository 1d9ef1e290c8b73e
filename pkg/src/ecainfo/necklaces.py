"""Rotation-orbit (necklace) reduction of the ring-state space.

Every ring state is equivalent to its N rotations; the representative of an
orbit is the rotation with the smallest packed value.  The reduced space has
M = (1/N) sum_{d|N} phi(d) 2^(N/d) representatives, roughly 2^N / N.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from math import gcd

import numpy as np

from .rules import RingState, U64, rotate_left

_CHUNK_BITS = 22  # states canonicalized per pass while enumerating


class ResourceLimitError(RuntimeError):
    """Raised when an index would not fit the configured memory budget."""

    def __init__(self, n: int, required_bytes: int, budget_bytes: int):
        self.n = n
        self.required_bytes = required_bytes
        self.budget_bytes = budget_bytes
        super().__init__(
            f"necklace index for N={n} needs about {required_bytes:,} bytes, "
            f"budget is {budget_bytes:,} bytes"
        )


def index_bytes_estimate(n: int) -> int:
    """Rough working-set size of the reduced pipeline: 3 M-length float/int arrays."""
    return 3 * 8 * (2**n // max(n, 1))


def burnside_count(n: int) -> int:
    """Number of binary necklaces of length n (Burnside / orbit counting)."""
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            phi = sum(1 for k in range(1, d + 1) if gcd(k, d) == 1)
            total += phi * 2 ** (n // d)
    return total // n


@dataclass(frozen=True)
class NecklaceIndex:
    """Sorted rotation-orbit representatives of all n-bit ring states.

    ``representatives`` are the packed minimal rotations, ascending, and
    ``orbit_size[i]`` is the number of distinct rotations of representative i
    (a divisor of n).  The dense index of a representative is its position in
    the sorted array, so lookups are binary searches instead of hashing.
    """

    n: int
    representatives: np.ndarray  # uint64, sorted ascending
    orbit_size: np.ndarray       # int64

    @property
    def m(self) -> int:
        return len(self.representatives)

    def lookup(self, canonical_values: np.ndarray) -> np.ndarray:
        """Dense indices of already-canonical packed values."""
        return np.searchsorted(self.representatives, canonical_values)


def _rotl_array(values: np.ndarray, k: int, n: int) -> np.ndarray:
    k %= n
    if k == 0:
        return values
    mask = U64((1 << n) - 1)
    return ((values << U64(k)) & mask) | (values >> U64(n - k))


def canonical_array(values: np.ndarray, n: int) -> np.ndarray:
    """Minimal rotation of each packed state in a uint64 array."""
    canon = values.copy()
    rot = values
    for _ in range(1, n):
        rot = _rotl_array(rot, 1, n)
        np.minimum(canon, rot, out=canon)
    return canon


def canonical(s: RingState) -> tuple[RingState, int]:
    """Representative of a ring state and the smallest left-rotation reaching it."""
    best, shift = s.value, 0
    for k in range(1, s.n):
        r = rotate_left(s.value, k, s.n)
        if r < best:
            best, shift = r, k
    return RingState(best, s.n), shift


def enumerate_representatives(n: int, max_bytes: int | None = None) -> NecklaceIndex:
    """Enumerate all necklace representatives of n-bit ring states.

    Scans the 2^n states in chunks, keeping those equal to their own minimal
    rotation.  Memory is bounded by the chunk size plus the M-length output
    arrays.
    """
    if not 1 <= n <= 48:
        raise ValueError(f"n must be in [1, 48], got {n}")
    if max_bytes is not None:
        need = index_bytes_estimate(n)
        if need > max_bytes:
            raise ResourceLimitError(n, need, max_bytes)

    total = 1 << n
    chunk = min(total, 1 << _CHUNK_BITS)
    parts = []
    for start in range(0, total, chunk):
        arr = np.arange(start, min(start + chunk, total), dtype=U64)
        parts.append(arr[canonical_array(arr, n) == arr])
    reps = np.concatenate(parts)

    # orbit size = smallest period d | n with rot_d(x) == x
    size = np.full(len(reps), n, dtype=np.int64)
    for d in range(1, n):
        if n % d == 0:
            hit = (size == n) & (_rotl_array(reps, d, n) == reps)
            size[hit] = d
    return NecklaceIndex(n, reps, size)


# --- binary cache file: header {magic, version, n, m}, reps, orbit sizes ---

_MAGIC = b"NECK"
_VERSION = 1
_HEADER = struct.Struct("<4sHHQ")  # magic, version, n, m


def save_index(index: NecklaceIndex, path) -> None:
    """Write a bit-exact binary cache of the index."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, index.n, index.m))
        fh.write(index.representatives.astype("<u8").tobytes())
        fh.write(index.orbit_size.astype("<u4").tobytes())


def load_index(path) -> NecklaceIndex:
    """Read an index cache written by :func:`save_index`."""
    with open(path, "rb") as fh:
        magic, version, n, m = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != _MAGIC or version != _VERSION:
            raise ValueError(f"{path}: not a necklace index cache")
        reps = np.frombuffer(fh.read(8 * m), dtype="<u8").astype(U64)
        size = np.frombuffer(fh.read(4 * m), dtype="<u4").astype(np.int64)
    if len(reps) != m or len(size) != m:
        raise ValueError(f"{path}: truncated necklace index cache")
    return NecklaceIndex(n, reps, size)
