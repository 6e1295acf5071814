"""Rank, degree, negligibility and contrast of natural numbers.

Binary digits are numbered from 1 at the least significant end, so
m = 6 = 0b110 has set bits {2, 3}, rank 2, degree 3 and negligibility
(2 + 3) + 2 = 7.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .walsh import cpmg_indices, degree, pdd_indices

DEFAULT_CHECK_LIMIT = 2**12


def set_bits(m: int) -> list[int]:
    """1-based positions of the set bits of m, ascending."""
    return [k + 1 for k in range(int(m).bit_length()) if (m >> k) & 1]


def rank(m: int) -> int:
    return bin(m).count("1")


def negligibility(m: int) -> int:
    """p(m) = sum of set-bit positions + rank."""
    if m < 0:
        raise ValueError("negligibility is defined on natural numbers")
    return sum(k + 1 for k in set_bits(m))


def subdegree(m: int) -> int:
    """Position of the second-highest set bit; 0 when rank < 2."""
    bits = set_bits(m)
    return bits[-2] if len(bits) >= 2 else 0


def contrast(j: int) -> int:
    """c(j) = p(j - 1) - p(j), for j >= 1."""
    if j < 1:
        raise ValueError("contrast is defined for j >= 1")
    return negligibility(j - 1) - negligibility(j)


@dataclass(frozen=True)
class IndexProfile:
    m: int
    rank: int
    degree: int
    subdegree: int
    negligibility: int
    contrast: Optional[int]

    @property
    def bound_factor(self) -> float:
        """2**(1 - p(m))."""
        return 2.0 ** (1 - self.negligibility)


def profile(m: int) -> IndexProfile:
    if m < 0:
        raise ValueError("index must be a natural number")
    return IndexProfile(m, rank(m), degree(m), subdegree(m), negligibility(m),
                        contrast(m) if m >= 1 else None)


def coefficient_bound(m: int, T: float, derivative_sup: float,
                      variation: Optional[float] = None) -> float:
    """Upper bound on |f_m| from the rank and negligibility of m.

    ``derivative_sup`` is max|f^(r)| on [0, T] with r = rank(m);
    ``variation`` is the total variation of f^(r-1) (used only when r >= 1).
    The smaller of the available bounds is returned.
    """
    if derivative_sup < 0:
        raise ValueError("derivative_sup must be non-negative")
    r, p = rank(m), negligibility(m)
    bound = 2.0 ** (-p) * T**r * derivative_sup
    if variation is not None and r >= 1:
        if variation < 0:
            raise ValueError("variation must be non-negative")
        bound = min(bound, 2.0 ** (1 - p) * T ** (r - 1) * variation)
    return bound


def is_local_minimum(seq: Callable[[int], int], k: int, strict: bool = False, start: int = 0) -> bool:
    """Whether seq has a local minimum at k; one-sided at the start of the sequence."""
    here = seq(k)
    right = seq(k + 1)
    if strict:
        ok_right = here < right
        ok_left = k == start or seq(k - 1) > here
    else:
        ok_right = here <= right
        ok_left = k == start or seq(k - 1) >= here
    return ok_left and ok_right


def local_minima_negligibility(limit: int) -> list[int]:
    """All j <= limit with p(j-1) >= p(j) <= p(j+1) (one-sided at j = 0)."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    return [j for j in range(limit + 1) if is_local_minimum(negligibility, j)]


def minima_of_minima(limit: int) -> list[int]:
    """Indices k = 4j whose value p(k) is a local minimum of the sequence p(4j)."""
    seq = lambda j: negligibility(4 * j)  # noqa: E731
    return [4 * j for j in range(limit // 4 + 1) if is_local_minimum(seq, j)]


def _threshold_search(p0: int) -> tuple[set[int], int]:
    """Rank-layered search; also returns the number of p() evaluations."""
    found = {0} if p0 >= 0 else set()
    evaluations = 0
    for d in range(1, p0):
        lead = 1 << (d - 1)
        evaluations += 1
        if negligibility(lead) > p0:
            continue
        found.add(lead)
        # each recorded sequence is extended by one bit below its lowest set bit
        frontier = [lead]
        while frontier:
            grown = []
            for b in frontier:
                low = (b & -b).bit_length()
                for pos in range(1, low):
                    cand = b | (1 << (pos - 1))
                    evaluations += 1
                    if negligibility(cand) > p0:
                        break
                    grown.append(cand)
            found.update(grown)
            frontier = grown
    return found, evaluations


def threshold_search(p0: int) -> list[int]:
    """Every m with p(m) <= p0, found without scanning all m <= 2**(p0-1).

    Degrees run up to p0 - 1. At each degree the lone leading bit is
    extended, rank by rank, with one extra bit below the current lowest one,
    trying positions in increasing order and stopping at the first
    candidate over threshold (negligibility only grows with position).
    """
    if p0 < 0:
        raise ValueError("threshold must be >= 0")
    return sorted(_threshold_search(p0)[0])


def maximal_contrast_at_degree(d: int) -> tuple[int, int]:
    """The two degree-d indices with the largest contrast, ascending."""
    if d < 2:
        raise ValueError("maximal contrast needs degree >= 2")
    candidates = range(2 ** (d - 1), 2**d)
    best = sorted(candidates, key=lambda j: (-contrast(j), j))[:2]
    return tuple(sorted(best))


def pdd_paley(limit: int) -> list[int]:
    return [g for g in pdd_indices(max(1, limit.bit_length())) if g <= limit]


def cpmg_paley(limit: int) -> list[int]:
    return [h for h in cpmg_indices(max(1, limit.bit_length())) if h <= limit]


def brute_force_threshold(p0: int) -> list[int]:
    """Exhaustive p(m) <= p0 over m <= 2**(p0-1) + 1."""
    top = 2 ** max(p0 - 1, 0) + 1
    return [m for m in range(top + 1) if negligibility(m) <= p0]


def bound_factor(m: int) -> float:
    return math.ldexp(1.0, 1 - negligibility(m))
