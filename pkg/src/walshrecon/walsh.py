"""Walsh and Rademacher functions on the unit interval.

Bit convention: the least significant bit of a Paley index m selects the
coarsest Rademacher factor R_1 (two half-interval cells), the next bit
selects R_2, and so on. All functions are right-continuous: at a jump the
value of the cell starting there is returned.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np


class Ordering(str, enum.Enum):
    PALEY = "paley"
    SEQUENCY = "sequency"


def gray_code(m: int) -> int:
    """Binary-reflected Gray code of ``m``."""
    if m < 0:
        raise ValueError(f"index must be non-negative, got {m}")
    return m ^ (m >> 1)


def inverse_gray_code(g: int) -> int:
    if g < 0:
        raise ValueError(f"index must be non-negative, got {g}")
    m = 0
    while g:
        m ^= g
        g >>= 1
    return m


@dataclass(frozen=True)
class WalshIndex:
    """One Walsh function, named by an index in a given ordering."""

    m: int
    ordering: Ordering = Ordering.PALEY

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise ValueError(f"Walsh index must be a natural number, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    @property
    def paley(self) -> int:
        if self.ordering is Ordering.PALEY:
            return self.m
        return gray_code(self.m)

    @property
    def sequency(self) -> int:
        if self.ordering is Ordering.SEQUENCY:
            return self.m
        return inverse_gray_code(self.m)

    def to(self, target: Ordering | str) -> "WalshIndex":
        target = Ordering(target)
        m = self.paley if target is Ordering.PALEY else self.sequency
        return WalshIndex(m, target)


IndexLike = Union[int, WalshIndex]


def as_paley(idx: IndexLike, ordering: Ordering | str = Ordering.PALEY) -> int:
    """Paley number of ``idx``; bare ints are read in ``ordering``."""
    if isinstance(idx, WalshIndex):
        return idx.paley
    return WalshIndex(int(idx), Ordering(ordering)).paley


def convert_ordering(idx: WalshIndex, target: Ordering | str) -> WalshIndex:
    return idx.to(target)


def degree(m: int) -> int:
    """min{k : 2**k > m}."""
    return int(m).bit_length()


def _check_unit(t):
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= 1)) or np.any(np.isnan(t)):
        raise ValueError("t must lie in [0, 1)")
    return t


def rademacher_eval(k: int, t):
    """R_k(t) in {+1, -1}; R_0 is identically 1.

    Accepts a scalar or an array of t values in [0, 1).
    """
    if k < 0:
        raise ValueError(f"Rademacher order must be >= 0, got {k}")
    tt = _check_unit(t)
    if k == 0:
        out = np.ones_like(tt)
    else:
        cell = np.floor(tt * 2.0**k).astype(np.int64)
        out = 1.0 - 2.0 * (cell & 1)
    return float(out) if out.ndim == 0 else out


def walsh_eval(idx: IndexLike, t, ordering: Ordering | str = Ordering.PALEY):
    """Value of a Walsh function at t in [0, 1).

    The Paley form is the product of R_k over the set bits k of the index;
    sequency indices are Gray-coded first.
    """
    m = as_paley(idx, ordering)
    tt = _check_unit(t)
    d = degree(m)
    cell = np.floor(tt * 2.0**d).astype(np.int64) if d else np.zeros(tt.shape, np.int64)
    out = _sign_on_cells(m, d, cell)
    return float(out) if out.ndim == 0 else out


def _sign_on_cells(m: int, level: int, cell):
    """Walsh sign on cells of width 2**-level (level >= degree(m)).

    The k-th binary digit of t is bit (level - k) of the cell number.
    """
    cell = np.asarray(cell, dtype=np.int64)
    parity = np.zeros(cell.shape, dtype=np.int64)
    for k in range(1, degree(m) + 1):
        if (m >> (k - 1)) & 1:
            parity ^= (cell >> (level - k)) & 1
    return 1.0 - 2.0 * parity


def walsh_on_grid(m: int, level: int) -> np.ndarray:
    """Signs of Paley w_m on the 2**level dyadic cells of [0, 1)."""
    if level < degree(m):
        raise ValueError(f"grid level {level} is too coarse for index {m}")
    return _sign_on_cells(m, level, np.arange(2**level))


def walsh_matrix(level: int) -> np.ndarray:
    """Rows are Paley-ordered Walsh functions sampled on 2**level cells."""
    n = 2**level
    cells = np.arange(n)
    rows = np.array([_bit_reverse(m, level) for m in range(n)])
    # w_m(cell) = (-1)^popcount(bitrev(m) & cell)
    prod = rows[:, None] & cells[None, :]
    parity = np.zeros_like(prod)
    while prod.any():
        parity ^= prod & 1
        prod >>= 1
    return 1.0 - 2.0 * parity


def _bit_reverse(m: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (m & 1)
        m >>= 1
    return out


def _bit_reverse_permutation(level: int) -> np.ndarray:
    idx = np.arange(2**level)
    rev = np.zeros_like(idx)
    for _ in range(level):
        rev = (rev << 1) | (idx & 1)
        idx = idx >> 1
    return rev


def _log2_exact(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    return n.bit_length() - 1


def _hadamard_butterfly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[-1]
    h = 1
    while h < n:
        a = a.reshape(-1, n // (2 * h), 2, h)
        x, y = a[:, :, 0, :].copy(), a[:, :, 1, :].copy()
        a[:, :, 0, :] = x + y
        a[:, :, 1, :] = x - y
        h *= 2
    return a.reshape(-1, n)


def fwht(samples: Sequence[float]) -> np.ndarray:
    """Fast Walsh transform of dyadic cell values.

    Returns the Paley-ordered coefficients normalized by 1/N, i.e. the
    Walsh coefficients of the piecewise-constant function taking value
    samples[i] on cell i. Cost is N log2 N additions.
    """
    a = np.asarray(samples, dtype=float)
    if a.ndim != 1:
        raise ValueError("fwht expects a 1-d array")
    level = _log2_exact(a.size)
    out = _hadamard_butterfly(a)[0] / a.size
    # natural (Hadamard) order -> Paley order is a bit reversal
    return out[_bit_reverse_permutation(level)]


def ifwht(coefficients: Sequence[float]) -> np.ndarray:
    """Cell values of sum_m c_m w_m; exact inverse of :func:`fwht`."""
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1:
        raise ValueError("ifwht expects a 1-d array")
    level = _log2_exact(c.size)
    return _hadamard_butterfly(c[_bit_reverse_permutation(level)])[0]


def sequency_to_paley_order(values: Sequence[float]) -> np.ndarray:
    """Reorder a sequency-indexed array of length 2**n into Paley order."""
    v = np.asarray(values)
    _log2_exact(v.size)
    out = np.empty_like(v)
    for s in range(v.size):
        out[gray_code(s)] = v[s]
    return out


def paley_to_sequency_order(values: Sequence[float]) -> np.ndarray:
    v = np.asarray(values)
    _log2_exact(v.size)
    return v[[gray_code(s) for s in range(v.size)]]


# -- CPMG / PDD subsets ------------------------------------------------------

def cpmg_indices(M: int, ordering: Ordering | str = Ordering.PALEY) -> list[int]:
    """First M CPMG Walsh indices: 2**k (sequency) or 3*2**(k-1) (Paley), k=1..M."""
    if M < 0:
        raise ValueError("M must be non-negative")
    seq = [2**k for k in range(1, M + 1)]
    return _in_ordering(seq, ordering)


def pdd_indices(M: int, ordering: Ordering | str = Ordering.PALEY) -> list[int]:
    """First M PDD Walsh indices: 2**k - 1 (sequency) or 2**(k-1) (Paley)."""
    if M < 0:
        raise ValueError("M must be non-negative")
    seq = [2**k - 1 for k in range(1, M + 1)]
    return _in_ordering(seq, ordering)


def _in_ordering(sequency_numbers: list[int], ordering) -> list[int]:
    if Ordering(ordering) is Ordering.SEQUENCY:
        return sequency_numbers
    return [gray_code(s) for s in sequency_numbers]


def zero_crossings(index_set: Iterable[IndexLike], ordering: Ordering | str = Ordering.PALEY) -> int:
    """Total number of sign changes (pi pulses) over a set of Walsh functions.

    A Walsh function has as many sign changes as its sequency number.
    """
    return sum(WalshIndex(as_paley(i, ordering)).sequency for i in set(_normalize(index_set, ordering)))


def _normalize(index_set, ordering):
    return [as_paley(i, ordering) for i in index_set]


# -- pulse sequences ---------------------------------------------------------

@dataclass(frozen=True)
class PulseSequence:
    """pi-pulse times in (0, T) realizing a Walsh modulation function."""

    T: float
    pulse_times: tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(x) for x in self.pulse_times)
        if self.T <= 0:
            raise ValueError("T must be positive")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("pulse times must be strictly increasing")
        if times and (times[0] <= 0 or times[-1] >= self.T):
            raise ValueError("pulse times must lie strictly inside (0, T)")
        object.__setattr__(self, "pulse_times", times)

    def __len__(self):
        return len(self.pulse_times)

    def modulation(self, t):
        """The +/-1 switching function: +1 before the first pulse."""
        t = np.asarray(t, dtype=float)
        flips = np.searchsorted(np.asarray(self.pulse_times), t, side="right")
        out = 1.0 - 2.0 * (flips & 1)
        return float(out) if out.ndim == 0 else out


def pulse_sequence_from_walsh(idx: IndexLike, T: float = 1.0,
                              ordering: Ordering | str = Ordering.PALEY) -> PulseSequence:
    """Pulses at the jump discontinuities of w_m(t/T)."""
    m = as_paley(idx, ordering)
    d = degree(m)
    signs = walsh_on_grid(m, d)
    jumps = np.nonzero(signs[1:] != signs[:-1])[0] + 1
    return PulseSequence(T, tuple(T * j / 2**d for j in jumps))


def pulse_pattern(idx: IndexLike, n: int, ordering: Ordering | str = Ordering.PALEY) -> str:
    """Binary pulse-encoding string of length 2**n: '1' where a pulse sits at t_j = j T/2**n."""
    m = as_paley(idx, ordering)
    signs = walsh_on_grid(m, n)
    bits = ["0"] + ["1" if a != b else "0" for a, b in zip(signs[:-1], signs[1:])]
    return "".join(bits)


def check_level(m: int, n: int) -> None:
    if n < degree(m):
        raise ValueError(f"order n={n} is below the degree {degree(m)} of index {m}")


def is_power_of_two(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


def level_of(n: int) -> int:
    return _log2_exact(n)


__all__ = [
    "Ordering", "WalshIndex", "PulseSequence", "gray_code", "inverse_gray_code",
    "convert_ordering", "degree", "rademacher_eval", "walsh_eval", "walsh_on_grid",
    "walsh_matrix", "fwht", "ifwht", "cpmg_indices", "pdd_indices", "zero_crossings",
    "pulse_sequence_from_walsh", "pulse_pattern", "as_paley", "sequency_to_paley_order",
    "paley_to_sequency_order",
]
