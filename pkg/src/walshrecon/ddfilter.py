"""Filter functions of Walsh decoupling sequences and coherence decay.

The filter function of Paley index m at reconstruction order n >= degree(m):

    F_m(wT) = 4**(n+1) sin^2(x/2) prod_j {sin^2 | cos^2}(2**(n-j-1) x),  x = wT / 2**n

with sin^2 where bit j (1-based from the least significant end) of m is set
and cos^2 where it is clear, for j = 1..n. This equals w^2 |int_0^T w_m(t/T)
e^{iwt} dt|^2, and behaves like (wT)**(2(r+1)) / 4**p for small wT.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .negligibility import negligibility, rank
from .walsh import degree, walsh_on_grid


def filter_function(m: int, omegaT, n: Optional[int] = None):
    if n is None:
        n = degree(m)
    if n < degree(m):
        raise ValueError(f"order n={n} is below the degree {degree(m)} of index {m}")
    wT = np.asarray(omegaT, dtype=float)
    if np.any(wT < 0):
        raise ValueError("omegaT must be non-negative")
    x = wT / 2**n
    out = 4.0 ** (n + 1) * np.sin(x / 2) ** 2
    for j in range(1, n + 1):
        arg = 2.0 ** (n - j - 1) * x
        out = out * (np.sin(arg) ** 2 if (m >> (j - 1)) & 1 else np.cos(arg) ** 2)
    return float(out) if out.ndim == 0 else out


def rolloff(m: int, omegaT):
    """Leading small-wT behaviour (wT)**(2(r+1)) / 4**p."""
    wT = np.asarray(omegaT, dtype=float)
    out = wT ** (2 * (rank(m) + 1)) / 4.0 ** negligibility(m)
    return float(out) if out.ndim == 0 else out


def annihilation_check(m: int, k: int) -> float:
    """integral_0^1 t**k w_m(t) dt, summed exactly cell by cell."""
    if k < 0:
        raise ValueError("polynomial degree must be >= 0")
    d = degree(m)
    signs = walsh_on_grid(m, d)
    edges = np.arange(2**d + 1) / 2**d
    # rising powers cancel in pairs; fsum keeps the cancellation exact to rounding
    pieces = signs * (edges[1:] ** (k + 1) - edges[:-1] ** (k + 1)) / (k + 1)
    return math.fsum(pieces)


class SpectrumKind(str, enum.Enum):
    POWER_LAW = "powerlaw"
    LORENTZIAN = "lorentzian"
    TABULATED = "tabulated"
    ZERO = "zero"


@dataclass(frozen=True)
class NoiseSpectrum:
    """Dephasing noise power spectral density S(w) on [omega_min, omega_max].

    powerlaw:   amplitude * w**exponent
    lorentzian: amplitude * cutoff**2 / (w**2 + cutoff**2)
    tabulated:  linear interpolation of ``values`` on ``grid``
    """

    kind: SpectrumKind = SpectrumKind.POWER_LAW
    amplitude: float = 1.0
    omega_min: Optional[float] = None
    omega_max: float = 1.0
    exponent: float = 0.0
    cutoff: float = 1.0
    grid: Optional[Sequence[float]] = None
    values: Optional[Sequence[float]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SpectrumKind(self.kind))
        if not (0 < self.omega_max < math.inf):
            raise ValueError("omega_max must be finite and positive")
        if self.omega_min is not None and not (0 < self.omega_min < self.omega_max):
            raise ValueError("need 0 < omega_min < omega_max")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.kind is SpectrumKind.TABULATED:
            if self.grid is None or self.values is None or len(self.grid) != len(self.values):
                raise ValueError("tabulated spectrum needs matching grid and values")
            if np.any(np.asarray(self.values) < 0):
                raise ValueError("spectral density must be non-negative")

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        if self.kind is SpectrumKind.ZERO:
            return np.zeros_like(w)
        if self.kind is SpectrumKind.POWER_LAW:
            return self.amplitude * w**self.exponent
        if self.kind is SpectrumKind.LORENTZIAN:
            return self.amplitude * self.cutoff**2 / (w**2 + self.cutoff**2)
        return self.amplitude * np.interp(w, self.grid, self.values, left=0.0, right=0.0)

    def scaled(self, factor: float) -> "NoiseSpectrum":
        return replace(self, amplitude=self.amplitude * factor)


class IntegrationError(RuntimeError):
    pass


def _integrand(spectrum, m, n, T):
    def g(w):
        return spectrum(w) / w**2 * filter_function(m, w * T, n)
    return g


def default_omega_min(spectrum: NoiseSpectrum, m: int, n: int, T: float) -> float:
    """Lower cutoff where the integrand has fallen below 1e-9 of its peak."""
    g = _integrand(spectrum, m, n, T)
    grid = np.geomspace(spectrum.omega_max * 1e-12, spectrum.omega_max, 2049)
    vals = np.abs(g(grid))
    peak = vals.max()
    if peak == 0:
        return grid[0]
    below = np.nonzero(vals >= 1e-9 * peak)[0]
    return float(grid[max(below[0] - 1, 0)])


def coherence_decay(m: int, n: Optional[int], T: float, spectrum: NoiseSpectrum,
                    limit: int = 2000) -> tuple[float, float]:
    """(chi, W): chi = (1/pi) int S(w)/w**2 F_m(wT) dw over the spectrum band, W = exp(-chi)."""
    n = degree(m) if n is None else n
    if n < degree(m):
        raise ValueError(f"order n={n} is below the degree {degree(m)} of index {m}")
    if spectrum.kind is SpectrumKind.ZERO or spectrum.amplitude == 0:
        return 0.0, 1.0
    lo = spectrum.omega_min if spectrum.omega_min is not None else default_omega_min(spectrum, m, n, T)
    hi = spectrum.omega_max
    g = _integrand(spectrum, m, n, T)
    # F oscillates with period ~2 pi 2**n / T; split the band so quad sees few periods per piece
    period = 2 * math.pi * 2 ** max(n, 1) / T
    pieces = max(1, min(int((hi - lo) / period) + 1, 4000))
    edges = np.linspace(lo, hi, pieces + 1)
    if spectrum.kind is SpectrumKind.TABULATED:
        edges = np.union1d(edges, np.clip(np.asarray(spectrum.grid, float), lo, hi))
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                val, _ = integrate.quad(g, a, b, limit=limit, epsabs=0.0, epsrel=1e-10)
            except integrate.IntegrationWarning as exc:
                raise IntegrationError(f"quadrature did not converge on [{a:g}, {b:g}] "
                                       f"for index {m}: {exc}") from exc
            total += val
    chi = total / math.pi
    return chi, math.exp(-chi)


def filter_table(indices: Sequence[int], n: Optional[int], omegaT: Sequence[float]) -> dict[int, np.ndarray]:
    omegaT = np.asarray(omegaT, dtype=float)
    return {m: np.atleast_1d(filter_function(m, omegaT, n)) for m in indices}


def rank_by_chi(indices: Sequence[int], n: Optional[int], T: float, spectrum: NoiseSpectrum) -> list[dict]:
    """Indices sorted by increasing chi (best decoupling first)."""
    rows = []
    for m in indices:
        chi, W = coherence_decay(m, n, T, spectrum)
        rows.append({"index": m, "rank": rank(m), "negligibility": negligibility(m), "chi": chi, "W": W})
    return sorted(rows, key=lambda r: (r["chi"], r["index"]))
