"""Fisher information, sensitivity, and the reconstruction error envelope."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .compression import ErrorReport, truncation_bound
from .profiles import WalshSpectrum, partial_sum
from .sensor import SensorConfig, VisibilityModel
from .walsh import IndexLike, as_paley


def fisher_information(gamma: float, T: float, v: float, f_hat: float, M: int) -> float:
    """Fisher information about a field amplitude from M repetitions: M (gamma T v f)**2."""
    return M * gamma**2 * T**2 * v**2 * f_hat**2


def sensitivity(gamma: float, T: float, v: float, f_hat: float, M: int) -> tuple[float, float]:
    """(eta, eta0) with eta = 1/sqrt(Fisher information) and eta0 = sqrt(M) eta.

    A zero coefficient carries no information; both values are then inf.
    """
    if f_hat == 0:
        return math.inf, math.inf
    eta0 = 1.0 / (gamma * T * v * abs(f_hat))
    return eta0 / math.sqrt(M), eta0


def coefficient_std(gamma: float, T: float, v: float, M: int) -> float:
    return 1.0 / (math.sqrt(M) * T * gamma * v)


@dataclass(frozen=True)
class ReconstructionEnvelope:
    """Gaussian band around a reconstruction with time-independent variance."""

    indices: tuple[int, ...]
    variance: float
    shots: int
    config: SensorConfig
    visibilities: dict
    spectrum: Optional[WalshSpectrum] = None

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def mean(self, t):
        if self.spectrum is None:
            raise ValueError("envelope has no spectrum attached")
        return partial_sum(self.spectrum, self.indices, t)

    def band(self, t, k: float = 1.0):
        mu = self.mean(t)
        return mu - k * self.sigma, mu + k * self.sigma

    def write_csv(self, path: str | Path, t) -> None:
        t = np.asarray(t, dtype=float)
        mu = np.atleast_1d(self.mean(t))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "mean", "mean_minus_sigma", "mean_plus_sigma"])
            for ti, mi in zip(np.atleast_1d(t), mu):
                w.writerow([repr(float(ti)), repr(float(mi)), repr(float(mi - self.sigma)),
                            repr(float(mi + self.sigma))])


def envelope(J: Iterable[IndexLike], M: int, cfg: SensorConfig, vis: VisibilityModel | None = None,
             spectrum: WalshSpectrum | None = None, inflation: float = 1.0) -> ReconstructionEnvelope:
    """Variance sum_{m in J} 1/v_m**2 / (M T**2 gamma**2), times an optional inflation factor."""
    keys = tuple(sorted({as_paley(i) for i in J}))
    if not keys:
        raise ValueError("index set J is empty")
    if inflation <= 0:
        raise ValueError("inflation must be positive")
    vis = vis or VisibilityModel()
    v = {m: vis.visibility(m, cfg.T) for m in keys}
    var = inflation * math.fsum(1.0 / v[m] ** 2 for m in keys) / (M * cfg.T**2 * cfg.gamma**2)
    return ReconstructionEnvelope(keys, var, M, cfg, v, spectrum)


def total_error_report(n: int, env: ReconstructionEnvelope, sup_deriv: float) -> ErrorReport:
    """Statistical variance of the envelope next to the truncation bound at order n."""
    return ErrorReport(truncation_bound=truncation_bound(n, env.config.T, sup_deriv),
                       variance=env.variance)
