"""Simulated Walsh-modulated Ramsey acquisition at the probability level.

Each planned Walsh index is measured by an independent block of M shots.
The phase picked up under modulation w_m is gamma * T * f_m, the outcome
"0" occurs with probability (1 + v sin(phase)) / 2, and the coefficient is
recovered by inverting that relation.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .compression import CompressionPlan
from .profiles import FieldProfile, Provenance, WalshSpectrum, walsh_coefficient, walsh_spectrum
from .walsh import IndexLike, WalshIndex, as_paley

# 28 Hz/nT for the NV electron spin, in rad s^-1 T^-1
GAMMA_NV = 2 * math.pi * 28e9


class SaturationWarning(UserWarning):
    """An estimate hit the edge of the dynamic range and was clamped."""


@dataclass(frozen=True)
class SensorConfig:
    gamma: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.T > 0:
            raise ValueError("T must be positive")

    @property
    def dynamic_range(self) -> float:
        """Largest |coefficient| recoverable without phase wrapping, pi/(2 gamma T)."""
        return math.pi / (2 * self.gamma * self.T)


@dataclass(frozen=True)
class VisibilityModel:
    """v_m = exp(-(T / T2_m)**stretch) with T2_m = T2 * max(pulses, 1)**scaling.

    ``overrides`` pins the visibility of individual Paley indices.
    """

    T2: float = math.inf
    stretch: float = 1.0
    scaling: float = 0.0
    overrides: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.T2 > 0:
            raise ValueError("T2 must be positive")
        if self.stretch < 1:
            raise ValueError("stretch exponent must be >= 1")
        for m, v in self.overrides.items():
            if not 0 < v <= 1:
                raise ValueError(f"visibility of index {m} must lie in (0, 1]")

    def visibility(self, idx: IndexLike, T: float) -> float:
        m = as_paley(idx)
        if m in self.overrides:
            return float(self.overrides[m])
        if math.isinf(self.T2):
            return 1.0
        pulses = max(WalshIndex(m).sequency, 1)
        t2 = self.T2 * pulses**self.scaling
        return math.exp(-((T / t2) ** self.stretch))

    def to_json(self) -> dict:
        return {"T2": None if math.isinf(self.T2) else self.T2, "stretch": self.stretch,
                "scaling": self.scaling, "overrides": {str(k): v for k, v in self.overrides.items()}}


@dataclass(frozen=True)
class MeasurementRecord:
    index: int
    shots: int
    zeros: int
    visibility: float = 1.0
    seed: Optional[int] = None
    probability: Optional[float] = None  # set in noiseless mode, replaces zeros/shots

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("need at least one shot")
        if not 0 <= self.zeros <= self.shots:
            raise ValueError("zeros must lie in [0, shots]")
        if not 0 < self.visibility <= 1:
            raise ValueError("visibility must lie in (0, 1]")

    @property
    def fraction(self) -> float:
        return self.probability if self.probability is not None else self.zeros / self.shots

    def to_json(self) -> dict:
        d = asdict(self)
        d["M"] = d.pop("shots")
        d["v"] = d.pop("visibility")
        if d["probability"] is None:
            del d["probability"]
        return d


def accumulated_phase(b: FieldProfile, idx: IndexLike, cfg: SensorConfig) -> float:
    """gamma * T * (Walsh coefficient of b)."""
    if not math.isclose(b.T, cfg.T, rel_tol=1e-12):
        raise ValueError(f"profile duration {b.T} differs from sensor T {cfg.T}")
    return cfg.gamma * cfg.T * walsh_coefficient(b, idx)


def outcome_probability(phi, v: float = 1.0):
    """Probability of outcome "0"."""
    if not 0 < v <= 1:
        raise ValueError("visibility must lie in (0, 1]")
    return (1 + v * np.sin(phi)) / 2


def simulate_shots(p0: float, M: int, seed=None, *, index: int = 0, visibility: float = 1.0) -> MeasurementRecord:
    """Draw M single-shot outcomes; zeros ~ Binomial(M, p0)."""
    if not 0 <= p0 <= 1:
        raise ValueError("p0 must be a probability")
    rng = np.random.default_rng(seed)
    zeros = int(rng.binomial(M, p0))
    return MeasurementRecord(index, M, zeros, visibility, seed)


def invert_fraction(fraction, v, gamma: float, T: float):
    """Vectorized arcsine inversion; returns (estimate, clamped mask)."""
    s = (2 * np.asarray(fraction, dtype=float) - 1) / v
    clamped = np.abs(s) >= 1
    est = np.arcsin(np.clip(s, -1.0, 1.0)) / (gamma * T)
    return est, clamped


def _estimate(rec: MeasurementRecord, cfg: SensorConfig) -> tuple[float, bool]:
    est, clamped = invert_fraction(rec.fraction, rec.visibility, cfg.gamma, cfg.T)
    return float(est), bool(clamped)


def estimate_coefficient(rec: MeasurementRecord, cfg: SensorConfig) -> float:
    """Coefficient estimate from one record; warns when the result is saturated."""
    value, clamped = _estimate(rec, cfg)
    if clamped:
        warnings.warn(f"index {rec.index}: estimate clamped at the dynamic range edge",
                      SaturationWarning, stacklevel=2)
    return value


def derive_seed(seed: int, index: int) -> int:
    """Per-index RNG seed; a pure function of (seed, index)."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


@dataclass
class Acquisition:
    config: SensorConfig
    plan: CompressionPlan
    visibility: VisibilityModel
    shots: int
    seed: int
    noiseless: bool
    records: list[MeasurementRecord]
    spectrum: WalshSpectrum
    saturated: list[int]

    def to_json(self) -> dict:
        return {
            "config": {"gamma": self.config.gamma, "T": self.config.T, "shots": self.shots,
                       "seed": self.seed, "noiseless": self.noiseless,
                       "visibility": self.visibility.to_json()},
            "plan": self.plan.to_json(),
            "records": [r.to_json() for r in self.records],
            "spectrum": self.spectrum.to_json(),
            "saturated": self.saturated,
        }


def run_protocol(b: FieldProfile, cfg: SensorConfig, plan: CompressionPlan | Sequence[int],
                 vis: VisibilityModel | None = None, M: int = 1000, seed: int = 0, *,
                 noiseless: bool = False, workers: int | None = None) -> Acquisition:
    """Measure every planned coefficient of b and invert the outcomes.

    Each index draws from its own RNG stream seeded by ``derive_seed(seed, m)``,
    so the result does not depend on ``workers``.
    """
    if not isinstance(plan, CompressionPlan):
        from .compression import Method
        plan = CompressionPlan(Method.FULL, {}, tuple(sorted(set(plan))))
    if not plan.selected_indices:
        raise ValueError("plan selects no indices")
    if M < 1:
        raise ValueError("M must be >= 1")
    if not math.isclose(b.T, cfg.T, rel_tol=1e-12):
        raise ValueError(f"profile duration {b.T} differs from sensor T {cfg.T}")
    vis = vis or VisibilityModel()
    exact = walsh_spectrum(b, plan.selected_indices)

    def measure(m: int) -> MeasurementRecord:
        v = vis.visibility(m, cfg.T)
        p0 = float(outcome_probability(cfg.gamma * cfg.T * exact[m], v))
        s = derive_seed(seed, m)
        if noiseless:
            return MeasurementRecord(m, M, int(round(M * p0)), v, s, probability=p0)
        return simulate_shots(p0, M, s, index=m, visibility=v)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(measure, plan.selected_indices))
    else:
        records = [measure(m) for m in plan.selected_indices]

    coeffs, saturated = {}, []
    for rec in records:
        value, clamped = _estimate(rec, cfg)
        coeffs[rec.index] = value
        if clamped:
            saturated.append(rec.index)
    if saturated:
        warnings.warn(f"{len(saturated)} coefficient(s) saturated: {saturated}", SaturationWarning,
                      stacklevel=2)
    return Acquisition(cfg, plan, vis, M, seed, noiseless, records,
                       WalshSpectrum(cfg.T, coeffs, Provenance.ESTIMATED), saturated)
