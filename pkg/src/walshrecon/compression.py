"""Choosing which Walsh coefficients to measure, and what dropping the rest costs."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .negligibility import subdegree, threshold_search
from .profiles import GAUSS_NODES, FieldProfile, WalshSpectrum, walsh_spectrum
from .walsh import cpmg_indices, degree, pdd_indices, zero_crossings

# finest grid used for MSQE quadrature even when the plan is coarse
MIN_MSQE_LEVEL = 6


class Method(str, enum.Enum):
    CPMG_PDD = "cpmgpdd"
    THRESHOLD = "threshold"
    SUBDEGREE = "subdegree"
    FULL = "full"


def default_cutoff(d: int) -> Optional[int]:
    """Largest kept sub-degree at degree d; None keeps the whole degree."""
    return None if d <= 2 else d - 2


@dataclass(frozen=True)
class CompressionPlan:
    method: Method
    parameters: dict[str, Any]
    selected_indices: tuple[int, ...]

    @property
    def pulse_count(self) -> int:
        return zero_crossings(self.selected_indices)

    @property
    def order(self) -> int:
        return max((degree(m) for m in self.selected_indices), default=0)

    def __len__(self):
        return len(self.selected_indices)

    def to_json(self) -> dict:
        return {"method": self.method.value, "parameters": dict(self.parameters),
                "selected_indices": list(self.selected_indices)}


def plan_indices(method: Method | str, *, M: Optional[int] = None, p0: Optional[int] = None,
                 n: Optional[int] = None,
                 cutoff: Callable[[int], Optional[int]] = default_cutoff,
                 cutoff_offset: Optional[int] = None) -> CompressionPlan:
    """Build the index set for one compression strategy.

    cpmgpdd:   {0} plus the first M CPMG and first M PDD indices.
    threshold: every index with negligibility <= p0.
    subdegree: every index of degree <= n whose sub-degree is at most
               cutoff(d); ``cutoff_offset=k`` is shorthand for
               d' = max(d - k, 0) with degrees <= 2 kept whole.
    full:      the first 2**n indices.
    """
    method = Method(method)
    if method is Method.CPMG_PDD:
        _need(M, "M", method)
        if M < 1:
            raise ValueError("M must be >= 1")
        idx = {0, *cpmg_indices(M), *pdd_indices(M)}
        params = {"M": M}
    elif method is Method.THRESHOLD:
        _need(p0, "p0", method)
        if p0 < 0:
            raise ValueError("p0 must be >= 0")
        idx = set(threshold_search(p0))
        params = {"p0": p0}
    elif method is Method.SUBDEGREE:
        _need(n, "n", method)
        if n < 0:
            raise ValueError("n must be >= 0")
        if cutoff_offset is not None:
            if cutoff_offset < 2:
                raise ValueError("sub-degree cutoff must satisfy d' <= d - 2")
            k = cutoff_offset
            cutoff = lambda d: None if d <= 2 else max(d - k, 0)  # noqa: E731
        idx = set()
        for m in range(2**n):
            dp = cutoff(degree(m))
            if dp is None or subdegree(m) <= dp:
                idx.add(m)
        params = {"n": n, "cutoff_offset": 2 if cutoff_offset is None else cutoff_offset}
    else:
        _need(n, "n", method)
        idx = set(range(2**n))
        params = {"n": n}
    return CompressionPlan(method, params, tuple(sorted(idx)))


def _need(value, name, method):
    if value is None:
        raise ValueError(f"method {method.value!r} requires parameter {name}")


def reconstruct(f: FieldProfile, plan: CompressionPlan | list[int]) -> WalshSpectrum:
    """Exact coefficients of f over the plan's indices."""
    indices = plan.selected_indices if isinstance(plan, CompressionPlan) else plan
    return walsh_spectrum(f, indices)


def msqe(f: FieldProfile, rec: WalshSpectrum, nodes: int = GAUSS_NODES) -> float:
    """(1/T) * integral over [0, T] of (f - f_rec)**2.

    f_rec is constant on the finest dyadic cells of the reconstruction, so
    each cell is integrated with Gauss-Legendre nodes against a constant.
    """
    if not np.isclose(f.T, rec.T, rtol=1e-12, atol=0):
        raise ValueError(f"duration mismatch: profile T={f.T}, reconstruction T={rec.T}")
    level = max(rec.level, MIN_MSQE_LEVEL)
    recon = rec.cell_values(level)
    n = 2**level
    if f.is_sampled:
        fine = max(level, f.level)
        diff = f.cell_averages(fine) - np.repeat(recon, 2 ** (fine - level))
        return float(np.mean(diff**2))
    x, w = np.polynomial.legendre.leggauss(nodes)
    width = f.T / n
    t = np.arange(n)[:, None] * width + (x[None, :] + 1.0) * (width / 2)
    sq = (f(t) - recon[:, None]) ** 2
    return float(np.sum(sq @ w) / (2 * n))


def truncation_bound(n: int, T: float, sup_deriv: float) -> float:
    """Max pointwise error of the n'th order reconstruction: 2**-(n+1) T max|b'|."""
    if sup_deriv < 0:
        raise ValueError("sup_deriv must be non-negative")
    return 2.0 ** (-(n + 1)) * T * sup_deriv


def subdegree_error_bound(d: int, d_prime: int, T: float, sup_second_deriv: float) -> float:
    """Error from dropping degree-d coefficients with sub-degree above d'."""
    if d_prime > d - 2:
        raise ValueError(f"need d' <= d - 2, got d={d}, d'={d_prime}")
    if sup_second_deriv < 0:
        raise ValueError("sup_second_deriv must be non-negative")
    return 2.0 ** (-d_prime - d - 2) * (1 - 2.0 ** (d_prime - d + 1)) * T**2 * sup_second_deriv


@dataclass
class ErrorReport:
    msqe: Optional[float] = None
    truncation_bound: Optional[float] = None
    subdegree_bound: Optional[float] = None
    variance: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("msqe", "truncation_bound", "subdegree_bound", "variance"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative, got {v}")

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in ("msqe", "truncation_bound", "subdegree_bound", "variance")}
        out.update(self.extra)
        return out


def plan_error_report(f: FieldProfile, plan: CompressionPlan) -> ErrorReport:
    """MSQE of the plan plus whichever analytic bounds apply to it."""
    rec = reconstruct(f, plan)
    report = ErrorReport(msqe=msqe(f, rec))
    if f.derivative is None and not f.is_sampled:
        return report
    n = plan.order
    full = set(range(2**n))
    if set(plan.selected_indices) == full:
        report.truncation_bound = truncation_bound(n, f.T, f.sup_derivative(1))
    if plan.method is Method.SUBDEGREE:
        k = plan.parameters.get("cutoff_offset", 2)
        sup2 = f.sup_derivative(2)
        report.subdegree_bound = sum(subdegree_error_bound(d, max(d - k, 0), f.T, sup2)
                                     for d in range(3, n + 1))
    return report


def compression_report(f: FieldProfile, plan: CompressionPlan) -> dict:
    err = plan_error_report(f, plan)
    return {
        "method": plan.method.value,
        "parameters": dict(plan.parameters),
        "selected_indices": list(plan.selected_indices),
        "msqe": err.msqe,
        "bounds": {"truncation": err.truncation_bound, "subdegree": err.subdegree_bound},
        "pulse_count": plan.pulse_count,
    }


def write_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
