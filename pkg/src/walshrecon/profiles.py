"""Field profiles, Walsh coefficients and spectra.

A profile is either a closed-form function on [0, T] or 2**n samples on the
uniform dyadic grid (read as a piecewise-constant function).
"""
from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from .walsh import (IndexLike, Ordering, as_paley, degree, fwht, is_power_of_two,
                    level_of, walsh_on_grid)

GAUSS_NODES = 8
# coarsest dyadic grid used for quadrature regardless of the index degree
MIN_QUAD_LEVEL = 4


class SampleConvention(str, enum.Enum):
    MIDPOINT = "midpoint"
    LEFT = "left"
    AVERAGE = "average"


@dataclass(frozen=True)
class ExpTerm:
    """coef * exp(rate * t); a profile is the real part of a sum of these."""

    coef: complex
    rate: complex


@dataclass(frozen=True)
class FieldProfile:
    """A scalar signal b(t) on [0, T].

    Closed-form profiles carry ``func`` (vectorized over t in seconds) and,
    when known, ``derivative(k)`` returning the k-th derivative. Sampled
    profiles carry ``samples`` of length 2**n and are evaluated as the
    piecewise-constant interpolant.
    """

    T: float
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    samples: Optional[np.ndarray] = None
    convention: SampleConvention = SampleConvention.MIDPOINT
    name: str = "custom"
    params: Mapping[str, float] = field(default_factory=dict)
    derivative: Optional[Callable[[int], Callable[[np.ndarray], np.ndarray]]] = None
    exp_terms: Optional[tuple[ExpTerm, ...]] = None

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"duration T must be positive, got {self.T}")
        if (self.func is None) == (self.samples is None):
            raise ValueError("give exactly one of func or samples")
        if self.samples is not None:
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 1 or not is_power_of_two(s.size):
                raise ValueError(f"sample count must be a power of two, got {s.size}")
            object.__setattr__(self, "samples", s)
        object.__setattr__(self, "convention", SampleConvention(self.convention))

    @property
    def is_sampled(self) -> bool:
        return self.samples is not None

    @property
    def level(self) -> int:
        """log2 of the sample count (sampled profiles only)."""
        return level_of(self.samples.size)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.func is not None:
            return self.func(t)
        n = self.samples.size
        cell = np.clip(np.floor(t / self.T * n).astype(np.int64), 0, n - 1)
        return self.samples[cell]

    def cell_averages(self, level: int, nodes: int = GAUSS_NODES) -> np.ndarray:
        """Mean of the profile over each of the 2**level dyadic cells."""
        if self.is_sampled:
            if level < self.level:
                return self.samples.reshape(2**level, -1).mean(axis=1)
            return np.repeat(self.samples, 2 ** (level - self.level))
        x, w = np.polynomial.legendre.leggauss(nodes)
        n = 2**level
        width = self.T / n
        left = np.arange(n)[:, None] * width
        t = left + (x[None, :] + 1.0) * (width / 2)
        return (self.func(t) @ w) / 2

    def sup_derivative(self, k: int, grid: int = 4097) -> float:
        """max over [0, T] of |f^(k)|, by a dense scan refined locally."""
        fk = self._derivative_fn(k)
        return _sup_abs(fk, self.T, grid)

    def variation(self, k: int, nodes: int = 64, level: int = 8) -> float:
        """Total variation of f^(k) on [0, T], i.e. the integral of |f^(k+1)|."""
        fk1 = self._derivative_fn(k + 1)
        x, w = np.polynomial.legendre.leggauss(nodes)
        n = 2**level
        width = self.T / n
        t = np.arange(n)[:, None] * width + (x[None, :] + 1.0) * (width / 2)
        return float(np.sum(np.abs(fk1(t)) @ w) * width / 2)

    def _derivative_fn(self, k: int):
        if k == 0:
            return self.__call__
        if self.derivative is None:
            if self.is_sampled:
                return _finite_difference_derivative(self, k)
            raise ValueError(f"profile {self.name!r} has no derivative information")
        return self.derivative(k)


def _sup_abs(fn, T, grid):
    from scipy.optimize import minimize_scalar

    t = np.linspace(0.0, T, grid)
    v = np.abs(fn(t))
    best = float(v.max())
    h = T / (grid - 1)
    for i in np.argsort(v)[-4:]:
        lo, hi = max(0.0, t[i] - h), min(T, t[i] + h)
        res = minimize_scalar(lambda s: -abs(float(fn(np.asarray(s)))), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12 * max(T, 1.0)})
        best = max(best, -float(res.fun))
    return best


def _finite_difference_derivative(profile: FieldProfile, k: int):
    """k-th derivative of sampled data by repeated central differences."""
    s = profile.samples
    dt = profile.T / s.size
    d = s
    for _ in range(k):
        d = np.gradient(d, dt)
    sampled = FieldProfile(profile.T, samples=d, convention=profile.convention)
    return sampled.__call__


# -- corpus ------------------------------------------------------------------

def _trig_profile(name, T, const, terms, params=None):
    """const + sum A cos(w t + phi) with analytic derivatives."""
    terms = tuple((float(a), float(w), float(ph)) for a, w, ph in terms)

    def make(k):
        def fk(t):
            t = np.asarray(t, dtype=float)
            out = np.full(t.shape, const if k == 0 else 0.0)
            for a, w, ph in terms:
                out = out + a * w**k * np.cos(w * t + ph + k * math.pi / 2)
            return out
        return fk

    exp_terms = [ExpTerm(complex(const), 0j)] if const else []
    exp_terms += [ExpTerm(a * complex(math.cos(ph), math.sin(ph)), 1j * w) for a, w, ph in terms]
    return FieldProfile(T, func=make(0), name=name, params=dict(params or {}),
                        derivative=make, exp_terms=tuple(exp_terms))


def cosine(omega: float = 2 * math.pi, T: float = 1.0, name="cos") -> FieldProfile:
    return _trig_profile(name, T, 0.0, [(1.0, omega, 0.0)], {"omega": omega})


def sine(omega: float = 2 * math.pi, T: float = 1.0, name="sin") -> FieldProfile:
    return _trig_profile(name, T, 0.0, [(1.0, omega, -math.pi / 2)], {"omega": omega})


def constant(value: float = 1.0, T: float = 1.0) -> FieldProfile:
    return _trig_profile("const", T, float(value), [], {"value": value})


def exponential(rate: float = -1.0, T: float = 1.0, amplitude: float = 1.0) -> FieldProfile:
    def make(k):
        return lambda t: amplitude * rate**k * np.exp(rate * np.asarray(t, dtype=float))
    return FieldProfile(T, func=make(0), name="exp", params={"rate": rate, "amplitude": amplitude},
                        derivative=make, exp_terms=(ExpTerm(complex(amplitude), complex(rate)),))


def gaussian(mu: float = 0.3, sigma: float = 0.1, T: float = 1.0) -> FieldProfile:
    from numpy.polynomial.hermite_e import hermeval

    def make(k):
        basis = [0.0] * k + [1.0]

        def fk(t):
            x = (np.asarray(t, dtype=float) - mu) / sigma
            pdf = np.exp(-x**2 / 2) / (sigma * math.sqrt(2 * math.pi))
            return (-1) ** k * sigma ** (-k) * hermeval(x, basis) * pdf
        return fk
    return FieldProfile(T, func=make(0), name="f5", params={"mu": mu, "sigma": sigma},
                        derivative=make)


def polychromatic(T: float = 1.0) -> FieldProfile:
    """2 + 3cos(2 pi t) + 4cos(4 pi t) + 6sin(2 pi t) + 2sin(4 pi t)."""
    w = 2 * math.pi
    return _trig_profile("f4", T, 2.0, [(3.0, w, 0.0), (4.0, 2 * w, 0.0),
                                        (6.0, w, -math.pi / 2), (2.0, 2 * w, -math.pi / 2)])


CORPUS: dict[str, Callable[..., FieldProfile]] = {
    "f1": lambda T=1.0: cosine(2 * math.pi, T, name="f1"),
    "f2": lambda T=1.0: cosine(2 * math.pi + 0.2, T, name="f2"),
    "f3": lambda T=1.0: cosine(2 * math.pi + 0.5, T, name="f3"),
    "f4": lambda T=1.0: polychromatic(T),
    "f5": lambda T=1.0: gaussian(T=T),
    "exp": lambda T=1.0: exponential(T=T),
    "sin": lambda T=1.0: sine(T=T),
    "const": lambda T=1.0: constant(T=T),
}


def named_profile(name: str, T: float = 1.0) -> FieldProfile:
    """One of f1..f5, exp, sin, const, defined in seconds on [0, T]."""
    try:
        return CORPUS[name](T)
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(CORPUS)}") from None


# -- coefficients ------------------------------------------------------------

def walsh_coefficient(f: FieldProfile, idx: IndexLike, quad_points_per_cell: int = GAUSS_NODES,
                      ordering: Ordering | str = Ordering.PALEY) -> float:
    """(1/T) * integral of f(t) w_m(t/T) over [0, T].

    Closed-form profiles: Gauss-Legendre on each dyadic cell where w_m is
    constant. Sampled profiles: exact integral of the piecewise-constant
    interpolant (zero for indices finer than the sample grid).
    """
    if quad_points_per_cell < 1:
        raise ValueError("quad_points_per_cell must be >= 1")
    m = as_paley(idx, ordering)
    d = degree(m)
    if f.is_sampled:
        if d > f.level:
            return 0.0
        signs = walsh_on_grid(m, f.level)
        return float(np.dot(signs, f.samples) / f.samples.size)
    level = max(d, MIN_QUAD_LEVEL)
    avg = f.cell_averages(level, quad_points_per_cell)
    return float(np.dot(walsh_on_grid(m, level), avg) / avg.size)


def exp_sum_coefficient(terms: Iterable[ExpTerm], m: int, T: float = 1.0) -> float:
    """Walsh coefficient of Re sum c exp(a t) from the dyadic product form.

    With t/T = sum_k t_k 2**-k + s 2**-n, the integral of exp(aTx) w_m(x)
    factorizes over binary digits, which keeps full relative precision for
    coefficients far below the rounding level of quadrature.
    """
    n = degree(m)
    total = 0j
    for term in terms:
        z = complex(term.rate) * T
        if z == 0:
            total += term.coef if m == 0 else 0.0
            continue
        val = complex(term.coef)
        for k in range(1, n + 1):
            e = np.expm1(z / 2**k)
            val *= (-e / 2) if (m >> (k - 1)) & 1 else (1 + e / 2)
        zn = z / 2**n
        val *= np.expm1(zn) / zn
        total += val
    return float(total.real)


# -- spectra -----------------------------------------------------------------

class Provenance(str, enum.Enum):
    EXACT = "exact"
    ESTIMATED = "estimated"


@dataclass
class WalshSpectrum:
    """Walsh coefficients keyed by Paley index."""

    T: float
    coefficients: dict[int, float]
    provenance: Provenance = Provenance.EXACT

    def __post_init__(self):
        self.coefficients = {int(k): float(v) for k, v in self.coefficients.items()}
        if any(k < 0 for k in self.coefficients):
            raise ValueError("Walsh indices must be natural numbers")
        self.provenance = Provenance(self.provenance)

    @property
    def indices(self) -> list[int]:
        return sorted(self.coefficients)

    @property
    def level(self) -> int:
        """Finest dyadic level touched by the stored indices."""
        return max((degree(m) for m in self.coefficients), default=0)

    def __getitem__(self, m: int) -> float:
        return self.coefficients[m]

    def restrict(self, index_set: Iterable[IndexLike], ordering=Ordering.PALEY) -> "WalshSpectrum":
        keys = {as_paley(i, ordering) for i in index_set}
        missing = keys - self.coefficients.keys()
        if missing:
            raise KeyError(f"spectrum has no coefficient for Paley indices {sorted(missing)}")
        return WalshSpectrum(self.T, {k: self.coefficients[k] for k in keys}, self.provenance)

    def cell_values(self, level: Optional[int] = None) -> np.ndarray:
        """The reconstruction on the 2**level dyadic cells of [0, T]."""
        level = self.level if level is None else level
        if level < self.level:
            raise ValueError("level is coarser than the spectrum")
        out = np.zeros(2**level)
        for m, c in self.coefficients.items():
            out += c * walsh_on_grid(m, level)
        return out

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "ordering": "paley",
            "coefficients": {str(k): self.coefficients[k] for k in self.indices},
            "provenance": self.provenance.value,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "WalshSpectrum":
        if data.get("ordering", "paley") != "paley":
            raise ValueError("spectrum files store Paley-ordered coefficients")
        return cls(float(data["T"]), {int(k): v for k, v in data["coefficients"].items()},
                   Provenance(data.get("provenance", "exact")))


def walsh_spectrum(f: FieldProfile, index_set: Iterable[IndexLike] | None = None, *, order: int | None = None,
                   quad_points_per_cell: int = GAUSS_NODES, ordering=Ordering.PALEY) -> WalshSpectrum:
    """Exact (quadrature) coefficients over an index set or the first 2**order indices.

    One cell-average pass plus a fast transform serves every index at once.
    """
    if index_set is None:
        if order is None:
            raise ValueError("give an index set or an order")
        keys = list(range(2**order))
    else:
        keys = sorted({as_paley(i, ordering) for i in index_set})
    top = max((degree(m) for m in keys), default=0)
    if f.is_sampled:
        level = f.level
        coeffs = fwht(f.samples)
        values = {m: (float(coeffs[m]) if degree(m) <= level else 0.0) for m in keys}
    else:
        level = max(top, MIN_QUAD_LEVEL)
        coeffs = fwht(f.cell_averages(level, quad_points_per_cell))
        values = {m: float(coeffs[m]) for m in keys}
    return WalshSpectrum(f.T, values, Provenance.EXACT)


def first_indices(order: int) -> list[int]:
    """Indices of the n'th order reconstruction (the first 2**n Walsh functions)."""
    return list(range(2**order))


def partial_sum(spec: WalshSpectrum, index_set: Iterable[IndexLike], t, ordering=Ordering.PALEY):
    """sum over index_set of coefficient * w_m(t/T), for t in [0, T)."""
    keys = sorted({as_paley(i, ordering) for i in index_set})
    missing = [k for k in keys if k not in spec.coefficients]
    if missing:
        raise KeyError(f"spectrum has no coefficient for Paley indices {missing}")
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t >= spec.T)):
        raise ValueError("t must lie in [0, T)")
    level = max((degree(m) for m in keys), default=0)
    values = spec.restrict(keys).cell_values(level)
    cell = np.floor(t / spec.T * 2**level).astype(np.int64)
    out = values[np.minimum(cell, 2**level - 1)]
    return float(out) if out.ndim == 0 else out


# -- file formats ------------------------------------------------------------

def save_spectrum(spec: WalshSpectrum, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec.to_json(), indent=2, sort_keys=True) + "\n")


def load_spectrum(path: str | Path) -> WalshSpectrum:
    return WalshSpectrum.from_json(json.loads(Path(path).read_text()))


def load_profile_csv(path: str | Path) -> FieldProfile:
    """Read a ``t,value`` CSV of 2**n uniformly spaced samples.

    t[0] == 0 marks left-endpoint samples, t[0] == dt/2 marks midpoints.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["t", "value"]:
            raise ValueError(f"{path}: expected header 't,value'")
        rows = [(float(r["t"]), float(r["value"])) for r in reader]
    if not rows:
        raise ValueError(f"{path}: no samples")
    t = np.array([r[0] for r in rows])
    v = np.array([r[1] for r in rows])
    if not is_power_of_two(v.size):
        raise ValueError(f"{path}: sample count {v.size} is not a power of two")
    if v.size == 1:
        raise ValueError(f"{path}: need at least two samples to infer spacing")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise ValueError(f"{path}: samples are not uniformly spaced")
    step = float(dt[0])
    if math.isclose(t[0], 0.0, abs_tol=1e-12 * step):
        convention = SampleConvention.LEFT
    elif math.isclose(t[0], step / 2, rel_tol=1e-9):
        convention = SampleConvention.MIDPOINT
    else:
        raise ValueError(f"{path}: first sample must sit at 0 or at half a step")
    return FieldProfile(step * v.size, samples=v, convention=convention, name=Path(path).stem)


def save_profile_csv(profile: FieldProfile, path: str | Path) -> None:
    n = profile.samples.size
    dt = profile.T / n
    offset = 0.0 if profile.convention is SampleConvention.LEFT else dt / 2
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for i, value in enumerate(profile.samples):
            w.writerow([repr(offset + i * dt), repr(float(value))])


def sample_profile(f: FieldProfile, level: int,
                   convention: SampleConvention | str = SampleConvention.MIDPOINT) -> FieldProfile:
    """Discretize a closed-form profile onto 2**level dyadic cells."""
    convention = SampleConvention(convention)
    n = 2**level
    dt = f.T / n
    if convention is SampleConvention.AVERAGE:
        values = f.cell_averages(level)
    else:
        offset = 0.0 if convention is SampleConvention.LEFT else dt / 2
        values = f(offset + dt * np.arange(n))
    return FieldProfile(f.T, samples=np.asarray(values, dtype=float), convention=convention,
                        name=f"{f.name}@{n}")
