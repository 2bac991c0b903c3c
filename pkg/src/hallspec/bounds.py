"""Rayleigh-Ritz sandwich bounds, diffusion-time decay and temperature asymptotics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from hallspec.energy import high_temperature_slope
from hallspec.spectral import Spectrum

BOUND_TOL = 1e-9
DECAY_TOL = 1e-12


class BoundsError(ValueError):
    pass


def rayleigh_quotient(matrix, v) -> float:
    a = np.asarray(matrix, dtype=float)
    v = np.asarray(v, dtype=float)
    denom = float(np.dot(v, v))
    if denom == 0:
        raise BoundsError("Rayleigh quotient of the zero vector")
    return float(v @ a @ v) / denom


@dataclass(frozen=True)
class SandwichBound:
    """Bounds on an energy value, plus the unscaled-eigenvalue bounds for comparison.

    ``lower``/``upper`` bound the quadratic form of the damped operator that
    actually produces the energy.  ``literal_lower``/``literal_upper`` scale
    ``||dphi||^2`` by the raw extreme eigenvalues instead; they are reported
    but do not hold in general.
    """

    lower: float
    upper: float
    value: float
    literal_lower: float = float("nan")
    literal_upper: float = float("nan")

    @property
    def satisfied(self) -> bool:
        return self.lower - BOUND_TOL <= self.value <= self.upper + BOUND_TOL

    @property
    def slack_lower(self) -> float:
        return self.value - self.lower

    @property
    def slack_upper(self) -> float:
        return self.upper - self.value

    @property
    def literal_satisfied(self) -> bool:
        return self.literal_lower - BOUND_TOL <= self.value <= self.literal_upper + BOUND_TOL

    def failure_record(self) -> dict | None:
        if self.satisfied:
            return None
        return {
            "lower": self.lower,
            "upper": self.upper,
            "value": self.value,
            "slack_lower": self.slack_lower,
            "slack_upper": self.slack_upper,
        }


def sandwich_for_energy(
    spectrum: Spectrum,
    delta_phi,
    tau: float,
    energy_value: float,
    modes: Iterable[int] | None = None,
) -> SandwichBound:
    """Bound ``sum_{i in modes} exp(-tau*lambda_i) dphi_i^2`` by Rayleigh-Ritz.

    The operator is ``diag(exp(-tau*lambda_i))`` on the selected modes, so
    ``exp(-tau*lambda_max) ||dphi||^2 <= E <= exp(-tau*lambda_min) ||dphi||^2``
    with extremes and norm taken over those modes.  Mode weights, if any,
    belong inside ``delta_phi``.
    """
    v = np.asarray(delta_phi, dtype=float)
    lam = spectrum.eigenvalues
    if v.shape != lam.shape:
        raise BoundsError("delta_phi length differs from the spectrum")
    if not np.any(v != 0):
        raise BoundsError("delta_phi is zero")
    idx = np.arange(lam.size) if modes is None else np.array(sorted(set(modes)), dtype=int)
    if idx.size == 0:
        return SandwichBound(0.0, 0.0, float(energy_value), 0.0, 0.0)
    lam_s = lam[idx]
    norm_sq = float(np.dot(v[idx], v[idx]))
    damped = np.exp(-tau * lam_s)
    return SandwichBound(
        lower=float(damped.min()) * norm_sq,
        upper=float(damped.max()) * norm_sq,
        value=float(energy_value),
        literal_lower=float(lam_s.min()) * norm_sq,
        literal_upper=float(lam_s.max()) * norm_sq,
    )


def operator_sandwich(operator, v, value: float | None = None) -> SandwichBound:
    """Sandwich of the Rayleigh quotient of ``operator`` at ``v``.

    ``operator`` is a symmetric matrix or, for a diagonal operator, the
    vector of its diagonal.  ``value`` defaults to the quotient itself.
    """
    a = np.asarray(operator, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.any(v != 0):
        raise BoundsError("vector is zero")
    if a.ndim == 1:
        eig = a
        q = float(np.dot(a * v, v) / np.dot(v, v))
    else:
        eig = np.linalg.eigvalsh(0.5 * (a + a.T))
        q = rayleigh_quotient(a, v)
    value = q if value is None else float(value)
    return SandwichBound(float(eig.min()), float(eig.max()), value, float(eig.min()), float(eig.max()))


class DecayVerdict(NamedTuple):
    ok: bool
    max_violation: float


def tau_decay_check(taus: Sequence[float], energies: Sequence[float]) -> DecayVerdict:
    """Energy must not increase along a strictly increasing diffusion-time grid."""
    t = np.asarray(taus, dtype=float)
    e = np.asarray(energies, dtype=float)
    if t.ndim != 1 or t.size < 3 or e.shape[-1] != t.size:
        raise BoundsError("need at least 3 (tau, energy) samples")
    if np.any(np.diff(t) <= 0):
        raise BoundsError("tau grid must be strictly increasing")
    worst = float(max(0.0, np.max(np.diff(e, axis=-1))))
    return DecayVerdict(worst <= DECAY_TOL, worst)


@dataclass(frozen=True)
class AsymptoticReport:
    low_temperature: float
    low_value: float
    slope: float
    expected_slope: float
    low_threshold: float = 1e-8
    slope_rel_tol: float = 0.02

    @property
    def low_ok(self) -> bool:
        return self.low_value < self.low_threshold

    @property
    def slope_ok(self) -> bool:
        return abs(self.slope - self.expected_slope) <= self.slope_rel_tol * self.expected_slope

    @property
    def passed(self) -> bool:
        return self.low_ok and self.slope_ok


def asymptotic_check(
    distortion: Callable[[float], float],
    n_modes: int,
    low_temperature: float = 1e-12,
    high_temperatures: Sequence[float] | None = None,
) -> AsymptoticReport:
    """Check vanishing distortion as T -> 0 and log growth with slope ``n_modes/2``."""
    if not 0 < low_temperature <= 1e-6:
        raise BoundsError("low temperature must lie in (0, 1e-6]")
    if high_temperatures is None:
        high_temperatures = np.logspace(3, 6, 31)
    grid = np.asarray(high_temperatures, dtype=float)
    if grid.size < 3 or np.any(grid <= 0) or np.log10(grid.max() / grid.min()) < 3 - 1e-9:
        raise BoundsError("high-temperature grid must have >= 3 points spanning >= 3 decades")
    slope = high_temperature_slope(grid, [distortion(t) for t in grid])
    return AsymptoticReport(low_temperature, float(distortion(low_temperature)), slope, n_modes / 2)
