"""Energy functionals, Gaussian partition functions and semantic distortion.

Everything is expressed through a :class:`~hallspec.spectral.Spectrum` of a
(multimodal) Laplacian: feature maps are diffusion-kernel coordinates, and
the hallucination energy is the damped mode energy carried by modes that
live outside the plausible node set.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.special import erf, erfc

from hallspec.graph import InteractionClass, MultimodalLaplacian
from hallspec.spectral import Spectrum, eigendecompose, feature_coefficients, mode_coefficients


class EnergyError(ValueError):
    pass


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise EnergyError(f"coefficient length mismatch: {a.shape} vs {b.shape}")
    return a, b


def intra_energy(coeffs_x, coeffs_p) -> float:
    """Squared feature-space distance between output and prompt."""
    cx, cp = _pair(coeffs_x, coeffs_p)
    return float(np.sum((cx - cp) ** 2))


def cross_energy(coeffs_x_m, coeffs_x_n, coeffs_p_m, coeffs_p_n) -> float:
    """Cross-modal alignment of the outputs, relative to the prompt's own alignment.

    Negative when the two output modalities agree better than the prompt does.
    """
    xm, xn = _pair(coeffs_x_m, coeffs_x_n)
    pm, pn = _pair(coeffs_p_m, coeffs_p_n)
    _pair(xm, pm)
    return float(-np.dot(xm, xn) + np.dot(pm, pn))


def joint_energy(coeffs_x: Mapping[str, np.ndarray], coeffs_p: Mapping[str, np.ndarray], anchored: bool = True) -> float:
    """Negative inner product of the elementary tensors of per-modality features.

    The tensor inner product factorizes into a product of per-modality inner
    products.  With ``anchored`` the prompt self-product is added back, so a
    perfectly aligned output has zero joint energy.
    """
    if set(coeffs_x) != set(coeffs_p):
        raise EnergyError(f"modality sets differ: {sorted(coeffs_x)} vs {sorted(coeffs_p)}")
    cross = 1.0
    anchor = 1.0
    for m in sorted(coeffs_x):
        cx, cp = _pair(coeffs_x[m], coeffs_p[m])
        cross *= float(np.dot(cx, cp))
        anchor *= float(np.dot(cp, cp))
    raw = -cross
    return raw + anchor if anchored else raw


@dataclass(frozen=True)
class EnergyBreakdown:
    intra: dict[str, float] = field(default_factory=dict)
    cross: dict[tuple[str, str], float] = field(default_factory=dict)
    joint: float = 0.0

    @property
    def total(self) -> float:
        return math.fsum(list(self.intra.values()) + list(self.cross.values()) + [self.joint])


def energy_breakdown(
    laplacian: MultimodalLaplacian,
    tau: float,
    outputs: Mapping[str, int],
    prompt: int,
    anchored: bool = True,
) -> EnergyBreakdown:
    """Intra, cross and joint energies of a multimodal output against a prompt.

    ``outputs`` maps each modality to the node carrying that part of the
    output.  Every term uses the feature map of its own interaction-class
    block; a class without edges has a zero block and so an identity kernel.
    Cross and joint terms only exist when at least two modalities are present.
    """
    spectra: dict[InteractionClass, Spectrum] = {}

    def features(cls: InteractionClass, node: int) -> np.ndarray:
        if cls not in spectra:
            spectra[cls] = eigendecompose(laplacian.block(cls))
        return feature_coefficients(spectra[cls], tau, node)

    mods = sorted(outputs, key="TVA".index)
    intra = {}
    for m in mods:
        cls = InteractionClass.intra(m)
        intra[m] = intra_energy(features(cls, outputs[m]), features(cls, prompt))
    cross = {}
    for a, b in itertools.combinations(mods, 2):
        cls = InteractionClass.cross(a, b)
        cross[(a, b)] = cross_energy(
            features(cls, outputs[a]), features(cls, outputs[b]),
            features(cls, prompt), features(cls, prompt),
        )
    joint = 0.0
    if len(mods) >= 2:
        cls = InteractionClass.joint()
        fp = features(cls, prompt)
        joint = joint_energy({m: features(cls, outputs[m]) for m in mods}, {m: fp for m in mods}, anchored)
    return EnergyBreakdown(intra, cross, joint)


def mode_weights(spectrum: Spectrum, node_w) -> np.ndarray:
    """Project per-node weights onto each mode: ``w_i = sum_v u_i(v)^2 * node_w(v)``."""
    node_w = np.asarray(node_w, dtype=float)
    if node_w.shape != (spectrum.source_dim,):
        raise EnergyError("node weights must have one entry per node")
    if np.any(node_w < 0):
        raise EnergyError("node weights must be nonnegative")
    return (spectrum.eigenvectors**2).T @ node_w


def _weights(weights, n: int) -> np.ndarray:
    w = np.broadcast_to(np.asarray(weights, dtype=float), (n,))
    if np.any(w < 0):
        raise EnergyError("mode weights must be nonnegative")
    return w


def total_spectral_energy(spectrum: Spectrum, weights, tau: float, x: int, p: int) -> float:
    """``sum_i w_i exp(-tau*lambda_i) dphi_i^2`` over every mode."""
    w = _weights(weights, spectrum.source_dim)
    dphi = mode_coefficients(spectrum, x, p)
    return float(np.sum(w * np.exp(-tau * spectrum.eigenvalues) * dphi**2))


def hallucination_energy_modes(
    spectrum: Spectrum, hallucinated_modes: Iterable[int], weights, tau: float, x: int, p: int
) -> float:
    """Damped mode energy restricted to the hallucinated modes."""
    n = spectrum.source_dim
    modes = sorted(set(int(i) for i in hallucinated_modes))
    if any(not 0 <= i < n for i in modes):
        raise EnergyError(f"mode index out of range for {n} modes")
    w = _weights(weights, n)
    dphi = mode_coefficients(spectrum, x, p)
    idx = np.array(modes, dtype=int)
    return float(np.sum(w[idx] * np.exp(-tau * spectrum.eigenvalues[idx]) * dphi[idx] ** 2))


def pad_spectrum(eigenvalues, n: int) -> np.ndarray:
    """Zero-pad a restricted spectrum to ``n`` modes, ascending."""
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size > n:
        raise EnergyError(f"cannot pad {lam.size} eigenvalues down to {n}")
    return np.sort(np.concatenate([lam, np.zeros(n - lam.size)]))


def hallucination_energy_rayleigh(lambda_x, lambda_k_padded, delta_phi, tau: float) -> float:
    """Normalized quadratic form of ``exp(-tau*Lx) - exp(-tau*Lk)`` at ``delta_phi``."""
    lx = np.asarray(lambda_x, dtype=float)
    lk = np.asarray(lambda_k_padded, dtype=float)
    v = np.asarray(delta_phi, dtype=float)
    if not lx.shape == lk.shape == v.shape:
        raise EnergyError("eigenvalue vectors and delta_phi must have equal length")
    norm_sq = float(np.dot(v, v))
    if norm_sq == 0:
        raise EnergyError("delta_phi is zero")
    diag = np.exp(-tau * lx) - np.exp(-tau * lk)
    return float(np.dot(diag * v, v) / norm_sq)


def assign_modes_to_hallucination_region(
    spectrum: Spectrum, plausible_nodes: Iterable[int], threshold: float = 0.5
) -> list[int]:
    """Modes whose squared eigenvector mass outside the plausible set exceeds ``threshold``.

    The comparison carries a 1e-12 slack, so ``threshold=1.0`` selects exactly
    the modes with no mass on the plausible set.
    """
    n = spectrum.source_dim
    plausible = sorted(set(int(v) for v in plausible_nodes))
    if not plausible or len(plausible) >= n:
        raise EnergyError("plausible set must be a nonempty proper subset of the nodes")
    if plausible[0] < 0 or plausible[-1] >= n:
        raise EnergyError("plausible node out of range")
    if not 0 < threshold <= 1:
        raise EnergyError(f"threshold must lie in (0, 1], got {threshold}")
    outside = np.ones(n, dtype=bool)
    outside[plausible] = False
    mass = np.sum(spectrum.eigenvectors[outside] ** 2, axis=0)
    return [int(i) for i in np.flatnonzero(mass > threshold - 1e-12)]


@dataclass(frozen=True, eq=False)
class ModeMass:
    eta: np.ndarray
    w: np.ndarray
    tau: float


def mode_mass(eigenvalues, weights, tau: float) -> ModeMass:
    """``eta_i = exp(-tau*lambda_i) * w_i``."""
    lam = np.asarray(eigenvalues, dtype=float)
    w = _weights(weights, lam.size).copy()
    return ModeMass(np.exp(-tau * lam) * w, w, float(tau))


@dataclass(frozen=True, eq=False)
class PlausibilityBand:
    """Per-mode half-widths ``c_i``; ``inf`` leaves a mode unconstrained."""

    c: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        if np.any(~(c > 0)):
            raise EnergyError("band half-widths must be positive")
        object.__setattr__(self, "c", c)

    @classmethod
    def uniform(cls, n: int, c: float = 1.0) -> "PlausibilityBand":
        return cls(np.full(n, float(c)))


def log_erf(z) -> np.ndarray:
    """``log(erf(z))`` for ``z > 0``, accurate as ``erf(z) -> 1``."""
    z = np.asarray(z, dtype=float)
    big = z > 0.5
    out = np.empty_like(z)
    out[big] = np.log1p(-erfc(z[big]))
    with np.errstate(divide="ignore"):
        out[~big] = np.log(erf(z[~big]))
    return out


def _check_temperature(temperature: float) -> None:
    if not temperature > 0:
        raise EnergyError(f"temperature must be positive, got {temperature}")


def _mass_and_band(mass: ModeMass, band: PlausibilityBand) -> tuple[np.ndarray, np.ndarray]:
    eta = mass.eta
    c = np.broadcast_to(band.c, eta.shape) if band.c.size == 1 else band.c
    if c.shape != eta.shape:
        raise EnergyError("band and mode mass differ in length")
    if np.any(~(eta > 0)):
        raise EnergyError("mode masses must be positive")
    return eta, c


def semantic_distortion_closed(mass: ModeMass, band: PlausibilityBand, temperature: float) -> float:
    """``-sum_i log erf(c_i * sqrt(eta_i / T))``, i.e. ``-log det`` of the erf diagonal."""
    _check_temperature(temperature)
    eta, c = _mass_and_band(mass, band)
    z = c * np.sqrt(eta / temperature)
    return float(max(0.0, -math.fsum(log_erf(z))))


class GaussianLogPartition(NamedTuple):
    value: float
    excluded: int


def log_partition_gaussian(eigenvalues, weights, tau: float, temperature: float) -> GaussianLogPartition:
    """Mode-decoupled Gaussian log-partition ``1/2 sum_i log(pi*T / (w_i exp(-tau*lambda_i)))``.

    Modes with ``w_i == 0`` have a divergent integral and are left out; their
    count is returned alongside the value.
    """
    _check_temperature(temperature)
    lam = np.asarray(eigenvalues, dtype=float)
    w = _weights(weights, lam.size)
    keep = w > 0
    terms = np.log(np.pi * temperature) - np.log(w[keep]) + tau * lam[keep]
    return GaussianLogPartition(0.5 * math.fsum(terms), int(np.count_nonzero(~keep)))


def log_partition_modes(mass: ModeMass, temperature: float, band: PlausibilityBand | None = None) -> float:
    """Per-mode Gaussian integrals over the whole line, or over ``[-c_i, c_i]``."""
    _check_temperature(temperature)
    eta = mass.eta
    if np.any(~(eta > 0)):
        raise EnergyError("mode masses must be positive")
    terms = 0.5 * np.log(np.pi * temperature / eta)
    if band is not None:
        eta, c = _mass_and_band(mass, band)
        terms = terms + log_erf(c * np.sqrt(eta / temperature))
    return math.fsum(terms)


class FreeEnergyGap(NamedTuple):
    d_sem: float
    free_energy: float


def free_energy_gap(log_z_x: float, log_z_k: float, temperature: float) -> FreeEnergyGap:
    """Distortion ``log Z_X - log Z_K`` and the free-energy difference ``T * d_sem``."""
    _check_temperature(temperature)
    d = float(log_z_x - log_z_k)
    return FreeEnergyGap(d, temperature * d)


def high_temperature_slope(temperatures: Sequence[float], distortions: Sequence[float]) -> float:
    """Least-squares slope of distortion against ``log T``."""
    t = np.asarray(temperatures, dtype=float)
    d = np.asarray(distortions, dtype=float)
    if t.size < 3 or t.shape != d.shape:
        raise EnergyError("need at least 3 matching (temperature, distortion) samples")
    if np.any(t <= 0):
        raise EnergyError("temperatures must be positive")
    slope, _ = np.polyfit(np.log(t), d, 1)
    return float(slope)
