"""Eigendecomposition, heat kernels and diffusion-kernel feature maps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10


class SpectralError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors in the columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def source_dim(self) -> int:
        return self.eigenvectors.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


def eigendecompose(operator) -> Spectrum:
    """Dense symmetric eigendecomposition with a fixed sign convention.

    Each eigenvector is flipped so its first component of non-negligible
    magnitude is positive, which makes mode coefficients reproducible.
    """
    a = np.asarray(operator, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpectralError(f"operator must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SpectralError("operator has non-finite entries")
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise SpectralError("operator is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (a + a.T))
    if vecs.size:
        tol = 1e-12 * max(1.0, float(np.max(np.abs(vecs))))
        first = np.argmax(np.abs(vecs) > tol, axis=0)
        signs = np.sign(vecs[first, np.arange(vecs.shape[1])])
        signs[signs == 0] = 1.0
        vecs = vecs * signs
    return Spectrum(vals, vecs)


def _check_node(spectrum: Spectrum, node: int) -> int:
    if not 0 <= node < spectrum.source_dim:
        raise SpectralError(f"node {node} out of range for dimension {spectrum.source_dim}")
    return int(node)


def _check_tau(tau: float) -> float:
    if tau < 0:
        raise SpectralError(f"tau must be nonnegative, got {tau}")
    return float(tau)


def diffusion_kernel(spectrum: Spectrum, tau: float) -> np.ndarray:
    """Heat kernel ``sum_i exp(-tau*lambda_i) u_i u_i^T``."""
    tau = _check_tau(tau)
    u = spectrum.eigenvectors
    k = (u * np.exp(-tau * spectrum.eigenvalues)) @ u.T
    return 0.5 * (k + k.T)


def feature_coefficients(spectrum: Spectrum, tau: float, node: int) -> np.ndarray:
    """Coordinates of the feature map of ``node`` in the eigenbasis.

    Entry ``i`` is ``exp(-tau*lambda_i/2) * u_i[node]``; inner products of
    these vectors reproduce the diffusion kernel.
    """
    tau = _check_tau(tau)
    node = _check_node(spectrum, node)
    return np.exp(-0.5 * tau * spectrum.eigenvalues) * spectrum.eigenvectors[node]


def mode_coefficients(spectrum: Spectrum, x: int, p: int) -> np.ndarray:
    """``U^T (e_x - e_p)``: projection of the output/prompt delta onto each mode."""
    x = _check_node(spectrum, x)
    p = _check_node(spectrum, p)
    if x == p:
        return np.zeros(spectrum.source_dim)
    return spectrum.eigenvectors[x] - spectrum.eigenvectors[p]


def rkhs_distance_sq(spectrum: Spectrum, tau: float, x: int, p: int) -> float:
    """Squared feature-space distance ``sum_i exp(-tau*lambda_i) <u_i, e_x - e_p>^2``."""
    tau = _check_tau(tau)
    dphi = mode_coefficients(spectrum, x, p)
    return float(np.sum(np.exp(-tau * spectrum.eigenvalues) * dphi**2))
