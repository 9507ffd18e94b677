"""Mapped Fourier basis on the real line: the cot map, midpoint nodes on
(0, pi), the rational basis functions, and the phase-corrected DFT pair.

Mode ordering follows the DFT convention throughout: k = 0..ceil(N/2)-1
followed by k = -floor(N/2)..-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KRASNY_EPS = 2.0 ** -52


@dataclass(frozen=True)
class SpectralGrid:
    """N midpoint nodes s_j = pi(2j+1)/(2N) on (0, pi) and their images
    x_j = L cot(s_j), which decrease from large positive to large negative."""

    n: int
    l_scale: float
    s_nodes: np.ndarray
    x_nodes: np.ndarray

    def __post_init__(self):
        self.s_nodes.setflags(write=False)
        self.x_nodes.setflags(write=False)


@dataclass(frozen=True)
class CoeffVector:
    """N complex coefficients in DFT mode order."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.coeffs)


def mode_numbers(n: int) -> np.ndarray:
    """Integer mode indices in DFT order: 0..ceil(n/2)-1, -floor(n/2)..-1."""
    k = np.empty(n, dtype=np.int64)
    half_up = (n + 1) // 2
    k[:half_up] = np.arange(half_up)
    k[half_up:] = np.arange(-(n // 2), 0)
    return k


def arccot(x):
    """arccot with values in (0, pi), computed as pi/2 - arctan."""
    return math.pi / 2.0 - np.arctan(x)


def make_grid(n: int, l_scale: float) -> SpectralGrid:
    """Build the N-node grid for map scale L."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if not l_scale > 0.0:
        raise ValueError(f"map scale must be positive, got {l_scale}")
    j = np.arange(n, dtype=np.float64)
    s = math.pi * (2.0 * j + 1.0) / (2.0 * n)
    x = l_scale / np.tan(s)
    # cot(pi - s) = -cot(s): mirror the first half so the antisymmetry
    # x[n-1-j] = -x[j] holds exactly, not just to roundoff.
    half = n // 2
    x[n - half :] = -x[half - 1 :: -1]
    if n % 2:
        x[half] = 0.0
    return SpectralGrid(n=n, l_scale=float(l_scale), s_nodes=s, x_nodes=x)


def lambda_k(x, k: int, l_scale: float = 1.0):
    """Rational basis function ((ix - L)/(ix + L))^k.

    The base has unit modulus, so it is evaluated in polar form
    exp(i 2k atan2(L, x)), which stays exact for any |k|.
    """
    theta = np.arctan2(l_scale, x)
    return np.exp(2j * k * theta)


def phi_k(x, k: int):
    """Half-index variant ((ix - 1)/(ix + 1))^(k/2) = exp(i k arccot(x))."""
    theta = np.arctan2(1.0, x)
    return np.exp(1j * k * theta)


def mu_k(x, k: int):
    """(ix - 1)^k / (ix + 1)^(k+1), identically (lambda_k - lambda_{k+1})/2."""
    return 0.5 * (lambda_k(x, k) - lambda_k(x, k + 1))


def analyze(samples, grid: SpectralGrid, krasny_eps: float = KRASNY_EPS) -> CoeffVector:
    """Coefficients u_k = (exp(-i pi k / N) / N) * DFT(samples), with entries
    of magnitude <= krasny_eps zeroed."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n,):
        raise ValueError(
            f"expected {grid.n} samples, got shape {samples.shape}"
        )
    n = grid.n
    k = mode_numbers(n)
    coeffs = np.fft.fft(samples) * np.exp(-1j * math.pi * k / n) / n
    if krasny_eps > 0.0:
        coeffs[np.abs(coeffs) <= krasny_eps] = 0.0
    return CoeffVector(coeffs=coeffs)


def synthesize(coeffs: CoeffVector, s):
    """Evaluate sum_k u_k exp(i 2 k s) at arbitrary s in (0, pi)."""
    k = mode_numbers(coeffs.n)
    s_arr = np.asarray(s, dtype=np.float64)
    phases = np.exp(2j * np.multiply.outer(s_arr, k.astype(np.float64)))
    out = phases @ coeffs.coeffs
    if np.ndim(s) == 0:
        return complex(out)
    return out


def synthesize_nodes(coeffs: CoeffVector) -> np.ndarray:
    """Fast evaluation of the mode sum at the grid nodes via the inverse FFT."""
    n = coeffs.n
    k = mode_numbers(n)
    return np.fft.ifft(coeffs.coeffs * np.exp(1j * math.pi * k / n)) * n
