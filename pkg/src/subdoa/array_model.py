"""
Uniform linear array geometry and snapshot synthesis.

Element ``n`` (zero-based) sits at ``n * spacing`` with the phase reference at
the left edge, so the steering vector of a plane wave from ``theta`` is

    a_n(theta) = exp(j 2 pi n d sin(theta) / lambda).

Angles are radians throughout; degrees only appear at the CLI boundary.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ArrayConfig:
    """ULA of ``n_total`` elements split into ``k_subarrays`` contiguous blocks.

    Parameters
    ----------
    n_total : int
        Number of antennas N.
    k_subarrays : int
        Number of subarrays K. ``n_total`` must equal ``k_subarrays * m_per_subarray``.
    m_per_subarray : int
        Antennas per subarray M.
    n_init : int
        Size N0 of the leading subarray used for the coarse PI-Max-CSCA estimate.
    spacing : float
        Element spacing d, in the same unit as ``wavelength``.
    wavelength : float
        Carrier wavelength.
    """

    n_total: int
    k_subarrays: int = 1
    m_per_subarray: Optional[int] = None
    n_init: Optional[int] = None
    spacing: float = 0.5
    wavelength: float = 1.0

    def __post_init__(self):
        if self.m_per_subarray is None:
            if self.k_subarrays < 1 or self.n_total % self.k_subarrays:
                raise ValueError(f"N={self.n_total} is not divisible by K={self.k_subarrays}")
            object.__setattr__(self, "m_per_subarray", self.n_total // self.k_subarrays)
        if self.n_init is None:
            object.__setattr__(self, "n_init", self.m_per_subarray)
        for name in ("n_total", "k_subarrays", "m_per_subarray", "n_init"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.n_total != self.k_subarrays * self.m_per_subarray:
            raise ValueError(
                f"N={self.n_total} != K*M={self.k_subarrays}*{self.m_per_subarray}")
        if self.n_init > self.n_total:
            raise ValueError(f"n_init={self.n_init} exceeds n_total={self.n_total}")
        if self.spacing <= 0 or self.wavelength <= 0:
            raise ValueError("spacing and wavelength must be positive")

    @property
    def alpha(self):
        """Fraction N0/N of the array used for the initial estimate."""
        return self.n_init / self.n_total

    @property
    def electrical_scale(self):
        """``2 pi d / lambda``: phase step between neighbours per unit sin(theta)."""
        return 2.0 * np.pi * self.spacing / self.wavelength

    def positions(self, count=None):
        """Element positions ``d_m = m * spacing`` for ``m = 0..count-1``."""
        count = self.n_total if count is None else count
        return np.arange(count) * self.spacing

    def subarray_rows(self, k):
        """Row slice of subarray ``k`` (zero-based)."""
        if not 0 <= k < self.k_subarrays:
            raise IndexError(f"subarray index {k} out of range for K={self.k_subarrays}")
        m = self.m_per_subarray
        return slice(k * m, (k + 1) * m)


@dataclass(frozen=True)
class SnapshotMatrix:
    """N x L received samples together with the ground truth that generated them."""

    samples: np.ndarray
    true_theta: float
    snr_db: float
    seed: int
    config: ArrayConfig
    noiseless: bool = field(default=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[1] < 1:
            raise ValueError("samples must be an N x L matrix with L >= 1")
        if samples.shape[0] != self.config.n_total:
            raise ValueError(
                f"samples have {samples.shape[0]} rows, config expects {self.config.n_total}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def l_snapshots(self):
        return self.samples.shape[1]

    def subarray(self, k):
        """Rows of subarray ``k`` (zero-based) as an M x L block."""
        return self.samples[self.config.subarray_rows(k)]


def _check_theta(theta):
    if not np.all(np.abs(theta) < np.pi / 2):
        raise DomainError(f"|theta| must be below pi/2, got {theta!r}")


def steering_vector(theta, count, start_index=0, config=None):
    """Steering vector entries ``start_index .. start_index+count-1``.

    Parameters
    ----------
    theta : float
        Direction in radians, ``|theta| < pi/2``.
    count : int
        Number of elements.
    start_index : int
        Index of the first element; ``(k-1)M`` gives the manifold of subarray k
        with its global phase offset.
    config : ArrayConfig, optional
        Supplies spacing and wavelength (defaults: d = 0.5, lambda = 1).

    Returns
    -------
    np.ndarray
        Complex vector of unit-modulus entries.
    """
    _check_theta(theta)
    if count < 1 or start_index < 0:
        raise ValueError("count must be >= 1 and start_index >= 0")
    scale = _scale(config)
    n = np.arange(start_index, start_index + count)
    return np.exp(1j * scale * n * np.sin(theta))


def steering_derivative(theta, count, config=None):
    """Derivative of ``steering_vector(theta, count, 0)`` with respect to theta.

    Equals ``j (2 pi / lambda) cos(theta) D a(theta)`` with ``D = diag(d_m)``.
    """
    _check_theta(theta)
    config = config or ArrayConfig(count)
    d = np.arange(count) * config.spacing
    a = steering_vector(theta, count, 0, config)
    return 1j * (2.0 * np.pi / config.wavelength) * np.cos(theta) * d * a


def _scale(config):
    if config is None:
        return np.pi
    return config.electrical_scale


def synthesize(config, theta, snr_db, l_snapshots=1, seed=0, noiseless=False,
               source="gaussian"):
    """Draw ``Y = a_N(theta) s + W`` for one emitter.

    Noise power is 1 and the source power is ``10**(snr_db/10)``.  With
    ``source="gaussian"`` the samples of ``s`` are circularly-symmetric complex
    Gaussian; ``source="unit-modulus"`` keeps ``|s|^2`` fixed at the nominal
    power and draws only a uniform phase.

    Parameters
    ----------
    config : ArrayConfig
    theta : float
        True direction in radians.
    snr_db : float
        Per-antenna SNR in dB. Ignored for the signal power when ``noiseless``
        is set and ``snr_db`` is infinite (unit source power is then used).
    l_snapshots : int
        Number of snapshots L >= 1.
    seed : int
        Non-negative 64-bit seed; identical seeds give bit-identical samples.
    noiseless : bool
        Drop the noise term.
    source : {"gaussian", "unit-modulus"}
        Source amplitude model.
    """
    if l_snapshots < 1:
        raise ValueError("l_snapshots must be >= 1")
    rng = np.random.default_rng(seed)
    power = 1.0 if np.isinf(snr_db) else 10.0 ** (snr_db / 10.0)
    if source == "gaussian":
        s = np.sqrt(power / 2.0) * (rng.standard_normal(l_snapshots)
                                    + 1j * rng.standard_normal(l_snapshots))
    elif source == "unit-modulus":
        s = np.sqrt(power) * np.exp(2j * np.pi * rng.random(l_snapshots))
    else:
        raise ValueError(f"unknown source model {source!r}")
    a = steering_vector(theta, config.n_total, 0, config)
    samples = np.outer(a, s)
    if not noiseless:
        shape = (config.n_total, l_snapshots)
        samples = samples + np.sqrt(0.5) * (rng.standard_normal(shape)
                                            + 1j * rng.standard_normal(shape))
    return SnapshotMatrix(samples, float(theta), float(snr_db), int(seed), config,
                          noiseless=noiseless)
