"""Cramer-Rao bound, RMSE and analytic FLOP counts."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .estimators import Method


@dataclass(frozen=True)
class CrlbInputs:
    """Inputs to the coherent-combiner bound.

    ``k_combined = 1`` gives the bound for a single ``m_elements`` subarray.
    """

    m_elements: int
    l_snapshots: int = 1
    snr_linear: float = 1.0
    theta: float = 0.0
    spacing: float = 0.5
    wavelength: float = 1.0
    k_combined: int = 1

    def __post_init__(self):
        if self.snr_linear <= 0:
            raise ValueError("snr_linear must be positive")
        if self.k_combined < 1 or self.m_elements < 2 or self.l_snapshots < 1:
            raise ValueError("need k_combined >= 1, m_elements >= 2, l_snapshots >= 1")


def position_spread(m_elements, spacing=0.5):
    """Sum of squared mean-centred element positions, ``d^2 M (M^2 - 1) / 12``."""
    d = np.arange(m_elements) * spacing
    return float(np.sum((d - d.mean()) ** 2))


def crlb_psac(inputs):
    """Variance bound ``lambda^2 / (8 pi^2 K L SNR cos^2(theta) dbar^2)`` in rad^2.

    Raises
    ------
    DomainError
        When ``cos(theta)`` vanishes and the bound diverges.
    """
    c2 = math.cos(inputs.theta) ** 2
    if c2 < 1e-30 or abs(inputs.theta) >= math.pi / 2:
        raise DomainError("CRLB diverges at |theta| = pi/2")
    spread = position_spread(inputs.m_elements, inputs.spacing)
    return inputs.wavelength ** 2 / (
        8 * math.pi ** 2 * inputs.k_combined * inputs.l_snapshots * inputs.snr_linear
        * c2 * spread)


def crlb_full(config, snr_db, theta, l_snapshots=1):
    """Bound for one unpartitioned array of ``config.n_total`` elements."""
    return crlb_psac(CrlbInputs(config.n_total, l_snapshots, 10 ** (snr_db / 10), theta,
                                config.spacing, config.wavelength, 1))


def fisher_crlb(m_elements, snr_linear, theta, l_snapshots=1, spacing=0.5, wavelength=1.0,
                h=1e-6):
    """Numerical CRB on theta for ``y = a(theta) s + w`` with unknown complex ``s``.

    Builds the 3x3 Fisher information over (theta, Re s, Im s) for
    ``L`` snapshots with ``|s|^2 = snr_linear`` and unit noise power, using a
    central difference for ``da/dtheta``, and returns ``inv(F)[0, 0]``.
    """
    n = np.arange(m_elements) * spacing

    def a(t):
        return np.exp(2j * np.pi * n * np.sin(t) / wavelength)

    s = math.sqrt(snr_linear)
    cols = [s * (a(theta + h) - a(theta - h)) / (2 * h), a(theta), 1j * a(theta)]
    G = np.stack(cols, axis=1)
    F = 2.0 * l_snapshots * np.real(G.conj().T @ G)
    return float(np.linalg.inv(F)[0, 0])


@dataclass(frozen=True)
class ComplexityModel:
    method: Method
    n_total: int
    k_subarrays: int = 1
    m_per_subarray: int = 1
    n_init: int = 1
    l_snapshots: int = 1
    beta_pi: int = 1

    def __post_init__(self):
        counts = (self.n_total, self.k_subarrays, self.m_per_subarray, self.n_init,
                  self.l_snapshots, self.beta_pi)
        if min(counts) < 1:
            raise ValueError("all counts must be positive")


def flops(model):
    """FLOP count of one estimate.

    ======================  ==================================================
    root-music (full)       N^3 - N^2 + N L (2N + 1)
    PSAC                    K (M^3 - M^2 + M L (2M + 1))
    PSCC                    M^3 - M^2 + M L (2M + 1) + K (K - 1) / 2 M^3
    PI-Max-CSCA             N0^3 - N0^2 + N0 L (2 N0 + 1) + N L (1 + 2N)
                            + (beta - 1) N^2
    ======================  ==================================================

    The PSCC count carries a single ACM term, as published.
    """
    method = Method(model.method)
    N, K, M = model.n_total, model.k_subarrays, model.m_per_subarray
    N0, L, beta = model.n_init, model.l_snapshots, model.beta_pi

    def evd_cost(m):
        return m ** 3 - m ** 2 + m * L * (2 * m + 1)

    if method is Method.ROOT_MUSIC_FULL:
        return evd_cost(N)
    if method is Method.PSAC:
        return K * evd_cost(M)
    if method is Method.PSCC:
        return evd_cost(M) + K * (K - 1) // 2 * M ** 3
    return evd_cost(N0) + N * L * (1 + 2 * N) + (beta - 1) * N ** 2


def rmse(estimates, truth):
    """Root mean squared error of ``estimates`` around ``truth``."""
    est = np.asarray(estimates, dtype=float)
    if est.size == 0:
        raise ValueError("rmse of an empty sample")
    return float(np.sqrt(np.mean((est - truth) ** 2)))
