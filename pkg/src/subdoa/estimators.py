"""
Single-emitter DOA estimators for large ULAs.

* ``estimate_full_root_music``: Root-MUSIC on the whole array (reference).
* ``estimate_psac``: per-subarray Root-MUSIC, averaged over the K subarrays.
* ``estimate_pscc``: phase of subarray cross-covariances, disambiguated by the
  PSAC estimate and averaged over all K(K-1)/2 subarray pairs.
* ``estimate_pi_max_csca``: Root-MUSIC on the first N0 antennas seeds a power
  iteration on the full covariance; the resulting signal vector ``V_s`` is then
  matched against the manifold by Newton ascent on ``J = |V_s^H a(theta)|^2``.
"""

import enum
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .array_model import steering_vector
from .errors import ConvergenceError, DoaError, DomainError, EstimationError
from .root_music import root_music
from .spectral import (cross_covariance, hermitian_sqrt, power_iteration,
                       pseudo_inverse, sample_covariance)

_EDGE = math.pi / 2 - 1e-6


class Method(str, enum.Enum):
    ROOT_MUSIC_FULL = "root-music"
    PSAC = "psac"
    PSCC = "pscc"
    PI_MAX_CSCA = "pi-max-csca"


@dataclass(frozen=True)
class DirectionEstimate:
    theta: float
    method: Method
    iterations_pi: Optional[int] = None
    iterations_sca: Optional[int] = None
    candidates: Optional[List[float]] = None
    per_subarray: Optional[List[float]] = None

    @property
    def theta_deg(self):
        return math.degrees(self.theta)


@dataclass(frozen=True)
class ScaSettings:
    """Newton-ascent controls.

    ``epsilon=None`` means ``1e-6 * J(theta_0)``, fixed once the objective at the
    starting point is known.
    """

    epsilon: Optional[float] = None
    max_iter: int = 50
    step_clip: float = math.radians(2.0)
    max_backtracks: int = 30

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.step_clip <= 0:
            raise ValueError("step_clip must be positive")


# -- baseline and PSAC ------------------------------------------------------

def estimate_full_root_music(Y):
    """Root-MUSIC with ``q = 1`` on the sample covariance of all N antennas."""
    try:
        theta = root_music(sample_covariance(Y.samples), 1, Y.config)[0]
    except (DoaError, np.linalg.LinAlgError) as err:
        raise EstimationError("root-music", str(err)) from err
    return DirectionEstimate(theta, Method.ROOT_MUSIC_FULL)


def estimate_psac(Y):
    """Average of the K per-subarray Root-MUSIC estimates.

    Subarrays whose Root-MUSIC fails are left out of the average.
    """
    config = Y.config
    per_subarray = []
    for k in range(config.k_subarrays):
        try:
            per_subarray.append(root_music(sample_covariance(Y.subarray(k)), 1, config)[0])
        except (DoaError, np.linalg.LinAlgError):
            continue
    if not per_subarray:
        raise EstimationError("psac", "Root-MUSIC failed on every subarray")
    theta = math.fsum(per_subarray) / len(per_subarray)
    return DirectionEstimate(theta, Method.PSAC, per_subarray=per_subarray)


# -- PSCC --------------------------------------------------------------------

def pscc_phase(Yk, Yki, pinv_tol=1e-10):
    """Trace of ``pinv(R_{k,k+i}) R_k^{1/2} (R_{k+i}^{1/2})^H``.

    For one noiseless source its phase is ``2 pi i M d sin(theta) / lambda``.

    Raises
    ------
    DegenerateSpectrumError-like EstimationError
        If the trace vanishes (``|z| < 1e-12``).
    """
    Yk = np.asarray(Yk, dtype=complex)
    Yki = np.asarray(Yki, dtype=complex)
    if Yk.shape[0] != Yki.shape[0]:
        raise ValueError("subarray blocks must have the same number of rows")
    ccm = cross_covariance(Yk, Yki)
    acm = hermitian_sqrt(sample_covariance(Yk)) @ hermitian_sqrt(sample_covariance(Yki)).conj().T
    z = np.trace(pseudo_inverse(ccm, pinv_tol) @ acm)
    if abs(z) < 1e-12:
        raise EstimationError("pscc", "cross-covariance phase is undefined (|z| ~ 0)")
    return complex(z)


def pscc_candidates(z, i, config):
    """Every ``arcsin(lambda (arg z + 2 pi j) / (2 pi i M d))`` with a real value.

    Scans all integers ``j`` for which the arcsin argument lies in [-1, 1], so
    both positive and negative directions are reachable.
    """
    if abs(z) == 0:
        raise ValueError("z must be nonzero")
    period = 2.0 * math.pi * i * config.m_per_subarray * config.spacing / config.wavelength
    phase = float(np.angle(z))
    j_lo = math.ceil((-period - phase) / (2 * math.pi))
    j_hi = math.floor((period - phase) / (2 * math.pi))
    u = (phase + 2 * math.pi * np.arange(j_lo, j_hi + 1)) / period
    u = u[np.abs(u) <= 1.0]
    assert u.size, "phase wrap admits no real direction"
    return sorted(float(t) for t in np.arcsin(u))


def subarray_pairs(k_subarrays):
    """All ``(k, k+i)`` with ``0 <= k < k+i < K``, ordered by k then offset."""
    return [(k, k + i) for k in range(k_subarrays) for i in range(1, k_subarrays - k)]


def estimate_pscc(Y, coarse=None):
    """Cross-covariance combining over all subarray pairs.

    Parameters
    ----------
    Y : SnapshotMatrix
    coarse : DirectionEstimate, optional
        A PSAC estimate of ``Y`` to reuse; computed when omitted.
    """
    config = Y.config
    if config.k_subarrays < 2:
        raise EstimationError("pscc", "needs at least two subarrays")
    coarse = coarse or estimate_psac(Y)
    picks = []
    first_candidates = None
    for k, ki in subarray_pairs(config.k_subarrays):
        try:
            z = pscc_phase(Y.subarray(k), Y.subarray(ki))
        except (DoaError, np.linalg.LinAlgError):
            continue
        cands = pscc_candidates(z, ki - k, config)
        if first_candidates is None:
            first_candidates = cands
        picks.append(min(cands, key=lambda t: abs(t - coarse.theta)))
    if not picks:
        raise EstimationError("pscc", "every subarray pair was degenerate")
    theta = math.fsum(picks) / len(picks)
    return DirectionEstimate(theta, Method.PSCC, candidates=first_candidates,
                             per_subarray=coarse.per_subarray)


# -- PI-Max-CSCA ---------------------------------------------------------------

def objective_J(theta, Vs, config):
    """``|V_s^H a_N(theta)|^2``."""
    Vs = np.asarray(Vs, dtype=complex).ravel()
    a = steering_vector(theta, Vs.size, 0, config)
    return float(abs(np.vdot(Vs, a)) ** 2)


def _imag_check(value, name, rtol=1e-9):
    if abs(value.imag) > rtol * max(abs(value.real), np.finfo(float).tiny) and abs(value.imag) > 1e-300:
        raise ArithmeticError(f"{name} has imaginary part {value.imag:.3e} (real {value.real:.3e})")
    return float(value.real)


def sca_derivatives(theta, Vs, config):
    """Objective and its first two derivatives in theta.

    With ``D = diag(d_m)`` and the quadratic forms

    ``A = a^H Vs Vs^H D a``, ``B = a^H D Vs Vs^H a``, ``C = a^H D Vs Vs^H D a``,
    ``D2 = a^H D^2 Vs Vs^H a``, ``E = a^H Vs Vs^H D^2 a``, ``k = 2 pi / lambda``:

    ``J'  = j k cos(t) (A - B)``
    ``J'' = j k sin(t) (B - A) + 2 k^2 cos^2(t) C - k^2 cos^2(t) (D2 + E)``

    The first term of ``J''`` comes from ``d cos(t) / dt = -sin(t)`` and carries
    no extra ``cos(t)`` factor.

    Returns
    -------
    (J, J1, J2) : tuple of float
    """
    Vs = np.asarray(Vs, dtype=complex).ravel()
    a = steering_vector(theta, Vs.size, 0, config)
    d = config.positions(Vs.size)
    # every form is a product of two inner products with Vs
    p0 = np.vdot(Vs, a)               # Vs^H a
    p1 = np.vdot(Vs, d * a)           # Vs^H D a
    p2 = np.vdot(Vs, d * d * a)       # Vs^H D^2 a
    A = np.conj(p0) * p1
    B = np.conj(p1) * p0
    C = np.conj(p1) * p1
    D2 = np.conj(p2) * p0
    E = np.conj(p0) * p2
    k = 2.0 * math.pi / config.wavelength
    c, s = math.cos(theta), math.sin(theta)
    J = abs(p0) ** 2
    J1 = 1j * k * c * (A - B)
    J2 = 1j * k * s * (B - A) + 2 * k * k * c * c * C - k * k * c * c * (D2 + E)
    return float(J), _imag_check(J1, "J'"), _imag_check(J2, "J''")


def _clamp(theta):
    return min(max(theta, -_EDGE), _EDGE)


def sca_refine(theta0, Vs, settings=None, config=None, trace=None):
    """Maximize ``J(theta) = |V_s^H a(theta)|^2`` by safeguarded Newton steps.

    Each step is ``-J'/J''``. If ``J'' >= 0`` or the step exceeds
    ``settings.step_clip``, the step becomes ``sign(J') * step_clip``. A step
    that lowers J is halved until it does not (at most ``max_backtracks``
    times). Iteration stops once ``|J(theta_n) - J(theta_{n-1})| < epsilon``.

    Parameters
    ----------
    trace : list, optional
        If given, each iterate ``theta_n`` (including ``theta0``) is appended.

    Returns
    -------
    theta : float
    iterations : int
        Number of Newton steps taken.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` steps; ``err.result`` is the best iterate.
    """
    settings = settings or ScaSettings()
    if not abs(theta0) < math.pi / 2:
        raise DomainError("theta0 must satisfy |theta0| < pi/2")
    theta = _clamp(float(theta0))
    J, J1, J2 = sca_derivatives(theta, Vs, config)
    eps = settings.epsilon if settings.epsilon is not None else 1e-6 * J
    if trace is not None:
        trace.append(theta)
    for n in range(1, settings.max_iter + 1):
        if J2 < 0 and J1 != 0:
            step = -J1 / J2
            if abs(step) > settings.step_clip:
                step = math.copysign(settings.step_clip, J1)
        elif J1 != 0:
            step = math.copysign(settings.step_clip, J1)
        else:
            step = 0.0
        new = _clamp(theta + step)
        J_new, J1_new, J2_new = sca_derivatives(new, Vs, config)
        for _ in range(settings.max_backtracks):
            if J_new >= J:
                break
            step *= 0.5
            new = _clamp(theta + step)
            J_new, J1_new, J2_new = sca_derivatives(new, Vs, config)
        else:
            if J_new < J:
                new, J_new, J1_new, J2_new = theta, J, J1, J2
        change = abs(J_new - J)
        theta, J, J1, J2 = new, J_new, J1_new, J2_new
        if trace is not None:
            trace.append(theta)
        if change < eps:
            return theta, n
    raise ConvergenceError(
        f"SCA did not settle within {settings.max_iter} steps", result=theta,
        iterations=settings.max_iter)


def estimate_pi_max_csca(Y, settings=None, pi_tol=1e-10, pi_max_iter=100):
    """Coarse Root-MUSIC on N0 antennas, power iteration, then Newton refinement."""
    config = Y.config
    n0 = config.n_init
    try:
        coarse = root_music(sample_covariance(Y.samples[:n0]), 1, config)[0]
    except (DoaError, np.linalg.LinAlgError) as err:
        raise EstimationError("initial root-music", str(err)) from err
    x0 = steering_vector(coarse, config.n_total, 0, config)
    R = sample_covariance(Y.samples)
    try:
        Vs, beta = power_iteration(R, x0, pi_tol, pi_max_iter)
    except ConvergenceError as err:
        # the last iterate is still the best available signal vector
        Vs, beta = err.result, err.iterations
    except ValueError as err:
        raise EstimationError("power iteration", str(err)) from err
    try:
        theta, n_sca = sca_refine(coarse, Vs, settings, config)
    except (ConvergenceError, DomainError, ArithmeticError) as err:
        raise EstimationError("sca", str(err)) from err
    return DirectionEstimate(theta, Method.PI_MAX_CSCA, iterations_pi=beta,
                             iterations_sca=n_sca, candidates=[coarse])


ESTIMATORS = {
    Method.ROOT_MUSIC_FULL: estimate_full_root_music,
    Method.PSAC: estimate_psac,
    Method.PSCC: estimate_pscc,
    Method.PI_MAX_CSCA: estimate_pi_max_csca,
}


def estimate(Y, method, sca=None):
    """Dispatch to the estimator for ``method``."""
    method = Method(method)
    if method is Method.PI_MAX_CSCA:
        return estimate_pi_max_csca(Y, sca)
    return ESTIMATORS[method](Y)
