"""
Root-MUSIC for uniform linear arrays.

The MUSIC null spectrum ``a(theta)^H C a(theta)`` with ``C = U_N U_N^H`` is a
Laurent polynomial in ``z = exp(j 2 pi d sin(theta) / lambda)`` whose degree-k
coefficient is the sum of the k-th diagonal of ``C``. Its roots come in
conjugate-reciprocal pairs ``(z, 1/z*)``; signal roots sit closest to the unit
circle.
"""

import numpy as np

from .errors import DegenerateSpectrumError, DomainError
from .spectral import hermitian_evd

#: Relative eigenvalue gap below which the spectrum is considered flat.
DEGENERATE_GAP = 1e-10


def noise_subspace(R, q_sources=1):
    """Eigenvectors of the ``M - q`` smallest eigenvalues of ``R``."""
    M = np.shape(R)[0]
    if not 0 <= q_sources < M:
        raise ValueError(f"q_sources={q_sources} must lie in [0, {M})")
    return hermitian_evd(R).vectors[:, q_sources:]


def music_polynomial(R, q_sources=1):
    """Coefficients of ``z^(M-1) p(z)``, highest degree first (``np.roots`` order).

    Entry ``i`` holds the degree ``M-1-i`` Laurent coefficient, i.e. the sum of
    diagonal ``M-1-i`` of ``U_N U_N^H``. The result is conjugate-palindromic.

    Raises
    ------
    DegenerateSpectrumError
        If the ``q``-th and ``(q+1)``-th eigenvalues cannot be told apart.
    """
    values, vectors = hermitian_evd(R)
    M = len(values)
    if not 0 < q_sources < M:
        raise ValueError(f"q_sources={q_sources} must lie in [1, {M})")
    scale = max(abs(values[0]), np.finfo(float).tiny)
    if values[q_sources - 1] - values[q_sources] <= DEGENERATE_GAP * scale:
        raise DegenerateSpectrumError("no eigenvalue gap between signal and noise subspaces")
    Un = vectors[:, q_sources:]
    C = Un @ Un.conj().T
    return np.array([np.trace(C, offset=k) for k in range(M - 1, -M, -1)])


def iter_pair_roots(roots):
    """Yield ``(z, partner)`` per conjugate-reciprocal pair, nearest the unit circle first.

    Roots are ranked by ``| |z| - 1 |``; a root strictly inside beats its mirror
    image outside. ``partner`` is the remaining root closest to ``1/z*`` (None
    if there is none); it is consumed so a pair is never reported twice.
    """
    roots = np.asarray(roots, dtype=complex)
    roots = roots[roots != 0]
    order = np.argsort(np.abs(np.abs(roots) - 1.0), kind="stable")
    roots = roots[order]
    alive = np.ones(len(roots), dtype=bool)
    for i, z in enumerate(roots):
        if not alive[i]:
            continue
        alive[i] = False
        rest = np.flatnonzero(alive)
        partner = None
        if rest.size:
            j = rest[np.argmin(np.abs(roots[rest] - 1.0 / np.conj(z)))]
            alive[j] = False
            partner = roots[j]
        yield z, partner


def select_roots(roots, q_sources):
    """The ``q`` pair representatives closest to the unit circle."""
    out = []
    for z, _ in iter_pair_roots(roots):
        if len(out) == q_sources:
            break
        out.append(z)
    return np.array(out)


def pair_phase(z, partner=None):
    """Phase of a root pair.

    ``z`` and ``1/z*`` share one phase, so for a well-separated pair this is
    just ``arg(z)``. A double root on the unit circle splits under rounding
    into two roots ``exp(j(w +- e))`` with ``e ~ sqrt(eps)``; their mean phase
    recovers ``w`` to ``O(eps)``.
    """
    if partner is None:
        return float(np.angle(z))
    return float(np.angle(z) + 0.5 * np.angle(partner * np.conj(z)))


def root_to_angle(z, config=None, partner=None):
    """Map a root ``z`` to ``arcsin(lambda arg(z) / (2 pi d))``."""
    scale = np.pi if config is None else config.electrical_scale
    phase = pair_phase(z, partner)
    phase = (phase + np.pi) % (2 * np.pi) - np.pi
    u = phase / scale
    if abs(u) > 1.0:
        raise DomainError(f"root phase {np.angle(z):.4f} maps outside [-1, 1]")
    return float(np.arcsin(u))


def root_music(R, q_sources=1, config=None):
    """Root-MUSIC estimate of ``q_sources`` directions from covariance ``R``.

    Parameters
    ----------
    R : array_like
        M x M Hermitian covariance of a contiguous ULA block. A global phase
        common to all elements cancels in ``R``, so any subarray works.
    q_sources : int
        Number of sources, ``1 <= q < M``.
    config : ArrayConfig, optional
        Supplies ``d / lambda`` (default half-wavelength).

    Returns
    -------
    list of float
        Angles in radians, sorted ascending.
    """
    coeffs = music_polynomial(R, q_sources)
    roots = np.roots(coeffs)
    angles = []
    # an unmappable root falls through to the next-best one
    for z, partner in iter_pair_roots(roots):
        try:
            angles.append(root_to_angle(z, config, partner))
        except DomainError:
            continue
        if len(angles) == q_sources:
            break
    if len(angles) < q_sources:
        raise DomainError("too few roots map to valid angles")
    return sorted(angles)
