"""Low-complexity direction-of-arrival estimators for large uniform linear arrays."""

from .analytics import ComplexityModel, CrlbInputs, crlb_psac, fisher_crlb, flops, rmse
from .array_model import (ArrayConfig, SnapshotMatrix, steering_derivative, steering_vector,
                          synthesize)
from .errors import (ConvergenceError, DegenerateSpectrumError, DoaError, DomainError,
                     EstimationError, IndefiniteMatrixError)
from .estimators import (DirectionEstimate, Method, ScaSettings, estimate,
                         estimate_full_root_music, estimate_pi_max_csca, estimate_psac,
                         estimate_pscc, objective_J, pscc_candidates, pscc_phase,
                         sca_derivatives, sca_refine)
from .root_music import music_polynomial, noise_subspace, root_music
from .spectral import (EigenPair, hermitian_evd, hermitian_sqrt, power_iteration,
                       pseudo_inverse, sample_covariance)

__version__ = "0.1.0"
