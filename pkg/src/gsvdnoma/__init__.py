"""Asymptotic GSV spectra of Rician MIMO channel pairs and GSVD-NOMA average rates."""

__version__ = "0.1.0"

from .errors import (ConfigError, DomainCrossesSupport, GsvdNomaError, NoConvergence, NotConverged, OnSupport,
                     QuadratureFailure, SingularGram, SingularInnerMatrix)
from .freedet import FixedPointOptions, FreeDeterministicEquivalent, solve_fixed_point
from .model import MeanSpec, Regime, SystemConfig, build_mean_matrices, classify_regime, subchannel_count
from .rates import freedet_rates, rate_user1, rate_user2, rates_from_cauchy, rates_from_cdf
from .rayleigh import Dims, closed_cauchy_L, closed_cauchy_omega, closed_rates, integral_I, pdf_omega
from .report import RateReport
from .sampler import (empirical_cauchy, empirical_rates, empirical_spectrum, gsv_exact, gsv_extract,
                      oma_baseline_rates, sample_channel, sample_spectrum)
