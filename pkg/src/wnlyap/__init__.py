"""Lyapunov exponent of the one-dimensional Schrodinger operator with a white-noise potential.

gamma(lambda, sigma) = omega f(nu) with omega = sqrt|lambda| and nu = 2 omega^3 / sigma^2.
Routes: exact nested quadrature over the stationary phase density, the small-
and large-nu asymptotes, and a Monte Carlo simulation of the phase SDE.
"""

from .asympt import (AsymptoticConstants, constant_c, default_constants, gamma_asympt,
                     gamma_asympt_large_nu_neg, gamma_asympt_large_nu_pos,
                     gamma_asympt_small_nu, gamma_uniform)
from .exact import ExactConfig, gamma_exact, gamma_exact_neg, gamma_exact_pos
from .mc import McConfig, McResult, estimate_gamma_mc
from .model import (GammaEstimate, Method, Regime, RegimeError, RegimeKind, RegimeThresholds,
                    Sign, SpectralPoint, classify_regime, make_spectral_point, point_from_nu)
from .quad import QuadSpec, QuadratureError
from .report import SweepSpec, run_sweep, validate_regime_thresholds, write_table

__version__ = "0.1.0"
