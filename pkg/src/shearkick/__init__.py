"""Periodically kicked linear shear oscillators.

A limit cycle with shear, kicked every ``tau`` time units, is reduced to an
explicit map of the cylinder.  The package estimates Lyapunov exponents,
tracks the folding of the cycle's images, computes invariant circles and
rotation numbers of the singular-limit circle maps, and extends the model to
n dimensions.
"""
from .core2d import (CylinderPoint, ShearParams, fixed_points_integer_tau, flow, fold_threshold_sigma,
                     iterate, jacobian, kick, psi, psi_lifted, trapping_bound)
from .errors import *  # noqa: F401,F403
from .lyapunov import EnsembleReport, LyapunovEstimate, ensemble_protocol, max_lyapunov
from .rng import prng_stream

__version__ = "0.1.0"

__all__ = ["CylinderPoint", "ShearParams", "fixed_points_integer_tau", "flow", "fold_threshold_sigma",
           "iterate", "jacobian", "kick", "psi", "psi_lifted", "trapping_bound", "EnsembleReport",
           "LyapunovEstimate", "ensemble_protocol", "max_lyapunov", "prng_stream"]
