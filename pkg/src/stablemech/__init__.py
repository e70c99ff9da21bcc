"""Stable and infinitely divisible laws, renormalization fixed points and scaling theory."""

__version__ = "0.1.0"

from . import errors, levy_core, operator_stable2d, renorm_sampling, scaling_theory, stable1d, stable_density  # noqa: E402,F401
from .stable1d import StableLaw1D  # noqa: E402,F401
