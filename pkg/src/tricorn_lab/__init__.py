"""Numerical dynamics of the tricorn family f_c(z) = conj(z)^2 + c."""
from .core import AntiQuadratic, escape_counts, escape_time, tricorn_member

__all__ = ["AntiQuadratic", "escape_counts", "escape_time", "tricorn_member"]
__version__ = "0.1.0"
