"""Physical constants used across the package (SI)."""

from scipy.constants import hbar, k as k_B

__all__ = ["hbar", "k_B"]
