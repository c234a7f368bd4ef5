"""Numerical tests and recovery for exponential polynomials.

Checks the Popoviciu Hankel-determinant equation and Montel-type span
conditions at dense-subgroup generators; one-variable exponential
polynomials are recovered from samples by recurrence fitting.
"""

__version__ = "0.1.0"
