"""Computer algebra for free divisors: logarithmic derivations, linearity
conditions, Bernstein polynomials and annihilators of f^s."""

__version__ = "0.1.0"
