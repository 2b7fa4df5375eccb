"""Zeta-regularized determinants, geometric zeta functions and torsion at desk scale."""

__version__ = "0.1.0"
