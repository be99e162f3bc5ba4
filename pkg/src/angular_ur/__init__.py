"""Numerical checks of fluctuation relations for angular observables.

Builds circle, line and sphere states, evaluates the Schwarz relation, the
Robertson-Schroedinger relation and the symmetry condition that separates
them, and searches shell coefficients for states on either side of the bound
``Delta Lz * Delta phi >= hbar / 2``.
"""

__version__ = "0.1.0"
