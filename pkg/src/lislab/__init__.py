"""Numerical laboratory for longest-increasing-subsequence limit laws.

Distributions of the longest increasing (or decreasing) subsequence of
random permutations and fixed-point-free involutions, their limiting
edge laws, and the leading finite-size corrections — each computed by
independent routes (integral-operator determinants, nonlinear-ODE
representations, and exact enumeration / Monte Carlo) and cross-checked.
"""

__version__ = "0.1.0"
