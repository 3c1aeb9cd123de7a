"""Simulation and verification toolkit for the inhomogeneous stochastic
higher spin six vertex model: particle-system samplers, symmetric rational
function evaluators, contour-integral observables, and machine checks of the
model's algebraic identities."""

__version__ = "0.1.0"
