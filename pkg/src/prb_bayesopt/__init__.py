"""Bayesian optimization with probabilistic regret bound stopping."""

__version__ = "0.1.0"
