"""Stopping rules for Bayesian optimization runs."""
