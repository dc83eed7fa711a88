"""Gaussian-process surrogate: kernel, posterior, fitting, links, and sample paths."""
