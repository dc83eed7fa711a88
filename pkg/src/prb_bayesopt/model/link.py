"""Output link functions: observations are mapped to latent space once at ingestion."""

import numpy as np
from scipy.special import expit, logit

from prb_bayesopt.models import GPHyperparams, Link


def _link_of(hyper: GPHyperparams | Link) -> Link:
    return hyper.link if isinstance(hyper, GPHyperparams) else Link(hyper)


def apply_link(hyper: GPHyperparams | Link, y_raw):
    """Map raw observations to latent space: g(y) = log(y / (1 - y)) under logit."""
    link = _link_of(hyper)
    if link is Link.IDENTITY:
        return y_raw
    values = np.asarray(y_raw, dtype=float)
    if np.any(values <= 0.0) or np.any(values >= 1.0):
        raise ValueError("logit link requires observations strictly inside (0, 1)")
    out = logit(values)
    return float(out) if np.ndim(y_raw) == 0 else out


def invert_link(hyper: GPHyperparams | Link, f_latent):
    """Map latent values back to observation scale: g^-1(f) = 1 / (1 + exp(-f))."""
    link = _link_of(hyper)
    if link is Link.IDENTITY:
        return f_latent
    out = expit(np.asarray(f_latent, dtype=float))
    return float(out) if np.ndim(f_latent) == 0 else out


def invert_link_derivative(hyper: GPHyperparams | Link, f_latent):
    """d g^-1 / df evaluated at ``f_latent``."""
    if _link_of(hyper) is Link.IDENTITY:
        return np.ones_like(np.asarray(f_latent, dtype=float))
    s = expit(np.asarray(f_latent, dtype=float))
    return s * (1.0 - s)
