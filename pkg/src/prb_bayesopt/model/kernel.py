"""Matérn-5/2 kernel with ARD lengthscales."""

import math

import numpy as np
from scipy.spatial.distance import cdist

from prb_bayesopt.models import KernelSpec

SQRT5 = math.sqrt(5.0)
GOLDEN_RATIO = (1.0 + SQRT5) / 2.0


def _scaled(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    return np.atleast_2d(np.asarray(points, dtype=float)) / spec.lengthscale_array


def _profile(spec: KernelSpec, r: np.ndarray) -> np.ndarray:
    s = SQRT5 * r
    return spec.variance * (1.0 + s + s * s / 3.0) * np.exp(-s)


def kernel_matrix(spec: KernelSpec, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Covariance matrix k(x1, x2) of shape (len(x1), len(x2))."""
    a, b = _scaled(spec, x1), _scaled(spec, x2)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    r = cdist(a, b)
    return _profile(spec, r)


def kernel_eval(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    """k(x, y) for two single points."""
    return float(kernel_matrix(spec, np.reshape(x, (1, -1)), np.reshape(y, (1, -1)))[0, 0])


def kernel_diag(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    return np.full(np.atleast_2d(points).shape[0], spec.variance)


def kernel_grad(spec: KernelSpec, x: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Gradient of k(x, points[i]) with respect to x, shape (len(points), dim).

    Uses dk/dx = -(5/3) var (1 + sqrt5 r) exp(-sqrt5 r) (x - y) / l^2, which is
    smooth at r = 0.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    points = np.atleast_2d(points)
    ls2 = spec.lengthscale_array**2
    diff = x[None, :] - points
    r = np.sqrt(np.sum(diff * diff / ls2, axis=1))
    s = SQRT5 * r
    coef = -(5.0 / 3.0) * spec.variance * (1.0 + s) * np.exp(-s)
    return coef[:, None] * diff / ls2


def kernel_hyper_grads(spec: KernelSpec, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives of k(X, X) with respect to log variance and each log lengthscale.

    Returns:
        ``(K, dK)`` where ``K`` is the kernel matrix (also its log-variance
        derivative) and ``dK[d]`` is the derivative with respect to log l_d.
    """
    points = np.atleast_2d(points)
    ls = spec.lengthscale_array
    diff = (points[:, None, :] - points[None, :, :]) / ls
    sq = diff * diff
    r = np.sqrt(np.sum(sq, axis=-1))
    s = SQRT5 * r
    base = np.exp(-s)
    K = spec.variance * (1.0 + s + s * s / 3.0) * base
    coef = (5.0 / 3.0) * spec.variance * (1.0 + s) * base
    dK = np.moveaxis(coef[..., None] * sq, -1, 0)
    return K, dK


def lipschitz_constant(spec: KernelSpec) -> float:
    """Largest slope of x -> k(x, y) under the sup-norm on inputs.

    The radial slope (sqrt5/3) var s (1 + s) exp(-s), s = sqrt5 r, peaks at the
    golden ratio; |dr| <= ||dx||_inf * sqrt(sum_d l_d^-2).
    """
    phi = GOLDEN_RATIO
    radial = spec.variance * (SQRT5 / 3.0) * phi * (1.0 + phi) * math.exp(-phi)
    return radial * math.sqrt(float(np.sum(spec.lengthscale_array**-2.0)))
