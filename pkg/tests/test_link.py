"""Tests for output link functions."""

import numpy as np
import pytest

from prb_bayesopt.model.link import apply_link, invert_link, invert_link_derivative
from prb_bayesopt.models import Link


def test_logit_of_half_is_zero():
    assert apply_link(Link.LOGIT, 0.5) == pytest.approx(0.0)


def test_inverse_of_zero_is_half():
    assert invert_link(Link.LOGIT, 0.0) == pytest.approx(0.5)


def test_logit_round_trip():
    assert invert_link(Link.LOGIT, apply_link(Link.LOGIT, 0.9)) == pytest.approx(0.9)


def test_identity_passes_through():
    values = np.array([-3.0, 0.0, 7.5])
    np.testing.assert_array_equal(apply_link(Link.IDENTITY, values), values)
    np.testing.assert_array_equal(invert_link(Link.IDENTITY, values), values)
    np.testing.assert_array_equal(invert_link_derivative(Link.IDENTITY, values), 1.0)


def test_logit_rejects_boundary_values():
    with pytest.raises(ValueError, match="strictly inside"):
        apply_link(Link.LOGIT, np.array([0.2, 1.0]))
    with pytest.raises(ValueError):
        apply_link(Link.LOGIT, 0.0)


def test_inverse_derivative_matches_finite_difference():
    f = np.array([-2.0, 0.0, 1.5])
    h = 1e-6
    fd = (invert_link(Link.LOGIT, f + h) - invert_link(Link.LOGIT, f - h)) / (2 * h)
    np.testing.assert_allclose(invert_link_derivative(Link.LOGIT, f), fd, atol=1e-8)
    assert invert_link_derivative(Link.LOGIT, 0.0) == pytest.approx(0.25)
