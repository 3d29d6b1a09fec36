import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shuffledp import (
    ValidationError,
    fisher_constant,
    fisher_via_mixture,
    one_hot_cov,
    rr_channel,
    sigma_pi,
    validate_channel,
)
from conftest import full_channel


def test_one_hot_cov_shape_and_kernel():
    f = np.array([0.2, 0.3, 0.5])
    cov = one_hot_cov(f)
    # symmetric, rows sum to zero (all-ones kernel), PSD
    assert np.allclose(cov, cov.T, atol=1e-15)
    assert np.allclose(cov @ np.ones(3), 0.0, atol=1e-15)
    assert np.linalg.eigvalsh(cov).min() >= -1e-15


def test_sigma_pi_interpolates():
    ch = full_channel(np.random.default_rng(0), 3)
    s0 = sigma_pi(ch, 0.0)
    s1 = sigma_pi(ch, 1.0)
    sh = sigma_pi(ch, 0.5)
    assert np.allclose(sh, 0.5 * (s0 + s1), atol=1e-15)
    assert np.allclose(s0, one_hot_cov(ch.W0), atol=1e-15)


def test_fisher_rr_ln3_exact():
    ch = rr_channel(math.log(3.0))
    for pi in (0.0, 0.5):
        rep = fisher_constant(ch, pi)
        assert rep.fisher == pytest.approx(4 / 3, abs=1e-12)
    rep = fisher_constant(ch, 0.5)
    # s solves sigma s = v on the zero-sum subspace
    assert rep.s == pytest.approx([-4 / 3, 4 / 3], rel=1e-12)
    assert rep.s.sum() == pytest.approx(0.0, abs=1e-12)


def test_fisher_score_direction_solves_system():
    ch = full_channel(np.random.default_rng(5), 4)
    rep = fisher_constant(ch, 0.3)
    # sigma s = v holds up to a multiple of the all-ones kernel direction
    resid = rep.sigma @ rep.s - rep.v
    assert np.allclose(resid - resid.mean(), 0.0, atol=1e-12)
    assert rep.fisher == pytest.approx(float(rep.v @ rep.s), rel=1e-12)


def test_fisher_mixture_identity_endpoints():
    # at pi in {0, 1} the rank-one correction vanishes
    ch = full_channel(np.random.default_rng(1), 3)
    for pi in (0.0, 1.0):
        rep = fisher_constant(ch, pi)
        assert rep.fisher == pytest.approx(rep.fisher_mixture, rel=1e-10)


@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.sampled_from([0.0, 0.1, 0.5, 0.9, 1.0]))
def test_fisher_two_routes_agree(seed, d, pi):
    ch = full_channel(np.random.default_rng(seed), d)
    direct = fisher_constant(ch, pi).fisher
    via = fisher_via_mixture(ch, pi)
    assert abs(direct - via) <= 1e-9 * (1.0 + direct)
    assert direct >= -1e-12


def test_fisher_exceeds_mixture_information():
    # fixed-composition covariance is smaller, so its inverse form is larger
    ch = full_channel(np.random.default_rng(7), 3)
    rep = fisher_constant(ch, 0.4)
    assert rep.fisher >= rep.fisher_mixture - 1e-12


def test_fisher_rejects_bad_inputs():
    ch = rr_channel(1.0)
    with pytest.raises(ValidationError):
        fisher_constant(ch, -0.1)
    with pytest.raises(ValidationError):
        fisher_constant(ch, 1.1)
    singular = validate_channel([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValidationError, match="FULL"):
        fisher_constant(singular, 0.5)


def test_fisher_rejects_degenerate_minor():
    # one symbol mass at the knife edge makes the reduced minor hopeless
    eps = 2e-14
    ch = validate_channel([eps, 0.5 - eps, 0.5], [eps, 0.25, 0.75 - eps])
    with pytest.raises(ValidationError, match="condition number"):
        fisher_constant(ch, 0.5)
