import math

import numpy as np
import pytest
from scipy.special import ndtr

from shuffledp import (
    Composition,
    GdpSource,
    ValidationError,
    binomial_lr_atoms,
    divergences,
    fisher_constant,
    gaussian_tradeoff,
    gdp_delta,
    gdp_mu,
    jsd_canonical_asymptotic,
    leading_divergence,
    lr_atoms,
    rr_channel,
    score_stats,
)
from conftest import full_channel

RR3 = rr_channel(math.log(3.0))


def test_gdp_delta_oracles():
    assert gdp_delta(0.0, 1.0) == pytest.approx(0.38292492254802620728, abs=1e-15)
    assert gdp_delta(1.0, 1.0) == pytest.approx(0.1269367375066439458, abs=1e-15)


def test_gdp_delta_zero_at_mu_zero():
    assert gdp_delta(0.5, 0.0) == 0.0


def test_gdp_delta_at_zero_is_gaussian_tv():
    # delta(0) = 2 Phi(mu/2) - 1, the total variation of the Gaussian pair
    for mu in (0.3, 1.0, 2.5):
        assert gdp_delta(0.0, mu) == pytest.approx(2.0 * ndtr(mu / 2.0) - 1.0, rel=1e-12)


def test_gdp_delta_monotone():
    eps = np.linspace(0.0, 4.0, 30)
    vals = [gdp_delta(e, 1.3) for e in eps]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_gdp_delta_validation():
    with pytest.raises(ValidationError):
        gdp_delta(-0.1, 1.0)
    with pytest.raises(ValidationError):
        gdp_delta(0.1, -1.0)


def test_gaussian_tradeoff_oracle():
    assert gaussian_tradeoff(1.0, 0.05) == pytest.approx(0.74048897715855592935, abs=1e-15)


def test_gaussian_tradeoff_endpoints_and_fixed_point():
    assert gaussian_tradeoff(1.7, 0.0) == 1.0
    assert gaussian_tradeoff(1.7, 1.0) == 0.0
    # the curve crosses the diagonal at alpha = Phi(-mu/2)
    mu = 0.8
    a = float(ndtr(-mu / 2.0))
    assert gaussian_tradeoff(mu, a) == pytest.approx(a, rel=1e-12)


def test_gaussian_tradeoff_vectorized():
    out = gaussian_tradeoff(1.0, np.array([0.0, 0.5, 1.0]))
    assert out.shape == (3,)
    assert out[0] == 1.0 and out[2] == 0.0


def test_gdp_mu_values_and_sources():
    p = gdp_mu(RR3, 100)
    assert p.mu == pytest.approx(math.sqrt((4 / 3) / 100), rel=1e-12)
    assert p.source is GdpSource.CANONICAL
    assert gdp_mu(RR3, 100, pi=0.5).source is GdpSource.PROPORTIONAL
    unb = gdp_mu(RR3, 100, pi=0.5, m=2)
    assert unb.source is GdpSource.UNBUNDLED
    assert unb.mu == pytest.approx(0.1632993161855452, rel=1e-12)


def test_gdp_mu_validation():
    with pytest.raises(ValidationError):
        gdp_mu(RR3, 0)
    with pytest.raises(ValidationError):
        gdp_mu(RR3, 10, m=0)


def test_jsd_expansion_rr3_n10():
    report = jsd_canonical_asymptotic(RR3, 10)
    assert report.asymptotic == pytest.approx(0.0175, abs=1e-12)
    assert report.terms[0] == pytest.approx((4 / 3) / 80, rel=1e-12)
    assert report.terms[1] == pytest.approx(-(16 / 9) / 1600, rel=1e-12)
    assert report.terms[2] == pytest.approx((7 / 64) * (4 / 3) ** 2 / 100, rel=1e-12)
    assert report.exact is not None
    assert report.residual == pytest.approx(report.exact - report.asymptotic, abs=1e-15)


def test_jsd_expansion_auto_exact_path_selection():
    # d = 2 always enumerates; a large d = 3 instance has no exact fill-in
    small = jsd_canonical_asymptotic(full_channel(np.random.default_rng(0), 3), 20)
    assert small.exact is not None
    big = jsd_canonical_asymptotic(full_channel(np.random.default_rng(0), 3), 5000)
    assert big.exact is None and big.residual is None


def test_jsd_expansion_caller_supplied_exact():
    report = jsd_canonical_asymptotic(RR3, 10, exact=0.02)
    assert report.exact == 0.02
    assert report.residual == pytest.approx(0.02 - report.asymptotic, abs=1e-15)


def test_jsd_expansion_residual_is_small():
    # remainder should sit two orders below the leading term at n = 100
    report = jsd_canonical_asymptotic(RR3, 100)
    assert abs(report.residual) < report.terms[0] / 1000


def test_leading_divergence_forms():
    n, pi = 50, 0.3
    fisher = fisher_constant(RR3, pi).fisher
    assert leading_divergence(RR3, n, pi, "jsd") == pytest.approx(fisher / (8 * n), rel=1e-12)
    assert leading_divergence(RR3, n, pi, "f", curvature=2.0) == pytest.approx(
        fisher / n, rel=1e-12
    )
    assert leading_divergence(RR3, n, pi, "renyi", order=2.0) == pytest.approx(
        fisher / n, rel=1e-12
    )


def test_leading_chi2_constant_is_exact_at_k0():
    # for the k=0 pair the chi-square leading constant is not asymptotic at
    # all: chi2(alt || null) = I_0 / n holds exactly at every n
    ch = full_channel(np.random.default_rng(23), 3)
    lead = leading_divergence(ch, 9, 0.0, "f", curvature=2.0)
    exact = divergences(lr_atoms(ch, Composition(9, 0))).chi2
    assert exact == pytest.approx(lead, rel=1e-10)


def test_leading_divergence_validation():
    with pytest.raises(ValidationError):
        leading_divergence(RR3, 10, 0.0, "f")
    with pytest.raises(ValidationError):
        leading_divergence(RR3, 10, 0.0, "renyi", order=0.5)
    with pytest.raises(ValidationError):
        leading_divergence(RR3, 10, 0.0, "nope")


def test_uniform_sharpness_matches_fisher_scaling():
    # 8 n JSD(T_{n,k} || T_{n,k+1}) -> I_{k/n} for proportional compositions
    ch = full_channel(np.random.default_rng(29), 2)
    n = 300
    k = n // 2
    jsd = divergences(lr_atoms(ch, Composition(n, k))).jsd
    fisher = fisher_constant(ch, k / n).fisher
    assert 8 * n * jsd / fisher == pytest.approx(1.0, abs=0.05)
