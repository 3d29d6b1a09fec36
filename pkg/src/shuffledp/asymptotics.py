"""Gaussian and small-divergence asymptotics of the shuffled pair.

As n grows, testing T_{n,k} against T_{n,k+1} looks like testing N(0,1)
against N(mu, 1) with mu^2 = I_pi / n (times the message count m when each
user contributes m independent messages).  This module evaluates that
Gaussian limit — curve, trade-off, effective mu — and the matching
divergence expansions whose leading constants are I_pi / n times a
functional-specific factor.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtr, ndtri

from .channels import Channel, score_stats
from .errors import ValidationError
from .exact_dist import DEFAULT_ATOM_CAP, Composition, _atom_count, binomial_lr_atoms, divergences, lr_atoms
from .simplex_linalg import fisher_constant


class GdpSource(Enum):
    """Which recipe produced the Gaussian parameter mu."""

    CANONICAL = "canonical"        # k = 0 pair: mu^2 = chi2 / n
    PROPORTIONAL = "proportional"  # k = pi n pair: mu^2 = I_pi / n
    UNBUNDLED = "unbundled"        # m messages per user: mu^2 = m I_pi / n


@dataclass(frozen=True)
class GdpParams:
    mu: float
    n: int
    pi: float
    m: int
    source: GdpSource


@dataclass(frozen=True)
class ExpansionReport:
    """Truncated divergence expansion next to its exact value (if computed).

    `terms` are the successive expansion orders; `asymptotic` is their sum,
    and `residual` = exact - asymptotic when an exact value is available.
    """

    n: int
    terms: tuple[float, ...]
    asymptotic: float
    exact: float | None = None
    residual: float | None = None


def gdp_mu(channel: Channel, n: int, pi: float = 0.0, m: int = 1) -> GdpParams:
    """Effective Gaussian shift mu = sqrt(m I_pi / n) for the shuffled pair.

    pi = 0 gives the canonical pair (I_0 is the chi-square of the channel);
    m > 1 accounts for users sending m unbundled messages each.
    """
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    if m < 1:
        raise ValidationError(f"need m >= 1, got {m}")
    fisher = fisher_constant(channel, pi).fisher
    mu = math.sqrt(m * fisher / n)
    if m > 1:
        source = GdpSource.UNBUNDLED
    elif pi == 0.0:
        source = GdpSource.CANONICAL
    else:
        source = GdpSource.PROPORTIONAL
    return GdpParams(mu=mu, n=n, pi=float(pi), m=m, source=source)


def gdp_delta(eps: float, mu: float) -> float:
    """Privacy curve of the unit-variance Gaussian pair at shift mu.

    delta(eps) = Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2); the
    degenerate mu = 0 pair is perfectly private (delta = 0).
    """
    if mu < 0.0:
        raise ValidationError(f"mu must be >= 0, got {mu!r}")
    if eps < 0.0:
        raise ValidationError(f"eps must be >= 0, got {eps!r}")
    if mu == 0.0:
        return 0.0
    value = ndtr(-eps / mu + mu / 2.0) - math.exp(eps) * ndtr(-eps / mu - mu / 2.0)
    return min(1.0, max(0.0, float(value)))


def gaussian_tradeoff(mu: float, alpha):
    """Optimal type-II error of the Gaussian pair: Phi(Phi^{-1}(1-alpha) - mu).

    Vectorized over alpha; endpoints map to beta(0) = 1 and beta(1) = 0.
    """
    if mu < 0.0:
        raise ValidationError(f"mu must be >= 0, got {mu!r}")
    a = np.asarray(alpha, dtype=np.float64)
    if np.any((a < 0.0) | (a > 1.0)):
        raise ValidationError("alpha must lie in [0, 1]")
    with np.errstate(invalid="ignore"):
        out = ndtr(ndtri(1.0 - a) - mu)
    out = np.where(a == 0.0, 1.0, np.where(a == 1.0, 0.0, out))
    return float(out) if np.isscalar(alpha) else out


def jsd_canonical_asymptotic(
    channel: Channel, n: int, exact: float | None = None
) -> ExpansionReport:
    """Three-term expansion of JSD(T_{n,0} || T_{n,1}).

    terms = (chi2/(8n), -mu3/(16 n^2), (7/64) chi2^2 / n^2); the remainder
    is third order in 1/n.  The exact value is filled in automatically when
    the channel is small enough to enumerate (always for d = 2), or can be
    supplied by the caller.
    """
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    stats = score_stats(channel)
    terms = (
        stats.chi2 / (8.0 * n),
        -stats.mu3 / (16.0 * n * n),
        (7.0 / 64.0) * stats.chi2**2 / (n * n),
    )
    if exact is None:
        exact = _exact_canonical_jsd(channel, n)
    residual = None if exact is None else exact - sum(terms)
    return ExpansionReport(
        n=n, terms=terms, asymptotic=sum(terms), exact=exact, residual=residual
    )


_AUTO_EXACT_CAP = 200_000


def _exact_canonical_jsd(channel: Channel, n: int) -> float | None:
    if channel.d == 2:
        return divergences(binomial_lr_atoms(channel, n)).jsd
    if _atom_count(n, channel.d) <= _AUTO_EXACT_CAP:
        return divergences(lr_atoms(channel, Composition(n, 0), cap=DEFAULT_ATOM_CAP)).jsd
    return None


def leading_divergence(
    channel: Channel,
    n: int,
    pi: float,
    kind: str = "jsd",
    *,
    curvature: float | None = None,
    order: float | None = None,
) -> float:
    """Leading small-divergence constant of the pair (T_{n,k}, T_{n,k+1}).

    kind "jsd" gives I_pi/(8n); kind "f" gives curvature/2 * I_pi/n for a
    smooth f-divergence with f''(1) = curvature; kind "renyi" gives
    order * I_pi / (2n).
    """
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    fisher = fisher_constant(channel, pi).fisher
    if kind == "jsd":
        return fisher / (8.0 * n)
    if kind == "f":
        if curvature is None or curvature < 0.0:
            raise ValidationError("kind='f' needs curvature = f''(1) >= 0")
        return 0.5 * curvature * fisher / n
    if kind == "renyi":
        if order is None or order < 1.0:
            raise ValidationError("kind='renyi' needs order >= 1")
        return order * fisher / (2.0 * n)
    raise ValidationError(f"unknown divergence kind {kind!r}")
