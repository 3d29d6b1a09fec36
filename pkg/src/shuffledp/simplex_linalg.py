"""Covariance algebra on the probability simplex.

The covariance of a one-hot draw from a law f is diag(f) - f f^T.  It is
singular with kernel spanned by the all-ones vector, so inverses are taken on
the zero-sum subspace.  Dropping the last coordinate represents that
quadratic form by the leading (d-1) x (d-1) principal minor: for zero-sum
u and z,  u^T Sigma^+ z = u_-^T (Sigma_-)^{-1} z_-,  which is what the
solvers below compute.
"""

from dataclasses import dataclass

import numpy as np

from .channels import Channel, Support
from .errors import ValidationError

# Reject solves whose reduced minor is this ill-conditioned; the channel is
# numerically degenerate and results would be noise.
CONDITION_CAP = 1e12

# Guard for the Sherman-Morrison denominator 1 - pi(1-pi) I_f.
_DENOM_TOL = 1e-12


@dataclass(frozen=True)
class FisherReport:
    """Fisher information of the histogram statistic at composition pi.

    Attributes:
        pi: fraction of ones in the composition, in [0, 1].
        f: the mixture law (1-pi) W0 + pi W1.
        v: difference direction W1 - W0.
        sigma: fixed-composition covariance (1-pi) Sigma_0 + pi Sigma_1.
        s: score direction, the zero-sum solution of sigma s = v.
        fisher: the constant I_pi = v . s = v^T sigma^+ v.
        fisher_mixture: I_f = sum v^2 / f, the single-draw mixture
            information (always <= fisher).
        reduced_cond: condition number of the reduced minor that was solved.
    """

    pi: float
    f: np.ndarray
    v: np.ndarray
    sigma: np.ndarray
    s: np.ndarray
    fisher: float
    fisher_mixture: float
    reduced_cond: float


def _require_full(channel: Channel, op: str) -> None:
    if channel.support is not Support.FULL:
        raise ValidationError(
            f"{op} needs a FULL channel (all symbol masses positive); "
            f"support is {channel.support.value}"
        )


def _check_pi(pi: float) -> float:
    pi = float(pi)
    if not (0.0 <= pi <= 1.0):
        raise ValidationError(f"pi must lie in [0, 1], got {pi!r}")
    return pi


def one_hot_cov(f: np.ndarray) -> np.ndarray:
    """Covariance diag(f) - f f^T of a single one-hot draw from f."""
    f = np.asarray(f, dtype=np.float64)
    return np.diag(f) - np.outer(f, f)


def sigma_pi(channel: Channel, pi: float) -> np.ndarray:
    """Fixed-composition covariance (1-pi) Sigma_0 + pi Sigma_1.

    Sigma_b is the one-hot covariance of W_b.  This is the covariance of the
    histogram per user when the composition (fraction of ones) is held fixed,
    and differs from the mixture covariance by the rank-one term
    pi (1-pi) v v^T.
    """
    pi = _check_pi(pi)
    return (1.0 - pi) * one_hot_cov(channel.W0) + pi * one_hot_cov(channel.W1)


def fisher_constant(channel: Channel, pi: float) -> FisherReport:
    """Solve sigma_pi s = v on the zero-sum subspace and report I_pi = v . s.

    The reduced system drops the last coordinate; the solution is lifted back
    by projecting onto zero sum.  Channels whose reduced minor has condition
    number above CONDITION_CAP are rejected, with any near-zero symbol masses
    named in the error.

    Raises:
        ValidationError: non-FULL channel, pi outside [0, 1], or an
            ill-conditioned reduced minor.
    """
    _require_full(channel, "fisher_constant")
    pi = _check_pi(pi)
    d = channel.d
    v = channel.W1 - channel.W0
    sigma = sigma_pi(channel, pi)
    minor = sigma[: d - 1, : d - 1]
    cond = float(np.linalg.cond(minor))
    if not np.isfinite(cond) or cond > CONDITION_CAP:
        detail = ""
        if channel.near_zero:
            labels = [f"W{which}[{y}]" for which, y in channel.near_zero]
            detail = f" (near-zero symbol masses: {', '.join(labels)})"
        raise ValidationError(
            f"reduced covariance minor has condition number {cond:.3e} "
            f"> {CONDITION_CAP:.0e}; channel is numerically degenerate{detail}"
        )
    g = np.linalg.solve(minor, v[: d - 1])
    shift = g.sum() / d
    s = np.empty(d)
    s[: d - 1] = g - shift
    s[d - 1] = -shift
    fisher = float(np.dot(v[: d - 1], g))
    f = (1.0 - pi) * channel.W0 + pi * channel.W1
    fisher_mixture = float(np.sum(v * v / f))
    return FisherReport(
        pi=pi,
        f=f,
        v=v,
        sigma=sigma,
        s=s,
        fisher=fisher,
        fisher_mixture=fisher_mixture,
        reduced_cond=cond,
    )


def fisher_via_mixture(channel: Channel, pi: float) -> float:
    """I_pi computed from the mixture information by the rank-one identity.

    The mixture covariance diag(f) - f f^T equals sigma_pi plus the rank-one
    update pi (1-pi) v v^T, so I_pi = I_f / (1 - pi (1-pi) I_f) with
    I_f = sum_y v(y)^2 / f(y).  Serves as an independent cross-check of
    `fisher_constant`.
    """
    _require_full(channel, "fisher_via_mixture")
    pi = _check_pi(pi)
    f = (1.0 - pi) * channel.W0 + pi * channel.W1
    v = channel.W1 - channel.W0
    fisher_mixture = float(np.sum(v * v / f))
    denom = 1.0 - pi * (1.0 - pi) * fisher_mixture
    if denom <= _DENOM_TOL:
        raise ValidationError(
            f"rank-one denominator {denom!r} <= {_DENOM_TOL}; "
            "channel is numerically degenerate at this pi"
        )
    return fisher_mixture / denom
