"""Multi-message accounting: m messages per user, shuffled individually.

When each user sends m iid messages into the shuffle ("unbundled"), the
adversary sees one histogram of nm messages.  The exact likelihood ratio of
one-changed-user against all-zeros at a histogram N is a normalized
elementary symmetric function of the ratios w(y):

    L(N) = [t^m] prod_y (1 + w(y) t)^{N_y}  /  C(nm, m),

computed below by truncated polynomial multiplication.  Bundling the m
messages into one super-symbol instead multiplies chi-squares, so the
bundled Gaussian parameter dominates the unbundled one; `mm_gdp_compare`
quantifies the gap.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .channels import Channel, Support, score_stats
from .errors import EnumerationCapError, InternalInvariantError, ValidationError
from .exact_dist import (
    DEFAULT_ATOM_CAP,
    LrAtomization,
    PrivacyCurve,
    Sidedness,
    _atom_count,
    _check_atomization,
    _merge_atoms,
    privacy_curve,
)

# Beyond this, coefficient magnitudes threaten double overflow and the
# polynomial arithmetic moves to log space.  All coefficients are
# nonnegative (the ratios w(y) are), so no sign tracking is needed.
_LOG_SPACE_THRESHOLD = 600.0


@dataclass(frozen=True)
class MmComparison:
    """Bundled versus unbundled Gaussian accounting at message count m.

    Scaled so n drops out: `unbundled_mu2n` is m chi2 and `bundled_mu2n`
    is (1 + chi2)^m - 1 (the chi-square of the m-fold product channel).
    `ratio` = bundled/unbundled > 1 strictly for m >= 2 unless the channel
    is degenerate (chi2 = 0), in which case `degenerate` is set and the
    ratios take their limiting value 1.
    """

    m: int
    chi2: float
    unbundled_mu2n: float
    bundled_mu2n: float
    ratio: float
    ratio_lower_bound: float
    degenerate: bool


def _use_log_space(channel: Channel, n: int, m: int) -> bool:
    w_max = score_stats(channel).w_max
    return (
        n * m * math.log(max(w_max, 1.0)) > _LOG_SPACE_THRESHOLD
        or m * math.log(n * m + 1.0) > _LOG_SPACE_THRESHOLD
    )


def _coef_direct(w: np.ndarray, counts, m: int) -> float:
    """[t^m] prod_y (1 + w_y t)^{c_y} by truncated products, plain floats."""
    coef = np.zeros(m + 1)
    coef[0] = 1.0
    for wy, c in zip(w, counts):
        if c == 0:
            continue
        top = min(m, c)
        binom_row = np.zeros(m + 1)
        binom_row[0] = 1.0
        val = 1.0
        for j in range(1, top + 1):
            val *= wy * (c - j + 1) / j
            binom_row[j] = val
        coef = np.convolve(coef, binom_row)[: m + 1]
    return float(coef[m])


def _coef_log(w: np.ndarray, counts, m: int) -> float:
    """log [t^m] prod_y (1 + w_y t)^{c_y}; -inf when the coefficient is 0."""
    log_coef = np.full(m + 1, -np.inf)
    log_coef[0] = 0.0
    for wy, c in zip(w, counts):
        if c == 0:
            continue
        top = min(m, c)
        log_row = np.full(m + 1, -np.inf)
        log_row[0] = 0.0
        if wy > 0.0:
            j = np.arange(1, top + 1, dtype=np.float64)
            log_row[1 : top + 1] = np.cumsum(np.log(wy) + np.log(c - j + 1.0) - np.log(j))
        out = np.full(m + 1, -np.inf)
        for deg in range(m + 1):
            terms = log_coef[: deg + 1] + log_row[deg::-1]
            finite = terms[np.isfinite(terms)]
            if finite.size:
                out[deg] = logsumexp(finite)
        log_coef = out
    return float(log_coef[m])


def unbundled_lr(channel: Channel, n: int, m: int, histogram, use_log: bool | None = None) -> float:
    """Exact m-message likelihood ratio at a histogram of nm messages.

    Args:
        channel: validated channel with min(W0) > 0.
        n: number of users; m: messages per user.
        histogram: counts per symbol, summing to n*m.
        use_log: force the log-space coefficient path (None = automatic
            overflow-based choice).

    For m = 1 the value is checked against the affine single-message
    identity (1/n) sum_y N_y w(y).
    """
    if channel.support is Support.SINGULAR:
        raise ValidationError("unbundled ratio needs min(W0) > 0; channel is SINGULAR")
    if n < 1 or m < 1:
        raise ValidationError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    counts = tuple(int(x) for x in histogram)
    if len(counts) != channel.d:
        raise ValidationError(f"histogram has {len(counts)} cells, channel has d={channel.d}")
    if any(c < 0 for c in counts) or sum(counts) != n * m:
        raise ValidationError(f"histogram {counts} is not a size-{n * m} count vector")
    w = score_stats(channel).w
    log_denom = float(gammaln(n * m + 1) - gammaln(m + 1) - gammaln(n * m - m + 1))
    if use_log is None:
        use_log = _use_log_space(channel, n, m)
    if use_log:
        log_num = _coef_log(w, counts, m)
        value = 0.0 if log_num == -np.inf else math.exp(log_num - log_denom)
    else:
        num = _coef_direct(w, counts, m)
        value = 0.0 if num == 0.0 else math.exp(math.log(num) - log_denom)
    if m == 1:
        affine = float(np.dot(np.asarray(counts, dtype=np.float64), w)) / n
        if abs(value - affine) > 1e-10 * max(1.0, affine):
            raise InternalInvariantError(
                f"m=1 ratio {value!r} disagrees with affine identity {affine!r}"
            )
    return value


def _multinomial_histograms(total: int, d: int):
    """All count vectors of length d summing to total, lexicographic."""
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _multinomial_histograms(total - first, d - 1):
            yield (first,) + rest


def unbundled_lr_atoms(
    channel: Channel, n: int, m: int, cap: int = DEFAULT_ATOM_CAP
) -> LrAtomization:
    """Atomize the m-message pair over the full multinomial null law.

    The null law of the nm-message histogram is Multinomial(nm, W0); alt
    masses follow from the martingale relation p_alt = L * p_null.
    """
    if channel.support is Support.SINGULAR:
        raise ValidationError("unbundled atoms need min(W0) > 0; channel is SINGULAR")
    if n < 1 or m < 1:
        raise ValidationError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    total = n * m
    count = _atom_count(total, channel.d)
    if count > cap:
        raise EnumerationCapError(
            f"multinomial support for nm={total}, d={channel.d} has {count} atoms "
            f"> cap {cap}; use montecarlo.sample_privacy_loss instead"
        )
    log_w0 = np.where(channel.W0 > 0.0, np.log(channel.W0), -np.inf)
    use_log = _use_log_space(channel, n, m)
    lr_vals = []
    p_null = []
    base = float(gammaln(total + 1))
    for h in _multinomial_histograms(total, channel.d):
        arr = np.asarray(h, dtype=np.float64)
        log_p = base - float(np.sum(gammaln(arr + 1.0))) + float(np.dot(arr, log_w0))
        if log_p == -np.inf:
            continue
        lr_vals.append(unbundled_lr(channel, n, m, h, use_log=use_log))
        p_null.append(math.exp(log_p))
    lr_arr = np.asarray(lr_vals)
    p_arr = np.asarray(p_null)
    p_arr = p_arr / p_arr.sum()
    lr_arr, p_n, p_a = _merge_atoms(lr_arr, p_arr, lr_arr * p_arr)
    atoms = LrAtomization(n=n, k=0, lr=lr_arr, p_null=p_n, p_alt=p_a)
    _check_atomization(atoms)
    return atoms


def unbundled_exact_curve(
    channel: Channel, n: int, m: int, eps, cap: int = DEFAULT_ATOM_CAP
) -> PrivacyCurve:
    """Exact forward privacy curve of the m-message pair on an eps grid."""
    atoms = unbundled_lr_atoms(channel, n, m, cap=cap)
    return privacy_curve(atoms, eps, Sidedness.FORWARD)


def mm_gdp_compare(channel: Channel, m: int) -> MmComparison:
    """Bundled vs unbundled Gaussian parameters at message count m.

    Unbundled: n mu^2 = m chi2.  Bundled (one super-symbol of m messages):
    n mu^2 = (1 + chi2)^m - 1, by multiplicativity of 1 + chi2 under
    products.  For m >= 2 and chi2 > 0 the ratio strictly exceeds its
    algebraic lower bound floor 1 + (m-1) chi2 / 2 >= ... >= 1, with
    equality of bound and ratio at m = 2.
    """
    if m < 1:
        raise ValidationError(f"need m >= 1, got {m}")
    if channel.support is not Support.FULL:
        raise ValidationError(
            f"bundled comparison needs a FULL channel; support is {channel.support.value}"
        )
    chi2 = score_stats(channel).chi2
    unbundled = m * chi2
    bundled = (1.0 + chi2) ** m - 1.0
    if chi2 == 0.0:
        return MmComparison(
            m=m,
            chi2=0.0,
            unbundled_mu2n=0.0,
            bundled_mu2n=0.0,
            ratio=1.0,
            ratio_lower_bound=1.0,
            degenerate=True,
        )
    return MmComparison(
        m=m,
        chi2=chi2,
        unbundled_mu2n=unbundled,
        bundled_mu2n=bundled,
        ratio=bundled / unbundled,
        ratio_lower_bound=1.0 + 0.5 * (m - 1) * chi2,
        degenerate=False,
    )


def brute_force_lr(channel: Channel, n: int, m: int, histogram) -> float:
    """Reference ratio by averaging products of w over all m-subsets.

    Expands the histogram into an explicit message list and averages
    prod_{j in S} w(y_j) over the C(nm, m) position subsets S.  Exponential
    in nm; intended for cross-checking small cases in tests.
    """
    counts = tuple(int(x) for x in histogram)
    total = n * m
    if sum(counts) != total:
        raise ValidationError(f"histogram {counts} is not a size-{total} count vector")
    if total > 16:
        raise ValidationError("brute-force reference limited to nm <= 16")
    w = score_stats(channel).w
    messages = [y for y, c in enumerate(counts) for _ in range(c)]
    acc = math.fsum(
        math.prod(w[y] for y in subset)
        for subset in itertools.combinations(messages, m)
    )
    return acc / math.comb(total, m)
