"""Deterministic Monte Carlo fallbacks and scaling diagnostics.

Sampling uses a counter-based generator: every uniform is a pure hash of
(seed, draw index, step index), so runs are bit-identical for equal seeds
and independent of how draws are split across workers or chunks.  On top of
the sampler sit empirical/exact Kolmogorov distances to the Gaussian limit,
log-log rate fitting, the randomized-response boundary diagnostics, and the
frequency-estimation error study.
"""

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .channels import Channel, Support, score_stats
from .errors import ValidationError
from .exact_dist import DEFAULT_ATOM_CAP, Composition, LrAtomization, _lr_table

_MASK64 = (1 << 64) - 1
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_U11 = np.uint64(11)

# Cap on uniforms materialized per chunk (draws are split to stay under it).
_CHUNK_UNIFORMS = 1 << 22


class Hypothesis(enum.Enum):
    """Which of the two adjacent histogram laws to sample from."""

    NULL = "null"  # T_{n,k}
    ALT = "alt"    # T_{n,k+1}


@dataclass(frozen=True)
class SimConfig:
    """Simulation determinism contract.

    Equal (seed, reps) produce bit-identical sample streams; `workers` only
    controls parallelism and never affects values (draws are keyed by their
    global index, not by the worker that happens to compute them).
    """

    seed: int
    reps: int
    workers: int = 1

    def __post_init__(self):
        if not isinstance(self.seed, int):
            raise ValidationError(f"seed must be an integer, got {self.seed!r}")
        if self.reps < 0:
            raise ValidationError(f"reps must be >= 0, got {self.reps}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class RrBoundary:
    """Normal-approximation diagnostics of randomized response at (eps0, n).

    a_n = e^{eps0}/n is the boundary parameter separating the regimes;
    sigma2 and rho3 are the variance and absolute third moment of the
    centered score, `lyapunov_ratio` the scaled ratio rho3/(sigma^3 sqrt n),
    and the *_bound fields its closed-form envelopes.
    """

    eps0: float
    n: int
    q: float
    a_n: float
    x_plus: float
    x_minus: float
    sigma2: float
    rho3: float
    lyapunov_ratio: float
    skew_bound: float
    lyapunov_bound: float
    regime: "Regime"


class Regime(enum.Enum):
    SUB_CRITICAL = "sub-critical"
    CRITICAL = "critical"
    SUPER_CRITICAL = "super-critical"


@dataclass(frozen=True)
class FrequencyMseReport:
    """Monte Carlo error of the debiased frequency estimator."""

    mse_estimate: float
    mse_bound: float
    bias: float
    bias_se: float
    p_realized: float
    reps: int


# ---------------------------------------------------------------------------
# counter-based uniforms


def _mix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer; bijective on 64-bit words, vectorized.

    Callers pass uint64 arrays: array arithmetic wraps silently, whereas the
    numpy scalar path would raise overflow warnings.
    """
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def _seed_word(seed: int) -> np.uint64:
    # Same finalizer in plain-int arithmetic (scalar uint64 ops warn on wrap).
    x = (seed ^ 0x5DEECE66D) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return np.uint64(x ^ (x >> 31))


def _uniforms(seed: int, draw_start: int, draw_count: int, n_steps: int) -> np.ndarray:
    """Uniform[0,1) block of shape (draw_count, n_steps).

    Entry (i, j) depends only on (seed, draw_start + i, j): the stream is a
    pure function of global draw and step indices.
    """
    sw = _seed_word(seed)
    g = np.arange(draw_start, draw_start + draw_count, dtype=np.uint64)
    j = np.arange(n_steps, dtype=np.uint64)
    b = _mix64(g * _GOLDEN + sw)
    s = _mix64(j * _M2 + _GOLDEN)
    h = _mix64(b[:, None] ^ s[None, :])
    return (h >> _U11).astype(np.float64) * 2.0**-53


def _categorical(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, cdf.size - 1)


def _run_blocks(reps: int, workers: int, block_fn) -> None:
    """Split [0, reps) into per-worker ranges and run block_fn(start, stop)."""
    bounds = [reps * w // workers for w in range(workers + 1)]
    ranges = [(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
    if workers == 1 or len(ranges) <= 1:
        for a, b in ranges:
            block_fn(a, b)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda ab: block_fn(*ab), ranges))


# ---------------------------------------------------------------------------
# privacy-loss sampling


def sample_privacy_loss(
    channel: Channel,
    comp: Composition,
    hypothesis: Hypothesis,
    config: SimConfig,
    cap: int = DEFAULT_ATOM_CAP,
) -> np.ndarray:
    """Sample the log likelihood ratio log L_{n,k}(N) under either law.

    Draw g simulates all n users (input-0 users first), builds the message
    histogram and evaluates the exact pair ratio at it: through the affine
    identity for k = 0, through the enumerated ratio table otherwise (the
    table inherits the enumeration cap).  Returns `config.reps` values in
    draw order, independent of `config.workers`.
    """
    if channel.support is Support.SINGULAR:
        raise ValidationError("privacy-loss sampling needs min(W0) > 0; channel is SINGULAR")
    if comp.k > comp.n - 1:
        raise ValidationError(f"the pair (k, k+1) needs k <= n-1; got k={comp.k}, n={comp.n}")
    n, k = comp.n, comp.k
    ones = k + (1 if hypothesis is Hypothesis.ALT else 0)
    w = score_stats(channel).w
    lam_map = None
    if k > 0:
        hists, p_null, p_alt = _lr_table(channel, comp, cap)
        with np.errstate(divide="ignore"):
            lam_vals = np.log(p_alt / p_null)
        lam_map = {h: float(l) for h, l in zip(hists, lam_vals)}
    cdf0 = np.cumsum(channel.W0)
    cdf1 = np.cumsum(channel.W1)
    out = np.empty(config.reps, dtype=np.float64)
    chunk = max(1, _CHUNK_UNIFORMS // max(n, 1))

    def block(start: int, stop: int) -> None:
        for lo in range(start, stop, chunk):
            hi = min(lo + chunk, stop)
            u = _uniforms(config.seed, lo, hi - lo, n)
            sym = np.empty((hi - lo, n), dtype=np.int64)
            sym[:, : n - ones] = _categorical(cdf0, u[:, : n - ones])
            if ones:
                sym[:, n - ones :] = _categorical(cdf1, u[:, n - ones :])
            counts = np.stack(
                [(sym == y).sum(axis=1) for y in range(channel.d)], axis=1
            )
            if k == 0:
                lr = counts @ w / n
                with np.errstate(divide="ignore"):
                    out[lo:hi] = np.log(lr)
            else:
                out[lo:hi] = [lam_map[tuple(row)] for row in counts.tolist()]

    _run_blocks(config.reps, config.workers, block)
    return out


# ---------------------------------------------------------------------------
# Kolmogorov distances


def kolmogorov_to_gaussian(data, mu: float, hypothesis: Hypothesis) -> float:
    """Kolmogorov distance of centered privacy losses to the Gaussian limit.

    Under the null law (Lambda + mu^2/2)/mu is compared against a standard
    normal, under the alt law (Lambda - mu^2/2)/mu.  `data` is either an
    array of sampled Lambda values (empirical CDF) or an `LrAtomization`
    (exact atom masses under the requested hypothesis).
    """
    if mu <= 0.0:
        raise ValidationError(f"mu must be positive, got {mu!r}")
    shift = 0.5 * mu * mu if hypothesis is Hypothesis.NULL else -0.5 * mu * mu
    if isinstance(data, LrAtomization):
        with np.errstate(divide="ignore"):
            lam = np.log(data.lr)
        t = (lam + shift) / mu
        weights = data.p_null if hypothesis is Hypothesis.NULL else data.p_alt
        if hypothesis is Hypothesis.ALT and data.alt_singular_mass > 0.0:
            t = np.append(t, np.inf)
            weights = np.append(weights, data.alt_singular_mass)
        order = np.argsort(t)
        t, weights = t[order], np.asarray(weights)[order]
        cdf = np.cumsum(weights)
        cdf = cdf / cdf[-1]
        gauss = ndtr(t)
        before = np.concatenate(([0.0], cdf[:-1]))
        return float(np.max(np.maximum(np.abs(cdf - gauss), np.abs(before - gauss))))
    samples = np.asarray(data, dtype=np.float64)
    if samples.ndim != 1 or samples.size == 0:
        raise ValidationError("need a nonempty 1-d array of sampled values")
    t = np.sort((samples + shift) / mu)
    gauss = ndtr(t)
    m = samples.size
    upper = np.arange(1, m + 1) / m - gauss
    lower = gauss - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def dkw_radius(reps: int, gamma: float = 0.05) -> float:
    """Dvoretzky-Kiefer-Wolfowitz radius sqrt(log(2/gamma) / (2 reps))."""
    if reps < 1:
        raise ValidationError(f"reps must be >= 1, got {reps}")
    if not 0.0 < gamma < 1.0:
        raise ValidationError(f"gamma must be in (0, 1), got {gamma!r}")
    return math.sqrt(math.log(2.0 / gamma) / (2.0 * reps))


def rate_exponent(points) -> float:
    """Least-squares slope of log(value) against log(n).

    Needs at least three points with distinct n and positive values; exact
    power laws are recovered exactly (up to rounding).
    """
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 3:
        raise ValidationError("rate fit needs at least 3 points")
    ns = [p[0] for p in pts]
    vs = [p[1] for p in pts]
    if len(set(ns)) != len(ns):
        raise ValidationError("rate fit needs distinct n values")
    if any(n <= 0 for n in ns) or any(v <= 0 for v in vs):
        raise ValidationError("rate fit needs positive n and values")
    slope, _ = np.polyfit(np.log(ns), np.log(vs), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# randomized-response boundary diagnostics


def rr_boundary(
    eps0: float,
    n: int,
    sub_threshold: float = 0.1,
    super_threshold: float = 10.0,
) -> RrBoundary:
    """Score moments and regime classification for randomized response.

    The centered score takes the two values x_plus = e^{eps0} - 1 and
    x_minus = e^{-eps0} - 1; sigma2 and rho3 are its second and third
    absolute moments under the input-0 law.  The regime is decided by
    a_n = e^{eps0}/n against the supplied thresholds.
    """
    if not (isinstance(eps0, (int, float)) and math.isfinite(eps0)) or eps0 < 0.0:
        raise ValidationError(f"eps0 must be finite and >= 0, got {eps0!r}")
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    if not 0.0 < sub_threshold < super_threshold:
        raise ValidationError(
            f"need 0 < sub_threshold < super_threshold, got {sub_threshold!r}, {super_threshold!r}"
        )
    e = math.exp(eps0)
    q = 1.0 / (1.0 + e)
    a_n = e / n
    sigma2 = (e - 1.0) ** 2 / e
    rho3 = (e - 1.0) ** 3 * (1.0 + e**-2) / (1.0 + e)
    lyapunov = rho3 / (sigma2**1.5 * math.sqrt(n)) if sigma2 > 0.0 else 0.0
    if a_n < sub_threshold:
        regime = Regime.SUB_CRITICAL
    elif a_n > super_threshold:
        regime = Regime.SUPER_CRITICAL
    else:
        regime = Regime.CRITICAL
    return RrBoundary(
        eps0=eps0,
        n=n,
        q=q,
        a_n=a_n,
        x_plus=e - 1.0,
        x_minus=1.0 / e - 1.0,
        sigma2=sigma2,
        rho3=rho3,
        lyapunov_ratio=lyapunov,
        skew_bound=2.0 * math.exp(eps0 / 2.0),
        lyapunov_bound=2.0 * math.sqrt(a_n),
        regime=regime,
    )


# ---------------------------------------------------------------------------
# frequency estimation


def frequency_mse(eps0: float, n: int, p_true: float, config: SimConfig) -> FrequencyMseReport:
    """Monte Carlo MSE of the debiased randomized-response frequency estimate.

    The dataset holds round(p_true * n) ones; each trial flips every bit
    with probability q = 1/(1 + e^{eps0}), counts the reported ones K and
    estimates p_hat = (K/n - q)/(1 - 2q).  Errors are taken against the
    realized frequency, and the worst-case variance bound
    1/(4 n (1 - 2q)^2) is reported alongside.
    """
    if not (isinstance(eps0, (int, float)) and math.isfinite(eps0)) or eps0 <= 0.0:
        raise ValidationError(f"eps0 must be finite and > 0, got {eps0!r}")
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    if not 0.0 <= p_true <= 1.0:
        raise ValidationError(f"p_true must lie in [0, 1], got {p_true!r}")
    if config.reps < 1:
        raise ValidationError("frequency study needs reps >= 1")
    n_ones = int(math.floor(p_true * n + 0.5))
    p_realized = n_ones / n
    q = 1.0 / (1.0 + math.exp(eps0))
    denom = 1.0 - 2.0 * q
    errors = np.empty(config.reps, dtype=np.float64)
    chunk = max(1, _CHUNK_UNIFORMS // n)

    def block(start: int, stop: int) -> None:
        for lo in range(start, stop, chunk):
            hi = min(lo + chunk, stop)
            u = _uniforms(config.seed, lo, hi - lo, n)
            flips = u < q
            # reported one = bit XOR flip; bits are 0 for the first n-n_ones users
            k_reported = flips[:, : n - n_ones].sum(axis=1) + (
                (~flips[:, n - n_ones :]).sum(axis=1)
            )
            p_hat = (k_reported / n - q) / denom
            errors[lo:hi] = p_hat - p_realized

    _run_blocks(config.reps, config.workers, block)
    mse = float(np.mean(errors**2))
    bias = float(np.mean(errors))
    bias_se = float(np.std(errors, ddof=1) / math.sqrt(config.reps)) if config.reps > 1 else math.inf
    return FrequencyMseReport(
        mse_estimate=mse,
        mse_bound=1.0 / (4.0 * n * denom * denom),
        bias=bias,
        bias_se=bias_se,
        p_realized=p_realized,
        reps=config.reps,
    )
