"""Exact finite-n distributions of the shuffled histogram and their curves.

The observable after shuffling n binary-input users is the histogram N of
messages.  With k ones among the inputs, the histogram law T_{n,k} is an
n-fold convolution of single-user laws; the adjacent pair (T_{n,k},
T_{n,k+1}) is the binary hypothesis-testing experiment whose likelihood
ratio, privacy curve, trade-off curve and divergences are computed here,
exactly, atom by atom.

Conventions: the "null" hypothesis is T_{n,k} (k ones), the "alt" hypothesis
is T_{n,k+1} (one more one).  For k = 0 the likelihood ratio is affine in
the histogram: L(N) = (1/n) sum_y N_y w(y) with w = W1/W0, which is checked
against the conditional-expectation computation whenever both apply.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import binom

from .channels import Channel, Support, score_stats
from .errors import EnumerationCapError, InternalInvariantError, ValidationError
from .simplex_linalg import fisher_constant

# Refuse exact enumeration beyond this many histogram atoms.
DEFAULT_ATOM_CAP = 5_000_000

# Atoms whose likelihood ratios agree within this relative tolerance are
# merged into one.
MERGE_REL_TOL = 1e-12

# Switch binomial curve accumulation to log space above this n.
_LOGSPACE_MIN_N = 150

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Composition:
    """Number of users n and number of ones k in the (fixed) input dataset."""

    n: int
    k: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.k, int)):
            raise ValidationError("composition entries must be integers")
        if self.n < 0:
            raise ValidationError(f"need n >= 0, got n={self.n}")
        if not (0 <= self.k <= self.n):
            raise ValidationError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")


@dataclass
class HistogramLaw:
    """Exact law of the message histogram, as a dict from tuples to masses.

    `renormalized_by` is the factor applied to make the masses sum to one
    after the convolution (it stays within ~1e-12 of 1 in double precision).
    """

    n: int
    d: int
    atoms: dict[tuple[int, ...], float]
    renormalized_by: float = 1.0


class Sidedness(enum.Enum):
    """Direction of a privacy curve between the null and alt histogram laws.

    FORWARD measures how much the alt law (one more one) can exceed the
    null law; REVERSE the opposite; TWO_SIDED takes the pointwise maximum.
    """

    FORWARD = "forward"
    REVERSE = "reverse"
    TWO_SIDED = "two-sided"


@dataclass
class LrAtomization:
    """The likelihood-ratio atoms of the pair (T_{n,k}, T_{n,k+1}).

    Parallel arrays: `lr` holds the distinct ratio values (sorted
    increasing), `p_null` and `p_alt` the masses each value carries under
    the two laws.  `alt_singular_mass` is alt mass on null-null sets; it is
    zero for every atomization produced in this module (construction refuses
    SINGULAR channels) but participates in curve formulas for completeness.
    """

    n: int
    k: int
    lr: np.ndarray
    p_null: np.ndarray
    p_alt: np.ndarray
    alt_singular_mass: float = 0.0


@dataclass
class PrivacyCurve:
    """A hockey-stick curve delta(eps) evaluated on a grid."""

    eps: np.ndarray
    delta: np.ndarray
    sidedness: Sidedness

    def to_csv(self, header_lines: tuple[str, ...] = ()) -> str:
        return _table_to_csv(("epsilon", "delta"), zip(self.eps, self.delta), header_lines)


@dataclass
class TradeoffCurve:
    """Vertices (alpha_i, beta_i) of the optimal-test trade-off polyline.

    alpha is the probability of rejecting under the null law, beta the
    probability of accepting under the alt law; vertices are in increasing
    alpha order and the curve is their linear interpolation.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def beta_at(self, alpha) -> np.ndarray | float:
        """Smallest achievable type-II error at the given type-I level(s)."""
        a = np.clip(np.asarray(alpha, dtype=np.float64), 0.0, 1.0)
        out = np.interp(a, self.alpha, self.beta)
        return float(out) if np.isscalar(alpha) else out

    def to_csv(self, header_lines: tuple[str, ...] = ()) -> str:
        return _table_to_csv(("alpha", "beta"), zip(self.alpha, self.beta), header_lines)


@dataclass
class DivergenceReport:
    """Divergences of the alt law from the null law, computed from atoms."""

    jsd: float
    tv: float
    chi2: float
    kl: float
    renyi: dict[float, float] = field(default_factory=dict)


@dataclass
class ResidualSummary:
    """How far the conditional score sits from its linear prediction.

    Collected over histograms within the window
    ||N - E[N]||_inf <= window_mult * sqrt(n log n); `outside_mass` is the
    null mass that fell outside and was not examined.
    """

    max_abs: float
    rms: float
    outside_mass: float
    window_halfwidth: float
    n_inside: int
    pi: float


# ---------------------------------------------------------------------------
# histogram laws


def _atom_count(n: int, d: int) -> int:
    return math.comb(n + d - 1, d - 1)


def _check_cap(n: int, d: int, cap: int) -> None:
    count = _atom_count(n, d)
    if count > cap:
        raise EnumerationCapError(
            f"histogram support for n={n}, d={d} has {count} atoms "
            f"> cap {cap}; use montecarlo.sample_privacy_loss instead"
        )


def _convolve_user(law: dict, W: np.ndarray) -> dict:
    """One more user's message folded into a histogram law."""
    out: dict[tuple[int, ...], float] = {}
    support = [(y, float(p)) for y, p in enumerate(W) if p > 0.0]
    for h, mass in law.items():
        for y, p in support:
            h2 = h[:y] + (h[y] + 1,) + h[y + 1 :]
            out[h2] = out.get(h2, 0.0) + mass * p
    return out


def histogram_law(channel: Channel, comp: Composition, cap: int = DEFAULT_ATOM_CAP) -> HistogramLaw:
    """Exact law of the histogram for n users of which k have input one.

    Users are folded in one at a time, all input-0 users first (the law only
    depends on (n, k) by exchangeability; the canonical order lets callers
    reuse the (n-1, k) law as an intermediate).

    Raises:
        EnumerationCapError: the support would exceed `cap` atoms.
    """
    _check_cap(comp.n, channel.d, cap)
    law: dict[tuple[int, ...], float] = {(0,) * channel.d: 1.0}
    for _ in range(comp.n - comp.k):
        law = _convolve_user(law, channel.W0)
    for _ in range(comp.k):
        law = _convolve_user(law, channel.W1)
    total = math.fsum(law.values())
    factor = 1.0 / total
    if factor != 1.0:
        law = {h: m * factor for h, m in law.items()}
    return HistogramLaw(n=comp.n, d=channel.d, atoms=law, renormalized_by=factor)


def mean_histogram(channel: Channel, comp: Composition) -> np.ndarray:
    """E[N] = (n-k) W0 + k W1, exactly."""
    return (comp.n - comp.k) * channel.W0 + comp.k * channel.W1


# ---------------------------------------------------------------------------
# likelihood-ratio atomizations


def _merge_atoms(lr, p_null, p_alt, rel_tol: float = MERGE_REL_TOL):
    """Sort by ratio value and coalesce values equal up to rel_tol."""
    lr = np.asarray(lr, dtype=np.float64)
    p_null = np.asarray(p_null, dtype=np.float64)
    p_alt = np.asarray(p_alt, dtype=np.float64)
    order = np.argsort(lr, kind="stable")
    lr, p_null, p_alt = lr[order], p_null[order], p_alt[order]
    if lr.size == 0:
        return lr, p_null, p_alt
    gaps = np.diff(lr) > rel_tol * np.maximum(1.0, np.abs(lr[1:]))
    starts = np.concatenate(([0], np.nonzero(gaps)[0] + 1))
    mn = np.add.reduceat(p_null, starts)
    ma = np.add.reduceat(p_alt, starts)
    weighted = np.add.reduceat(lr * p_null, starts)
    # null-mass-weighted representative; plain mean for (unreachable) empty groups
    rep = np.where(mn > 0.0, weighted / np.where(mn > 0.0, mn, 1.0), lr[starts])
    return rep, mn, ma


def _lr_table(channel: Channel, comp: Composition, cap: int):
    """Null masses and ratios on the support of T_{n,k}, unmerged.

    Returns (histograms, p_null, p_alt) as parallel lists/arrays, built from
    the shared intermediate T_{n-1,k} law.
    """
    if channel.support is Support.SINGULAR:
        raise ValidationError(
            "likelihood-ratio atoms need min(W0) > 0; channel is SINGULAR"
        )
    if comp.k > comp.n - 1:
        raise ValidationError(
            f"the pair (k, k+1) needs k <= n-1; got k={comp.k}, n={comp.n}"
        )
    _check_cap(comp.n, channel.d, cap)
    base = histogram_law(channel, Composition(comp.n - 1, comp.k), cap=cap).atoms
    null: dict[tuple[int, ...], float] = {}
    alt: dict[tuple[int, ...], float] = {}
    for which, W, acc in ((0, channel.W0, null), (1, channel.W1, alt)):
        support = [(y, float(p)) for y, p in enumerate(W) if p > 0.0]
        for h, mass in base.items():
            for y, p in support:
                h2 = h[:y] + (h[y] + 1,) + h[y + 1 :]
                acc[h2] = acc.get(h2, 0.0) + mass * p
    hists = list(null.keys())
    p_null = np.array([null[h] for h in hists])
    p_alt = np.array([alt.get(h, 0.0) for h in hists])
    return hists, p_null, p_alt


def lr_atoms(channel: Channel, comp: Composition, cap: int = DEFAULT_ATOM_CAP) -> LrAtomization:
    """Exact likelihood-ratio atoms of T_{n,k+1} against T_{n,k}.

    Both laws are derived from the single intermediate T_{n-1,k}: appending
    one input-0 user gives the null law, one input-1 user the alt law, and
    their ratio at a histogram N is the posterior mean of w(Y) for the
    appended message.  For k = 0 the result is cross-checked against the
    affine identity L(N) = (1/n) sum_y N_y w(y).

    Raises:
        ValidationError: SINGULAR channel or k > n-1.
        EnumerationCapError: support larger than `cap`.
    """
    hists, p_null, p_alt = _lr_table(channel, comp, cap)
    lr = p_alt / p_null
    if comp.k == 0:
        w = score_stats(channel).w
        H = np.array(hists, dtype=np.float64)
        affine = H @ w / comp.n
        err = float(np.max(np.abs(affine - lr)))
        if err > 1e-10:
            raise InternalInvariantError(
                f"affine likelihood-ratio identity violated by {err:.3e} at k=0"
            )
    lr, p_null, p_alt = _merge_atoms(lr, p_null, p_alt)
    atoms = LrAtomization(n=comp.n, k=comp.k, lr=lr, p_null=p_null, p_alt=p_alt)
    _check_atomization(atoms)
    return atoms


def binomial_lr_atoms(channel: Channel, n: int) -> LrAtomization:
    """Atoms of the k=0 pair for a two-symbol channel, via the binomial law.

    The histogram reduces to the count K ~ Binomial(n, W0[1]) under the null
    law, and the ratio is affine in K; this scales to n in the thousands
    where the generic enumeration is unnecessary.
    """
    if channel.d != 2:
        raise ValidationError(f"binomial atoms need d=2, got d={channel.d}")
    if channel.support is Support.SINGULAR:
        raise ValidationError("binomial atoms need min(W0) > 0; channel is SINGULAR")
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    p0 = float(channel.W0[1])
    w = score_stats(channel).w
    K = np.arange(n + 1, dtype=np.float64)
    p_null = binom.pmf(np.arange(n + 1), n, p0)
    lr = ((n - K) / n) * w[0] + (K / n) * w[1]
    p_alt = lr * p_null
    keep = p_null > 0.0
    lr, p_null, p_alt = _merge_atoms(lr[keep], p_null[keep], p_alt[keep])
    atoms = LrAtomization(n=n, k=0, lr=lr, p_null=p_null, p_alt=p_alt)
    _check_atomization(atoms)
    return atoms


def reverse_atomization(atoms: LrAtomization) -> LrAtomization:
    """Swap the roles of the two laws: ratios invert, masses exchange.

    Null mass on zero-ratio atoms becomes singular mass of the reversed
    direction (the reversed ratio is infinite there), and vice versa, so
    reversing twice gives back the original atomization.
    """
    zero = atoms.lr == 0.0
    singular = float(atoms.p_null[zero].sum())
    keep = ~zero
    lr = 1.0 / atoms.lr[keep]
    p_null = atoms.p_alt[keep]
    p_alt = atoms.p_null[keep]
    if atoms.alt_singular_mass > 0.0:
        lr = np.append(lr, 0.0)
        p_null = np.append(p_null, atoms.alt_singular_mass)
        p_alt = np.append(p_alt, 0.0)
    order = np.argsort(lr)
    return LrAtomization(
        n=atoms.n,
        k=atoms.k,
        lr=lr[order],
        p_null=p_null[order],
        p_alt=p_alt[order],
        alt_singular_mass=singular,
    )


def _check_atomization(atoms: LrAtomization, tol: float = 1e-9) -> None:
    total_null = float(atoms.p_null.sum())
    total_alt = float(atoms.p_alt.sum()) + atoms.alt_singular_mass
    mean_lr = float(np.dot(atoms.lr, atoms.p_null)) + atoms.alt_singular_mass
    for label, value in (("null", total_null), ("alt", total_alt), ("E_null[L]", mean_lr)):
        if abs(value - 1.0) > tol:
            raise InternalInvariantError(
                f"atomization {label} mass is {value!r}, off 1 by more than {tol}"
            )


# ---------------------------------------------------------------------------
# privacy curves


def _check_eps_grid(eps) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(eps, dtype=np.float64))
    if arr.size == 0:
        raise ValidationError("epsilon grid is empty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise ValidationError("epsilon grid entries must be finite and >= 0")
    return arr


def _hockey_stick(lr, weights, singular: float, eps: np.ndarray) -> np.ndarray:
    """delta(eps) = sum weights * (lr - e^eps)_+ + singular, clipped to [0,1]."""
    excess = lr[None, :] - np.exp(eps)[:, None]
    delta = np.sum(np.where(excess > 0.0, excess, 0.0) * weights[None, :], axis=1)
    return np.clip(delta + singular, 0.0, 1.0)


def privacy_curve(
    atoms: LrAtomization, eps, sidedness: Sidedness = Sidedness.FORWARD
) -> PrivacyCurve:
    """Evaluate the hockey-stick divergence of the atomized pair on a grid.

    FORWARD is E_null[(L - e^eps)_+] plus any alt-singular mass; REVERSE
    applies the same formula to the reversed atomization; TWO_SIDED is their
    pointwise maximum.  Values are clipped into [0, 1].
    """
    grid = _check_eps_grid(eps)
    if sidedness is Sidedness.FORWARD:
        delta = _hockey_stick(atoms.lr, atoms.p_null, atoms.alt_singular_mass, grid)
    elif sidedness is Sidedness.REVERSE:
        rev = reverse_atomization(atoms)
        delta = _hockey_stick(rev.lr, rev.p_null, rev.alt_singular_mass, grid)
    elif sidedness is Sidedness.TWO_SIDED:
        rev = reverse_atomization(atoms)
        delta = np.maximum(
            _hockey_stick(atoms.lr, atoms.p_null, atoms.alt_singular_mass, grid),
            _hockey_stick(rev.lr, rev.p_null, rev.alt_singular_mass, grid),
        )
    else:  # pragma: no cover - exhaustive enum
        raise ValidationError(f"unknown sidedness {sidedness!r}")
    return PrivacyCurve(eps=grid, delta=delta, sidedness=sidedness)


def binomial_curve(channel: Channel, n: int, eps) -> PrivacyCurve:
    """Forward curve of the k=0 pair for d=2, straight from the binomial sum.

    delta(eps) = sum_K C(n,K) p0^K (1-p0)^(n-K) (L(K) - e^eps)_+ with the
    affine ratio L(K).  Above n = 150 the sum is accumulated in log space
    (log binomial weights via log-gamma, combined with log-sum-exp) so that
    far-tail weights do not underflow; below, terms are summed directly with
    compensated summation.
    """
    if channel.d != 2:
        raise ValidationError(f"binomial curve needs d=2, got d={channel.d}")
    if channel.support is Support.SINGULAR:
        raise ValidationError("binomial curve needs min(W0) > 0; channel is SINGULAR")
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    grid = _check_eps_grid(eps)
    p0 = float(channel.W0[1])
    w = score_stats(channel).w
    K = np.arange(n + 1, dtype=np.float64)
    lr = ((n - K) / n) * w[0] + (K / n) * w[1]
    if n <= _LOGSPACE_MIN_N:
        pmf = binom.pmf(np.arange(n + 1), n, p0)
        delta = np.array(
            [
                math.fsum(
                    p * (l - t) for l, p in zip(lr, pmf) if l > t
                )
                for t in np.exp(grid)
            ]
        )
    else:
        log_pmf = (
            gammaln(n + 1)
            - gammaln(K + 1)
            - gammaln(n - K + 1)
            + K * math.log(p0)
            + (n - K) * math.log1p(-p0)
        )
        delta = np.empty(grid.size)
        for i, t in enumerate(np.exp(grid)):
            active = lr > t
            if not np.any(active):
                delta[i] = 0.0
                continue
            delta[i] = math.exp(
                logsumexp(log_pmf[active] + np.log(lr[active] - t))
            )
    return PrivacyCurve(
        eps=grid, delta=np.clip(delta, 0.0, 1.0), sidedness=Sidedness.FORWARD
    )


# ---------------------------------------------------------------------------
# divergences and trade-off


def _jsd_kernel(t: float) -> float:
    """Per-atom Jensen-Shannon integrand D(t); D(0) = (log 2)/2."""
    if t == 0.0:
        return 0.5 * _LOG2
    return 0.5 * math.log(2.0 / (1.0 + t)) + 0.5 * t * math.log(2.0 * t / (1.0 + t))


def divergences(atoms: LrAtomization, renyi_orders=()) -> DivergenceReport:
    """Standard divergences of the alt law from the null law.

    JSD and TV tolerate one-sided support loss (zero-ratio atoms and
    alt-singular mass); the chi-square and KL divergences are infinite when
    alt mass sits outside the null support.  Renyi orders must exceed 1 and
    additionally require full support in both directions.
    """
    lr, p_null = atoms.lr, atoms.p_null
    sing = atoms.alt_singular_mass
    jsd = math.fsum(p * _jsd_kernel(l) for l, p in zip(lr, p_null)) + sing * 0.5 * _LOG2
    tv = math.fsum(p * (l - 1.0) for l, p in zip(lr, p_null) if l > 1.0) + sing
    if sing > 0.0:
        chi2 = math.inf
        kl = math.inf
    else:
        chi2 = math.fsum(p * (l - 1.0) ** 2 for l, p in zip(lr, p_null))
        kl = math.fsum(p * l * math.log(l) for l, p in zip(lr, p_null) if l > 0.0)
    renyi: dict[float, float] = {}
    for alpha in renyi_orders:
        alpha = float(alpha)
        if alpha <= 1.0:
            raise ValidationError(f"Renyi order must exceed 1, got {alpha}")
        if sing > 0.0 or np.any(lr == 0.0):
            raise ValidationError(
                "Renyi divergence needs full support in both directions"
            )
        moment = math.fsum(p * l**alpha for l, p in zip(lr, p_null))
        renyi[alpha] = math.log(moment) / (alpha - 1.0)
    return DivergenceReport(jsd=jsd, tv=tv, chi2=chi2, kl=kl, renyi=renyi)


def tradeoff_curve(atoms: LrAtomization) -> TradeoffCurve:
    """Exact optimal trade-off polyline by the likelihood-ratio sweep.

    Atoms are rejected in decreasing ratio order; each prefix contributes a
    vertex (null mass rejected, alt mass accepted).  Alt-singular mass is
    rejected first at no alpha cost, so the curve starts at
    (0, 1 - alt_singular_mass) and always ends at (1, 0).
    """
    order = np.argsort(-atoms.lr, kind="stable")
    pn = atoms.p_null[order]
    pa = atoms.p_alt[order]
    alpha = np.concatenate(([0.0], np.cumsum(pn)))
    beta = np.concatenate(([1.0 - atoms.alt_singular_mass], 1.0 - atoms.alt_singular_mass - np.cumsum(pa)))
    if abs(alpha[-1] - 1.0) > 1e-9 or abs(beta[-1]) > 1e-9:
        raise InternalInvariantError(
            f"trade-off sweep ended at ({alpha[-1]!r}, {beta[-1]!r}), not (1, 0)"
        )
    alpha[-1] = 1.0
    beta = np.clip(beta, 0.0, 1.0)
    beta[-1] = 0.0
    return TradeoffCurve(alpha=alpha, beta=beta)


# ---------------------------------------------------------------------------
# conditional score and its linearization


def conditional_score(channel: Channel, comp: Composition, histogram, cap: int = DEFAULT_ATOM_CAP) -> float:
    """Conditional mean score U(N) = L_{n,k}(N) - 1 at a single histogram.

    Raises:
        ValidationError: histogram of wrong shape/mass, or null probability
            zero at N (the score is undefined off the support).
    """
    if channel.support is Support.SINGULAR:
        raise ValidationError("conditional score needs min(W0) > 0; channel is SINGULAR")
    if comp.k > comp.n - 1:
        raise ValidationError(f"the pair (k, k+1) needs k <= n-1; got k={comp.k}, n={comp.n}")
    h = tuple(int(x) for x in histogram)
    if len(h) != channel.d:
        raise ValidationError(f"histogram has {len(h)} cells, channel has d={channel.d}")
    if any(x < 0 for x in h) or sum(h) != comp.n:
        raise ValidationError(f"histogram {h} is not a size-{comp.n} count vector")
    base = histogram_law(channel, Composition(comp.n - 1, comp.k), cap=cap).atoms
    num = 0.0
    den = 0.0
    for y in range(channel.d):
        if h[y] == 0:
            continue
        prev = h[:y] + (h[y] - 1,) + h[y + 1 :]
        mass = base.get(prev)
        if mass is None:
            continue
        den += float(channel.W0[y]) * mass
        num += float(channel.W1[y]) * mass
    if den <= 0.0:
        raise ValidationError(f"histogram {h} has zero null probability")
    return num / den - 1.0


def linearization_residual(
    channel: Channel,
    comp: Composition,
    window_mult: float = 3.0,
    pi_convention: str = "k_over_n_minus_1",
    cap: int = DEFAULT_ATOM_CAP,
) -> ResidualSummary:
    """Residual of U(N) against its linear prediction, over a window.

    The prediction is (1/n) s . (N - E[N]) where s solves the
    fixed-composition covariance system at pi = k/(n-1) (the appended user's
    point of view; pass pi_convention="k_over_n" for the plain fraction).
    Histograms with ||N - E[N]||_inf beyond window_mult * sqrt(n log n) are
    skipped and their null mass reported as `outside_mass`.
    """
    if comp.n < 2:
        raise ValidationError("linearization needs n >= 2")
    if pi_convention == "k_over_n_minus_1":
        pi = comp.k / (comp.n - 1)
    elif pi_convention == "k_over_n":
        pi = comp.k / comp.n
    else:
        raise ValidationError(f"unknown pi convention {pi_convention!r}")
    if window_mult <= 0.0:
        raise ValidationError(f"window_mult must be positive, got {window_mult!r}")
    s = fisher_constant(channel, pi).s
    hists, p_null, p_alt = _lr_table(channel, comp, cap)
    U = p_alt / p_null - 1.0
    center = mean_histogram(channel, comp)
    dev = np.array(hists, dtype=np.float64) - center
    half = window_mult * math.sqrt(comp.n * math.log(comp.n))
    inside = np.max(np.abs(dev), axis=1) <= half
    residual = np.abs(U - (dev @ s) / comp.n)
    mass_in = float(p_null[inside].sum())
    if mass_in <= 0.0:
        raise ValidationError("window excludes the entire support; widen window_mult")
    rms = math.sqrt(float(np.dot(p_null[inside], residual[inside] ** 2)) / mass_in)
    return ResidualSummary(
        max_abs=float(residual[inside].max()),
        rms=rms,
        outside_mass=float(p_null[~inside].sum()),
        window_halfwidth=half,
        n_inside=int(inside.sum()),
        pi=pi,
    )


# ---------------------------------------------------------------------------
# CSV serialization (17 significant digits; round-trips exactly)


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _table_to_csv(columns, rows, header_lines=()) -> str:
    lines = [line if line.startswith("#") else f"# {line}" for line in header_lines]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def law_to_csv(law: HistogramLaw, header_lines: tuple[str, ...] = ()) -> str:
    """Serialize a histogram law with columns h_0,...,h_{d-1},prob."""
    columns = tuple(f"h_{i}" for i in range(law.d)) + ("prob",)
    rows = (h + (p,) for h, p in sorted(law.atoms.items()))
    return _table_to_csv(columns, rows, header_lines)


def parse_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Read back a CSV written by this module: (column names, value array)."""
    rows = []
    columns: list[str] | None = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if columns is None:
            columns = line.split(",")
            continue
        rows.append([float(tok) for tok in line.split(",")])
    if columns is None:
        raise ValidationError("CSV has no header row")
    return columns, np.array(rows, dtype=np.float64)
