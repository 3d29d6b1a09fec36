"""Command-line front end: curve, report, and simulate subcommands.

Every emitted file starts with a '#'-prefixed manifest (tool version,
command, resolved parameters, channel fingerprint) so results are traceable
to their inputs.  Worker count and wall-clock time are deliberately left
out of the default manifest: files produced with the same seed must be
byte-identical no matter how the work was parallelized (pass --stamp to
record them anyway).
"""

import argparse
import dataclasses
import datetime
import enum
import hashlib
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .asymptotics import gdp_mu, gdp_delta, jsd_canonical_asymptotic
from .bounds import chernoff_delta
from .channels import Channel, Support, channel_from_json, score_stats
from .errors import EnumerationCapError, InternalInvariantError, ValidationError
from .exact_dist import (
    DEFAULT_ATOM_CAP,
    Composition,
    PrivacyCurve,
    Sidedness,
    _fmt,
    binomial_curve,
    lr_atoms,
    privacy_curve,
)
from .montecarlo import (
    Hypothesis,
    SimConfig,
    dkw_radius,
    kolmogorov_to_gaussian,
    rr_boundary,
    sample_privacy_loss,
)
from .multimessage import mm_gdp_compare
from .simplex_linalg import fisher_constant, fisher_via_mixture

DEFAULT_EPS_SPEC = "log:1e-3:10:64"

_SIDEDNESS = {
    "forward": Sidedness.FORWARD,
    "reverse": Sidedness.REVERSE,
    "two-sided": Sidedness.TWO_SIDED,
}


@dataclass(frozen=True)
class RunManifest:
    """Provenance header embedded in every output file.

    `params` lists the result-determining parameters only; timestamp and
    workers are optional stamps that change bytes run-to-run and are off by
    default.
    """

    command: str
    params: tuple
    fingerprint: str
    version: str
    timestamp: str | None = None
    workers: int | None = None

    def header_lines(self) -> tuple:
        lines = [
            f"shuffledp-version: {self.version}",
            f"command: {self.command}",
            f"channel-sha256: {self.fingerprint}",
        ]
        lines += [f"{key}: {value}" for key, value in self.params]
        if self.workers is not None:
            lines.append(f"workers: {self.workers}")
        if self.timestamp is not None:
            lines.append(f"timestamp: {self.timestamp}")
        return tuple(lines)

    def as_dict(self) -> dict:
        out = {
            "version": self.version,
            "command": self.command,
            "channel_sha256": self.fingerprint,
        }
        out.update({key: value for key, value in self.params})
        if self.workers is not None:
            out["workers"] = self.workers
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out


def canonical_channel_json(channel: Channel) -> str:
    """Whitespace-free channel JSON; the fingerprint hashes exactly this."""
    payload = {"d": channel.d, "W0": channel.W0.tolist(), "W1": channel.W1.tolist()}
    return json.dumps(payload, separators=(",", ":"))


def channel_fingerprint(channel: Channel) -> str:
    return hashlib.sha256(canonical_channel_json(channel).encode("ascii")).hexdigest()


def parse_eps_grid(spec: str) -> np.ndarray:
    """Parse an epsilon-grid spec: 'log:lo:hi:count', 'lin:lo:hi:count', or
    a comma-separated list (sorted ascending)."""
    spec = spec.strip()
    if spec.startswith(("log:", "lin:")):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ValidationError(f"grid spec needs kind:lo:hi:count, got {spec!r}")
        try:
            lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ValidationError(f"bad grid spec {spec!r}: {exc}") from None
        if count < 1:
            raise ValidationError(f"grid count must be >= 1, got {count}")
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ValidationError(f"grid needs finite lo <= hi, got {spec!r}")
        if parts[0] == "log":
            if lo <= 0.0:
                raise ValidationError("log grid needs lo > 0")
            return np.geomspace(lo, hi, count) if count > 1 else np.array([lo])
        if lo < 0.0:
            raise ValidationError("epsilon grid must be nonnegative")
        return np.linspace(lo, hi, count)
    try:
        values = np.array([float(tok) for tok in spec.split(",") if tok.strip()])
    except ValueError as exc:
        raise ValidationError(f"bad epsilon list {spec!r}: {exc}") from None
    if values.size == 0:
        raise ValidationError("empty epsilon grid")
    if not np.all(np.isfinite(values)) or np.any(values < 0.0):
        raise ValidationError("epsilons must be finite and nonnegative")
    return np.sort(values)


# ---------------------------------------------------------------------------
# minimal SVG line chart (no plotting dependency)


def svg_line_chart(
    x,
    y,
    xlabel: str = "epsilon",
    ylabel: str = "delta",
    log_x: bool = False,
    log_y: bool = False,
    width: int = 640,
    height: int = 440,
) -> str:
    """Render one polyline with axes and tick labels as a standalone SVG.

    Log axes silently drop nonpositive points (a privacy curve hits exactly
    zero); an empty or single-point series still renders valid axes.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    keep = np.isfinite(x) & np.isfinite(y)
    if log_x:
        keep &= x > 0.0
    if log_y:
        keep &= y > 0.0
    x, y = x[keep], y[keep]
    tx = np.log10(x) if log_x else x
    ty = np.log10(y) if log_y else y
    left, right, top, bottom = 70.0, 20.0, 20.0, 50.0
    pw, ph = width - left - right, height - top - bottom

    def span(t):
        if t.size == 0:
            return 0.0, 1.0
        lo, hi = float(t.min()), float(t.max())
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        return lo, hi

    x0, x1 = span(tx)
    y0, y1 = span(ty)
    px = left + (tx - x0) / (x1 - x0) * pw
    py = top + (y1 - ty) / (y1 - y0) * ph
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        gx = left + frac * pw
        gy = top + (1.0 - frac) * ph
        vx = x0 + frac * (x1 - x0)
        vy = y0 + frac * (y1 - y0)
        lx = 10.0**vx if log_x else vx
        ly = 10.0**vy if log_y else vy
        parts.append(
            f'<line x1="{gx:.2f}" y1="{height - bottom}" x2="{gx:.2f}" '
            f'y2="{height - bottom + 5}" stroke="black"/>'
            f'<text x="{gx:.2f}" y="{height - bottom + 18}" font-size="11" '
            f'text-anchor="middle">{lx:.3g}</text>'
        )
        parts.append(
            f'<line x1="{left - 5}" y1="{gy:.2f}" x2="{left}" y2="{gy:.2f}" stroke="black"/>'
            f'<text x="{left - 8}" y="{gy + 4:.2f}" font-size="11" '
            f'text-anchor="end">{ly:.3g}</text>'
        )
    parts.append(
        f'<text x="{left + pw / 2:.2f}" y="{height - 10}" font-size="13" '
        f'text-anchor="middle">{xlabel}{" (log)" if log_x else ""}</text>'
    )
    parts.append(
        f'<text x="16" y="{top + ph / 2:.2f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.2f})">{ylabel}{" (log)" if log_y else ""}</text>'
    )
    if x.size >= 2:
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>')
    elif x.size == 1:
        parts.append(f'<circle cx="{px[0]:.2f}" cy="{py[0]:.2f}" r="3" fill="#1f5fa8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# shared plumbing


def _load_channel(path: str) -> Channel:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read channel file {path!r}: {exc}") from None
    return channel_from_json(text)


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def _default_pi(n: int, k: int) -> float:
    return k / (n - 1) if n > 1 else 0.0


def _is_rr(channel: Channel) -> float | None:
    """Return eps0 if the channel is (numerically) a randomized-response
    channel, else None."""
    if channel.d != 2:
        return None
    if abs(channel.W0[0] - channel.W1[1]) > 1e-12 or abs(channel.W0[1] - channel.W1[0]) > 1e-12:
        return None
    if channel.W0[0] <= 0.0 or channel.W0[1] <= 0.0:
        return None
    return abs(math.log(channel.W0[0] / channel.W0[1]))


# ---------------------------------------------------------------------------
# subcommands


def cmd_curve(args) -> int:
    channel = _load_channel(args.channel)
    comp = Composition(args.n, args.k)
    eps = parse_eps_grid(args.eps)
    sidedness = _SIDEDNESS[args.sidedness]
    extra: list = []
    if args.engine == "exact":
        curve = privacy_curve(lr_atoms(channel, comp, cap=args.cap), eps, sidedness)
    elif args.engine == "binomial":
        if sidedness is not Sidedness.FORWARD:
            raise ValidationError("engine=binomial computes the forward curve only")
        if args.k != 0:
            raise ValidationError("engine=binomial handles the canonical pair k=0 only")
        curve = binomial_curve(channel, args.n, eps)
    elif args.engine == "gdp":
        if sidedness is not Sidedness.FORWARD:
            raise ValidationError("engine=gdp computes the forward curve only")
        params = gdp_mu(channel, args.n, pi=_default_pi(args.n, args.k))
        delta = np.array([gdp_delta(e, params.mu) for e in eps])
        curve = PrivacyCurve(eps, delta, Sidedness.FORWARD)
        extra = [f"gdp-mu: {_fmt(params.mu)}", f"gdp-source: {params.source.value}"]
    elif args.engine == "chernoff":
        if sidedness is not Sidedness.FORWARD:
            raise ValidationError("engine=chernoff bounds the forward curve only")
        if args.k != 0:
            raise ValidationError("engine=chernoff handles the canonical pair k=0 only")
        delta = np.array([chernoff_delta(channel, args.n, e).bound for e in eps])
        curve = PrivacyCurve(eps, delta, Sidedness.FORWARD)
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown engine {args.engine!r}")

    manifest = RunManifest(
        command="curve",
        params=(
            ("channel", args.channel),
            ("n", args.n),
            ("k", args.k),
            ("engine", args.engine),
            ("sidedness", args.sidedness),
            ("eps", args.eps),
        ),
        fingerprint=channel_fingerprint(channel),
        version=__version__,
        timestamp=_now() if args.stamp else None,
    )
    headers = manifest.header_lines() + tuple(extra)
    if args.format == "csv":
        text = curve.to_csv(header_lines=headers)
    else:
        text = json.dumps(
            {
                "manifest": manifest.as_dict(),
                "extra": extra,
                "epsilon": curve.eps.tolist(),
                "delta": curve.delta.tolist(),
            },
            indent=2,
        ) + "\n"
    _write_output(text, args.out)
    if args.engine == "gdp" and args.out is not None:
        print(f"gdp_mu = {_fmt(params.mu)} ({params.source.value})")
    if args.svg is not None:
        chart = svg_line_chart(
            curve.eps,
            curve.delta,
            log_x="x" in args.svg_log,
            log_y="y" in args.svg_log,
        )
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(chart)
    return 0


def cmd_report(args) -> int:
    channel = _load_channel(args.channel)
    if args.k is not None and args.pi is not None:
        raise ValidationError("give at most one of --k / --pi")
    pi = args.pi if args.pi is not None else _default_pi(args.n, args.k or 0)
    if not 0.0 <= pi <= 1.0:
        raise ValidationError(f"pi must lie in [0, 1], got {pi!r}")
    stats = score_stats(channel)
    report: dict = {
        "version": __version__,
        "channel": {
            "d": channel.d,
            "support": channel.support.value,
            "sha256": channel_fingerprint(channel),
            "delta_star": stats.delta_star,
            "delta_full": stats.delta_full,
        },
        "score": {"chi2": stats.chi2, "mu3": stats.mu3, "w_max": stats.w_max},
    }
    if not np.any(stats.v):
        report["note"] = "perfect privacy: v = 0"
    if channel.support is Support.FULL:
        fisher = fisher_constant(channel, pi)
        report["fisher"] = {
            "pi": pi,
            "I_pi": fisher.fisher,
            "I_pi_mixture_form": fisher_via_mixture(channel, pi),
            "I_mixture": fisher.fisher_mixture,
        }
        gdp: dict = {
            "mu_canonical": gdp_mu(channel, args.n, pi=0.0).mu,
            "mu_at_pi": gdp_mu(channel, args.n, pi=pi).mu if pi > 0.0 else None,
        }
        if args.m > 1:
            unb = gdp_mu(channel, args.n, pi=pi, m=args.m)
            gdp["mu_unbundled"] = unb.mu
            gdp["m"] = args.m
        report["gdp"] = gdp
        if args.m > 1:
            report["multimessage"] = _jsonable(mm_gdp_compare(channel, args.m))
    else:
        report["fisher"] = None
        report["gdp"] = None
    report["jsd_canonical"] = _jsonable(jsd_canonical_asymptotic(channel, args.n))
    eps0 = _is_rr(channel)
    if eps0 is not None:
        report["rr_boundary"] = _jsonable(rr_boundary(eps0, args.n))
    print(json.dumps(_jsonable(report), indent=2))
    return 0


def cmd_simulate(args) -> int:
    channel = _load_channel(args.channel)
    if channel.support is not Support.FULL:
        raise ValidationError("simulate needs a FULL channel (strictly positive W0 and W1)")
    comp = Composition(args.n, args.k)
    hypothesis = Hypothesis.NULL if args.hypothesis == "null" else Hypothesis.ALT
    config = SimConfig(seed=args.seed, reps=args.reps, workers=args.workers)
    lam = sample_privacy_loss(channel, comp, hypothesis, config, cap=args.cap)
    manifest = RunManifest(
        command="simulate",
        params=(
            ("channel", args.channel),
            ("n", args.n),
            ("k", args.k),
            ("hypothesis", args.hypothesis),
            ("seed", args.seed),
            ("reps", args.reps),
        ),
        fingerprint=channel_fingerprint(channel),
        version=__version__,
        timestamp=_now() if args.stamp else None,
        workers=args.workers if args.stamp else None,
    )
    summary = None
    if args.reps > 0:
        params = gdp_mu(channel, args.n, pi=_default_pi(args.n, args.k))
        exp_lam = np.exp(lam)
        summary = {
            "reps": args.reps,
            "mean_exp_lambda": float(exp_lam.mean()),
            "se_exp_lambda": float(exp_lam.std(ddof=1) / math.sqrt(args.reps))
            if args.reps > 1
            else None,
            "gdp_mu": params.mu,
            "kolmogorov_to_gaussian": kolmogorov_to_gaussian(lam, params.mu, hypothesis),
            "dkw_radius_95": dkw_radius(args.reps),
        }
    lines = [f"# {line}" for line in manifest.header_lines()]
    if args.format == "csv":
        lines.append("lambda")
        lines.extend(_fmt(v) for v in lam)
        if summary is not None:
            lines.append("# summary " + json.dumps(summary, separators=(",", ":")))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(
            {"manifest": manifest.as_dict(), "lambda": lam.tolist(), "summary": summary},
            indent=2,
        ) + "\n"
    _write_output(text, args.out)
    if args.out is not None and summary is not None:
        print(json.dumps(summary, indent=2))
    return 0


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# parser / entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shuffledp",
        description="Exact and asymptotic privacy accounting for shuffled binary-input channels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--channel", required=True, help="channel JSON file")
        p.add_argument("--n", type=int, required=True, help="number of users")
        p.add_argument("--k", type=int, default=0, help="ones in the null dataset (default 0)")
        p.add_argument(
            "--cap",
            type=int,
            default=DEFAULT_ATOM_CAP,
            help="enumeration cap on histogram atoms",
        )
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument(
            "--stamp",
            action="store_true",
            help="record timestamp (and workers) in the manifest; breaks byte-identity",
        )

    p_curve = sub.add_parser("curve", help="compute a delta(eps) curve")
    common(p_curve)
    p_curve.add_argument(
        "--engine", choices=("exact", "binomial", "gdp", "chernoff"), default="exact"
    )
    p_curve.add_argument(
        "--eps",
        default=DEFAULT_EPS_SPEC,
        help="grid spec: log:lo:hi:count, lin:lo:hi:count, or comma list",
    )
    p_curve.add_argument(
        "--sidedness", choices=tuple(_SIDEDNESS), default="forward"
    )
    p_curve.add_argument("--svg", default=None, help="also render the curve to this SVG file")
    p_curve.add_argument(
        "--svg-log",
        choices=("none", "x", "y", "xy"),
        default="x",
        help="which SVG axes use log scale",
    )
    p_curve.set_defaults(func=cmd_curve)

    p_report = sub.add_parser("report", help="channel / asymptotics summary as JSON")
    p_report.add_argument("--channel", required=True)
    p_report.add_argument("--n", type=int, required=True)
    p_report.add_argument("--k", type=int, default=None)
    p_report.add_argument("--pi", type=float, default=None)
    p_report.add_argument("--m", type=int, default=1, help="messages per user (default 1)")
    p_report.set_defaults(func=cmd_report)

    p_sim = sub.add_parser("simulate", help="sample the privacy loss, deterministically")
    common(p_sim)
    p_sim.add_argument("--hypothesis", choices=("null", "alt"), default="null")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--reps", type=int, default=10000)
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
