"""Command-line front end: closed-form evaluation, metric curves, and
Monte Carlo validation, emitted as deterministic CSV or JSON datasets.

Thresholds inside the library are in eigenvalue units; dB grids are
interpreted relative to a seeded Monte Carlo estimate of the mean of the
selected extreme eigenvalue (10^5 samples), and all outputs are
byte-identical for identical invocations including the seed.

Exit codes: 0 success, 2 usage error, 3 numerical-precision failure,
4 Monte Carlo validation failure.
"""

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .bivariate import (
    CorrelationState,
    JointPoint,
    joint_ccdf_smallest,
    joint_cdf_largest,
    joint_cdf_smallest,
)
from .eigendist import ChannelDims, WishartEnsemble, ccdf_smallest, cdf_largest
from .errors import (
    AfdUndefinedError,
    CapabilityError,
    ConvergenceError,
    DomainError,
    NumericalConsistencyError,
    PrecisionWarning,
    UnsupportedParameterError,
)
from .metrics import (
    CorrelationProfile,
    clarke_rho_sq,
    invert_outage,
    level_crossing,
    marginal_outage,
    normalized_mi,
    outage_table,
)
from .montecarlo import (
    McConfig,
    empirical_joint_ccdf,
    empirical_joint_cdf,
    estimate_mean_extremes,
    sample_pairs,
)

DEFAULT_SEED = 12345
MEAN_REF_SAMPLES = 100_000
MC_QUANTILES = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class GridSpec:
    """Parsed --grid axis: points are linear values or dB offsets."""

    start: float
    stop: float
    points: int
    db: bool

    def values(self) -> List[float]:
        if self.points == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.points - 1)
        return [self.start + i * step for i in range(self.points)]


@dataclass(frozen=True)
class RunSpec:
    """Everything one subcommand invocation needs, normalized."""

    command: str
    dims: ChannelDims
    sigma_sq: float
    which: str
    rho_sq: Optional[float]
    profile: Optional[CorrelationProfile]
    grid: Optional[GridSpec]
    pout_target: float
    seed: int
    n_samples: int
    out: Optional[str]
    fmt: str
    corrupt: bool = False

    @property
    def ensemble(self) -> WishartEnsemble:
        return WishartEnsemble(dims=self.dims, sigma_sq=self.sigma_sq)

    def resolved_rho_sq(self) -> float:
        if self.rho_sq is not None:
            return self.rho_sq
        if self.profile is not None:
            return self.profile.rho_sq
        raise DomainError("no correlation specified")


def _fmt(v: float) -> str:
    return "%.17g" % float(v)


def _corr_echo(spec: RunSpec):
    if spec.rho_sq is not None:
        return {"rho_sq": spec.rho_sq}
    p = spec.profile
    if p is None:
        return None
    if p.kind == "clarke":
        return {"clarke": {"f_d": p.f_d, "tau": p.tau}}
    return {"ofdm": {"tau": p.tau, "delta_f": p.delta_f, "k_sep": p.k_sep}}


def _metadata(spec: RunSpec, **extra):
    meta = {
        "command": spec.command,
        "version": __version__,
        "n_t": spec.dims.n_t,
        "n_r": spec.dims.n_r,
        "sigma_sq": spec.sigma_sq,
        "seed": spec.seed,
    }
    corr = _corr_echo(spec)
    if corr is not None:
        meta["correlation"] = corr
    if spec.grid is not None:
        meta["grid"] = {
            "start": spec.grid.start,
            "stop": spec.grid.stop,
            "points": spec.grid.points,
            "db": spec.grid.db,
        }
    meta.update(extra)
    return meta


def _write_text(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _emit_rows(spec: RunSpec, header: Sequence[str], rows: Sequence[Sequence[float]],
               **meta_extra):
    if spec.fmt == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        _write_text(spec.out, "\n".join(lines) + "\n")
    else:
        obj = {
            "metadata": _metadata(spec, **meta_extra),
            "rows": [dict(zip(header, (float(v) for v in row))) for row in rows],
        }
        _write_text(spec.out, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _mean_reference(spec: RunSpec, which: Optional[str] = None) -> float:
    mx, mn = estimate_mean_extremes(spec.ensemble, spec.seed, MEAN_REF_SAMPLES)
    return mx if (which or spec.which) == "largest" else mn


def _grid_thresholds(spec: RunSpec) -> Tuple[List[float], Optional[float]]:
    """Grid as eigenvalue-unit thresholds plus the dB reference if used."""
    vals = spec.grid.values()
    if not spec.grid.db:
        return vals, None
    ubar = _mean_reference(spec)
    return [ubar * 10.0 ** (v / 10.0) for v in vals], ubar


def _to_db(u: float, ubar: float) -> float:
    if u <= 0.0:
        return -math.inf
    return 10.0 * math.log10(u / ubar)


def cmd_eval(spec: RunSpec) -> int:
    ens = spec.ensemble
    corr = CorrelationState(rho_sq=spec.resolved_rho_sq(), sigma_sq=spec.sigma_sq)
    thresholds, ubar = _grid_thresholds(spec)
    header = ("threshold", "cdf_largest", "ccdf_smallest",
              "joint_cdf_largest_diag", "joint_ccdf_smallest_diag")
    rows = []
    for t in thresholds:
        point = JointPoint(lam=t, phi=t)
        rows.append((t, cdf_largest(ens, t), ccdf_smallest(ens, t),
                     joint_cdf_largest(ens, corr, point),
                     joint_ccdf_smallest(ens, corr, point)))
    extra = {"which": spec.which}
    if ubar is not None:
        extra["mean_reference"] = ubar
    _emit_rows(spec, header, rows, **extra)
    return 0


def cmd_double_outage(spec: RunSpec) -> int:
    ens = spec.ensemble
    rho_sq = spec.resolved_rho_sq()
    corr = CorrelationState(rho_sq=rho_sq, sigma_sq=spec.sigma_sq)
    thresholds, ubar = _grid_thresholds(spec)
    if ubar is None:
        ubar = _mean_reference(spec)
    grid_vals = spec.grid.values()
    header = ("threshold_db", "p_out", "p_double", "p_out_sq")
    rows = []
    for i, t in enumerate(thresholds):
        tdb = grid_vals[i] if spec.grid.db else _to_db(t, ubar)
        p1 = marginal_outage(spec.which, ens, t)
        if spec.which == "largest":
            pd = joint_cdf_largest(ens, corr, JointPoint(lam=t, phi=t))
        else:
            pd = joint_cdf_smallest(ens, corr, JointPoint(lam=t, phi=t))
        rows.append((tdb, p1, pd, p1 * p1))
    _emit_rows(spec, header, rows, which=spec.which, mean_reference=ubar,
               rho_sq_resolved=rho_sq)
    return 0


def cmd_mi_curve(spec: RunSpec) -> int:
    ens = spec.ensemble
    gamma_l = invert_outage("largest", ens, spec.pout_target)
    gamma_s = invert_outage("smallest", ens, spec.pout_target)
    header = ("f_d_tau", "rho_sq", "mi_largest", "mi_smallest")
    rows = []
    for fdtau in spec.grid.values():
        if fdtau < 0:
            raise DomainError(f"f_d*tau grid must be non-negative, got {fdtau}")
        rho_sq = clarke_rho_sq(fdtau, 1.0)
        mi_l = normalized_mi(outage_table("largest", ens, rho_sq, gamma_l))
        mi_s = normalized_mi(outage_table("smallest", ens, rho_sq, gamma_s))
        rows.append((fdtau, rho_sq, mi_l, mi_s))
    _emit_rows(spec, header, rows, pout_target=spec.pout_target,
               gamma_largest=gamma_l, gamma_smallest=gamma_s)
    return 0


def cmd_lcr_afd(spec: RunSpec) -> int:
    ens = spec.ensemble
    prof = spec.profile
    rho_adj = prof.rho_sq
    tau = prof.tau
    thresholds, ubar = _grid_thresholds(spec)
    if ubar is None:
        ubar = _mean_reference(spec)
    grid_vals = spec.grid.values()
    header = ("u_db", "n_f_normalized", "a_f_normalized")
    rows = []
    for i, u in enumerate(thresholds):
        udb = grid_vals[i] if spec.grid.db else _to_db(u, ubar)
        res = level_crossing(spec.which, ens, rho_adj, u, prof.delta_f)
        rows.append((udb, res.lcr * tau, res.afd * tau))
    _emit_rows(spec, header, rows, which=spec.which, mean_reference=ubar,
               rho_adjacent_sq=rho_adj, tau=tau, delta_f=prof.delta_f)
    return 0


def _mc_axis(spec: RunSpec, which: str) -> List[float]:
    if spec.grid is not None:
        vals, _ = _grid_thresholds(spec)
        return vals
    ens = spec.ensemble
    return [invert_outage(which, ens, q) for q in MC_QUANTILES]


def cmd_mc_validate(spec: RunSpec) -> int:
    ens = spec.ensemble
    rho_sq = spec.resolved_rho_sq()
    corr = CorrelationState(rho_sq=rho_sq, sigma_sq=spec.sigma_sq)
    cfg = McConfig(seed=spec.seed, n_samples=spec.n_samples, ensemble=ens,
                   rho_sq=rho_sq)
    batch = sample_pairs(cfg)
    stats = ("largest", "smallest") if spec.which == "both" else (spec.which,)
    bias = 0.02 if spec.corrupt else 0.0
    points = []
    all_pass = True
    for stat in stats:
        axis = _mc_axis(spec, stat)
        if stat == "largest":
            samples = batch.pairs_largest()
        else:
            samples = batch.pairs_smallest()
        for lam in axis:
            for phi in axis:
                point = JointPoint(lam=lam, phi=phi)
                if stat == "largest":
                    closed = joint_cdf_largest(ens, corr, point)
                    emp, se = empirical_joint_cdf(samples, (lam, phi))
                else:
                    closed = joint_ccdf_smallest(ens, corr, point)
                    emp, se = empirical_joint_ccdf(samples, (lam, phi))
                closed += bias
                tol = max(0.005, 4.0 * se)
                diff = abs(closed - emp)
                ok = diff <= tol
                all_pass = all_pass and ok
                points.append({
                    "statistic": stat,
                    "lam": lam,
                    "phi": phi,
                    "closed_form": closed,
                    "empirical": emp,
                    "std_error": se,
                    "abs_diff": diff,
                    "tolerance": tol,
                    "pass": ok,
                })
    report = {
        "metadata": _metadata(spec, which=spec.which, n_samples=spec.n_samples,
                              rho_sq_resolved=rho_sq,
                              corrupted=bool(spec.corrupt)),
        "pass": all_pass,
        "points": points,
    }
    _write_text(spec.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0 if all_pass else 4


_COMMANDS = {
    "eval": cmd_eval,
    "double-outage": cmd_double_outage,
    "mi-curve": cmd_mi_curve,
    "lcr-curve": cmd_lcr_afd,
    "afd-curve": cmd_lcr_afd,
    "mc-validate": cmd_mc_validate,
}


def _parse_grid(text: str, parser) -> GridSpec:
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "db"):
        parser.error(f"--grid must be start:stop:points[:db], got {text!r}")
    try:
        start = float(parts[0])
        stop = float(parts[1])
        points = int(parts[2])
    except ValueError:
        parser.error(f"--grid must be start:stop:points[:db], got {text!r}")
    if points < 1:
        parser.error(f"--grid needs at least one point, got {points}")
    return GridSpec(start=start, stop=stop, points=points, db=len(parts) == 4)


def _parse_floats(text: str, n: int, flag: str, parser) -> List[float]:
    parts = text.split(",")
    if len(parts) != n:
        parser.error(f"{flag} needs {n} comma-separated values, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        parser.error(f"{flag} needs numeric values, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wishart-dynamics",
        description="Joint extreme-eigenvalue distributions of correlated "
                    "Wishart matrix pairs and the channel-dynamics metrics "
                    "built on them.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, which_choices=("largest", "smallest"), default_which="largest"):
        p.add_argument("--ntx", type=int, required=True, help="transmit antennas")
        p.add_argument("--nrx", type=int, required=True, help="receive antennas")
        p.add_argument("--sigma-sq", type=float, default=1.0,
                       help="per-entry channel variance (default 1.0)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"RNG seed for any sampling (default {DEFAULT_SEED})")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       default="csv", help="output format (default csv)")
        p.add_argument("--which", choices=which_choices, default=default_which,
                       help="extreme eigenvalue the command targets")

    def add_corr(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--rho-sq", type=float, default=None,
                       help="power correlation coefficient in [0, 1]")
        g.add_argument("--clarke", default=None, metavar="FD,TAU",
                       help="Clarke profile: Doppler (Hz) and lag (s)")
        g.add_argument("--ofdm", default=None, metavar="TAU,DELTA_F,K",
                       help="exponential profile: rms delay spread (s), "
                            "subcarrier spacing (Hz), separation (subcarriers)")

    p = sub.add_parser("eval", help="marginal and diagonal joint CDFs over a threshold grid")
    add_common(p)
    add_corr(p)
    p.add_argument("--grid", required=True, help="start:stop:points[:db]")

    p = sub.add_parser("double-outage", help="double-outage probability with its two bounds")
    add_common(p)
    add_corr(p)
    p.add_argument("--grid", required=True, help="start:stop:points[:db]")

    p = sub.add_parser("mi-curve", help="normalized outage-indicator mutual information vs f_d*tau")
    add_common(p, which_choices=("largest", "smallest"), default_which="largest")
    p.add_argument("--grid", required=True, help="f_d*tau axis, start:stop:points (linear)")
    p.add_argument("--pout-target", type=float, default=1e-2,
                   help="outage probability defining the threshold (default 1e-2)")

    for name, blurb in (("lcr-curve", "level crossing rate"),
                        ("afd-curve", "average fade duration")):
        p = sub.add_parser(name, help=f"normalized {blurb} vs threshold")
        add_common(p)
        add_corr(p)
        p.add_argument("--grid", required=True, help="start:stop:points[:db]")

    p = sub.add_parser("mc-validate", help="closed forms vs Monte Carlo, JSON verdict")
    add_common(p, which_choices=("largest", "smallest", "both"), default_which="both")
    add_corr(p)
    p.add_argument("--grid", default=None,
                   help="optional threshold axis override, start:stop:points[:db]")
    p.add_argument("--samples", type=int, default=1_000_000,
                   help="Monte Carlo sample count (default 1e6)")
    p.add_argument("--corrupt-closed-form", action="store_true",
                   help=argparse.SUPPRESS)

    return parser


def _normalize(parser, args) -> RunSpec:
    if args.ntx < 1 or args.nrx < 1:
        parser.error("--ntx and --nrx must be positive")
    dims = ChannelDims(n_t=args.ntx, n_r=args.nrx)
    command = args.command

    rho_sq = getattr(args, "rho_sq", None)
    profile = None
    if getattr(args, "clarke", None) is not None:
        fd, tau = _parse_floats(args.clarke, 2, "--clarke", parser)
        profile = CorrelationProfile(kind="clarke", f_d=fd, tau=tau)
    elif getattr(args, "ofdm", None) is not None:
        tau, delta_f, k = _parse_floats(args.ofdm, 3, "--ofdm", parser)
        if k != int(k):
            parser.error("--ofdm separation must be an integer")
        profile = CorrelationProfile(kind="ofdm_exponential", tau=tau,
                                     delta_f=delta_f, k_sep=int(k))
    if rho_sq is not None and not 0.0 <= rho_sq <= 1.0:
        parser.error(f"--rho-sq must be in [0, 1], got {rho_sq}")

    grid = None
    if getattr(args, "grid", None) is not None:
        grid = _parse_grid(args.grid, parser)
        if command != "mc-validate" and grid.points < 2:
            parser.error("curve commands need a grid with at least 2 points")

    if command in ("eval", "double-outage"):
        if rho_sq is None and profile is None:
            parser.error(f"{command} needs --rho-sq, --clarke, or --ofdm")
    elif command in ("lcr-curve", "afd-curve"):
        if profile is None or profile.kind != "ofdm_exponential":
            parser.error(f"{command} needs --ofdm TAU,DELTA_F,K (the normalized "
                         "axes need tau and delta_f, not a bare correlation)")
    elif command == "mi-curve":
        if grid.db:
            parser.error("mi-curve grids are f_d*tau values; :db is not meaningful")
    elif command == "mc-validate":
        if rho_sq is None and profile is None:
            parser.error("mc-validate needs --rho-sq, --clarke, or --ofdm")
        if args.samples < 10_000:
            parser.error(f"--samples must be >= 10000, got {args.samples}")

    pout = getattr(args, "pout_target", 1e-2)
    if not 0.0 < pout < 1.0:
        parser.error(f"--pout-target must be in (0, 1), got {pout}")
    samples = getattr(args, "samples", MEAN_REF_SAMPLES)
    if args.seed < 0 or args.seed >= 1 << 64:
        parser.error(f"--seed must fit in 64 bits, got {args.seed}")

    return RunSpec(
        command=command,
        dims=dims,
        sigma_sq=args.sigma_sq,
        which=args.which,
        rho_sq=rho_sq,
        profile=profile,
        grid=grid,
        pout_target=pout,
        seed=args.seed,
        n_samples=samples,
        out=args.out,
        fmt=args.fmt,
        corrupt=getattr(args, "corrupt_closed_form", False),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        spec = _normalize(parser, args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        with warnings.catch_warnings():
            # degenerate-correlation routing is intentional at the CLI level
            warnings.simplefilter("ignore", PrecisionWarning)
            return _COMMANDS[spec.command](spec)
    except (DomainError, UnsupportedParameterError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, NumericalConsistencyError, AfdUndefinedError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
