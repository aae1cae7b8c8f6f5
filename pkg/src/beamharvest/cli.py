"""Command-line front end.

Subcommands emit CSV (stdout or --out).  Flags override config-file values.
Exit codes: 0 success, 1 validation failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import math
import sys
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.stats import kstest

from .analytic import (
    cdf_harvested,
    energy_cdf_curve,
    energy_pdf_curve,
    mean_harvested,
    pdf_harvested,
    pmf_active_beams,
    pmf_curve,
    write_curve_csv,
)
from .channel import (
    draw_realization,
    haar_unitary,
    realization_from_csv,
    realization_to_csv,
    sample_gaussian_vectors,
)
from .model import SystemParams, params_from_config
from .montecarlo import (
    read_trialstats_csv,
    run_energy_trials,
    select_batch,
    sumrate_conditional,
    write_trialstats_csv,
)

__all__ = ["main", "SweepSpec"]

DEFAULT_TRIALS = 100_000
DEFAULT_SEED = 1234
DEFAULT_SNR = 10.0


SWEEPABLE_PARAMETERS = ("energy_threshold", "antennas", "users", "snr")
SWEEP_OUTPUTS = ("pdf", "cdf", "mean", "pmf", "sumrate")


@dataclass(frozen=True)
class SweepSpec:
    """A one-parameter sweep request resolved from CLI flags."""
    swept_parameter: str
    values: tuple[float, ...]
    outputs: tuple[str, ...]
    trials: int
    seed: int

    def __post_init__(self):
        if self.swept_parameter not in SWEEPABLE_PARAMETERS:
            raise ValueError(f"cannot sweep {self.swept_parameter!r}")
        if not self.values:
            raise ValueError("a sweep needs at least one value")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("sweep values must be finite")
        lo = 0.0 if self.swept_parameter in ("energy_threshold", "snr") else 1.0
        if any(v < lo for v in self.values):
            raise ValueError(f"{self.swept_parameter} values must be >= {lo}")
        if any(out not in SWEEP_OUTPUTS for out in self.outputs):
            raise ValueError(f"outputs must be among {SWEEP_OUTPUTS}")
        if not self.outputs:
            raise ValueError("a sweep needs at least one output")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def _parse_grid(text: str) -> tuple[float, ...]:
    """start:stop:count[:lin|log] -> tuple of grid values."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"bad grid spec {text!r}, want start:stop:count[:lin|log]")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    mode = parts[3] if len(parts) == 4 else "lin"
    if count < 2:
        raise ValueError("grid needs at least two points")
    if mode == "log":
        if start <= 0 or stop <= 0:
            raise ValueError("log grid endpoints must be positive")
        return tuple(np.geomspace(start, stop, count))
    if mode != "lin":
        raise ValueError(f"unknown grid mode {mode!r}")
    return tuple(np.linspace(start, stop, count))


def _parse_values(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _resolve_params(args) -> SystemParams:
    params = params_from_config(args.config) if args.config else SystemParams()
    overrides = {}
    if args.antennas is not None:
        overrides["antennas"] = args.antennas
        # lift the default user count: K >= M, and K only matters to rate runs
        if args.users is None and args.config is None:
            overrides["users"] = max(SystemParams().users, args.antennas)
    if args.users is not None:
        overrides["users"] = args.users
    if args.energy_threshold is not None:
        overrides["energy_threshold"] = args.energy_threshold
    return replace(params, **overrides) if overrides else params


@contextlib.contextmanager
def _open_out(args):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _x_max(params: SystemParams, requested: float | None) -> float:
    if requested is not None:
        if requested <= 0:
            raise ValueError("--x-max must be positive")
        return requested
    if params.energy_threshold > 0:
        return 3.0 * params.energy_threshold
    return 4.0 * params.energy_constant


def _energy_grid(params, args) -> np.ndarray:
    hi = _x_max(params, args.x_max)
    return np.linspace(0.0, hi, args.points)


# --- subcommand handlers ----------------------------------------------------

def _cmd_pdf(params, args) -> int:
    grid = _energy_grid(params, args)
    curve = energy_pdf_curve(params, grid)
    extras, footer = {}, None
    if args.mc_overlay:
        stats = run_energy_trials(params, args.mc_overlay, args.seed)
        h = grid[1] - grid[0]
        edges = np.concatenate([grid - h / 2, [grid[-1] + h / 2]])
        counts, _ = np.histogram(stats.energy_samples, bins=edges)
        empirical = counts / (args.mc_overlay * h)
        extras["empirical"] = empirical
        footer = [("supdist", f"{float(np.max(np.abs(curve.values - empirical))):.17g}")]
    with _open_out(args) as fh:
        write_curve_csv(curve, fh, extra_columns=extras, footer=footer)
    return 0


def _cmd_cdf(params, args) -> int:
    grid = _energy_grid(params, args)
    curve = energy_cdf_curve(params, grid)
    extras, footer = {}, None
    if args.mc_overlay:
        stats = run_energy_trials(params, args.mc_overlay, args.seed)
        samples = np.sort(stats.energy_samples)
        empirical = np.searchsorted(samples, grid, side="right") / args.mc_overlay
        extras["empirical"] = empirical
        footer = [("supdist", f"{float(np.max(np.abs(curve.values - empirical))):.17g}")]
    with _open_out(args) as fh:
        write_curve_csv(curve, fh, extra_columns=extras, footer=footer)
    return 0


def _sweep_values(args, name: str) -> tuple[float, ...]:
    if args.values and args.grid:
        raise ValueError("give either --values or --grid, not both")
    if args.values:
        return _parse_values(args.values)
    if args.grid:
        return _parse_grid(args.grid)
    raise ValueError(f"{name} needs --values or --grid")


def _cmd_mean_sweep(params, args) -> int:
    spec = SweepSpec(
        swept_parameter="energy_threshold",
        values=_sweep_values(args, "mean-sweep"),
        outputs=("mean",),
        trials=args.trials,
        seed=args.seed,
    )
    seeds = np.random.SeedSequence(spec.seed).generate_state(len(spec.values))
    with _open_out(args) as fh:
        fh.write("E_th,mean_analytic,mean_mc,se\n")
        for v, s in zip(spec.values, seeds):
            p = replace(params, energy_threshold=float(v))
            mean = mean_harvested(p)
            stats = run_energy_trials(p, spec.trials, int(s))
            samples = stats.energy_samples
            mc = float(samples.mean())
            se = float(samples.std(ddof=1) / math.sqrt(spec.trials))
            fh.write(f"{v:.17g},{mean:.17g},{mc:.17g},{se:.17g}\n")
    return 0


def _cmd_pmf(params, args) -> int:
    curve = pmf_curve(params)
    stats = run_energy_trials(params, args.trials, args.seed, keep_samples=False)
    empirical = stats.empirical_pmf
    tvd = 0.5 * float(np.abs(curve.values - empirical).sum())
    with _open_out(args) as fh:
        write_curve_csv(curve, fh, extra_columns={"empirical": empirical},
                        footer=[("tvd", f"{tvd:.17g}")])
    return 0


def _cmd_sumrate_sweep(params, args) -> int:
    k_list = tuple(int(k) for k in args.k_list.split(","))
    if any(k < params.antennas for k in k_list):
        raise ValueError("each K in --k-list must be >= the antenna count")
    columns = tuple(f"rate_K{k}" for k in k_list) + tuple(f"se_K{k}" for k in k_list)
    spec = SweepSpec(
        swept_parameter="energy_threshold",
        values=_sweep_values(args, "sumrate-sweep"),
        outputs=("sumrate",),
        trials=args.trials,
        seed=args.seed,
    )
    m_total = params.antennas
    seeds = np.random.SeedSequence(spec.seed).generate_state(m_total * len(k_list))
    # conditional rates do not depend on the threshold: compute once per (m, K)
    cond = {}
    for i, k in enumerate(k_list):
        pk = replace(params, users=k)
        for m in range(1, m_total + 1):
            cond[(m, k)] = sumrate_conditional(
                pk, m, args.snr, spec.trials, int(seeds[i * m_total + m - 1]))
    with _open_out(args) as fh:
        fh.write("E_th," + ",".join(columns) + "\n")
        for v in spec.values:
            pmf = pmf_active_beams(replace(params, energy_threshold=float(v)))
            rates, ses = [], []
            for k in k_list:
                means = [cond[(m, k)].mean for m in range(1, m_total + 1)]
                errs = [cond[(m, k)].se for m in range(1, m_total + 1)]
                rates.append(float(np.dot(pmf, means)))
                ses.append(float(np.sqrt(np.dot(pmf ** 2, np.square(errs)))))
            cells = [f"{v:.17g}"] + [f"{r:.17g}" for r in rates + ses]
            fh.write(",".join(cells) + "\n")
    return 0


def _cmd_simulate(params, args) -> int:
    x_max = _x_max(params, None)
    stats = run_energy_trials(params, args.trials, args.seed,
                              workers=args.workers, keep_samples=False,
                              histogram_bins=args.bins, histogram_x_max=x_max)
    with _open_out(args) as fh:
        write_trialstats_csv(stats, fh)
    return 0


def _cmd_validate(params, args) -> int:
    trials = 1_000_000 if args.level == "full" else 100_000
    tvd_limit = 0.005 if args.level == "full" else 0.01
    sup_limit = 0.005 if args.level == "full" else 0.01
    rng = np.random.default_rng(args.seed)
    rows = []

    def record(name, ok, metric, threshold):
        rows.append((name, "pass" if ok else "fail", metric, threshold))

    # selection invariants on raw draws
    n_sel = min(trials, 100_000)
    alphas = rng.exponential(size=(n_sel, params.antennas))
    active, energy, met, order = select_batch(params, alphas)
    z = np.cumsum(np.take_along_axis(alphas, order, axis=1), axis=1)
    mu = params.mu
    c = params.energy_constant
    rows_idx = np.arange(n_sel)
    sel_z = z[rows_idx, active - 1]
    bad = 0
    bad += int(np.sum(met & (energy < params.energy_threshold * (1 - 1e-12))))
    bad += int(np.sum(~met & (active != 1)))
    bad += int(np.sum(met & (sel_z < mu * active * (1 - 1e-12))))
    maximal = met & (active < params.antennas)
    bad += int(np.sum(z[rows_idx[maximal], active[maximal]]
                      >= mu * (active[maximal] + 1) * (1 + 1e-12)))
    bad += int(np.sum(np.abs(energy - c * sel_z / active)
                      > 1e-12 * np.maximum(energy, c)))
    record("selection_properties", bad == 0, float(bad), 0.0)

    # channel statistics
    real = draw_realization(params, rng_seed=args.seed)
    gram = real.beams @ real.beams.conj().T
    ortho = float(np.max(np.abs(gram - np.eye(params.antennas))))
    record("channel_orthonormality", ortho < 1e-10, ortho, 1e-10)
    complete = abs(float(real.projections.sum())
                   - float(np.sum(np.abs(real.sensor_channel) ** 2)))
    record("channel_completeness", complete < 1e-10, complete, 1e-10)
    n_mat = 100_000 // params.antennas
    h = sample_gaussian_vectors(rng, n_mat, params.antennas)
    w = haar_unitary(rng, params.antennas, n_mat)
    proj = np.abs(np.einsum("nji,ni->nj", w, h.conj())) ** 2
    pval = float(kstest(proj.ravel(), "expon").pvalue)
    record("channel_ks", pval > 0.01, pval, 0.01)

    # distribution agreement, all from one simulation run
    stats = run_energy_trials(params, trials, args.seed + 1)
    pmf = pmf_active_beams(params)
    tvd = 0.5 * float(np.abs(pmf - stats.empirical_pmf).sum())
    record("pmf_tvd", tvd < tvd_limit, tvd, tvd_limit)
    psum = float(pmf.sum())
    record("pmf_sum", abs(psum - 1.0) < 1e-6, abs(psum - 1.0), 1e-6)
    samples = np.sort(stats.energy_samples)
    grid = np.linspace(0.0, _x_max(params, None), 201)[1:]
    analytic = np.array([cdf_harvested(params, float(x)) for x in grid])
    empirical = np.searchsorted(samples, grid, side="right") / trials
    sup = float(np.max(np.abs(analytic - empirical)))
    record("cdf_supdist", sup < sup_limit, sup, sup_limit)
    mean = mean_harvested(params)
    mc = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(trials))
    nsig = abs(mean - mc) / se if se > 0 else math.inf
    record("mean_3se", nsig < 3.0, nsig, 3.0)
    hi = 6 * max(params.energy_threshold, params.energy_constant)
    pts = [b for b in (params.energy_threshold,
                       2 * params.energy_threshold) if 0 < b < hi]
    mass, _ = quad(lambda x: pdf_harvested(params, x), 0.0, hi,
                   points=pts or None, limit=200)
    tail = 1.0 - cdf_harvested(params, hi)
    defect = abs(mass + tail - 1.0)
    record("pdf_normalization", defect < 1e-3, defect, 1e-3)

    # CSV round trips
    buf = io.StringIO()
    realization_to_csv(real, buf)
    buf.seek(0)
    back = realization_from_csv(buf)
    rd = max(float(np.max(np.abs(back.sensor_channel - real.sensor_channel))),
             float(np.max(np.abs(back.beams - real.beams))),
             float(np.max(np.abs(back.projections - real.projections))))
    buf2 = io.StringIO()
    hist_stats = stats.with_histogram(50, _x_max(params, None))
    write_trialstats_csv(hist_stats, buf2)
    buf2.seek(0)
    back_stats = read_trialstats_csv(buf2)
    rd = max(rd, float(np.max(np.abs(back_stats.pmf_counts - stats.pmf_counts))))
    rd = max(rd, float(np.max(np.abs(back_stats.hist_counts
                                     - hist_stats.hist_counts))))
    record("csv_roundtrip", rd == 0.0, rd, 0.0)

    failures = sum(1 for r in rows if r[1] == "fail")
    with _open_out(args) as fh:
        fh.write("check,status,metric,threshold\n")
        for name, status, metric, threshold in rows:
            fh.write(f"{name},{status},{metric:.17g},{threshold:.17g}\n")
        fh.write(f"summary,{'pass' if failures == 0 else 'fail'},"
                 f"{len(rows) - failures},{len(rows)}\n")
    return 1 if failures else 0


# --- parser wiring -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value parameter file")
    common.add_argument("--antennas", type=int)
    common.add_argument("--users", type=int)
    common.add_argument("--energy-threshold", type=float, dest="energy_threshold")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--snr", type=float, default=DEFAULT_SNR,
                        help="transmit SNR for rate commands")
    common.add_argument("--out", help="output CSV path (default stdout)")

    parser = argparse.ArgumentParser(
        prog="beamharvest",
        description="harvested-energy statistics for opportunistic "
                    "random-beam selection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pdf", parents=[common],
                       help="harvested-energy density curve")
    p.add_argument("--x-max", type=float, dest="x_max")
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--mc-overlay", type=int, default=0, metavar="N",
                   help="add an empirical column from N trials")
    p.set_defaults(handler=_cmd_pdf)

    p = sub.add_parser("cdf", parents=[common],
                       help="harvested-energy distribution curve")
    p.add_argument("--x-max", type=float, dest="x_max")
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--mc-overlay", type=int, default=0, metavar="N")
    p.set_defaults(handler=_cmd_cdf)

    p = sub.add_parser("mean-sweep", parents=[common],
                       help="mean harvested energy vs activation threshold")
    p.add_argument("--grid", help="start:stop:count[:lin|log]")
    p.add_argument("--values", help="comma-separated threshold values [J]")
    p.set_defaults(handler=_cmd_mean_sweep)

    p = sub.add_parser("pmf", parents=[common],
                       help="active-beam-count distribution")
    p.set_defaults(handler=_cmd_pmf)

    p = sub.add_parser("sumrate-sweep", parents=[common],
                       help="average sum rate vs activation threshold")
    p.add_argument("--grid", help="start:stop:count[:lin|log]")
    p.add_argument("--values", help="comma-separated threshold values [J]")
    p.add_argument("--k-list", default="4,16",
                   help="comma-separated user counts")
    p.set_defaults(handler=_cmd_sumrate_sweep)

    p = sub.add_parser("simulate", parents=[common],
                       help="run trials and dump accumulator CSV")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bins", type=int, default=200)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("validate", parents=[common],
                       help="self-check analytics against simulation")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(handler=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params = _resolve_params(args)
        return args.handler(params, args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
