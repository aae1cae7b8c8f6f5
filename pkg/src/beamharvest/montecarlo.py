"""Monte Carlo oracle: coherence-time trials of draw -> select -> harvest,
plus the sum-rate estimators.

Reproducibility contract: work is split into fixed-size chunks and chunk i
always consumes the i-th child stream spawned from the master seed, so the
accumulated results are bit-identical for any worker count.  Threads carry
the chunks; the heavy numpy kernels release the GIL.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import haar_unitary, sample_gaussian_vectors
from .model import SystemParams

__all__ = [
    "TrialStats",
    "RateEstimate",
    "SumRateSummary",
    "select_batch",
    "run_energy_trials",
    "beam_rates",
    "sumrate_conditional",
    "sumrate_average",
    "write_trialstats_csv",
    "read_trialstats_csv",
]

ENERGY_CHUNK = 1 << 16   # trials per RNG stream for energy runs
RATE_CHUNK = 1 << 13     # smaller: sum-rate chunks hold K x M user matrices


@dataclass
class TrialStats:
    """Accumulators for a batch of coherence-time trials."""
    trials: int
    seed: int
    antennas: int
    pmf_counts: np.ndarray                  # active-beam counts, index m-1
    energy_samples: np.ndarray | None = None   # [J], one per trial
    hist_edges: np.ndarray | None = None       # len bins+1, last edge may be inf
    hist_counts: np.ndarray | None = None
    sumrate_sum: float = 0.0                # bits/s/Hz accumulators
    sumrate_sq_sum: float = 0.0
    per_beamcount_rate_sums: np.ndarray | None = None

    def validate(self) -> None:
        if int(self.pmf_counts.sum()) != self.trials:
            raise ValueError("pmf counts must sum to the trial count")
        if self.hist_counts is not None and int(self.hist_counts.sum()) != self.trials:
            raise ValueError("histogram counts must sum to the trial count")
        if self.trials > 0 and self.sumrate_sq_sum * self.trials < self.sumrate_sum ** 2 * (1 - 1e-12):
            raise ValueError("negative rate variance accumulator")

    @property
    def empirical_pmf(self) -> np.ndarray:
        return self.pmf_counts / self.trials

    def rate_estimate(self) -> "RateEstimate":
        n = self.trials
        mean = self.sumrate_sum / n
        var = max(self.sumrate_sq_sum / n - mean ** 2, 0.0)
        return RateEstimate(mean=mean, se=math.sqrt(var / n), trials=n)

    def with_histogram(self, bins: int = 200,
                       x_max: float | None = None) -> "TrialStats":
        """Attach an energy histogram; the final bin absorbs [x_max, inf)."""
        if self.energy_samples is None:
            raise ValueError("no raw energy samples to histogram")
        if x_max is None:
            x_max = float(self.energy_samples.max()) or 1.0
        edges = np.append(np.linspace(0.0, x_max, bins + 1), np.inf)
        counts, _ = np.histogram(self.energy_samples, bins=edges)
        return replace(self, hist_edges=edges, hist_counts=counts)


@dataclass(frozen=True)
class RateEstimate:
    mean: float      # bits/s/Hz
    se: float        # standard error of the mean
    trials: int


@dataclass(frozen=True)
class SumRateSummary:
    weighted: RateEstimate            # analytic-PMF-weighted conditional rates
    empirical: RateEstimate           # joint-trial estimate
    pmf: np.ndarray
    conditional: tuple[RateEstimate, ...]
    stats: TrialStats                 # joint-trial accumulators


def select_batch(params: SystemParams, alphas: np.ndarray):
    """Vectorized selection rule over rows of projection powers.

    Returns (active counts, harvested energies [J], threshold_met flags,
    descending beam order).  Same rule as model.select_beams; the scalar and
    batch paths are cross-checked in the test suite.
    """
    alphas = np.asarray(alphas, dtype=float)
    n, m_total = alphas.shape
    if m_total != params.antennas:
        raise ValueError("projection width does not match antenna count")
    order = np.argsort(-alphas, axis=1, kind="stable")
    z = np.cumsum(np.take_along_axis(alphas, order, axis=1), axis=1)
    feasible = z >= params.mu * np.arange(1, m_total + 1)
    met = feasible[:, 0]
    # index of the last feasible partial sum; fall back to the best beam alone
    last = m_total - 1 - np.argmax(feasible[:, ::-1], axis=1)
    active = np.where(met, last + 1, 1).astype(np.int64)
    energy = (params.energy_constant
              * z[np.arange(n), active - 1] / active)
    return active, energy, met, order


def _chunk_lengths(trials: int, chunk: int) -> list[int]:
    out = [chunk] * (trials // chunk)
    if trials % chunk:
        out.append(trials % chunk)
    return out


def _run_chunked(trials: int, seed: int, chunk: int, worker_fn, workers: int):
    """Map worker_fn over (chunk_index, stream, length) in chunk order."""
    lengths = _chunk_lengths(trials, chunk)
    streams = np.random.SeedSequence(seed).spawn(len(lengths))
    jobs = [(np.random.default_rng(s), n) for s, n in zip(streams, lengths)]
    if workers <= 1:
        return [worker_fn(rng, n) for rng, n in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: worker_fn(*job), jobs))


def run_energy_trials(params: SystemParams, trials: int, seed: int,
                      workers: int = 1, keep_samples: bool = True,
                      histogram_bins: int | None = None,
                      histogram_x_max: float | None = None) -> TrialStats:
    """Simulate `trials` coherence intervals of draw -> select -> harvest."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m = params.antennas

    def work(rng, n):
        h = sample_gaussian_vectors(rng, n, m)
        w = haar_unitary(rng, m, n)
        alphas = np.abs(np.einsum("nji,ni->nj", w, h.conj())) ** 2
        active, energy, _, _ = select_batch(params, alphas)
        counts = np.bincount(active, minlength=m + 1)[1:]
        return counts, energy

    results = _run_chunked(trials, seed, ENERGY_CHUNK, work, workers)
    pmf_counts = np.sum([r[0] for r in results], axis=0)
    samples = np.concatenate([r[1] for r in results])
    stats = TrialStats(trials=trials, seed=seed, antennas=m,
                       pmf_counts=pmf_counts,
                       energy_samples=samples)
    if histogram_bins:
        stats = stats.with_histogram(histogram_bins, histogram_x_max)
    if not keep_samples:
        stats = replace(stats, energy_samples=None)
    stats.validate()
    return stats


def beam_rates(gains: np.ndarray, snr: float):
    """Sum rate of per-beam best-user scheduling from projection powers.

    gains has shape (..., K, m): power of each user's channel on each of the
    m active beams, which share the transmit power evenly.  Each beam is
    granted to the user with the highest SINR on it (np.argmax: ties go to
    the lowest user index; one user may take several beams).  Returns
    (rates over the leading axes, chosen user per beam).
    """
    gains = np.asarray(gains, dtype=float)
    m = gains.shape[-1]
    scale = snr / m
    total = gains.sum(axis=-1, keepdims=True)
    sinr = scale * gains / (1.0 + scale * (total - gains))
    best = sinr.max(axis=-2)
    assignment = sinr.argmax(axis=-2)
    rates = np.log2(1.0 + best).sum(axis=-1)
    return rates, assignment


def sumrate_conditional(params: SystemParams, active_count: int, snr: float,
                        trials: int, seed: int,
                        workers: int = 1) -> RateEstimate:
    """Average sum rate given exactly `active_count` beams are active.

    The beam set is isotropic and independent of the user channels, so
    conditioning on which m beams won selection does not change the law of
    the users' projections; the first m beams of a fresh draw are used.
    """
    m_total, k_users = params.antennas, params.users
    if not 1 <= active_count <= m_total:
        raise ValueError(f"active_count must lie in [1, {m_total}]")
    if k_users < 1:
        raise ValueError("need at least one user")
    if snr < 0:
        raise ValueError("snr must be >= 0")

    def work(rng, n):
        w = haar_unitary(rng, m_total, n)[:, :active_count, :]
        users = sample_gaussian_vectors(rng, n, k_users, m_total)
        gains = np.abs(np.einsum("nji,nki->nkj", w, users.conj())) ** 2
        rates, _ = beam_rates(gains, snr)
        return float(rates.sum()), float((rates ** 2).sum())

    results = _run_chunked(trials, seed, RATE_CHUNK, work, workers)
    s = math.fsum(r[0] for r in results)
    sq = math.fsum(r[1] for r in results)
    mean = s / trials
    var = max(sq / trials - mean ** 2, 0.0)
    return RateEstimate(mean=mean, se=math.sqrt(var / trials), trials=trials)


def sumrate_average(params: SystemParams, snr: float, trials: int, seed: int,
                    workers: int = 1, check_empirical: bool = True,
                    keep_samples: bool = False) -> SumRateSummary:
    """PMF-weighted average sum rate, cross-checked against a joint run.

    The primary estimate weights per-beam-count conditional rates by the
    analytic active-beam PMF.  A fully empirical variant runs joint trials
    (sensor draw decides the active set, users are scheduled on it) and must
    agree within 3 combined standard errors unless check_empirical is off.
    """
    from .analytic.pmf import pmf_active_beams

    m_total, k_users = params.antennas, params.users
    pmf = pmf_active_beams(params)
    child_seeds = np.random.SeedSequence(seed).generate_state(m_total + 1)
    conditional = tuple(
        sumrate_conditional(params, m, snr, trials, int(child_seeds[m - 1]),
                            workers)
        for m in range(1, m_total + 1))
    w_mean = float(np.dot(pmf, [r.mean for r in conditional]))
    w_se = float(np.sqrt(np.dot(pmf ** 2, [r.se ** 2 for r in conditional])))
    weighted = RateEstimate(mean=w_mean, se=w_se, trials=trials * m_total)

    def work(rng, n):
        h = sample_gaussian_vectors(rng, n, m_total)
        w = haar_unitary(rng, m_total, n)
        users = sample_gaussian_vectors(rng, n, k_users, m_total)
        alphas = np.abs(np.einsum("nji,ni->nj", w, h.conj())) ** 2
        active, energy, _, order = select_batch(params, alphas)
        gains = np.abs(np.einsum("nji,nki->nkj", w, users.conj())) ** 2
        counts = np.bincount(active, minlength=m_total + 1)[1:]
        rate_sums = np.zeros(m_total)
        s = sq = 0.0
        for m in np.unique(active):
            rows = np.nonzero(active == m)[0]
            beam_idx = order[rows, :m]                      # (n_m, m) active set
            sub = np.take_along_axis(gains[rows], beam_idx[:, None, :], axis=2)
            rates, _ = beam_rates(sub, snr)
            rate_sums[m - 1] = rates.sum()
            s += float(rates.sum())
            sq += float((rates ** 2).sum())
        return counts, rate_sums, s, sq, energy

    results = _run_chunked(trials, seed, RATE_CHUNK, work, workers)
    stats = TrialStats(
        trials=trials, seed=seed, antennas=m_total,
        pmf_counts=np.sum([r[0] for r in results], axis=0),
        energy_samples=(np.concatenate([r[4] for r in results])
                        if keep_samples else None),
        sumrate_sum=math.fsum(r[2] for r in results),
        sumrate_sq_sum=math.fsum(r[3] for r in results),
        per_beamcount_rate_sums=np.sum([r[1] for r in results], axis=0),
    )
    stats.validate()
    empirical = stats.rate_estimate()

    if check_empirical:
        gap = abs(weighted.mean - empirical.mean)
        bound = 3.0 * math.hypot(weighted.se, empirical.se)
        if gap > bound:
            raise RuntimeError(
                f"weighted and joint sum-rate estimates disagree: "
                f"|{weighted.mean:.6g} - {empirical.mean:.6g}| > {bound:.3g}")
    return SumRateSummary(weighted=weighted, empirical=empirical, pmf=pmf,
                          conditional=conditional, stats=stats)


# --- CSV emission -----------------------------------------------------------

def write_trialstats_csv(stats: TrialStats, path_or_file) -> None:
    """Emit accumulators as CSV rows `record,a,b,c` (17 significant digits).

    Sections: meta (trials/seed/antennas), hist (bin lo, hi, count),
    pmf (count index, count, frequency), rate (raw accumulators), and
    rate_by_count (per-beam-count rate sums).
    """
    def g(x):
        return f"{x:.17g}"

    def emit(fh):
        fh.write("record,a,b,c\n")
        fh.write(f"meta,trials,{stats.trials},\n")
        fh.write(f"meta,seed,{stats.seed},\n")
        fh.write(f"meta,antennas,{stats.antennas},\n")
        if stats.hist_counts is not None:
            for lo, hi, n in zip(stats.hist_edges[:-1], stats.hist_edges[1:],
                                 stats.hist_counts):
                fh.write(f"hist,{g(lo)},{g(hi)},{int(n)}\n")
        for m, n in enumerate(stats.pmf_counts, start=1):
            fh.write(f"pmf,{m},{int(n)},{g(n / stats.trials)}\n")
        if stats.per_beamcount_rate_sums is not None:
            fh.write(f"rate,sum,{g(stats.sumrate_sum)},\n")
            fh.write(f"rate,sq_sum,{g(stats.sumrate_sq_sum)},\n")
            for m, s in enumerate(stats.per_beamcount_rate_sums, start=1):
                fh.write(f"rate_by_count,{m},{g(s)},\n")

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
    else:
        emit(path_or_file)


def read_trialstats_csv(path_or_file) -> TrialStats:
    """Parse write_trialstats_csv output (raw samples are not round-tripped)."""
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file) as fh:
            lines = fh.read().splitlines()
    else:
        lines = path_or_file.read().splitlines()
    if lines[0] != "record,a,b,c":
        raise ValueError(f"unexpected header {lines[0]!r}")
    meta: dict[str, int] = {}
    hist_lo, hist_hi, hist_n = [], [], []
    pmf: dict[int, int] = {}
    rate: dict[str, float] = {}
    by_count: dict[int, float] = {}
    for line in lines[1:]:
        if not line:
            continue
        rec, a, b, c = line.split(",")
        if rec == "meta":
            meta[a] = int(b)
        elif rec == "hist":
            hist_lo.append(float(a))
            hist_hi.append(float(b))
            hist_n.append(int(c))
        elif rec == "pmf":
            pmf[int(a)] = int(b)
        elif rec == "rate":
            rate[a] = float(b)
        elif rec == "rate_by_count":
            by_count[int(a)] = float(b)
        else:
            raise ValueError(f"unknown record type {rec!r}")
    m = meta["antennas"]
    counts = np.array([pmf.get(i, 0) for i in range(1, m + 1)], dtype=np.int64)
    stats = TrialStats(
        trials=meta["trials"], seed=meta["seed"], antennas=m,
        pmf_counts=counts,
        hist_edges=(np.array(hist_lo + [hist_hi[-1]]) if hist_lo else None),
        hist_counts=(np.array(hist_n, dtype=np.int64) if hist_n else None),
        sumrate_sum=rate.get("sum", 0.0),
        sumrate_sq_sum=rate.get("sq_sum", 0.0),
        per_beamcount_rate_sums=(
            np.array([by_count.get(i, 0.0) for i in range(1, m + 1)])
            if by_count else None),
    )
    stats.validate()
    return stats
