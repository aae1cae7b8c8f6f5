"""Monte Carlo engine: reproducibility across workers, agreement between the
scalar and batched selection paths, accumulator invariants, distributional
limits, sum-rate estimators, and the accumulator CSV format.
"""
import io
import math
from dataclasses import replace

import numpy as np
import pytest

from beamharvest import (
    SystemParams,
    TrialStats,
    beam_rates,
    pmf_active_beams,
    read_trialstats_csv,
    run_energy_trials,
    select_batch,
    select_beams,
    sumrate_average,
    sumrate_conditional,
    write_trialstats_csv,
)

C = 1e-3


def _params(antennas, mu, users=None):
    return SystemParams(antennas=antennas, users=users or antennas,
                        energy_threshold=mu * C)


# --- reproducibility --------------------------------------------------------

def test_worker_count_does_not_change_results():
    p = SystemParams()
    a = run_energy_trials(p, 150_000, seed=5, workers=1)
    b = run_energy_trials(p, 150_000, seed=5, workers=4)
    assert np.array_equal(a.pmf_counts, b.pmf_counts)
    assert a.energy_samples.tobytes() == b.energy_samples.tobytes()


def test_seed_changes_results():
    p = SystemParams()
    a = run_energy_trials(p, 2_000, seed=5)
    b = run_energy_trials(p, 2_000, seed=6)
    assert not np.array_equal(a.energy_samples, b.energy_samples)


def test_scalar_and_batch_selection_agree():
    p = _params(6, 2.0)
    rng = np.random.default_rng(42)
    alphas = rng.exponential(size=(2_000, 6))
    active, energy, met, order = select_batch(p, alphas)
    for i in range(0, 2_000, 37):
        out = select_beams(p, alphas[i])
        assert out.active_count == active[i]
        assert out.harvested_energy == energy[i]
        assert out.threshold_met == met[i]
        assert out.active_beams == tuple(order[i, :active[i]] + 1)


def test_select_batch_rejects_wrong_width():
    with pytest.raises(ValueError, match="antenna count"):
        select_batch(_params(4, 1.0), np.ones((10, 3)))


def test_run_energy_trials_rejects_zero_trials():
    with pytest.raises(ValueError, match="trials"):
        run_energy_trials(SystemParams(), 0, seed=1)


# --- accumulator invariants -------------------------------------------------

def test_trialstats_validate_catches_bad_counts():
    stats = TrialStats(trials=10, seed=0, antennas=2,
                       pmf_counts=np.array([4, 5]))
    with pytest.raises(ValueError, match="pmf counts"):
        stats.validate()


def test_trialstats_validate_catches_bad_histogram():
    stats = TrialStats(trials=10, seed=0, antennas=2,
                       pmf_counts=np.array([4, 6]),
                       hist_edges=np.array([0.0, 1.0, np.inf]),
                       hist_counts=np.array([3, 3]))
    with pytest.raises(ValueError, match="histogram"):
        stats.validate()


def test_trialstats_validate_catches_negative_variance():
    stats = TrialStats(trials=4, seed=0, antennas=1,
                       pmf_counts=np.array([4]),
                       sumrate_sum=8.0, sumrate_sq_sum=1.0)
    with pytest.raises(ValueError, match="variance"):
        stats.validate()


def test_rate_estimate_from_known_sums():
    # samples 1, 2, 3, 4: mean 2.5, population variance 1.25
    stats = TrialStats(trials=4, seed=0, antennas=1,
                       pmf_counts=np.array([4]),
                       sumrate_sum=10.0, sumrate_sq_sum=30.0)
    est = stats.rate_estimate()
    assert est.mean == pytest.approx(2.5)
    assert est.se == pytest.approx(math.sqrt(1.25 / 4))
    assert est.trials == 4


def test_histogram_overflow_bin():
    p = SystemParams()
    stats = run_energy_trials(p, 20_000, seed=9, histogram_bins=50,
                              histogram_x_max=2 * p.energy_threshold)
    assert len(stats.hist_edges) == 52            # 50 bins + overflow edge
    assert stats.hist_edges[-1] == np.inf
    assert int(stats.hist_counts.sum()) == stats.trials
    overflow = int((stats.energy_samples >= 2 * p.energy_threshold).sum())
    assert int(stats.hist_counts[-1]) == overflow


def test_keep_samples_off_drops_array():
    stats = run_energy_trials(SystemParams(), 1_000, seed=3,
                              keep_samples=False)
    assert stats.energy_samples is None
    with pytest.raises(ValueError, match="no raw energy samples"):
        stats.with_histogram()


# --- distributional checks --------------------------------------------------

def test_zero_threshold_always_uses_all_beams():
    p = _params(4, 0.0)
    stats = run_energy_trials(p, 10_000, seed=11)
    assert stats.pmf_counts[-1] == stats.trials
    assert np.all(stats.energy_samples > 0)


def test_huge_threshold_falls_back_to_best_beam():
    stats = run_energy_trials(_params(4, 50.0), 100_000, seed=12)
    assert stats.pmf_counts[0] > 0.999 * stats.trials


def test_energy_support_bound_every_trial():
    # met trials with m < M active land in [E_th, (1+1/m) E_th); the m = M
    # branch is only bounded below; fallback trials sit strictly below E_th
    p = SystemParams()
    rng = np.random.default_rng(21)
    alphas = rng.exponential(size=(100_000, p.antennas))
    active, energy, met, _ = select_batch(p, alphas)
    e = p.energy_threshold
    assert np.all(energy[~met] < e)
    assert np.all(energy[met] >= e)
    interior = met & (active < p.antennas)
    assert np.all(energy[interior] < (1 + 1 / active[interior]) * e)


def test_pmf_counts_match_analytic():
    p = _params(8, 6.0)
    stats = run_energy_trials(p, 200_000, seed=13, keep_samples=False)
    tvd = 0.5 * np.abs(stats.empirical_pmf - pmf_active_beams(p)).sum()
    assert tvd < 0.01


# --- sum-rate estimators ----------------------------------------------------

def test_beam_rates_single_user_single_beam():
    rates, who = beam_rates(np.array([[1.0]]), snr=1.0)
    assert float(rates) == pytest.approx(1.0)      # log2(1 + 1)
    assert who.tolist() == [0]


def test_beam_rates_tie_goes_to_lowest_user():
    gains = np.array([[2.0, 1.0], [2.0, 3.0]])     # users x beams
    rates, who = beam_rates(gains, snr=1.0)
    assert who.tolist() == [0, 1]
    scale = 0.5
    expect = (math.log2(1 + scale * 2 / (1 + scale * 1))
              + math.log2(1 + scale * 3 / (1 + scale * 2)))
    assert float(rates) == pytest.approx(expect)


def test_beam_rates_batched_shapes():
    rng = np.random.default_rng(0)
    gains = rng.exponential(size=(5, 3, 2))
    rates, who = beam_rates(gains, snr=2.0)
    assert rates.shape == (5,)
    assert who.shape == (5, 2)
    assert np.all(rates >= 0) and np.all(np.isfinite(rates))


def test_sumrate_conditional_argument_errors():
    p = _params(4, 6.0)
    with pytest.raises(ValueError, match="active_count"):
        sumrate_conditional(p, 5, snr=1.0, trials=10, seed=0)
    with pytest.raises(ValueError, match="active_count"):
        sumrate_conditional(p, 0, snr=1.0, trials=10, seed=0)
    with pytest.raises(ValueError, match="snr"):
        sumrate_conditional(p, 2, snr=-1.0, trials=10, seed=0)


def test_sumrate_vanishes_at_zero_snr():
    est = sumrate_conditional(_params(4, 6.0), 2, snr=0.0, trials=2_000,
                              seed=30)
    assert est.mean == pytest.approx(0.0, abs=1e-12)


def test_more_users_never_hurt():
    # larger scheduling pool: multiuser-diversity gain, allow 2 SE slack
    four = sumrate_conditional(_params(4, 6.0, users=4), 4, snr=0.5,
                               trials=40_000, seed=31)
    sixteen = sumrate_conditional(_params(4, 6.0, users=16), 4, snr=0.5,
                                  trials=40_000, seed=32)
    assert sixteen.mean >= four.mean - 2 * math.hypot(four.se, sixteen.se)


def test_sumrate_average_zero_threshold_equals_full_conditional():
    # all mass on m = M, so the weighted mean is exactly that conditional
    summary = sumrate_average(_params(4, 0.0), snr=0.5, trials=8_192, seed=33)
    assert summary.weighted.mean == summary.conditional[-1].mean
    assert summary.stats.pmf_counts[-1] == summary.stats.trials


def test_sumrate_average_huge_threshold_matches_single_beam():
    p = _params(4, 50.0)
    summary = sumrate_average(p, snr=0.5, trials=30_000, seed=34)
    solo = sumrate_conditional(p, 1, snr=0.5, trials=30_000, seed=98)
    bound = 2 * math.hypot(summary.weighted.se, solo.se)
    assert abs(summary.weighted.mean - solo.mean) <= bound


def test_sumrate_average_internal_consistency():
    summary = sumrate_average(SystemParams(), snr=0.5, trials=30_000, seed=35)
    gap = abs(summary.weighted.mean - summary.empirical.mean)
    assert gap <= 3 * math.hypot(summary.weighted.se, summary.empirical.se)
    assert summary.pmf.sum() == pytest.approx(1.0, abs=1e-9)
    by_count = summary.stats.per_beamcount_rate_sums
    assert math.fsum(by_count) == pytest.approx(summary.stats.sumrate_sum,
                                                rel=1e-9)


def test_sumrate_average_threshold_sweep_non_increasing():
    # raising the harvesting threshold concentrates power in fewer beams; in
    # the noise-limited regime that can only lower the expected sum rate
    rates = []
    for i, mu in enumerate([0.5, 6.0, 30.0]):
        summary = sumrate_average(_params(4, mu), snr=0.5, trials=40_000,
                                  seed=36 + i)
        rates.append(summary.weighted)
    for a, b in zip(rates, rates[1:]):
        assert b.mean <= a.mean + 2 * math.hypot(a.se, b.se)


# --- CSV emission -----------------------------------------------------------

def test_trialstats_csv_roundtrip():
    p = SystemParams()
    stats = run_energy_trials(p, 30_000, seed=40, histogram_bins=20,
                              histogram_x_max=2 * p.energy_threshold,
                              keep_samples=False)
    buf = io.StringIO()
    write_trialstats_csv(stats, buf)
    text = buf.getvalue()
    assert text.startswith("record,a,b,c\n")
    back = read_trialstats_csv(io.StringIO(text))
    assert back.trials == stats.trials
    assert back.seed == stats.seed
    assert back.antennas == stats.antennas
    assert np.array_equal(back.pmf_counts, stats.pmf_counts)
    assert np.array_equal(back.hist_counts, stats.hist_counts)
    assert np.array_equal(back.hist_edges, stats.hist_edges)


def test_trialstats_csv_roundtrip_with_rates():
    summary = sumrate_average(SystemParams(), snr=0.5, trials=4_096, seed=41)
    buf = io.StringIO()
    write_trialstats_csv(summary.stats, buf)
    back = read_trialstats_csv(io.StringIO(buf.getvalue()))
    assert back.sumrate_sum == summary.stats.sumrate_sum
    assert back.sumrate_sq_sum == summary.stats.sumrate_sq_sum
    assert np.array_equal(back.per_beamcount_rate_sums,
                          summary.stats.per_beamcount_rate_sums)
    assert back.rate_estimate() == summary.stats.rate_estimate()


def test_trialstats_csv_rejects_foreign_header():
    with pytest.raises(ValueError, match="header"):
        read_trialstats_csv(io.StringIO("x,y\n1,2\n"))
