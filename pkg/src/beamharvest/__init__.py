"""Energy harvesting at a sensor served opportunistically by a random-beam
multiuser downlink: selection rule, channel sampling, closed-form statistics
of the harvested energy, and Monte Carlo estimators.
"""
from .model import (
    SystemParams,
    SelectionOutcome,
    mu_parameter,
    harvested_energy_per_beam,
    select_beams,
    params_from_config,
)
from .channel import (
    ChannelRealization,
    draw_realization,
    ordered_projections,
    haar_unitary,
    realization_to_csv,
    realization_from_csv,
)
from .analytic import (
    SeriesWorkspace,
    AnalyticCurve,
    pdf_z1,
    pdf_zm,
    joint_pdf_next_and_sum,
    cdf_harvested,
    pdf_harvested,
    mean_harvested,
    pmf_active_beams,
    region_boundaries,
    region_of,
    energy_pdf_curve,
    energy_cdf_curve,
    pmf_curve,
    top_sum_pdf_curve,
    write_curve_csv,
    read_curve_csv,
)
from .montecarlo import (
    TrialStats,
    RateEstimate,
    SumRateSummary,
    run_energy_trials,
    select_batch,
    beam_rates,
    sumrate_conditional,
    sumrate_average,
    write_trialstats_csv,
    read_trialstats_csv,
)

__version__ = "0.1.0"

__all__ = [
    "SystemParams", "SelectionOutcome", "mu_parameter",
    "harvested_energy_per_beam", "select_beams", "params_from_config",
    "ChannelRealization", "draw_realization", "ordered_projections",
    "haar_unitary", "realization_to_csv", "realization_from_csv",
    "SeriesWorkspace", "AnalyticCurve", "pdf_z1", "pdf_zm",
    "joint_pdf_next_and_sum", "cdf_harvested", "pdf_harvested",
    "mean_harvested", "pmf_active_beams", "region_boundaries", "region_of",
    "energy_pdf_curve", "energy_cdf_curve", "pmf_curve", "top_sum_pdf_curve",
    "write_curve_csv", "read_curve_csv",
    "TrialStats", "RateEstimate", "SumRateSummary", "run_energy_trials",
    "select_batch", "beam_rates", "sumrate_conditional", "sumrate_average",
    "write_trialstats_csv", "read_trialstats_csv",
    "__version__",
]
