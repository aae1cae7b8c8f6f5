"""Closed-form evaluators: order-statistic densities, the harvested-energy
law, and the active-beam PMF."""
from .series import DEFAULT_WORKSPACE, PolyExpTerms, SeriesWorkspace
from .orderstats import pdf_z1, pdf_zm, joint_pdf_next_and_sum
from .bands import (band_density, band_integral, band_mass, band_probability,
                    band_terms, band_upper)
from .harvested import (cdf_harvested, mean_harvested, pdf_harvested,
                        region_boundaries, region_of)
from .pmf import band_mass_quadrature, pmf_active_beams, pmf_one_beam_quadrature
from .curves import (AnalyticCurve, CURVE_KINDS, energy_cdf_curve,
                     energy_pdf_curve, pmf_curve, read_curve_csv,
                     top_sum_pdf_curve, write_curve_csv)

__all__ = [
    "DEFAULT_WORKSPACE", "PolyExpTerms", "SeriesWorkspace",
    "pdf_z1", "pdf_zm", "joint_pdf_next_and_sum",
    "band_density", "band_integral", "band_mass", "band_probability",
    "band_terms", "band_upper",
    "cdf_harvested", "mean_harvested", "pdf_harvested",
    "region_boundaries", "region_of",
    "band_mass_quadrature", "pmf_active_beams", "pmf_one_beam_quadrature",
    "AnalyticCurve", "CURVE_KINDS", "energy_cdf_curve", "energy_pdf_curve",
    "pmf_curve", "read_curve_csv", "top_sum_pdf_curve", "write_curve_csv",
]
