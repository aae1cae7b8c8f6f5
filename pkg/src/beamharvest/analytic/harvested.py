"""Closed-form law of the per-coherence-time harvested energy.

In threshold units v = x / c (c the energy constant, mu = E_th / c) the
harvested energy is z_1 restricted below mu on the fallback event, z_m / m on
the m-active bands [mu, (1+1/m)mu), and z_M / M in the all-beams tail.  The
CDF assembles the best-beam head, the middle-band probabilities, and an
Erlang tail; the PDF is its exact piecewise derivative; the mean integrates
the survival function in closed form.

Region conventions: boundaries are half-open, [E_th, (1+1/m)E_th) activates
band m.  A zero threshold collapses everything to the all-beams case, whose
gamma law is substituted directly rather than evaluated through the band
machinery (which would divide by E_th).
"""
from __future__ import annotations

import math

from scipy import special

from ..model import SystemParams
from .bands import band_density, band_integral, band_probability, band_upper
from .series import DEFAULT_WORKSPACE, SeriesWorkspace

__all__ = [
    "cdf_harvested",
    "pdf_harvested",
    "mean_harvested",
    "region_of",
    "region_boundaries",
]


def _setup(params: SystemParams, ws: SeriesWorkspace | None):
    ws = ws or DEFAULT_WORKSPACE
    ws.check_antennas(params.antennas)
    return ws, params.antennas, params.energy_constant, params.mu


def region_boundaries(params: SystemParams) -> list[float]:
    """Ascending energy values where the piecewise law changes branch."""
    e_th = params.energy_threshold
    if e_th == 0 or params.antennas == 1:
        return [] if e_th == 0 else [e_th]
    edges = {e_th * (1 + 1 / m) for m in range(1, params.antennas)}
    edges.add(e_th)
    return sorted(edges)


def region_of(params: SystemParams, x: float) -> str:
    """Region tag at energy x: below_Eth, middle_m, or above_best_only."""
    if x < 0:
        raise ValueError("energy must be >= 0")
    e_th = params.energy_threshold
    if e_th == 0:
        return "above_best_only"
    if x < e_th:
        return "below_Eth"
    # largest m whose band still contains x; bands empty from high m down
    for m in range(params.antennas - 1, 0, -1):
        if x < band_upper(m, 1.0) * e_th:
            return f"middle_{m}"
    return "above_best_only"


def _erlang_tail(total: int, w: float) -> float:
    """P[gamma(total, 1) >= w], regularized upper incomplete gamma."""
    return float(special.gammaincc(total, w))


def cdf_harvested(params: SystemParams, x: float,
                  ws: SeriesWorkspace | None = None) -> float:
    """P[harvested energy < x] for one coherence time."""
    ws, total, c, mu = _setup(params, ws)
    if x < 0:
        raise ValueError("energy must be >= 0")
    if x == 0:
        return 0.0
    v = x / c
    if mu == 0.0:
        return float(special.gammainc(total, total * v))
    if v < mu:
        return (-math.expm1(-v)) ** total
    pieces = [1.0, -_erlang_tail(total, total * v)]
    for m in range(1, total):
        if v < band_upper(m, mu):
            pieces.append(-band_probability(total, m, mu, v, ws))
    return math.fsum(pieces)


def pdf_harvested(params: SystemParams, x: float,
                  ws: SeriesWorkspace | None = None) -> float:
    """Density (per joule) of the harvested energy: exact derivative of the CDF."""
    ws, total, c, mu = _setup(params, ws)
    if x < 0:
        raise ValueError("energy must be >= 0")
    v = x / c
    if mu == 0.0:
        if v == 0.0:
            return 1.0 / c if total == 1 else 0.0
        logf = (math.log(total) + (total - 1) * math.log(total * v)
                - total * v - ws.log_factorial(total - 1))
        return math.exp(logf) / c
    if v < mu:
        e = math.exp(-v)
        return total * e * (1.0 - e) ** (total - 1) / c
    # all-beams piece: density of z_M / M
    if v > 0:
        logf = (math.log(total) + (total - 1) * math.log(total * v)
                - total * v - ws.log_factorial(total - 1))
        pieces = [math.exp(logf)]
    else:
        pieces = [0.0]
    for m in range(1, total):
        if v < band_upper(m, mu):
            pieces.append(band_density(total, m, mu, v, ws))
    return math.fsum(pieces) / c


def mean_harvested(params: SystemParams,
                   ws: SeriesWorkspace | None = None) -> float:
    """Expected harvested energy [J] over one coherence time.

    Integrates the survival function: the head integral of 1-(1-e^-v)^M has
    a binomial closed form, the Erlang tail integrates to a weighted Poisson
    sum, and each middle band contributes its exact band_integral.
    """
    ws, total, c, mu = _setup(params, ws)
    if mu == 0.0:
        return c  # all beams active: E[z_M] / M = 1 in threshold units
    head = math.fsum(
        math.comb(total, k) * (-1.0 if (k + 1) % 2 else 1.0)
        * -math.expm1(-k * mu) / k
        for k in range(1, total + 1))
    log_mmu = math.log(total * mu)
    tail = math.fsum(
        (total - t) / total
        * math.exp(-total * mu + t * log_mmu - ws.log_factorial(t))
        for t in range(total))
    mid = math.fsum(band_integral(total, m, mu, ws) for m in range(1, total))
    return c * (head + tail + mid)
