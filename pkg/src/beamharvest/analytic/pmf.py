"""Distribution of the active-beam count after cooperative selection.

For 1 <= m < M the mass is the band probability at the band's left edge
(top-m feasible, adding the next beam infeasible); m = 1 additionally
collects the fallback mass where even the best beam misses the threshold;
m = M is the Erlang tail of the full sum.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from ..model import SystemParams
from .bands import band_mass
from .orderstats import joint_pdf_next_and_sum, pdf_z1
from .series import DEFAULT_WORKSPACE, SeriesWorkspace

__all__ = [
    "pmf_active_beams",
    "band_mass_quadrature",
    "pmf_one_beam_quadrature",
]

# adaptive-quadrature budget for the cross-check integrals
_QUAD_OPTS = dict(epsabs=1e-9, epsrel=1e-11)


def pmf_active_beams(params: SystemParams,
                     ws: SeriesWorkspace | None = None) -> np.ndarray:
    """PMF of the active-beam count, indices 0..M-1 for counts 1..M."""
    ws = ws or DEFAULT_WORKSPACE
    total = params.antennas
    ws.check_antennas(total)
    mu = params.mu
    if total == 1:
        return np.array([1.0])
    if mu == 0.0:
        out = np.zeros(total)
        out[-1] = 1.0
        return out
    out = np.empty(total)
    for m in range(1, total):
        out[m - 1] = band_mass(total, m, mu, ws)
    out[0] += (-math.expm1(-mu)) ** total       # single-beam fallback mass
    out[total - 1] = float(special.gammaincc(total, total * mu))
    return out


def band_mass_quadrature(total: int, m: int, mu: float,
                         ws: SeriesWorkspace | None = None) -> float:
    """Band mass by 2-D quadrature of the joint order-statistic law.

    Integrates joint_pdf_next_and_sum over {0 < x < mu,
    m*mu <= y < (m+1)*mu - x}: the region where the top-m sum clears its
    threshold but adding the (m+1)-th beam would miss the next one.
    Independent of the band machinery; used to arbitrate it.
    """
    ws = ws or DEFAULT_WORKSPACE
    val, _ = integrate.dblquad(
        lambda y, x: joint_pdf_next_and_sum(total, m, x, y, ws),
        0.0, mu,
        lambda x: m * mu,
        lambda x: (m + 1) * mu - x,
        **_QUAD_OPTS)
    return val


def pmf_one_beam_quadrature(params: SystemParams,
                            ws: SeriesWorkspace | None = None) -> float:
    """Single-beam mass by quadrature: fallback head plus the m=1 band region.

    P[M_a = 1] = P[z_1 < mu] + P[z_1 >= mu, z_1 + a_2 < 2 mu], both terms
    evaluated by adaptive quadrature of the underlying densities.
    """
    ws = ws or DEFAULT_WORKSPACE
    total = params.antennas
    ws.check_antennas(total)
    mu = params.mu
    if total == 1:
        return 1.0
    if mu == 0.0:
        return 0.0
    head, _ = integrate.quad(lambda x: pdf_z1(total, x, ws), 0.0, mu,
                             **_QUAD_OPTS)
    return head + band_mass_quadrature(total, 1, mu, ws)
