"""System parameters and the cooperative beam-selection rule.

A base station with M antennas transmits on M random orthonormal beams and
splits its power uniformly over whichever beams it keeps active.  A sensor at
distance d_H harvests RF energy from every active beam over one coherence
time.  The station drops beams greedily (weakest first, as seen by the
sensor) until the harvested energy clears the sensor's per-coherence-time
threshold; if even the single best beam cannot clear it, that beam is used
anyway at full power.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "SystemParams",
    "SelectionOutcome",
    "mu_parameter",
    "harvested_energy_per_beam",
    "select_beams",
    "params_from_config",
]

# config keys that hold integer counts; everything else is a float
_INT_FIELDS = {"antennas", "users"}


@dataclass(frozen=True)
class SystemParams:
    antennas: int = 4            # M, beams == BS antennas
    users: int = 4               # K >= M
    tx_power: float = 1.0e4      # P_T [W]
    coherence_time: float = 0.1  # T_c [s], one harvest per interval
    efficiency: float = 1.0      # RF-to-DC conversion, in (0, 1]
    pathloss_exponent: float = 3.0   # lambda, in [2, 5]
    pathloss_const: float = 1.0      # Gamma, reference-distance loss factor
    distance: float = 100.0          # d_H [m], BS-to-sensor
    energy_threshold: float = 0.006  # E_th [J], >= 0

    def __post_init__(self):
        if self.antennas < 1:
            raise ValueError("antennas must be a positive integer")
        if self.users < self.antennas:
            raise ValueError("users must satisfy K >= M")
        for name in ("tx_power", "coherence_time", "efficiency",
                     "pathloss_const", "distance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must lie in (0, 1]")
        if not 2 <= self.pathloss_exponent <= 5:
            raise ValueError("pathloss_exponent must lie in [2, 5]")
        if not (math.isfinite(self.energy_threshold)
                and self.energy_threshold >= 0):
            raise ValueError("energy_threshold must be finite and >= 0")

    @property
    def energy_constant(self) -> float:
        """c [J]: energy harvested per unit projection power at full power."""
        return (self.efficiency * self.coherence_time * self.tx_power
                / (self.pathloss_const * self.distance ** self.pathloss_exponent))

    @property
    def mu(self) -> float:
        """Dimensionless threshold E_th / c."""
        return mu_parameter(self)


@dataclass(frozen=True)
class SelectionOutcome:
    active_count: int          # M_a in [1, M]
    active_beams: tuple[int, ...]  # 1-based beam indices, descending projection
    harvested_energy: float    # E_H [J]
    threshold_met: bool        # False only on the single-beam fallback


def mu_parameter(params: SystemParams) -> float:
    """Threshold in units of the energy constant: mu = E_th / c.

    Zero exactly when the energy threshold is zero.
    """
    c = params.energy_constant
    if not (math.isfinite(c) and c > 0):
        raise ValueError(f"energy constant must be finite and > 0, got {c!r}")
    return params.energy_threshold / c


def harvested_energy_per_beam(params: SystemParams, active_count: int,
                              projection: float) -> float:
    """Energy [J] harvested from one beam when `active_count` beams share power.

    Equals c * projection / active_count: uniform power split P_T/m per beam.
    """
    if not 1 <= active_count <= params.antennas:
        raise ValueError(f"active_count must lie in [1, {params.antennas}]")
    if projection < 0:
        raise ValueError("projection power must be >= 0")
    return params.energy_constant * projection / active_count


def select_beams(params: SystemParams, projections) -> SelectionOutcome:
    """Apply the cooperative selection rule to one set of projection powers.

    Keeps the largest m such that the energy harvested from the m strongest
    beams under a P_T/m split still clears the threshold, i.e. z_m >= m*mu
    with z_m the sum of the m largest projections.  The mean z_m/m of the top
    m is non-increasing in m, so the feasible set is a prefix and "largest
    feasible m" is well-defined.  When even the best beam misses (z_1 < mu)
    the station falls back to that single beam at full power.

    Sort ties are broken toward the lower beam index; ties cannot change the
    partial sums, only the reported active set.
    """
    alpha = np.asarray(projections, dtype=float)
    m_total = params.antennas
    if alpha.shape != (m_total,):
        raise ValueError(f"expected {m_total} projection powers, got shape {alpha.shape}")
    if np.any(alpha < 0):
        raise ValueError("projection powers must be >= 0")

    order = np.argsort(-alpha, kind="stable")  # descending, ties -> low index
    z = np.cumsum(alpha[order])
    mu = params.mu
    feasible = z >= mu * np.arange(1, m_total + 1)
    if feasible[0]:
        m_active = int(np.max(np.nonzero(feasible)[0])) + 1
        met = True
    else:
        m_active = 1
        met = False
    energy = params.energy_constant * z[m_active - 1] / m_active
    return SelectionOutcome(
        active_count=m_active,
        active_beams=tuple(int(i) + 1 for i in order[:m_active]),
        harvested_energy=float(energy),
        threshold_met=met,
    )


def params_from_config(path) -> SystemParams:
    """Load SystemParams from a flat key=value file.

    Blank lines and '#' comments are skipped.  Keys must match the
    SystemParams field names exactly; unknown keys raise ValueError.
    """
    known = {f.name for f in fields(SystemParams)}
    values: dict[str, int | float] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            if key in values:
                raise ValueError(f"{path}:{lineno}: duplicate config key {key!r}")
            try:
                values[key] = int(val) if key in _INT_FIELDS else float(val)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {val!r}") from exc
    return SystemParams(**values)
