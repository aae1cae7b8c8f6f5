"""Parameter container, config parsing, and the beam-selection rule."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamharvest import (
    SystemParams,
    harvested_energy_per_beam,
    mu_parameter,
    params_from_config,
    select_beams,
)


def test_default_constants():
    p = SystemParams()
    assert p.energy_constant == pytest.approx(1e-3, rel=1e-12)
    assert p.mu == pytest.approx(6.0, rel=1e-12)
    assert mu_parameter(p) == pytest.approx(6.0, rel=1e-12)


def test_mu_zero_threshold():
    assert mu_parameter(SystemParams(energy_threshold=0.0)) == 0.0


def test_mu_linear_in_threshold():
    base = mu_parameter(SystemParams(energy_threshold=0.003))
    assert mu_parameter(SystemParams(energy_threshold=0.006)) == pytest.approx(
        2 * base, rel=1e-12)


@pytest.mark.parametrize("bad", [
    dict(antennas=0),
    dict(antennas=5, users=4),
    dict(tx_power=0.0),
    dict(coherence_time=-1.0),
    dict(efficiency=0.0),
    dict(efficiency=1.2),
    dict(pathloss_exponent=1.5),
    dict(pathloss_exponent=5.5),
    dict(distance=0.0),
    dict(energy_threshold=-1e-9),
    dict(energy_threshold=float("inf")),
])
def test_invalid_params_rejected(bad):
    with pytest.raises(ValueError):
        SystemParams(**bad)


def test_energy_per_beam_examples():
    p = SystemParams()  # c = 1e-3 J
    assert harvested_energy_per_beam(p, 2, 1.5) == pytest.approx(7.5e-4, rel=1e-12)
    assert harvested_energy_per_beam(p, 3, 0.0) == 0.0
    x = 0.7321
    ratio = harvested_energy_per_beam(p, 1, x) / harvested_energy_per_beam(p, 2, x)
    assert ratio == pytest.approx(2.0, rel=1e-12)


def test_energy_per_beam_range_errors():
    p = SystemParams()
    with pytest.raises(ValueError):
        harvested_energy_per_beam(p, 0, 1.0)
    with pytest.raises(ValueError):
        harvested_energy_per_beam(p, 5, 1.0)
    with pytest.raises(ValueError):
        harvested_energy_per_beam(p, 1, -0.1)


def test_select_beams_two_active():
    p = SystemParams(energy_threshold=2e-3)  # mu = 2
    out = select_beams(p, np.array([3.0, 1.0, 0.5, 0.2]))
    assert out.active_count == 2
    assert out.active_beams == (1, 2)
    assert out.threshold_met
    assert out.harvested_energy == pytest.approx(p.energy_constant * 2.0, rel=1e-12)


def test_select_beams_fallback():
    p = SystemParams(energy_threshold=1e-3)  # mu = 1
    out = select_beams(p, np.array([0.5, 0.3, 0.1, 0.05]))
    assert out.active_count == 1
    assert not out.threshold_met
    assert out.active_beams == (1,)
    assert out.harvested_energy == pytest.approx(p.energy_constant * 0.5, rel=1e-12)


def test_select_beams_zero_threshold_uses_all():
    p = SystemParams(energy_threshold=0.0)
    out = select_beams(p, np.array([0.9, 0.1, 2.0, 0.4]))
    assert out.active_count == 4
    assert out.threshold_met
    assert out.active_beams == (3, 1, 4, 2)


def test_select_beams_input_errors():
    p = SystemParams()
    with pytest.raises(ValueError):
        select_beams(p, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        select_beams(p, np.array([1.0, -0.5, 2.0, 0.1]))


@settings(max_examples=300, deadline=None)
@given(
    alphas=st.lists(st.floats(min_value=0.0, max_value=50.0), min_size=1, max_size=8),
    mu=st.floats(min_value=0.0, max_value=30.0),
)
def test_selection_invariants(alphas, mu):
    m_total = len(alphas)
    p = SystemParams(antennas=m_total, users=m_total,
                     energy_threshold=mu * 1e-3)  # c = 1e-3, so params.mu == mu
    out = select_beams(p, np.array(alphas))
    c = p.energy_constant
    z = np.cumsum(np.sort(np.asarray(alphas))[::-1])
    m = out.active_count
    assert 1 <= m <= m_total
    assert len(set(out.active_beams)) == m
    assert all(1 <= b <= m_total for b in out.active_beams)
    assert out.harvested_energy == pytest.approx(c * z[m - 1] / m, rel=1e-12)
    if out.threshold_met:
        # prefix feasibility and maximality, mirroring the rule's arithmetic
        assert all(z[j] >= p.mu * (j + 1) for j in range(m))
        if m < m_total:
            assert z[m] < p.mu * (m + 1)
        assert out.harvested_energy >= p.energy_threshold * (1 - 1e-12)
    else:
        assert m == 1 and z[0] < p.mu
        assert out.harvested_energy < p.energy_threshold
    if 1 < m < m_total and out.threshold_met:
        # support of the interior pieces of the energy law
        assert out.harvested_energy < (1 + 1 / m) * p.energy_threshold


@settings(max_examples=200, deadline=None)
@given(
    alphas=st.lists(st.floats(min_value=0.0, max_value=50.0), min_size=1, max_size=8),
    mu=st.floats(min_value=1e-6, max_value=30.0),
    log_t=st.integers(min_value=-2, max_value=3),
)
def test_selection_scale_covariance(alphas, mu, log_t):
    # power-of-two scaling is exact in binary floating point, so the rule
    # must pick the identical beam set
    t = 2.0 ** log_t
    m_total = len(alphas)
    p1 = SystemParams(antennas=m_total, users=m_total, energy_threshold=mu * 1e-3)
    p2 = SystemParams(antennas=m_total, users=m_total, energy_threshold=t * mu * 1e-3)
    a = np.array(alphas)
    out1 = select_beams(p1, a)
    out2 = select_beams(p2, t * a)
    assert out1.active_count == out2.active_count
    assert out1.active_beams == out2.active_beams
    assert out2.harvested_energy == pytest.approx(t * out1.harvested_energy, rel=1e-12)


def _write(tmp_path, text):
    path = tmp_path / "params.cfg"
    path.write_text(text)
    return str(path)


def test_config_full_roundtrip(tmp_path):
    path = _write(tmp_path, """
# system configuration
antennas = 8
users = 12
tx_power = 5e3
coherence_time = 0.2
efficiency = 0.8
pathloss_exponent = 2.5
pathloss_const = 2.0
distance = 50.0
energy_threshold = 0.004
""")
    p = params_from_config(path)
    assert p == SystemParams(antennas=8, users=12, tx_power=5e3,
                             coherence_time=0.2, efficiency=0.8,
                             pathloss_exponent=2.5, pathloss_const=2.0,
                             distance=50.0, energy_threshold=0.004)
    assert isinstance(p.antennas, int) and isinstance(p.users, int)


def test_config_partial_keeps_defaults(tmp_path):
    p = params_from_config(_write(tmp_path, "antennas = 2\n"))
    assert p.antennas == 2
    assert p.users == SystemParams().users


def test_config_unknown_key(tmp_path):
    with pytest.raises(ValueError, match="unknown config key"):
        params_from_config(_write(tmp_path, "antennas = 2\nbogus = 1\n"))


def test_config_duplicate_key(tmp_path):
    with pytest.raises(ValueError, match="duplicate"):
        params_from_config(_write(tmp_path, "antennas = 2\nantennas = 3\n"))


def test_config_bad_value(tmp_path):
    with pytest.raises(ValueError):
        params_from_config(_write(tmp_path, "antennas = two\n"))


def test_config_missing_file():
    with pytest.raises(OSError):
        params_from_config("/nonexistent/params.cfg")
