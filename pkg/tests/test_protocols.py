import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otto_ne.errors import DomainError, UseClosedForm
from otto_ne.protocols import (
    Covariance,
    FrequencyProtocol,
    adiabaticity_Q,
    propagate_covariance,
    q_star_from_pair,
    solve_classical_pair,
    sudden_q_star,
)


def test_closed_form_limits():
    assert adiabaticity_Q(FrequencyProtocol.sudden(1.0, 2.0)).q_star == 1.25
    assert adiabaticity_Q(FrequencyProtocol.adiabatic(1.0, 7.0)).q_star == 1.0
    with pytest.raises(UseClosedForm):
        solve_classical_pair(FrequencyProtocol.sudden(1.0, 2.0))


def test_short_ramp_reproduces_sudden():
    q = adiabaticity_Q(FrequencyProtocol.linear(1.0, 2.0, 1e-4 / 2.0)).q_star
    assert abs(q - 1.25) < 1e-4


def test_slow_ramp_is_adiabatic():
    assert abs(adiabaticity_Q(FrequencyProtocol.smooth(1.0, 2.0, 500.0)).q_star - 1) < 1e-3
    assert abs(adiabaticity_Q(FrequencyProtocol.linear(1.0, 2.0, 500.0)).q_star - 1) < 1e-3


def test_constant_frequency_is_rotation():
    # omega constant: X = sin(wt)/w, Y = cos(wt)
    w, T = 1.3, 2.7
    pair = solve_classical_pair(FrequencyProtocol.tabulated((0.0, T), (w, w)), 1e-12)
    assert pair.X == pytest.approx(math.sin(w * T) / w, abs=1e-10)
    assert pair.Y == pytest.approx(math.cos(w * T), abs=1e-10)
    assert pair.Xdot == pytest.approx(math.cos(w * T), abs=1e-10)
    assert q_star_from_pair(pair, w, w) == pytest.approx(1.0, abs=1e-10)


@given(
    st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.01, 30.0),
    st.sampled_from(["linear", "smooth"]),
)
@settings(max_examples=60, deadline=None)
def test_q_star_at_least_one_and_wronskian(w0, w1, tau, kind):
    res = adiabaticity_Q(FrequencyProtocol(kind, w0, w1, tau))
    assert res.q_star >= 1.0 - 1e-9
    assert res.wronskian_drift < 1e-9


def test_sudden_formula_symmetric():
    assert sudden_q_star(1.0, 3.0) == sudden_q_star(3.0, 1.0)


def test_reversed_tabulated():
    p = FrequencyProtocol.tabulated((0.0, 1.0, 3.0), (1.0, 1.5, 2.0))
    r = p.reversed()
    assert r.times == (0.0, 2.0, 3.0) and r.omegas == (2.0, 1.5, 1.0)
    assert r.omega_start == 2.0 and r.omega_end == 1.0


def test_protocol_validation():
    with pytest.raises(DomainError):
        FrequencyProtocol("bang", 1.0, 2.0)
    with pytest.raises(DomainError):
        FrequencyProtocol.linear(1.0, 2.0, -1.0)
    with pytest.raises(DomainError):
        FrequencyProtocol.tabulated((0.0, 1.0), (1.0, -2.0))


def test_omega_at_profiles():
    lin = FrequencyProtocol.linear(1.0, 3.0, 2.0)
    assert lin.omega_at(1.0) == pytest.approx(2.0)
    sm = FrequencyProtocol.smooth(1.0, 3.0, 2.0)
    assert sm.omega_at(0.0) == pytest.approx(1.0) and sm.omega_at(2.0) == pytest.approx(3.0)


def test_propagation_preserves_symplectic_eigenvalue():
    cov = Covariance.thermal(2.0, 1.0)
    for proto in (FrequencyProtocol.linear(1.0, 2.0, 1.7), FrequencyProtocol.smooth(1.0, 2.0, 0.3),
                  FrequencyProtocol.adiabatic(1.0, 2.0), FrequencyProtocol.sudden(1.0, 2.0)):
        out = propagate_covariance(proto, cov)
        assert out.symplectic_eigenvalue() == pytest.approx(cov.symplectic_eigenvalue(), rel=1e-9)


def test_propagated_energy_matches_q_star():
    cov = Covariance.thermal(0.7, 1.0)
    proto = FrequencyProtocol.linear(1.0, 2.5, 0.9)
    q = adiabaticity_Q(proto).q_star
    out = propagate_covariance(proto, cov)
    assert out.energy(2.5) == pytest.approx(q * 2.5 * 1.2, rel=1e-9)


def test_adiabatic_map_scaling():
    cov = Covariance.thermal(1.0, 1.0)
    out = propagate_covariance(FrequencyProtocol.adiabatic(1.0, 4.0), cov)
    assert out.xx == pytest.approx(cov.xx / 4.0)
    assert out.pp == pytest.approx(cov.pp * 4.0)


def test_covariance_check_rejects_unphysical():
    with pytest.raises(DomainError):
        Covariance(0.1, 0.1, 0.0).check()
    assert np.allclose(Covariance(1.0, 2.0, 0.5).matrix(), [[1.0, 0.5], [0.5, 2.0]])


def test_final_step_lands_on_duration():
    # t + (T - t) rounding below T used to end in a spurious step-size underflow
    res = adiabaticity_Q(FrequencyProtocol.linear(0.4375, 0.484375, 0.49356593140425825))
    assert res.q_star >= 1.0 and res.wronskian_drift < 1e-12


def test_pair_has_unit_wronskian():
    pair = solve_classical_pair(FrequencyProtocol.smooth(0.7, 3.1, 4.2))
    assert pair.wronskian == pytest.approx(-1.0, abs=1e-15)
