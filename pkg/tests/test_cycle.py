import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otto_ne.cycle import ENGINE, NOT_AN_ENGINE, CycleSpec, efficiency, evaluate_cycle, power
from otto_ne.errors import DegenerateCycle, DomainError
from otto_ne.protocols import FrequencyProtocol
from otto_ne.thermo_core import Coherent, CorrelatedPair, CustomPowerLaw, ReservoirSpec


def spec(b1=0.1, b2=0.025, w1=1.0, w2=2.0, stroke="adiabatic", tau=0.0, hot_dev=None, **kw):
    hot = ReservoirSpec(b2) if hot_dev is None else ReservoirSpec(b2, hot_dev)
    return CycleSpec.build(ReservoirSpec(b1), hot, w1, w2, stroke, tau, **kw)


def test_adiabatic_thermal_example():
    r = evaluate_cycle(spec())
    assert r.efficiency == 0.5
    assert r.engine_flag == ENGINE
    assert r.q_star_1 == r.q_star_2 == 1.0


def test_adiabatic_corners():
    r = evaluate_cycle(spec())
    assert (r.E_A, r.E_B, r.E_C, r.E_D) == pytest.approx((10.00833, 20.01667, 40.00834, 20.00417), abs=1e-5)
    assert (r.W1, r.W3, r.Q2, r.Q4) == pytest.approx((10.00833, -20.00417, 19.99167, -9.99583), abs=1e-5)


def test_sudden_corners_and_not_an_engine():
    r = evaluate_cycle(spec(stroke="sudden"))
    assert (r.E_B, r.E_D) == pytest.approx((25.02083, 25.00521), abs=1e-5)
    assert (r.W1, r.W3) == pytest.approx((15.01250, -15.00313), abs=1e-5)
    assert (r.Q2, r.Q4) == pytest.approx((14.98750, -14.99688), abs=1e-5)
    assert r.W_total == pytest.approx(-0.00937, abs=1e-5)
    assert r.engine_flag == NOT_AN_ENGINE
    assert r.efficiency < 0


def test_sudden_engine_efficiency():
    # direct evaluation gives 0.2996799 (0.299683 would need n1 + 1/2 rounded to 5 digits)
    eta, flag = efficiency(spec(b1=0.2, b2=0.02, stroke="sudden"))
    assert flag == ENGINE
    assert eta == pytest.approx(0.2996799, abs=1e-7)


def test_degenerate():
    with pytest.raises(DegenerateCycle):
        evaluate_cycle(spec(w2=1.0))


def test_protocol_endpoints_checked():
    with pytest.raises(DomainError):
        CycleSpec(ReservoirSpec(0.1), ReservoirSpec(0.05), 1.0, 2.0,
                  FrequencyProtocol.adiabatic(1.0, 3.0), FrequencyProtocol.adiabatic(3.0, 1.0))


def test_power_uses_cycle_time():
    s = spec(cycle_time=4.0)
    r = evaluate_cycle(s)
    assert power(s) == pytest.approx(r.W_total / 4.0)
    with pytest.raises(DomainError):
        power(s.with_(cycle_time=0.0))


def test_finite_time_lowers_efficiency():
    fast = evaluate_cycle(spec(stroke="linear", tau=0.5))
    slow = evaluate_cycle(spec(stroke="linear", tau=50.0))
    assert fast.q_star_1 > slow.q_star_1 >= 1.0 - 1e-12
    assert fast.efficiency < slow.efficiency < 0.5 + 1e-6


devs = st.one_of(
    st.none(),
    st.builds(lambda l: CorrelatedPair(l, "one-atom"), st.floats(0.0, 1.0)),
    st.builds(lambda l: CorrelatedPair(l, "two-atom"), st.floats(0.0, 0.5)),
    st.builds(Coherent, st.floats(0.0, 1e-4), st.floats(0.0, 6.28)),
    st.builds(CustomPowerLaw, st.floats(-0.5, 0.5), st.sampled_from([1.0, 2.0])),
)


@given(st.floats(0.5, 2.0), st.floats(1.05, 4.0), st.floats(0.001, 0.01), st.floats(0.2, 1.2), devs,
       st.sampled_from(["adiabatic", "sudden", "linear", "smooth"]), st.floats(0.1, 20.0))
@settings(max_examples=80, deadline=None)
def test_first_law_and_adiabatic_law(w1, ratio, y1, r2, dev, stroke, tau):
    w2 = w1 * ratio
    s = spec(y1 / w1, y1 * r2 / w2, w1, w2, stroke, tau, hot_dev=dev)
    r = evaluate_cycle(s)
    maxE = max(r.E_A, r.E_B, r.E_C, r.E_D)
    assert abs(r.W1 + r.W3 + r.Q2 + r.Q4) < 1e-12 * maxE
    assert math.isclose(r.efficiency, r.eta_quotient, rel_tol=1e-6, abs_tol=1e-9)
    if stroke == "adiabatic":
        assert abs(r.efficiency - (1 - w1 / w2)) <= 1e-12 * (1 - w1 / w2)
