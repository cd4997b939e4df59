import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otto_ne.errors import DomainError, NonphysicalOccupation
from otto_ne.thermo_core import (
    Coherent,
    Conventions,
    CorrelatedPair,
    CustomPowerLaw,
    CustomTabulated,
    ReservoirSpec,
    Thermal,
    delta_n,
    effective_temperature,
    energy_matched_temperature,
    mean_occupation,
    regime_check,
    total_occupation,
)


def test_mean_occupation_values():
    assert mean_occupation(1.0, math.log(2.0)) == pytest.approx(1.0, rel=1e-15)
    assert mean_occupation(0.1, 1.0) == pytest.approx(1 / math.expm1(0.1), rel=1e-15)
    # exp overflow gives exactly zero
    assert mean_occupation(1.0, 1e6) == 0.0


def test_mean_occupation_rejects_bad_input():
    with pytest.raises(DomainError):
        mean_occupation(0.0, 1.0)
    with pytest.raises(DomainError):
        mean_occupation(1.0, -1.0)
    with pytest.raises(DomainError):
        mean_occupation(float("nan"), 1.0)


@given(st.floats(1e-4, 1e-2), st.floats(0.1, 10.0))
def test_high_temperature_limit(beta, omega):
    y = beta * omega
    assert mean_occupation(beta, omega) + 0.5 == pytest.approx(1.0 / y, rel=y * y)


def test_deviation_laws():
    b = 0.1
    assert delta_n(ReservoirSpec(b, Thermal()), 2.0) == 0.0
    assert delta_n(ReservoirSpec(b, CorrelatedPair(0.5, "one-atom")), 2.0) == pytest.approx(b * 0.25 / 8)
    assert delta_n(ReservoirSpec(b, CorrelatedPair(0.5, "two-atom")), 2.0) == pytest.approx(-0.5 / 4)
    assert delta_n(ReservoirSpec(b, Coherent(0.01, 0.0)), 2.0) == pytest.approx(-0.01 / 0.04)
    assert delta_n(ReservoirSpec(b, CustomPowerLaw(3.0, 2.0)), 2.0) == pytest.approx(0.75)
    tab = CustomTabulated((1.0, 2.0, 3.0), (0.1, 0.2, 0.4))
    assert delta_n(ReservoirSpec(b, tab), 2.0) == pytest.approx(0.2)


def test_hbar_enters_deviations():
    conv = Conventions(hbar=2.0)
    res = ReservoirSpec(0.1, CorrelatedPair(0.5, "one-atom"))
    assert delta_n(res, 2.0, conv) == pytest.approx(0.1 * 2.0 * 0.25 / 8)


def test_tabulated_no_extrapolation():
    tab = CustomTabulated((1.0, 2.0), (0.0, 0.1))
    with pytest.raises(DomainError):
        delta_n(ReservoirSpec(0.1, tab), 2.5)
    with pytest.raises(DomainError):
        CustomTabulated((2.0, 1.0), (0.0, 0.1))


def test_nonphysical_occupation():
    with pytest.raises(NonphysicalOccupation):
        delta_n(ReservoirSpec(1.0, CorrelatedPair(10.0, "two-atom")), 1.0)


def test_effective_temperature_two_atom():
    res = ReservoirSpec(0.05, CorrelatedPair(0.2, "two-atom"))
    teff = effective_temperature(res, 3.0)
    # hbar*omega*delta_n = -lambda/2, independent of omega
    assert teff.deviation_energy == pytest.approx(-0.1)
    assert teff.value == pytest.approx(20.0 - 0.1)
    assert teff.beta() == pytest.approx(1 / 19.9)


@given(st.floats(1e-4, 1e-2), st.floats(0.5, 5.0), st.floats(0.0, 0.05))
@settings(max_examples=50)
def test_energy_matched_agrees_to_leading_order(y, omega, rel):
    beta = y / omega
    res = ReservoirSpec(beta, CorrelatedPair(rel / beta, "two-atom"))
    lin = effective_temperature(res, omega).value
    em = energy_matched_temperature(res, omega)
    assert em == pytest.approx(lin, rel=10 * y)


def test_total_occupation():
    res = ReservoirSpec(0.1, CustomPowerLaw(0.5, 1.0))
    assert total_occupation(res, 1.0) == pytest.approx(1 / math.expm1(0.1) + 0.5)


def test_regime_check_flags_but_never_raises(caplog):
    d = regime_check(ReservoirSpec(1.0, CorrelatedPair(1.0)), 2.0)
    assert not d.high_temperature and not d.weak_correlation
    assert len(d.warnings) == 2
    assert "high-temperature" in caplog.text
    quiet = regime_check(ReservoirSpec(1e-3), 1.0, emit=False)
    assert quiet.high_temperature and quiet.warnings == ()


def test_validation_of_models():
    with pytest.raises(DomainError):
        CorrelatedPair(0.1, "three-atom")
    with pytest.raises(DomainError):
        Coherent(-1.0, 0.0)
    with pytest.raises(DomainError):
        ReservoirSpec(-1.0)
    with pytest.raises(DomainError):
        Conventions(hbar=0.0)
