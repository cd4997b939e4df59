import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otto_ne.cycle import CycleSpec, evaluate_cycle
from otto_ne.errors import DomainError, TruncationError
from otto_ne.protocols import Covariance
from otto_ne.second_law import (
    GaussianState,
    clausius_direction,
    deviation_energies,
    engine_window,
    entropy_production,
    fock_oracle_relative_entropy,
    max_efficiency,
    max_efficiency_expansion,
    mean_force_coefficients,
    relative_entropy_gaussian,
    second_law_report,
    von_neumann_entropy,
)
from otto_ne.thermo_core import CorrelatedPair, ReservoirSpec

# S(n=1 || n=2) for equal frequencies, from the truncated number-basis oracle
ORACLE_N1_N2 = 0.11778303565638


def test_reference_point():
    g = relative_entropy_gaussian(GaussianState.thermal(1.0, 1.0), GaussianState.thermal(2.0, 1.0))
    f = fock_oracle_relative_entropy((1.0, 1.0), (2.0, 1.0))
    assert f == pytest.approx(ORACLE_N1_N2, abs=1e-12)
    assert g == pytest.approx(f, abs=1e-12)
    # geometric distributions: S = n1 ln(n1/n2) - (n1+1) ln((n1+1)/(n2+1))
    assert g == pytest.approx(math.log(1 / 2) - 2 * math.log(2 / 3), abs=1e-14)


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(0.8, 1.25))
@settings(max_examples=40, deadline=None)
def test_gaussian_matches_fock(n1, n2, wr):
    g = relative_entropy_gaussian(GaussianState.thermal(n1, 1.0), GaussianState.thermal(n2, wr))
    f = fock_oracle_relative_entropy((n1, 1.0), (n2, wr), cutoff=256)
    assert g == pytest.approx(f, abs=1e-6)


def test_oracle_refuses_heavy_tails():
    with pytest.raises(TruncationError):
        fock_oracle_relative_entropy((50.0, 1.0), (1.0, 1.0), cutoff=64)
    with pytest.raises(DomainError):
        fock_oracle_relative_entropy((0.0, 1.0), (1.0, 1.0))


def test_relative_entropy_edge_cases():
    a = GaussianState.thermal(1.0, 1.0)
    assert relative_entropy_gaussian(a, a) == 0.0
    vac = GaussianState(Covariance(0.5, 0.5, 0.0), 1.0)
    assert relative_entropy_gaussian(a, vac) == math.inf
    # pure rho1 against mixed rho2 is finite: S = -ln p_0(rho2)
    assert relative_entropy_gaussian(vac, a) == pytest.approx(math.log(2.0), rel=1e-12)


def test_von_neumann_entropy_thermal():
    n = 1.5
    s = von_neumann_entropy(GaussianState.thermal(n, 2.0))
    assert s == pytest.approx((n + 1) * math.log(n + 1) - n * math.log(n))


def test_max_efficiency():
    assert max_efficiency(0.1, 0.05) == pytest.approx(0.5)
    assert max_efficiency(0.1, 0.05, 0.0, 1.0) > 0.5
    with pytest.raises(DomainError):
        max_efficiency(0.1, 0.05, -20.0, 0.0)
    # first-order expansion agrees at the reversible point w1/w2 = b2/b1
    e = max_efficiency(0.1, 0.05, 1e-3, 2e-3)
    assert max_efficiency_expansion(0.1, 0.05, 1e-3, 2e-3, 1.0, 2.0) == pytest.approx(e, abs=1e-6)


def test_clausius_direction():
    assert clausius_direction(10.0, 20.0, 1.0, 0.5).ok
    assert not clausius_direction(20.0, 10.0, 1.0, 0.5).ok
    assert not clausius_direction(20.0, 10.0, 1.0, -0.5).applicable


def _spec(b1, b2, dev=None, stroke="adiabatic", tau=0.0):
    hot = ReservoirSpec(b2) if dev is None else ReservoirSpec(b2, dev)
    return CycleSpec.build(ReservoirSpec(b1), hot, 1.0, 2.0, stroke, tau)


def test_engine_window_necessary_not_sufficient():
    # sudden strokes, b2/b1 = 1/4: both window inequalities hold, yet W < 0
    s = _spec(0.1, 0.025, stroke="sudden")
    w = engine_window(s)
    assert w.first_holds and w.second_holds
    assert evaluate_cycle(s).W_total < 0


def test_mean_force_high_temperature():
    s = _spec(0.01, 0.005, CorrelatedPair(1.0, "one-atom"))
    d = deviation_energies(s)
    assert d.M_C == pytest.approx(-d.dH_C, rel=1e-2)
    mf = mean_force_coefficients(0.005, 2.0, GaussianState.thermal(99.5, 2.0))
    assert isinstance(mf.a, float)


def test_report_thermal():
    s = _spec(0.1, 0.025)
    rep = second_law_report(s)
    assert rep.eta == 0.5 and rep.eta_max == pytest.approx(0.75)
    assert rep.entropy_production > 0 and rep.inequality_margin > 0
    assert rep.clausius_ok and rep.engine_window_ok
    assert rep.heat_balance_rhs == pytest.approx(rep.inequality_margin, rel=1e-9)
    assert entropy_production(s) == pytest.approx(rep.entropy_production)


@given(st.floats(0.001, 0.01), st.floats(0.2, 0.95), st.floats(0.0, 0.08),
       st.sampled_from(["adiabatic", "linear", "sudden"]))
@settings(max_examples=40, deadline=None)
def test_second_law_in_window(y1, r, rel_lam, stroke):
    b1 = y1
    b2 = b1 * r / 2.0
    s = _spec(b1, b2, CorrelatedPair(rel_lam / b2, "one-atom"), stroke, 2.0)
    res = evaluate_cycle(s)
    rep = second_law_report(s, res)
    assert rep.entropy_production >= -1e-12
    if engine_window(s, res).ok and res.Q2 > 0:
        assert rep.inequality_margin >= -1e-12
    if res.W_total > 0 and res.Q2 > 0:
        assert res.efficiency <= rep.eta_max + 1e-4
