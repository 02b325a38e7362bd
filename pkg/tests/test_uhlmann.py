import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixphase.bloch import dagger, fidelity
from mixphase.errors import (BundleUndefinedError, DegenerateNodeWarning,
                             InvalidParameterError, UndefinedPhaseError)
from mixphase.kitaev import TWO_PI, ChainParams, gibbs_state
from mixphase.uhlmann import (accumulate_A, closed_curve_angle, connection_angle_rate,
                              critical_temperature, critical_temperatures, find_nodes,
                              holonomy_trace, node_function, one_minus_sech, parallel_lift,
                              sech, trace_closed_form, transport_profile,
                              uhlmann_phase_factor, x_value)


def trapezoid_A(m, T, k_end, n=1_000_000):
    """Independent oracle: uniform trapezoid rule in numpy, no shared code."""
    k = np.linspace(0.0, k_end, n + 1)
    dx, dy = m + np.cos(k), np.sin(k)
    d2 = dx * dx + dy * dy
    rate = 0.5 * (1.0 + m * np.cos(k)) / d2 * (1.0 - 1.0 / np.cosh(np.sqrt(d2) / T))
    h = k_end / n
    return h * (rate.sum() - 0.5 * (rate[0] + rate[-1]))


def test_accumulate_A_against_trapezoid_oracle():
    p = ChainParams(0.5, 0.3)
    for k_end in (1.0, math.pi, TWO_PI):
        assert accumulate_A(p, k_end) == pytest.approx(trapezoid_A(0.5, 0.3, k_end), abs=1e-8)


def test_accumulate_A_flat_band():
    T = 0.45
    x = 1.0 / math.cosh(1.0 / T)
    for k in (0.5, TWO_PI, 3 * TWO_PI + 1.0):
        assert accumulate_A(ChainParams(0.0, T), k) == pytest.approx(0.5 * k * (1 - x), abs=1e-10)


def test_accumulate_A_periodicity():
    p = ChainParams(0.7, 0.5)
    assert accumulate_A(p, 2 * TWO_PI + 1.3) == pytest.approx(
        2 * accumulate_A(p, TWO_PI) + accumulate_A(p, 1.3), abs=1e-10)


def test_accumulate_A_high_temperature_limit():
    # x -> 1 so A -> 0
    assert abs(accumulate_A(ChainParams(0.3, 1e3), TWO_PI)) < 1e-5


def test_A_for_trivial_phase_vanishes_over_turn():
    # m > 1 the angle returns without winding; A(2pi) is small but the path is nonzero
    p = ChainParams(1.3, 0.3)
    assert abs(accumulate_A(p, TWO_PI)) < math.pi


def test_requires_mixed_state():
    with pytest.raises(BundleUndefinedError):
        accumulate_A(ChainParams(0.5, 0.0), 1.0)
    with pytest.raises(InvalidParameterError):
        accumulate_A(ChainParams(0.5, 0.2), -1.0)


def test_sech_helpers():
    assert sech(0.0) == 1.0 and sech(1e4) == 0.0
    for z in (0.5, 3.0, 10.0, 50.0):
        assert one_minus_sech(z) == pytest.approx(1 - 1 / math.cosh(z), rel=1e-12)
    for z in (1e-6, 1e-3):
        # series 1 - sech z = z^2/2 - 5 z^4/24 + ...
        assert one_minus_sech(z) == pytest.approx(z * z / 2 - 5 * z ** 4 / 24, rel=1e-12)


def test_connection_rate_zero_at_mixed_point():
    assert connection_angle_rate(ChainParams(1.0, 0.3), math.pi) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 0.95), st.floats(0.1, 2.0), st.floats(0.0, 12.0))
def test_lift_projects_to_gibbs_state(m, T, k):
    p = ChainParams(m, T)
    psi = parallel_lift(p, k).psi
    np.testing.assert_allclose(psi @ dagger(psi), gibbs_state(p, k).matrix, atol=1e-12)


@pytest.mark.parametrize("horizontal", [False, True])
def test_trace_matrix_route_matches_closed_form(horizontal):
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = ChainParams(rng.uniform(0, 1.4), rng.uniform(0.1, 1.0))
        k = rng.uniform(0, 3 * TWO_PI)
        assert holonomy_trace(p, k, horizontal=horizontal) == pytest.approx(
            trace_closed_form(p, k, horizontal=horizontal), abs=1e-12)


def test_orientations_agree_on_closed_curves():
    p = ChainParams(0.4, 0.35)
    for n in (1, 2, 3):
        k = n * TWO_PI
        assert holonomy_trace(p, k) == pytest.approx(holonomy_trace(p, k, horizontal=True), abs=1e-12)


def test_node_function_closed_curve():
    # phi = 2 pi n: the trace is cos A
    assert node_function(0.3, TWO_PI, 0.8) == pytest.approx(math.cos(0.8), abs=1e-15)


def _increment_defect(p, k, h, horizontal):
    a = parallel_lift(p, k, horizontal=horizontal).psi
    b = parallel_lift(p, k + h, horizontal=horizontal).psi
    overlap = abs(np.trace(dagger(a) @ b))
    return abs(overlap - fidelity(gibbs_state(p, k), gibbs_state(p, k + h)))


def test_horizontal_lift_saturates_fidelity():
    p = ChainParams(0.5, 0.4)
    for k in (0.3, 2.0, 4.5):
        assert _increment_defect(p, k, 1e-3, True) < 1e-9


def test_default_lift_defect_is_second_order():
    p = ChainParams(0.5, 0.4)
    ratios = [_increment_defect(p, 1.0, h, False) / h ** 2 for h in (1e-2, 5e-3, 2.5e-3)]
    assert max(ratios) / min(ratios) < 1.1


def test_nodes_low_temperature_flat_band():
    nodes = find_nodes(ChainParams(0.0, 0.01))
    np.testing.assert_allclose([n.k_node for n in nodes],
                               [math.pi / 2, math.pi, 3 * math.pi / 2], atol=5e-3)
    assert [n.turn for n in nodes] == [1, 1, 1]


def test_node_is_zero_of_trace():
    p = ChainParams(0.5, 0.2)
    for n in find_nodes(p, n_turns=2):
        assert abs(holonomy_trace(p, n.k_node)) < 1e-9
        assert n.x_at_node == pytest.approx(x_value(p, n.k_node))


def test_no_nodes_at_high_temperature():
    assert find_nodes(ChainParams(0.5, 5.0), n_turns=2) == []
    assert uhlmann_phase_factor(ChainParams(0.5, 5.0)) == 1


def test_phase_factor_low_temperature_is_minus_one():
    assert uhlmann_phase_factor(ChainParams(0.0, 0.05)) == -1
    assert uhlmann_phase_factor(ChainParams(0.5, 0.05)) == -1


def test_phase_factor_trivial_regime():
    assert uhlmann_phase_factor(ChainParams(1.3, 0.2)) == 1


def test_closed_curve_node_at_critical_temperature():
    crit = critical_temperature(0.0, 1, 0)
    p = ChainParams(0.0, crit.T)
    nodes = find_nodes(p)
    assert nodes[-1].closed_curve and nodes[-1].k_node == pytest.approx(TWO_PI)
    with pytest.raises(UndefinedPhaseError):
        uhlmann_phase_factor(p)


def _regular_nodes(T):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateNodeWarning)
        return sum(1 for n in find_nodes(ChainParams(0.0, T)) if not n.degenerate)


def test_degenerate_node_at_merger():
    # in the flat band two first-turn nodes merge and disappear near T = 0.477
    lo, hi = 0.45, 0.5
    assert _regular_nodes(lo) == 3 and _regular_nodes(hi) == 1
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if _regular_nodes(mid) == 3:
            lo = mid
        else:
            hi = mid
    with pytest.warns(DegenerateNodeWarning):
        nodes = find_nodes(ChainParams(0.0, hi))
    assert [n.degenerate for n in nodes] == [True, False]
    with pytest.raises(UndefinedPhaseError):
        uhlmann_phase_factor(ChainParams(0.0, hi))
    pair = find_nodes(ChainParams(0.0, lo))[:2]
    assert abs(pair[1].k_node - pair[0].k_node) < 1e-5


def test_critical_temperature_flat_band_closed_form():
    for n1 in range(1, 4):
        for n2 in range(n1):
            crit = critical_temperature(0.0, n1, n2)
            assert crit.x == pytest.approx((2 * (n1 - n2) - 1) / (2 * n1), abs=1e-8)
            assert n1 * closed_curve_angle(ChainParams(0.0, crit.T)) == pytest.approx(
                (2 * n2 + 1) * math.pi / 2, abs=1e-8)


def test_critical_temperature_rejects_bad_branch():
    with pytest.raises(InvalidParameterError):
        critical_temperatures(0.0, 2, 2)
    with pytest.raises(InvalidParameterError):
        critical_temperatures(0.0, 0, 0)


def test_critical_temperature_unattainable_returns_none():
    # m = 1.3, n1 = 1: A(2pi) never reaches pi/2
    assert critical_temperature(1.3, 1, 0) is None


def test_transport_profile_sign_flips_at_nodes():
    p = ChainParams(0.0, 0.05)
    prof = transport_profile(p, grid_density=256)
    assert prof[0].sign == 1 and prof[-1].sign == -1
    assert prof[-1].A == pytest.approx(closed_curve_angle(p), abs=1e-9)
