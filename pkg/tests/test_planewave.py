import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kleinparadox.core import BeamEnergy, PhysicalSetup, Regime
from kleinparadox.errors import DegenerateMomenta, NoPropagatingBeam, UnsupportedRegime
from kleinparadox.planewave import (
    Direction,
    beam_currents,
    matching_residual,
    plane_wave_density,
    reflection_transmission,
    solve_left_incident,
    solve_matching_system,
    solve_right_incident,
)

# 50-digit mpmath solutions of the matching systems
A_15 = -2.9058688457449498
B_15 = -1.9058688457449498
C_15 = 2.9058688457449498
D_15 = 3.9058688457449498
R_15 = 8.4440737486710868
T_15 = -7.4440737486710868
JR_15 = -9.4407614545250123
JT_15 = -8.3227274657751175
R_TRANS = 0.057796105403213094
T_TRANS = 0.94220389459678691

KLEIN = PhysicalSetup(1, 4), BeamEnergy(1.5)


def current_fd(f, x, mass, h=1e-5):
    """(1/2mi)(f* f' - f f'*) with a central difference for f'."""
    val = f(x)
    der = (f(x + h) - f(x - h)) / (2 * h)
    return float(np.imag(np.conj(val) * der) / mass)


def test_klein_amplitudes():
    sol = solve_left_incident(*KLEIN)
    assert sol.regime is Regime.KLEIN_ZONE
    assert sol.reflected_amp == pytest.approx(A_15, rel=1e-13)
    assert sol.transmitted_amp == pytest.approx(B_15, rel=1e-13)
    w = solve_right_incident(*KLEIN)
    assert w.virtual and not sol.virtual
    assert w.reflected_amp == pytest.approx(C_15, rel=1e-13)
    assert w.transmitted_amp == pytest.approx(D_15, rel=1e-13)


def test_transmitting_amplitudes():
    sol = solve_left_incident(PhysicalSetup(1, 1), BeamEnergy(3))
    assert sol.reflected_amp == pytest.approx(0.24040820577345752, rel=1e-13)
    assert sol.transmitted_amp == pytest.approx(1.2404082057734575, rel=1e-13)
    c = reflection_transmission(sol)
    assert c.R == pytest.approx(R_TRANS, rel=1e-13)
    assert c.T == pytest.approx(T_TRANS, rel=1e-13)


def test_evanescent_total_reflection():
    sol = solve_left_incident(PhysicalSetup(1, 4), BeamEnergy(3.5))
    assert abs(abs(sol.reflected_amp) - 1) < 1e-14
    assert sol.reflected_amp == pytest.approx(0.875 - 0.48412291827592711j, rel=1e-14)
    c = reflection_transmission(sol)
    assert (c.R, c.T) == (1.0, 0.0)
    assert beam_currents(sol).j_transmitted == 0.0


def test_klein_coefficients_and_currents():
    sol = solve_left_incident(*KLEIN)
    c = reflection_transmission(sol)
    assert c.R == pytest.approx(R_15, rel=1e-13)
    assert c.T == pytest.approx(T_15, rel=1e-13)
    j = beam_currents(sol)
    assert j.j_incident == pytest.approx(1.1180339887498948, rel=1e-14)
    assert j.j_reflected == pytest.approx(JR_15, rel=1e-13)
    assert j.j_transmitted == pytest.approx(JT_15, rel=1e-13)
    virt = reflection_transmission(solve_right_incident(*KLEIN))
    assert virt.R == pytest.approx(R_15, rel=1e-13)
    assert virt.T == pytest.approx(T_15, rel=1e-13)


@pytest.mark.parametrize("m, v, e", [(1, 4, 1.5), (1, 1, 3), (1, 4, 3.5), (2, 30, 7)])
def test_currents_against_finite_differences(m, v, e):
    sol = solve_left_incident(PhysicalSetup(m, v), BeamEnergy(e))
    j = beam_currents(sol)
    assert current_fd(sol.incident_wave, -3.0, m) == pytest.approx(j.j_incident, rel=1e-8)
    assert current_fd(sol.reflected_wave, -3.0, m) == pytest.approx(j.j_reflected, rel=1e-8)
    assert current_fd(sol.transmitted_wave, 2.0, m) == pytest.approx(j.j_transmitted, rel=1e-8, abs=1e-12)
    # total current is the same on both sides of the step
    assert current_fd(sol, -2.0, m) == pytest.approx(current_fd(sol, 1.5, m), rel=1e-7, abs=1e-10)


def test_linear_solve_oracle_agrees():
    for setup, beam in [KLEIN, (PhysicalSetup(1, 1), BeamEnergy(3)), (PhysicalSetup(1, 4), BeamEnergy(3.5))]:
        sol = solve_left_incident(setup, beam)
        a, b = solve_matching_system(setup, beam, Direction.LEFT_INCIDENT)
        assert cmath.isclose(a, sol.reflected_amp, rel_tol=1e-12)
        assert cmath.isclose(b, sol.transmitted_amp, rel_tol=1e-12)
    c, d = solve_matching_system(*KLEIN, Direction.RIGHT_INCIDENT)
    w = solve_right_incident(*KLEIN)
    assert cmath.isclose(c, w.reflected_amp, rel_tol=1e-12)
    assert cmath.isclose(d, w.transmitted_amp, rel_tol=1e-12)


def test_wavefunction_continuity():
    for sol in (solve_left_incident(*KLEIN), solve_right_incident(*KLEIN)):
        left, right = sol(np.array([-1e-12, 0.0]))
        assert abs(left - right) < 1e-10
        dl, dr = sol.derivative(np.array([-1e-12, 0.0]))
        assert abs(dl - dr) < 1e-10


def test_scaled_solution_scales_currents():
    sol = solve_left_incident(*KLEIN).scaled(2.0)
    j = beam_currents(sol)
    assert j.j_incident == pytest.approx(4 * 1.1180339887498948)
    assert reflection_transmission(sol).R == pytest.approx(R_15)
    assert max(matching_residual(sol)) < 1e-12


@pytest.mark.parametrize("m, v, e", [(1, 4, 2), (1, 0, 2)])
def test_degenerate_momenta(m, v, e):
    with pytest.raises(DegenerateMomenta):
        solve_left_incident(PhysicalSetup(m, v), BeamEnergy(e))


def test_unsupported_regimes():
    with pytest.raises(UnsupportedRegime):
        solve_right_incident(PhysicalSetup(1, 1), BeamEnergy(3))
    with pytest.raises(UnsupportedRegime):
        solve_left_incident(PhysicalSetup(1, 4), BeamEnergy(3.0))
    with pytest.raises((UnsupportedRegime, NoPropagatingBeam)):
        solve_left_incident(PhysicalSetup(1, 4), BeamEnergy(0.5))


def test_region_two_density_is_negative():
    sol = solve_left_incident(*KLEIN)
    assert plane_wave_density(1, 1.5, 4, sol.transmitted_amp) < 0
    assert plane_wave_density(1, 1.5, 0, 1.0) == pytest.approx(1.5)


@settings(max_examples=200)
@given(m=st.floats(0.1, 10), v_ratio=st.floats(2.05, 100), t=st.floats(0.01, 0.99))
def test_matching_residuals_random(m, v_ratio, t):
    v = v_ratio * m
    setup, beam = PhysicalSetup(m, v), BeamEnergy(m + t * (v - 2 * m))
    try:
        sols = [solve_left_incident(setup, beam), solve_right_incident(setup, beam)]
    except DegenerateMomenta:
        return
    for sol in sols:
        scale = 1 + abs(sol.reflected_amp) + abs(sol.transmitted_amp)
        val, der = matching_residual(sol)
        k = max(sol.momenta.k1, sol.momenta.k2.real)
        assert val < 1e-12 * scale
        assert der < 1e-12 * scale * max(1.0, k)
