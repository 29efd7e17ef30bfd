"""Stationary plane-wave matching at the step for both incident directions.

Left-incident solution (unit incident amplitude)::

    u(x) = exp(i k1 x) + A exp(-i k1 x)      x < 0
    u(x) = B * f(x)                          x >= 0

where the region-II mode f depends on the regime: exp(-i k2 x) in the
Klein zone (charge argument), exp(+i k2 x) when transmitting and
exp(-kappa x) in the evanescent window.

Right-incident (virtual) solution, Klein zone only::

    w(x) = exp(i k2 x) + C exp(-i k2 x)      x >= 0
    w(x) = D exp(-i k1 x)                    x < 0
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    BeamEnergy,
    MomentumPair,
    PhysicalSetup,
    Regime,
    classify_regime,
    effective_momenta,
    momentum_difference,
)
from .errors import DegenerateMomenta, UnsupportedRegime


class Direction(str, enum.Enum):
    LEFT_INCIDENT = "LeftIncident"
    RIGHT_INCIDENT = "RightIncident"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ScatteringSolution:
    setup: PhysicalSetup
    energy: float
    momenta: MomentumPair
    direction: Direction
    reflected_amp: complex
    transmitted_amp: complex
    regime: Regime
    incident_amp: complex = 1.0

    @property
    def virtual(self) -> bool:
        # the right-incident beam is a solution device, never an observable
        return self.direction is Direction.RIGHT_INCIDENT

    @property
    def beam(self) -> BeamEnergy:
        return BeamEnergy(self.energy)

    def scaled(self, factor: complex) -> "ScatteringSolution":
        """Same beam with every amplitude multiplied by ``factor``."""
        return replace(
            self,
            incident_amp=complex(self.incident_amp * factor),
            reflected_amp=complex(self.reflected_amp * factor),
            transmitted_amp=complex(self.transmitted_amp * factor),
        )

    def incident_wave(self, x):
        x = np.asarray(x, dtype=float)
        if self.direction is Direction.LEFT_INCIDENT:
            return self.incident_amp * np.exp(1j * self.momenta.k1 * x)
        return self.incident_amp * np.exp(1j * self.momenta.k2.real * x)

    def reflected_wave(self, x):
        x = np.asarray(x, dtype=float)
        if self.direction is Direction.LEFT_INCIDENT:
            return self.reflected_amp * np.exp(-1j * self.momenta.k1 * x)
        return self.reflected_amp * np.exp(-1j * self.momenta.k2.real * x)

    def transmitted_wave(self, x):
        x = np.asarray(x, dtype=float)
        k1, k2 = self.momenta.k1, self.momenta.k2
        if self.direction is Direction.RIGHT_INCIDENT:
            return self.transmitted_amp * np.exp(-1j * k1 * x)
        if self.regime is Regime.KLEIN_ZONE:
            return self.transmitted_amp * np.exp(-1j * k2.real * x)
        if self.regime is Regime.TRANSMITTING:
            return self.transmitted_amp * np.exp(1j * k2.real * x)
        return self.transmitted_amp * np.exp(-k2.imag * x)

    def _in_incident_region(self, x):
        return x < 0 if self.direction is Direction.LEFT_INCIDENT else x >= 0

    def __call__(self, x):
        """Evaluate the piecewise stationary wavefunction."""
        x = np.asarray(x, dtype=float)
        incident_side = self._in_incident_region(x)
        out = np.where(
            incident_side,
            self.incident_wave(x) + self.reflected_wave(x),
            self.transmitted_wave(x),
        )
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        k1, k2 = self.momenta.k1, self.momenta.k2
        if self.direction is Direction.LEFT_INCIDENT:
            side = 1j * k1 * (self.incident_wave(x) - self.reflected_wave(x))
            if self.regime is Regime.KLEIN_ZONE:
                far = -1j * k2.real * self.transmitted_wave(x)
            elif self.regime is Regime.TRANSMITTING:
                far = 1j * k2.real * self.transmitted_wave(x)
            else:
                far = -k2.imag * self.transmitted_wave(x)
        else:
            side = 1j * k2.real * (self.incident_wave(x) - self.reflected_wave(x))
            far = -1j * k1 * self.transmitted_wave(x)
        return np.where(self._in_incident_region(x), side, far)


@dataclass(frozen=True)
class CurrentTriple:
    j_incident: float
    j_reflected: float
    j_transmitted: float


@dataclass(frozen=True)
class CoeffPair:
    R: float
    T: float


def _prepare(setup: PhysicalSetup, beam: BeamEnergy, allowed: set[Regime]):
    regime = classify_regime(setup, beam)
    if regime is Regime.DEGENERATE_BOUNDARY:
        k1sq = (beam.energy - setup.mass) * (beam.energy + setup.mass)
        k2sq = (setup.barrier_height - beam.energy) ** 2 - setup.mass**2
        if k1sq > 0 and k2sq > 0:
            raise DegenerateMomenta(
                f"k1 == k2 at m={setup.mass!r}, V={setup.barrier_height!r}, E={beam.energy!r}; "
                "the matching amplitudes divide by k1 - k2"
            )
    if regime not in allowed:
        raise UnsupportedRegime(f"regime {regime} not supported here (allowed: {sorted(map(str, allowed))})")
    return regime, effective_momenta(setup, beam)


def solve_left_incident(setup: PhysicalSetup, beam: BeamEnergy) -> ScatteringSolution:
    regime, mom = _prepare(setup, beam, {Regime.KLEIN_ZONE, Regime.TRANSMITTING, Regime.EVANESCENT})
    k1 = mom.k1
    if regime is Regime.KLEIN_ZONE:
        k2 = mom.k2.real
        diff = momentum_difference(setup, beam, mom)
        a = (k1 + k2) / diff
        b = 2.0 * k1 / diff
    elif regime is Regime.TRANSMITTING:
        k2 = mom.k2.real
        a = momentum_difference(setup, beam, mom) / (k1 + k2)
        b = 2.0 * k1 / (k1 + k2)
    else:
        kappa = mom.k2.imag
        a = (kappa + 1j * k1) / (1j * k1 - kappa)
        b = 1.0 + a
    return ScatteringSolution(
        setup=setup,
        energy=beam.energy,
        momenta=mom,
        direction=Direction.LEFT_INCIDENT,
        reflected_amp=complex(a),
        transmitted_amp=complex(b),
        regime=regime,
    )


def solve_right_incident(setup: PhysicalSetup, beam: BeamEnergy) -> ScatteringSolution:
    regime, mom = _prepare(setup, beam, {Regime.KLEIN_ZONE})
    k1, k2 = mom.k1, mom.k2.real
    diff = -momentum_difference(setup, beam, mom)  # k2 - k1
    c = (k1 + k2) / diff
    d = 2.0 * k2 / diff
    return ScatteringSolution(
        setup=setup,
        energy=beam.energy,
        momenta=mom,
        direction=Direction.RIGHT_INCIDENT,
        reflected_amp=complex(c),
        transmitted_amp=complex(d),
        regime=regime,
    )


def solve_matching_system(setup: PhysicalSetup, beam: BeamEnergy, direction: Direction) -> tuple[complex, complex]:
    """Amplitudes from a direct 2x2 solve of value and slope continuity at x=0.

    Independent of the closed forms used by the solvers; kept public as an
    oracle for tests.
    """
    regime = classify_regime(setup, beam)
    mom = effective_momenta(setup, beam)
    k1, k2 = mom.k1, mom.k2
    if direction is Direction.LEFT_INCIDENT:
        # unknowns (A, B): 1 + A = B f(0);  ik1 (1 - A) = B f'(0)
        if regime is Regime.KLEIN_ZONE:
            slope = -1j * k2.real
        elif regime is Regime.TRANSMITTING:
            slope = 1j * k2.real
        elif regime is Regime.EVANESCENT:
            slope = -k2.imag
        else:
            raise UnsupportedRegime(f"regime {regime} has no left-incident solution")
        mat = np.array([[1.0, -1.0], [-1j * k1, -slope]], dtype=complex)
        rhs = np.array([-1.0, -1j * k1], dtype=complex)
    else:
        if regime is not Regime.KLEIN_ZONE:
            raise UnsupportedRegime(f"regime {regime} has no virtual right-incident beam")
        # unknowns (C, D): 1 + C = D;  ik2 (1 - C) = -ik1 D
        mat = np.array([[1.0, -1.0], [-1j * k2.real, 1j * k1]], dtype=complex)
        rhs = np.array([-1.0, -1j * k2.real], dtype=complex)
    first, second = np.linalg.solve(mat, rhs)
    return complex(first), complex(second)


def beam_currents(sol: ScatteringSolution) -> CurrentTriple:
    """Spatial currents (1/2mi)(u* u' - u u'*) of the three partial waves."""
    m = sol.setup.mass
    k1, k2 = sol.momenta.k1, sol.momenta.k2
    i2 = abs(sol.incident_amp) ** 2
    a2 = abs(sol.reflected_amp) ** 2
    b2 = abs(sol.transmitted_amp) ** 2
    if sol.direction is Direction.RIGHT_INCIDENT:
        return CurrentTriple(i2 * k2.real / m, -a2 * k2.real / m, -b2 * k1 / m)
    if sol.regime is Regime.KLEIN_ZONE:
        j_t = -b2 * k2.real / m
    elif sol.regime is Regime.TRANSMITTING:
        j_t = b2 * k2.real / m
    else:
        j_t = 0.0
    return CurrentTriple(i2 * k1 / m, -a2 * k1 / m, j_t)


def reflection_transmission(sol: ScatteringSolution) -> CoeffPair:
    """R = |j_r / j_i| and T = j_t / j_i in closed form."""
    if sol.regime is Regime.EVANESCENT:
        return CoeffPair(R=1.0, T=0.0)
    k1, k2 = sol.momenta.k1, sol.momenta.k2.real
    diff = momentum_difference(sol.setup, sol.beam, sol.momenta)  # k1 - k2
    if sol.regime is Regime.TRANSMITTING:
        total = k1 + k2
        return CoeffPair(R=(diff / total) ** 2, T=4.0 * k1 * k2 / total**2)
    # Klein zone; the virtual beam is the mirror image with k1 <-> k2
    r = ((k1 + k2) / diff) ** 2
    t = -4.0 * k1 * k2 / diff**2
    return CoeffPair(R=r, T=t)


def matching_residual(sol: ScatteringSolution) -> tuple[float, float]:
    """|u_I(0) - u_II(0)| and |u_I'(0) - u_II'(0)| from the stored amplitudes."""
    k1, k2 = sol.momenta.k1, sol.momenta.k2
    inc, a, b = sol.incident_amp, sol.reflected_amp, sol.transmitted_amp
    if sol.direction is Direction.LEFT_INCIDENT:
        inner_val, inner_der = inc + a, 1j * k1 * (inc - a)
        if sol.regime is Regime.KLEIN_ZONE:
            slope = -1j * k2.real
        elif sol.regime is Regime.TRANSMITTING:
            slope = 1j * k2.real
        else:
            slope = -k2.imag
        outer_val, outer_der = b, slope * b
    else:
        inner_val, inner_der = inc + a, 1j * k2.real * (inc - a)
        outer_val, outer_der = b, -1j * k1 * b
    return abs(inner_val - outer_val), abs(inner_der - outer_der)


def plane_wave_density(mass: float, energy: float, local_potential: float, amplitude: complex) -> float:
    """Charge density |a|^2 (E - V)/m of a stationary wave under minimal coupling."""
    return abs(amplitude) ** 2 * (energy - local_potential) / mass
