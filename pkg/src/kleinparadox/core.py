"""Physical parameters, regime classification and effective momenta.

Natural units throughout (hbar = c = 1, unit positive charge). The step
potential is zero for x < 0 and ``barrier_height`` for x >= 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, NoPropagatingBeam


class Regime(str, enum.Enum):
    NO_INCIDENT = "NoIncident"
    KLEIN_ZONE = "KleinZone"
    EVANESCENT = "Evanescent"
    TRANSMITTING = "Transmitting"
    DEGENERATE_BOUNDARY = "DegenerateBoundary"

    def __str__(self) -> str:
        return self.value


def _finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(value):
        raise InvalidInput(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalSetup:
    mass: float
    barrier_height: float

    def __post_init__(self):
        mass = _finite("mass", self.mass)
        height = _finite("barrier_height", self.barrier_height)
        if mass <= 0:
            raise InvalidInput(f"mass must be > 0, got {mass!r}")
        if height < 0:
            raise InvalidInput(f"barrier_height must be >= 0, got {height!r}")
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "barrier_height", height)

    def potential(self, x):
        """Step potential V(x); accepts scalars or numpy arrays."""
        return np.where(np.asarray(x) >= 0, self.barrier_height, 0.0)


@dataclass(frozen=True)
class BeamEnergy:
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "energy", _finite("energy", self.energy))


@dataclass(frozen=True)
class MomentumPair:
    k1: float
    k2: complex

    @property
    def k2_is_real(self) -> bool:
        return self.k2.imag == 0.0


def _region1_sq(m: float, e: float) -> float:
    # factored form keeps precision near E ~ m
    return (e - m) * (e + m)


def _region2_sq(m: float, v: float, e: float) -> float:
    # fsum rounds V - E -/+ m once, so V - E - m does not cancel a rounded V - E
    return math.fsum((v, -e, -m)) * math.fsum((v, -e, m))


def _momenta_floats(m: float, v: float, e: float) -> tuple[float, complex]:
    k1 = math.sqrt(_region1_sq(m, e))
    q2 = _region2_sq(m, v, e)
    if q2 > 0:
        k2 = complex(math.sqrt(q2), 0.0)
    else:
        k2 = complex(0.0, math.sqrt(-q2))
    return k1, k2


def classify_regime(setup: PhysicalSetup, beam: BeamEnergy) -> Regime:
    """Tag the (m, V, E) point with its scattering regime.

    Boundary equalities are decided in exact rational arithmetic on the
    float inputs, so no tolerance band is involved. A point whose floating
    momenta coincide is also reported degenerate, because the closed-form
    amplitudes would divide by zero there.
    """
    m = Fraction(_finite("mass", setup.mass))
    v = Fraction(_finite("barrier_height", setup.barrier_height))
    e = Fraction(_finite("energy", beam.energy))

    if e < m:
        return Regime.NO_INCIDENT
    if e == m or abs(v - e) == m:
        return Regime.DEGENERATE_BOUNDARY
    gap = abs(v - e)
    if gap > m:
        # both momenta real; k1 == k2 iff E^2 == (V-E)^2
        if e * e == (v - e) * (v - e):
            return Regime.DEGENERATE_BOUNDARY
        k1, k2 = _momenta_floats(setup.mass, setup.barrier_height, beam.energy)
        if k1 == k2.real:
            return Regime.DEGENERATE_BOUNDARY
        return Regime.KLEIN_ZONE if e < v - m else Regime.TRANSMITTING
    return Regime.EVANESCENT


def effective_momenta(setup: PhysicalSetup, beam: BeamEnergy) -> MomentumPair:
    """k1 = sqrt(E^2 - m^2) and k2 = sqrt((V - E)^2 - m^2).

    In the evanescent window k2 is returned as +i*kappa (decaying branch).
    """
    m, v, e = setup.mass, setup.barrier_height, _finite("energy", beam.energy)
    if e <= m:
        raise NoPropagatingBeam(f"no propagating incident beam: E <= m ({e!r} <= {m!r})")
    k1, k2 = _momenta_floats(m, v, e)
    return MomentumPair(k1=k1, k2=k2)


def momentum_difference(setup: PhysicalSetup, beam: BeamEnergy, momenta: MomentumPair) -> float:
    """k1 - k2 for real k2, evaluated without cancellation.

    Uses k1^2 - k2^2 = V (2E - V); 2E - V is exact near the degeneracy.
    """
    v, e = setup.barrier_height, beam.energy
    return v * math.fsum((e, e, -v)) / (momenta.k1 + momenta.k2.real)


def onshell_residuals(setup: PhysicalSetup, beam: BeamEnergy, momenta: MomentumPair) -> tuple[float, float]:
    """Klein-Gordon operator residuals m^2 - E^2 + k1^2 and m^2 - (V-E)^2 + k2^2."""
    m, v, e = setup.mass, setup.barrier_height, beam.energy
    r1 = m * m - e * e + momenta.k1 * momenta.k1
    k2sq = momenta.k2 * momenta.k2
    r2 = m * m - (v - e) * (v - e) + k2sq
    # k2 is purely real or purely imaginary, so k2^2 has no imaginary part
    return float(r1), float(r2.real)
