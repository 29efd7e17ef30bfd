"""Klein-Gordon scattering off a potential step, with a lattice cross-check
and an electrostatic image-charge verifier."""
from .core import BeamEnergy, MomentumPair, PhysicalSetup, Regime, classify_regime, effective_momenta
from .errors import KleinError
from .planewave import Direction, ScatteringSolution, reflection_transmission, solve_left_incident, solve_right_incident
from .resolution import GlobalCoefficients, resolve

__version__ = "0.1.0"

__all__ = [
    "BeamEnergy",
    "Direction",
    "GlobalCoefficients",
    "KleinError",
    "MomentumPair",
    "PhysicalSetup",
    "Regime",
    "ScatteringSolution",
    "classify_regime",
    "effective_momenta",
    "reflection_transmission",
    "resolve",
    "solve_left_incident",
    "solve_right_incident",
]
