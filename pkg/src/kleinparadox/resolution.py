"""Global coefficients from the real beam plus the virtual right-incident beam."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BeamEnergy, PhysicalSetup, Regime, classify_regime
from .errors import InconsistentSolutions, UnsupportedRegime
from .planewave import (
    Direction,
    ScatteringSolution,
    _prepare,
    reflection_transmission,
    solve_left_incident,
    solve_right_incident,
)

# T_G has no counterpart in the source model; outputs carry this label
T_G_LABEL = "extension"


@dataclass(frozen=True)
class GlobalCoefficients:
    R_u: float
    T_u: float
    R_w: float
    T_w: float
    R_G: float
    T_G: float
    virtual: bool = True
    t_g_label: str = T_G_LABEL


@dataclass(frozen=True)
class StationaryField:
    sample_points: np.ndarray
    values: np.ndarray
    u: np.ndarray
    w: np.ndarray
    virtual: bool = field(default=True)


def _require_klein_zone(setup: PhysicalSetup, beam: BeamEnergy) -> None:
    # degenerate momenta get their own error, like the solvers
    _prepare(setup, beam, set(Regime))
    regime = classify_regime(setup, beam)
    if regime is not Regime.KLEIN_ZONE:
        raise UnsupportedRegime(f"virtual-beam resolution needs the Klein zone, got {regime}")


def resolve(setup: PhysicalSetup, beam: BeamEnergy) -> GlobalCoefficients:
    """R_G = R_u + T_w and its symmetric partner T_G = T_u + R_w."""
    _require_klein_zone(setup, beam)
    real = reflection_transmission(solve_left_incident(setup, beam))
    virt = reflection_transmission(solve_right_incident(setup, beam))
    return GlobalCoefficients(
        R_u=real.R,
        T_u=real.T,
        R_w=virt.R,
        T_w=virt.T,
        R_G=real.R + virt.T,
        T_G=real.T + virt.R,
    )


def fake_conservation_check(setup: PhysicalSetup, beam: BeamEnergy) -> tuple[float, float]:
    """(R_u + T_u, R_w + T_w); each is 1 although R > 1 and T < 0."""
    _require_klein_zone(setup, beam)
    real = reflection_transmission(solve_left_incident(setup, beam))
    virt = reflection_transmission(solve_right_incident(setup, beam))
    return real.R + real.T, virt.R + virt.T


def superpose(left_sol: ScatteringSolution, right_sol: ScatteringSolution, sample_points) -> StationaryField:
    if left_sol.direction is not Direction.LEFT_INCIDENT or right_sol.direction is not Direction.RIGHT_INCIDENT:
        raise InconsistentSolutions("superpose expects (left-incident, right-incident) solutions")
    if left_sol.setup != right_sol.setup or left_sol.energy != right_sol.energy:
        raise InconsistentSolutions(
            f"solutions disagree: {left_sol.setup}, E={left_sol.energy!r} vs {right_sol.setup}, E={right_sol.energy!r}"
        )
    if left_sol.regime is not Regime.KLEIN_ZONE or right_sol.regime is not Regime.KLEIN_ZONE:
        raise UnsupportedRegime("superposition with the virtual beam is defined in the Klein zone only")
    x = np.asarray(sample_points, dtype=float)
    u = left_sol(x)
    w = right_sol(x)
    return StationaryField(sample_points=x, values=u + w, u=u, w=w)
