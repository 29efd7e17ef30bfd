"""Time-domain lattice evolution of charged Klein-Gordon wavepackets.

The field obeys (d_t + iV(x))^2 phi = d_x^2 phi - m^2 phi on a uniform grid
over [-L, L] with phi = 0 at both ends. Time is discretized with the
gauge-covariant leapfrog

    e^{iV dt} phi^{n+1} - 2 phi^n + e^{-iV dt} phi^{n-1} = dt^2 (D2 - m^2) phi^n

which is centered and second order in dt. D2 is a symmetric finite-difference
Laplacian (4th order by default, 2nd order selectable). Because D2 - m^2 is
Hermitian, the discrete charge

    Q^{n+1/2} = -sum_j w_j Im(conj(phi^n_j) e^{iV_j dt} phi^{n+1}_j) / (m dt)

is conserved to rounding.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import PhysicalSetup
from .errors import (
    InvalidConfig,
    NoPropagatingBeam,
    NumericalBlowup,
    PacketNeverSeparated,
    PacketTooClose,
)

log = logging.getLogger(__name__)

SEPARATION_WIDTHS = 6.0
# fraction of the absolute charge below which a side counts as empty
SIDE_THRESHOLD = 1e-3
BOUNDARY_LIMIT = 1e-8


@dataclass(frozen=True)
class LatticeConfig:
    domain_half_width: float
    num_points: int
    time_step_factor: float = 0.25
    total_time: float = 300.0
    stencil_order: int = 4

    def __post_init__(self):
        L, n, f, t = self.domain_half_width, self.num_points, self.time_step_factor, self.total_time
        if not (isinstance(n, (int, np.integer)) and not isinstance(n, bool)) or n < 3:
            raise InvalidConfig(f"num_points must be an integer >= 3, got {n!r}")
        if not (math.isfinite(L) and L > 0):
            raise InvalidConfig(f"domain_half_width must be positive, got {L!r}")
        if not (math.isfinite(f) and 0 < f <= 0.5):
            raise InvalidConfig(f"time_step_factor must lie in (0, 0.5], got {f!r}")
        if not (math.isfinite(t) and t >= 0):
            raise InvalidConfig(f"total_time must be >= 0, got {t!r}")
        if self.stencil_order not in (2, 4):
            raise InvalidConfig(f"stencil_order must be 2 or 4, got {self.stencil_order!r}")

    @property
    def dx(self) -> float:
        return 2.0 * self.domain_half_width / (self.num_points - 1)


def time_step(dx: float, factor: float, setup: PhysicalSetup, energy: float | None = None) -> float:
    """dt = factor * min(dx, 1 / max(V, m, E))."""
    scales = [setup.barrier_height, setup.mass]
    if energy is not None:
        scales.append(abs(energy))
    return factor * min(dx, 1.0 / max(scales))


class PacketDirection(str, enum.Enum):
    RIGHT_MOVING = "RightMoving"


@dataclass(frozen=True)
class PacketSpec:
    carrier_energy: float
    center: float
    width: float
    direction: PacketDirection = PacketDirection.RIGHT_MOVING


@dataclass
class FieldState:
    grid: np.ndarray
    phi_current: np.ndarray
    phi_previous: np.ndarray
    time: float
    potential_profile: np.ndarray
    dt: float
    time_step_factor: float = 0.25
    stencil_order: int = 4
    steps: int = 0

    @property
    def dx(self) -> float:
        return float(self.grid[1] - self.grid[0])


@dataclass(frozen=True)
class NumericCoefficients:
    R_num: float
    T_num: float
    charge_drift: float
    final_time: float = 0.0
    steps: int = 0
    separated: bool = True
    boundary_ratio: float = 0.0
    extras: dict = field(default_factory=dict, compare=False)


# -- kernels ---------------------------------------------------------------


def laplacian(f: np.ndarray, dx: float, order: int = 4, periodic: bool = False) -> np.ndarray:
    """Centered second difference; outside the grid the field is taken as zero.

    With zero padding the operator is a symmetric matrix, which the exact
    charge conservation of the update relies on.
    """
    out = np.empty_like(f)
    if periodic:
        if order == 2:
            out[:] = np.roll(f, 1) - 2.0 * f + np.roll(f, -1)
        else:
            out[:] = (
                -np.roll(f, 2) + 16.0 * np.roll(f, 1) - 30.0 * f + 16.0 * np.roll(f, -1) - np.roll(f, -2)
            ) / 12.0
        return out / (dx * dx)
    pad = np.zeros(f.size + 4, dtype=f.dtype)
    pad[2:-2] = f
    if order == 2:
        out[:] = pad[1:-3] - 2.0 * f + pad[3:-1]
    else:
        out[:] = (-pad[:-4] + 16.0 * pad[1:-3] - 30.0 * f + 16.0 * pad[3:-1] - pad[4:]) / 12.0
    return out / (dx * dx)


def advance(
    previous: np.ndarray,
    current: np.ndarray,
    dx: float,
    dt: float,
    mass: float,
    potential: np.ndarray,
    order: int = 4,
    periodic: bool = False,
) -> np.ndarray:
    """One leapfrog step: returns phi^{n+1} from (phi^{n-1}, phi^n)."""
    link = np.exp(1j * potential * dt)
    rhs = 2.0 * current + dt * dt * (laplacian(current, dx, order, periodic) - mass * mass * current)
    new = (rhs - np.conj(link) * previous) / link
    if not periodic:
        new[0] = 0.0
        new[-1] = 0.0
    return new


def _density(previous, current, link, mass, dt):
    return -np.imag(np.conj(previous) * link * current) / (mass * dt)


def _weights(n: int, dx: float) -> np.ndarray:
    w = np.full(n, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


# -- operations -------------------------------------------------------------


def build_lattice(config: LatticeConfig, setup: PhysicalSetup) -> FieldState:
    grid = np.linspace(-config.domain_half_width, config.domain_half_width, config.num_points)
    # the middle node of an odd grid must sit exactly on the step
    if config.num_points % 2 == 1:
        grid[config.num_points // 2] = 0.0
    potential = np.where(grid >= 0, setup.barrier_height, 0.0)
    zeros = np.zeros(config.num_points, dtype=complex)
    return FieldState(
        grid=grid,
        phi_current=zeros,
        phi_previous=zeros.copy(),
        time=0.0,
        potential_profile=potential,
        dt=time_step(config.dx, config.time_step_factor, setup),
        time_step_factor=config.time_step_factor,
        stencil_order=config.stencil_order,
    )


def init_packet(state: FieldState, spec: PacketSpec, setup: PhysicalSetup) -> FieldState:
    """Gaussian positive-energy packet, charge normalized to +1.

    phi(x) = exp(i k0 x - (x - x0)^2 / (4 sigma^2)), k0 = sqrt(E^2 - m^2).
    The earlier level follows from d_t phi = -iE phi by a second-order
    Taylor step back to t = -dt.
    """
    m, e = setup.mass, spec.carrier_energy
    x0, sigma = spec.center, spec.width
    if not e > m:
        raise NoPropagatingBeam(f"packet carrier energy must exceed the mass: E={e!r}, m={m!r}")
    if not sigma > 0:
        raise InvalidConfig(f"packet width must be positive, got {sigma!r}")
    if x0 + 4.0 * sigma >= 0:
        raise PacketTooClose(f"packet overlaps the barrier: x0 + 4 sigma = {x0 + 4 * sigma!r} >= 0")
    dx = state.dx
    if sigma < 5.0 * dx:
        raise InvalidConfig(f"packet under-resolved: sigma={sigma!r} < 5 dx = {5 * dx!r}")
    x = state.grid
    if x0 - 4.0 * sigma <= x[0]:
        raise InvalidConfig(f"packet does not fit inside the domain: x0 - 4 sigma = {x0 - 4 * sigma!r}")

    dt = time_step(dx, state.time_step_factor, setup, e)
    k0 = math.sqrt((e - m) * (e + m))
    phi = np.exp(1j * k0 * x - (x - x0) ** 2 / (4.0 * sigma * sigma))
    phi[0] = phi[-1] = 0.0
    lap = laplacian(phi, dx, state.stencil_order)
    prev = phi + 1j * e * dt * phi + 0.5 * dt * dt * (lap - m * m * phi)
    prev[0] = prev[-1] = 0.0

    link = np.exp(1j * state.potential_profile * dt)
    charge = float(np.sum(_weights(x.size, dx) * _density(prev, phi, link, m, dt)))
    scale = 1.0 / math.sqrt(charge)
    return replace(state, phi_current=phi * scale, phi_previous=prev * scale, time=0.0, dt=dt, steps=0)


def step(state: FieldState, setup: PhysicalSetup) -> FieldState:
    new = advance(
        state.phi_previous,
        state.phi_current,
        state.dx,
        state.dt,
        setup.mass,
        state.potential_profile,
        state.stencil_order,
    )
    if not np.all(np.isfinite(new)):
        raise NumericalBlowup(f"non-finite field at t={state.time + state.dt!r}; time step too large for stability")
    return replace(state, phi_previous=state.phi_current, phi_current=new, time=state.time + state.dt, steps=state.steps + 1)


def evolve(state: FieldState, setup: PhysicalSetup, n_steps: int) -> FieldState:
    """Advance ``n_steps`` times; same update as :func:`step`, without per-step copies."""
    dx, dt, m = state.dx, state.dt, setup.mass
    link = np.exp(1j * state.potential_profile * dt)
    clink = np.conj(link)
    prev, cur = state.phi_previous.copy(), state.phi_current.copy()
    order = state.stencil_order
    for i in range(n_steps):
        new = 2.0 * cur + dt * dt * (laplacian(cur, dx, order) - m * m * cur)
        new -= clink * prev
        new /= link
        new[0] = new[-1] = 0.0
        prev, cur = cur, new
        if i % 256 == 255 and not np.isfinite(cur[np.argmax(np.abs(cur))]):
            raise NumericalBlowup(f"non-finite field after {state.steps + i + 1} steps")
    if not np.all(np.isfinite(cur)):
        raise NumericalBlowup(f"non-finite field after {state.steps + n_steps} steps")
    return replace(
        state,
        phi_previous=prev,
        phi_current=cur,
        time=state.time + n_steps * dt,
        steps=state.steps + n_steps,
    )


def charge_density(state: FieldState, setup: PhysicalSetup) -> np.ndarray:
    """Discrete rho = -(1/m) Im(phi* d_t phi) - (V/m)|phi|^2 at the half step."""
    link = np.exp(1j * state.potential_profile * state.dt)
    return _density(state.phi_previous, state.phi_current, link, setup.mass, state.dt)


def partition_charge(state: FieldState, setup: PhysicalSetup) -> tuple[float, float]:
    rho = charge_density(state, setup) * _weights(state.grid.size, state.dx)
    left = state.grid < 0
    return float(np.sum(rho[left])), float(np.sum(rho[~left]))


def charge_centroid(state: FieldState, setup: PhysicalSetup) -> float:
    rho = charge_density(state, setup) * _weights(state.grid.size, state.dx)
    return float(np.sum(rho * state.grid) / np.sum(rho))


def _side_centroids(state: FieldState, setup: PhysicalSetup) -> tuple[float | None, float | None]:
    mass = np.abs(charge_density(state, setup)) * _weights(state.grid.size, state.dx)
    total = mass.sum()
    out = []
    for side in (state.grid < 0, state.grid >= 0):
        part = mass[side]
        if total == 0 or part.sum() < SIDE_THRESHOLD * total:
            out.append(None)
        else:
            out.append(float(np.sum(part * state.grid[side]) / part.sum()))
    return out[0], out[1]


def _boundary_ratio(state: FieldState, peak: float) -> float:
    edge = np.abs(np.concatenate((state.phi_current[:3], state.phi_current[-3:])))
    return float(edge.max() / peak) if peak > 0 else 0.0


def run_scattering_experiment(
    config: LatticeConfig,
    setup: PhysicalSetup,
    spec: PacketSpec,
    *,
    stop_when_separated: bool = True,
    snapshot_every: int | None = None,
    on_snapshot=None,
) -> NumericCoefficients:
    """Send one packet at the step and measure the charge on each side.

    R_num and T_num are the charges left and right of x = 0 when both
    outgoing packets sit more than 6 sigma from the step (or at
    ``total_time``). Raises PacketNeverSeparated if they never get there.
    """
    state = init_packet(build_lattice(config, setup), spec, setup)
    sigma = spec.width
    total_steps = int(math.floor(config.total_time / state.dt + 1e-9))
    check_every = max(1, int(round(0.5 / state.dt)))
    if snapshot_every is not None and snapshot_every < 1:
        raise InvalidConfig(f"snapshot_every must be >= 1, got {snapshot_every!r}")

    peak = float(np.abs(state.phi_current).max())
    drift = abs(sum(partition_charge(state, setup)) - 1.0)
    boundary = _boundary_ratio(state, peak)
    prev_left = None
    separated = False
    if on_snapshot is not None and snapshot_every:
        on_snapshot(state)

    done = 0
    while done < total_steps:
        chunk = min(check_every, total_steps - done)
        if snapshot_every:
            to_snap = snapshot_every - (state.steps % snapshot_every)
            chunk = min(chunk, to_snap)
        state = evolve(state, setup, chunk)
        done += chunk
        if snapshot_every and on_snapshot is not None and state.steps % snapshot_every == 0:
            on_snapshot(state)
        if state.steps % check_every and done < total_steps:
            continue
        q_left, q_right = partition_charge(state, setup)
        drift = max(drift, abs(q_left + q_right - 1.0))
        boundary = max(boundary, _boundary_ratio(state, peak))
        left_c, right_c = _side_centroids(state, setup)
        moving_left = left_c is not None and prev_left is not None and left_c < prev_left
        left_ok = left_c is None or (moving_left and left_c < -SEPARATION_WIDTHS * sigma)
        right_ok = right_c is None or right_c > SEPARATION_WIDTHS * sigma
        separated = left_ok and right_ok and (left_c is None or moving_left)
        prev_left = left_c
        if separated and stop_when_separated:
            break

    if not separated:
        raise PacketNeverSeparated(
            f"packet still straddles x=0 within {SEPARATION_WIDTHS:g} sigma at t={state.time:.6g} "
            f"(total_time={config.total_time!r})"
        )
    if boundary > BOUNDARY_LIMIT:
        log.warning("boundary amplitude reached %.3g of the peak; enlarge the domain", boundary)
    q_left, q_right = partition_charge(state, setup)
    drift = max(drift, abs(q_left + q_right - 1.0))
    return NumericCoefficients(
        R_num=q_left,
        T_num=q_right,
        charge_drift=drift,
        final_time=state.time,
        steps=state.steps,
        separated=separated,
        boundary_ratio=boundary,
    )


# -- snapshot export ---------------------------------------------------------

SNAPSHOT_COLUMNS = ("x", "re_phi", "im_phi", "rho", "V")


def write_snapshot(path, state: FieldState, setup: PhysicalSetup, params: dict | None = None) -> Path:
    """Plain-text table, one row per grid point, one ``#`` header line."""
    path = Path(path)
    meta = {
        "time": f"{state.time:.17g}",
        "step": str(state.steps),
        "mass": f"{setup.mass:.17g}",
        "barrier_height": f"{setup.barrier_height:.17g}",
        "num_points": str(state.grid.size),
        "dx": f"{state.dx:.17g}",
        "dt": f"{state.dt:.17g}",
    }
    for key, value in (params or {}).items():
        meta[key] = value if isinstance(value, str) else f"{value:.17g}"
    meta["columns"] = ",".join(SNAPSHOT_COLUMNS)
    header = "# " + " ".join(f"{k}={v}" for k, v in meta.items())
    table = np.column_stack(
        (
            state.grid,
            state.phi_current.real,
            state.phi_current.imag,
            charge_density(state, setup),
            state.potential_profile,
        )
    )
    with open(path, "w") as fh:
        fh.write(header + "\n")
        np.savetxt(fh, table, fmt="%.17g")
    return path


def read_snapshot(path) -> tuple[dict, np.ndarray]:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing snapshot header line")
        meta = dict(item.split("=", 1) for item in header[1:].split())
        table = np.loadtxt(fh, ndmin=2)
    return meta, table
