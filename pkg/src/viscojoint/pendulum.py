"""Drop-test pendulum dynamics and trajectory metrics.

Angles are measured from the positive vertical (up) axis, so the hanging rest
pose is theta = pi. The equation of motion combines gravity, a linear damper
torque b*omega, and running-surface friction with Coulomb and viscous parts
acting through the joint radius:

    acc = (1/I) * [ S g sin(theta) - b omega
                    - N r sign(omega) (mu_k + mu_d r omega) ]
    N   = S omega^2 + S g cos(theta - pi),  clamped at N >= 0
    S   = sum of mass * lever arm over the swinging bodies

Integration is forward explicit Euler with an internal step of 1% of the
sample interval. sign(0) = 0, and near-zero velocities with a holdable net
torque are clamped to rest so trajectories terminate cleanly instead of
chattering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import backend
from .errors import InsufficientDataError, IntegrationDivergedError

DEFAULT_SAMPLE_DT = 1.0 / 240.0   # experimental camera rate
SUBSTEPS_PER_SAMPLE = 100         # internal Euler step = dt / 100
REST_OMEGA_EPS = 1e-4             # rad/s, below this sign(omega) -> 0
DEFAULT_REST_BAND = 0.02          # rad
DEFAULT_HOLD_TIME = 0.5           # s


@dataclass(frozen=True)
class PendulumParams:
    """Inertial, frictional and damping parameters of the drop-test rig."""

    joint_inertia: float          # kg m^2, rotor of the printed joint
    bar_mass: float               # kg
    bar_length: float             # m
    bar_width: float              # m, in-plane width
    bar_com_radius: float         # m, axis to bar center of mass
    weight_mass: float            # kg, nut/bolt/washer point mass
    weight_radius: float          # m
    joint_radius: float           # m, effective friction lever (calibrated)
    mu_k: float = 0.0             # Coulomb kinetic friction coefficient
    mu_d: float = 0.0             # viscous friction coefficient, s/m
    damping_b: float = 0.0        # N m s/rad, rotary damper
    gravity: float = 9.81         # m/s^2

    def __post_init__(self):
        if min(self.joint_inertia, self.bar_mass, self.bar_length,
               self.bar_width, self.bar_com_radius, self.weight_mass,
               self.weight_radius, self.joint_radius) < 0:
            raise ValueError("masses, lengths and inertias must be non-negative")
        if self.gravity <= 0:
            raise ValueError("gravity must be positive")
        if self.mass_radius_sum() <= 0:
            raise ValueError("pendulum has no restoring torque "
                             "(sum of mass * radius is zero)")
        if self.total_inertia() <= 0:
            raise ValueError("total inertia must be positive")

    def mass_radius_sum(self) -> float:
        """S = sum m_i r_i; the joint rotor sits on the axis (r = 0)."""
        return self.bar_mass * self.bar_com_radius + \
            self.weight_mass * self.weight_radius

    def total_inertia(self) -> float:
        bar = self.bar_mass * (self.bar_length ** 2 + self.bar_width ** 2) / 12.0 \
            + self.bar_mass * self.bar_com_radius ** 2
        weight = self.weight_mass * self.weight_radius ** 2
        return self.joint_inertia + bar + weight


def total_inertia(params: PendulumParams) -> float:
    """Moment of inertia about the joint axis (kg m^2)."""
    return params.total_inertia()


@dataclass
class Trajectory:
    """Uniformly sampled angle series, optionally with angular velocities."""

    t0: float
    dt: float
    angles: np.ndarray
    omegas: Optional[np.ndarray] = None

    def __post_init__(self):
        self.angles = np.asarray(self.angles, dtype=float)
        if self.omegas is not None:
            self.omegas = np.asarray(self.omegas, dtype=float)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.angles.size < 2:
            raise ValueError("trajectory needs at least two samples")
        if not np.all(np.isfinite(self.angles)):
            raise ValueError("angles must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.angles.size)

    @property
    def duration(self) -> float:
        return self.dt * (self.angles.size - 1)

    def initial_state(self) -> tuple[float, float]:
        """(theta0, omega0); omega falls back to a first-difference estimate."""
        theta0 = float(self.angles[0])
        if self.omegas is not None:
            return theta0, float(self.omegas[0])
        return theta0, float((self.angles[1] - self.angles[0]) / self.dt)


@dataclass
class OscillationMetrics:
    n_oscillations: int
    settle_time: float
    final_angle: float
    n_crossings: int = field(default=0)


def acceleration(theta: float, omega: float, params: PendulumParams) -> float:
    """Angular acceleration (rad/s^2) of the equation of motion."""
    s = params.mass_radius_sum()
    normal = s * omega * omega - s * params.gravity * np.cos(theta)
    normal = max(normal, 0.0)
    sgn = 0.0 if omega == 0 else (1.0 if omega > 0 else -1.0)
    fric = normal * params.joint_radius * sgn * \
        (params.mu_k + params.mu_d * params.joint_radius * omega)
    tau = s * params.gravity * np.sin(theta) - params.damping_b * omega - fric
    return float(tau / params.total_inertia())


def simulate(params: PendulumParams, theta0: float, omega0: float,
             duration: float, dt_exp: float = DEFAULT_SAMPLE_DT,
             n_substeps: int = SUBSTEPS_PER_SAMPLE) -> Trajectory:
    """Integrate a drop and sample it at the experimental rate."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    if dt_exp <= 0:
        raise ValueError("dt_exp must be positive")
    n_samples = int(round(duration / dt_exp)) + 1
    if n_samples < 2:
        raise ValueError("duration shorter than one sample interval")

    theta = np.empty(n_samples)
    omega = np.empty(n_samples)
    bad = backend.simulate_arrays(
        float(theta0), float(omega0), n_samples, float(dt_exp),
        int(n_substeps), params.total_inertia(), params.mass_radius_sum(),
        params.gravity, params.damping_b, params.mu_k, params.mu_d,
        params.joint_radius, REST_OMEGA_EPS, theta, omega)
    if bad >= 0:
        raise IntegrationDivergedError((bad + 1) * dt_exp / n_substeps)
    return Trajectory(t0=0.0, dt=dt_exp, angles=theta, omegas=omega)


def mechanical_energy(params: PendulumParams, theta, omega):
    """Kinetic plus potential energy; the hanging pose is the minimum."""
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    kinetic = 0.5 * params.total_inertia() * omega ** 2
    potential = params.mass_radius_sum() * params.gravity * np.cos(theta)
    return kinetic + potential


def count_crossings(angles: np.ndarray, reference: float, band: float) -> int:
    """Hysteresis crossing count of `reference`.

    A crossing is registered each time the signal moves from confirmed-above
    (> reference + band) to confirmed-below (< reference - band) or back;
    excursions that stay inside the band are ignored.
    """
    deviation = np.asarray(angles, dtype=float) - reference
    state = 0  # -1 below, +1 above, 0 undecided
    crossings = 0
    for value in deviation:
        if value > band:
            if state == -1:
                crossings += 1
            state = 1
        elif value < -band:
            if state == 1:
                crossings += 1
            state = -1
    return crossings


def metrics(traj: Trajectory, rest_band: float = DEFAULT_REST_BAND,
            hold_time: float = DEFAULT_HOLD_TIME) -> OscillationMetrics:
    """Oscillation count and settling time relative to the final angle.

    The settle time is the first sample time from which the angle stays
    inside the rest band for hold_time continuously; a full cycle is a pair
    of confirmed crossings of the final angle.
    """
    angles = traj.angles
    hold_samples = int(np.ceil(hold_time / traj.dt))
    if angles.size <= hold_samples:
        raise InsufficientDataError(
            f"trajectory ({traj.duration:.3g} s) shorter than the "
            f"{hold_time:.3g} s hold window")

    final_angle = float(angles[-1])
    crossings = count_crossings(angles, final_angle, rest_band)

    inside = np.abs(angles - final_angle) < rest_band
    settle_idx = None
    run = 0
    for idx in range(angles.size):
        run = run + 1 if inside[idx] else 0
        if run >= hold_samples + 1:
            settle_idx = idx - hold_samples
            break
    if settle_idx is None:
        raise InsufficientDataError("trajectory never settles inside the "
                                    "rest band for the hold window")
    return OscillationMetrics(n_oscillations=crossings // 2,
                              settle_time=float(settle_idx * traj.dt),
                              final_angle=final_angle,
                              n_crossings=crossings)
