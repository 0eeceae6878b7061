"""Tendon-driven three-link finger: statics, kinematics and closing dynamics.

One cable flexes all three joints through equal-ish moment arms; a series
elastic element (parallel nylon threads) sits between the motor pulley and
the cable. Joint angles are relative flexion in [0, pi], starting flat.

Without the silicone ligament the joints hold only through per-joint Coulomb
breakaway torques, ordered lowest at the distal joint, so a rising tendon
tension peels the joints one at a time starting distally. With the ligament
(a parallel rotational spring at each joint) the tension works against all
three springs at once and the joints flex together.

Aperture is the tip separation of two opposing fingers on a shared palm:
d = 2 * (palm offset + horizontal reach), clamped at zero when the tips
meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSeriesError, SolverError, UnreachableTargetError

JOINT_LIMIT = math.pi          # brace blocks rotation past 180 degrees
SOLVE_TOL = 1e-8               # N*m, torque-balance tolerance
SOLVE_MAX_ITERS = 10_000

# near-human joint damping band, N*m*s/rad
HUMAN_DAMPING_BAND = (8.1e-3, 14.2e-3)
# rotational stiffness of the cast ligament element, N*m/rad
LIGAMENT_STIFFNESS = 6.6e-2


@dataclass(frozen=True)
class TendonDrive:
    """Series-elastic tendon transmission."""

    series_stiffness: float = 9.52e3   # N/m  (9.52 N/mm nylon bundle)
    pulley_radius: float = 2.5e-3      # m    (5 mm diameter pulley)

    def take_up(self, motor_angle: float) -> float:
        """Cable length wound onto the pulley at a motor angle (rad)."""
        return self.pulley_radius * motor_angle


@dataclass(frozen=True)
class FingerChain:
    """Planar three-link finger with viscoelastic joints."""

    link_lengths: tuple[float, float, float]
    link_masses: tuple[float, float, float]
    tendon_moment_arms: tuple[float, float, float]
    joint_stiffness: tuple[float, float, float]   # 0 when no ligament
    joint_damping: tuple[float, float, float]
    joint_coulomb: tuple[float, float, float]     # breakaway, distal lowest
    palm_offset: float

    def __post_init__(self):
        if len(self.link_lengths) != 3:
            raise ValueError("chain has exactly three links")
        if min(self.tendon_moment_arms) <= 0:
            raise ValueError("moment arms must be positive")
        if min(self.link_lengths) <= 0 or self.palm_offset < 0:
            raise ValueError("lengths must be positive")

    @property
    def n_joints(self) -> int:
        return 3

    def link_inertias(self) -> tuple[float, float, float]:
        """Uniform-rod inertia of each link about its own center."""
        return tuple(m * l * l / 12.0
                     for m, l in zip(self.link_masses, self.link_lengths))

    def with_ligament(self, stiffness: float = LIGAMENT_STIFFNESS) -> "FingerChain":
        return replace(self, joint_stiffness=(stiffness,) * 3)

    def without_ligament(self) -> "FingerChain":
        return replace(self, joint_stiffness=(0.0,) * 3)


@dataclass
class FlexionRecord:
    """Quasi-static sweep result; sequences share one length."""

    motor_angles_deg: np.ndarray
    joint_angles: np.ndarray        # (n, 3) rad
    fingertip_distance: np.ndarray  # m
    tendon_tension: np.ndarray      # N


def fingertip_distance(chain: FingerChain, joint_angles) -> float:
    """Aperture between opposing fingertips for one finger pose."""
    angles = np.asarray(joint_angles, dtype=float)
    if np.any(angles < -1e-12) or np.any(angles > JOINT_LIMIT + 1e-12):
        raise ValueError("joint angles outside [0, pi]")
    cumulative = np.cumsum(angles)
    reach = chain.palm_offset + float(
        np.sum(np.asarray(chain.link_lengths) * np.cos(cumulative)))
    return max(0.0, 2.0 * reach)


def _equilibrium(chain: FingerChain, drive: TendonDrive, motor_rad: float,
                 theta_prev: np.ndarray) -> tuple[np.ndarray, float]:
    """Quasi-static torque balance at one motor angle.

    Damped fixed-point iteration on the joint angles: a joint advances only
    while the tendon torque exceeds its spring-plus-breakaway holding
    torque; angles never drop below the previous equilibrium (monotone
    sweep, no release phase).
    """
    arms = np.asarray(chain.tendon_moment_arms)
    stiff = np.asarray(chain.joint_stiffness)
    coulomb = np.asarray(chain.joint_coulomb)
    k_s = drive.series_stiffness
    take_up = drive.take_up(motor_rad)
    # tension feedback acts like k_s * arm^2 at each joint
    scale = stiff + k_s * arms * arms
    eta = 0.3

    theta = theta_prev.copy()
    for _ in range(SOLVE_MAX_ITERS):
        tension = max(0.0, k_s * (take_up - float(arms @ theta)))
        overshoot = tension * arms - stiff * theta - coulomb
        movable = (theta < JOINT_LIMIT) & (overshoot > 0.0)
        if not np.any(movable) or float(np.max(overshoot[movable])) <= SOLVE_TOL:
            return theta, tension
        step = np.where(movable, eta * overshoot / scale, 0.0)
        theta = np.clip(theta + step, theta_prev, JOINT_LIMIT)
    raise SolverError(f"no equilibrium at motor angle "
                      f"{math.degrees(motor_rad):.1f} deg")


MICRO_STEP_DEG = 0.5   # internal loading-path resolution


def quasi_static_sweep(chain: FingerChain, drive: TendonDrive,
                       motor_angles_deg) -> FlexionRecord:
    """Sweep the motor and record joint angles and aperture at equilibrium.

    The motor is advanced internally in small increments between recorded
    angles: quasi-static loading is continuous, and coarse jumps would spike
    the tension and falsely break away high-threshold joints.
    """
    motor_angles_deg = np.asarray(motor_angles_deg, dtype=float)
    if motor_angles_deg.size == 0:
        raise ValueError("empty motor sweep")
    if np.any(np.diff(motor_angles_deg) < 0):
        raise ValueError("motor sweep must be monotone non-decreasing")

    theta = np.zeros(3)
    position = 0.0
    joints = np.empty((motor_angles_deg.size, 3))
    apertures = np.empty(motor_angles_deg.size)
    tensions = np.empty(motor_angles_deg.size)
    for i, deg in enumerate(motor_angles_deg):
        while position < deg:
            position = min(position + MICRO_STEP_DEG, deg)
            theta, tension = _equilibrium(chain, drive,
                                          math.radians(position), theta)
        theta, tension = _equilibrium(chain, drive, math.radians(deg), theta)
        joints[i] = theta
        apertures[i] = fingertip_distance(chain, theta)
        tensions[i] = tension
    return FlexionRecord(motor_angles_deg=motor_angles_deg,
                         joint_angles=joints,
                         fingertip_distance=apertures,
                         tendon_tension=tensions)


@dataclass
class ApertureMap:
    """Invertible motor-angle-to-aperture relationship.

    Built from a quasi-static sweep and truncated to its strictly
    decreasing prefix so both directions are single-valued.
    """

    motor_rad: np.ndarray   # increasing
    aperture: np.ndarray    # strictly decreasing

    @property
    def open_aperture(self) -> float:
        return float(self.aperture[0])

    @property
    def closed_aperture(self) -> float:
        return float(self.aperture[-1])

    @property
    def max_motor(self) -> float:
        return float(self.motor_rad[-1])

    def aperture_for_motor(self, motor: float) -> float:
        return float(np.interp(motor, self.motor_rad, self.aperture))

    def motor_for_aperture(self, target: float) -> float:
        target = min(max(target, self.closed_aperture), self.open_aperture)
        # aperture decreases with motor angle; negate to interpolate
        return float(np.interp(-target, -self.aperture, self.motor_rad))


def aperture_map(chain: FingerChain, drive: TendonDrive,
                 max_motor_deg: float = 270.0,
                 step_deg: float = 1.0) -> ApertureMap:
    """Characterize aperture vs motor angle over the usable (monotone) range."""
    sweep = np.arange(0.0, max_motor_deg + step_deg / 2, step_deg)
    record = quasi_static_sweep(chain, drive, sweep)
    aperture = record.fingertip_distance
    # usable range: skip the slack take-up plateau at the start, stop when
    # the aperture bottoms out (or would grow again past full curl)
    falling = np.flatnonzero(np.diff(aperture) < -1e-12)
    if falling.size == 0:
        raise SolverError("aperture does not decrease over the motor range")
    start = falling[0]
    end = aperture.size
    for i in range(start + 1, aperture.size):
        if aperture[i] >= aperture[i - 1] - 1e-12:
            end = i
            break
    return ApertureMap(motor_rad=np.radians(sweep[start:end]),
                       aperture=aperture[start:end])


def correlation_matrix(record: FlexionRecord) -> np.ndarray:
    """Pairwise Pearson correlations of range-normalized joint series."""
    joints = record.joint_angles
    if joints.shape[0] < 3:
        raise ValueError("need at least 3 sweep samples")
    spans = joints.max(axis=0) - joints.min(axis=0)
    for j, span in enumerate(spans):
        if span <= 0.0:
            raise DegenerateSeriesError(
                f"joint {j + 1} has zero range over the sweep")
    normalized = (joints - joints.min(axis=0)) / spans
    return np.corrcoef(normalized.T)


def mean_offdiagonal(matrix: np.ndarray) -> float:
    off = matrix[~np.eye(matrix.shape[0], dtype=bool)]
    return float(off.mean())


def _mass_matrix(chain: FingerChain, theta: np.ndarray) -> np.ndarray:
    """Planar 3R mass matrix (uniform-rod links, COM at mid-link)."""
    lengths = chain.link_lengths
    masses = chain.link_masses
    inertias = chain.link_inertias()
    cum = np.cumsum(theta)
    m = np.zeros((3, 3))
    for k in range(3):
        jac = np.zeros((2, 3))
        for j in range(k + 1):
            # COM of link k relative to joint j
            x, y = 0.0, 0.0
            for i in range(j, k + 1):
                seg = lengths[i] * (0.5 if i == k else 1.0)
                x += seg * math.cos(cum[i])
                y += -seg * math.sin(cum[i])
            jac[0, j] = -y   # d(pos)/d(theta_j) = rotate lever by 90 deg
            jac[1, j] = x
        m += masses[k] * (jac.T @ jac)
        ones = np.zeros((3, 3))
        ones[:k + 1, :k + 1] = 1.0
        m += inertias[k] * ones
    return m


def dynamic_close(chain: FingerChain, drive: TendonDrive, motor_torque: float,
                  target, dt: float = 1e-4, t_max: float = 3.0) -> float:
    """Time for every joint to reach its target under a constant motor torque.

    The tendon transmits motor_torque / pulley_radius through the massless
    series element; joint torques fight the parallel springs, viscous
    damping and Coulomb holding torques. Coriolis terms are neglected
    (strongly damped, slow closing).
    """
    if motor_torque <= 0:
        raise ValueError("motor torque must be positive")
    target = np.asarray(target, dtype=float)
    if np.any(target <= 0) or np.any(target > JOINT_LIMIT):
        raise ValueError("targets must lie in (0, pi]")

    arms = np.asarray(chain.tendon_moment_arms)
    stiff = np.asarray(chain.joint_stiffness)
    damp = np.asarray(chain.joint_damping)
    coulomb = np.asarray(chain.joint_coulomb)
    tension = motor_torque / drive.pulley_radius
    drive_torque = tension * arms

    # static reachability: equilibrium flexion must clear the target
    for j in range(3):
        net = drive_torque[j] - coulomb[j]
        if net <= 0 or (stiff[j] > 0 and net / stiff[j] < target[j]):
            raise UnreachableTargetError(
                f"joint {j + 1} cannot reach {target[j]:.3f} rad with "
                f"{motor_torque:.3g} N*m")

    theta = np.zeros(3)
    omega = np.zeros(3)
    steps = int(round(t_max / dt))
    for step in range(steps):
        if np.all(theta >= target):
            return step * dt
        sgn = np.sign(omega)
        sgn[np.abs(omega) < 1e-6] = 0.0
        torque = drive_torque - stiff * theta - coulomb * sgn
        # hold joints the Coulomb torque can keep at rest
        held = (sgn == 0.0) & (np.abs(drive_torque - stiff * theta) <= coulomb)
        torque[held] = 0.0
        # viscous term handled implicitly: the light links make
        # M / b far smaller than any reasonable explicit step
        mass = _mass_matrix(chain, theta)
        omega = np.linalg.solve(mass + dt * np.diag(damp),
                                mass @ omega + dt * torque)
        omega[held] = 0.0
        theta = theta + dt * omega
        # joint limits: inelastic stops
        low = theta < 0.0
        high = theta > JOINT_LIMIT
        theta[low] = 0.0
        theta[high] = JOINT_LIMIT
        omega[low & (omega < 0)] = 0.0
        omega[high & (omega > 0)] = 0.0
    raise SolverError(f"targets not reached within {t_max:.2f} s")
