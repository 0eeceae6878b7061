"""Closed-loop ball-catch trial simulation.

A ball free-falls toward the fingertip plane (y = 0). A time-of-flight
sensor samples its height at a fixed rate with Gaussian noise and a
pipeline latency; the controller maps the latest reading to a target
aperture (open / linear-tracking / full-close regimes), converts it to a
motor angle through the finger aperture map, and a proportional PWM law
drives the motor with encoder-quantized feedback.

A trial succeeds when the ball passes the fingertip plane without the hand
having closed below the ball diameter beforehand (a premature close
deflects the ball) and the fingers then secure it, reaching the closed
aperture within the arrest window after the ball center crosses the plane.
The at-crossing aperture is recorded for every trial.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .finger import ApertureMap

GRAVITY = 9.81
ARREST_WINDOW = 0.050       # s after plane crossing to secure the ball
ARREST_SLACK = 1.0e-3       # m above the fully-closed aperture


@dataclass(frozen=True)
class CatchConfig:
    """Controller thresholds, sensor/motor models and ball properties."""

    y_t: float                  # m, hold-open threshold
    y_c: float                  # m, capture height
    d_s: float                  # m, start (open) aperture
    d_c: float                  # m, aperture commanded at capture height
    d_u: float                  # m, fully closed aperture
    ball_diameter: float
    ball_mass: float
    drop_height: float
    gain: float = 20.0          # PWM counts per degree of motor error
    pwm_max: int = 255
    sensor_noise: float = 5.0e-3
    sensor_rate: float = 50.0
    control_rate: float = 1000.0
    sensor_latency: float = 0.0
    motor_max_speed: float = 33.0   # rad/s at the output shaft
    encoder_cpr: int = 64
    gear_ratio: float = 30.0

    def __post_init__(self):
        if not self.y_t > self.y_c > 0:
            raise ValueError("need y_t > y_c > 0")
        if not self.d_s > self.d_c > self.d_u >= 0:
            raise ValueError("need d_s > d_c > d_u >= 0")
        if self.gain <= 0 or self.sensor_rate <= 0 or self.control_rate <= 0:
            raise ValueError("gain and rates must be positive")
        if self.drop_height <= 0 or self.ball_diameter <= 0:
            raise ValueError("ball and drop geometry must be positive")

    def encoder_resolution(self) -> float:
        """Feedback quantum at the output shaft, rad."""
        return 2.0 * math.pi / (self.encoder_cpr * self.gear_ratio)


@dataclass
class TrialResult:
    caught: bool
    close_time: float            # s, when the hand secured (nan if never)
    aperture_at_pass: float      # m, aperture when the ball center crossed
    event_log: list = field(default_factory=list)

    def events(self, name: str):
        return [e for e in self.event_log if e[1] == name]


def controller_target(ball_height: float, cfg: CatchConfig) -> float:
    """Three-regime aperture command: open, proportional, full close."""
    if ball_height > cfg.y_t:
        return cfg.d_s
    if ball_height >= cfg.y_c:
        frac = (ball_height - cfg.y_c) / (cfg.y_t - cfg.y_c)
        return cfg.d_c + frac * (cfg.d_s - cfg.d_c)
    return cfg.d_u


def motor_step(current_angle: float, target_angle: float, cfg: CatchConfig,
               dt: float) -> float:
    """One proportional-control update of the motor angle.

    The controller sees the encoder-quantized angle; PWM scales linearly
    with the error in degrees and saturates at pwm_max.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    res = cfg.encoder_resolution()
    feedback = round(current_angle / res) * res
    error_deg = math.degrees(target_angle - feedback)
    pwm = min(cfg.gain * abs(error_deg), float(cfg.pwm_max))
    speed = cfg.motor_max_speed * pwm / cfg.pwm_max
    if error_deg == 0.0:
        return current_angle
    step = math.copysign(min(speed * dt, abs(target_angle - feedback)),
                         error_deg)
    return current_angle + step


def _check_config(cfg: CatchConfig, log: list) -> None:
    # distance fallen before the first sensor sample
    first_sample_drop = GRAVITY / (2.0 * cfg.sensor_rate ** 2)
    if cfg.y_t >= cfg.drop_height - first_sample_drop:
        warnings.warn("y_t is above the first sensed ball height; the "
                      "controller never sees the hold-open phase")
        log.append((0.0, "config_warning", cfg.y_t))


def run_trial(cfg: CatchConfig, seed: int, fingers: ApertureMap,
              motor0: Optional[float] = None) -> TrialResult:
    """Simulate one seeded drop; deterministic for a given seed and config.

    The ball is released at t = 0 from drop_height; sensing, control and
    the motor advance on a shared clock at the control rate.
    """
    rng = np.random.default_rng(seed)
    dt = 1.0 / cfg.control_rate
    t_cross = math.sqrt(2.0 * cfg.drop_height / GRAVITY)
    duration = t_cross + ARREST_WINDOW + 0.05

    # pre-draw sensor samples (time, noisy value)
    n_sensor = int(duration * cfg.sensor_rate) + 1
    sample_times = np.arange(n_sensor) / cfg.sensor_rate
    heights = cfg.drop_height - 0.5 * GRAVITY * sample_times ** 2
    readings = heights + rng.normal(0.0, cfg.sensor_noise, n_sensor) \
        if cfg.sensor_noise > 0 else heights

    log: list = [(0.0, "release", cfg.drop_height)]
    _check_config(cfg, log)

    motor = fingers.motor_for_aperture(cfg.d_s) if motor0 is None else motor0
    aperture = fingers.aperture_for_motor(motor)

    crossed = False
    premature = False
    caught = False
    close_time = math.nan
    aperture_at_pass = math.nan
    regime = None

    n_steps = int(round(duration / dt))
    for k in range(n_steps + 1):
        t = k * dt
        ball_y = cfg.drop_height - 0.5 * GRAVITY * t * t

        if not crossed and ball_y <= 0.0:
            crossed = True
            aperture_at_pass = aperture
            log.append((t, "plane_crossing", aperture))
        if not crossed and aperture <= cfg.ball_diameter and not premature:
            premature = True
            log.append((t, "premature_close", aperture))
        if crossed and not caught and not premature:
            if aperture <= cfg.d_u + ARREST_SLACK:
                if t <= t_cross + ARREST_WINDOW:
                    caught = True
                    close_time = t
                    log.append((t, "secured", aperture))
                else:
                    log.append((t, "late_close", aperture))
                    break

        # latest sensor sample visible through the latency pipeline
        visible = int(math.floor((t - cfg.sensor_latency) * cfg.sensor_rate))
        if visible >= 0:
            sensed = float(readings[min(visible, n_sensor - 1)])
            target_aperture = controller_target(sensed, cfg)
        else:
            target_aperture = cfg.d_s

        new_regime = ("open" if target_aperture >= cfg.d_s else
                      "close" if target_aperture <= cfg.d_u else "track")
        if new_regime != regime:
            regime = new_regime
            log.append((t, "regime", regime))

        target_motor = fingers.motor_for_aperture(target_aperture)
        motor = motor_step(motor, target_motor, cfg, dt)
        aperture = fingers.aperture_for_motor(motor)

    if premature:
        caught = False
        close_time = math.nan
    log.append((duration, "result", "caught" if caught else "missed"))
    return TrialResult(caught=caught, close_time=close_time,
                       aperture_at_pass=aperture_at_pass, event_log=log)


@dataclass
class CampaignResult:
    catch_rate: float
    trials: list

    @property
    def n_caught(self) -> int:
        return sum(t.caught for t in self.trials)


def run_campaign(cfg: CatchConfig, n_trials: int, seed: int,
                 fingers: ApertureMap) -> CampaignResult:
    """Independent seeded trials; bit-reproducible for a given seed."""
    if n_trials < 1:
        raise ValueError("need at least one trial")
    children = np.random.SeedSequence(seed).spawn(n_trials)
    trials = [run_trial(cfg, child, fingers) for child in children]
    return CampaignResult(catch_rate=sum(t.caught for t in trials) / n_trials,
                          trials=trials)
