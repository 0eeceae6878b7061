"""Defaults, provenance tags and config-file I/O.

The config file is flat INI: one section per subsystem, scalar values only.
Keys suffixed `_mm`, `_cP` or `_deg` are converted to SI (m, Pa*s, rad) at
load; everything else is already SI. Unknown sections or keys are rejected.

Every default carries a provenance tag: `paper` (stated by the publication),
`assumed` (chosen here, no published value exists), or `calibrated` (chosen
here so the documented reference behaviours are reproduced; see README).
Resolved values and their tags are echoed to the log on every CLI run.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Optional

from .catching import CatchConfig
from .damper import DamperGeometry, FluidSpec
from .errors import ConfigError
from .finger import ApertureMap, FingerChain, TendonDrive, aperture_map
from .pendulum import PendulumParams

_MM = 1e-3
_CP = 1e-3   # 1000 cP = 1 Pa*s


@dataclass(frozen=True)
class Field:
    default: object          # in file units (before scaling)
    provenance: str          # paper | assumed | calibrated
    help: str
    scale: float = 1.0       # raw file value * scale = stored SI value
    cast: Callable = float

    def default_si(self):
        if self.cast is str or self.cast is int:
            return self.default
        return float(self.default) * self.scale


def _deg_field(default, provenance, help):
    return Field(default, provenance, help, scale=math.pi / 180.0)


SCHEMA: dict[str, dict[str, Field]] = {
    "damper": {
        "n_fins": Field(5, "paper", "interdigitated fins in the stack", cast=int),
        "wall_mm": Field(0.5, "paper", "fin wall width", scale=_MM),
        "channel_mm": Field(0.4, "paper", "fluid channel width", scale=_MM),
        "fin_length_mm": Field(10.0, "calibrated", "axial fin length", scale=_MM),
        "inner_radius_mm": Field(2.5, "calibrated", "central pin midline radius", scale=_MM),
        "outer_radius_bound_mm": Field(7.2, "calibrated", "radial room inside the joint", scale=_MM),
        "print_tolerance_mm": Field(0.3, "assumed", "smallest printable feature", scale=_MM),
        "sweep_wall_min_mm": Field(0.2, "assumed", "sweep: smallest wall", scale=_MM),
        "sweep_wall_max_mm": Field(0.8, "assumed", "sweep: largest wall", scale=_MM),
        "sweep_wall_count": Field(25, "assumed", "sweep: wall grid points", cast=int),
        "sweep_channel_min_mm": Field(0.15, "assumed", "sweep: smallest channel", scale=_MM),
        "sweep_channel_max_mm": Field(0.5, "assumed", "sweep: largest channel", scale=_MM),
        "sweep_channel_count": Field(25, "assumed", "sweep: channel grid points", cast=int),
    },
    "fluid": {
        "viscosity_cP": Field(185000.0, "paper", "working fluid viscosity", scale=_CP),
        "name": Field("peanut butter", "paper", "fluid label", cast=str),
    },
    "pendulum": {
        "joint_inertia": Field(2.425e-5, "calibrated", "joint rotor inertia, kg m^2"),
        "bar_mass": Field(0.0277, "calibrated", "acrylic bar mass, kg"),
        "bar_length": Field(0.02, "calibrated", "bar length, m"),
        "bar_width": Field(0.012, "calibrated", "bar in-plane width, m"),
        "bar_com_radius": Field(0.034, "calibrated", "axis to bar COM, m"),
        "weight_mass": Field(0.0112, "paper", "nut/bolt/washer mass, kg"),
        "weight_radius": Field(0.036, "calibrated", "axis to weight, m"),
        "joint_radius": Field(3.3, "calibrated", "effective friction lever, m"),
        "mu_k": Field(2.88e-3, "paper", "fitted Coulomb friction coefficient"),
        "mu_d": Field(0.0, "paper", "fitted viscous friction (negligible)"),
        "damping_b": Field(7.59e-4, "paper", "fitted damper coefficient, N m s/rad"),
        "gravity": Field(9.81, "assumed", "m/s^2"),
        "theta0_deg": _deg_field(90.0, "assumed", "default release angle from vertical-up"),
        "release_damped_deg": _deg_field(141.0, "calibrated", "damped-test release angle"),
        "rest_band": Field(0.02, "assumed", "settling band, rad"),
        "hold_time": Field(0.5, "assumed", "settling hold window, s"),
        "sample_rate": Field(240.0, "paper", "camera rate, Hz"),
    },
    "fit": {
        "penalty_weight": Field(1.0e6, "assumed", "non-negativity barrier weight"),
        "max_iters": Field(400, "assumed", "simplex evaluation budget", cast=int),
        "n_restarts": Field(3, "assumed", "random simplex restarts", cast=int),
    },
    "finger": {
        "link1_mm": Field(45.0, "assumed", "proximal phalanx length", scale=_MM),
        "link2_mm": Field(45.0, "assumed", "middle phalanx length", scale=_MM),
        "link3_mm": Field(30.0, "assumed", "fingertip length", scale=_MM),
        "link1_mass": Field(0.005, "assumed", "kg"),
        "link2_mass": Field(0.005, "assumed", "kg"),
        "link3_mass": Field(0.003, "assumed", "kg"),
        "moment_arm_mm": Field(1.5, "assumed", "tendon moment arm, all joints", scale=_MM),
        "ligament_stiffness": Field(6.6e-2, "paper", "parallel elastic element, N m/rad"),
        "joint_damping": Field(7.59e-4, "paper", "damper insert coefficient, N m s/rad"),
        "coulomb1": Field(0.012, "assumed", "proximal breakaway torque, N m"),
        "coulomb2": Field(0.006, "assumed", "middle breakaway torque, N m"),
        "coulomb3": Field(0.002, "assumed", "distal breakaway torque, N m"),
        "palm_offset_mm": Field(40.0, "assumed", "palm center to finger base", scale=_MM),
        "series_stiffness": Field(9.52e3, "paper", "tendon series element, N/m"),
        "pulley_diameter_mm": Field(5.0, "paper", "motor pulley diameter", scale=_MM),
        "sweep_max_deg": Field(270.0, "paper", "characterization sweep end, deg", cast=float),
        "sweep_step_deg": Field(10.0, "paper", "characterization sweep step, deg", cast=float),
    },
    "catch": {
        "y_t": Field(0.5, "assumed", "hold-open threshold height, m"),
        "y_c": Field(0.1, "assumed", "capture height, m"),
        "d_c": Field(0.09, "calibrated", "aperture commanded at capture height, m"),
        "ball_diameter": Field(0.03, "calibrated", "m"),
        "ball_mass": Field(0.008, "assumed", "kg"),
        "drop_height": Field(0.8, "assumed", "release height above fingertips, m"),
        "gain": Field(20.0, "paper", "PWM counts per degree of error"),
        "pwm_max": Field(255, "paper", "8-bit PWM ceiling", cast=int),
        "sensor_noise": Field(5.0e-3, "paper", "rangefinder accuracy, m (1 sigma)"),
        "sensor_rate": Field(50.0, "assumed", "rangefinder sample rate, Hz"),
        "control_rate": Field(1000.0, "assumed", "control loop rate, Hz"),
        "sensor_latency": Field(0.02, "assumed", "sensing pipeline delay, s"),
        "motor_max_speed": Field(40.0, "calibrated", "output shaft speed ceiling, rad/s"),
        "encoder_cpr": Field(64, "paper", "encoder counts per motor revolution", cast=int),
        "gear_ratio": Field(30.0, "paper", "gearbox reduction"),
    },
}


def _format_value(field: Field, value) -> str:
    if field.cast is str:
        return str(value)
    if field.cast is int:
        return str(int(value))
    raw = value / field.scale if field.scale != 1.0 else value
    return repr(float(raw))


def _format_default(field: Field) -> str:
    if field.cast is str:
        return str(field.default)
    if field.cast is int:
        return str(int(field.default))
    return repr(float(field.default))


class ToolConfig:
    """Resolved configuration: defaults overlaid with a config file.

    Raw strings of loaded keys are kept so that saving echoes a canonical
    file back byte-identically.
    """

    def __init__(self, values: Optional[dict] = None):
        self.values = {s: {k: f.default_si() for k, f in fields.items()}
                       for s, fields in SCHEMA.items()}
        # canonical text of the defaults, so saving never re-divides by the
        # unit scale (keeps the file free of float round-off)
        self._raw = {(s, k): _format_default(f)
                     for s, fields in SCHEMA.items()
                     for k, f in fields.items()}
        if values:
            for section, entries in values.items():
                for key, value in entries.items():
                    self.set(section, key, value)

    # -- loading / saving ---------------------------------------------------

    @classmethod
    def load(cls, path) -> "ToolConfig":
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str   # keys are case-sensitive (unit suffixes)
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
        cfg = cls()
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                field = SCHEMA[section].get(key)
                if field is None:
                    raise ConfigError(f"unknown key {section}.{key}")
                cfg.values[section][key] = cls._parse(field, raw, section, key)
                cfg._raw[(section, key)] = raw
        return cfg

    @staticmethod
    def _parse(field: Field, raw: str, section: str, key: str):
        if field.cast is str:
            return raw
        try:
            value = field.cast(raw) if field.cast is int else float(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
        if field.cast is int:
            return value
        return value * field.scale

    def dumps(self) -> str:
        out = io.StringIO()
        for si, (section, fields) in enumerate(SCHEMA.items()):
            if si:
                out.write("\n")
            out.write(f"[{section}]\n")
            for key, field in fields.items():
                text = self._raw.get(
                    (section, key),
                    _format_value(field, self.values[section][key]))
                out.write(f"{key} = {text}\n")
        return out.getvalue()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    def resolved_lines(self):
        """`section.key = value  [provenance]` lines for run logs."""
        for section, fields in SCHEMA.items():
            for key, field in fields.items():
                value = _format_value(field, self.values[section][key])
                yield f"{section}.{key} = {value}  [{field.provenance}]"

    def get(self, section: str, key: str):
        return self.values[section][key]

    def set(self, section: str, key: str, value) -> None:
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown key {section}.{key}")
        self.values[section][key] = value
        self._raw.pop((section, key), None)

    # -- typed views --------------------------------------------------------

    def damper_geometry(self, wall=None, channel=None) -> DamperGeometry:
        d = self.values["damper"]
        return DamperGeometry(
            n_fins=d["n_fins"],
            wall_width=wall if wall is not None else d["wall_mm"],
            channel_width=channel if channel is not None else d["channel_mm"],
            fin_length=d["fin_length_mm"],
            inner_radius=d["inner_radius_mm"],
            outer_radius_bound=d["outer_radius_bound_mm"])

    def fluid(self) -> FluidSpec:
        f = self.values["fluid"]
        return FluidSpec(viscosity=f["viscosity_cP"], name=f["name"])

    def pendulum_params(self, **overrides) -> PendulumParams:
        p = self.values["pendulum"]
        kw = dict(joint_inertia=p["joint_inertia"], bar_mass=p["bar_mass"],
                  bar_length=p["bar_length"], bar_width=p["bar_width"],
                  bar_com_radius=p["bar_com_radius"],
                  weight_mass=p["weight_mass"],
                  weight_radius=p["weight_radius"],
                  joint_radius=p["joint_radius"], mu_k=p["mu_k"],
                  mu_d=p["mu_d"], damping_b=p["damping_b"],
                  gravity=p["gravity"])
        kw.update(overrides)
        return PendulumParams(**kw)

    def finger_chain(self, elastic: bool = True) -> FingerChain:
        f = self.values["finger"]
        stiffness = f["ligament_stiffness"] if elastic else 0.0
        return FingerChain(
            link_lengths=(f["link1_mm"], f["link2_mm"], f["link3_mm"]),
            link_masses=(f["link1_mass"], f["link2_mass"], f["link3_mass"]),
            tendon_moment_arms=(f["moment_arm_mm"],) * 3,
            joint_stiffness=(stiffness,) * 3,
            joint_damping=(f["joint_damping"],) * 3,
            joint_coulomb=(f["coulomb1"], f["coulomb2"], f["coulomb3"]),
            palm_offset=f["palm_offset_mm"])

    def tendon_drive(self) -> TendonDrive:
        f = self.values["finger"]
        return TendonDrive(series_stiffness=f["series_stiffness"],
                           pulley_radius=f["pulley_diameter_mm"] / 2.0)

    def finger_aperture_map(self) -> ApertureMap:
        return aperture_map(self.finger_chain(elastic=True),
                            self.tendon_drive(),
                            max_motor_deg=self.values["finger"]["sweep_max_deg"])

    def catch_config(self, fingers: Optional[ApertureMap] = None,
                     **overrides) -> CatchConfig:
        if fingers is None:
            fingers = self.finger_aperture_map()
        c = self.values["catch"]
        kw = dict(y_t=c["y_t"], y_c=c["y_c"], d_s=fingers.open_aperture,
                  d_c=c["d_c"], d_u=fingers.closed_aperture,
                  ball_diameter=c["ball_diameter"], ball_mass=c["ball_mass"],
                  drop_height=c["drop_height"], gain=c["gain"],
                  pwm_max=c["pwm_max"], sensor_noise=c["sensor_noise"],
                  sensor_rate=c["sensor_rate"], control_rate=c["control_rate"],
                  sensor_latency=c["sensor_latency"],
                  motor_max_speed=c["motor_max_speed"],
                  encoder_cpr=c["encoder_cpr"], gear_ratio=c["gear_ratio"])
        kw.update(overrides)
        return CatchConfig(**kw)


def default_config_text() -> str:
    return ToolConfig().dumps()


def packaged_defaults_path():
    return resources.files("viscojoint") / "defaults.cfg"
