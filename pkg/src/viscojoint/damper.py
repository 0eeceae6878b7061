"""Concentric-fin rotary damper model (steady Couette flow).

The damper is a stack of interdigitated coaxial cylindrical fins, alternating
between the two coupler halves, starting with the central pin. Fin midlines
are packed uniformly at ``rho_i = inner_radius + i * (wall + channel)``, so
consecutive fins face each other across a channel of width ``channel_width``.

Each fin's G factor collects three shear contributions: the channel on its
medial side, the channel on its lateral side, and the axial gap at the fin
end. The medial term is dropped for the central pin and the lateral term for
the outermost fin (nothing moves relative to it beyond the housing). A lone
pin (n_fins == 1) keeps its lateral term: the opposing shell always encloses
it.

The total G factor sums one half's fins only (indices 0, 2, 4, ...), which
counts every fluid channel exactly once. Torque follows as
``T = -mu * G * omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

# feasibility codes used by sweep grids and their CSV form
FEASIBLE = "ok"
BELOW_PRINT_TOLERANCE = "print_tol"
WALL_INTERSECTION = "intersect"

CP_PER_PA_S = 1000.0


def cp_to_pa_s(value_cp: float) -> float:
    return value_cp / CP_PER_PA_S


def pa_s_to_cp(value_pa_s: float) -> float:
    return value_pa_s * CP_PER_PA_S


@dataclass(frozen=True)
class DamperGeometry:
    """Dimensions of the concentric-fin damper, all in metres."""

    n_fins: int
    wall_width: float
    channel_width: float
    fin_length: float
    inner_radius: float
    outer_radius_bound: float

    def fin_radii(self) -> np.ndarray:
        """Midline radius of every fin in the interdigitated stack."""
        pitch = self.wall_width + self.channel_width
        return self.inner_radius + pitch * np.arange(self.n_fins)

    def outermost_extent(self) -> float:
        """Outer surface of the outermost fin plus its clearance channel."""
        radii = self.fin_radii()
        return float(radii[-1]) + self.wall_width / 2.0 + self.channel_width

    def validate(self) -> None:
        if self.n_fins < 1:
            raise GeometryError("n_fins must be >= 1")
        if self.wall_width <= 0 or self.channel_width <= 0:
            raise GeometryError("wall and channel widths must be positive")
        if self.fin_length < 0:
            raise GeometryError("fin length must be non-negative")
        if self.inner_radius <= 0 or self.outer_radius_bound <= 0:
            raise GeometryError("radii must be positive")
        if self.inner_radius - self.wall_width / 2.0 < 0:
            raise GeometryError("central pin extends past the axis "
                                "(inner_radius < wall_width / 2)")
        if self.n_fins > 1:
            # innermost medial channel must keep a positive inner radius
            pitch = self.wall_width + self.channel_width
            rho1 = self.inner_radius + pitch
            if rho1 - self.wall_width / 2.0 - self.channel_width <= 0:
                raise GeometryError("medial channel of fin 1 has non-positive "
                                    "inner radius")
        if self.outermost_extent() > self.outer_radius_bound:
            raise GeometryError(
                "wall intersection: fin stack extends to "
                f"{self.outermost_extent():.6g} m, beyond the "
                f"{self.outer_radius_bound:.6g} m bound")

    def is_feasible(self) -> bool:
        try:
            self.validate()
        except GeometryError:
            return False
        return True


@dataclass(frozen=True)
class FluidSpec:
    """Working fluid: dynamic viscosity in Pa*s plus a label."""

    viscosity: float
    name: str = ""

    def __post_init__(self):
        if self.viscosity <= 0:
            raise ValueError("viscosity must be positive")

    @classmethod
    def from_cp(cls, viscosity_cp: float, name: str = "") -> "FluidSpec":
        return cls(viscosity=cp_to_pa_s(viscosity_cp), name=name)


def _side_term(rho_fin: float, rho_channel_far: float, delta: float,
               length: float) -> float:
    """Cylindrical Couette torque factor for one side channel.

    rho_fin is the fin surface radius, rho_channel_far the facing surface;
    the denominator is delta * (2 * rho_fin +/- delta) written via the
    difference of squared radii, which is exact for either side.
    """
    r_sq_diff = abs(rho_channel_far * rho_channel_far - rho_fin * rho_fin)
    return 4.0 * math.pi * (rho_channel_far ** 2) * (rho_fin ** 2) * length / r_sq_diff


def fin_g_factor(geometry: DamperGeometry, fin_index: int) -> float:
    """G factor of one fin (m^3), medial/lateral terms dropped per position."""
    geometry.validate()
    if not 0 <= fin_index < geometry.n_fins:
        raise GeometryError(f"fin index {fin_index} out of range for "
                            f"{geometry.n_fins} fins")
    w = geometry.wall_width
    delta = geometry.channel_width
    length = geometry.fin_length
    rho = float(geometry.fin_radii()[fin_index])
    r_in = rho - w / 2.0
    r_out = rho + w / 2.0

    total = math.pi * (r_out ** 4 - r_in ** 4) / (2.0 * delta)  # end gap
    if fin_index > 0:
        total += _side_term(r_in, r_in - delta, delta, length)
    if fin_index < geometry.n_fins - 1 or geometry.n_fins == 1:
        total += _side_term(r_out, r_out + delta, delta, length)
    return total


def half_fin_indices(n_fins: int) -> range:
    """Fins belonging to the pin's half of the damper."""
    return range(0, n_fins, 2)


def total_g_factor(geometry: DamperGeometry) -> float:
    """Total G factor (m^3): sum over one half's fins."""
    return sum(fin_g_factor(geometry, i) for i in half_fin_indices(geometry.n_fins))


def damper_torque(mu: float, geometry: DamperGeometry, omega: float) -> float:
    """Resisting torque T = -mu * G * omega (N*m)."""
    if mu <= 0:
        raise ValueError("viscosity must be positive")
    return -mu * total_g_factor(geometry) * omega


def required_viscosity(geometry: DamperGeometry, target_damping: float) -> float:
    """Viscosity (Pa*s) at which the damper realizes target_damping (N*m*s/rad)."""
    if target_damping <= 0:
        raise ValueError("target damping must be positive")
    return target_damping / total_g_factor(geometry)


@dataclass
class SweepGrid:
    """Result of a wall/channel parametric sweep.

    g_values is NaN wherever the cell is infeasible; feasibility holds one of
    the module-level codes per cell.
    """

    wall_values: np.ndarray
    channel_values: np.ndarray
    n_fins: int
    g_values: np.ndarray
    feasibility: np.ndarray

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("wall_m,channel_m,g_m3,feasibility\n")
            for i, wall in enumerate(self.wall_values):
                for j, channel in enumerate(self.channel_values):
                    g = self.g_values[i, j]
                    g_txt = "" if math.isnan(g) else f"{g:.12e}"
                    fh.write(f"{wall:.9g},{channel:.9g},{g_txt},"
                             f"{self.feasibility[i, j]}\n")


def sweep_g(wall_values, channel_values, n_fins: int,
            geometry_template: DamperGeometry,
            print_tolerance: float = 0.3e-3) -> SweepGrid:
    """Evaluate total G over a wall x channel grid with feasibility flags.

    Cells below the print tolerance or violating the radial packing bound are
    flagged and carry no G value; infeasibility is data, not an error.
    """
    wall_values = np.asarray(wall_values, dtype=float)
    channel_values = np.asarray(channel_values, dtype=float)
    if wall_values.size == 0 or channel_values.size == 0:
        raise ValueError("sweep ranges must be non-empty")
    if np.any(np.diff(wall_values) <= 0) or np.any(np.diff(channel_values) <= 0):
        raise ValueError("sweep ranges must be strictly increasing")

    g_values = np.full((wall_values.size, channel_values.size), np.nan)
    feasibility = np.full(g_values.shape, FEASIBLE, dtype="U12")
    for i, wall in enumerate(wall_values):
        for j, channel in enumerate(channel_values):
            if wall < print_tolerance or channel < print_tolerance:
                feasibility[i, j] = BELOW_PRINT_TOLERANCE
                continue
            geom = DamperGeometry(
                n_fins=n_fins, wall_width=float(wall),
                channel_width=float(channel),
                fin_length=geometry_template.fin_length,
                inner_radius=geometry_template.inner_radius,
                outer_radius_bound=geometry_template.outer_radius_bound)
            if geom.outermost_extent() > geom.outer_radius_bound:
                feasibility[i, j] = WALL_INTERSECTION
                continue
            g_values[i, j] = total_g_factor(geom)
    return SweepGrid(wall_values=wall_values, channel_values=channel_values,
                     n_fins=n_fins, g_values=g_values, feasibility=feasibility)
