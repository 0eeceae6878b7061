"""Independent numerical oracles used to pin expected values.

These deliberately avoid the closed-form algebra of the library: velocity
profiles are solved numerically, wall shear is obtained by finite
differences, and surface integrals by quadrature.
"""

import math

import numpy as np


def _couette_profile(r_moving, r_fixed, omega):
    """Coefficients (A, B) of u(r) = A r + B / r with u(r_moving) = omega *
    r_moving and u(r_fixed) = 0, solved numerically."""
    mat = np.array([[r_moving, 1.0 / r_moving], [r_fixed, 1.0 / r_fixed]])
    rhs = np.array([omega * r_moving, 0.0])
    return np.linalg.solve(mat, rhs)


def _wall_shear(coeffs, r_wall, mu, h):
    """Shear stress mu * r * d/dr(u/r) at r_wall via a 5-point stencil."""
    a, b = coeffs

    def f(r):
        return (a * r + b / r) / r

    dfdr = (-f(r_wall + 2 * h) + 8 * f(r_wall + h)
            - 8 * f(r_wall - h) + f(r_wall - 2 * h)) / (12 * h)
    return mu * r_wall * dfdr


def side_g_quadrature(rho_fin_surface, delta, length, outward):
    """G contribution of one cylindrical side channel by numeric shear.

    outward=True: the facing surface sits at rho + delta (lateral channel),
    otherwise at rho - delta (medial channel).
    """
    mu, omega = 1.0, 1.0   # G is the torque stripped of mu * omega
    r_far = rho_fin_surface + delta if outward else rho_fin_surface - delta
    coeffs = _couette_profile(rho_fin_surface, r_far, omega)
    tau = _wall_shear(coeffs, rho_fin_surface, mu, h=delta / 64.0)
    torque = tau * rho_fin_surface * (2.0 * math.pi * rho_fin_surface * length)
    return abs(torque) / (mu * omega)


def end_g_quadrature(r_in, r_out, delta, n_nodes=24):
    """G contribution of the fin-end annulus: planar Couette shear
    integrated with Gauss-Legendre quadrature."""
    mu, omega = 1.0, 1.0
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    r = 0.5 * (r_out - r_in) * nodes + 0.5 * (r_out + r_in)
    stress = mu * omega * r / delta
    integrand = stress * r * (2.0 * math.pi * r)
    torque = 0.5 * (r_out - r_in) * np.sum(weights * integrand)
    return abs(torque) / (mu * omega)


def fin_g_quadrature(geometry, fin_index):
    """Quadrature counterpart of damper.fin_g_factor with the same
    medial/lateral drop rules."""
    w = geometry.wall_width
    delta = geometry.channel_width
    rho = float(geometry.fin_radii()[fin_index])
    r_in = rho - w / 2.0
    r_out = rho + w / 2.0
    total = end_g_quadrature(r_in, r_out, delta)
    if fin_index > 0:
        total += side_g_quadrature(r_in, delta, geometry.fin_length,
                                   outward=False)
    if fin_index < geometry.n_fins - 1 or geometry.n_fins == 1:
        total += side_g_quadrature(r_out, delta, geometry.fin_length,
                                   outward=True)
    return total


def total_g_quadrature(geometry):
    return sum(fin_g_quadrature(geometry, i)
               for i in range(0, geometry.n_fins, 2))


def bar_inertia_discretized(mass, length, width, com_radius, n=4000):
    """Moment of inertia of a rectangular bar about the pivot by summing
    point masses over a fine 2D grid (independent of the analytic formula).

    The bar's long axis is radial with its center of mass at com_radius.
    """
    xs = (np.arange(n) + 0.5) / n * length - length / 2.0
    ys = (np.arange(n // 8) + 0.5) / (n // 8) * width - width / 2.0
    dm = mass / (xs.size * ys.size)
    xx, yy = np.meshgrid(xs + com_radius, ys, indexing="ij")
    return float(np.sum(dm * (xx ** 2 + yy ** 2)))


def fingertip_reach_vector_chain(palm_offset, link_lengths, joint_angles):
    """Horizontal reach of the fingertip by explicit 2D vector summation.

    Links start along +x; each joint rotates its distal chain by the joint
    angle (flexion curls toward -y). Returns the tip x coordinate.
    """
    pos = np.array([palm_offset, 0.0])
    heading = 0.0
    for length, angle in zip(link_lengths, joint_angles):
        heading += angle
        pos = pos + length * np.array([math.cos(heading), -math.sin(heading)])
    return float(pos[0])
