"""Pure-Python pendulum integrator, used when the compiled core is absent.

Keep this function arithmetically identical to ``_speedups.pyx``: same
expressions, same order. The parity test compares the two bit-for-bit.
"""

import math


def simulate_arrays(theta0, omega0, n_samples, dt_sample, n_substeps,
                    inertia, mass_radius_sum, gravity, damping_b, mu_k, mu_d,
                    r_joint, rest_omega_eps, theta_out, omega_out):
    h = dt_sample / n_substeps
    th = theta0
    om = omega0
    sin = math.sin
    cos = math.cos
    isfinite = math.isfinite

    theta_out[0] = th
    omega_out[0] = om
    for k in range(1, n_samples):
        for s in range(n_substeps):
            s_th = sin(th)
            c_th = cos(th)
            normal = mass_radius_sum * om * om - mass_radius_sum * gravity * c_th
            if normal < 0.0:
                normal = 0.0
            tau_g = mass_radius_sum * gravity * s_th
            if om > rest_omega_eps:
                sgn = 1.0
            elif om < -rest_omega_eps:
                sgn = -1.0
            else:
                net = tau_g - damping_b * om
                if abs(net) <= mu_k * normal * r_joint:
                    om = 0.0
                    continue
                sgn = 0.0
            fric = normal * r_joint * sgn * (mu_k + mu_d * r_joint * om)
            acc = (tau_g - damping_b * om - fric) / inertia
            th = th + h * om
            om = om + h * acc
            if not (isfinite(th) and isfinite(om)):
                return (k - 1) * n_substeps + s
        theta_out[k] = th
        omega_out[k] = om
    return -1
