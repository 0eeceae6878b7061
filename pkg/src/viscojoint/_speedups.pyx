# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loop of the pendulum integrator.

Must stay arithmetically identical to ``viscojoint._reference`` (same
operations in the same order); the backend parity test asserts exact
equality of the outputs.
"""

from libc.math cimport sin, cos, fabs, isfinite


def simulate_arrays(double theta0, double omega0, Py_ssize_t n_samples,
                    double dt_sample, int n_substeps,
                    double inertia, double mass_radius_sum, double gravity,
                    double damping_b, double mu_k, double mu_d,
                    double r_joint, double rest_omega_eps,
                    double[::1] theta_out, double[::1] omega_out):
    """Forward-Euler integration at dt_sample / n_substeps internal step.

    Fills theta_out/omega_out (length n_samples) and returns the global
    substep index at which a non-finite state first appeared, or -1 on a
    clean run.
    """
    cdef double h = dt_sample / n_substeps
    cdef double th = theta0
    cdef double om = omega0
    cdef double s_th, c_th, normal, tau_g, net, fric, acc, sgn
    cdef Py_ssize_t k
    cdef int s

    theta_out[0] = th
    omega_out[0] = om
    for k in range(1, n_samples):
        for s in range(n_substeps):
            s_th = sin(th)
            c_th = cos(th)
            # N = (sum m_i r_i) omega^2 + (sum m_i r_i) g cos(theta - pi),
            # clamped at zero: the running surface cannot pull.
            normal = mass_radius_sum * om * om - mass_radius_sum * gravity * c_th
            if normal < 0.0:
                normal = 0.0
            tau_g = mass_radius_sum * gravity * s_th
            if om > rest_omega_eps:
                sgn = 1.0
            elif om < -rest_omega_eps:
                sgn = -1.0
            else:
                # sign(0) = 0; clamp to rest while the Coulomb torque can
                # hold the net non-friction torque (kills Euler chatter).
                net = tau_g - damping_b * om
                if fabs(net) <= mu_k * normal * r_joint:
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
