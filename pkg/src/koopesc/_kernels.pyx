# cython: boundscheck=False, wraparound=False, initializedcheck=False
# cython: cdivision=True, language_level=3
"""Compiled hot loops; line-for-line transcription of _kernels_py.py.

TWIN CONTRACT: every arithmetic expression matches _kernels_py.py exactly
(same association order, libm transcendentals, no fused multiply-add: the
build passes -ffp-contract=off), so both backends produce bit-identical
outputs.  Edit both files together; tests/test_backends.py enforces equality.
"""

from libc.math cimport exp, fabs, isfinite, sin, sqrt

STATUS_OK = 0
STATUS_DIVERGED = 1


def simulate_trajectory(
    double x0, double y0, double theta, Py_ssize_t n_steps, double dt,
    double eps0_base, double drift_amp, double drift_freq, double force_amp,
    double force_freq, double mu, double x_offset, double theta_star,
    double div_limit,
    int enabled, int on_x, int on_y,
    double ia1, double ia2, double iw1, double iw2,
    double[::1] xt_out, double[::1] yt_out,
    double[::1] xm_out, double[::1] ym_out,
):
    cdef double x = x0
    cdef double y = y0
    cdef double t = 0.0
    cdef double dth = theta - theta_star
    cdef double i_t, xm, ym
    cdef double eps_t, f_t, xr
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y
    cdef double ax, ay, at, x2, y2
    cdef Py_ssize_t k, n = 0
    for k in range(n_steps + 1):
        if enabled:
            i_t = ia1 * sin(iw1 * t) + ia2 * sin(iw2 * t)
        else:
            i_t = 0.0
        xm = x + i_t if on_x else x
        ym = y + i_t if on_y else y
        xt_out[k] = x
        yt_out[k] = y
        xm_out[k] = xm
        ym_out[k] = ym
        n = k + 1
        if k == n_steps:
            break
        eps_t = eps0_base + drift_amp * sin(drift_freq * t)
        f_t = force_amp * sin(force_freq * t)
        xr = x - x_offset
        k1x = y
        k1y = -eps_t * (xr * xr - 1.0 - dth * dth) * y - mu * mu * xr + f_t
        ax = x + 0.5 * dt * k1x
        ay = y + 0.5 * dt * k1y
        at = t + 0.5 * dt
        eps_t = eps0_base + drift_amp * sin(drift_freq * at)
        f_t = force_amp * sin(force_freq * at)
        xr = ax - x_offset
        k2x = ay
        k2y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        ax = x + 0.5 * dt * k2x
        ay = y + 0.5 * dt * k2y
        xr = ax - x_offset
        k3x = ay
        k3y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        ax = x + dt * k3x
        ay = y + dt * k3y
        at = t + dt
        eps_t = eps0_base + drift_amp * sin(drift_freq * at)
        f_t = force_amp * sin(force_freq * at)
        xr = ax - x_offset
        k4x = ay
        k4y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        x2 = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y2 = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if (
            not (isfinite(x2) and isfinite(y2))
            or fabs(x2) > div_limit
            or fabs(y2) > div_limit
        ):
            return STATUS_DIVERGED, n, x, y, t
        x = x2
        y = y2
        t = t + dt
    return STATUS_OK, n, x, y, t


def static_sweep(
    double x0, double y0, double theta_from, double slope,
    Py_ssize_t n_steps, Py_ssize_t log_start_step, double dt,
    double eps0_base, double drift_amp, double drift_freq, double force_amp,
    double force_freq, double mu, double x_offset, double theta_star,
    double div_limit,
    int enabled, int on_x, int on_y,
    double ia1, double ia2, double iw1, double iw2,
    Py_ssize_t n_sel, double[:, ::1] vp_re, double[:, ::1] vp_im,
    double w_hp, double w_lp,
    double[::1] th_out, double[::1] r_out,
):
    cdef double a_hp = exp(-w_hp * dt)
    cdef double a_lp = exp(-w_lp * dt)
    cdef double x = x0
    cdef double y = y0
    cdef double t = 0.0
    cdef double y_hp_prev = 0.0
    cdef double y_lp_prev = 0.0
    cdef double y_prev = 0.0
    cdef double theta, dth, i_t, xm, ym, y_out
    cdef double mxx, mxy, myy, cr, ci, zp
    cdef double y_hp, y_lp, r
    cdef double eps_t, f_t, xr
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y
    cdef double ax, ay, at, x2, y2
    cdef double z[10]
    cdef Py_ssize_t k, j, p, n = 0
    for k in range(1, n_steps + 1):
        theta = theta_from + slope * t
        dth = theta - theta_star
        eps_t = eps0_base + drift_amp * sin(drift_freq * t)
        f_t = force_amp * sin(force_freq * t)
        xr = x - x_offset
        k1x = y
        k1y = -eps_t * (xr * xr - 1.0 - dth * dth) * y - mu * mu * xr + f_t
        ax = x + 0.5 * dt * k1x
        ay = y + 0.5 * dt * k1y
        at = t + 0.5 * dt
        eps_t = eps0_base + drift_amp * sin(drift_freq * at)
        f_t = force_amp * sin(force_freq * at)
        xr = ax - x_offset
        k2x = ay
        k2y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        ax = x + 0.5 * dt * k2x
        ay = y + 0.5 * dt * k2y
        xr = ax - x_offset
        k3x = ay
        k3y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        ax = x + dt * k3x
        ay = y + dt * k3y
        at = t + dt
        eps_t = eps0_base + drift_amp * sin(drift_freq * at)
        f_t = force_amp * sin(force_freq * at)
        xr = ax - x_offset
        k4x = ay
        k4y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        x2 = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y2 = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if (
            not (isfinite(x2) and isfinite(y2))
            or fabs(x2) > div_limit
            or fabs(y2) > div_limit
        ):
            return STATUS_DIVERGED, n, x, y, t
        x = x2
        y = y2
        t = t + dt
        if enabled:
            i_t = ia1 * sin(iw1 * t) + ia2 * sin(iw2 * t)
        else:
            i_t = 0.0
        xm = x + i_t if on_x else x
        ym = y + i_t if on_y else y
        if n_sel == 0:
            y_out = sqrt(xm * xm + ym * ym) / sqrt(2.0)
        else:
            mxx = xm * xm
            mxy = xm * ym
            myy = ym * ym
            z[0] = 1.0
            z[1] = xm
            z[2] = ym
            z[3] = mxx
            z[4] = mxy
            z[5] = myy
            z[6] = mxx * xm
            z[7] = mxx * ym
            z[8] = xm * myy
            z[9] = myy * ym
            y_out = 0.0
            for j in range(n_sel):
                cr = 0.0
                ci = 0.0
                for p in range(10):
                    zp = z[p]
                    cr = cr + vp_re[j, p] * zp
                    ci = ci + vp_im[j, p] * zp
                y_out = y_out + (cr * cr + ci * ci)
        if k == 1:
            y_prev = y_out
        y_hp = a_hp * y_hp_prev + (1.0 - a_hp) * (y_out - y_prev)
        y_lp = a_lp * y_lp_prev + (1.0 - a_lp) * (y_hp * y_hp)
        r = y_lp if y_lp > 0.0 else 0.0
        y_hp_prev = y_hp
        y_lp_prev = y_lp
        y_prev = y_out
        if k >= log_start_step:
            th_out[n] = theta
            r_out[n] = r
            n = n + 1
    return STATUS_OK, n, x, y, t


def closed_loop(
    double x0, double y0, Py_ssize_t n_steps, Py_ssize_t log_start_step, double dt,
    double eps0_base, double drift_amp, double drift_freq, double force_amp,
    double force_freq, double mu, double x_offset, double theta_star,
    double div_limit,
    int enabled, int on_x, int on_y,
    double ia1, double ia2, double iw1, double iw2,
    Py_ssize_t n_sel, double[:, ::1] vp_re, double[:, ::1] vp_im,
    double w_hp, double w_lp,
    double step_k, double dwell_limit, double tau_f,
    double theta_min, double theta_max, double theta_init, double eps_init,
    double[::1] t_out, double[::1] xt_out, double[::1] yt_out,
    double[::1] xm_out, double[::1] ym_out, double[::1] yout_out,
    double[::1] r_out, double[::1] th_out, double[::1] eps_out,
):
    cdef double a_hp = exp(-w_hp * dt)
    cdef double a_lp = exp(-w_lp * dt)
    cdef double alpha = exp(-dt / tau_f)
    cdef double x = x0
    cdef double y = y0
    cdef double t = 0.0
    cdef double y_hp_prev = 0.0
    cdef double y_lp_prev = 0.0
    cdef double y_prev = 0.0
    cdef double theta = theta_init
    cdef double epsilon = eps_init
    cdef double hp_prev = 0.0
    cdef double r_prev = 0.0
    cdef double dwell = dwell_limit
    cdef double dth, i_t, xm, ym, y_out
    cdef double mxx, mxy, myy, cr, ci, zp
    cdef double y_hp, y_lp, r, hp
    cdef double eps_t, f_t, xr
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y
    cdef double ax, ay, at, x2, y2
    cdef double z[10]
    cdef Py_ssize_t k, j, p, n = 0
    for k in range(1, n_steps + 1):
        dth = theta - theta_star
        eps_t = eps0_base + drift_amp * sin(drift_freq * t)
        f_t = force_amp * sin(force_freq * t)
        xr = x - x_offset
        k1x = y
        k1y = -eps_t * (xr * xr - 1.0 - dth * dth) * y - mu * mu * xr + f_t
        ax = x + 0.5 * dt * k1x
        ay = y + 0.5 * dt * k1y
        at = t + 0.5 * dt
        eps_t = eps0_base + drift_amp * sin(drift_freq * at)
        f_t = force_amp * sin(force_freq * at)
        xr = ax - x_offset
        k2x = ay
        k2y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        ax = x + 0.5 * dt * k2x
        ay = y + 0.5 * dt * k2y
        xr = ax - x_offset
        k3x = ay
        k3y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        ax = x + dt * k3x
        ay = y + dt * k3y
        at = t + dt
        eps_t = eps0_base + drift_amp * sin(drift_freq * at)
        f_t = force_amp * sin(force_freq * at)
        xr = ax - x_offset
        k4x = ay
        k4y = -eps_t * (xr * xr - 1.0 - dth * dth) * ay - mu * mu * xr + f_t
        x2 = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y2 = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        if (
            not (isfinite(x2) and isfinite(y2))
            or fabs(x2) > div_limit
            or fabs(y2) > div_limit
        ):
            return STATUS_DIVERGED, n, x, y, t
        x = x2
        y = y2
        t = t + dt
        if enabled:
            i_t = ia1 * sin(iw1 * t) + ia2 * sin(iw2 * t)
        else:
            i_t = 0.0
        xm = x + i_t if on_x else x
        ym = y + i_t if on_y else y
        if n_sel == 0:
            y_out = sqrt(xm * xm + ym * ym) / sqrt(2.0)
        else:
            mxx = xm * xm
            mxy = xm * ym
            myy = ym * ym
            z[0] = 1.0
            z[1] = xm
            z[2] = ym
            z[3] = mxx
            z[4] = mxy
            z[5] = myy
            z[6] = mxx * xm
            z[7] = mxx * ym
            z[8] = xm * myy
            z[9] = myy * ym
            y_out = 0.0
            for j in range(n_sel):
                cr = 0.0
                ci = 0.0
                for p in range(10):
                    zp = z[p]
                    cr = cr + vp_re[j, p] * zp
                    ci = ci + vp_im[j, p] * zp
                y_out = y_out + (cr * cr + ci * ci)
        if k == 1:
            y_prev = y_out
        y_hp = a_hp * y_hp_prev + (1.0 - a_hp) * (y_out - y_prev)
        y_lp = a_lp * y_lp_prev + (1.0 - a_lp) * (y_hp * y_hp)
        r = y_lp if y_lp > 0.0 else 0.0
        y_hp_prev = y_hp
        y_lp_prev = y_lp
        y_prev = y_out
        if k == 1:
            r_prev = r
        hp = alpha * hp_prev + (1.0 - alpha) * (r - r_prev)
        if hp > 0.0 and dwell >= dwell_limit:
            epsilon = -epsilon
            dwell = 0.0
        else:
            dwell = dwell + dt
        theta = theta - step_k * epsilon
        if theta < theta_min:
            theta = theta_min
        elif theta > theta_max:
            theta = theta_max
        hp_prev = hp
        r_prev = r
        if k >= log_start_step:
            t_out[n] = t
            xt_out[n] = x
            yt_out[n] = y
            xm_out[n] = xm
            ym_out[n] = ym
            yout_out[n] = y_out
            r_out[n] = r
            th_out[n] = theta
            eps_out[n] = epsilon
            n = n + 1
    return STATUS_OK, n, x, y, t
