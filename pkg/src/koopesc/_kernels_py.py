"""Pure-Python hot loops: trajectory simulation, static sweep, closed loop.

TWIN CONTRACT: _kernels.pyx is a line-for-line transcription of this module.
The two backends must produce bit-identical outputs, so every arithmetic
expression here is written in the exact form the compiled kernel uses (same
association order, explicit products instead of powers, libm transcendentals
only).  Edit both files together; tests/test_backends.py enforces equality.

All functions take flat scalar parameters plus preallocated float64 output
arrays and return (status, n, x, y, t): STATUS_OK or STATUS_DIVERGED, the
count of samples written, and the last finite state.
"""

from math import exp, isfinite, sin, sqrt

STATUS_OK = 0
STATUS_DIVERGED = 1


def simulate_trajectory(
    x0, y0, theta, n_steps, dt,
    eps0_base, drift_amp, drift_freq, force_amp, force_freq,
    mu, x_offset, theta_star, div_limit,
    enabled, on_x, on_y, ia1, ia2, iw1, iw2,
    xt_out, yt_out, xm_out, ym_out,
):
    """Fixed-theta trajectory; writes n_steps+1 true and measured samples."""
    x = x0
    y = y0
    t = 0.0
    dth = theta - theta_star
    n = 0
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
            or abs(x2) > div_limit
            or abs(y2) > div_limit
        ):
            return STATUS_DIVERGED, n, x, y, t
        x = x2
        y = y2
        t = t + dt
    return STATUS_OK, n, x, y, t


def static_sweep(
    x0, y0, theta_from, slope, n_steps, log_start_step, dt,
    eps0_base, drift_amp, drift_freq, force_amp, force_freq,
    mu, x_offset, theta_star, div_limit,
    enabled, on_x, on_y, ia1, ia2, iw1, iw2,
    n_sel, vp_re, vp_im,
    w_hp, w_lp,
    th_out, r_out,
):
    """Theta ramp with the cost pipeline running; records (theta, r) rows.

    n_sel == 0 selects the raw cost; otherwise vp_re/vp_im hold the real and
    imaginary parts of the (n_sel, 10) dominant-subspace projector.
    """
    vr = vp_re.tolist()
    vi = vp_im.tolist()
    a_hp = exp(-w_hp * dt)
    a_lp = exp(-w_lp * dt)
    x = x0
    y = y0
    t = 0.0
    y_hp_prev = 0.0
    y_lp_prev = 0.0
    y_prev = 0.0
    n = 0
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
            or abs(x2) > div_limit
            or abs(y2) > div_limit
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
            z = (1.0, xm, ym, mxx, mxy, myy, mxx * xm, mxx * ym, xm * myy, myy * ym)
            y_out = 0.0
            for j in range(n_sel):
                rr = vr[j]
                ri = vi[j]
                cr = 0.0
                ci = 0.0
                for p in range(10):
                    zp = z[p]
                    cr = cr + rr[p] * zp
                    ci = ci + ri[p] * zp
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
    x0, y0, n_steps, log_start_step, dt,
    eps0_base, drift_amp, drift_freq, force_amp, force_freq,
    mu, x_offset, theta_star, div_limit,
    enabled, on_x, on_y, ia1, ia2, iw1, iw2,
    n_sel, vp_re, vp_im,
    w_hp, w_lp,
    step_k, dwell_limit, tau_f, theta_min, theta_max, theta_init, eps_init,
    t_out, xt_out, yt_out, xm_out, ym_out, yout_out, r_out, th_out, eps_out,
):
    """Full feedback loop: plant -> measure -> cost -> detector -> relay."""
    vr = vp_re.tolist()
    vi = vp_im.tolist()
    a_hp = exp(-w_hp * dt)
    a_lp = exp(-w_lp * dt)
    alpha = exp(-dt / tau_f)
    x = x0
    y = y0
    t = 0.0
    y_hp_prev = 0.0
    y_lp_prev = 0.0
    y_prev = 0.0
    theta = theta_init
    epsilon = eps_init
    hp_prev = 0.0
    r_prev = 0.0
    dwell = dwell_limit
    n = 0
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
            or abs(x2) > div_limit
            or abs(y2) > div_limit
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
            z = (1.0, xm, ym, mxx, mxy, myy, mxx * xm, mxx * ym, xm * myy, myy * ym)
            y_out = 0.0
            for j in range(n_sel):
                rr = vr[j]
                ri = vi[j]
                cr = 0.0
                ci = 0.0
                for p in range(10):
                    zp = z[p]
                    cr = cr + rr[p] * zp
                    ci = ci + ri[p] * zp
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
