"""Pure-Python population step kernel.

Reference implementation of the synchronous step sweep. The compiled
kernel in ``_core_cy`` is a line-for-line transliteration; the two must
produce bit-identical trajectories, so any change here has to be mirrored
there. ``math.exp`` is used on purpose: it calls the same libm ``exp`` as
the compiled kernel, which keeps the backends exactly equal.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"


def run_steps(
    x0,
    x,
    z,
    p,
    y,
    h,
    y_avg,
    phi,
    beta,
    lam,
    beneficial,
    streams,
    n_steps,
    yavg_out,
    snap_x=None,
    snap_z=None,
    snap_p=None,
    snap_y=None,
    snap_h=None,
):
    """Advance the population n_steps in place; returns the final rate.

    ``streams`` holds one PCG64 per agent; exactly one uniform per agent
    is consumed each step, in storage order. When the snap_* arrays are
    given (shape (n_steps, n)), row k receives the state after step k.
    """
    n = len(x0)
    # One vectorized fill per agent: same draws as n_steps scalar calls,
    # far fewer interpreter round-trips.
    u = np.empty((n, n_steps))
    for i, bg in enumerate(streams):
        u[i, :] = np.random.Generator(bg).random(n_steps)
    ul = u.tolist()
    x0l = x0.tolist()
    hl = [int(v) for v in h]
    xl = x.tolist()
    zl = z.tolist()
    pl = p.tolist()
    yl = [int(v) for v in y]
    one_minus_phi = 1.0 - phi
    record = snap_x is not None

    for k in range(n_steps):
        prev = y_avg
        acted = 0
        for i in range(n):
            x0i = x0l[i]
            hi = hl[i]
            if hi == 0:
                xi = x0i
            elif beneficial:
                xi = 1.0 - (1.0 - x0i) / (1.0 + lam * hi)
            else:
                xi = x0i / (1.0 + lam * hi)
            zi = phi * xi + one_minus_phi * prev
            if xi <= prev:
                lo, hi2 = xi, prev
            else:
                lo, hi2 = prev, xi
            if zi < lo:
                zi = lo
            elif zi > hi2:
                zi = hi2
            t = beta * (2.0 * zi - 1.0)
            if t >= 0.0:
                pi = 1.0 / (1.0 + math.exp(-t))
            else:
                e = math.exp(t)
                pi = e / (1.0 + e)
            yi = 1 if ul[i][k] < pi else 0
            xl[i] = xi
            zl[i] = zi
            pl[i] = pi
            yl[i] = yi
            hl[i] = hi + yi
            acted += yi
        y_avg = acted / n
        yavg_out[k] = y_avg
        if record:
            snap_x[k, :] = xl
            snap_z[k, :] = zl
            snap_p[k, :] = pl
            snap_y[k, :] = yl
            snap_h[k, :] = hl

    x[:] = xl
    z[:] = zl
    p[:] = pl
    y[:] = yl
    h[:] = hl
    return y_avg
