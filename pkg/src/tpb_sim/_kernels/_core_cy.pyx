# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled population step kernel.

Transliteration of ``_core_py.run_steps``; the two backends must produce
bit-identical trajectories. Uniforms are pulled straight from each
agent's PCG64 through the C interface, one per agent per step, matching
``numpy.random.Generator.random`` draw for draw.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp
from libc.stdlib cimport free, malloc

from numpy.random cimport bitgen_t

NAME = "cython"


def run_steps(
    double[::1] x0,
    double[::1] x,
    double[::1] z,
    double[::1] p,
    signed char[::1] y,
    long long[::1] h,
    double y_avg,
    double phi,
    double beta,
    double lam,
    bint beneficial,
    list streams,
    Py_ssize_t n_steps,
    double[::1] yavg_out,
    double[:, ::1] snap_x=None,
    double[:, ::1] snap_z=None,
    double[:, ::1] snap_p=None,
    signed char[:, ::1] snap_y=None,
    long long[:, ::1] snap_h=None,
):
    """Advance the population n_steps in place; returns the final rate."""
    cdef Py_ssize_t n = x0.shape[0]
    cdef Py_ssize_t i, k
    cdef bint record = snap_x is not None
    cdef double one_minus_phi = 1.0 - phi
    cdef double prev, x0i, xi, zi, pi, t, e, lo, hi2, u
    cdef long long hi_c, acted
    cdef signed char yi
    cdef bitgen_t **rngs = <bitgen_t **> malloc(n * sizeof(bitgen_t *))
    if rngs == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            rngs[i] = <bitgen_t *> PyCapsule_GetPointer(
                streams[i].capsule, "BitGenerator"
            )
        with nogil:
            for k in range(n_steps):
                prev = y_avg
                acted = 0
                for i in range(n):
                    x0i = x0[i]
                    hi_c = h[i]
                    if hi_c == 0:
                        xi = x0i
                    elif beneficial:
                        xi = 1.0 - (1.0 - x0i) / (1.0 + lam * <double> hi_c)
                    else:
                        xi = x0i / (1.0 + lam * <double> hi_c)
                    zi = phi * xi + one_minus_phi * prev
                    if xi <= prev:
                        lo = xi
                        hi2 = prev
                    else:
                        lo = prev
                        hi2 = xi
                    if zi < lo:
                        zi = lo
                    elif zi > hi2:
                        zi = hi2
                    t = beta * (2.0 * zi - 1.0)
                    if t >= 0.0:
                        pi = 1.0 / (1.0 + exp(-t))
                    else:
                        e = exp(t)
                        pi = e / (1.0 + e)
                    u = rngs[i].next_double(rngs[i].state)
                    yi = 1 if u < pi else 0
                    x[i] = xi
                    z[i] = zi
                    p[i] = pi
                    y[i] = yi
                    h[i] = hi_c + yi
                    acted = acted + yi
                y_avg = <double> acted / <double> n
                yavg_out[k] = y_avg
                if record:
                    for i in range(n):
                        snap_x[k, i] = x[i]
                        snap_z[k, i] = z[i]
                        snap_p[k, i] = p[i]
                        snap_y[k, i] = y[i]
                        snap_h[k, i] = h[i]
    finally:
        free(rngs)
    return y_avg
