# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled knot scan for the spline forward pass.

Same degeneracy thresholds as ``_kernels_py.mars_knot_scan``.
"""

import numpy as np

cdef double _REL_COLUMN = 1e-10
cdef double _REL_DET = 1e-12


def mars_knot_scan(double[:, ::1] Q, double[::1] resid, double[::1] parent,
                   double[::1] x, double[::1] knots):
    """RSS reduction per candidate knot for the reflected hinge pair."""
    cdef Py_ssize_t n = Q.shape[0], m = Q.shape[1], nk = knots.shape[0]
    cdef Py_ssize_t k, r, j
    cdef double c, d, uu, vv, raw_u, raw_v
    cdef double gaa, gbb, gab, ra, rb, pu, pv, det, red, red_a, red_b
    cdef bint usable_a, usable_b

    out_arr = np.zeros(nk, dtype=np.float64)
    u_arr = np.empty(n, dtype=np.float64)
    v_arr = np.empty(n, dtype=np.float64)
    qu_arr = np.empty(m, dtype=np.float64)
    qv_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef double[::1] qu = qu_arr
    cdef double[::1] qv = qv_arr

    for k in range(nk):
        c = knots[k]
        raw_u = 0.0
        raw_v = 0.0
        for r in range(n):
            d = x[r] - c
            uu = parent[r] * d if d > 0.0 else 0.0
            vv = -parent[r] * d if d < 0.0 else 0.0
            u[r] = uu
            v[r] = vv
            raw_u += uu * uu
            raw_v += vv * vv
        for j in range(m):
            gaa = 0.0
            gbb = 0.0
            for r in range(n):
                gaa += Q[r, j] * u[r]
                gbb += Q[r, j] * v[r]
            qu[j] = gaa
            qv[j] = gbb
        gaa = 0.0
        gbb = 0.0
        gab = 0.0
        ra = 0.0
        rb = 0.0
        for r in range(n):
            pu = u[r]
            pv = v[r]
            for j in range(m):
                pu -= Q[r, j] * qu[j]
                pv -= Q[r, j] * qv[j]
            gaa += pu * pu
            gbb += pv * pv
            gab += pu * pv
            ra += pu * resid[r]
            rb += pv * resid[r]

        usable_a = gaa > _REL_COLUMN * raw_u
        usable_b = gbb > _REL_COLUMN * raw_v
        red_a = ra * ra / gaa if usable_a else 0.0
        red_b = rb * rb / gbb if usable_b else 0.0
        det = gaa * gbb - gab * gab
        if usable_a and usable_b and det > _REL_DET * gaa * gbb:
            red = (ra * ra * gbb - 2.0 * ra * rb * gab + rb * rb * gaa) / det
        else:
            red = red_a if red_a > red_b else red_b
        out[k] = red if red > 0.0 else 0.0
    return out_arr
