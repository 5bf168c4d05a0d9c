# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Euler-Maruyama ensemble kernel.

Must stay bit-for-bit identical to ``_sde_py.integrate_ensemble``: same noise
order (4 standard normals per step, drawn from each trajectory's own
BitGenerator) and the same left-to-right floating point expression order.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport fabs
from libc.stdlib cimport malloc, free
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal_fill

cnp.import_array()

cdef double DIVERGENCE_BOUND = 1e6


cdef enum:
    CHUNK = 256


cdef int _run_one(const double *a, const double *l, double dt, Py_ssize_t n_steps,
                  Py_ssize_t burn, Py_ssize_t half, bitgen_t *rng,
                  double *out) noexcept nogil:
    cdef double x[4]
    cdef double xn[4]
    cdef double acc[2][10]
    cdef double noise[4 * CHUNK]
    cdef double *z
    cdef Py_ssize_t k, i, j, c, h, s, m, n_chunk
    cdef double d, nz
    for i in range(4):
        x[i] = 0.0
    for h in range(2):
        for c in range(10):
            acc[h][c] = 0.0
    k = 0
    while k < n_steps:
        n_chunk = n_steps - k
        if n_chunk > CHUNK:
            n_chunk = CHUNK
        # same stream order as Generator.standard_normal((n, 4))
        random_standard_normal_fill(rng, 4 * n_chunk, noise)
        for m in range(n_chunk):
            z = noise + 4 * m
            for i in range(4):
                d = ((a[4 * i] * x[0] + a[4 * i + 1] * x[1]) + a[4 * i + 2] * x[2]) + a[4 * i + 3] * x[3]
                nz = ((l[4 * i] * z[0] + l[4 * i + 1] * z[1]) + l[4 * i + 2] * z[2]) + l[4 * i + 3] * z[3]
                xn[i] = (x[i] + dt * d) + nz
            for i in range(4):
                x[i] = xn[i]
                if not fabs(x[i]) <= DIVERGENCE_BOUND:
                    return 1
            if k >= burn:
                s = k - burn
                h = 0 if s < half else 1
                c = 0
                for i in range(4):
                    for j in range(i, 4):
                        acc[h][c] = acc[h][c] + x[i] * x[j]
                        c = c + 1
            k = k + 1
    for c in range(10):
        out[c] = acc[0][c] / half
        out[10 + c] = acc[1][c] / (n_steps - burn - half)
    return 0


def integrate_ensemble(double[:, ::1] A, double[:, ::1] L, double dt, Py_ssize_t n_steps,
                       Py_ssize_t burn, list bitgens, int threads=1):
    """Return (means, status): per-trajectory half-window means of x_i x_j.

    ``means`` has shape (n_traj, 2, 10) over upper-triangular (i <= j) pairs;
    ``status[t]`` is nonzero when trajectory ``t`` diverged.
    """
    cdef Py_ssize_t n_traj = len(bitgens)
    cdef Py_ssize_t half = (n_steps - burn) // 2
    cdef Py_ssize_t t
    out_arr = np.zeros((n_traj, 2, 10))
    status_arr = np.zeros(n_traj, dtype=np.intc)
    cdef double[:, :, ::1] out = out_arr
    cdef int[::1] status = status_arr
    cdef bitgen_t **rngs = <bitgen_t **> malloc(n_traj * sizeof(bitgen_t *))
    if rngs == NULL:
        raise MemoryError()
    try:
        for t in range(n_traj):
            rngs[t] = <bitgen_t *> PyCapsule_GetPointer(bitgens[t].capsule, "BitGenerator")
        for t in prange(n_traj, nogil=True, schedule="static", num_threads=threads):
            status[t] = _run_one(&A[0, 0], &L[0, 0], dt, n_steps, burn, half, rngs[t], &out[t, 0, 0])
    finally:
        free(rngs)
    return out_arr, status_arr
