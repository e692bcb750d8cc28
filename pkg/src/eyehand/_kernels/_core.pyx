# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in _fallback.py.

Operation order matches the numpy fallback exactly so that both backends
return bit-identical results; see tests/test_kernels.py for the parity
suite.
"""


def grid_argmax(double a, double b, const double[::1] sin_tab, const double[::1] cos_tab):
    cdef Py_ssize_t n = sin_tab.shape[0]
    cdef Py_ssize_t k, best_k = 0
    cdef double value
    cdef double best = a * sin_tab[0] + b * cos_tab[0]
    for k in range(1, n):
        value = a * sin_tab[k] + b * cos_tab[k]
        if value > best:
            best = value
            best_k = k
    return best_k


def hausdorff_directed_sq(const double[:, ::1] points_a, const double[:, ::1] points_b):
    cdef Py_ssize_t na = points_a.shape[0]
    cdef Py_ssize_t nb = points_b.shape[0]
    cdef Py_ssize_t i, j
    cdef double dx, dy, dz, sq, best_min, worst = 0.0
    cdef bint first = 1
    for i in range(na):
        best_min = -1.0
        for j in range(nb):
            dx = points_a[i, 0] - points_b[j, 0]
            dy = points_a[i, 1] - points_b[j, 1]
            dz = points_a[i, 2] - points_b[j, 2]
            sq = dx * dx + dy * dy + dz * dz
            if best_min < 0.0 or sq < best_min:
                best_min = sq
                # This point can no longer raise the running maximum;
                # skipping ahead does not change the result.
                if not first and best_min < worst:
                    break
        if first or best_min > worst:
            worst = best_min
            first = 0
    return worst
