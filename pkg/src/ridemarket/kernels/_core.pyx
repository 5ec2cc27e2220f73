# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirrors ``kernels.pure`` operation for operation; both backends must stay
bit-identical on the same platform (same double arithmetic, same libm).
"""

from libc.math cimport exp, log

BACKEND_NAME = "compiled"


def sigmoid(double cu, double beta):
    """Decreasing sigmoid mapping a cumulative-utility scalar into (0, 1)."""
    return 1.0 / (1.0 + exp(beta * cu))


def inverse_sigmoid(double u, double beta):
    """Cumulative-utility scalar whose sigmoid image is ``u``."""
    return log(1.0 / u - 1.0) / beta


def step_cu(double cu, double alpha, double delta, double cu_max):
    """One learning step in cumulative-utility space, clamped to [-cu_max, cu_max]."""
    cdef double x = cu + alpha * delta
    if x > cu_max:
        return cu_max
    if x < -cu_max:
        return -cu_max
    return x


def logit(double own, double alternative, double mu):
    """Binary logit probability of the ``own`` alternative at scale ``mu``."""
    return 1.0 / (1.0 + exp(mu * (alternative - own)))


def nearest_of(const double[::1] meters_to_target, list node_idx):
    """Position in ``node_idx`` whose node is closest to the target (first wins)."""
    cdef Py_ssize_t best_pos = 0
    cdef Py_ssize_t n = len(node_idx)
    cdef Py_ssize_t pos
    cdef double best = meters_to_target[<Py_ssize_t> node_idx[0]]
    cdef double v
    for pos in range(1, n):
        v = meters_to_target[<Py_ssize_t> node_idx[pos]]
        if v < best:
            best = v
            best_pos = pos
    return best_pos
