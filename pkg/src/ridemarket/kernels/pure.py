"""Pure-Python kernel backend.

Reference implementations of the hot inner-loop primitives.  The compiled
backend in ``_core.pyx`` mirrors these functions operation for operation
(same C-double arithmetic, same libm calls) so that both backends produce
bit-identical results on the same platform.
"""

from math import exp, log

BACKEND_NAME = "pure"


def sigmoid(cu: float, beta: float) -> float:
    """Decreasing sigmoid mapping a cumulative-utility scalar into (0, 1)."""
    # math.exp raises where C exp saturates to +inf; match the C result
    try:
        e = exp(beta * cu)
    except OverflowError:
        return 0.0
    return 1.0 / (1.0 + e)


def inverse_sigmoid(u: float, beta: float) -> float:
    """Cumulative-utility scalar whose sigmoid image is ``u``."""
    return log(1.0 / u - 1.0) / beta


def step_cu(cu: float, alpha: float, delta: float, cu_max: float) -> float:
    """One learning step in cumulative-utility space, clamped to [-cu_max, cu_max]."""
    x = cu + alpha * delta
    if x > cu_max:
        return cu_max
    if x < -cu_max:
        return -cu_max
    return x


def logit(own: float, alternative: float, mu: float) -> float:
    """Binary logit probability of the ``own`` alternative at scale ``mu``."""
    try:
        e = exp(mu * (alternative - own))
    except OverflowError:
        return 0.0
    return 1.0 / (1.0 + e)


def nearest_of(meters_to_target, node_idx: list) -> int:
    """Position in ``node_idx`` whose node is closest to the target.

    ``meters_to_target`` is a per-node distance row; ties keep the first
    (lowest-position) candidate.
    """
    best_pos = 0
    best = meters_to_target[node_idx[0]]
    for pos in range(1, len(node_idx)):
        v = meters_to_target[node_idx[pos]]
        if v < best:
            best = v
            best_pos = pos
    return best_pos
