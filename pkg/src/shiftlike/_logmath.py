"""Log-domain helpers shared by the measure, weight and criterion code."""

import math

import numpy as np
from scipy.special import logsumexp

LOG_ZERO = float("-inf")


def log_sum(values):
    """Log of a sum of exponentials; empty input gives ``-inf``."""
    values = list(values)
    if not values:
        return LOG_ZERO
    return float(logsumexp(values))


def compensated_cumsum(values):
    """Running sums with Neumaier compensation.

    Returns an array ``s`` with ``s[i] = values[0] + ... + values[i]``.
    Plain ``np.cumsum`` drifts by O(n eps) on long weight tables; this keeps
    the error at O(eps) per prefix.
    """
    out = np.empty(len(values), dtype=float)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values):
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = total + comp
    return out


def log_expm1_over(a, length):
    """``log((exp(a * length) - 1) / a)`` for ``length > 0``, stable for any ``a``.

    This is the log of the integral of ``exp(a * x)`` over ``[0, length]``.
    """
    if a == 0.0:
        return math.log(length)
    z = a * length
    if z > 0:
        # exp(z) - 1 = exp(z) * (1 - exp(-z))
        return z + math.log(-math.expm1(-z)) - math.log(a)
    return math.log(math.expm1(z) / a)


def lsq_slope(y):
    """Least-squares slope of ``y`` against ``0, 1, ..., len(y) - 1``.

    ``y`` is re-centred on its first element so that a constant sequence
    yields exactly 0.
    """
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        return 0.0
    yc = y - y[0]
    x = np.arange(y.size, dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, yc - yc.mean()) / np.dot(xc, xc))
