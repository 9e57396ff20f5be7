"""Vectorized safeguarded Newton iteration on bracketed monotone equations."""

from typing import Callable, Optional, Tuple

import numpy as np

from ..config import get_settings
from ..models.base import Component, ConvergenceError
from ..types.common import FloatArray
from .log import get_logger

logger = get_logger(__name__)

# f(x) -> (value, derivative), elementwise
ValueAndSlope = Callable[[FloatArray], Tuple[FloatArray, FloatArray]]

_EPS = float(np.finfo(np.float64).eps)


def safeguarded_newton(
    fn: ValueAndSlope,
    lo: FloatArray,
    hi: FloatArray,
    atol: FloatArray,
    max_iter: Optional[int] = None,
    start: Optional[FloatArray] = None,
) -> FloatArray:
    """Solve fn(x) = 0 elementwise for an increasing fn with fn(lo) <= 0 <= fn(hi).

    Each lane takes a Newton step when it lands strictly inside the current
    bracket and bisects otherwise. A lane stops once |fn(x)| <= atol or its
    bracket has collapsed to a few ulps.
    """
    lo = np.array(lo, dtype=np.float64, copy=True)
    hi = np.array(hi, dtype=np.float64, copy=True)
    atol = np.broadcast_to(np.asarray(atol, dtype=np.float64), lo.shape)
    x = np.array(hi if start is None else start, dtype=np.float64, copy=True)
    budget = get_settings().root_max_iter if max_iter is None else max_iter

    done = np.zeros(lo.shape, dtype=bool)
    bisections = 0
    for _ in range(budget):
        f, df = fn(x)
        collapsed = (hi - lo) <= 4.0 * _EPS * np.maximum(1.0, np.abs(x))
        done = done | (np.abs(f) <= atol) | collapsed
        if np.all(done):
            break
        active = ~done
        hi = np.where(active & (f > 0), x, hi)
        lo = np.where(active & (f <= 0), x, lo)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x - f / df
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        bisections += int(np.count_nonzero(active & ~inside))
        x = np.where(active, np.where(inside, newton, 0.5 * (lo + hi)), x)
    else:
        f, _ = fn(x)
        done = done | (np.abs(f) <= atol)
        if not np.all(done):
            worst = int(np.argmax(np.where(done, -np.inf, np.abs(f))))
            raise ConvergenceError(
                f"root solve did not converge in {budget} iterations at lane "
                f"{worst} (residual {float(np.ravel(f)[worst])!r})",
                Component.CONSTITUTIVE.value,
            )

    if bisections:
        logger.debug("root solve fell back to bisection %d times", bisections)
    return x
