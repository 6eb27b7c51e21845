"""
Bisection helper shared by the implicit-equation solvers.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import RootNotBracketedError

logger = logging.getLogger(__name__)

EPS = 1e-15
MAX_ITER = 200


def check_monotone(f: Callable[[float], float], lo: float, hi: float, samples: int = 33) -> int:
    """Return +1/-1 if f is strictly monotone on a sample grid of [lo, hi], else 0."""
    grid = np.linspace(lo, hi, samples)
    values = np.array([f(x) for x in grid])
    diffs = np.diff(values)
    if np.all(diffs > 0):
        return 1
    if np.all(diffs < 0):
        return -1
    return 0


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    name: str = "root",
    open_ends: bool = True,
    xtol: float = 1e-15,
    rtol: Optional[float] = None,
) -> float:
    """Bisection on [lo, hi], nudged off open endpoints by EPS.

    Raises RootNotBracketedError (with both endpoint values) when the
    bracket holds no sign change.
    """
    if open_ends:
        width = hi - lo
        lo = lo + EPS * max(1.0, abs(width))
        hi = hi - EPS * max(1.0, abs(width))
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)) or f_lo * f_hi > 0:
        raise RootNotBracketedError(name, lo, hi, f_lo, f_hi)
    if check_monotone(f, lo, hi) == 0:
        logger.debug("%s: objective not monotone on sample grid of [%g, %g]", name, lo, hi)
    kwargs = {'xtol': xtol, 'maxiter': MAX_ITER}
    if rtol is not None:
        kwargs['rtol'] = rtol
    return optimize.bisect(f, lo, hi, **kwargs)
