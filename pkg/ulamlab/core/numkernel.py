"""
Exact and log-space arithmetic primitives.

Exact quantities are ``fractions.Fraction`` (aliased ``ExactRational``) or
plain Python integers. Quantities too large for a double are carried as
``LogReal``: a sign and the natural log of the magnitude.
"""

import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Union

from scipy.special import gammaln

from ..utils.config import get_config
from .errors import DomainError

logger = logging.getLogger(__name__)

ExactRational = Fraction

__all__ = [
    'ExactRational', 'LogReal', 'factorial', 'binomial', 'multinomial',
    'log_binomial', 'log_multinomial', 'log_sum_exp',
]


@dataclass(frozen=True)
class LogReal:
    """Signed real stored as (sign, ln|value|); logmag is -inf when sign is 0."""

    sign: int
    logmag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0 and self.logmag != -math.inf:
            object.__setattr__(self, 'logmag', -math.inf)

    @classmethod
    def zero(cls) -> 'LogReal':
        return cls(0, -math.inf)

    @classmethod
    def from_float(cls, value: float) -> 'LogReal':
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_rational(cls, value: Union[int, Fraction]) -> 'LogReal':
        value = Fraction(value)
        if value == 0:
            return cls.zero()
        sign = 1 if value > 0 else -1
        # math.log accepts arbitrarily large integers
        return cls(sign, math.log(abs(value.numerator)) - math.log(value.denominator))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.logmag)

    def __mul__(self, other: 'LogReal') -> 'LogReal':
        if self.sign == 0 or other.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.logmag + other.logmag)

    def __neg__(self) -> 'LogReal':
        return LogReal(-self.sign, self.logmag)

    def __add__(self, other: 'LogReal') -> 'LogReal':
        return log_sum_exp([self, other])

    def __str__(self) -> str:
        return f"{self.sign:+d}*exp({self.logmag:.15g})"


def log_sum_exp(values: Iterable[LogReal]) -> LogReal:
    """Signed log-sum-exp, reduced left to right after shifting by the max."""
    items = [v for v in values if v.sign != 0]
    if not items:
        return LogReal.zero()
    top = max(v.logmag for v in items)
    total = math.fsum(v.sign * math.exp(v.logmag - top) for v in items)
    if total == 0.0:
        return LogReal.zero()
    return LogReal(1 if total > 0 else -1, top + math.log(abs(total)))


class _FactorialTable:
    """Factorials memoized up to a cap; the table only ever grows."""

    def __init__(self):
        self._values: List[int] = [1]
        self._lock = threading.Lock()

    def get(self, n: int) -> int:
        if n < 0:
            raise DomainError("factorial of negative number")
        if n < len(self._values):
            return self._values[n]
        cap = int(get_config().get('factorial_cache'))
        if n > cap:
            return math.factorial(n)
        with self._lock:
            values = self._values
            while len(values) <= n:
                values.append(values[-1] * len(values))
        return self._values[n]


_factorials = _FactorialTable()


def factorial(n: int) -> int:
    return _factorials.get(n)


def binomial(n: int, k: int) -> int:
    """C(n, k), with C(n, k) = 0 outside 0 <= k <= n."""
    if n < 0:
        raise DomainError(f"binomial requires n >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


def multinomial(parts: Sequence[int]) -> int:
    """(sum parts)! / prod(part!)"""
    if any(p < 0 for p in parts):
        raise DomainError("multinomial parts must be nonnegative")
    denom = 1
    for p in parts:
        denom *= factorial(p)
    return factorial(sum(parts)) // denom


def log_binomial(n: float, k: float) -> float:
    if k < 0 or k > n:
        return -math.inf
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def log_multinomial(parts: Sequence[float]) -> float:
    return float(gammaln(sum(parts) + 1) - sum(gammaln(p + 1) for p in parts))
