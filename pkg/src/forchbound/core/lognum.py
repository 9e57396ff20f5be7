"""Log-space magnitudes for the astronomically large proof constants."""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Union

import numpy as np

Real = Union[int, float]


@dataclass(frozen=True, order=True)
class LogNumber:
    """A nonnegative number stored as its natural logarithm.

    Zero is log = -inf. Products, quotients and real powers are exact in
    log space; sums go through logaddexp.
    """

    log: float

    @classmethod
    def from_value(cls, value: Real) -> "LogNumber":
        if value < 0:
            raise ValueError(f"LogNumber cannot hold negative value {value}")
        if value == 0:
            return cls(-math.inf)
        return cls(math.log(value))

    @classmethod
    def coerce(cls, value: Union["LogNumber", Real]) -> "LogNumber":
        return value if isinstance(value, LogNumber) else cls.from_value(value)

    @property
    def value(self) -> float:
        """The plain float; +inf when it overflows."""
        try:
            return math.exp(self.log)
        except OverflowError:
            return math.inf

    @property
    def is_zero(self) -> bool:
        return self.log == -math.inf

    @property
    def log10(self) -> float:
        return self.log / math.log(10.0)

    def __mul__(self, other: Union["LogNumber", Real]) -> "LogNumber":
        o = LogNumber.coerce(other)
        if self.is_zero or o.is_zero:
            return LogNumber(-math.inf)
        return LogNumber(self.log + o.log)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["LogNumber", Real]) -> "LogNumber":
        o = LogNumber.coerce(other)
        if o.is_zero:
            raise ZeroDivisionError("LogNumber division by zero")
        if self.is_zero:
            return self
        return LogNumber(self.log - o.log)

    def __rtruediv__(self, other: Real) -> "LogNumber":
        return LogNumber.coerce(other) / self

    def __pow__(self, exponent: Real) -> "LogNumber":
        if exponent == 0:
            return LogNumber(0.0)
        if self.is_zero:
            if exponent < 0:
                raise ZeroDivisionError("zero raised to a negative power")
            return self
        return LogNumber(self.log * float(exponent))

    def __add__(self, other: Union["LogNumber", Real]) -> "LogNumber":
        o = LogNumber.coerce(other)
        return LogNumber(float(np.logaddexp(self.log, o.log)))

    __radd__ = __add__

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {"value": self.value, "log": self.log}

    def __repr__(self) -> str:
        if self.is_zero:
            return "LogNumber(0)"
        return f"LogNumber(~1e{self.log10:.6g})"


def log_max(values: Iterable[Union[LogNumber, Real]]) -> LogNumber:
    """Maximum of several magnitudes."""
    return max(LogNumber.coerce(v) for v in values)


ONE = LogNumber(0.0)
ZERO = LogNumber(-math.inf)
