"""Elementary functions lifted to dual arguments.

Every lift is an instance of the same rule: for analytic f,
f(a + b*eps) = f(a) + b*f'(a)*eps. The Taylor series collapses to this
closed form exactly because eps**2 == 0, so nothing is truncated.
"""

from __future__ import annotations

import math
from typing import Callable

from .dual import Dual


def lift(f: Callable[[float], float], fprime: Callable[[float], float], x: Dual) -> Dual:
    """Apply a real function with known derivative to a dual number."""
    return Dual(f(x.re), x.du * fprime(x.re))


def sin(x: Dual) -> Dual:
    return Dual(math.sin(x.re), x.du * math.cos(x.re))


def cos(x: Dual) -> Dual:
    return Dual(math.cos(x.re), -x.du * math.sin(x.re))


def exp(x: Dual) -> Dual:
    e = math.exp(x.re)
    return Dual(e, x.du * e)


def log(x: Dual) -> Dual:
    if x.re <= 0.0:
        raise ValueError(f"log requires a positive real part, got {x.re}")
    return Dual(math.log(x.re), x.du / x.re)


def tanh(x: Dual) -> Dual:
    t = math.tanh(x.re)
    return Dual(t, x.du * (1.0 - t * t))


def sigmoid_real(a: float) -> float:
    """Logistic function, branched on sign so exp never overflows."""
    if a >= 0.0:
        return 1.0 / (1.0 + math.exp(-a))
    t = math.exp(a)
    return t / (1.0 + t)


def sigmoid(x: Dual) -> Dual:
    s = sigmoid_real(x.re)
    return Dual(s, x.du * s * (1.0 - s))
