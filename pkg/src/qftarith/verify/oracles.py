"""Reference arithmetic on host integers.

Nothing here may import from the circuit code: these functions are the
independent side of every comparison.
"""
from __future__ import annotations


def wrap(value: int, width: int) -> int:
    """``value`` reduced modulo ``2**width`` and read as two's complement."""
    u = value & ((1 << width) - 1)
    return u - (1 << width) if u >> (width - 1) else u


def fits(value: int, width: int) -> bool:
    return -(1 << (width - 1)) <= value < (1 << (width - 1))


def add(a: int, b: int) -> int:
    return a + b


def sub(a: int, b: int) -> int:
    return a - b


def mod_add(a: int, b: int, width: int) -> int:
    return wrap(a + b, width)


def mod_sub(a: int, b: int, width: int) -> int:
    return wrap(a - b, width)


def negate(a: int, width: int) -> int:
    return wrap(-a, width)


def absolute(a: int, width: int) -> int:
    return wrap(abs(a), width)


def compare(a: int, b: int) -> str:
    if a > b:
        return "a>b"
    return "a<b" if a < b else "a=b"


def multiply(a: int, b: int, width: int) -> int:
    return wrap(a * b, width)


def trunc_div(a: int, b: int) -> int:
    """Quotient rounded toward zero."""
    if b == 0:
        raise ZeroDivisionError("b == 0")
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def power(a: int, b: int, width: int) -> int:
    if b < 0:
        raise ValueError("negative exponent")
    return wrap(a ** b, width)
