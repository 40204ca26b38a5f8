import math
import numbers


def check_positive(value, name, allow_zero=False):
    if not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"{name} must be {bound}, got {value!r}")
    return float(value)


def check_fraction(value, name, closed_upper=False):
    value = check_positive(value, name)
    if value > 1 or (value == 1 and not closed_upper):
        bound = "(0, 1]" if closed_upper else "(0, 1)"
        raise ValueError(f"{name} must lie in {bound}, got {value!r}")
    return value


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)
