"""Signed log-magnitude reals and a compensated signed sum.

Products of eigenvalue ratios span hundreds of decades and alternate in sign, so
they are carried as (sign, ln|value|). Sums go back to the linear domain only
after the largest magnitude has been factored out; the scaled terms are then
added with ``math.fsum`` (exactly rounded), and the number of decimal digits
lost to cancellation is reported alongside the result.
"""

import math
from dataclasses import dataclass

NEG_INF = float("-inf")


@dataclass(frozen=True)
class SignedLogReal:
    sign: int
    log_magnitude: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if (self.sign == 0) != (self.log_magnitude == NEG_INF):
            raise ValueError("sign 0 and log_magnitude -inf must go together")

    @classmethod
    def from_float(cls, x):
        x = float(x)
        if x == 0.0:
            return ZERO
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, sign, logmag):
        if sign == 0 or logmag == NEG_INF:
            return ZERO
        return cls(int(sign), float(logmag))

    def __float__(self):
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other):
        if not isinstance(other, SignedLogReal):
            other = SignedLogReal.from_float(other)
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return SignedLogReal(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, SignedLogReal):
            other = SignedLogReal.from_float(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a signed-log zero")
        if self.sign == 0:
            return ZERO
        return SignedLogReal(self.sign * other.sign, self.log_magnitude - other.log_magnitude)

    def __neg__(self):
        return SignedLogReal(-self.sign, self.log_magnitude)

    def __abs__(self):
        return SignedLogReal(abs(self.sign), self.log_magnitude)

    def log10(self):
        return self.log_magnitude / math.log(10.0)

    def __repr__(self):
        if self.sign == 0:
            return "SignedLogReal(0)"
        return f"SignedLogReal({'-' if self.sign < 0 else '+'}exp({self.log_magnitude:.17g}))"


ZERO = SignedLogReal(0, NEG_INF)
ONE = SignedLogReal(1, 0.0)


def signed_sum(signs, logmags):
    """Sum of sign_i * exp(logmag_i).

    Returns ``(SignedLogReal, digits_lost)`` where digits_lost is
    log10(max |term| / |sum|), or ``inf`` when the sum cancels exactly.
    """
    pairs = [(int(s), float(m)) for s, m in zip(signs, logmags) if s != 0 and m != NEG_INF]
    if not pairs:
        return ZERO, 0.0
    top = max(m for _, m in pairs)
    total = math.fsum(s * math.exp(m - top) for s, m in pairs)
    if total == 0.0:
        return ZERO, math.inf
    lost = max(0.0, -math.log10(abs(total)))
    return SignedLogReal(1 if total > 0 else -1, top + math.log(abs(total))), lost


def sum_values(values):
    """Compensated sum of SignedLogReal values."""
    values = list(values)
    return signed_sum([v.sign for v in values], [v.log_magnitude for v in values])


# -- split floats -------------------------------------------------------
# A value m * 2**e with float mantissa m and integer exponent e. Rescaling is
# exact (ldexp), so products of many factors keep full double accuracy where
# a round trip through log/exp would cost |ln value| ulps.

_LN2 = math.log(2.0)


def split(x):
    m, e = math.frexp(float(x))
    return m, e


def split_int(n):
    """Exact-to-rounding split of a Python int of any size."""
    n = int(n)
    if n == 0:
        return 0.0, 0
    shift = max(0, abs(n).bit_length() - 60)
    m, e = math.frexp(float(n >> shift) if n > 0 else -float((-n) >> shift))
    return m, e + shift


def split_mul(a, b):
    m, e = math.frexp(a[0] * b[0])
    return m, e + a[1] + b[1]


def split_pow(a, n):
    """(m * 2**e)**n for integer n >= 0 by repeated squaring with renormalisation."""
    result = (0.5, 1)
    base = a
    while n:
        if n & 1:
            result = split_mul(result, base)
        base = split_mul(base, base)
        n >>= 1
    return result


def split_exp(t):
    """exp(t) as a split float, valid far beyond the double exponent range."""
    if abs(t) < 700.0:
        return split(math.exp(t))
    q = math.floor(t / _LN2)
    m, e = math.frexp(math.exp(t - q * _LN2))
    return m, e + q


def split_sum(mants, exps):
    """Compensated sum of m_i * 2**e_i -> (mantissa, exponent, digits_lost)."""
    pairs = [(m, e) for m, e in zip(mants, exps) if m != 0.0]
    if not pairs:
        return 0.0, 0, 0.0
    top = max(e for _, e in pairs)
    big = max(abs(math.ldexp(m, e - top)) for m, e in pairs)
    total = math.fsum(math.ldexp(m, e - top) for m, e in pairs)
    if total == 0.0:
        return 0.0, 0, math.inf
    lost = max(0.0, math.log10(big / abs(total)))
    m, e = math.frexp(total)
    return m, e + top, lost


def split_to_float(m, e):
    return math.ldexp(m, e)


def split_to_slr(m, e):
    if m == 0.0:
        return ZERO
    return SignedLogReal(1 if m > 0 else -1, math.log(abs(m)) + e * _LN2)
