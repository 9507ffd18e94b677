"""Special-function kernel: gamma helpers, terminating 2F1 sums, Kummer 1F1,
skewed-operator coefficients and the gamma-ratio tables feeding the series
path.

Everything here is pure and deterministic: sums run in fixed ascending index
order and tables are plain immutable arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NumericError

# Largest magnitude a partial sum may reach before the scaled Kummer loop
# renormalizes (keeps exp(|x|)-sized intermediates inside double range).
_KUMMER_RESCALE = 1e250
_KUMMER_MAX_TERMS = 20000
_TRANSFORM_CUT = 700.0


@dataclass(frozen=True)
class SignedLogGamma:
    """log|Gamma(x)| together with the sign of Gamma(x)."""

    log_abs: float
    sign: int

    def value(self) -> float:
        return self.sign * math.exp(self.log_abs)


@dataclass(frozen=True)
class RieszFellerCoeffs:
    """Coefficients weighting the left/right singular integrals of the
    skewed operator of order alpha and skewness gamma."""

    c1: float
    c2: float
    alpha: float
    gamma: float


class RatioKind(Enum):
    V1 = "v1"
    V2 = "v2"


@dataclass(frozen=True)
class RatioTable:
    """values[p] = Gamma(a + p) / Gamma(b + p) with (a, b) fixed by the kind,
    built by the recursive product so consecutive entries satisfy the exact
    one-step ratio."""

    alpha: float
    kind: RatioKind
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


def _check_not_pole(x: float) -> None:
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma pole at x = {x}")


def gamma(x: float) -> float:
    """Gamma(x) for real non-pole x."""
    _check_not_pole(x)
    return math.gamma(x)


def signed_log_gamma(x: float) -> SignedLogGamma:
    """Decompose Gamma(x) as sign * exp(log_abs); rejects poles."""
    _check_not_pole(x)
    log_abs = math.lgamma(x)
    if x > 0.0:
        sign = 1
    else:
        # Gamma alternates sign on the negative axis: negative on (-1, 0),
        # positive on (-2, -1), and so on.
        sign = -1 if math.floor(x) % 2 else 1
    return SignedLogGamma(log_abs=log_abs, sign=sign)


def c_alpha(alpha: float) -> float:
    """Normalization constant of the symmetric fractional operator,
    alpha * 2^(alpha-1) * Gamma(1/2 + alpha/2) / (sqrt(pi) * Gamma(1 - alpha/2))."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"order must lie in (0, 2), got {alpha}")
    return (
        alpha
        * 2.0 ** (alpha - 1.0)
        * math.gamma(0.5 + 0.5 * alpha)
        / (math.sqrt(math.pi) * math.gamma(1.0 - 0.5 * alpha))
    )


def check_skewness(alpha: float, gamma_skew: float) -> None:
    """Validate alpha in (0,2) and |gamma| <= min(alpha, 2 - alpha)."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"order must lie in (0, 2), got {alpha}")
    bound = min(alpha, 2.0 - alpha)
    if abs(gamma_skew) > bound + 1e-15:
        raise ValueError(
            f"skewness |{gamma_skew}| exceeds min(alpha, 2-alpha) = {bound}"
        )


def rf_coeffs(alpha: float, gamma_skew: float) -> RieszFellerCoeffs:
    """Left/right weights c1 = Gamma(1+a) sin((a-g) pi/2) / pi and
    c2 = Gamma(1+a) sin((a+g) pi/2) / pi."""
    check_skewness(alpha, gamma_skew)
    g1a = math.gamma(1.0 + alpha) / math.pi
    c1 = g1a * math.sin((alpha - gamma_skew) * math.pi / 2.0)
    c2 = g1a * math.sin((alpha + gamma_skew) * math.pi / 2.0)
    return RieszFellerCoeffs(c1=c1, c2=c2, alpha=alpha, gamma=gamma_skew)


def hyp2f1_terminating(m: int, alpha: float, z: complex, c: float = 2.0) -> complex:
    """Terminating Gauss sum 2F1(-m, 1 + alpha; c; z), m >= 0.

    Summed in ascending n with the term recurrence, so results are exactly
    reproducible and conjugate-symmetric in z.
    """
    if m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    total = complex(1.0, 0.0)
    term = complex(1.0, 0.0)
    for n in range(m):
        term *= (-m + n) * (1.0 + alpha + n) / ((c + n) * (n + 1.0)) * z
        total += term
    return total


def _kummer_series(a: float, b: float, x: float, max_terms: int) -> float:
    total = 1.0
    term = 1.0
    small = 0
    for n in range(max_terms):
        term *= (a + n) / ((b + n) * (n + 1.0)) * x
        total += term
        if abs(term) <= 1e-17 * abs(total):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise NumericError(
        f"Kummer series did not converge within {max_terms} terms "
        f"(a={a}, b={b}, x={x})"
    )


def _kummer_transformed(a: float, b: float, x: float) -> float:
    # 1F1(a,b,x) = exp(x) 1F1(b-a, b, -x); for x < 0 the transformed series
    # has positive argument and no cancellation, but its partial sums grow
    # like exp(-x), so rescale on the fly and fold the scale into exp().
    y = -x
    ap = b - a
    total = 1.0
    term = 1.0
    log_scale = 0.0
    small = 0
    for n in range(_KUMMER_MAX_TERMS):
        term *= (ap + n) / ((b + n) * (n + 1.0)) * y
        total += term
        if abs(total) > _KUMMER_RESCALE:
            total /= _KUMMER_RESCALE
            term /= _KUMMER_RESCALE
            log_scale += math.log(_KUMMER_RESCALE)
        if abs(term) <= 1e-17 * abs(total):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    else:
        raise NumericError(
            f"Kummer transformed series did not converge within "
            f"{_KUMMER_MAX_TERMS} terms (a={a}, b={b}, x={x})"
        )
    return math.copysign(
        math.exp(math.log(abs(total)) + log_scale + x), total
    )


def _kummer_asymptotic(a: float, b: float, x: float) -> float:
    # Large negative argument: 1F1(a,b,-y) ~ Gamma(b)/Gamma(b-a) * y^(-a)
    # * sum_s (a)_s (a-b+1)_s / (s! y^s); the exp(-y) branch is negligible.
    y = -x
    total = 1.0
    term = 1.0
    prev = math.inf
    for s in range(60):
        term *= (a + s) * (a - b + 1.0 + s) / ((s + 1.0) * y)
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if abs(term) <= 1e-17 * abs(total):
            break
    prefac = math.gamma(b) / math.gamma(b - a) * y ** (-a)
    return prefac * total


def kummer_1f1(a: float, b: float, x: float) -> float:
    """Confluent hypergeometric 1F1(a; b; x) for real parameters, tuned for
    the nonpositive arguments arising from -x^2 kernels.

    Negative arguments always go through the Kummer transformation
    1F1(a,b,x) = exp(x) 1F1(b-a,b,-x): the transformed series has a single
    sign change at most, so the cancellation that ruins the direct
    alternating series (error ~ eps * exp(|x|)) never appears.  Once
    exp(-x) would overflow the scaled sum, the large-argument expansion
    takes over.
    """
    if b <= 0.0 and b == math.floor(b):
        raise ValueError(f"b must not be a nonpositive integer, got {b}")
    if x == 0.0:
        return 1.0
    ap = b - a
    if ap <= 0.0 and ap == math.floor(ap):
        # (b-a)_n vanishes for n > -(b-a): the transformed series terminates.
        return math.exp(x) * _kummer_series(ap, b, -x, max_terms=int(-ap) + 2)
    if x > 0.0:
        return _kummer_series(a, b, x, _KUMMER_MAX_TERMS)
    if -x <= _TRANSFORM_CUT:
        return _kummer_transformed(a, b, x)
    return _kummer_asymptotic(a, b, x)


def ratio_table(alpha: float, kind: RatioKind, p_max: int) -> RatioTable:
    """Table of Gamma((-1 +/- alpha)/2 + p) / Gamma((3 -/+ alpha)/2 + p) for
    p = 0..p_max, built by the one-step recurrence from the p = 0 value."""
    if not (0.0 < alpha < 2.0) or alpha == 1.0:
        raise ValueError(f"order must lie in (0,1) or (1,2), got {alpha}")
    if p_max < 0:
        raise ValueError(f"p_max must be nonnegative, got {p_max}")
    if kind is RatioKind.V1:
        num0 = (-1.0 + alpha) / 2.0
        den0 = (3.0 - alpha) / 2.0
    else:
        num0 = (-1.0 - alpha) / 2.0
        den0 = (3.0 + alpha) / 2.0
    v0 = gamma(num0) / gamma(den0)
    if p_max == 0:
        values = np.array([v0])
    else:
        p = np.arange(p_max, dtype=np.float64)
        ratios = (num0 + p) / (den0 + p)
        values = np.empty(p_max + 1, dtype=np.float64)
        values[0] = v0
        np.cumprod(ratios, out=ratios)
        values[1:] = v0 * ratios
    return RatioTable(alpha=alpha, kind=kind, values=values)


_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def unit_imag_power(n: int) -> complex:
    """i**n for integer n, exact."""
    return _I_POWERS[n % 4]

