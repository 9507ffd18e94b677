"""Analytic operator formulas.

Covers the six supported operators applied to the rational basis functions
(both the x-domain hypergeometric forms and the s-domain gamma-ratio series),
the order-1 odd-index formulas, the x = 0 anchors for odd indices, and the
exact reference solutions for arctan, erf and ln(1+x^2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.special import erf as _erf

from . import specfun
from .basis import lambda_k
from .specfun import (
    RatioKind,
    check_skewness,
    c_alpha,
    hyp2f1_terminating,
    kummer_1f1,
    ratio_table,
    unit_imag_power,
)


class OperatorKind(Enum):
    WEYL_RIGHT = "dr"
    WEYL_LEFT_NEG = "dl"
    DX_WEYL_RIGHT = "dxr"
    DX_WEYL_LEFT_NEG = "dxl"
    RIESZ_FELLER = "rf"
    FRAC_LAPLACIAN = "fl"


def validate_kind(kind: OperatorKind, alpha: float, gamma: float = 0.0) -> None:
    """Check the (kind, alpha, gamma) compatibility rules."""
    if kind in (OperatorKind.WEYL_RIGHT, OperatorKind.WEYL_LEFT_NEG):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"{kind.name} requires alpha in (0,1), got {alpha}")
    elif kind in (OperatorKind.DX_WEYL_RIGHT, OperatorKind.DX_WEYL_LEFT_NEG):
        if not 1.0 < alpha < 2.0:
            raise ValueError(f"{kind.name} requires alpha in (1,2), got {alpha}")
    elif kind is OperatorKind.RIESZ_FELLER:
        check_skewness(alpha, gamma)
    else:
        if not 0.0 < alpha < 2.0:
            raise ValueError(f"{kind.name} requires alpha in (0,2), got {alpha}")


def phase_factor(kind: OperatorKind, alpha: float, gamma: float, sign: int) -> complex:
    """Multiplier turning the symmetric-operator value of a basis function
    with mode sign `sign` into the requested operator's value."""
    if sign == 0:
        raise ValueError("phase factor undefined for sign 0")
    half_pi = math.pi / 2.0
    if kind is OperatorKind.WEYL_RIGHT or kind is OperatorKind.DX_WEYL_RIGHT:
        return cmath.exp(-1j * sign * alpha * half_pi)
    if kind is OperatorKind.WEYL_LEFT_NEG:
        return -cmath.exp(1j * sign * alpha * half_pi)
    if kind is OperatorKind.DX_WEYL_LEFT_NEG:
        return cmath.exp(1j * sign * alpha * half_pi)
    if kind is OperatorKind.RIESZ_FELLER:
        return -cmath.exp(1j * sign * gamma * half_pi)
    return 1.0 + 0.0j


def frac_lap_lambda(alpha: float, k: int, x: float) -> complex:
    """Symmetric fractional operator applied to the k-th rational basis
    function at x, via the terminating hypergeometric form.

    Direct evaluation is reliable in double precision for |k| <= 32 or so;
    beyond that the finite sum cancels badly and the s-domain series should
    be used instead.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"order must lie in (0, 2), got {alpha}")
    if k == 0:
        return 0.0 + 0.0j
    if alpha == 1.0:
        return 2.0 * abs(k) * complex(lambda_k(x, k)) / (1.0 + x * x)
    sgn = 1 if k > 0 else -1
    base = 1.0 + 1j * sgn * x
    z = 2.0 / base
    front = -2.0 * abs(k) * math.gamma(1.0 + alpha) / base ** (1.0 + alpha)
    return front * hyp2f1_terminating(abs(k) - 1, alpha, z)


def op_lambda(
    kind: OperatorKind, alpha: float, k: int, x: float, gamma: float = 0.0
) -> complex:
    """Any supported operator applied to the k-th rational basis function."""
    validate_kind(kind, alpha, gamma)
    if k == 0:
        return 0.0 + 0.0j
    sgn = 1 if k > 0 else -1
    return phase_factor(kind, alpha, gamma, sgn) * frac_lap_lambda(alpha, k, x)


def frac_lap_lambda_s(
    alpha: float,
    k: int,
    s: float,
    l_max: int,
    v1: specfun.RatioTable | None = None,
    v2: specfun.RatioTable | None = None,
    return_tail: bool = False,
):
    """s-domain form of the symmetric operator on the k-th basis function.

    For alpha = 1 the closed form 2|k| sin^2(s) exp(i 2 k s) is exact; for
    alpha != 1 the gamma-ratio series is summed over l in [-l_max, l_max].
    With return_tail=True, also returns a heuristic bound on the truncated
    tail (terms decay like |l|^-3).
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"order must lie in (0, 2), got {alpha}")
    if not 0.0 < s < math.pi:
        raise ValueError(f"s must lie in (0, pi), got {s}")
    if l_max < abs(k):
        raise ValueError(f"l_max = {l_max} must be >= |k| = {abs(k)}")
    if k == 0:
        return (0.0 + 0.0j, 0.0) if return_tail else 0.0 + 0.0j
    if alpha == 1.0:
        value = 2.0 * abs(k) * math.sin(s) ** 2 * cmath.exp(2j * k * s)
        return (value, 0.0) if return_tail else value
    if v1 is None:
        v1 = ratio_table(alpha, RatioKind.V1, l_max)
    if v2 is None:
        v2 = ratio_table(alpha, RatioKind.V2, l_max + abs(k))
    l = np.arange(-l_max, l_max + 1)
    terms = (
        np.exp(2j * l * s)
        * ((1.0 - alpha) * k * k - 2.0 * k * l)
        * v1.values[np.abs(l)]
        * v2.values[np.abs(k - l)]
    )
    prefac = (
        c_alpha(alpha)
        * math.sin(s) ** (alpha - 1.0)
        / (2.0 * math.tan(alpha * math.pi / 2.0))
    )
    value = prefac * complex(terms.sum())
    if not return_tail:
        return value
    tail = 0.5 * abs(prefac) * l_max * (abs(terms[0]) + abs(terms[-1]))
    return value, tail


def frac_lap_mu(alpha: float, k: int, x: float) -> complex:
    """Symmetric fractional operator on the k-th Christov-type basis
    function, via the terminating hypergeometric form with third parameter 1."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"order must lie in (0, 2), got {alpha}")
    ga = math.gamma(1.0 + alpha)
    if k >= 0:
        base = 1.0 + 1j * x
        return ga / base ** (1.0 + alpha) * hyp2f1_terminating(
            k, alpha, 2.0 / base, c=1.0
        )
    base = 1.0 - 1j * x
    return -ga / base ** (1.0 + alpha) * hyp2f1_terminating(
        -(1 + k), alpha, 2.0 / base, c=1.0
    )


def op_mu(
    kind: OperatorKind, alpha: float, k: int, x: float, gamma: float = 0.0
) -> complex:
    """Any supported operator applied to the k-th Christov-type function.

    The mode-sign convention follows the (lambda_k - lambda_{k+1})/2
    decomposition: the k = 0 term takes the sign of k + 1 because the
    lambda_0 contribution vanishes.
    """
    validate_kind(kind, alpha, gamma)
    sgn = 1 if k >= 0 else -1
    return phase_factor(kind, alpha, gamma, sgn) * frac_lap_mu(alpha, k, x)


def _odd_k_bracket(k: int, s: float) -> complex:
    sgn = 1 if k > 0 else -1
    log_cot_half = math.log(math.cos(0.5 * s)) - math.log(math.sin(0.5 * s))
    total = math.cos(s) + math.sin(s) ** 2 * log_cot_half + 0.0j
    for n in range((abs(k) - 1) // 2 + 1):
        total += 4.0 * cmath.exp(-1j * sgn * (2 * n + 1) * s) / (
            (2 * n - 1.0) * (2 * n + 1.0) * (2 * n + 3.0)
        )
    return total


def half_lap_phi_odd(k: int, s: float) -> complex:
    """Order-1 symmetric operator on the odd-index half-basis function,
    expressed in s. Diverges logarithmically at the interval endpoints."""
    if k % 2 == 0:
        raise ValueError(f"k must be odd, got {k}")
    if not 0.0 < s < math.pi:
        raise ValueError(f"s must lie in (0, pi), got {s}")
    sgn = 1 if k > 0 else -1
    return -2j * sgn / (math.pi * (2.0 + abs(k))) - (
        2j * k * cmath.exp(1j * k * s) / math.pi
    ) * _odd_k_bracket(k, s)


def d1gamma_phi_odd(k: int, gamma: float, s: float) -> complex:
    """Order-1 skewed operator on the odd-index half-basis function:
    -cos(g pi/2) times the symmetric value plus sin(g pi/2) times the
    mapped derivative -i k sin^2(s) exp(i k s)."""
    if k % 2 == 0:
        raise ValueError(f"k must be odd, got {k}")
    if abs(gamma) > 1.0:
        raise ValueError(f"skewness must satisfy |gamma| <= 1, got {gamma}")
    half_pi = math.pi / 2.0
    deriv = -1j * k * math.sin(s) ** 2 * cmath.exp(1j * k * s)
    return -math.cos(gamma * half_pi) * half_lap_phi_odd(k, s) + math.sin(
        gamma * half_pi
    ) * deriv


def weyl_phi_at_zero(alpha: float, k: int) -> tuple[complex, complex, complex]:
    """Values at x = 0 of the right, minus-left and symmetric operators on
    the odd-index half-basis function, as finite gamma sums."""
    if k % 2 == 0 or k <= 0:
        raise ValueError(f"k must be a positive odd integer, got {k}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"order must lie in (0, 1), got {alpha}")
    sum_right = 0.0 + 0.0j
    sum_left = 0.0 + 0.0j
    sum_sym = 0.0
    for n in range(k + 1):
        g = (
            math.comb(k, n)
            * math.gamma((1.0 + alpha + k - n) / 2.0)
            * math.gamma((1.0 - alpha + n) / 2.0)
        )
        i_n = unit_imag_power(n)
        sum_right += i_n * g
        sum_left += i_n.conjugate() * g
        sum_sym += math.sin(n * math.pi / 2.0) * g
    front = -unit_imag_power(1 + k) * k / (
        2.0 * math.gamma(1.0 - alpha) * math.gamma(1.0 + k / 2.0)
    )
    d_right = front * sum_right
    d_left_neg = front * sum_left
    lap = (
        unit_imag_power(k)
        * 2.0 ** alpha
        * math.gamma((1.0 + alpha) / 2.0)
        / (math.sqrt(math.pi) * math.gamma(k / 2.0) * math.gamma(1.0 - alpha / 2.0))
        * sum_sym
    )
    return d_right, d_left_neg, lap


# --- Reference solutions -------------------------------­-------------------
#
# For each reference function the right-sided and dx-right-sided closed forms
# are one and the same expression in (alpha, x); the minus-left and
# dx-minus-left ones differ only by an overall sign.  The helpers below keep
# that shared expression in a single place.


def _arctan_right(alpha, x):
    return (
        math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.sin(alpha * math.pi / 2.0 + alpha * np.arctan(x))
    )


def _arctan_left(alpha, x):
    return (
        math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.sin(alpha * math.pi / 2.0 - alpha * np.arctan(x))
    )


def _arctan_rf(alpha, gamma, x):
    return (
        math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.sin(gamma * math.pi / 2.0 - alpha * np.arctan(x))
    )


def _arctan_lap(alpha, x):
    return (
        math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.sin(alpha * np.arctan(x))
    )


def _erf_terms(alpha, x):
    x = np.asarray(x, dtype=np.float64)
    f1 = np.array([kummer_1f1(alpha / 2.0, 0.5, -t * t) for t in x.ravel()])
    f2 = np.array(
        [kummer_1f1((1.0 + alpha) / 2.0, 1.5, -t * t) for t in x.ravel()]
    )
    a_term = 2.0 ** alpha / math.pi * math.gamma(alpha / 2.0) * f1.reshape(x.shape)
    b_term = (
        2.0 ** (1.0 + alpha)
        / math.pi
        * math.gamma((1.0 + alpha) / 2.0)
        * x
        * f2.reshape(x.shape)
    )
    return a_term, b_term


def _erf_right(alpha, x):
    a_term, b_term = _erf_terms(alpha, x)
    return np.sin(alpha * math.pi / 2.0) * a_term + np.cos(alpha * math.pi / 2.0) * b_term


def _erf_left(alpha, x):
    a_term, b_term = _erf_terms(alpha, x)
    return np.sin(alpha * math.pi / 2.0) * a_term - np.cos(alpha * math.pi / 2.0) * b_term


def _erf_rf(alpha, gamma, x):
    a_term, b_term = _erf_terms(alpha, x)
    return np.sin(gamma * math.pi / 2.0) * a_term - np.cos(gamma * math.pi / 2.0) * b_term


def _erf_lap(alpha, x):
    return _erf_terms(alpha, x)[1]


def _log1psq_right(alpha, x):
    return (
        -2.0
        * math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.cos(alpha * math.pi / 2.0 + alpha * np.arctan(x))
    )


def _log1psq_left(alpha, x):
    return (
        2.0
        * math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.cos(alpha * math.pi / 2.0 - alpha * np.arctan(x))
    )


def _log1psq_rf(alpha, gamma, x):
    return (
        2.0
        * math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.cos(gamma * math.pi / 2.0 - alpha * np.arctan(x))
    )


def _log1psq_lap(alpha, x):
    return (
        -2.0
        * math.gamma(alpha)
        * (1.0 + x * x) ** (-alpha / 2.0)
        * np.cos(alpha * np.arctan(x))
    )


@dataclass(frozen=True)
class ClosedFormFunction:
    """A test function with exact formulas for every supported operator."""

    name: str
    value: Callable
    unbounded: bool
    _right: Callable
    _left: Callable
    _rf: Callable
    _lap: Callable

    def operator_exact(self, kind: OperatorKind, alpha: float, gamma: float, x):
        validate_kind(kind, alpha, gamma)
        if kind is OperatorKind.WEYL_RIGHT or kind is OperatorKind.DX_WEYL_RIGHT:
            return self._right(alpha, x)
        if kind is OperatorKind.WEYL_LEFT_NEG:
            return self._left(alpha, x)
        if kind is OperatorKind.DX_WEYL_LEFT_NEG:
            return -self._left(alpha, x)
        if kind is OperatorKind.RIESZ_FELLER:
            return self._rf(alpha, gamma, x)
        return self._lap(alpha, x)


ARCTAN = ClosedFormFunction(
    name="arctan",
    value=np.arctan,
    unbounded=False,
    _right=_arctan_right,
    _left=_arctan_left,
    _rf=_arctan_rf,
    _lap=_arctan_lap,
)

ERF = ClosedFormFunction(
    name="erf",
    value=_erf,
    unbounded=False,
    _right=_erf_right,
    _left=_erf_left,
    _rf=_erf_rf,
    _lap=_erf_lap,
)

LOG1PSQ = ClosedFormFunction(
    name="log1psq",
    value=lambda x: np.log1p(np.asarray(x) ** 2),
    unbounded=True,
    _right=_log1psq_right,
    _left=_log1psq_left,
    _rf=_log1psq_rf,
    _lap=_log1psq_lap,
)

CLOSED_FORMS = {f.name: f for f in (ARCTAN, ERF, LOG1PSQ)}


def reference_operator(
    func: ClosedFormFunction | str,
    kind: OperatorKind,
    alpha: float,
    gamma: float,
    x,
):
    """Exact operator value of a registered reference function."""
    if isinstance(func, str):
        try:
            func = CLOSED_FORMS[func]
        except KeyError:
            raise ValueError(f"no closed form registered under {func!r}") from None
    return func.operator_exact(kind, alpha, gamma, x)
