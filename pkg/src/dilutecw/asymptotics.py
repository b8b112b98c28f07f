"""Edge-generating function, its Taylor structure, and growth predictions.

Everything annealed in this package routes through one scalar function,

    F(p, z) = log(1 - p + p e^z),

the log moment generating function of a Bernoulli(p) edge.  Its Taylor
coefficients c_k(p) (k >= 1) are polynomials in p with c_k = p/k! * (1 + O(p))
near p = 0; the first few are

    c_1 = p
    c_2 = p (1 - p) / 2
    c_3 = p (2 p^2 - 3 p + 1) / 6
    c_4 = p (-6 p^3 + 12 p^2 - 7 p + 1) / 24.

``taylor_coefficients_exact`` computes them in rational arithmetic to any
order up to a hard cap, by composing the exact series of p(e^z - 1) into the
series of log(1 + u).

Growth shorthands.  With even-part cancellation against the p^2 z^2 / 2 term,
the annealed log partition function at scale N grows like

    A = -beta^2/8 + N^2 p (cosh(beta / (2 N p)) - 1)

and the matching second-moment quantity is

    B = -beta^2/4 + (N^2 p / 2) (cosh(beta / (N p)) - 1).

Both are evaluated through 2*sinh^2(x/2) = cosh(x) - 1 so the small-argument
regime keeps full relative precision.  The gap B - 2A = N^2 p (sinh^2 x -
4 sinh^2(x/2)) with x = beta/(2 N p) is nonnegative and of order
beta^4 / (64 N^2 p^3), which is the quantity controlling when annealed
fluctuations stay tame.

Correction cascade.  Expanding N^2 p (cosh(beta/(2Np)) - 1) term by term, the
order-2k contribution scales as beta^{2k} / (N^{2k-2} p^{2k-1}).  It vanishes
with N iff p >> N^{-(2k-2)/(2k-1)}, so as the dilution strengthens through
the ladder

    p ~ N^{-2/3}   (k = 2 correction becomes order one)
    p ~ N^{-4/5}   (k = 3)
    p ~ N^{-6/7}   (k = 4)
    ...

one even Taylor order after another stops being negligible, with exponent
(2k-2)/(2k-1) increasing towards 1.  The predictions below assume the dense
side of the first rung (N^2 p^3 -> infinity), where only the quadratic term
survives.

Prediction variants for log E Z with weight g on the scaled magnetization:

    a: A + N log 2 + log E[g(xi) e^{beta xi^2 / 2}],   xi standard normal
    b: (1-p) beta^2 / (8p) + N log 2 + log E[g(xi) e^{beta xi^2 / 2}]
    c: (1-p) beta^2 / (8p) + N log 2 - (1/2) log(1 - beta)   (g = 1 only)

Variant b replaces the cosh in A by its quadratic Taylor term; variant c
additionally evaluates the Gaussian factor in closed form, which needs g = 1.
All three require beta < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .model import ModelParams
from .testfunctions import TestFunction

__all__ = [
    "eval_F",
    "taylor_coefficients",
    "taylor_coefficients_exact",
    "MAX_TAYLOR_ORDER",
    "cosh_shorthand",
    "gaussian_expectation",
    "AsymptoticPrediction",
    "predict_log_partition",
    "remainder_check",
]

# Rational series composition is exact but its cost and the coefficient sizes
# grow quickly; nothing downstream needs more than a handful of orders.
MAX_TAYLOR_ORDER = 16


def eval_F(p: float, z: float) -> float:
    """F(p, z) = log(1 - p + p e^z), stable for small z and p near 1.

    Written as log1p(p * expm1(z)): at small z the argument is ~ p z, so no
    cancellation, and at p = 1 the value degenerates to exactly z for z >= 0
    up to rounding.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    return math.log1p(p * math.expm1(z))


def taylor_coefficients_exact(p, max_order: int) -> list[Fraction]:
    """Coefficients c_1 .. c_{max_order} of F(p, z) in z, as exact rationals.

    ``p`` is converted with Fraction(), so rational and decimal-string inputs
    stay exact; float inputs are taken at their binary value.
    """
    if not 1 <= max_order <= MAX_TAYLOR_ORDER:
        raise ValueError(
            f"max_order must lie in [1, {MAX_TAYLOR_ORDER}], got {max_order}"
        )
    pq = Fraction(p)
    if not 0 < pq <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    k = max_order
    # u(z) = p (e^z - 1) truncated at order k
    factorial = Fraction(1)
    u = [Fraction(0)] * (k + 1)
    for i in range(1, k + 1):
        factorial *= i
        u[i] = pq / factorial

    def mul_truncated(a, b):
        out = [Fraction(0)] * (k + 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(min(len(b), k + 1 - i)):
                if b[j]:
                    out[i + j] += ai * b[j]
        return out

    # log(1 + u) = sum_{m>=1} (-1)^{m+1} u^m / m, truncated at order k
    series = [Fraction(0)] * (k + 1)
    upow = [Fraction(1)] + [Fraction(0)] * k
    for m in range(1, k + 1):
        upow = mul_truncated(upow, u)
        sign = Fraction(1, m) if m % 2 else Fraction(-1, m)
        for i in range(k + 1):
            series[i] += sign * upow[i]
    return series[1:]


def taylor_coefficients(p: float, max_order: int) -> list[float]:
    """Float view of taylor_coefficients_exact."""
    return [float(c) for c in taylor_coefficients_exact(p, max_order)]


def cosh_shorthand(params: ModelParams, which: str) -> float:
    """The growth shorthand A (first moment) or B (second moment).

    A = -beta^2/8 + N^2 p (cosh(beta/(2Np)) - 1)
    B = -beta^2/4 + (N^2 p / 2) (cosh(beta/(Np)) - 1)

    cosh(x) - 1 is evaluated as 2 sinh(x/2)^2; both vanish at beta = 0.
    """
    n, p, beta = params.n, params.p, params.beta
    if which == "A":
        x = beta / (2.0 * n * p)
        return -beta * beta / 8.0 + n * n * p * 2.0 * math.sinh(x / 2.0) ** 2
    if which == "B":
        x = beta / (n * p)
        return -beta * beta / 4.0 + n * n * p * math.sinh(x / 2.0) ** 2
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


_HERMITE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_LEGENDRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gaussian_expectation(g: TestFunction, beta: float, *, nodes: int = 128) -> float:
    """E[g(xi) exp(beta xi^2 / 2)] for standard normal xi, 0 <= beta < 1.

    The integrand g(x) exp(-(1 - beta) x^2 / 2) carries a total quadratic
    decay of (1 - beta) plus twice g's own declared decay; substituting y =
    x sqrt(total) turns the integral into a plain Gaussian expectation of a
    residual with an O(1) length scale, done with Gauss-Hermite quadrature.
    128 nodes is then beyond machine precision for the analytic registry
    members at any beta.  A compactly supported g defeats Hermite quadrature
    (the nodes straddle the support edges where g is not analytic), so for
    those the integral is instead taken over the support interval with
    Gauss-Legendre nodes, which see a smooth integrand flat at both
    endpoints.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta!r}")
    if nodes < 2:
        raise ValueError(f"nodes must be at least 2, got {nodes}")
    support = g.support
    if support is None:
        if nodes not in _HERMITE_CACHE:
            _HERMITE_CACHE[nodes] = np.polynomial.hermite.hermgauss(nodes)
        t, w = _HERMITE_CACHE[nodes]
        alpha = g.quadratic_decay
        scale = 1.0 / math.sqrt(1.0 - beta + 2.0 * alpha)
        acc = 0.0
        for ti, wi in zip(t, w):
            x = math.sqrt(2.0) * ti * scale
            acc += wi * g(x) * math.exp(alpha * x * x)
        return scale * acc / math.sqrt(math.pi)
    lo, hi = support
    if nodes not in _LEGENDRE_CACHE:
        _LEGENDRE_CACHE[nodes] = np.polynomial.legendre.leggauss(nodes)
    t, w = _LEGENDRE_CACHE[nodes]
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
    acc = 0.0
    for ti, wi in zip(t, w):
        x = mid + half * ti
        acc += wi * g(x) * math.exp(-(1.0 - beta) * x * x / 2.0)
    return half * acc / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AsymptoticPrediction:
    """A predicted log partition value plus the Gaussian factor that entered it."""

    variant: str
    log_value: float
    gaussian_factor: float


def predict_log_partition(
    params: ModelParams, g: TestFunction, variant: str
) -> AsymptoticPrediction:
    """Predicted log of the disorder-averaged weighted partition sum.

    Variants 'a', 'b', 'c' as described in the module docstring; all require
    beta < 1, and 'c' additionally requires g to be the constant function.
    """
    if variant not in ("a", "b", "c"):
        raise ValueError(f"variant must be 'a', 'b', or 'c', got {variant!r}")
    n, p, beta = params.n, params.p, params.beta
    if not beta < 1.0:
        raise ValueError(f"predictions require beta < 1, got beta={beta}")
    nlog2 = n * math.log(2.0)
    if variant == "c":
        if g.name != "one":
            raise ValueError("variant 'c' is the closed form for g = one only")
        factor = 1.0 / math.sqrt(1.0 - beta)
        log_value = (1.0 - p) * beta * beta / (8.0 * p) + nlog2 - 0.5 * math.log1p(-beta)
        return AsymptoticPrediction(variant="c", log_value=log_value, gaussian_factor=factor)
    factor = gaussian_expectation(g, beta)
    if factor <= 0.0:
        raise ValueError(f"Gaussian factor is {factor}, cannot take its log")
    if variant == "a":
        lead = cosh_shorthand(params, "A")
    else:
        lead = (1.0 - p) * beta * beta / (8.0 * p)
    return AsymptoticPrediction(
        variant=variant, log_value=lead + nlog2 + math.log(factor), gaussian_factor=factor
    )


def remainder_check(p: float, z: float, which: str) -> float:
    """Normalized Taylor remainder of F, in 50-digit arithmetic.

    which = 'odd':  [ (F(z) - F(-z))/2 - p z ] / (p z^3)
    which = 'even': [ (F(z) + F(-z))/2 - p (cosh z - 1) + p^2 z^2 / 2 ] / (p^2 z^4)

    Both have finite limits as z -> 0 (the next coefficient of the relevant
    parity).  The subtraction is hopeless in double precision for small z,
    hence the extended working precision; p=1 and |z| up to 0.25 are in scope.
    """
    if which not in ("odd", "even"):
        raise ValueError(f"which must be 'odd' or 'even', got {which!r}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if not 0.0 < abs(z) <= 0.25:
        raise ValueError(f"z must satisfy 0 < |z| <= 0.25, got {z!r}")
    with mp.workdps(50):
        pm = mp.mpf(p)
        zm = mp.mpf(z)
        fp = mp.log(1 - pm + pm * mp.e**zm)
        fm = mp.log(1 - pm + pm * mp.e**(-zm))
        if which == "odd":
            value = ((fp - fm) / 2 - pm * zm) / (pm * zm**3)
        else:
            value = ((fp + fm) / 2 - pm * (mp.cosh(zm) - 1) + pm**2 * zm**2 / 2) / (
                pm**2 * zm**4
            )
        return float(value)
