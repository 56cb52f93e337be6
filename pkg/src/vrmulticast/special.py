"""Principal-branch Lambert W and a bracketing root finder for decreasing functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractViolation, ConvergenceError, DomainError, NoRootError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "lambert_w0",
    "lambert_w0_shifted",
    "bisect_decreasing",
]

_INV_E = math.exp(-1.0)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule for iterative solves.

    ``rel`` bounds the relative bracket width, ``abs`` the absolute residual
    ``|f(x) - target|`` and ``max_iter`` caps both bracket expansion and
    bisection steps.
    """

    rel: float = 1e-12
    abs: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (self.rel > 0 and self.abs > 0):
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")


DEFAULT_TOL = Tolerance()


def _branch_series(p):
    # W(x) + 1 around x = -1/e in powers of p = sqrt(2 (e x + 1)).
    return p - p * p / 3.0 + 11.0 / 72.0 * p**3 - 43.0 / 540.0 * p**4


def _winitzki(x):
    lx = np.log1p(x)
    return lx * (1.0 - np.log1p(lx) / (2.0 + lx))


def lambert_w0(x):
    """Principal branch of the Lambert W function for real ``x >= -1/e``.

    Halley iteration seeded by the branch-point series below ``x = -0.32``
    and by Winitzki's log approximation elsewhere. Accepts scalars or arrays;
    a scalar in gives a float out.
    """
    scalar = np.ndim(x) == 0
    shape = np.shape(x)
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    # a few ulps of slack so that -1/e typed in different ways is accepted
    lower = -_INV_E * (1.0 + 8.0 * _EPS)
    if np.any(np.isnan(x)) or np.any(x < lower):
        raise DomainError("lambert_w0 is real only for x >= -1/e")
    x = np.maximum(x, -_INV_E)

    w = np.empty_like(x)
    near = x < -0.32
    gap = np.maximum(math.e * x[near] + 1.0, 0.0)
    w[near] = _branch_series(np.sqrt(2.0 * gap)) - 1.0
    w[~near] = _winitzki(x[~near])

    active = np.ones(x.shape, dtype=bool)
    active &= w > -1.0  # the branch point itself is exact already
    for _ in range(50):
        if not active.any():
            break
        wa = w[active]
        xa = x[active]
        ew = np.exp(wa)
        f = wa * ew - xa
        wp1 = wa + 1.0
        step = f / (ew * wp1 - (wa + 2.0) * f / (2.0 * wp1))
        wa_new = np.maximum(wa - step, -1.0)
        w[active] = wa_new
        done = np.abs(step) <= 4.0 * _EPS * (1.0 + np.abs(wa_new))
        idx = np.flatnonzero(active)
        active[idx[done]] = False

    if scalar:
        return float(w[0])
    return w.reshape(shape)


def _h(u):
    # (u - 1) e^u + 1, with a series for small u to dodge cancellation
    if u < 0.1:
        total = 0.0
        term = u
        for n in range(2, 16):
            term *= u / n
            total += (n - 1) * term
        return total
    return u * math.exp(u) - math.expm1(u)


def lambert_w0_shifted(q):
    """Return ``1 + W((q - 1) / e)`` for ``q >= 0`` without cancellation.

    The closed-form allocation needs ``W(lambda H / (n0 e) - 1/e) + 1``, whose
    argument sits next to the branch point when ``lambda H / n0`` is small.
    Solving ``(u - 1) e^u + 1 = q`` for ``u`` directly keeps full relative
    precision for every ``q``.
    """
    q = float(q)
    if not q >= 0.0:
        raise DomainError("lambert_w0_shifted needs q >= 0")
    if q == 0.0:
        return 0.0
    if math.isinf(q):
        return math.inf
    if q < 0.13:
        u = _branch_series(math.sqrt(2.0 * q))
    else:
        x = (q - 1.0) * _INV_E
        lx = math.log1p(x)
        u = 1.0 + lx * (1.0 - math.log1p(lx) / (2.0 + lx))
    for _ in range(60):
        newton = (_h(u) - q) / (u * math.exp(u))
        # Halley: g''/g' = (u + 1)/u
        step = newton / (1.0 - 0.5 * newton * (u + 1.0) / u)
        u_new = u - step
        if u_new <= 0.0:
            u_new = 0.5 * u
        if abs(u_new - u) <= 2.0 * _EPS * u_new:
            return u_new
        u = u_new
    return u


def bisect_decreasing(
    f: Callable[[float], float],
    target: float,
    bracket_hint: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Solve ``f(lam) = target`` for a strictly decreasing ``f`` on ``(0, inf)``.

    The bracket is grown geometrically from ``bracket_hint`` (doubling up or
    halving down) and then bisected at the geometric midpoint, so brackets
    spanning many decades shrink at the same rate as narrow ones.

    Raises
    ------
    NoRootError
        If no sign change is found within ``tol.max_iter`` doublings.
    ContractViolation
        If a sample shows ``f`` increasing.
    ConvergenceError
        If bisection runs out of iterations.
    """
    if not bracket_hint > 0:
        raise DomainError("bracket_hint must be positive")

    def rises(f_left, f_right):
        # f_left is sampled at the smaller argument
        return f_right > f_left + 1e-12 * abs(f_left)

    lo = hi = bracket_hint
    f_lo = f_hi = f(bracket_hint)
    if abs(f_lo - target) <= tol.abs:
        return bracket_hint
    if f_lo > target:
        for _ in range(tol.max_iter):
            lo, f_lo = hi, f_hi
            hi *= 2.0
            f_hi = f(hi)
            if rises(f_lo, f_hi):
                raise ContractViolation(f"f increased between {lo:g} and {hi:g}")
            if f_hi <= target:
                break
        else:
            raise NoRootError(f"f stayed above {target:g} up to {hi:g}")
    else:
        for _ in range(tol.max_iter):
            hi, f_hi = lo, f_lo
            lo *= 0.5
            f_lo = f(lo)
            if rises(f_lo, f_hi):
                raise ContractViolation(f"f increased between {lo:g} and {hi:g}")
            if f_lo >= target:
                break
        else:
            raise NoRootError(f"f stayed below {target:g} down to {lo:g}")

    for _ in range(tol.max_iter):
        mid = math.sqrt(lo) * math.sqrt(hi)  # lo * hi may overflow
        if not lo < mid < hi:
            return mid
        f_mid = f(mid)
        if rises(f_lo, f_mid) or rises(f_mid, f_hi):
            raise ContractViolation(f"f is not monotone near {mid:g}")
        if abs(f_mid - target) <= tol.abs:
            return mid
        if f_mid > target:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= tol.rel * mid:
            return math.sqrt(lo * hi)
    raise ConvergenceError("bisection did not converge", abs(f_mid - target))
