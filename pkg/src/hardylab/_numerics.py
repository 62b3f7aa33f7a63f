"""Shared numerical kernels: log-domain sums, compensated convolution, quadrature."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

# sums over more terms than this use compensated accumulation
COMPENSATE_ABOVE = 1024

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


def logsumexp(x) -> float:
    """log(sum(exp(x))) with max-shift; the shifted sum uses exactly rounded fsum."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        return -math.inf
    mx = float(np.max(x))
    if mx == -math.inf:
        return -math.inf
    return mx + math.log(math.fsum(np.exp(x - mx)))


def safe_exp(log_value: float) -> float:
    """exp() that refuses to overflow silently."""
    if log_value > LOG_FLOAT_MAX:
        raise OverflowError(f"exp({log_value:.6g}) exceeds float range; use the log-domain value")
    return math.exp(log_value)


def convolve(x: np.ndarray, y: np.ndarray, n_out: int | None = None) -> np.ndarray:
    """Full linear convolution of two 1-D arrays, optionally truncated to ``n_out`` terms.

    When both operands are longer than ``COMPENSATE_ABOVE`` the accumulation is
    Kahan-compensated, looping over the shorter operand.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    full = len(x) + len(y) - 1
    n_out = full if n_out is None else min(n_out, full)
    x = x[:n_out]
    y = y[:n_out]
    if min(len(x), len(y)) <= COMPENSATE_ABOVE:
        return np.convolve(x, y)[:n_out]
    if len(x) > len(y):
        x, y = y, x
    dtype = np.result_type(x, y, float)
    acc = np.zeros(n_out, dtype=dtype)
    comp = np.zeros(n_out, dtype=dtype)
    for k, xk in enumerate(x):
        if xk == 0 or k >= n_out:
            continue
        hi = min(n_out, k + len(y))
        term = xk * y[: hi - k] - comp[k:hi]
        t = acc[k:hi] + term
        comp[k:hi] = (t - acc[k:hi]) - term
        acc[k:hi] = t
    return acc


@lru_cache(maxsize=64)
def _gl_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(nodes)
    return x, w


def gauss_legendre(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, nodes: int) -> float:
    """Fixed-order Gauss-Legendre rule on [a, b]; ``f`` is called once on the node array."""
    x, w = _gl_rule(nodes)
    half = 0.5 * (b - a)
    t = a + half * (x + 1.0)
    return float(half * np.dot(w, f(t)))


class QuadResult(NamedTuple):
    value: float
    error: float
    panels: int


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    nodes: int = 32,
    tol: float = 1e-13,
    max_depth: int = 40,
) -> QuadResult:
    """Adaptive bisection with an n-point vs 2n-point Gauss-Legendre error estimate.

    ``tol`` is an absolute tolerance on the whole interval, shared between
    panels in proportion to their width.
    """
    total = 0.0
    err = 0.0
    panels = 0
    stack = [(a, b, 0)]
    width = b - a
    while stack:
        lo, hi, depth = stack.pop()
        coarse = gauss_legendre(f, lo, hi, nodes)
        fine = gauss_legendre(f, lo, hi, 2 * nodes)
        e = abs(fine - coarse)
        if e <= tol * (hi - lo) / width or depth >= max_depth:
            total += fine
            err += e
            panels += 1
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
    return QuadResult(total, err, panels)


def fit_exponent(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)
