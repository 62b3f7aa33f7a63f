"""Disk automorphisms T_a(z) = (a + z)/(1 + conj(a) z), their powers, and the
matrix of C_{T_a} on h^p(beta).

Throughout, T_a^n is the pointwise power (T_a(z))^n, not an iterate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from . import _numerics
from ._numerics import fit_exponent, gauss_legendre, logsumexp
from .series import TruncatedSeries
from .weights import WeightSequence

INTERVAL_I = (0.5, 2.0 / 3.0)
J_SLACK = 1e-12


@dataclass(frozen=True)
class AutParam:
    a: complex
    alpha_J: float = 1.25

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise ValueError(f"|a| must be < 1, got {self.a}")
        if self.alpha_J <= 1:
            raise ValueError("alpha_J must exceed 1")

    @property
    def J(self) -> tuple[float, float]:
        return 1.0 / self.alpha_J, self.alpha_J

    def in_J(self, m: int, n: int) -> bool:
        lo, hi = self.J
        r = m / n
        return lo - J_SLACK <= r <= hi + J_SLACK


def _as_param(a) -> AutParam:
    return a if isinstance(a, AutParam) else AutParam(a)


def default_truncation(a, n: int) -> int:
    """Coefficient index past which T_a^n carries < 1e-12 of its l^2 mass.

    The boundary phase of T_a turns at rate between (1-|a|)/(1+|a|) and
    (1+|a|)/(1-|a|), so T_a^n lives on m <~ n(1+|a|)/(1-|a|), with an
    n^(1/3) transition layer and a geometric tail.
    """
    r = abs(_as_param(a).a)
    if r == 0:
        return n
    return math.ceil(n * (1 + r) / (1 - r) + 6 * n ** (1 / 3) + 40 / math.log(1 / r))


def ta_coeffs(a, N: int) -> TruncatedSeries:
    """T_a(0) = a; coefficient n >= 1 is (-1)^(n-1) conj(a)^(n-1) (1 - |a|^2)."""
    a = _as_param(a).a
    c = np.empty(N + 1, dtype=complex)
    c[0] = a
    if N >= 1:
        c[1:] = (1 - abs(a) ** 2) * (-np.conj(a)) ** np.arange(N)
    return TruncatedSeries(c, exact_poly=(a == 0))


def _kernel(a: complex, mmax: int) -> np.ndarray:
    """T_a coefficients, dropping the geometric tail below 1e-20."""
    r = abs(a)
    length = mmax + 1
    if 0 < r < 1:
        length = min(length, int(math.ceil(math.log(1e-20) / math.log(r))) + 2)
    elif r == 0:
        length = min(length, 2)
    return ta_coeffs(a, max(length - 1, 0)).coeffs


@dataclass(frozen=True, eq=False)
class CoeffTable:
    """values[n, m] = coefficient m of T_a^n, 0 <= n <= nmax, 0 <= m <= mmax."""

    a: AutParam
    values: np.ndarray

    @property
    def nmax(self) -> int:
        return self.values.shape[0] - 1

    @property
    def mmax(self) -> int:
        return self.values.shape[1] - 1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["n", "m", "re", "im"])
            for n in range(self.nmax + 1):
                for m in range(self.mmax + 1):
                    v = self.values[n, m]
                    out.writerow([n, m, repr(float(v.real)), repr(float(v.imag))])


def ta_power_table(a, nmax: int, mmax: int | None = None) -> CoeffTable:
    """Rows T_a^0 .. T_a^nmax by repeated multiplication by T_a, modulo z^(mmax+1)."""
    param = _as_param(a)
    if mmax is None:
        mmax = default_truncation(param, nmax)
    kern = _kernel(param.a, mmax)
    table = np.zeros((nmax + 1, mmax + 1), dtype=complex)
    table[0, 0] = 1.0
    for n in range(1, nmax + 1):
        table[n] = _numerics.convolve(table[n - 1], kern, mmax + 1)
    return CoeffTable(param, table)


def ta_power_coeff(a, n: int, m: int, fft_size: int | None = None) -> np.ndarray:
    """Coefficient m of T_a^n for an array of parameters a, by sampling the circle.

    Averages T_a(w)^n w^(-m) over fft_size roots of unity. T_a^n is unimodular
    there, so the phase is formed directly; aliasing from index m + fft_size is
    negligible once fft_size exceeds the truncation index.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    if np.any(np.abs(a) >= 1):
        raise ValueError("|a| must be < 1")
    if fft_size is None:
        top = max(default_truncation(float(np.abs(a).max()), n), m) + m + 1
        fft_size = 1 << max(6, int(math.ceil(math.log2(top))))
    theta = 2 * np.pi * np.arange(fft_size) / fft_size
    w = np.exp(1j * theta)
    out = np.empty(len(a), dtype=complex)
    chunk = max(1, (1 << 22) // fft_size)
    for i in range(0, len(a), chunk):
        ac = a[i : i + chunk, None]
        phase = n * (np.angle(ac + w) - np.angle(1 + np.conj(ac) * w)) - m * theta
        out[i : i + chunk] = np.exp(1j * phase).mean(axis=1)
    return out


def comp_matrix(a, w: WeightSequence, p: float, M: int, N: int) -> np.ndarray:
    """Entries a_{m,n} = coef_m(T_a^n) (beta_m/beta_n)^(1/p), 0 <= m <= M, 0 <= n <= N."""
    if not 1 <= p < math.inf:
        raise ValueError("comp_matrix needs 1 <= p < inf")
    table = ta_power_table(a, N, M).values.T  # rows m, cols n
    L = w.logs(max(M, N))
    scale = (L[: M + 1, None] - L[None, : N + 1]) / p
    with np.errstate(over="ignore"):
        out = table * np.exp(scale)
    out[table == 0] = 0.0
    return out


@dataclass(frozen=True)
class SumsReport:
    p: float
    indices: np.ndarray
    C_values: np.ndarray | None
    L_values: np.ndarray | None
    fitted_exponent: float | None


def _conjugate(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def _maybe_fit(idx, vals) -> float | None:
    idx = np.asarray(idx)
    vals = np.asarray(vals)
    keep = (idx > 0) & (vals > 0) & np.isfinite(vals)
    if keep.sum() < 2:
        return None
    return fit_exponent(idx[keep], vals[keep])


def log_column_sum(row: np.ndarray, L: np.ndarray, n: int, p: float) -> float:
    """log sum_m |coef_m(T_a^n)|^p beta_m / beta_n over the stored coefficients."""
    mag = np.abs(row)
    nz = mag > 0
    m = np.nonzero(nz)[0]
    return logsumexp(p * np.log(mag[nz]) + L[m] - L[n])


def column_sums(a, w: WeightSequence, p: float, M: int | None, n_list: Sequence[int]) -> SumsReport:
    """C_n = sum_{m <= M} |coef_m(T_a^n)|^p beta_m / beta_n.

    Equivalently ||T_a^n||^p / ||e_n||^p in h^p(beta): the l^p norm of column n
    of the matrix. Truncation only drops non-negative terms.
    """
    if not 1 <= p < math.inf:
        raise ValueError("column_sums needs 1 <= p < inf")
    n_arr = np.asarray(sorted(n_list), dtype=int)
    nmax = int(n_arr.max())
    if M is None:
        M = default_truncation(a, nmax)
    table = ta_power_table(a, nmax, M).values
    L = w.logs(max(M, nmax))
    logs = np.array([log_column_sum(table[n], L, n, p) for n in n_arr])
    C = np.exp(logs)
    return SumsReport(p, n_arr, C, None, _maybe_fit(n_arr, C))


def row_sums(a, w: WeightSequence, p: float, N: int | None, m_list: Sequence[int]) -> SumsReport:
    """L_m = sum_{n <= N} |coef_m(T_a^n)|^q (beta_m/beta_n)^(q/p), q conjugate to p.

    For p = 1 (q = inf) the row norm is sup_n |a_{m,n}| instead. N defaults to
    the power beyond which coefficient m of T_a^n is negligible (the same
    spectral bound as the column truncation, read the other way).
    """
    if not 1 <= p < math.inf:
        raise ValueError("row_sums needs 1 <= p < inf")
    q = _conjugate(p)
    m_arr = np.asarray(sorted(m_list), dtype=int)
    mmax = int(m_arr.max())
    if N is None:
        N = default_truncation(a, mmax)
    table = ta_power_table(a, N, mmax).values
    L = w.logs(max(N, mmax))
    out = []
    for m in m_arr:
        mag = np.abs(table[:, m])
        nz = np.nonzero(mag)[0]
        if nz.size == 0:
            out.append(0.0)
            continue
        logterm = np.log(mag[nz]) + (L[m] - L[nz]) / p
        if math.isinf(q):
            out.append(math.exp(float(logterm.max())))
        else:
            out.append(math.exp(logsumexp(q * logterm)))
    Lv = np.array(out)
    return SumsReport(p, m_arr, None, Lv, _maybe_fit(m_arr, Lv))


# ---------------------------------------------------------------------------
# oscillatory integrals over a in I


class OscIntegral(NamedTuple):
    value: float
    error: float
    in_J: bool
    panels: int


def osc_integral(
    n: int,
    m: int,
    s: float = 1.0,
    nodes: int = 24,
    interval: tuple[float, float] = INTERVAL_I,
    alpha_J: float = 1.25,
) -> OscIntegral:
    """int over a in I of |coef_m(T_a^n)|^s da.

    The coefficient is real for real a. I is cut at its sign changes (located
    on a grid, refined by brentq) so every panel has a smooth integrand; each
    panel uses ``nodes``- and 2*``nodes``-point Gauss-Legendre, and the
    difference is returned as the error estimate.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    lo, hi = interval
    in_J = AutParam(lo, alpha_J).in_J(m, n)
    top = max(default_truncation(max(abs(lo), abs(hi)), n), m) + m + 1
    fft = 1 << max(6, int(math.ceil(math.log2(top))))

    def coef(x):
        return ta_power_coeff(np.atleast_1d(x), n, m, fft).real

    grid = np.linspace(lo, hi, max(256, 16 * n) + 1)
    g = coef(grid)
    cuts = [lo]
    for i in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
        cuts.append(brentq(lambda x: float(coef(x)[0]), grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))
    cuts.append(hi)

    def integrand(x):
        return np.abs(coef(x)) ** s

    total = 0.0
    err = 0.0
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        coarse = gauss_legendre(integrand, x0, x1, nodes)
        fine = gauss_legendre(integrand, x0, x1, 2 * nodes)
        total += fine
        err += abs(fine - coarse)
    return OscIntegral(total, err, in_J, len(cuts) - 1)


class VdcCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def vdc_bound_check(phase_poly, A: float, B: float, delta: float, M: float, nodes: int = 32) -> VdcCheck:
    """Compare |int_A^B exp(i f)| with 2/delta + M (B - A)/delta^2.

    ``phase_poly`` is a real coefficient sequence (lowest degree first) or a
    numpy Polynomial. The hypotheses |f'| >= delta and |f''| <= M are checked
    on a dense grid first.
    """
    f = phase_poly if isinstance(phase_poly, np.polynomial.Polynomial) else np.polynomial.Polynomial(phase_poly)
    d1, d2 = f.deriv(1), f.deriv(2)
    grid = np.linspace(A, B, 4097)
    if np.min(np.abs(d1(grid))) < delta * (1 - 1e-12):
        raise ValueError("hypothesis |f'| >= delta fails on [A, B]")
    if np.max(np.abs(d2(grid))) > M * (1 + 1e-12) + 1e-300:
        raise ValueError("hypothesis |f''| <= M fails on [A, B]")
    # one panel per ~pi of phase keeps each panel non-oscillatory
    swing = float(np.max(np.abs(d1(grid)))) * (B - A)
    panels = max(1, int(math.ceil(swing / math.pi)))
    edges = np.linspace(A, B, panels + 1)
    re = im = 0.0
    for x0, x1 in zip(edges[:-1], edges[1:]):
        re += gauss_legendre(lambda x: np.cos(f(x)), x0, x1, nodes)
        im += gauss_legendre(lambda x: np.sin(f(x)), x0, x1, nodes)
    lhs = math.hypot(re, im)
    rhs = 2 / delta + M * (B - A) / delta**2
    return VdcCheck(lhs, rhs, lhs <= rhs)
