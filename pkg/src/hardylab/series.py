"""Truncated power series and weighted coefficient norms on h^p(beta)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _numerics
from ._numerics import logsumexp
from .weights import WeightSequence, integer_range


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients a_0..a_N of a power series.

    ``exact_poly`` marks a polynomial known exactly; otherwise the object is a
    truncation modulo z^(N+1) of a genuine series.
    """

    coeffs: np.ndarray
    exact_poly: bool = True

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def bound(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return evaluate(self, z)

    def __len__(self) -> int:
        return len(self.coeffs)

    def to_json(self) -> str:
        return json.dumps([[float(c.real), float(c.imag)] for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str, exact_poly: bool = True) -> "TruncatedSeries":
        pairs = json.loads(text)
        return cls(np.array([complex(re, im) for re, im in pairs]), exact_poly)


def monomial(m: int, N: int) -> TruncatedSeries:
    """e_m(z) = z^m stored with bound N."""
    if not 0 <= m <= N:
        raise ValueError(f"need 0 <= m <= N, got m={m}, N={N}")
    c = np.zeros(N + 1, dtype=complex)
    c[m] = 1.0
    return TruncatedSeries(c, True)


def indicator_block(lo, hi_exclusive) -> TruncatedSeries:
    """sum of z^n over the integers lo <= n < hi_exclusive (endpoints may be rational)."""
    idx = integer_range(lo, hi_exclusive)
    if len(idx) == 0:
        raise ValueError(f"no integers in [{lo}, {hi_exclusive})")
    c = np.zeros(idx.stop, dtype=complex)
    c[idx.start :] = 1.0
    return TruncatedSeries(c, True)


def _valid_bound(*series: TruncatedSeries) -> int | None:
    """Largest index known exactly in a product: limited only by truncated factors."""
    bounds = [s.bound for s in series if not s.exact_poly]
    return min(bounds) if bounds else None


def cauchy_product(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    bound = _valid_bound(f, g)
    if bound is None:
        return TruncatedSeries(_numerics.convolve(f.coeffs, g.coeffs), True)
    return TruncatedSeries(_numerics.convolve(f.coeffs, g.coeffs, bound + 1), False)


def power(f: TruncatedSeries, n: int) -> TruncatedSeries:
    """f^n by repeated multiplication; f^0 = 1."""
    if n < 0:
        raise ValueError("power needs n >= 0")
    out = TruncatedSeries(np.ones(1), True)
    for _ in range(n):
        out = cauchy_product(out, f)
    return out


def log_norm_hp_beta(f: TruncatedSeries, p: float, w: WeightSequence) -> float:
    """log ||f||, where ||f||^p = sum |a_n|^p beta_n and ||f||_inf = sup |a_n| beta_n."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.coeffs)
    nz = np.nonzero(a)[0]
    if nz.size == 0:
        return -math.inf
    L = w.logs(f.bound)[nz]
    la = np.log(a[nz])
    if math.isinf(p):
        return float(np.max(la + L))
    return logsumexp(p * la + L) / p


def norm_hp_beta(f: TruncatedSeries, p: float, w: WeightSequence) -> float:
    return _numerics.safe_exp(log_norm_hp_beta(f, p, w))


def algebra_ratio(f: TruncatedSeries, g: TruncatedSeries, w: WeightSequence) -> float:
    """||f g|| / (||f|| ||g||) in H^2(beta)."""
    if not (f.exact_poly and g.exact_poly):
        raise ValueError("algebra_ratio needs exact polynomials")
    lf = log_norm_hp_beta(f, 2, w)
    lg = log_norm_hp_beta(g, 2, w)
    if math.isinf(lf) or math.isinf(lg):
        raise ValueError("algebra_ratio of a zero polynomial")
    return math.exp(log_norm_hp_beta(cauchy_product(f, g), 2, w) - lf - lg)


def compose_truncated(f: TruncatedSeries, phi: TruncatedSeries, N: int) -> TruncatedSeries:
    """Coefficients of f(phi(z)) modulo z^(N+1), by Horner's scheme.

    Only exact polynomials f are accepted: with phi(0) != 0 every output
    coefficient depends on all of f, so a truncated f gives no usable bound.
    """
    if not f.exact_poly:
        raise ValueError("compose_truncated needs an exact polynomial f")
    if not phi.exact_poly and phi.bound < N:
        raise ValueError(f"phi is truncated at {phi.bound} < N={N}")
    ph = phi.coeffs[: N + 1]
    acc = np.zeros(N + 1, dtype=complex)
    for a in f.coeffs[::-1]:
        acc = _numerics.convolve(acc, ph, N + 1)
        if len(acc) < N + 1:
            acc = np.pad(acc, (0, N + 1 - len(acc)))
        acc[0] += a
    deg_f = int(np.max(np.nonzero(f.coeffs)[0], initial=0))
    nz_phi = np.nonzero(phi.coeffs)[0]
    deg_phi = int(nz_phi.max()) if nz_phi.size else 0
    exact = phi.exact_poly and deg_f * deg_phi <= N
    return TruncatedSeries(acc, exact)


def evaluate(f: TruncatedSeries, z):
    """Horner evaluation of the stored coefficients at z (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for a in f.coeffs[::-1]:
        acc = acc * z + a
    return acc[()] if acc.ndim == 0 else acc
