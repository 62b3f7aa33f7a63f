"""Weight sequences beta = (beta_n), predicates on them, and the convolution B_n.

Every weight is held as natural logarithms: some of these sequences reach
beta ~ e^820 within the index ranges we care about.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ._numerics import LOG_FLOAT_MAX, adaptive_gauss_legendre, logsumexp, safe_exp

LOG3 = math.log(3.0)

# extend(prev_logs, stop) -> logs for indices len(prev_logs) .. stop-1
Extender = Callable[[np.ndarray, int], np.ndarray]
# rational(idx) -> (numerators, denominators) with log beta = num / den exactly
RationalLog = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


@dataclass(eq=False)
class WeightSequence:
    """A positive sequence stored as memoized natural logs.

    Logs are computed on demand and cached; the cache array is replaced, never
    mutated, so readers never observe a half-extended array.
    """

    kind: str
    params: dict
    description: str
    _extend: Extender = field(repr=False)
    _rational: RationalLog | None = field(default=None, repr=False)
    _logs: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def logs(self, N: int) -> np.ndarray:
        """log beta_0 .. log beta_N (read-only)."""
        if N < 0:
            raise ValueError("N must be non-negative")
        if len(self._logs) <= N:
            with self._lock:
                cur = self._logs
                if len(cur) <= N:
                    stop = max(N + 1, 2 * len(cur), 64)
                    new = np.asarray(self._extend(cur, stop), dtype=float)
                    if new.shape != (stop - len(cur),) or not np.all(np.isfinite(new)):
                        raise ArithmeticError(f"{self.kind}: non-finite log weight")
                    arr = np.concatenate([cur, new])
                    arr.flags.writeable = False
                    self._logs = arr
        return self._logs[: N + 1]

    def log(self, n: int) -> float:
        return float(self.logs(n)[n])

    def value(self, n: int) -> float:
        return safe_exp(self.log(n))

    def values(self, N: int) -> np.ndarray:
        L = self.logs(N)
        if L.max() > LOG_FLOAT_MAX:
            raise OverflowError(f"{self.kind}: beta_n exceeds float range below n={N}")
        return np.exp(L)

    def log_defect(self, m, n) -> np.ndarray:
        """log beta_{m+n} - log beta_m - log beta_n, elementwise.

        Weights with a rational log representation get an exactly signed
        result (integer numerator, one final rounding).
        """
        m = np.asarray(m, dtype=np.int64)
        n = np.asarray(n, dtype=np.int64)
        s = m + n
        if self._rational is not None:
            ps, qs = self._rational(s)
            pm, qm = self._rational(m)
            pn, qn = self._rational(n)
            num = ps * qm * qn - pm * qs * qn - pn * qs * qm
            return num / (qs * qm * qn)
        L = self.logs(int(s.max()) if s.size else 0)
        return L[s] - L[m] - L[n]


def _closed_form(fn: Callable[[np.ndarray], np.ndarray]) -> Extender:
    def extend(prev: np.ndarray, stop: int) -> np.ndarray:
        return fn(np.arange(len(prev), stop, dtype=np.int64))

    return extend


def _check_range(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 0):
        raise IndexError("weight index must be non-negative")
    return n


# ---------------------------------------------------------------------------
# generators


def weight_constant() -> WeightSequence:
    return WeightSequence(
        "constant",
        {},
        "beta_n = 1",
        _closed_form(lambda n: np.zeros(len(n))),
        lambda n: (np.zeros_like(n), np.ones_like(n)),
    )


def weight_parity(gamma: float, gamma_prime: float) -> WeightSequence:
    """beta_0 = 1, beta_n = n^gamma for even n, n^gamma' for odd n."""
    if not (1 < gamma_prime < gamma and 2 * gamma_prime > gamma + 1):
        raise ValueError(
            f"need 1 < gamma' < gamma and 2 gamma' > gamma + 1, got gamma={gamma}, gamma'={gamma_prime}"
        )

    def fn(n):
        out = np.zeros(len(n))
        pos = n > 0
        ln = np.log(n[pos].astype(float))
        out[pos] = np.where(n[pos] % 2 == 0, gamma * ln, gamma_prime * ln)
        return out

    return WeightSequence(
        "parity", {"gamma": gamma, "gamma_prime": gamma_prime},
        f"n^{gamma} (even), n^{gamma_prime} (odd)", _closed_form(fn),
    )


def weight_exp_sqrt() -> WeightSequence:
    return WeightSequence("exp_sqrt", {}, "beta_n = exp(sqrt n)", _closed_form(lambda n: np.sqrt(n)))


def weight_exp_n_over_log() -> WeightSequence:
    """gamma_n = exp(n / log n) for n >= 2, gamma_0 = gamma_1 = 1."""

    def fn(n):
        out = np.zeros(len(n))
        big = n >= 2
        x = n[big].astype(float)
        out[big] = x / np.log(x)
        return out

    return WeightSequence("exp_n_over_log", {}, "exp(n/log n)", _closed_form(fn))


def zorboska_step(n: int) -> float:
    """log(beta_{n+1}/beta_n) for the Zorboska weight, n >= 3."""
    k = int(math.floor(math.log(n, 3)))
    while 3 ** (k + 1) <= n:
        k += 1
    while 3**k > n:
        k -= 1
    mk = 3**k
    if n <= 2 * mk - 1:
        return 3.0 * k * LOG3 / mk
    return (2.0 * LOG3 - 3.0 * k * LOG3) / mk


def weight_zorboska() -> WeightSequence:
    """Anchored at beta_{3^k} = 9^k, beta_{2 3^k} = 3^{5k}, geometric in between.

    Built by running the step recurrence forward from beta_3 = 9 with
    compensated summation of the log increments; beta_0..beta_2 copy beta_3.
    """

    # running compensation survives between extensions, so values never
    # depend on how the cache was grown
    state = {"c": 0.0}

    def extend(prev: np.ndarray, stop: int) -> np.ndarray:
        out = np.empty(stop - len(prev))
        start = len(prev)
        if start == 0:
            s, c = 2.0 * LOG3, 0.0
            out[: min(4, stop)] = s
            n0 = 3
        else:
            s, c = float(prev[-1]), state["c"]
            n0 = start - 1
        for n in range(n0, stop - 1):
            y = zorboska_step(n) - c
            t = s + y
            c = (t - s) - y
            s = t
            out[n + 1 - start] = s
        state["c"] = c
        return out

    return WeightSequence("zorboska", {}, "Zorboska counterexample, m_k = 3^k", extend)


def sigma_index(n) -> np.ndarray:
    """sigma(0) = 1 and sigma(n) = k for 3^(k-1) <= n < 3^k."""
    n = _check_range(n)
    out = np.ones(n.shape, dtype=np.int64)
    pos = n > 0
    if np.any(pos):
        top = int(n.max())
        pows = [1]
        while pows[-1] <= top:
            pows.append(pows[-1] * 3)
        out[pos] = np.searchsorted(np.array(pows, dtype=np.int64), n[pos], side="right")
    return out


def weight_sigma() -> WeightSequence:
    """beta_n = exp(n / sigma(n)); log-subadditive, with an exact rational log."""
    return WeightSequence(
        "sigma",
        {},
        "exp(n/sigma(n))",
        _closed_form(lambda n: n / sigma_index(n)),
        lambda n: (_check_range(n), sigma_index(n)),
    )


def weight_n_log_alpha(alpha: float) -> WeightSequence:
    """beta_0 = beta_1 = 1, beta_n = n (log n)^alpha for n >= 2."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")

    def fn(n):
        out = np.zeros(len(n))
        big = n >= 2
        x = n[big].astype(float)
        out[big] = np.log(x) + alpha * np.log(np.log(x))
        return out

    return WeightSequence("n_log_alpha", {"alpha": alpha}, f"n (log n)^{alpha}", _closed_form(fn))


def weight_polynomial(exponent: float) -> WeightSequence:
    """beta_n = (n + 1)^exponent."""
    return WeightSequence(
        "polynomial", {"exponent": exponent}, f"(n+1)^{exponent}",
        _closed_form(lambda n: exponent * np.log1p(n.astype(float))),
    )


def weight_geometric(q: float) -> WeightSequence:
    """beta_n = q^n."""
    if q <= 0:
        raise ValueError("q must be positive")
    return WeightSequence("geometric", {"q": q}, f"{q}^n", _closed_form(lambda n: n * math.log(q)))


# ---------------------------------------------------------------------------
# moment weight


class QuadratureError(ArithmeticError):
    """Estimated quadrature error exceeded the requested tolerance."""


def moment_gamma(alpha: float, n: int, quad_nodes: int = 256, tol: float = 1e-12) -> float:
    """gamma_n = int_0^1 t^(n-1) omega(t) dt with omega(t) = (log+ (1/log(1/t)))^alpha.

    With t = exp(-x) the integral becomes int_0^1 e^(-n x) (-log x)^alpha dx
    (plus e^(-n)/n when alpha = 0, where omega = 1 on the whole interval);
    x = exp(-u) then removes the logarithmic endpoint singularity.
    ``tol`` is relative to 1/n.
    """
    if n < 2:
        raise ValueError("moment_gamma needs n >= 2")
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")

    def integrand(u):
        return np.exp(-n * np.exp(-u) - u) * (u**alpha if alpha else 1.0)

    # integrand <= u^alpha e^-u beyond log n; stop where that is negligible
    upper = math.log(n) + 60.0
    per_panel = max(8, quad_nodes // 16)
    res = adaptive_gauss_legendre(integrand, 0.0, upper, nodes=per_panel, tol=tol / n)
    if res.error > tol / n:
        raise QuadratureError(f"moment_gamma(alpha={alpha}, n={n}): error {res.error:.3g}")
    value = res.value
    if alpha == 0:
        value += math.exp(-n) / n
    return value


def weight_moment(alpha: float, quad_nodes: int = 256) -> WeightSequence:
    """beta_0 = beta_1 = 1, beta_n = n^2 gamma_n(alpha) for n >= 2."""

    def fn(n):
        return np.array(
            [0.0 if k < 2 else 2 * math.log(k) + math.log(moment_gamma(alpha, int(k), quad_nodes)) for k in n]
        )

    return WeightSequence("moment", {"alpha": alpha}, f"n^2 gamma_n, alpha={alpha}", _closed_form(fn))


WEIGHTS: dict[str, Callable[..., WeightSequence]] = {
    "constant": weight_constant,
    "parity": weight_parity,
    "exp_sqrt": weight_exp_sqrt,
    "exp_n_over_log": weight_exp_n_over_log,
    "zorboska": weight_zorboska,
    "sigma": weight_sigma,
    "n_log_alpha": weight_n_log_alpha,
    "moment": weight_moment,
    "polynomial": weight_polynomial,
    "geometric": weight_geometric,
}


def make_weight(weight_id: str, params: dict | None = None) -> WeightSequence:
    """Build a weight from its string id and a parameter map (CLI config form)."""
    try:
        factory = WEIGHTS[weight_id]
    except KeyError:
        raise ValueError(f"unknown weight id {weight_id!r}; choose from {sorted(WEIGHTS)}") from None
    return factory(**(params or {}))


# ---------------------------------------------------------------------------
# B_n and predicates


@dataclass(frozen=True)
class BSeq:
    """B_n = sum_k 1/(beta_k beta_{n-k}), n = 0..N, held as logs."""

    log_values: np.ndarray
    weight: WeightSequence

    @property
    def N(self) -> int:
        return len(self.log_values) - 1

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)


def bn_sequence(w: WeightSequence, N: int) -> BSeq:
    if N < 0:
        raise ValueError("N must be non-negative")
    L = w.logs(N)
    out = np.empty(N + 1)
    for n in range(N + 1):
        half = n // 2
        k = np.arange(half + 1)
        t = -(L[k] + L[n - k])
        mx = t.max()
        e = np.exp(t - mx)
        # k and n-k give the same term; the middle term (n even) appears once
        e[: (n + 1) // 2] *= 2.0
        out[n] = mx + math.log(math.fsum(e))
    return BSeq(out, w)


def _log_bnbeta(w: WeightSequence, N: int) -> np.ndarray:
    return w.logs(N) + bn_sequence(w, N).log_values


def _report(log_value: float, log: bool) -> float:
    return log_value if log else safe_exp(log_value)


def bnbeta_sup(w: WeightSequence, N: int, log: bool = False) -> float:
    """max_{n <= N} beta_n B_n."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return _report(float(_log_bnbeta(w, N).max()), log)


def bnbeta_n_ratio(w: WeightSequence, N: int, log: bool = False) -> float:
    """max_{1 <= n <= N} beta_n B_n / n."""
    if N < 1:
        raise ValueError("N must be >= 1")
    lb = _log_bnbeta(w, N)[1:]
    return _report(float((lb - np.log(np.arange(1, N + 1))).max()), log)


def bnbeta2_partial(w: WeightSequence, N: int, log: bool = False) -> float:
    """sum_{n <= N} beta_n B_n^2."""
    if N < 1:
        raise ValueError("N must be >= 1")
    lb = bn_sequence(w, N).log_values
    return _report(logsumexp(w.logs(N) + 2 * lb), log)


@dataclass(frozen=True)
class OscillationReport:
    range_max: int
    c_best: float
    C_best: float
    is_slowly_oscillating_up_to_range: bool


def slow_oscillation_constants(w: WeightSequence, N: int, cap: float = 1e3) -> OscillationReport:
    """Tightest c, C with c beta_n <= beta_m <= C beta_n over n/2 <= m <= 2n <= ..., m, n <= N."""
    if N < 2:
        raise ValueError("N must be >= 2")
    L = w.logs(N)
    lo, hi = 0.0, 0.0
    for n in range(1, N + 1):
        seg = L[(n + 1) // 2 : min(2 * n, N) + 1] - L[n]
        lo = min(lo, float(seg.min()))
        hi = max(hi, float(seg.max()))
    c = math.exp(lo)
    C = math.exp(hi) if hi <= LOG_FLOAT_MAX else math.inf
    return OscillationReport(N, c, C, (hi - lo) <= math.log(cap))


def essential_decrease_constant(w: WeightSequence, N: int) -> float:
    """max over m >= n of beta_m / beta_n, n, m <= N (inf past float range)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    L = w.logs(N)
    suffix_max = np.maximum.accumulate(L[::-1])[::-1]
    worst = float((suffix_max - L).max())
    return math.exp(worst) if worst <= LOG_FLOAT_MAX else math.inf


@dataclass(frozen=True)
class SubmultReport:
    range_max: int
    C_sub: float
    log_C_sub: float


def submult_constant(w: WeightSequence, N: int) -> SubmultReport:
    """max over m + n <= N of beta_{m+n} / (beta_m beta_n)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    worst = -math.inf
    for m in range(N + 1):
        n = np.arange(N - m + 1)
        worst = max(worst, float(w.log_defect(np.full_like(n, m), n).max()))
    return SubmultReport(N, math.exp(worst) if worst <= LOG_FLOAT_MAX else math.inf, worst)


def reciprocal_partial_sum(w: WeightSequence, N: int) -> float:
    """sum_{n <= N} 1/beta_n."""
    return math.exp(logsumexp(-w.logs(N)))


def root_sequence(w: WeightSequence, N: int) -> np.ndarray:
    """beta_n^(1/n) for n = 1..N."""
    n = np.arange(1, N + 1)
    return np.exp(w.logs(N)[1:] / n)


# ---------------------------------------------------------------------------
# exponential sums for exp(n / log n)


def _tau(x: np.ndarray) -> np.ndarray:
    return x / np.log(x)


def nlog_exponents(n: int, k) -> np.ndarray:
    """alpha_{n,k} = n/log n - k/log k - (n-k)/log(n-k)."""
    k = np.asarray(k, dtype=float)
    return _tau(float(n)) - _tau(k) - _tau(n - k)


def nlog_tail_sum(n: int) -> float:
    """sum_{k=2}^{floor(n/2)} exp(alpha_{n,k})."""
    if n < 4:
        raise ValueError("nlog_tail_sum needs n >= 4")
    return math.fsum(np.exp(nlog_exponents(n, np.arange(2, n // 2 + 1))))


def block_interval(k: int) -> tuple[Fraction, Fraction]:
    """I_k = [m_k/3, m_k/2) with m_k = 3^k, as exact rationals."""
    mk = 3**k
    return Fraction(mk, 3), Fraction(mk, 2)


def integer_range(lo, hi) -> range:
    """Integers n with lo <= n < hi, for rational or real endpoints."""
    lo = Fraction(lo)
    hi = Fraction(hi)
    return range(math.ceil(lo), math.ceil(hi))
