"""Operator norms of finite matrices: power iteration, Schur-multiplier Hankel
matrices Psi(u), and basis-vector lower bounds for l^p norms.

Norms of truncations are lower bounds for the infinite matrices they come from.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._numerics import LOG_FLOAT_MAX
from .weights import WeightSequence, block_interval, bn_sequence, integer_range

MAX_DIM = 4096


@dataclass(frozen=True)
class NormEstimate:
    """Largest singular value estimate of a finite matrix.

    ``lower`` is ||A w|| / ||w|| for the returned witness, hence a certified
    lower bound; ``residual`` bounds the distance from ``value`` to *some*
    singular value, not necessarily the largest.
    """

    lower: float
    value: float
    iterations: int
    residual: float
    witness: np.ndarray
    converged: bool


def _power_run(A: np.ndarray, x: np.ndarray, tol: float, maxit: int):
    AH = A.conj().T
    x = x / np.linalg.norm(x)
    Ax = A @ x
    sigma = float(np.linalg.norm(Ax))
    res = math.inf
    for it in range(1, maxit + 1):
        if sigma == 0.0:
            return x, 0.0, 0.0, it, True
        y = AH @ Ax
        lam = sigma * sigma
        res = float(np.linalg.norm(y - lam * x)) / sigma
        if res <= tol * sigma:
            return x, sigma, res, it, True
        x = y / np.linalg.norm(y)
        Ax = A @ x
        sigma = float(np.linalg.norm(Ax))
    return x, sigma, res, maxit, False


def l2_opnorm(A, tol: float = 1e-10, maxit: int = 5000, seed: int = 0) -> NormEstimate:
    """Power iteration on A^H A from a seeded random start and from the all-ones vector."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("l2_opnorm needs a 2-D array")
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(seed)
    starts = [rng.standard_normal(A.shape[1]), np.ones(A.shape[1])]
    best = None
    for x0 in starts:
        run = _power_run(A, x0.astype(A.dtype if np.iscomplexobj(A) else float), tol, maxit)
        if best is None or run[1] > best[1]:
            best = run
    x, sigma, res, it, ok = best
    lower = float(np.linalg.norm(A @ x) / np.linalg.norm(x))
    return NormEstimate(lower, sigma, it, res, x, ok)


def _log_sqrt_ratio(w: WeightSequence, K: int) -> np.ndarray:
    """(log beta_{k+l} - log beta_k - log beta_l) / 2 on the K x K grid."""
    k = np.arange(K)
    return 0.5 * w.log_defect(k[:, None], k[None, :])


def psi_matrix(u, w: WeightSequence, K: int) -> np.ndarray:
    """K x K matrix u_{k+l} sqrt(beta_{k+l} / (beta_k beta_l))."""
    if K > MAX_DIM:
        raise ValueError(f"K={K} exceeds the dense cap {MAX_DIM}")
    u = np.asarray(u)
    need = 2 * K - 1
    if len(u) < need:
        u = np.pad(u, (0, need - len(u)))
    k = np.arange(K)
    U = u[k[:, None] + k[None, :]]
    scale = _log_sqrt_ratio(w, K)
    if np.any(scale[U != 0] > LOG_FLOAT_MAX):
        raise OverflowError("psi_matrix entry exceeds float range")
    out = np.zeros(U.shape, dtype=np.result_type(U, float))
    nz = U != 0
    out[nz] = U[nz] * np.exp(scale[nz])
    return out


def psi_hs_norm(u, w: WeightSequence, K: int | None = None) -> tuple[float, float]:
    """Frobenius norm of Psi(u), directly and as sqrt(sum |u_n|^2 beta_n B_n)."""
    u = np.asarray(u)
    support = np.nonzero(u)[0]
    top = int(support.max()) if support.size else 0
    if K is None:
        K = top + 1
    if top > K - 1:
        raise ValueError(f"u has support up to {top}; K={K} truncates its anti-diagonals")
    direct = float(np.linalg.norm(psi_matrix(u, w, K)))
    if support.size == 0:
        return direct, 0.0
    lb = bn_sequence(w, top).log_values + w.logs(top)
    mag = np.abs(u[support]) ** 2
    via = math.sqrt(math.fsum(mag * np.exp(lb[support])))
    return direct, via


class HankelTest(NamedTuple):
    ratio: float
    block_size: int
    opnorm: NormEstimate
    u_norm: float
    block: np.ndarray


def hankel_indicator_test(k: int, w: WeightSequence, K: int | None = None, tol: float = 1e-10) -> HankelTest:
    """||Psi(u)|| / ||u|| for u the indicator of 2 I_k = [2 m_k/3, m_k)."""
    if k < 2:
        raise ValueError("hankel_indicator_test needs k >= 2")
    mk = 3**k
    K = mk if K is None else K
    if K < mk:
        raise ValueError("K must be at least m_k")
    lo, hi = block_interval(k)
    Ik = integer_range(lo, hi)
    u = np.zeros(2 * K - 1)
    u[list(integer_range(2 * lo, 2 * hi))] = 1.0
    P = psi_matrix(u, w, K)
    est = l2_opnorm(P, tol=tol)
    u_norm = float(np.linalg.norm(u))
    block = P[Ik.start : Ik.stop, Ik.start : Ik.stop]
    return HankelTest(est.lower / u_norm, len(Ik), est, u_norm, block)


def lp_column_lower(A, p: float) -> float:
    """max_n ||A e_n||_p: a lower bound for the l^p -> l^p operator norm."""
    A = np.abs(np.asarray(A))
    return float(np.max(np.linalg.norm(A, ord=p, axis=0)))


def lq_row_lower(A, q: float) -> float:
    """max_m ||row m||_q: a lower bound for the norm of the transpose on l^q."""
    A = np.abs(np.asarray(A))
    return float(np.max(np.linalg.norm(A, ord=q, axis=1)))


def multiplication_bilinear_lower(w: WeightSequence, N: int, return_witness: bool = False):
    """sup over m, n <= N of ||e_m e_n|| / (||e_m|| ||e_n||) = sqrt(beta_{m+n}/(beta_m beta_n))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    best, arg = -math.inf, (0, 0)
    idx = np.arange(N + 1)
    for m in range(N + 1):
        d = w.log_defect(np.full(N + 1 - m, m), idx[m:])
        j = int(np.argmax(d))
        if d[j] > best:
            best, arg = float(d[j]), (m, m + j)
    value = math.exp(best / 2) if best / 2 <= LOG_FLOAT_MAX else math.inf
    return (value, arg) if return_witness else value


def matrix_to_csv(A, path) -> None:
    A = np.asarray(A)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        for row in A:
            out.writerow([repr(complex(v)) if np.iscomplexobj(A) else repr(float(v)) for v in row])
