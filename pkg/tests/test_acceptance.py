"""Acceptance criteria, one test per criterion, at the stated tolerances.

Each test reports a PASS/FAIL line through the ``criterion`` fixture; the
lines are printed together at the end of the pytest run.
"""

import math
import time

import numpy as np
import pytest

from hardylab import autom, opmat, series, weights
from hardylab.experiments import ExperimentConfig, pair_counts, run_experiment


def test_01_zorboska_ratio(criterion):
    w = weights.weight_zorboska()
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(1, 9):
        e = series.monomial(3**k, 3**k)
        worst = max(worst, abs(series.algebra_ratio(e, e, w) / 3 ** (k / 2) - 1))
    dt = time.perf_counter() - t0
    criterion("1. Zorboska ratio", worst <= 1e-9 and dt < 1.0,
              f"max rel err {worst:.2e} (<= 1e-9), {dt:.3f} s (< 1 s)")


def test_02_anchors_and_subadditivity(criterion):
    w = weights.weight_zorboska()
    err = max(max(abs(w.log(3**k) - k * math.log(9)), abs(w.log(2 * 3**k) - 5 * k * math.log(3)))
              for k in range(1, 11))
    sub = weights.submult_constant(weights.weight_sigma(), 3**7)
    criterion("2. weight anchors / sigma subadditivity", err <= 1e-9 and sub.log_C_sub <= 0.0,
              f"max anchor log err {err:.2e} (<= 1e-9); max log defect over m+n<=3^7 = {sub.log_C_sub}")


def test_03_fk_ratio_growth(criterion):
    t0 = time.perf_counter()
    rec = run_experiment(ExperimentConfig("sigma_fk", k_range=[3, 7])).record
    # independent pair-count check against the convolution
    cn_ok = True
    for k in range(3, 6):
        mk = 3**k
        c = pair_counts(k)
        n = np.arange(math.ceil(5 * mk / 6), mk)
        cn_ok &= bool(np.all(c[n] >= mk - n))
    dt = time.perf_counter() - t0
    ok = (rec.checks["rho_strictly_increasing"] and rec.scalars["rho_slope"] >= 0.35
          and rec.checks["pair_count"] and cn_ok and dt < 60)
    criterion("3. f_k ratio growth", ok,
              f"rho increasing={rec.checks['rho_strictly_increasing']}, slope {rec.scalars['rho_slope']:.3f} (>= 0.35), "
              f"c_n >= m_k - n for k=3..5: {cn_ok}, {dt:.1f} s (< 60 s)")


def test_04_hs_identity(criterion):
    rng = np.random.default_rng(20240)
    family = [weights.weight_constant(), weights.weight_polynomial(2), weights.weight_sigma()]
    worst = 0.0
    for t in range(50):
        u = rng.standard_normal(int(rng.integers(1, 65)))
        direct, via = opmat.psi_hs_norm(u, family[t % 3])
        worst = max(worst, abs(direct - via) / via)
    criterion("4. HS identity", worst <= 1e-10, f"max rel diff {worst:.2e} over 50 u (<= 1e-10)")


def test_05_hankel_block(criterion):
    w = weights.weight_sigma()
    ratios, ok = [], True
    for k in (2, 3, 4):
        h = opmat.hankel_indicator_test(k, w)
        ok &= bool(np.all(h.block == 1.0))
        ok &= abs(opmat.l2_opnorm(h.block).value - h.block_size) <= 1e-8
        ok &= h.ratio >= math.sqrt(3**k / 12)
        ratios.append(h.ratio)
    ok &= ratios[0] < ratios[1] < ratios[2]
    criterion("5. Hankel block", ok, "ratios " + ", ".join(f"{r:.3f}" for r in ratios))


def test_06_nlogn_tail_sums(criterion):
    sums = np.array([weights.nlog_tail_sum(n) for n in range(4, 3001)])
    growth = float(sums.max() - sums[: 1500 - 3].max())
    criterion("6. n/log n tail sums", growth <= 1e-3,
              f"sup_{{n<=3000}} - sup_{{n<=1500}} = {growth:.2e} (<= 1e-3); sup = {sums.max():.4f}")


def test_07_parity_weight(criterion):
    w = weights.weight_parity(4, 3)
    N = 4096
    L = w.logs(N)
    step = float(np.exp(np.diff(L)).max())
    terms = np.exp(L + 2 * weights.bn_sequence(w, N).log_values)
    frac = float(terms[3 * N // 4 + 1 :].sum() / terms.sum())
    criterion("7. parity weight", step >= 100 and frac <= 0.01,
              f"max step {step:.1f} (>= 100), last-quarter share {frac:.2e} (<= 1%)")


def test_08_inner_parseval(criterion):
    masses = []
    for n in (1, 4, 16, 64):
        masses.append(float(np.sum(np.abs(autom.ta_power_table(0.6, n).values[n]) ** 2)))
    ok = all(1 - 1e-8 <= m <= 1 + 1e-10 for m in masses)
    criterion("8. inner-function Parseval", ok, "masses - 1: " + ", ".join(f"{m - 1:.1e}" for m in masses))


def test_09_h1_unboundedness(criterion):
    t0 = time.perf_counter()
    w = weights.weight_constant()
    c1 = autom.column_sums(0.6, w, 1, None, range(32, 513))
    c2 = autom.column_sums(0.6, w, 2, None, range(0, 513))
    dt = time.perf_counter() - t0
    ok = 0.4 <= c1.fitted_exponent <= 0.6 and c2.C_values.max() <= 1 + 1e-10 and dt < 60
    criterion("9. h^1 unboundedness", ok,
              f"p=1 exponent {c1.fitted_exponent:.4f} in [0.4, 0.6]; p=2 max C_n - 1 = {c2.C_values.max() - 1:.1e}; {dt:.1f} s")


def test_10_oscillatory_lower_bound(criterion):
    scaled = [math.sqrt(n) * autom.osc_integral(n, n).value for n in (16, 32, 64, 128, 256)]
    closed = 1 / 6 - ((2 / 3) ** 3 - (1 / 2) ** 3) / 3
    err = abs(autom.osc_integral(1, 1).value - closed)
    ok = min(scaled) >= 0.5 * scaled[0] and err <= 1e-10
    criterion("10. oscillatory lower bound", ok,
              f"min/first = {min(scaled) / scaled[0]:.3f} (>= 0.5); n=1 err {err:.1e} (<= 1e-10)")


def _product_composition_oracles(rng) -> bool:
    ok = True
    for _ in range(50):
        f = series.TruncatedSeries(rng.standard_normal(8) + 1j * rng.standard_normal(8))
        g = series.TruncatedSeries(rng.standard_normal(5) + 1j * rng.standard_normal(5))
        phi = series.TruncatedSeries(0.3 * (rng.standard_normal(4) + 1j * rng.standard_normal(4)))
        z = 0.9 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        ok &= abs(series.cauchy_product(f, g)(z) - f(z) * g(z)) <= 1e-10 * (1 + abs(f(z) * g(z)))
        h = series.compose_truncated(f, phi, 7 * 3)
        ok &= abs(h(z) - f(phi(z))) <= 1e-10 * (1 + abs(f(phi(z))))
    return bool(ok)


def _brute_B_ok() -> bool:
    ok = True
    for w in (weights.weight_constant(), weights.weight_sigma(), weights.weight_parity(4, 3),
              weights.weight_zorboska(), weights.weight_exp_sqrt()):
        beta = [math.exp(w.log(n)) for n in range(65)]
        ref = [sum(1 / (beta[k] * beta[n - k]) for k in range(n + 1)) for n in range(65)]
        ok &= np.allclose(weights.bn_sequence(w, 64).values, ref, rtol=1e-13, atol=0)
    return bool(ok)


def _vdc_ok(rng) -> bool:
    ok = True
    x = np.linspace(0.0, 2.0, 4097)
    for _ in range(20):
        f = np.polynomial.Polynomial([0.0, rng.uniform(15, 60), rng.uniform(-2, 2), rng.uniform(-0.3, 0.3)])
        delta = 0.999 * float(np.abs(f.deriv(1)(x)).min())
        M = 1.001 * float(np.abs(f.deriv(2)(x)).max())
        ok &= autom.vdc_bound_check(f, 0.0, 2.0, delta, M).ok
    return bool(ok)


def _column_vs_opnorm(rng) -> bool:
    return all(opmat.lp_column_lower(A, 2) <= opmat.l2_opnorm(A).value * (1 + 1e-12)
               for A in (rng.standard_normal((16, 12)) for _ in range(20)))


def test_11_property_suites(criterion):
    rng = np.random.default_rng(11)
    parts = {
        "product/composition": _product_composition_oracles(rng),
        "B_n brute force": _brute_B_ok(),
        "van der Corput": _vdc_ok(rng),
        "column <= opnorm": _column_vs_opnorm(rng),
    }
    criterion("11. property suites", all(parts.values()), "; ".join(f"{k}: {v}" for k, v in parts.items()))
