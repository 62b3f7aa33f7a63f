import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hardylab import weights as W


def brute_B(w, N):
    """Double loop B_n = sum_k 1/(beta_k beta_{n-k}) in plain floats."""
    beta = [math.exp(w.log(n)) for n in range(N + 1)]
    return np.array([sum(1.0 / (beta[k] * beta[n - k]) for k in range(n + 1)) for n in range(N + 1)])


class TestGenerators:
    def test_constant(self):
        np.testing.assert_array_equal(W.weight_constant().values(17), np.ones(18))

    def test_parity_values(self):
        w = W.weight_parity(4, 3)
        assert w.value(0) == 1.0
        assert w.value(2) == pytest.approx(16)
        assert w.value(3) == pytest.approx(27)

    @pytest.mark.parametrize("g, gp", [(3, 3), (4, 1), (5, 2.5)])
    def test_parity_rejects_bad_params(self, g, gp):
        with pytest.raises(ValueError):
            W.weight_parity(g, gp)

    def test_exp_sqrt(self):
        w = W.weight_exp_sqrt()
        np.testing.assert_allclose([w.log(0), w.log(4), w.log(100)], [0, 2, 10])

    def test_exp_n_over_log(self):
        w = W.weight_exp_n_over_log()
        assert w.log(0) == w.log(1) == 0
        assert w.log(10) == pytest.approx(10 / math.log(10))

    def test_zorboska_anchors(self):
        w = W.weight_zorboska()
        for k in range(1, 11):
            assert w.log(3**k) == pytest.approx(k * math.log(9), abs=1e-12)
            assert w.log(2 * 3**k) == pytest.approx(5 * k * math.log(3), abs=1e-12)
        assert w.value(0) == w.value(2) == pytest.approx(9)

    def test_zorboska_history_independent(self):
        a, b = W.weight_zorboska(), W.weight_zorboska()
        for N in (10, 100, 1000, 5000):
            a.logs(N)
        np.testing.assert_array_equal(a.logs(5000), b.logs(5000))

    def test_sigma_index(self):
        np.testing.assert_array_equal(W.sigma_index([0, 1, 2, 3, 8, 9, 26, 27]), [1, 1, 1, 2, 2, 3, 3, 4])

    def test_sigma_weight(self):
        w = W.weight_sigma()
        assert w.log(9) == pytest.approx(3.0)
        assert w.log(26) == pytest.approx(26 / 3)

    def test_n_log_alpha(self):
        w = W.weight_n_log_alpha(1.0)
        assert w.value(10) == pytest.approx(10 * math.log(10))

    def test_make_weight(self):
        w = W.make_weight("parity", {"gamma": 4, "gamma_prime": 3})
        assert w.kind == "parity"
        with pytest.raises(ValueError):
            W.make_weight("nope")

    def test_memoization_identical(self):
        w = W.weight_exp_sqrt()
        first = w.logs(50).copy()
        w.logs(5000)
        np.testing.assert_array_equal(w.logs(50), first)

    def test_cache_read_only(self):
        with pytest.raises(ValueError):
            W.weight_sigma().logs(10)[0] = 5.0

    def test_concurrent_extension(self):
        w = W.weight_zorboska()
        out = [None] * 8

        def job(i):
            out[i] = w.logs(200 * (i + 1)).copy()

        threads = [threading.Thread(target=job, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        ref = W.weight_zorboska().logs(1600)
        for i, arr in enumerate(out):
            np.testing.assert_array_equal(arr, ref[: len(arr)])


class TestMoment:
    @pytest.mark.parametrize("n", [10, 100])
    def test_alpha_zero_is_one_over_n(self, n):
        assert W.moment_gamma(0, n) == pytest.approx(1 / n, rel=1e-12)

    @pytest.mark.parametrize("alpha, n", [(0.5, 10), (1.0, 10), (0.5, 200), (1.0, 1000)])
    def test_against_scipy_quad(self, alpha, n):
        # independent form: int_0^1 e^{-n x} (-log x)^alpha dx
        f = lambda x: math.exp(-n * x) * (-math.log(x)) ** alpha
        ref = integrate.quad(f, 0, 1, points=[1 / n], limit=400, epsabs=0, epsrel=1e-12)[0]
        assert W.moment_gamma(alpha, n) == pytest.approx(ref, rel=1e-9)

    def test_asymptotic(self):
        n = 10**4
        assert n * W.moment_gamma(1.0, n) / math.log(n) == pytest.approx(1, rel=0.1)

    def test_moment_weight(self):
        w = W.weight_moment(0.0)
        assert w.value(10) == pytest.approx(10.0)


class TestBSequence:
    @pytest.mark.parametrize("factory", [W.weight_constant, W.weight_sigma, W.weight_exp_sqrt,
                                         lambda: W.weight_parity(4, 3), lambda: W.weight_polynomial(2)])
    def test_brute_force(self, factory):
        w = factory()
        np.testing.assert_allclose(W.bn_sequence(w, 64).values, brute_B(w, 64), rtol=1e-13)

    def test_constant_closed_form(self):
        assert W.bn_sequence(W.weight_constant(), 5).values[5] == pytest.approx(6)

    def test_geometric_closed_form(self):
        B = W.bn_sequence(W.weight_geometric(2.0), 3).values
        assert B[3] == pytest.approx(4 / 8)

    @given(st.integers(0, 200))
    @settings(max_examples=20, deadline=None)
    def test_lower_bound(self, n):
        w = W.weight_sigma()
        B = W.bn_sequence(w, n)
        assert B.values[n] >= 1 / (w.value(0) * w.value(n)) * (1 - 1e-14)

    def test_polynomial_betaB_stable(self):
        w = W.weight_polynomial(2)
        assert W.bnbeta_sup(w, 2000) == W.bnbeta_sup(w, 4000)

    def test_parity_linear(self):
        assert W.bnbeta_n_ratio(W.weight_parity(4, 3), 1024) == pytest.approx(9.0, rel=1e-6)

    def test_log_flag(self):
        w = W.weight_polynomial(2)
        assert W.bnbeta2_partial(w, 100, log=True) == pytest.approx(math.log(W.bnbeta2_partial(w, 100)))


class TestPredicates:
    def test_oscillation_polynomial(self):
        r = W.slow_oscillation_constants(W.weight_polynomial(2), 512)
        assert r.c_best <= 1 <= r.C_best
        assert r.is_slowly_oscillating_up_to_range

    def test_oscillation_exp_sqrt_fails(self):
        assert not W.slow_oscillation_constants(W.weight_exp_sqrt(), 4096).is_slowly_oscillating_up_to_range

    def test_essential_decrease(self):
        assert W.essential_decrease_constant(W.weight_constant(), 10) == 1.0
        assert W.essential_decrease_constant(W.weight_polynomial(1), 9) == pytest.approx(10)

    def test_sigma_subadditive_exact(self):
        r = W.submult_constant(W.weight_sigma(), 3**5)
        assert r.log_C_sub == 0.0
        assert r.C_sub == 1.0

    def test_zorboska_not_submultiplicative(self):
        assert W.submult_constant(W.weight_zorboska(), 3**5).C_sub > 9

    def test_reciprocal_partial_sum(self):
        s = W.reciprocal_partial_sum(W.weight_polynomial(2), 10**5)
        assert s == pytest.approx(math.pi**2 / 6, abs=1.1e-5)

    def test_root_sequence(self):
        r = W.root_sequence(W.weight_geometric(2.0), 10)
        np.testing.assert_allclose(r, 2.0)


class TestNlog:
    def test_tail_sum_small(self):
        # n = 4: only k = 2; alpha = 4/log 4 - 2 * 2/log 2 = -2/log 2
        assert W.nlog_tail_sum(4) == pytest.approx(math.exp(-2 / math.log(2)), rel=1e-14)

    def test_tail_direct(self):
        n = 30
        tau = lambda x: x / math.log(x)
        ref = math.fsum(math.exp(tau(n) - tau(k) - tau(n - k)) for k in range(2, 16))
        assert W.nlog_tail_sum(n) == pytest.approx(ref, rel=1e-13)

    def test_block_interval(self):
        lo, hi = W.block_interval(3)
        assert W.integer_range(lo, hi) == range(9, 14)
