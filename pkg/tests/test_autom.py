import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab import autom as A
from hardylab import series as S
from hardylab import weights as W


class TestCoefficients:
    def test_ta_coeffs_formula(self):
        a = 0.3 + 0.4j
        c = A.ta_coeffs(a, 6).coeffs
        assert c[0] == a
        for n in range(1, 7):
            assert c[n] == pytest.approx((-1) ** (n - 1) * np.conj(a) ** (n - 1) * (1 - abs(a) ** 2))

    @given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.complex_numbers(max_magnitude=0.9))
    @settings(max_examples=40)
    def test_ta_evaluation(self, x, y, z):
        a = complex(x, y)
        if abs(a) >= 0.95:
            return
        f = A.ta_coeffs(a, 800)
        assert f(z) == pytest.approx((a + z) / (1 + np.conj(a) * z), abs=1e-10)

    def test_rejects_outside_disk(self):
        with pytest.raises(ValueError):
            A.AutParam(1.0)

    @pytest.mark.parametrize("n", [1, 4, 16, 64])
    def test_parseval(self, n):
        t = A.ta_power_table(0.6, n)
        mass = float(np.sum(np.abs(t.values[n]) ** 2))
        assert 1 - 1e-12 <= mass <= 1 + 1e-12

    def test_table_vs_repeated_product(self):
        a, n, M = 0.55, 7, 120
        ref = S.power(S.TruncatedSeries(A.ta_coeffs(a, M).coeffs, exact_poly=False), n).coeffs
        np.testing.assert_allclose(A.ta_power_table(a, n, M).values[n], ref, atol=1e-14)

    def test_fft_path_vs_table(self):
        a = np.array([0.5, 0.6, 2 / 3])
        for n in (3, 20):
            for m in (0, 5, 20, 33):
                fft = A.ta_power_coeff(a, n, m)
                tab = [A.ta_power_table(x, n).values[n, m] for x in a]
                np.testing.assert_allclose(fft, tab, atol=1e-13)

    def test_zero_parameter(self):
        t = A.ta_power_table(0.0, 5, 8)
        np.testing.assert_array_equal(t.values[5], np.eye(9)[5])

    def test_csv(self, tmp_path):
        t = A.ta_power_table(0.6, 2, 3)
        t.to_csv(tmp_path / "t.csv")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "n,m,re,im" and len(lines) == 1 + 3 * 4


class TestMatrixSums:
    def test_comp_matrix_scaling(self):
        w = W.weight_polynomial(2)
        M, N, p = 30, 6, 2
        A_ = A.comp_matrix(0.6, w, p, M, N)
        tab = A.ta_power_table(0.6, N, M).values
        b = w.values(M)
        for n in range(N + 1):
            np.testing.assert_allclose(A_[:, n], tab[n] * (b / b[n]) ** (1 / p), rtol=1e-13, atol=0)

    def test_comp_matrix_rejects_inf(self):
        with pytest.raises(ValueError):
            A.comp_matrix(0.6, W.weight_constant(), math.inf, 4, 4)

    def test_column_sum_matches_matrix(self):
        w = W.weight_constant()
        rep = A.column_sums(0.6, w, 1, 400, [10, 20])
        mat = A.comp_matrix(0.6, w, 1, 400, 20)
        np.testing.assert_allclose(rep.C_values, np.abs(mat[:, [10, 20]]).sum(axis=0), rtol=1e-12)

    def test_p2_parseval(self):
        rep = A.column_sums(0.6, W.weight_constant(), 2, None, range(0, 65))
        assert rep.C_values.max() <= 1 + 1e-10

    def test_row_sums_match_matrix(self):
        w = W.weight_constant()
        N = 300
        mat = A.comp_matrix(0.6, w, 4, 16, N)
        rep = A.row_sums(0.6, w, 4, N, [4, 16])
        ref = (np.abs(mat[[4, 16], :]) ** (4 / 3)).sum(axis=1)
        np.testing.assert_allclose(rep.L_values, ref, rtol=1e-10)

    def test_p1_growth_exponent(self):
        rep = A.column_sums(0.6, W.weight_constant(), 1, None, [32, 64, 128, 256])
        assert 0.4 <= rep.fitted_exponent <= 0.6


class TestOscillatory:
    def test_n1_closed_form(self):
        r = A.osc_integral(1, 1)
        assert r.value == pytest.approx(71 / 648, abs=1e-13)
        assert r.in_J

    def test_node_refinement_stable(self):
        a = A.osc_integral(32, 32, nodes=24).value
        b = A.osc_integral(32, 32, nodes=48).value
        assert a == pytest.approx(b, rel=1e-12)

    def test_against_dense_trapezoid(self):
        x = np.linspace(0.5, 2 / 3, 20001)
        y = np.abs(A.ta_power_coeff(x, 16, 16).real)
        ref = np.trapezoid(y, x) if hasattr(np, "trapezoid") else np.trapz(y, x)
        assert A.osc_integral(16, 16).value == pytest.approx(ref, rel=1e-6)

    def test_out_of_J_flag(self):
        assert not A.osc_integral(8, 20).in_J


class TestVanDerCorput:
    def test_quadratic_phase(self):
        # f = x^2 on [1, 2]: f' >= 2, f'' = 2, bound 2/2 + 2/4 = 1.5
        r = A.vdc_bound_check([0, 0, 1], 1.0, 2.0, 2.0, 2.0)
        assert r.ok and r.rhs == pytest.approx(1.5)

    def test_quadratic_against_fresnel(self):
        from scipy.special import fresnel

        s, c = fresnel(np.sqrt(2 / np.pi) * np.array([1.0, 2.0]))
        scale = np.sqrt(np.pi / 2)
        ref = abs(complex(scale * (c[1] - c[0]), scale * (s[1] - s[0])))
        assert A.vdc_bound_check([0, 0, 1], 1.0, 2.0, 2.0, 2.0).lhs == pytest.approx(ref, rel=1e-12)

    def test_rejects_false_hypothesis(self):
        with pytest.raises(ValueError):
            A.vdc_bound_check([0, 0, 1], 0.0, 1.0, 1.0, 2.0)
