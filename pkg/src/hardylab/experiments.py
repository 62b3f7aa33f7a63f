"""Experiment drivers: each one sweeps a parameter range, emits CSV rows, and
summarizes the sweep as an ExperimentRecord with pass/fail checks.

Thresholds live in ``DEFAULTS`` and can be overridden per run through the
config's ``thresholds`` map.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import autom, opmat, series, weights
from ._numerics import fit_exponent, logsumexp

# Every formula an experiment may tag a scalar with. The manifest test checks
# that the experiments jointly cover all of them.
FORMULAS = {
    "h2_beta_norm": "||f||^2 = sum |a_n|^2 beta_n",
    "hp_beta_norm": "||f||^p = sum |a_n|^p beta_n",
    "analyticity_condition": "liminf beta_n^(1/n) >= 1",
    "essentially_decreasing": "beta_m <= C beta_n for m >= n",
    "slowly_oscillating": "c beta_n <= beta_m <= C beta_n for n/2 <= m <= 2n",
    "automorphism": "T_a(z) = (a + z)/(1 + conj(a) z)",
    "automorphism_coefficients": "coef_n(T_a) = (-1)^(n-1) conj(a)^(n-1) (1 - |a|^2)",
    "moment_weight": "gamma_n = int t^(n-1) omega(t) dt ~ (log n)^alpha / n",
    "wiener_embedding": "sum |a_n| <= ||f|| (sum 1/beta_n)^(1/2)",
    "zorboska_weight": "beta_{3^k} = 9^k, beta_{2 3^k} = 3^(5k), geometric steps",
    "zorboska_ratio": "||e_{2m_k}|| / ||e_{m_k}||^2 = 3^(k/2)",
    "convolution_B": "B_n = sum_k 1/(beta_k beta_{n-k})",
    "bounded_betaB": "beta_n B_n = O(1)",
    "betaB_linear": "beta_n B_n = O(n)",
    "betaB2_summable": "sum beta_n B_n^2 < inf",
    "parity_weight": "beta_n = n^gamma (even), n^gamma' (odd)",
    "exp_sqrt_weight": "beta_n = exp(sqrt n)",
    "nlogn_exponent_sums": "sup_n sum_k exp(alpha_{n,k}) < inf",
    "psi_matrix": "Psi(u)_{k,l} = u_{k+l} sqrt(beta_{k+l}/(beta_k beta_l))",
    "hs_identity": "||Psi(u)||_HS^2 = sum |u_n|^2 beta_n B_n",
    "sigma_weight": "beta_n = exp(n / sigma(n))",
    "indicator_block_norm": "||(1)_{I_k x I_k}|| = |I_k|",
    "f_ratio_growth": "||f_k^2|| / ||f_k||^2 -> inf",
    "f_norm_upper": "||f_k||^2 <~ k exp(m_k / 2k)",
    "f_square_lower": "||f_k^2|| >~ k^(3/2) exp(m_k / 2k)",
    "pair_count": "c_n >= m_k - n on [5 m_k/6, m_k)",
    "composition_matrix": "a_{m,n} = coef_m(T_a^n) (beta_m/beta_n)^(1/p)",
    "column_sums": "C_n = sum_m |coef_m(T_a^n)|^p beta_m / beta_n",
    "row_sums": "L_m = sum_n |coef_m(T_a^n)|^q (beta_m/beta_n)^(q/p)",
    "intervals_IJ": "I = [1/2, 2/3], J = [1/alpha, alpha], J_l = [l/sqrt(alpha), sqrt(alpha) l]",
    "van_der_corput": "|int exp(i f)| <= 2/delta + M (B-A)/delta^2",
    "oscillatory_lower_bound": "int_I |coef_m(T_a^n)|^s da >~ n^(-s/2)",
}


@dataclass
class ExperimentConfig:
    experiment: str
    weight: dict | None = None
    k_range: list | None = None
    n_range: list | None = None
    caps: dict = field(default_factory=dict)
    quad_nodes: int | None = None
    thresholds: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        for name in ("k_range", "n_range"):
            r = getattr(self, name)
            if r is not None and len(r) == 0:
                raise ValueError(f"{name} must be non-empty")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def resolved(self) -> "ExperimentConfig":
        """Fill unset fields from the experiment's shipped defaults."""
        d = DEFAULTS[self.experiment]
        return ExperimentConfig(
            experiment=self.experiment,
            weight=self.weight if self.weight is not None else d.get("weight"),
            k_range=self.k_range if self.k_range is not None else d.get("k_range"),
            n_range=self.n_range if self.n_range is not None else d.get("n_range"),
            caps={**d.get("caps", {}), **self.caps},
            quad_nodes=self.quad_nodes if self.quad_nodes is not None else d.get("quad_nodes"),
            thresholds={**d.get("thresholds", {}), **self.thresholds},
            params={**d.get("params", {}), **self.params},
            out=self.out,
            seed=self.seed,
        )

    def make_weight(self) -> weights.WeightSequence:
        if self.weight is None:
            raise ValueError(f"{self.experiment}: no weight configured")
        return weights.make_weight(self.weight["id"], self.weight.get("params"))

    def k_values(self) -> list[int]:
        lo, hi = self.k_range
        return list(range(lo, hi + 1))


@dataclass
class ExperimentRecord:
    experiment: str
    params: dict
    scalars: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def scalar(self, name: str, value, formula: str) -> None:
        if formula not in FORMULAS:
            raise KeyError(f"unknown formula id {formula!r}")
        self.scalars[name] = _plain(value)
        self.formulas[name] = formula

    def check(self, name: str, ok) -> None:
        self.checks[name] = bool(ok)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class ExperimentResult:
    record: ExperimentRecord
    rows: list[dict]


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _strictly_increasing(xs) -> bool:
    return all(b > a for a, b in zip(xs, xs[1:]))


# ---------------------------------------------------------------------------
# experiments


def exp_zorboska_ratio(cfg: ExperimentConfig) -> ExperimentResult:
    w = cfg.make_weight()
    th = cfg.thresholds
    rec = ExperimentRecord("zorboska_ratio", {"k_range": cfg.k_range})
    rows = []
    worst = 0.0
    for k in cfg.k_values():
        mk = 3**k
        e = series.monomial(mk, mk)
        ratio = series.algebra_ratio(e, e, w)
        expected = 3 ** (k / 2)
        rel = abs(ratio - expected) / expected
        worst = max(worst, rel)
        rows.append({"k": k, "m_k": mk, "ratio": ratio, "expected": expected, "rel_err": rel,
                     "reciprocal_sum": weights.reciprocal_partial_sum(w, 2 * mk)})
    rec.scalar("max_ratio_rel_err", worst, "zorboska_ratio")
    rec.check("ratio_equals_3^(k/2)", worst <= th["ratio_rtol"])

    anchor_err = 0.0
    for k in range(1, cfg.caps["anchor_k_max"] + 1):
        anchor_err = max(anchor_err,
                         abs(w.log(3**k) - k * math.log(9)),
                         abs(w.log(2 * 3**k) - 5 * k * math.log(3)))
    rec.scalar("max_anchor_log_err", anchor_err, "zorboska_weight")
    rec.check("anchors_match_closed_form", anchor_err <= th["anchor_atol"])

    kmax = cfg.k_values()[-1]
    rec.scalar("reciprocal_sum", weights.reciprocal_partial_sum(w, 2 * 3**kmax), "wiener_embedding")
    rec.scalar("h2_norm_e_mk", series.norm_hp_beta(series.monomial(3**kmax, 3**kmax), 2, w), "h2_beta_norm")

    # maximal step ratio over [3^j, 3^(j+1)] is m_j^(3/m_j), decreasing to 1
    step_max = []
    for j in range(3, 8):
        L = w.logs(3 ** (j + 1))
        step_max.append(math.exp(float(np.max(np.diff(L[3**j : 3 ** (j + 1) + 1])))))
    mj = 3**6
    rec.scalar("max_step_ratio_[3^6,3^7]", step_max[3], "zorboska_weight")
    rec.check("step_ratio_matches_recurrence",
              abs(step_max[3] - mj ** (3 / mj)) <= 1e-12 * step_max[3])
    rec.check("step_ratio_decreasing", _strictly_increasing(step_max[::-1]))

    bil, wit = opmat.multiplication_bilinear_lower(w, 3**kmax, return_witness=True)
    rec.scalar("bilinear_lower", bil, "zorboska_ratio")
    rec.check("bilinear_lower_witness", bil >= 3 ** (kmax / 2) * (1 - 1e-12))
    return ExperimentResult(rec, rows)


def _f_block(k: int) -> series.TruncatedSeries:
    lo, hi = weights.block_interval(k)
    return series.indicator_block(lo, hi)


def pair_counts(k: int) -> np.ndarray:
    """c_n = #{i in I_k : n - i in I_k} by direct enumeration."""
    lo, hi = weights.block_interval(k)
    Ik = list(weights.integer_range(lo, hi))
    counts = np.zeros(2 * Ik[-1] + 1, dtype=np.int64)
    for i in Ik:
        for j in Ik:
            counts[i + j] += 1
    return counts


def exp_sigma_fk(cfg: ExperimentConfig) -> ExperimentResult:
    w = cfg.make_weight()
    th = cfg.thresholds
    rec = ExperimentRecord("sigma_fk", {"k_range": cfg.k_range})
    rows = []
    rhos, ks = [], cfg.k_values()
    majo_ok = mino_ok = cn_ok = True
    cn_slack = math.inf
    for k in ks:
        mk = 3**k
        f = _f_block(k)
        f2 = series.cauchy_product(f, f)
        log_f = series.log_norm_hp_beta(f, 2, w)
        log_f2 = series.log_norm_hp_beta(f2, 2, w)
        rho = math.exp(log_f2 - 2 * log_f)
        rhos.append(rho)
        # geometric-series bound on ||f||^2 and the c_n lower sum for ||f^2||^2
        log_upper = mk / (2 * k) - math.log1p(-math.exp(-1 / k))
        n = np.arange(math.ceil(Fraction(5 * mk, 6)), mk)
        log_lower = logsumexp(2 * np.log((mk - n).astype(float)) + n / k)
        majo_ok &= 2 * log_f <= log_upper + 1e-12
        mino_ok &= 2 * log_f2 >= log_lower - 1e-12
        if k <= cfg.caps["cn_k_max"]:
            c = np.rint(f2.coeffs.real).astype(np.int64)
            brute = pair_counts(k)
            cn_ok &= np.array_equal(c[: len(brute)], brute) and np.all(c[len(brute):] == 0)
            cn_ok &= bool(np.all(c[n] >= mk - n))
            cn_slack = min(cn_slack, int(np.min(c[n] - (mk - n))))
        rows.append({
            "k": k, "m_k": mk, "block_size": len(weights.integer_range(*weights.block_interval(k))),
            "log_norm_f_sq": 2 * log_f, "log_norm_f2": log_f2, "rho": rho,
            "f_norm_const": math.exp(2 * log_f - math.log(k) - mk / (2 * k)),
            "f2_norm_const": math.exp(log_f2 - 1.5 * math.log(k) - mk / (2 * k)),
        })
    slope = fit_exponent(ks, rhos)
    rec.scalar("rho_last", rhos[-1], "f_ratio_growth")
    rec.scalar("rho_slope", slope, "f_ratio_growth")
    rec.scalar("f_norm_const_max", max(r["f_norm_const"] for r in rows), "f_norm_upper")
    rec.scalar("f2_norm_const_min", min(r["f2_norm_const"] for r in rows), "f_square_lower")
    rec.check("rho_strictly_increasing", _strictly_increasing(rhos))
    rec.check("rho_slope", slope >= th["rho_slope_min"])
    rec.check("f_norm_geometric_bound", majo_ok)
    rec.check("f2_norm_pair_count_bound", mino_ok)
    rec.scalar("pair_count_min_slack", cn_slack, "pair_count")
    rec.check("pair_count", cn_ok)

    N = 3 ** cfg.caps["subadd_k"]
    sub = weights.submult_constant(w, N)
    rec.scalar("log_submult_constant", sub.log_C_sub, "sigma_weight")
    rec.check("log_subadditive_exact", sub.log_C_sub <= 0.0)
    roots = weights.root_sequence(w, N)
    rec.scalar("root_at_N", roots[-1], "analyticity_condition")
    tail_max = [float(roots[3**j - 1 : 3 ** (j + 1) - 1].max()) for j in range(1, cfg.caps["subadd_k"])]
    rec.check("root_sequence_decreasing_to_1", _strictly_increasing(tail_max[::-1]) and roots.min() >= 1.0)
    return ExperimentResult(rec, rows)


def _nlog_majorant(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    ln = np.log(n)
    return np.log(n / 2) - np.sqrt(n) * math.log(2) / (ln * (ln - math.log(2)))


def exp_nlogn_bound(cfg: ExperimentConfig) -> ExperimentResult:
    th = cfg.thresholds
    n_max = cfg.n_range[1]
    if n_max < 200:
        raise ValueError("nlogn_bound needs n_max >= 200")
    rec = ExperimentRecord("nlogn_bound", {"n_max": n_max})
    k_all = np.arange(2, 10**6)
    S = math.fsum(np.exp(-k_all / (2 * np.log(k_all))))
    rows = []
    small_ok = large_ok = True
    for n in range(4, n_max + 1):
        k = np.arange(2, n // 2 + 1)
        t = np.exp(weights.nlog_exponents(n, k))
        split = k <= math.isqrt(n)
        small, large = math.fsum(t[split]), math.fsum(t[~split])
        total = weights.nlog_tail_sum(n)
        small_ok &= small <= S
        if n >= 16:
            large_ok &= large <= math.exp(float(_nlog_majorant(n)))
        rows.append({"n": n, "tail_sum": total, "small_k": small, "large_k": large})
    totals = np.array([r["tail_sum"] for r in rows])
    ns = np.arange(4, n_max + 1)
    sup_all = float(totals.max())
    sup_half = float(totals[ns <= n_max // 2].max())
    rec.scalar("sup_tail_sum", sup_all, "nlogn_exponent_sums")
    rec.scalar("argmax_n", int(ns[totals.argmax()]), "nlogn_exponent_sums")
    rec.scalar("sup_growth_second_half", sup_all - sup_half, "nlogn_exponent_sums")
    rec.scalar("majorant_S", S, "nlogn_exponent_sums")
    rec.check("sup_stable", sup_all - sup_half <= th["sup_growth_max"])
    rec.check("small_k_below_S", small_ok)
    rec.check("large_k_below_majorant", large_ok)

    grid = np.exp(np.linspace(math.log(16), math.log(1e14), 20001))
    g = _nlog_majorant(grid)
    i0 = int(g.argmax())
    rec.scalar("majorant_peak_n", float(grid[i0]), "nlogn_exponent_sums")
    rec.check("majorant_decreasing_beyond_peak", bool(np.all(np.diff(g[i0:]) < 0)))
    return ExperimentResult(rec, rows)


def _J_block(l: int, alpha: float) -> range:
    return range(math.ceil(l / math.sqrt(alpha) - 1e-12), math.floor(math.sqrt(alpha) * l + 1e-12) + 1)


def exp_lp_growth(cfg: ExperimentConfig) -> ExperimentResult:
    w = cfg.make_weight()
    th = cfg.thresholds
    a = cfg.params["a"]
    alpha = cfg.params["alpha_J"]
    lo, hi = cfg.n_range
    rec = ExperimentRecord("lp_growth", {"a": a, "n_range": cfg.n_range, "weight": cfg.weight})
    rows = []
    if not autom.INTERVAL_I[0] <= a <= autom.INTERVAL_I[1]:
        raise ValueError(f"a={a} lies outside I")

    window = list(range(lo, hi + 1))
    c1 = autom.column_sums(a, w, 1, None, window)
    rec.scalar("exponent_p1_columns", c1.fitted_exponent, "column_sums")
    # at beta = 1 the column sum C_n is the h^1 norm of T_a^n
    row = autom.ta_power_table(a, hi).values[hi]
    h1 = series.norm_hp_beta(series.TruncatedSeries(row, False), 1, weights.weight_constant())
    rec.scalar("h1_norm_T_a^n_last", h1, "hp_beta_norm")
    if w.kind == "constant":
        rec.check("h1_norm_equals_column_sum", abs(h1 - c1.C_values[-1]) <= 1e-10 * h1)
    rec.check("p1_exponent_window", th["p1_exp_lo"] <= c1.fitted_exponent <= th["p1_exp_hi"])

    c2 = autom.column_sums(a, w, 2, None, range(0, hi + 1))
    rec.scalar("max_C_p2", float(c2.C_values.max()), "column_sums")
    if w.kind == "constant":
        rec.check("p2_parseval_bounded", c2.C_values.max() <= 1 + th["parseval_atol"])

    dyadic = [m for m in (2**j for j in range(20)) if lo <= m <= hi]
    r4 = autom.row_sums(a, w, 4, None, dyadic)
    rec.scalar("exponent_p4_rows", r4.fitted_exponent, "row_sums")
    rec.check("p4_rows_grow", r4.fitted_exponent > 0)

    for n, C1 in zip(c1.indices, c1.C_values):
        rows.append({"kind": "column", "p": 1, "index": int(n), "sum": C1})
    for m, Lm in zip(r4.indices, r4.L_values):
        rows.append({"kind": "row", "p": 4, "index": int(m), "sum": Lm})

    # the matrix itself: its column l^1 norms are the C_n
    ncols = cfg.caps["matrix_cols"]
    M = autom.default_truncation(a, ncols)
    A = autom.comp_matrix(a, w, 1, M, ncols)
    colmax = opmat.lp_column_lower(A, 1)
    c_small = autom.column_sums(a, w, 1, M, range(ncols + 1))
    rec.scalar("lp_column_lower_p1", colmax, "composition_matrix")
    rec.check("matrix_columns_match_sums", abs(colmax - c_small.C_values.max()) <= 1e-10 * colmax)

    cs_ok = True
    for l in dyadic:
        J = _J_block(l, alpha)
        Lw = w.logs(J[-1])[J.start :]
        prod = math.exp(logsumexp(Lw) + logsumexp(-Lw))
        cs_ok &= len(J) ** 2 <= prod * (1 + 1e-12)
        q = l ** (-1 / 2) * prod / l
        rows.append({"kind": "J_block", "p": 1, "index": l, "sum": q})
    rec.scalar("J_block_alpha", alpha, "intervals_IJ")
    rec.check("cauchy_schwarz_floor", cs_ok)
    return ExperimentResult(rec, rows)


def exp_osc_lower(cfg: ExperimentConfig) -> ExperimentResult:
    th = cfg.thresholds
    nodes = cfg.quad_nodes
    rec = ExperimentRecord("osc_lower", {"n_set": cfg.n_range, "s": cfg.params["s"]})
    s = float(cfg.params["s"])
    if s <= 0:
        raise ValueError("s must be positive")
    if any(not 8 <= n <= 512 for n in cfg.n_range):
        raise ValueError("osc_lower n values must lie in [8, 512]")
    rows = []
    scaled = []
    holder_ok = in_J = True
    width = autom.INTERVAL_I[1] - autom.INTERVAL_I[0]
    for n in cfg.n_range:
        r1 = autom.osc_integral(n, n, s, nodes)
        r2 = autom.osc_integral(n, n, 2 * s, nodes)
        # Cauchy-Schwarz: (int |c|^s)^2 <= |I| int |c|^(2s)
        holder_ok &= r2.value * width >= r1.value**2 * (1 - 1e-12)
        in_J &= r1.in_J
        scaled.append(n ** (s / 2) * r1.value)
        rows.append({"n": n, "s": s, "int_s": r1.value, "err_s": r1.error, "int_2s": r2.value,
                     "scaled_int": scaled[-1]})
    rec.scalar("min_scaled_int", min(scaled), "oscillatory_lower_bound")
    rec.scalar("first_scaled_int", scaled[0], "oscillatory_lower_bound")
    rec.check("constant_order_stability", min(scaled) >= th["stability_ratio"] * scaled[0])
    rec.check("holder_chain", holder_ok)
    rec.check("ratio_in_J", in_J)

    # n = m = 1: coefficient 1 - a^2, integral 1/6 - (8/27 - 1/8)/3 = 71/648
    closed = 1 / 6 - ((2 / 3) ** 3 - (1 / 2) ** 3) / 3
    r = autom.osc_integral(1, 1, 1.0, nodes)
    rec.scalar("n1_integral", r.value, "oscillatory_lower_bound")
    rec.check("n1_closed_form", abs(r.value - closed) <= th["closed_form_atol"])
    rec.scalar("coef_T_a_1_at_half", autom.ta_coeffs(0.5, 1).coeffs[1].real, "automorphism_coefficients")
    rec.scalar("T_a_at_zero", complex(autom.ta_coeffs(0.5, 8)(0.0)).real, "automorphism")

    rng = np.random.default_rng(cfg.seed)
    vdc_ok, margin = True, math.inf
    for _ in range(cfg.caps["vdc_trials"]):
        coef = [0.0, rng.uniform(15, 60), rng.uniform(-2, 2), rng.uniform(-0.3, 0.3)]
        f = np.polynomial.Polynomial(coef)
        x = np.linspace(0.0, 2.0, 4097)
        delta = 0.999 * float(np.abs(f.deriv(1)(x)).min())
        M = 1.001 * float(np.abs(f.deriv(2)(x)).max())
        res = autom.vdc_bound_check(f, 0.0, 2.0, delta, M)
        vdc_ok &= res.ok
        margin = min(margin, res.rhs - res.lhs)
    rec.scalar("vdc_min_margin", margin, "van_der_corput")
    rec.check("vdc_bound", vdc_ok)
    return ExperimentResult(rec, rows)


def exp_hinf_embedding(cfg: ExperimentConfig) -> ExperimentResult:
    w = cfg.make_weight()
    deg = cfg.caps["degree"]
    # divergent reciprocal sums (beta = 1, n log n, ...) fail the Cauchy-Schwarz premise
    s1 = weights.reciprocal_partial_sum(w, 2048)
    s2 = weights.reciprocal_partial_sum(w, 4096)
    if s2 - s1 > cfg.thresholds["reciprocal_tail_rtol"] * s1:
        raise ValueError(f"sum 1/beta_n does not look convergent for {w.description}")
    rec = ExperimentRecord("hinf_embedding", {"weight": cfg.weight, "trials": cfg.caps["trials"]})
    rng = np.random.default_rng(cfg.seed)
    const = math.sqrt(weights.reciprocal_partial_sum(w, deg))
    slack = math.inf
    rows = []
    for t in range(cfg.caps["trials"]):
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        c *= np.exp(-0.5 * w.logs(deg)) * rng.uniform(0.1, 10.0)
        f = series.TruncatedSeries(c)
        l1 = math.fsum(np.abs(c))
        rhs = series.norm_hp_beta(f, 2, w) * const
        slack = min(slack, rhs - l1)
        rows.append({"trial": t, "l1": l1, "bound": rhs})
    for m in (0, 1, deg):
        e = series.monomial(m, deg)
        slack = min(slack, series.norm_hp_beta(e, 2, w) * const - 1.0)
    rec.scalar("min_slack", slack, "wiener_embedding")
    rec.scalar("reciprocal_sum", const**2, "wiener_embedding")
    rec.check("l1_below_weighted_l2", slack >= -1e-12 * const)
    return ExperimentResult(rec, rows)


def exp_hankel(cfg: ExperimentConfig) -> ExperimentResult:
    w = cfg.make_weight()
    th = cfg.thresholds
    rec = ExperimentRecord("hankel", {"k_range": cfg.k_range})
    rows, ratios = [], []
    ones_ok = norm_ok = bound_ok = True
    for k in cfg.k_values():
        h = opmat.hankel_indicator_test(k, w)
        bn = opmat.l2_opnorm(h.block)
        ones_ok &= bool(np.all(h.block == 1.0))
        norm_ok &= abs(bn.value - h.block_size) <= th["block_norm_atol"]
        floor = math.sqrt(3**k / 12)
        bound_ok &= h.ratio >= floor
        ratios.append(h.ratio)
        rows.append({"k": k, "m_k": 3**k, "block_size": h.block_size, "block_norm": bn.value,
                     "psi_norm": h.opnorm.lower, "u_norm": h.u_norm, "ratio": h.ratio, "floor": floor,
                     "converged": h.opnorm.converged})
    rec.scalar("ratio_last", ratios[-1], "psi_matrix")
    rec.scalar("block_norm_last", rows[-1]["block_norm"], "indicator_block_norm")
    rec.check("block_all_ones", ones_ok)
    rec.check("block_norm_equals_size", norm_ok)
    rec.check("ratio_above_floor", bound_ok)
    rec.check("ratio_increasing", _strictly_increasing(ratios))
    return ExperimentResult(rec, rows)


def exp_bn_criteria(cfg: ExperimentConfig) -> ExperimentResult:
    w = cfg.make_weight()
    th = cfg.thresholds
    N = cfg.n_range[1]
    rec = ExperimentRecord("bn_criteria", {"weight": cfg.weight, "N": N})
    L = w.logs(N)
    lb = weights.bn_sequence(w, N).log_values
    terms = np.exp(L + 2 * lb)
    partial = np.cumsum(terms)
    last_quarter = float(partial[-1] - partial[(3 * N) // 4]) / float(partial[-1])
    step = float(np.exp(np.diff(L)).max())
    rec.scalar("max_step_ratio", step, "parity_weight")
    rec.scalar("betaB2_partial", float(partial[-1]), "betaB2_summable")
    rec.scalar("last_quarter_fraction", last_quarter, "betaB2_summable")
    rec.scalar("betaB_sup", weights.bnbeta_sup(w, N), "bounded_betaB")
    rec.scalar("betaB_over_n_sup", weights.bnbeta_n_ratio(w, N), "betaB_linear")
    rec.scalar("B_0", float(np.exp(lb[0])), "convolution_B")
    rec.check("step_unbounded", step >= th["step_ratio_min"])
    rec.check("betaB2_converges", last_quarter <= th["last_quarter_max"])
    rows = [{"n": n, "betaB": float(np.exp(L[n] + lb[n])), "betaB2_partial": float(partial[n])}
            for n in range(0, N + 1, max(1, N // 512))]

    # a slowly oscillating, summable companion: beta_n B_n settles
    ref = weights.weight_polynomial(2)
    s1 = weights.bnbeta_sup(ref, N // 2)
    s2 = weights.bnbeta_sup(ref, N)
    rec.scalar("poly2_betaB_sup", s2, "bounded_betaB")
    rec.check("poly2_betaB_stabilizes", s1 <= s2 <= s1 * (1 + th["stabilize_rtol"]))
    return ExperimentResult(rec, rows)


def exp_moment(cfg: ExperimentConfig) -> ExperimentResult:
    th = cfg.thresholds
    rec = ExperimentRecord("moment", {"alphas": cfg.params["alphas"], "n_set": cfg.n_range})
    rows = []
    exact_err = 0.0
    asym = {}
    for alpha in cfg.params["alphas"]:
        for n in cfg.n_range:
            g = weights.moment_gamma(alpha, n, cfg.quad_nodes)
            ratio = n * g / math.log(n) ** alpha
            rows.append({"alpha": alpha, "n": n, "gamma": g, "n_gamma_over_log": ratio})
            if alpha == 0:
                exact_err = max(exact_err, abs(g * n - 1))
            asym[(alpha, n)] = ratio
    rec.scalar("alpha0_rel_err", exact_err, "moment_weight")
    rec.check("alpha0_is_1/n", exact_err <= th["alpha0_rtol"])
    n_big = max(cfg.n_range)
    big = [asym[(a, n_big)] for a in cfg.params["alphas"]]
    rec.scalar("asymptotic_ratio_at_max_n", max(big), "moment_weight")
    rec.check("asymptotic_ratio_window", all(th["ratio_lo"] <= r <= th["ratio_hi"] for r in big))
    # n^2 gamma_n against n (log n)^alpha
    alpha = max(cfg.params["alphas"])
    mw = weights.weight_moment(alpha, cfg.quad_nodes)
    ref = weights.weight_n_log_alpha(alpha)
    Ncmp = cfg.caps["compare_N"]
    gap = float(np.max(np.abs(mw.logs(Ncmp)[2:] - ref.logs(Ncmp)[2:])))
    rec.scalar("max_log_gap_moment_vs_nlog", gap, "moment_weight")
    rec.check("moment_weight_comparable", gap <= th["comparable_log_gap"])
    return ExperimentResult(rec, rows)


def exp_regularity(cfg: ExperimentConfig) -> ExperimentResult:
    th = cfg.thresholds
    rec = ExperimentRecord("regularity", {"n_range": cfg.n_range})
    ws = weights.weight_exp_sqrt()
    rows = []
    spreads = []
    for N in cfg.n_range:
        r = weights.slow_oscillation_constants(ws, N, cap=th["oscillation_cap"])
        spreads.append(r.C_best / r.c_best)
        rows.append({"weight": "exp_sqrt", "N": N, "c_best": r.c_best, "C_best": r.C_best,
                     "slowly_oscillating": r.is_slowly_oscillating_up_to_range,
                     "betaB_sup": weights.bnbeta_sup(ws, N)})
    rec.scalar("exp_sqrt_spread_last", spreads[-1], "slowly_oscillating")
    rec.check("exp_sqrt_not_slowly_oscillating", spreads[-1] > th["oscillation_cap"] and _strictly_increasing(spreads))
    bsup = [r["betaB_sup"] for r in rows]
    rec.scalar("exp_sqrt_betaB_sup", bsup[-1], "exp_sqrt_weight")
    rec.check("exp_sqrt_betaB_settles", bsup[-1] <= bsup[0] * (1 + th["stabilize_rtol"]))

    Nmax = max(cfg.n_range)
    pc = weights.weight_polynomial(2)
    osc = weights.slow_oscillation_constants(pc, Nmax, cap=th["oscillation_cap"])
    rec.scalar("poly2_oscillation_C", osc.C_best, "slowly_oscillating")
    rec.check("poly2_slowly_oscillating", osc.is_slowly_oscillating_up_to_range)

    ed_const = weights.essential_decrease_constant(weights.weight_constant(), Nmax)
    ed_geo = weights.essential_decrease_constant(weights.weight_geometric(0.5), Nmax)
    ed_poly = weights.essential_decrease_constant(pc, Nmax)
    rec.scalar("ess_dec_constant", ed_const, "essentially_decreasing")
    rec.scalar("ess_dec_poly2", ed_poly, "essentially_decreasing")
    rec.check("ess_dec_values", ed_const == 1.0 and ed_geo == 1.0 and ed_poly >= (Nmax + 1) ** 2 * (1 - 1e-12))

    roots = weights.root_sequence(weights.weight_sigma(), 3**7)
    rec.scalar("sigma_root_min", float(roots.min()), "analyticity_condition")
    rec.check("liminf_root_at_least_1", roots.min() >= 1.0)
    return ExperimentResult(rec, rows)


def exp_hs_identity(cfg: ExperimentConfig) -> ExperimentResult:
    th = cfg.thresholds
    rec = ExperimentRecord("hs_identity", {"trials": cfg.caps["trials"], "seed": cfg.seed})
    rng = np.random.default_rng(cfg.seed)
    family = [weights.weight_constant(), weights.weight_polynomial(2), weights.weight_sigma()]
    worst = 0.0
    rows = []
    for t in range(cfg.caps["trials"]):
        w = family[t % len(family)]
        size = int(rng.integers(1, cfg.caps["support"] + 1))
        u = rng.standard_normal(size)
        direct, via = opmat.psi_hs_norm(u, w)
        rel = abs(direct - via) / via
        worst = max(worst, rel)
        rows.append({"trial": t, "weight": w.kind, "support": size, "direct": direct, "identity": via})
    rec.scalar("max_rel_diff", worst, "hs_identity")
    rec.check("hs_identity", worst <= th["rtol"])
    return ExperimentResult(rec, rows)


@dataclass(frozen=True)
class Experiment:
    run: Callable[[ExperimentConfig], ExperimentResult]
    summary: str


EXPERIMENTS: dict[str, Experiment] = {
    "zorboska_ratio": Experiment(exp_zorboska_ratio, "Zorboska weight: monomial ratio ||e_m^2||/||e_m||^2 = 3^(k/2) at m = 3^k"),
    "sigma_fk": Experiment(exp_sigma_fk, "exp(n/sigma(n)) weight: ||f_k^2||/||f_k||^2 grows although beta is submultiplicative"),
    "nlogn_bound": Experiment(exp_nlogn_bound, "exp(n/log n) weight: exponential sums of alpha_{n,k} stay bounded"),
    "lp_growth": Experiment(exp_lp_growth, "C_{T_a} on h^p: column sums grow for p < 2, row sums for p > 2"),
    "osc_lower": Experiment(exp_osc_lower, "sqrt(n) * int_I |coef_n(T_a^n)| da stays of constant order; van der Corput bound"),
    "hinf_embedding": Experiment(exp_hinf_embedding, "sum |a_n| <= ||f||_beta (sum 1/beta_n)^(1/2) on random polynomials"),
    "hankel": Experiment(exp_hankel, "Psi(1_{2I_k}) for exp(n/sigma(n)): all-ones block, ratio ~ sqrt(m_k)"),
    "bn_criteria": Experiment(exp_bn_criteria, "parity weight: sum beta_n B_n^2 converges while beta_{n+1}/beta_n is unbounded"),
    "moment": Experiment(exp_moment, "moment weights gamma_n ~ (log n)^alpha / n by quadrature"),
    "regularity": Experiment(exp_regularity, "exp(sqrt n) is not slowly oscillating; regularity constants of reference weights"),
    "hs_identity": Experiment(exp_hs_identity, "||Psi(u)||_HS^2 = sum |u_n|^2 beta_n B_n on seeded random u"),
}

DEFAULTS: dict[str, dict] = {
    "zorboska_ratio": {
        "weight": {"id": "zorboska"}, "k_range": [1, 8], "caps": {"anchor_k_max": 10},
        "thresholds": {"ratio_rtol": 1e-9, "anchor_atol": 1e-9},
    },
    "sigma_fk": {
        "weight": {"id": "sigma"}, "k_range": [3, 7], "caps": {"cn_k_max": 5, "subadd_k": 7},
        "thresholds": {"rho_slope_min": 0.35},
    },
    "nlogn_bound": {"n_range": [4, 3000], "thresholds": {"sup_growth_max": 1e-3}},
    "lp_growth": {
        "weight": {"id": "constant"}, "n_range": [32, 512], "params": {"a": 0.6, "alpha_J": 1.25},
        "caps": {"matrix_cols": 64},
        "thresholds": {"p1_exp_lo": 0.4, "p1_exp_hi": 0.6, "parseval_atol": 1e-10},
    },
    "osc_lower": {
        "n_range": [16, 32, 64, 128, 256], "quad_nodes": 24, "params": {"s": 1.0},
        "caps": {"vdc_trials": 20},
        "thresholds": {"stability_ratio": 0.5, "closed_form_atol": 1e-10},
    },
    "hinf_embedding": {
        "weight": {"id": "polynomial", "params": {"exponent": 2.0}},
        "caps": {"trials": 100, "degree": 64}, "thresholds": {"reciprocal_tail_rtol": 1e-2},
    },
    "hankel": {
        "weight": {"id": "sigma"}, "k_range": [2, 4], "thresholds": {"block_norm_atol": 1e-8},
    },
    "bn_criteria": {
        "weight": {"id": "parity", "params": {"gamma": 4.0, "gamma_prime": 3.0}}, "n_range": [0, 4096],
        "thresholds": {"step_ratio_min": 100.0, "last_quarter_max": 0.01, "stabilize_rtol": 1e-6},
    },
    "moment": {
        "n_range": [10, 100, 1000, 10000], "quad_nodes": 256, "params": {"alphas": [0.0, 0.5, 1.0]},
        "caps": {"compare_N": 512},
        "thresholds": {"alpha0_rtol": 1e-10, "ratio_lo": 0.5, "ratio_hi": 2.0, "comparable_log_gap": 1.0},
    },
    "regularity": {
        "n_range": [256, 1024, 4096],
        "thresholds": {"oscillation_cap": 1e3, "stabilize_rtol": 1e-6},
    },
    "hs_identity": {"caps": {"trials": 50, "support": 64}, "thresholds": {"rtol": 1e-10}},
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}; choose from {sorted(EXPERIMENTS)}")
    cfg = cfg.resolved()
    t0 = time.perf_counter()
    result = EXPERIMENTS[cfg.experiment].run(cfg)
    result.record.wall_clock = time.perf_counter() - t0
    return result


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))
