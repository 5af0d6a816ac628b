import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scottish_lab import (
    CoeffSeq,
    besov_detail,
    besov_norm,
    dyadic_kernel,
    dyadic_profile,
    hard_block_bound,
    lp_norm_circle,
    lp_norm_detail,
    paley_diagnostic,
    problem88_witness,
)
from scottish_lab.errors import InvalidExponent, InvalidParameter, TooShort

# Independent quadrature oracle for ||W_2||_1 at G = 2^16: Horner evaluation
# on a dense grid (no shared code with the FFT path), frozen before the build.
W2_L1_ORACLE = 1.0635444099733649


def horner_l1(coeffs, G):
    theta = 2 * np.pi * np.arange(G) / G
    vals = np.polyval(np.asarray(coeffs)[::-1], np.exp(1j * theta))
    return float(np.abs(vals).mean())


class TestKernels:
    def test_w0(self):
        assert dict(enumerate(dyadic_kernel(0).coeffs)) == {0: 1.0, 1: 1.0}

    def test_w1(self):
        w = dyadic_kernel(1)
        assert {k: v for k, v in enumerate(w.coeffs) if v} == {2: 1.0, 3: 0.5}

    def test_w2(self):
        w = dyadic_kernel(2)
        assert {k: v for k, v in enumerate(w.coeffs) if v} == {
            3: 0.5,
            4: 1.0,
            5: 0.75,
            6: 0.5,
            7: 0.25,
        }

    def test_peak_and_support(self):
        for n in range(1, 11):
            w = dyadic_kernel(n).coeffs
            assert w[1 << n] == 1.0
            assert not np.any(w[: (1 << (n - 1)) + 1])
            assert len(w) == 1 << (n + 1)

    def test_partition_of_unity_exact(self):
        kmax = 1 << 14
        acc = np.zeros(kmax + 1)
        for n in range(16):
            w = dyadic_kernel(n).coeffs
            take = min(w.size, kmax + 1)
            acc[:take] += w[:take]
        assert np.abs(acc - 1.0).max() <= 1e-12


class TestLpNorm:
    def test_monomials_are_unimodular(self):
        for m in (0, 1, 7, 100):
            e = np.zeros(m + 1)
            e[m] = 1.0
            for p in (1.0, 2.0, 3.5, math.inf):
                assert abs(lp_norm_circle(CoeffSeq(e), p) - 1.0) < 1e-12

    def test_w0_closed_form(self):
        got = lp_norm_circle(dyadic_kernel(0), 1, oversample=2048)
        assert abs(got - 4 / math.pi) < 1e-6

    def test_w2_against_independent_oracle(self):
        oracle = horner_l1(dyadic_kernel(2).coeffs, 1 << 16)
        assert abs(oracle - W2_L1_ORACLE) < 1e-12
        got = lp_norm_circle(dyadic_kernel(2), 1, oversample=1 << 13)
        assert abs(got - W2_L1_ORACLE) < 1e-9
        assert 1.0 < got <= 1.5

    def test_parseval_l2(self):
        rng = np.random.default_rng(5)
        c = rng.standard_normal(33)
        got = lp_norm_circle(CoeffSeq(c), 2)
        assert abs(got - np.sqrt(np.sum(c**2))) < 1e-10

    def test_invalid_exponent(self):
        with pytest.raises(InvalidExponent):
            lp_norm_circle(CoeffSeq([1.0]), 0.5)

    def test_oversample_validation(self):
        with pytest.raises(InvalidParameter):
            lp_norm_circle(CoeffSeq([1.0]), 1, oversample=1)

    def test_quadrature_consistency(self):
        # doubling the grid moves the value by less than the reported bound
        rng = np.random.default_rng(7)
        for _ in range(10):
            c = rng.standard_normal(int(rng.integers(2, 200)))
            v8, bound8, _ = lp_norm_detail(CoeffSeq(c), 1, oversample=8)
            v16 = lp_norm_circle(CoeffSeq(c), 1, oversample=16)
            assert abs(v8 - v16) <= bound8 + 1e-12


class TestProfile:
    def test_monomial_hits_single_block(self):
        for j in range(0, 9):
            e = np.zeros((1 << j) + 1)
            e[-1] = 1.0
            prof = dyadic_profile(CoeffSeq(e), s=1.0, p=math.inf, nmax=j + 2)
            expected = np.zeros(j + 3)
            expected[j] = float(1 << j)
            assert np.abs(prof.values - expected).max() < 1e-9 * (1 << j)

    def test_zero_function(self):
        prof = dyadic_profile(CoeffSeq([0.0]), 0.0, 1.0, 5)
        assert not prof.values.any()

    def test_all_ones_reproduces_kernel_norms(self):
        f = CoeffSeq(np.ones((1 << 10) + 1))
        prof = dyadic_profile(f, 0.0, 1.0, 9)
        for n in range(2, 10):  # kernels with support inside the degree
            kn = lp_norm_circle(dyadic_kernel(n), 1)
            assert abs(prof.values[n] - kn) < 1e-12
            assert prof.values[n] <= 1.5

    def test_truncation_flag(self):
        f = CoeffSeq(np.ones(100))
        assert dyadic_profile(f, 0.0, 1.0, 2).truncated
        assert not dyadic_profile(f, 0.0, 1.0, 6).truncated

    def test_grid_meets_floor(self):
        prof = dyadic_profile(CoeffSeq([1.0, 1.0]), 0.0, 1.0, 4, oversample=8)
        assert prof.grid >= 8 * (1 << 5)


class TestBesov:
    def test_monomial_norm(self):
        for j in range(0, 15):
            e = np.zeros((1 << j) + 1)
            e[-1] = 1.0
            v = besov_norm(CoeffSeq(e), 1.0, math.inf, 1.0, j + 1)
            assert abs(v - (1 << j)) <= 1e-6 * (1 << j)

    def test_two_block_sum(self):
        f = CoeffSeq([0, 0, 1.0, 0, 0, 0, 0, 0, 1.0])
        assert abs(besov_norm(f, 1.0, math.inf, 1.0, 4) - 10.0) < 1e-6

    def test_zero(self):
        assert besov_norm(CoeffSeq([0.0]), 1.0, math.inf, 1.0, 3) == 0.0

    def test_q_infinity_takes_max(self):
        f = CoeffSeq([0, 0, 1.0, 0, 0, 0, 0, 0, 1.0])
        assert abs(besov_norm(f, 1.0, math.inf, math.inf, 4) - 8.0) < 1e-9

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(
        st.lists(st.floats(-5, 5), min_size=1, max_size=64),
        st.floats(0.125, 8.0),
    )
    def test_scaling(self, coeffs, c):
        f = CoeffSeq(coeffs)
        g = CoeffSeq(c * f.coeffs)
        a = besov_norm(f, 0.0, 1.0, 1.0, 5)
        b = besov_norm(g, 0.0, 1.0, 1.0, 5)
        assert abs(b - c * a) <= 1e-9 * max(1.0, a) * c

    def test_reconstruction(self):
        # summing the block coefficient arrays recovers f
        rng = np.random.default_rng(3)
        f = CoeffSeq(rng.standard_normal((1 << 9) + 1))
        total = np.zeros(1 << 11)
        for n in range(11):
            w = dyadic_kernel(n).coeffs
            total[: w.size] += f.padded(w.size) * w
        assert np.abs(total[: len(f)] - f.coeffs).max() < 1e-12
        assert np.abs(total[len(f) :]).max() < 1e-12

    def test_error_bound_dominates_oversample_change(self):
        f = CoeffSeq(np.random.default_rng(9).standard_normal(200))
        n1, b1, _ = besov_detail(f, 0.0, 1.0, 1.0, 7, oversample=8)
        n2, _, _ = besov_detail(f, 0.0, 1.0, 1.0, 7, oversample=16)
        assert abs(n1 - n2) <= b1


class TestHardBlockBound:
    def test_unit_at_zero(self):
        assert hard_block_bound(CoeffSeq([1.0]), 10) == 1.0

    def test_single_block_coefficient(self):
        for j in range(0, 12):
            e = np.zeros((1 << j) + 1)
            e[-1] = 1.0
            assert hard_block_bound(CoeffSeq(e), 12) == float(1 << j)

    def test_witness_partial_sum(self):
        alpha, params = problem88_witness(0.5, 14)
        got = hard_block_bound(alpha, 14)
        oracle = math.fsum((n + 1) ** -1.5 for n in range(15))
        assert abs(got - oracle) < 1e-12

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(st.lists(st.floats(-4, 4), min_size=1, max_size=64), st.floats(0.25, 4))
    def test_scaling(self, coeffs, c):
        g = CoeffSeq(coeffs)
        a = hard_block_bound(g, 6)
        b = hard_block_bound(CoeffSeq(c * g.coeffs), 6)
        assert abs(b - c * a) <= 1e-9 * max(1.0, a) * c


class TestPaley:
    def test_all_ones_counts(self):
        nmax = 6
        f = CoeffSeq(np.ones((1 << (nmax + 1)) + 1))
        d = paley_diagnostic(f, nmax)
        assert np.array_equal(d, np.arange(1, nmax + 2, dtype=float))

    def test_monomial(self):
        j = 5
        e = np.zeros((1 << 5) + 1)
        e[-1] = 1.0
        d = paley_diagnostic(CoeffSeq(e), 4)
        expected = np.zeros(5)
        expected[j - 1] = 1.0  # 2^n + 2^k = 2^j forces k = n = j - 1
        assert np.array_equal(d, expected)

    def test_zero(self):
        f = CoeffSeq(np.zeros((1 << 5) + 1))
        assert not paley_diagnostic(f, 4).any()

    def test_too_short(self):
        with pytest.raises(TooShort):
            paley_diagnostic(CoeffSeq(np.ones(10)), 4)
