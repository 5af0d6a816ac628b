import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scottish_lab import (
    CoeffSeq,
    DenseMatrix,
    HankelSymbol,
    block_of,
    derive_seed,
    hankel_matrix,
    hard_block,
    least_squares_line,
    limit_estimate,
    make_rng,
    multiplier_support,
    read_coeff_csv,
    read_matrix_csv,
    write_coeff_csv,
    write_matrix_csv,
)
from scottish_lab.errors import (
    ComplexNotSupported,
    EmptyDimension,
    InvalidInput,
    TooShort,
)


class TestCoeffSeq:
    def test_access_past_degree_is_zero(self):
        s = CoeffSeq([1.0, 2.0])
        assert s[0] == 1.0 and s[1] == 2.0
        assert s[2] == 0.0 and s[100] == 0.0

    def test_negative_index_rejected(self):
        with pytest.raises(IndexError):
            CoeffSeq([1.0])[-1]

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(EmptyDimension):
            CoeffSeq([])
        with pytest.raises(InvalidInput):
            CoeffSeq([1.0, np.nan])
        with pytest.raises(InvalidInput):
            CoeffSeq([np.inf])

    def test_exact_equality(self):
        assert CoeffSeq([1.0, 0.5]) == CoeffSeq([1.0, 0.5])
        assert CoeffSeq([1.0, 0.5]) != CoeffSeq([1.0, 0.5 + 1e-16])
        assert CoeffSeq([1.0]) != CoeffSeq([1.0, 0.0])  # length matters

    def test_immutable(self):
        s = CoeffSeq([1.0, 2.0])
        with pytest.raises(ValueError):
            s.coeffs[0] = 5.0

    def test_complex_supported(self):
        s = CoeffSeq([1 + 2j, 0])
        assert s.is_complex
        assert s[0] == 1 + 2j


class TestHankel:
    def test_unit_symbol(self):
        Q = hankel_matrix(CoeffSeq([1.0]), 2)
        assert np.array_equal(Q.entries, [[1, 0], [0, 0]])

    def test_constant_antidiagonals(self):
        Q = hankel_matrix(CoeffSeq([1.0, 1.0, 1.0]), 2)
        assert np.array_equal(Q.entries, [[1, 1], [1, 1]])

    def test_ramp_symbol(self):
        Q = hankel_matrix(CoeffSeq([0.0, 1.0, 2.0, 3.0]), 3)
        assert np.array_equal(Q.entries, [[0, 1, 2], [1, 2, 3], [2, 3, 0]])

    def test_errors(self):
        with pytest.raises(EmptyDimension):
            hankel_matrix(CoeffSeq([1.0]), 0)
        with pytest.raises(ComplexNotSupported):
            hankel_matrix(CoeffSeq([1.0 + 1j]), 2)

    def test_matrix_rejects_complex(self):
        with pytest.raises(ComplexNotSupported):
            DenseMatrix(np.array([[1.0 + 1j]]))

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=12), st.integers(1, 8))
    def test_symmetric(self, sym, n):
        Q = hankel_matrix(CoeffSeq(sym), n)
        assert np.array_equal(Q.entries, Q.entries.T)

    def test_materialize(self):
        hs = HankelSymbol(CoeffSeq([1.0, 2.0]), 3)
        assert hs.materialize() == hankel_matrix(CoeffSeq([1.0, 2.0]), 3)


class TestBlocks:
    def test_partition_up_to_2_20(self):
        # every k in [1, 2^20] lands in exactly one hard block
        ks = np.arange(1, (1 << 20) + 1)
        ns = np.floor(np.log2(ks)).astype(int)
        assert np.all(ks >= (1 << ns[0]))
        lows = 1 << ns.astype(np.int64)
        assert np.all((ks >= lows) & (ks < 2 * lows))
        for k in (1, 2, 3, 4, 1023, 1024, (1 << 20)):
            n = block_of(k)
            assert k in hard_block(n)
            assert k not in hard_block(n + 1) and (n == 0 or k not in hard_block(n - 1))

    def test_support_disjointness(self):
        for n in range(0, 13):
            for m in range(n + 2, 14):
                a = set(multiplier_support(n))
                b = set(multiplier_support(m))
                assert not (a & b)

    def test_adjacent_supports_overlap(self):
        assert set(multiplier_support(2)) & set(multiplier_support(3))

    def test_block_index_views(self):
        from scottish_lab import BlockIndex

        b = BlockIndex(3)
        assert list(b.hard) == list(range(8, 16))
        assert b.support == multiplier_support(3)


class TestSeeding:
    def test_rng_bit_identical(self):
        a = make_rng(987654321).random(1000)
        b = make_rng(987654321).random(1000)
        assert np.array_equal(a, b)

    def test_derived_streams_differ(self):
        s = {derive_seed(7, i) for i in range(100)}
        assert len(s) == 100
        assert derive_seed(7, 3) == derive_seed(7, 3)


class TestLimitEstimate:
    def test_constant(self):
        assert limit_estimate(CoeffSeq([5.0] * 8)) == 5.0

    def test_harmonic_tail(self):
        z = CoeffSeq(1.0 / (np.arange(4096) + 1))
        got = limit_estimate(z)
        oracle = math.fsum(1.0 / (n + 1) for n in range(3072, 4096)) / 1024
        assert 0 < got < 0.0013
        assert abs(got - oracle) < 1e-15

    def test_geometric_tail(self):
        z = CoeffSeq(3.0 + 2.0 ** (-np.arange(64, dtype=float)))
        assert abs(limit_estimate(z) - 3.0) < 1e-9

    def test_too_short(self):
        with pytest.raises(TooShort):
            limit_estimate(CoeffSeq([1.0, 2.0, 3.0]))


class TestLineFit:
    def test_exact_line(self):
        x = np.arange(10.0)
        slope, intercept, resid = least_squares_line(x, 3.0 * x - 2.0)
        assert abs(slope - 3.0) < 1e-12
        assert abs(intercept + 2.0) < 1e-12
        assert resid < 1e-12


class TestCsv:
    def test_coeff_round_trip_real(self, tmp_path):
        rng = make_rng(11)
        for _ in range(20):
            n = int(rng.integers(1, 50))
            vals = rng.standard_normal(n)
            vals[rng.random(n) < 0.5] = 0.0
            seq = CoeffSeq(vals)
            path = tmp_path / "s.csv"
            write_coeff_csv(path, seq)
            assert read_coeff_csv(path) == seq

    def test_coeff_round_trip_complex(self, tmp_path):
        rng = make_rng(12)
        vals = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        seq = CoeffSeq(vals)
        path = tmp_path / "c.csv"
        write_coeff_csv(path, seq)
        assert read_coeff_csv(path) == seq

    def test_zero_sequence_keeps_length(self, tmp_path):
        seq = CoeffSeq(np.zeros(7))
        path = tmp_path / "z.csv"
        write_coeff_csv(path, seq)
        assert read_coeff_csv(path) == seq

    def test_rejects_nan_and_bad_headers(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("k,re\n0,nan\n")
        with pytest.raises(InvalidInput):
            read_coeff_csv(p)
        p.write_text("index,value\n0,1\n")
        with pytest.raises(InvalidInput):
            read_coeff_csv(p)
        p.write_text("k,re\n3,1.0\n1,2.0\n")
        with pytest.raises(InvalidInput):
            read_coeff_csv(p)

    def test_missing_indices_are_zero(self, tmp_path):
        p = tmp_path / "sparse.csv"
        p.write_text("k,re\n1,2.0\n4,-1.0\n")
        seq = read_coeff_csv(p)
        assert seq == CoeffSeq([0.0, 2.0, 0.0, 0.0, -1.0])

    def test_matrix_round_trip(self, tmp_path):
        rng = make_rng(13)
        mat = DenseMatrix(rng.standard_normal((5, 3)))
        path = tmp_path / "m.csv"
        write_matrix_csv(path, mat)
        assert read_matrix_csv(path) == mat

    def test_matrix_rejects_ragged(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(InvalidInput):
            read_matrix_csv(p)
