import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobispec.params import JacobiSequence
from jacobispec.spectrum import (
    TruncatedSpectrum,
    charpoly_eigenvalues,
    charpoly_values,
    counting_function,
    eigenvalues_in,
    full_spectrum,
    gershgorin_interval,
    stabilized_counting,
    sturm_count,
)
from jacobispec.verify import _seq, golden_m5_sequence


def tiny(rho, q):
    return JacobiSequence(rho=np.asarray(rho, float), q=np.asarray(q, float))


class TestSturmCount:
    def test_one_by_one(self):
        seq = tiny([1.0, 1.0], [5.0, 0.0])
        assert sturm_count(seq, 1, 0.0) == 0
        assert sturm_count(seq, 1, 6.0) == 1

    def test_two_by_two_symmetric(self):
        seq = tiny([1.0, 1.0], [0.0, 0.0])
        assert sturm_count(seq, 2, 0.0) == 1  # eigenvalues are -1, +1

    def test_counts_match_charpoly_roots(self, rng):
        # independent oracle: count roots of det(J - x) below each shift
        rho = rng.uniform(0.3, 2.0, 5)
        q = rng.uniform(-4.0, 4.0, 5)
        seq = tiny(rho, q)
        roots = charpoly_eigenvalues(seq, 5)
        for x in rng.uniform(-8.0, 8.0, 20):
            assert sturm_count(seq, 5, x) == int(np.sum(roots < x))

    @given(
        x=st.floats(-50, 50),
        y=st.floats(-50, 50),
        seed=st.integers(0, 2**31),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_shift(self, x, y, seed):
        r = np.random.default_rng(seed)
        seq = tiny(r.uniform(0.2, 3.0, 6), r.uniform(-5.0, 5.0, 6))
        lo, hi = min(x, y), max(x, y)
        assert sturm_count(seq, 6, lo) <= sturm_count(seq, 6, hi)

    def test_extremes(self):
        seq = tiny(np.ones(6), np.zeros(6))
        a, b = gershgorin_interval(seq, 6)
        assert sturm_count(seq, 6, a) == 0
        assert sturm_count(seq, 6, np.nextafter(b, np.inf)) == 6


class TestEigenvaluesIn:
    def test_two_by_two(self):
        seq = tiny([1.0, 1.0], [0.0, 0.0])
        ev = eigenvalues_in(seq, 2, (-2.0, 2.0), tol=1e-10)
        assert ev == pytest.approx([-1.0, 1.0], abs=1e-9)

    def test_free_three_by_three(self):
        seq = tiny(np.ones(3), np.zeros(3))
        ev = eigenvalues_in(seq, 3, (-3.0, 3.0), tol=1e-10)
        assert ev == pytest.approx([-np.sqrt(2), 0.0, np.sqrt(2)], abs=1e-9)

    def test_count_consistency_with_sturm(self):
        seq = _seq("m1", 2000)
        ev = eigenvalues_in(seq, 2000, (0.0, 100.0), tol=1e-8)
        expected = sturm_count(seq, 2000, np.nextafter(100.0, np.inf)) - sturm_count(
            seq, 2000, 0.0
        )
        assert len(ev) == expected

    def test_matches_charpoly_oracle_small(self, rng):
        for n in range(1, 9):
            rho = rng.uniform(0.3, 2.5, max(n, 2))
            q = rng.uniform(-4.0, 4.0, max(n, 2))
            seq = tiny(rho, q)
            a, b = gershgorin_interval(seq, n)
            ours = eigenvalues_in(seq, n, (a, b), tol=1e-13 * max(1, abs(a), abs(b)))
            oracle = charpoly_eigenvalues(seq, n)
            assert np.max(np.abs(ours - oracle)) <= 1e-9

    def test_empty_interval(self):
        seq = tiny([1.0, 1.0], [0.0, 0.0])
        assert eigenvalues_in(seq, 2, (5.0, 6.0)).size == 0

    def test_bad_interval(self):
        seq = tiny([1.0, 1.0], [0.0, 0.0])
        with pytest.raises(ValueError):
            eigenvalues_in(seq, 2, (2.0, -2.0))


class TestCountingFunction:
    def test_two_point_spectrum(self):
        spec = TruncatedSpectrum(N=2, eigenvalues=np.array([-1.0, 1.0]), tol=1e-10)
        assert counting_function(spec, 0.5) == 0
        assert counting_function(spec, 1.0) == 2

    def test_three_point_spectrum(self):
        spec = TruncatedSpectrum(
            N=3, eigenvalues=np.array([-np.sqrt(2), 0.0, np.sqrt(2)]), tol=1e-10
        )
        assert counting_function(spec, 1.0) == 1

    def test_monotone_on_grid(self):
        seq = _seq("m1", 2000)
        ev = eigenvalues_in(seq, 2000, (-1e4, 1e4), tol=1e-7)
        spec = TruncatedSpectrum(N=2000, eigenvalues=ev, tol=1e-7)
        grid = np.linspace(0.0, 1e4, 50)
        counts = [counting_function(spec, r) for r in grid]
        assert all(b >= a for a, b in zip(counts, counts[1:]))
        assert counts[0] >= 0 and counts[-1] == len(ev)

    def test_negative_radius_rejected(self):
        spec = TruncatedSpectrum(N=1, eigenvalues=np.array([1.0]), tol=1e-10)
        with pytest.raises(ValueError):
            counting_function(spec, -1.0)


class TestStabilizedCounting:
    def test_m1_stabilizes_at_moderate_radius(self):
        counts, stable = stabilized_counting(_seq("m1", 2000), 50.0, (500, 1000, 2000))
        assert stable and counts[-1] == counts[-2]

    def test_free_matrix_counts_grow(self):
        seq = golden_m5_sequence(2000)
        counts, stable = stabilized_counting(seq, 1.0, (500, 1000, 2000))
        assert not stable
        assert counts[0] < counts[1] < counts[2]

    def test_zero_radius(self):
        counts, stable = stabilized_counting(_seq("m1", 2000), 0.0, (500, 1000, 2000))
        assert stable and counts == [0, 0, 0]

    def test_needs_increasing_dims(self):
        with pytest.raises(ValueError):
            stabilized_counting(_seq("m1", 2000), 1.0, (500, 500, 1000))


class TestInterlacing:
    def test_cauchy_interlacing_up_to_50(self):
        seq = _seq("m1", 51)
        prev = full_spectrum(seq, 1).eigenvalues
        for N in range(2, 51):
            cur = full_spectrum(seq, N).eigenvalues
            assert np.all(cur[:-1] < prev)
            assert np.all(prev < cur[1:])
            prev = cur


class TestCharpolyOracle:
    def test_values_match_numpy_det(self, rng):
        rho = rng.uniform(0.3, 2.0, 6)
        q = rng.uniform(-3.0, 3.0, 6)
        seq = tiny(rho, q)
        xs = rng.uniform(-5.0, 5.0, 7)
        J = np.diag(q) + np.diag(rho[:5], 1) + np.diag(rho[:5], -1)
        for x in xs:
            direct = np.linalg.det(J - x * np.eye(6))
            assert charpoly_values(seq, 6, np.array([x]))[0] == pytest.approx(
                direct, rel=1e-9, abs=1e-9
            )

    def test_strict_spectrum_validation(self):
        with pytest.raises(ValueError):
            TruncatedSpectrum(N=2, eigenvalues=np.array([1.0, 1.0]), tol=1e-10)
