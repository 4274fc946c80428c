import math

import numpy as np
import pytest

from jacobispec.growth import (
    b_log_max_modulus,
    convergence_exponent_from_zeros,
    leading_coefficient_logs,
    log_majorant_product,
    majorant_bound_gap,
    nevanlinna_evaluate,
    order_type_from_coefficients,
    order_type_from_max_modulus,
    pointwise_order_estimates,
    scan_b_zeros,
    upper_density,
)
from jacobispec.params import JacobiSequence
from jacobispec.spectrum import eigenvalues_in
from jacobispec.verify import _b_zeros


def classical_partial_sums(seq, sol, z, N):
    """Independent oracle: A_N, B_N, C_N, D_N from the textbook partial sums
    with P_k(z), Q_k(z) computed by the recurrence at z."""
    Pz = np.zeros(N, dtype=complex)
    Qz = np.zeros(N, dtype=complex)
    Pz[0] = 1.0
    Pz[1] = (z - seq.q[0]) / seq.rho[0]
    Qz[1] = 1.0 / seq.rho[0]
    for k in range(1, N - 1):
        Pz[k + 1] = ((z - seq.q[k]) * Pz[k] - seq.rho[k - 1] * Pz[k - 1]) / seq.rho[k]
        Qz[k + 1] = ((z - seq.q[k]) * Qz[k] - seq.rho[k - 1] * Qz[k - 1]) / seq.rho[k]
    P0, Q0 = sol.P[:N], sol.Q[:N]
    return (
        z * np.sum(Q0 * Qz),
        -1.0 + z * np.sum(Q0 * Pz),
        1.0 + z * np.sum(P0 * Qz),
        z * np.sum(P0 * Pz),
    )


class TestNevanlinnaProduct:
    def test_identity_at_zero(self, m1_sol_2000):
        part = nevanlinna_evaluate(m1_sol_2000, 0.0)
        assert (part.A, part.B, part.C, part.D) == (0.0, -1.0, 1.0, 0.0)
        assert part.log_scale == 0.0

    def test_matches_classical_partial_sums(self, m1_seq_2000, m1_sol_2000):
        for z in (1.7 - 0.3j, -2.5 + 1j, 0.3 + 0.0j):
            for N in (10, 50, 120):
                part = nevanlinna_evaluate(m1_sol_2000, z, N)
                scale = math.exp(part.log_scale)
                A, B, C, D = classical_partial_sums(m1_seq_2000, m1_sol_2000, z, N)
                assert part.A * scale == pytest.approx(A, rel=1e-10, abs=1e-12)
                assert part.B * scale == pytest.approx(B, rel=1e-10, abs=1e-12)
                assert part.C * scale == pytest.approx(C, rel=1e-10, abs=1e-12)
                assert part.D * scale == pytest.approx(D, rel=1e-10, abs=1e-12)

    def test_determinant_identity_random_z(self, m1_sol_2000, rng):
        for _ in range(20):
            z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
            if abs(z) > 10:
                z = 10 * z / abs(z)
            assert nevanlinna_evaluate(m1_sol_2000, z, 2000).determinant_residual() <= 1e-6

    def test_one_step_unrolling(self, m1_sol_2000):
        z = 2.0 - 1.5j
        for N in (17, 400):
            a = nevanlinna_evaluate(m1_sol_2000, z, N)
            b = nevanlinna_evaluate(m1_sol_2000, z, N + 1)
            P, Q = m1_sol_2000.P[N], m1_sol_2000.Q[N]
            sa = math.exp(a.log_scale)
            sb = math.exp(b.log_scale)
            A2 = a.A + z * (Q * Q * a.C - P * Q * a.A)
            B2 = a.B + z * (Q * Q * a.D - P * Q * a.B)
            C2 = a.C + z * (P * Q * a.C - P * P * a.A)
            D2 = a.D + z * (P * Q * a.D - P * P * a.B)
            assert b.A * sb == pytest.approx(A2 * sa, rel=1e-12)
            assert b.B * sb == pytest.approx(B2 * sa, rel=1e-12)
            assert b.C * sb == pytest.approx(C2 * sa, rel=1e-12)
            assert b.D * sb == pytest.approx(D2 * sa, rel=1e-12)

    def test_rescaling_engages_without_overflow(self, m3_sol):
        part = nevanlinna_evaluate(m3_sol, 1e6 + 0j, 2000)
        assert part.log_scale > 0
        assert np.isfinite([part.A, part.B, part.C, part.D]).all()
        assert part.log_spectral_norm() > 300  # true value far beyond 1e150


class TestZeroScan:
    def test_origin_never_a_zero(self, m1_b_zeros):
        assert np.min(np.abs(m1_b_zeros)) > 0.5

    def test_count_close_to_truncation_count(self, m1_seq_2000, m1_b_zeros):
        ev = eigenvalues_in(m1_seq_2000, 2000, (-1e4, 1e4), tol=1e-7)
        assert abs(len(m1_b_zeros) - len(ev)) <= 2

    def test_zeros_interlace_truncation_eigenvalues(self, m1_seq_2000, m1_b_zeros):
        # inner window where both objects converged: strict alternation
        ev = eigenvalues_in(m1_seq_2000, 2000, (-300.0, 300.0), tol=1e-9)
        zeros = m1_b_zeros[np.abs(m1_b_zeros) <= 300.0]
        merged = np.sort(np.concatenate([zeros, ev]))
        tags = np.concatenate([np.zeros(len(zeros)), np.ones(len(ev))])
        tagged = tags[np.argsort(np.concatenate([zeros, ev]))]
        assert np.all(tagged[1:] != tagged[:-1]), merged

    def test_grid_validation(self, m1_sol_2000):
        with pytest.raises(ValueError):
            scan_b_zeros(m1_sol_2000, 2000, 100.0, grid=32)
        with pytest.raises(ValueError):
            scan_b_zeros(m1_sol_2000, 2000, -5.0)

    def test_dip_refinement_recovers_close_pair(self, monkeypatch, m1_sol_2000):
        # white-box drive of the refinement branch: a synthetic B with two
        # zeros closer than any grid spacing dips deeply without a sign
        # change at grid resolution; the scan must warn and refine them out
        import jacobispec.growth as G

        a, eps = 50.0, 1e-6

        def fake_entries(sol, xs, N=None):
            xs = np.asarray(xs, dtype=np.float64)
            B = (xs - a) ** 2 - eps**2
            zeros_like = np.zeros_like(xs)
            return zeros_like, B, zeros_like, zeros_like, zeros_like

        monkeypatch.setattr(G, "evaluate_entries_real", fake_entries)
        with pytest.warns(RuntimeWarning, match="deep"):
            zeros = G.scan_b_zeros(m1_sol_2000, 2000, 100.0)
        pair = zeros[np.abs(zeros - a) < 1.0]
        assert len(pair) == 2
        assert pair == pytest.approx([a - eps, a + eps], abs=1e-7)

    def test_dip_without_zeros_only_warns(self, monkeypatch, m1_sol_2000):
        import jacobispec.growth as G

        def fake_entries(sol, xs, N=None):
            xs = np.asarray(xs, dtype=np.float64)
            B = (xs - 50.0) ** 2 + 1e-9
            z = np.zeros_like(xs)
            return z, B, z, z, z

        monkeypatch.setattr(G, "evaluate_entries_real", fake_entries)
        with pytest.warns(RuntimeWarning):
            zeros = G.scan_b_zeros(m1_sol_2000, 2000, 100.0)
        assert zeros.size == 0


class TestMajorant:
    def test_zero_radius(self, m1_seq_2000):
        assert log_majorant_product(m1_seq_2000, 0.0) == 0.0

    def test_growth_exponent_half(self, m1_seq_2000):
        rs = np.geomspace(1e2, 1e6, 12)
        vals = np.array([log_majorant_product(m1_seq_2000, r) for r in rs])
        slope = np.polyfit(np.log(rs), np.log(vals), 1)[0]
        assert slope == pytest.approx(0.5, abs=0.05)
        # the infinite product for a/x0 = 1, beta1 = 2 tends to pi sqrt(r)
        assert vals[-1] == pytest.approx(np.pi * np.sqrt(rs[-1]), rel=0.02)

    def test_norm_bounded_by_majorant(self, m1_seq_2000, m1_sol_2000):
        zs = 1j * np.geomspace(10.0, 1e4, 8)
        gaps = majorant_bound_gap(m1_sol_2000, m1_seq_2000, zs, 2000)
        assert np.max(gaps) < 1.0  # a finite constant dominates the gap
        assert gaps[-1] <= gaps[0]  # and it does not drift upward

    def test_rejects_exceptional_model(self, m3_seq):
        with pytest.raises(ValueError):
            log_majorant_product(m3_seq, 10.0)


class TestCoefficientSeries:
    def test_empty_product_head(self, m1_seq_2000):
        logc = leading_coefficient_logs(m1_seq_2000)
        assert logc[0] == 0.0 and logc[1] == 0.0

    def test_exact_squares_product(self):
        n = np.arange(256)
        rho = np.maximum(n, 1.0) ** 2  # rho_k = k^2 for k >= 1
        seq = JacobiSequence(rho=rho, q=np.zeros(256))
        logc = leading_coefficient_logs(seq)
        the_n = 100
        expected = -2.0 * math.lgamma(the_n)  # -2 log((n-1)!)
        assert logc[the_n] == pytest.approx(expected, rel=1e-12)

    def test_m1_matches_factorial_asymptotics(self, m1_seq):
        # rho_k = (k+1)^2 exactly, so log c_n + 2 log(n!) must stay bounded
        logc = leading_coefficient_logs(m1_seq)
        n = np.arange(2, 5000)
        resid = logc[2:] + 2.0 * np.array([math.lgamma(k + 1) for k in range(2, 5000)])
        assert np.max(np.abs(resid)) < 1e-7

    def test_order_type_exponential(self):
        n = np.arange(4000)
        logc = -np.array([math.lgamma(k + 1) for k in n])
        order, tau = order_type_from_coefficients(logc)
        assert order == pytest.approx(1.0, abs=0.01)
        assert tau == pytest.approx(1.0, abs=0.05)

    def test_order_type_squared_factorial(self):
        n = np.arange(4000)
        logc = -2.0 * np.array([math.lgamma(k + 1) for k in n])
        order, tau = order_type_from_coefficients(logc)
        assert order == pytest.approx(0.5, abs=0.005)
        assert tau == pytest.approx(2.0, abs=0.05)

    def test_m1_series(self, m1_seq):
        order, tau = order_type_from_coefficients(leading_coefficient_logs(m1_seq))
        assert order == pytest.approx(0.5, abs=0.02)
        assert tau == pytest.approx(2.0, abs=0.1)

    def test_pointwise_formula_is_biased_but_converging(self):
        # diagnostic check that motivates the corrected estimator
        n = np.arange(4000)
        logc = -2.0 * np.array([math.lgamma(k + 1) for k in n])
        pw = pointwise_order_estimates(logc)
        assert 0.5 < np.nanmax(pw[2000:]) < 0.65

    def test_rejects_growing_coefficients(self):
        with pytest.raises(ValueError):
            order_type_from_coefficients(np.arange(128, dtype=float))


class TestMaxModulus:
    def test_synthetic_exact(self):
        rs = np.geomspace(10, 1e5, 16)
        order, tau = order_type_from_max_modulus(lambda r: 2.0 * math.sqrt(r), rs)
        assert order == pytest.approx(0.5, abs=1e-6)
        assert tau == pytest.approx(2.0, abs=1e-6)

    def test_m1_b_function(self, m1_sol_2000):
        rs = np.geomspace(10, 1e5, 24)
        order, tau = order_type_from_max_modulus(
            b_log_max_modulus(m1_sol_2000, 2000), rs
        )
        assert order == pytest.approx(0.5, abs=0.05)
        assert 1.8 <= tau <= 4.4  # theoretical type window [2, 4] with slack

    def test_rejects_non_monotone(self):
        rs = np.geomspace(10, 1e3, 8)
        with pytest.raises(ValueError, match="not increasing"):
            order_type_from_max_modulus(lambda r: math.sin(r) + 2.0, rs)

    def test_rays_floor(self, m1_sol_2000):
        with pytest.raises(ValueError):
            b_log_max_modulus(m1_sol_2000, 2000, rays=8)


class TestZeroStatistics:
    def test_quadratic_zeros(self):
        zeros = (np.arange(1, 200, dtype=float)) ** 2
        fit = convergence_exponent_from_zeros(zeros)
        assert fit.slope == pytest.approx(0.5, abs=1e-9)
        assert fit.stderr < 1e-9

    def test_cubic_zeros(self):
        zeros = (np.arange(1, 200, dtype=float)) ** 3
        assert convergence_exponent_from_zeros(zeros).slope == pytest.approx(
            1 / 3, abs=1e-9
        )

    def test_m1_zero_fit(self, m1_b_zeros):
        fit = convergence_exponent_from_zeros(np.sort(np.abs(m1_b_zeros)))
        assert fit.slope == pytest.approx(0.5, abs=0.1)

    def test_density_quadratic(self):
        zeros = (np.arange(1, 200, dtype=float)) ** 2
        assert upper_density(zeros, 2.0) == pytest.approx(1.0, rel=1e-6)
        assert upper_density((2 * np.arange(1, 200.0)) ** 2, 2.0) == pytest.approx(
            0.5, rel=1e-6
        )

    def test_density_requires_beta_above_one(self):
        with pytest.raises(ValueError):
            upper_density(np.arange(1.0, 64.0), 1.0)

    def test_needs_32_zeros(self):
        with pytest.raises(ValueError):
            convergence_exponent_from_zeros(np.arange(1.0, 20.0))


class TestCrossMethodConsistency:
    def test_coefficient_and_max_modulus_orders_agree(self, m1_seq):
        # evaluate the coefficient series itself on the positive axis (its
        # coefficients are positive, so the max modulus sits at theta = 0)
        logc = leading_coefficient_logs(m1_seq)
        n = np.arange(len(logc), dtype=float)

        def log_series(r):
            terms = logc + n * math.log(r)
            top = terms.max()
            return top + math.log(np.sum(np.exp(terms - top)))

        rs = np.geomspace(1e2, 1e5, 16)
        order_m, _ = order_type_from_max_modulus(log_series, rs)
        order_c, _ = order_type_from_coefficients(logc)
        assert abs(order_m - order_c) <= 0.05


class TestExceptionalModels:
    def test_m3_exponent_third(self):
        zeros = np.sort(np.abs(_b_zeros("m3", 2000, 1e6)))
        fit = convergence_exponent_from_zeros(zeros)
        assert fit.slope == pytest.approx(1 / 3, abs=0.1)

    def test_m4_exponent_third(self):
        zeros = np.sort(np.abs(_b_zeros("m4", 2000, 1e6)))
        fit = convergence_exponent_from_zeros(zeros)
        assert fit.slope == pytest.approx(1 / 3, abs=0.1)

    @pytest.mark.parametrize("which", ["m3", "m4"])
    def test_counting_agreement(self, which):
        from jacobispec import spectrum
        from jacobispec.verify import _seq

        zeros = np.sort(np.abs(_b_zeros(which, 2000, 1e6)))
        seq = _seq(which, 2000)
        for r in np.geomspace(1e2, 1e6, 20):
            counts, _ = spectrum.stabilized_counting(seq, float(r), (500, 1000, 2000))
            nb = int(np.searchsorted(zeros, r, side="right"))
            assert abs(nb - counts[-1]) <= 2
