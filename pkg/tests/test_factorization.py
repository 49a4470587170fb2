import numpy as np
import pytest

from partheta import DomainError, decompose, lp_bound_check, negative_q_report, reconstruct_product
from partheta.spectrum import complex_pair_count

GRID = 2 * np.exp(2j * np.pi * np.arange(20) / 20)


class TestProduct:
    def test_at_zero(self):
        r = reconstruct_product(0.4, 10, [0])
        assert r.rel_error[0] == 0

    @pytest.mark.parametrize("q", [0.4, -0.5])
    def test_improves(self, q):
        a = reconstruct_product(q, 10, GRID)
        b = reconstruct_product(q, 20, GRID)
        assert np.all(b.rel_error < a.rel_error)
        assert np.all(a.rel_error <= a.tail_bound + a.eval_bound)
        assert np.all(b.rel_error <= b.tail_bound + b.eval_bound + 1e-12)

    def test_complex_q(self):
        r = reconstruct_product(0.3 + 0.4j, 15, GRID)
        assert np.all(r.rel_error <= r.tail_bound + r.eval_bound + 1e-12)

    def test_bad_K(self):
        with pytest.raises(DomainError):
            reconstruct_product(0.4, 0, GRID)


class TestDecompose:
    def test_q02(self):
        d = decompose(0.2)
        assert d.pairs == 0 and d.poly_coeffs == (1.0,)

    def test_q031(self):
        d = decompose(0.31)
        assert d.pairs == 1 and len(d.poly_coeffs) == 3
        assert d.poly_coeffs[0] == 1.0 and d.discriminants[0] < 0

    def test_at_q1(self):
        d = decompose(0.3092493386)
        assert d.pairs == 0 and d.poly_coeffs == (1.0,)
        # 8e-14 below the spectral value: two real zeros about 1e-6 apart, both in psi
        a, b = d.real_zeros[:2]
        assert abs(a - b) <= 2e-6 * abs(a)

    def test_exactness(self):
        # P times the real-zero product reproduces theta near the origin
        d = decompose(0.5)
        xs = np.array([0.5, -1.0, 1j, 2 + 1j])
        P = np.polynomial.polynomial.polyval(xs, d.poly_coeffs)
        psi = np.prod([1 - xs / r for r in d.real_zeros], axis=0)
        from partheta import eval_theta
        th = np.array([eval_theta(0.5, x).value for x in xs])
        assert np.all(np.abs(P * psi - th) <= 1e-6 * np.abs(th))

    @pytest.mark.parametrize("q", [0.2, 0.35, 0.6])
    def test_pair_count_consistency(self, q):
        assert decompose(q).pairs == complex_pair_count(q)

    def test_complex_q(self):
        with pytest.raises(DomainError):
            decompose(0.3 + 0.1j)


class TestLP:
    @pytest.mark.parametrize("q", [0.2, 0.5])
    def test_bounds(self, q):
        r = lp_bound_check(q, 8)
        assert r.D_estimate > 0
        assert all(g > 0 for g in r.g_coeffs)
        assert all(m >= 1 for m in r.bound_margin)

    def test_limit_trend(self):
        r = lp_bound_check(0.5, 8)
        dev = [abs(v - 1) for k, v in r.xi_q_k if k >= 20]
        assert max(dev) <= 0.1

    def test_domain(self):
        with pytest.raises(DomainError):
            lp_bound_check(-0.5)


class TestNegative:
    @pytest.mark.parametrize("q", [-0.1, -0.5, -0.9])
    def test_structure(self, q):
        r = negative_q_report(q)
        assert r.sign_alternation_ok and r.monotone_from is not None

    def test_small_q_no_pairs(self):
        assert negative_q_report(-0.1).complex_pair_count == 0

    def test_early_alternation_failure_reported(self):
        # two positive real zeros 1.052 and 2.755 precede the first negative one
        r = negative_q_report(-0.75)
        assert not r.sign_alternation_ok
        assert r.alternation_from is not None and r.alternation_from <= r.monotone_from
        assert r.real_zeros_signed[0] == pytest.approx(1.0524, abs=1e-4)
        assert r.real_zeros_signed[1] == pytest.approx(2.7554, abs=1e-4)

    def test_domain(self):
        with pytest.raises(DomainError):
            negative_q_report(0.5)
