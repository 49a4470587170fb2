import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from partheta import (
    DomainError,
    PrecisionBudgetExceeded,
    QKind,
    QParam,
    eval_jacobi_theta_star,
    eval_theta,
    eval_theta_dq,
    eval_theta_dx,
    eval_xi,
    truncation_order,
)
from partheta.evalcore import derivative_tail, theta_tail


def total_bound(*rs):
    return sum(r.error_bound for r in rs)


class TestQParam:
    def test_kinds(self):
        assert QParam.of(0.3).kind is QKind.POSITIVE_REAL
        assert QParam.of(-0.3).kind is QKind.NEGATIVE_REAL
        assert QParam.of(0.3 + 0.1j).kind is QKind.COMPLEX
        assert QParam.of(0).kind is QKind.POSITIVE_REAL

    @pytest.mark.parametrize("q", [1, -1, 1.2, 0.8 + 0.8j, float("nan")])
    def test_outside_disk(self, q):
        with pytest.raises(DomainError):
            QParam.of(q)

    def test_zero_excluded_on_request(self):
        with pytest.raises(DomainError):
            QParam.of(0, allow_zero=False)


class TestTruncationOrder:
    def test_frozen(self, frozen):
        t = frozen["truncation_order"]
        assert truncation_order(0.5, 1, 1e-15) == t["q0.5_r1_eps1e-15"]
        assert truncation_order(0.95, 0.95 ** -20, 1e-12) == t["q0.95_r0.95^-20_eps1e-12"]

    def test_q_zero(self):
        assert truncation_order(0, 123.0, 1e-30) == 0

    def test_minimality(self):
        N = truncation_order(0.5, 1, 1e-15)
        assert 0.5 ** N * 1 >= 0.5 or theta_tail(0.5, 1, N - 1).bound > 1e-15

    def test_cap(self):
        with pytest.raises(PrecisionBudgetExceeded, match="precision budget"):
            truncation_order(0.999, 1e6, 1e-15, max_order=200)

    def test_bad_eps(self):
        with pytest.raises(DomainError):
            truncation_order(0.5, 1, 0)


class TestEvalTheta:
    def test_at_zero(self):
        for q in [0.3, -0.7, 0.5j, 0]:
            r = eval_theta(q, 0)
            assert r.value == 1 and r.error_bound <= 1e-14

    def test_q_zero_is_one(self):
        assert eval_theta(0, 5 + 2j).value == 1

    def test_frozen_value(self, frozen):
        r = eval_theta(0.5, 1)
        assert abs(r.value - frozen["theta_q0.5_x1"]) <= r.error_bound
        assert abs(r.value - 1.6416326) < 1e-7

    def test_conjugate_symmetry(self):
        w = 1.3 - 2.2j
        a = eval_theta(0.3, w.conjugate()).value
        b = eval_theta(0.3, w).value.conjugate()
        assert a == b

    def test_strict_budget(self):
        with pytest.raises(PrecisionBudgetExceeded):
            eval_theta(0.9, 0.9 ** -60, 1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.05, 0.9), st.floats(-math.pi, math.pi), st.floats(0, 1), st.floats(-math.pi, math.pi))
    def test_oracle_dominance(self, qm, qa, t, xa):
        # |x| up to |q|^-8, oracle with 4N terms at 40 digits
        q = qm * cmath.exp(1j * qa)
        x = qm ** (-8 * t) * cmath.exp(1j * xa)
        r = eval_theta(q, x, 1e-10, strict=False)
        mp.mp.dps = 40
        qq, xx = mp.mpc(q), mp.mpc(x)
        ref = mp.fsum(qq ** (j * (j + 1) // 2) * xx ** j for j in range(4 * r.terms_used + 8))
        assert abs(complex(ref) - r.value) <= r.error_bound


class TestDerivatives:
    H = 1e-5

    def fd(self, f, z):
        return (f(z + self.H) - f(z - self.H)) / (2 * self.H)

    def test_dx_at_zero(self):
        for q in [0.3, -0.4, 0.2 + 0.5j]:
            assert eval_theta_dx(q, 0).value == q

    def test_dq_at_zero(self):
        assert eval_theta_dq(0.4, 0).value == 0

    @pytest.mark.parametrize("q,x", [(0.5, 1), (0.2, -1)])
    def test_dx_finite_difference(self, q, x):
        d = eval_theta_dx(q, x)
        fd = self.fd(lambda z: eval_theta(q, z).value, x)
        assert abs(d.value - fd) <= d.error_bound + 1e-8

    @pytest.mark.parametrize("q,x", [(0.3, -5), (0.5, 1)])
    def test_dq_finite_difference(self, q, x):
        d = eval_theta_dq(q, x)
        fd = self.fd(lambda p: eval_theta(p, x).value, q)
        assert abs(d.value - fd) <= d.error_bound + 1e-7 * max(1, abs(d.value))

    def test_derivative_tail_dominates(self):
        # tail bound vs a direct long sum of |terms|
        q, r, N = 0.6, 5.0, 12
        b = derivative_tail(q, r, N, 1, 1).bound
        direct = sum(j * (j * (j + 1) // 2) * q ** (j * (j + 1) // 2 - 1) * r ** (j - 1) for j in range(N + 1, 200))
        assert direct <= b


class TestThetaStar:
    def test_zero_at_minus_one(self):
        r = eval_jacobi_theta_star(0.4, -1)
        assert abs(r.value) <= r.error_bound

    def test_methods_agree(self):
        a = eval_jacobi_theta_star(0.4, 2)
        b = eval_jacobi_theta_star(0.4, 2, method="triple_product")
        assert abs(a.value - b.value) <= total_bound(a, b)

    def test_functional_equation(self):
        q, x = 0.4, 2.0
        a = eval_jacobi_theta_star(q, x)
        b = eval_jacobi_theta_star(q, q * x)
        assert abs(a.value - q * x * b.value) <= a.error_bound + q * x * b.error_bound

    def test_x_zero(self):
        with pytest.raises(DomainError):
            eval_jacobi_theta_star(0.4, 0)

    def test_bad_method(self):
        with pytest.raises(DomainError):
            eval_jacobi_theta_star(0.4, 1, method="nope")

    def test_random_identities(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            q = rng.uniform(0.05, 0.9) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
            y = rng.uniform(0.2, 5) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
            a = eval_jacobi_theta_star(q, y, 1e-10, strict=False)
            b = eval_jacobi_theta_star(q, y, 1e-10, "triple_product", strict=False)
            assert abs(a.value - b.value) <= total_bound(a, b)


class TestXi:
    def test_split(self, frozen):
        q, x = 0.4, 10
        t, s, xi = eval_theta(q, x), eval_jacobi_theta_star(q, x), eval_xi(q, x)
        assert abs(t.value - (s.value + xi.value)) <= total_bound(t, s, xi)
        assert abs(t.value - frozen["theta_q0.4_x10"]) <= t.error_bound

    def test_coefficient_bound(self):
        for A in [2.0, 10.0, 1e3]:
            assert abs(eval_xi(0.4, -A).value) <= 1 / (A - 1)

    def test_real(self):
        assert eval_xi(0.3, 4.0).value.imag == 0

    def test_domain(self):
        with pytest.raises(DomainError):
            eval_xi(0.4, 0.5)
        with pytest.raises(DomainError):
            eval_xi(0.4, 1.0)
