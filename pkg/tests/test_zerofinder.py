
import numpy as np
import pytest

from partheta import (
    CertificationError,
    ConvergenceError,
    DomainError,
    TailRegimeNotReached,
    certify_tail_zero,
    classify_multiplicity,
    count_zeros_argument_principle,
    find_zeros_in_disk,
    refine_newton,
    seed_zeros_asymptotic,
)
from partheta.zerofinder import default_k0, tail_delta, tail_offset, theta_shifted, zero_ladder


def as_c(pairs):
    return [complex(a, b) for a, b in pairs]


class TestSeeds:
    def test_positive(self):
        assert seed_zeros_asymptotic(0.5, 1, 3) == [-2, -4, -8]

    def test_negative_alternates(self):
        assert seed_zeros_asymptotic(-0.5, 1, 3) == [2, -4, 8]

    def test_formula(self):
        q = 0.3092493386
        assert seed_zeros_asymptotic(q, 5, 5)[0] == pytest.approx(-q ** -5, rel=1e-15)

    def test_zero_q(self):
        with pytest.raises(DomainError):
            seed_zeros_asymptotic(0, 1, 2)


class TestNewton:
    def test_rightmost_q02(self, frozen):
        z = refine_newton(0.2, -5.0)
        assert z.residual <= 1e-12
        assert z.location == pytest.approx(complex(*frozen["zeros_q0.2"]["roots"][0]), rel=1e-12)

    def test_tail_rate_q05(self):
        z = refine_newton(0.5, -(0.5 ** -15))
        assert abs(z.location + 0.5 ** -15) * 0.5 ** 15 <= 0.05

    def test_theta_star_seed_converges_fast(self):
        q, k = 0.4, 14
        z = refine_newton(q, -(q ** -k))
        assert z.iterations <= 5

    def test_reports_failure(self):
        with pytest.raises(ConvergenceError) as info:
            refine_newton(0.5, 3.0 + 0.1j, max_iter=2)
        assert info.value.last_iterate is not None

    def test_nonfinite_seed(self):
        with pytest.raises(DomainError):
            refine_newton(0.5, float("nan"))


class TestArgumentPrinciple:
    def test_unit_disk_q02(self):
        assert count_zeros_argument_principle(0.2, 0, 1) == 0

    def test_omega_disk(self):
        q, k = 0.4, 10
        assert count_zeros_argument_principle(q, -(q ** -k), 0.1 * q ** -k) == 1

    def test_circle_around_certified_zero(self):
        zs = find_zeros_in_disk(0.35, 100)
        for z in zs.zeros:
            assert count_zeros_argument_principle(0.35, z.location, z.cert_radius) == z.multiplicity

    def test_bad_radius(self):
        with pytest.raises(DomainError):
            count_zeros_argument_principle(0.3, 0, 0)

    def test_contour_through_zero(self):
        z = refine_newton(0.2, -5.0).location
        with pytest.raises(CertificationError):
            count_zeros_argument_principle(0.2, 0, abs(z))


class TestFindZeros:
    def test_q02_all_real_simple(self, frozen):
        zs = find_zeros_in_disk(0.2, 0.2 ** -6)
        assert zs.total_multiplicity == zs.winding == 6
        assert all(z.location.imag == 0 and z.location.real < 0 for z in zs.zeros)
        assert all(z.multiplicity == 1 and z.certified for z in zs.zeros)
        oracle = as_c(frozen["zeros_q0.2"]["roots"])
        for z, o in zip(zs.zeros, oracle):
            assert abs(z.location - o) <= 1e-10 * abs(o)

    def test_q031_one_pair(self, frozen):
        zs = find_zeros_in_disk(0.31, 0.31 ** -8)
        assert len(zs.upper_zeros()) == 1 == frozen["zeros_q0.31"]["pairs"]
        assert zs.total_multiplicity == zs.winding

    def test_q_minus05(self):
        zs = find_zeros_in_disk(-0.5, 2 ** 8)
        assert all(z.location.imag == 0 for z in zs.zeros)
        xs = [z.location.real for z in zs.zeros]
        assert all(a * b < 0 for a, b in zip(xs, xs[1:]))
        assert all(abs(a) < abs(b) for a, b in zip(xs, xs[1:]))

    def test_q_minus01_oracle(self, frozen):
        o = frozen["zeros_q-0.1"]
        zs = find_zeros_in_disk(-0.1, o["radius"])
        assert zs.winding == o["winding"]
        for z, r in zip(zs.zeros, as_c(o["roots"])):
            assert abs(z.location - r) <= 1e-10 * abs(r)

    def test_complex_q_conjugate_free(self):
        zs = find_zeros_in_disk(0.6 + 0.3j, 100)
        assert zs.total_multiplicity == zs.winding
        assert all(z.certified for z in zs.zeros)

    def test_conjugate_pairing_real_q(self):
        zs = find_zeros_in_disk(0.7, 1e3)
        locs = sorted((z.location for z in zs.zeros), key=lambda z: (z.real, z.imag))
        conj = sorted((z.location.conjugate() for z in zs.zeros), key=lambda z: (z.real, z.imag))
        assert locs == conj

    def test_sorted_by_modulus(self):
        zs = find_zeros_in_disk(-0.7, 500)
        mods = [abs(z.location) for z in zs.zeros]
        assert mods == sorted(mods)

    def test_disjoint_circles(self):
        zs = find_zeros_in_disk(0.8, 200)
        zz = zs.zeros
        for i in range(len(zz)):
            for j in range(i + 1, len(zz)):
                assert abs(zz[i].location - zz[j].location) > zz[i].cert_radius + zz[j].cert_radius

    @pytest.mark.parametrize("q", [0.05, 0.1, 0.2, 0.29])
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_count_small_q(self, q, m):
        zs = find_zeros_in_disk(q, q ** -(m + 0.5))
        assert zs.winding == m

    def test_domain(self):
        with pytest.raises(DomainError):
            find_zeros_in_disk(0.5, 0.5)
        with pytest.raises(DomainError):
            find_zeros_in_disk(0, 10)


class TestTail:
    def test_q05_k12(self):
        z = certify_tail_zero(0.5, 12)
        assert z.certified and z.multiplicity == 1 and z.k == 12

    def test_negative_parity(self):
        assert certify_tail_zero(-0.5, 12).location.real < 0
        assert certify_tail_zero(-0.5, 13).location.real > 0

    def test_q09_small_k_not_reached(self):
        # k = 5 sits among the complex zeros of theta(0.9, .)
        with pytest.raises(TailRegimeNotReached):
            certify_tail_zero(0.9, 5)

    def test_smallest_working_k(self):
        # tabulated start of the tail regime; monotone in q
        def first_ok(q):
            for k in range(1, 80):
                try:
                    certify_tail_zero(q, k)
                    return k
                except TailRegimeNotReached:
                    continue
        ks = [first_ok(q) for q in (0.5, 0.7, 0.9)]
        assert ks == [4, 8, 29]

    def test_q09_needs_smaller_disks(self):
        # with delta 0.1 the disk around mu_k reaches mu_{k-1} = 0.9 mu_k
        assert tail_delta(0.9) == pytest.approx(0.05)
        with pytest.raises(TailRegimeNotReached):
            certify_tail_zero(0.9, 40, delta_rel=0.1)
        z = certify_tail_zero(0.9, 40)
        assert z.certified and abs(z.offset) < 0.05 * 0.9 ** -40

    def test_backends_agree_on_product(self):
        from partheta.kernels import _loops, _numpy
        q, k = 0.9 + 0j, 35
        Xs = 0.05 * q ** -k * np.exp(2j * np.pi * np.arange(16) / 16)
        ys = -(q ** -k) + Xs
        a = _numpy.theta_star_product_many(q, ys, Xs, k, 400)
        b = [_loops.theta_star_product(q, y, X, k, 400) for y, X in zip(ys, Xs)]
        assert np.allclose(a[0], [v for v, _ in b], rtol=1e-12)
        assert np.allclose(a[1], [r for _, r in b], rtol=1e-12)

    def test_shifted_matches_direct(self):
        q, k = 0.5, 8
        X = tail_offset(q, k)
        assert abs(theta_shifted(q, k, X)) < 1e-14

    @pytest.mark.parametrize("q", [0.3, 0.5, 0.7, -0.5])
    def test_trend(self, q):
        k0 = default_k0(q)
        es = [abs(certify_tail_zero(q, k).offset) * abs(q) ** k for k in range(k0, k0 + 16)]
        assert all(es[i + 5] < es[i] for i in range(11))

    def test_ladder_consistency(self):
        zs, tails = zero_ladder(0.4, 20)
        assert zs.total_multiplicity + len(tails) == 20
        assert all(abs(t.location) > zs.disk_radius for t in tails)


class TestMultiplicity:
    def test_double_at_q1(self):
        q = 0.3092493386
        z = classify_multiplicity(q, [-7.5032559648], 0.5)
        assert z.multiplicity == 2

    def test_simple(self):
        z0 = refine_newton(0.2, -5.0).location
        z = classify_multiplicity(0.2, [z0, z0 * (1 + 1e-10)], 0.5)
        assert z.multiplicity == 1 and z.certified

    def test_two_distinct_zeros_rejected(self):
        zs = find_zeros_in_disk(0.31, 100)
        a, b = zs.zeros[0].location, zs.zeros[1].location
        with pytest.raises(CertificationError):
            classify_multiplicity(0.31, [a, b], 2 * abs(a - b))

    def test_empty(self):
        with pytest.raises(DomainError):
            classify_multiplicity(0.3, [], 1.0)
