import math

import numpy as np
import pytest

from delaymor import (InjectivityError, build_delay_loewner,
                      build_hermite_delay_loewner, build_loewner,
                      check_injectivity, from_expression, from_state_space,
                      substitution_map, substitution_map_derivative,
                      tangential_data_from_oracle)

from conftest import rhp_points, stable_oracle

INTERP_RTOL = 1e-8

EXAMPLE_EXPR = "(2*s+1.3*exp(-s))/(s^2+1.3*s*exp(-s)+0.3*exp(-2*s))"


class TestSubstitutionMap:
    def test_zero_fixed_point(self):
        for tau in (0.0, 0.5, 3.0):
            assert substitution_map(0.0, tau) == 0.0

    def test_tau_zero_is_identity(self, rng):
        for _ in range(5):
            s = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            assert substitution_map(s, 0.0) == s

    def test_unit_value(self):
        assert substitution_map(1.0, 1.0) == pytest.approx(math.e)

    def test_derivative_vanishes_at_minus_inverse_tau(self):
        assert substitution_map_derivative(-2.0, 0.5) == pytest.approx(0.0)


class TestInjectivity:
    def test_separated_points_ok(self):
        assert check_injectivity([0.1, 1.0], 1.0) is None

    def test_duplicate_point_violates(self):
        pair = check_injectivity([0.7, 0.7], 1.0)
        assert pair == (0.7, 0.7)

    def test_distinct_reals_with_equal_image(self):
        # x e^x has a minimum at x = -1: the two preimages of
        # -0.5 e^{-0.5} are -0.5 and the root below -1, frozen from an
        # independent bisection on x e^x = -0.303265...
        x2 = -1.7564312086261695
        assert x2 * math.exp(x2) == pytest.approx(-0.5 * math.exp(-0.5))
        pair = check_injectivity([-0.5, x2], 1.0)
        assert pair is not None
        assert set(np.round(np.real(pair), 6)) == {-0.5, round(x2, 6)}


class TestBuildDelayLoewner:
    def test_tau_zero_matches_plain_loewner_bitwise(self, rng):
        o = stable_oracle(rng, 4)
        lam, mu = rhp_points(rng, 3), rhp_points(rng, 3) + 0.09
        data = tangential_data_from_oracle(o, lam, mu)
        plain = build_loewner(data).to_model()
        delayed = build_delay_loewner(data, 0.0)
        np.testing.assert_allclose(delayed.E, plain.E, atol=1e-14, rtol=0)
        np.testing.assert_allclose(delayed.A, plain.A, atol=1e-14, rtol=0)
        np.testing.assert_allclose(delayed.B, plain.B, atol=1e-14, rtol=0)
        np.testing.assert_allclose(delayed.C, plain.C, atol=1e-14, rtol=0)
        assert delayed.tau == 0.0

    def test_order_one_delay_interpolation(self):
        # H(s) = 1/(s + e^{-s}) interpolated at lambda = 0.5, mu = 2, tau = 1
        o = from_state_space([[1.0]], [[-1.0]], [[1.0]], [[1.0]], tau=1.0)
        data = tangential_data_from_oracle(o, [0.5], [2.0])
        m = build_delay_loewner(data, 1.0)
        assert m.order == 1 and m.tau == 1.0
        assert abs(m.transfer(0.5)[0, 0] - data.right_resp[0, 0]) <= 1e-10
        assert abs(m.transfer(2.0)[0, 0] - data.left_resp[0, 0]) <= 1e-10

    def test_constraints_random(self, rng):
        tau = 0.37
        o = stable_oracle(rng, 6, tau=tau, n_inputs=2, n_outputs=2)
        lam, mu = rhp_points(rng, 4), rhp_points(rng, 4) + 0.21
        rd = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        ld = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        data = tangential_data_from_oracle(o, lam, mu, rd, ld)
        m = build_delay_loewner(data, tau)
        for j in range(4):
            right = m.transfer(lam[j]) @ rd[j]
            left = ld[j] @ m.transfer(mu[j])
            assert np.linalg.norm(right - data.right_resp[j]) \
                <= INTERP_RTOL * np.linalg.norm(data.right_resp[j])
            assert np.linalg.norm(left - data.left_resp[j]) \
                <= INTERP_RTOL * np.linalg.norm(data.left_resp[j])

    def test_injectivity_enforced(self):
        o = from_state_space([[1.0]], [[-1.0]], [[1.0]], [[1.0]], tau=1.0)
        data = tangential_data_from_oracle(o, [-0.5], [-1.7564312086261695])
        with pytest.raises(InjectivityError):
            build_delay_loewner(data, 1.0)


class TestHermiteDelayLoewner:
    def test_tau_zero_degenerates_to_hermite(self, rng):
        from delaymor import build_hermite_loewner
        o = stable_oracle(rng, 4)
        sh = rhp_points(rng, 3)
        a = build_hermite_delay_loewner(o, sh, 0.0)
        b = build_hermite_loewner(o, sh)
        np.testing.assert_allclose(a.E, b.E, atol=1e-14, rtol=0)
        np.testing.assert_allclose(a.A, b.A, atol=1e-14, rtol=0)

    def test_exact_recovery_of_irrational_transfer(self):
        o = from_expression(EXAMPLE_EXPR)
        m = build_hermite_delay_loewner(o, [0.1, 1.0], tau=1.0)
        omega = np.geomspace(1e-2, 1e2, 100)
        for w in omega:
            ref = o.eval(1j * w)[0, 0]
            assert abs(m.transfer(1j * w)[0, 0] - ref) <= 1e-6 * abs(ref)

    def test_chain_rule_identity(self, rng):
        # G'(f(s)) f'(s) = (H'(s) - tau H(s)) e^{-s tau}
        o = from_expression(EXAMPLE_EXPR)
        tau = 1.0
        for s in (0.1, 1.0, 0.4 + 0.2j):
            H = o.eval(s)[0, 0]
            Hp = o.eval_derivative(s)[0, 0]
            gprime = (Hp - tau * H) * np.exp(-2 * s * tau) / (1 + tau * s)
            lhs = gprime * substitution_map_derivative(s, tau)
            rhs = Hp * np.exp(-s * tau) - tau * H * np.exp(-s * tau)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    def test_hermite_conditions_random(self, rng):
        tau = 0.29
        o = stable_oracle(rng, 6, tau=tau, n_inputs=2, n_outputs=3)
        sh = rhp_points(rng, 4)
        rd = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        ld = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        m = build_hermite_delay_loewner(o, sh, tau, rd, ld)
        for k in range(4):
            Hk = o.eval(sh[k])
            Hpk = o.eval_derivative(sh[k])
            assert np.linalg.norm(m.transfer(sh[k]) @ rd[k] - Hk @ rd[k]) \
                <= INTERP_RTOL * np.linalg.norm(Hk @ rd[k])
            assert np.linalg.norm(ld[k] @ m.transfer(sh[k]) - ld[k] @ Hk) \
                <= INTERP_RTOL * np.linalg.norm(ld[k] @ Hk)
            # derivative condition double-checked against a finite difference
            # of the built model itself
            h = 1e-6 * max(1.0, abs(sh[k]))
            fd = (m.transfer(sh[k] + h) - m.transfer(sh[k] - h)) / (2 * h)
            assert abs(ld[k] @ m.transfer_derivative(sh[k]) @ rd[k]
                       - ld[k] @ fd @ rd[k]) \
                <= 1e-5 * abs(ld[k] @ Hpk @ rd[k])
            assert abs(ld[k] @ m.transfer_derivative(sh[k]) @ rd[k]
                       - ld[k] @ Hpk @ rd[k]) \
                <= INTERP_RTOL * abs(ld[k] @ Hpk @ rd[k])

    def test_exact_recovery_of_random_delay_model(self, rng):
        r, tau = 4, 0.5
        o = stable_oracle(rng, r, tau=tau)
        sh = rhp_points(rng, r)
        m = build_hermite_delay_loewner(o, sh, tau)
        for _ in range(20):
            s = complex(rng.uniform(0.2, 3), rng.uniform(-3, 3))
            ref = o.eval(s)
            assert np.linalg.norm(m.transfer(s) - ref) \
                <= 1e-8 * np.linalg.norm(ref)

    def test_shift_at_minus_inverse_tau_rejected(self, rng):
        o = stable_oracle(rng, 3, tau=0.5)
        with pytest.raises(ValueError, match="-1/tau"):
            build_hermite_delay_loewner(o, [-2.0, 1.0], tau=0.5)


def test_lemma_decomposition_property(rng):
    # H_d(s) = G(f(s)) e^{s tau} for the delay-free sibling G of any model
    from conftest import stable_model
    for trial in range(5):
        tau = rng.uniform(0.1, 1.0)
        model = stable_model(rng, 4, tau=tau, n_inputs=2, n_outputs=2,
                             descriptor=True)
        sibling = model.delay_free_part()
        for _ in range(20):
            s = complex(rng.uniform(0.1, 2), rng.uniform(-2, 2))
            lhs = model.transfer(s)
            rhs = sibling.transfer(substitution_map(s, tau)) * np.exp(s * tau)
            assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(lhs)
