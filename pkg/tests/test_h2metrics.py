import numpy as np
import pytest
import scipy.linalg as spla

from delaymor import (NotInH2Error, QuadratureOptions, frequency_response,
                      from_expression, from_model, from_state_space,
                      h2_distance, h2_error, h2_norm)

from conftest import stable_matrices, stable_model

LYAP_ABS_TOL = 1e-6
LYAP_REL_TOL = 1e-4


def lyapunov_norm(E, A, B, C):
    # independent oracle: controllability-gramian H2 norm for tau = 0
    E, A, B, C = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (E, A, B, C))
    Ai = np.linalg.solve(E, A)
    Bi = np.linalg.solve(E, B)
    P = spla.solve_continuous_lyapunov(Ai, -Bi @ Bi.T)
    return float(np.sqrt(np.trace(C @ P @ C.T)))


def test_first_order_lag_closed_form():
    # ||1/(s+1)|| = 1/sqrt(2) under the 1/(2 pi) convention; the Lyapunov
    # route gives the same: P = 1/2, trace(C P C^T) = 1/2
    o = from_expression("1/(s+1)")
    zero = from_expression("0")
    assert h2_error(o, zero) == pytest.approx(1 / np.sqrt(2), abs=1e-7)
    assert lyapunov_norm(np.eye(1), [[-1.0]], [[1.0]], [[1.0]]) \
        == pytest.approx(1 / np.sqrt(2), rel=1e-12)


def test_identical_oracles_give_zero():
    o = from_expression("1/(s+1)")
    assert h2_error(o, o) == 0.0


def test_norm_homogeneity(rng):
    m = stable_model(rng, 3)
    a = from_model(m)
    a2 = from_state_space(m.E, m.A, 2.0 * m.B, m.C)
    assert h2_norm(a2) == pytest.approx(2.0 * h2_norm(a), rel=1e-9)


def test_quadrature_matches_lyapunov(rng):
    for trial in range(20):
        order = int(rng.integers(2, 7))
        E, A, B, C = stable_matrices(rng, order, descriptor=trial % 2 == 0)
        qn = h2_norm(from_state_space(E, A, B, C))
        ln = lyapunov_norm(E, A, B, C)
        assert abs(qn - ln) <= max(LYAP_ABS_TOL, LYAP_REL_TOL * abs(ln))


def test_triangle_inequality(rng):
    a = from_model(stable_model(rng, 3))
    b = from_model(stable_model(rng, 4))
    c = from_model(stable_model(rng, 2))
    ab, bc, ac = h2_error(a, b), h2_error(b, c), h2_error(a, c)
    assert ac <= ab + bc + 1e-9


def test_result_reports_error_estimate():
    o = from_expression("1/(s+1)")
    res = h2_distance(o)
    assert res.abs_error < 1e-6
    assert res.n_evals > 0


def test_non_decaying_integrand_rejected():
    with pytest.raises(NotInH2Error):
        h2_norm(from_expression("1"))


def test_delay_error_decays_despite_oscillation(rng):
    # e^{-i w tau} differences oscillate in the tail; the fitted tail must
    # not reject them
    m = stable_model(rng, 4, tau=0.3)
    a = from_model(m)
    b = from_model(stable_model(rng, 2, tau=0.3))
    val = h2_error(a, b)
    assert np.isfinite(val) and val > 0


class TestFrequencyResponse:
    def test_first_order_magnitude(self):
        o = from_expression("1/(s+1)")
        fr = frequency_response(o, [0.5, 1.0, 2.0])
        assert fr.magnitude_db[1, 0, 0] == pytest.approx(-3.0103, abs=1e-4)

    def test_unit_gain(self):
        # constant transfer: 0 dB, zero phase everywhere
        o = from_expression("1+0*s")
        fr = frequency_response(o, [1.0, 10.0])
        np.testing.assert_allclose(fr.magnitude_db, 0.0, atol=1e-12)
        np.testing.assert_allclose(fr.phase_deg, 0.0, atol=1e-12)

    def test_delay_model_matches_decomposition_pointwise(self, rng):
        from delaymor import substitution_map
        m = stable_model(rng, 3, tau=0.6)
        sib = m.delay_free_part()
        grid = np.geomspace(0.1, 10, 40)
        fr = frequency_response(from_model(m), grid)
        for i, w in enumerate(grid):
            ref = sib.transfer(substitution_map(1j * w, m.tau)) * np.exp(1j * w * m.tau)
            assert np.linalg.norm(fr.values[i] - ref) <= 1e-12 * np.linalg.norm(ref)

    def test_conjugate_symmetry(self, rng):
        m = stable_model(rng, 4, n_inputs=2, n_outputs=2)
        o = from_model(m)
        for w in (0.3, 1.7):
            np.testing.assert_allclose(o.eval(-1j * w), np.conj(o.eval(1j * w)),
                                       rtol=1e-13)

    def test_phase_unwrap_on_delay(self):
        # pure delay e^{-s}: linear phase, far beyond -180 degrees
        o = from_expression("exp(-s)")
        grid = np.linspace(0.5, 20, 60)
        fr = frequency_response(o, grid)
        assert fr.phase_deg[-1, 0, 0] == pytest.approx(-np.degrees(20.0), rel=1e-6)

    def test_failures_recorded_not_fatal(self):
        o = from_expression("1/(s^2+1)")  # pole at i
        fr = frequency_response(o, [0.5, 1.0, 2.0])
        assert len(fr.failures) == 1 and fr.failures[0][0] == 1
        assert np.isnan(fr.values[1, 0, 0].real)
        assert np.isfinite(fr.values[0, 0, 0].real)

    def test_grid_must_ascend(self):
        o = from_expression("1/(s+1)")
        with pytest.raises(ValueError):
            frequency_response(o, [1.0, 0.5])

    def test_csv_columns(self, tmp_path, rng):
        m = stable_model(rng, 3, n_inputs=2, n_outputs=2)
        fr = frequency_response(from_model(m), np.geomspace(0.1, 10, 7))
        path = tmp_path / "resp.csv"
        fr.to_csv(path)
        header = path.read_text().splitlines()[0].split(",")
        assert header[0] == "omega"
        for col in ("re_11", "im_11", "re_22", "im_22", "sigma_1", "sigma_2"):
            assert col in header
        assert len(path.read_text().splitlines()) == 8
