import math

import numpy as np
import pytest

import alq


def test_presets_listed():
    assert set(alq.presets()) == {"sec4_1", "sec4_2"}


def test_det_and_adjugate():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert alq.det(m) == pytest.approx(-2.0)
    assert np.array_equal(alq.adjugate(m), np.array([[4.0, -2.0], [-3.0, 1.0]]))


def test_matrix_exponential():
    d = np.diag([1.0, 2.0])
    e = alq.mat_exp_oracle(d, 1.0)
    assert e[0, 0] == pytest.approx(math.e)
    assert e[1, 1] == pytest.approx(math.e ** 2)
    t = alq.mat_exp_taylor(d * 0.1, 1.0, 25)
    assert np.allclose(t, alq.mat_exp_oracle(d * 0.1, 1.0), atol=1e-14)


def test_scalar_lq():
    sol = alq.solve_lq_analytical([[-1.0]], [[1.0]], [[1.0]], 1.0, np.eye(2), [[1.0]], 20.0)
    assert sol["P"].shape == (2, 2)
    assert np.allclose(sol["P"], sol["P"].T)
    assert sol["theta"].shape == (3, 1)


def test_singularity_raises():
    a_p = [[0, 1, 0], [0, 0, 4.438], [0, -12, -24]]
    b_p = [[0], [0], [20]]
    c_p = [[1], [0], [0]]
    with pytest.raises(alq.AlqError):
        alq.solve_lq_analytical(a_p, b_p, c_p, 1.0, np.eye(4), [[1.0]], 7.0)


def test_table1_shape():
    cells = alq.reproduce_table1()
    assert len(cells) == 20
    lookup = {(t, p): e for t, p, e in cells}
    assert lookup[(7.0, 35)] == pytest.approx(2.234e-8, rel=0.2)


def test_spectra():
    reports = alq.reproduce_spectra()
    assert len(reports) == 3
    label, vartheta, eig = reports[0]
    assert any(abs(e - 0.67) < 0.01 for e in eig)


def test_short_run():
    trace, summary = alq.run_preset("sec4_1", duration=0.5)
    assert len(trace["t"]) == 5001
    assert summary["ticks"] == 5001
    assert not summary["overflow_flag"]
    assert trace["theta_hat1"][0] == pytest.approx(0.1)


def test_config_round_trip():
    text = alq.normalize_config("preset: sec4_2\ngains:\n  gamma1: 10\n")
    assert alq.normalize_config(text) == text
    with pytest.raises(alq.AlqError):
        alq.normalize_config("preset: sec4_1\ngains:\n  rho: -1\n")
