import numpy as np
import pytest

from torusfact.errors import GridTooCoarse, NoConvergence, SingularSample, SpectrumViolation
from torusfact.funcalc import functional_calc
from torusfact.grid import (SampledMap, evaluate, fejer_project, unitarity_defect, unitarize)
from torusfact.series import (MatrixSeries, ScalarSeries, mul, random_matrix_series,
                              random_series, wiener_norm)
from torusfact.witness import build_witness


class TestSampledMap:
    def test_shape_checks(self):
        with pytest.raises(ValueError):
            SampledMap(np.zeros((4, 2, 3)))
        with pytest.raises(GridTooCoarse):
            SampledMap(np.zeros((1, 4, 2, 2)))
        with pytest.raises(ValueError):
            SampledMap(np.full((4, 2, 2), np.nan))

    def test_from_function(self):
        X = SampledMap.from_function(lambda x: np.exp(2j * np.pi * x[..., :1, None]), (8,))
        assert np.allclose(X.samples, evaluate(ScalarSeries.character((1,)), (8,)).samples)


class TestFejer:
    def test_constant_exact(self):
        c = np.array([[1, 2], [3j, 4]])
        proj = fejer_project(SampledMap(np.broadcast_to(c, (6, 6, 2, 2))), 2)
        assert proj.series == MatrixSeries.constant(c, 2)
        assert proj.sup_error == 0.0

    def test_grid_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            fejer_project(SampledMap(np.ones((8, 1, 1))), 4)

    def test_dirichlet_recovers_polynomial(self, rng):
        a = random_matrix_series(rng, 2, 2, 3)
        proj = fejer_project(evaluate(a, (9, 9)), 3, kernel="dirichlet")
        diff = proj.series - a
        assert wiener_norm(diff) <= 1e-9

    def test_fejer_weights_polynomial(self, rng):
        a = random_series(rng, 1, 3)
        proj = fejer_project(evaluate(a, (16,)), 5, cutoff=0.0)
        for (j,), c in a.terms.items():
            want = c * (1 - abs(j) / 6)
            assert abs(proj.series.coefficient((j,))[0, 0] - want) <= 1e-12

    def test_witness_error_decreases(self):
        X = build_witness(2, 1, 64)
        errs = [fejer_project(X, D).sup_error for D in (4, 6, 8, 10)]
        assert all(a > b for a, b in zip(errs, errs[1:]))


class TestUnitarize:
    def test_unitary_fixed(self, rng):
        q, _ = np.linalg.qr(rng.normal(size=(5, 3, 3)) + 1j * rng.normal(size=(5, 3, 3)))
        U = unitarize(SampledMap(q))
        assert np.abs(U.samples - q).max() <= 1e-12

    def test_scalar_multiple(self):
        X = SampledMap(np.broadcast_to(2 * np.eye(2), (4, 2, 2)))
        assert np.abs(unitarize(X).samples - np.eye(2)).max() <= 1e-15

    def test_random_invertible(self, rng):
        X = SampledMap(rng.normal(size=(6, 6, 3, 3)) + 1j * rng.normal(size=(6, 6, 3, 3)))
        assert unitarity_defect(unitarize(X)) <= 1e-12

    def test_singular_node_reported(self):
        s = np.broadcast_to(np.eye(2), (4, 4, 2, 2)).copy()
        s[2, 1] = [[1, 1], [1, 1]]
        with pytest.raises(SingularSample) as err:
            unitarize(SampledMap(s))
        assert err.value.node == (2, 1)

    def test_same_phase_of_det(self, rng):
        X = SampledMap(rng.normal(size=(8, 2, 2)) + 1j * rng.normal(size=(8, 2, 2)))
        d0 = np.linalg.det(X.samples)
        d1 = np.linalg.det(unitarize(X).samples)
        assert np.allclose(d1, d0 / np.abs(d0))


class TestFunctionalCalc:
    def test_sqrt_constant(self):
        r = functional_calc("sqrt", MatrixSeries.constant(np.diag([4.0, 9.0]), 1))
        assert np.allclose(r.series.coefficient((0,)), np.diag([2.0, 3.0]), atol=1e-12)

    def test_inverse(self, rng):
        a = ScalarSeries(2, {(0, 0): 3.0, (1, 0): 0.5, (0, -1): 0.4j, (1, 1): -0.3})
        r = functional_calc("inverse", a, tol=1e-10)
        residual = mul(a, r.series) - ScalarSeries.constant(1, 2)
        assert wiener_norm(residual) <= 1e-8

    def test_power_two(self, rng):
        A = random_matrix_series(rng, 2, 1, 2)
        r = functional_calc("power", A, exponent=2, tol=1e-10)
        assert wiener_norm(r.series - A @ A) <= 1e-8

    def test_exp_log_identity(self):
        A = MatrixSeries(2, 1, {(0,): np.array([[3, 0.2], [0.1, 2]]),
                                (1,): np.array([[0.3, 0], [0.2, 0.1]])})
        log = functional_calc("log", A, tol=1e-11)
        back = functional_calc("exp", log.series, tol=1e-11)
        assert wiener_norm(back.series - A) <= 1e-8

    def test_sup_error_reported(self):
        a = ScalarSeries(1, {(0,): 2.0, (1,): 0.5})
        r = functional_calc("sqrt", a, tol=1e-10)
        assert r.sup_error <= 1e-10
        assert r.margin > 1.0

    def test_spectrum_violation(self):
        a = ScalarSeries(1, {(0,): 0.0, (1,): 1.0})  # z winds around 0
        with pytest.raises(SpectrumViolation):
            functional_calc("log", a, grid=8)

    def test_inverse_near_zero(self):
        a = ScalarSeries(1, {(0,): 1.0, (1,): 1.0})  # vanishes at x = 1/2
        with pytest.raises(SpectrumViolation):
            functional_calc("inverse", a, grid=8)

    def test_no_convergence(self):
        a = ScalarSeries(1, {(0,): 1.0, (1,): -0.999})
        with pytest.raises(NoConvergence):
            functional_calc("inverse", a, tol=1e-12, margin=1e-6, max_degree=16)

    def test_unknown_function(self):
        with pytest.raises(ValueError):
            functional_calc("tan", ScalarSeries.constant(1, 1))
