import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from torusfact.errors import ApproximationTooCoarse, GridTooCoarse, NotOnSphere
from torusfact.grid import evaluate
from torusfact.invariants import component_descriptor
from torusfact.witness import (build_witness, cube_to_sphere, sphere_to_cube, su2_chart,
                               witness_series, witness_values, wrap)

P = np.array([1.0, 0, 0, 0])
unit_cube = arrays(float, 3, elements=st.floats(0, 1, exclude_max=True))


class TestCubeToSphere:
    def test_boundary_point(self):
        assert np.allclose(cube_to_sphere([0, 0.3, 0.7]), P, atol=1e-15)

    def test_all_faces(self, rng):
        x = rng.random((200, 3))
        x[np.arange(200), rng.integers(0, 3, 200)] = 0.0
        assert np.abs(cube_to_sphere(x) - P).max() <= 1e-15

    def test_centre(self):
        assert np.allclose(cube_to_sphere([0.5, 0.5, 0.5]), -P)

    def test_unit_norm(self, rng):
        s = cube_to_sphere(rng.random((10_000, 3)))
        assert np.abs(np.linalg.norm(s, axis=-1) - 1).max() <= 1e-14

    @given(unit_cube)
    def test_inverse(self, x):
        y = 2 * x - 1
        if np.abs(y).max() > 1 - 1e-6:
            return  # the boundary collapses to P
        back = sphere_to_cube(cube_to_sphere(x))
        assert np.abs(back - x).max() <= 1e-9

    def test_inverse_undefined_at_p(self):
        with pytest.raises(ValueError):
            sphere_to_cube(P)


class TestChart:
    def test_identity(self):
        assert np.array_equal(su2_chart(P), np.eye(2))

    def test_second_axis(self):
        assert np.allclose(su2_chart([0, 1, 0, 0]), np.diag([1j, -1j]))

    @given(arrays(float, 4, elements=st.floats(-1, 1)))
    def test_values_in_su2(self, v):
        norm = np.linalg.norm(v)
        if norm < 1e-3:
            return
        S = su2_chart(v / norm)
        assert np.allclose(S @ S.conj().T, np.eye(2), atol=1e-12)
        assert abs(np.linalg.det(S) - 1) <= 1e-12

    def test_off_sphere(self):
        with pytest.raises(NotOnSphere):
            su2_chart([1, 1, 0, 0])


class TestBuildWitness:
    def test_m0_constant_in_x1(self):
        s = build_witness(2, 0, 16).samples
        assert np.abs(s - s[:1]).max() == 0

    def test_block_structure(self):
        s = build_witness(3, 1, 16).samples
        assert np.all(s[..., 0, 0] == 1)
        assert np.all(s[..., 0, 1:] == 0) and np.all(s[..., 1:, 0] == 0)

    def test_boundary_nodes_identity(self):
        s = build_witness(2, 2, 16).samples
        for face in (s[0], s[:, 0], s[:, :, 0]):
            assert np.abs(face - np.eye(2)).max() <= 1e-15

    def test_unitary_det_one(self):
        s = build_witness(2, -2, 16).samples
        assert np.abs(s @ np.conj(np.swapaxes(s, -1, -2)) - np.eye(2)).max() <= 1e-14
        assert np.abs(np.linalg.det(s) - 1).max() <= 1e-14

    @pytest.mark.parametrize("m", [2, 3, -1])
    def test_wrap_relation(self, m):
        N = 24
        one = build_witness(2, 1, N).samples
        many = build_witness(2, m, N).samples
        idx = (m * np.arange(N)) % N
        assert np.abs(many - one[idx]).max() <= 1e-12

    def test_wrap(self):
        assert np.allclose(wrap([0.7, 0.2, 0.1], 3), [0.1, 0.2, 0.1])
        assert np.allclose(wrap([0.7, 0.2, 0.1], 0), [0.0, 0.2, 0.1])

    def test_needs_n2(self):
        with pytest.raises(ValueError):
            witness_values(np.zeros(3), 1, 1)

    def test_grid_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            build_witness(2, 1, 4)


class TestWitnessSeries:
    def test_descriptor_preserved(self):
        w = witness_series(2, 1, 8, 32)
        assert w.sup_error < 0.5
        desc = component_descriptor(evaluate(w.series, w.grid))
        assert desc.key() == (1, 0, 0, 0)

    def test_m0_exact(self):
        w = witness_series(2, 0, 4, 16)
        assert w.sup_error <= 1e-12
        assert component_descriptor(evaluate(w.series, w.grid)).key() == (0, 0, 0, 0)

    def test_error_report(self):
        w = witness_series(2, 1, 6, 24)
        assert w.offgrid_error >= 0 and 0 < w.min_singular <= 1 + 1e-12
        # a matrix within distance e of a unitary has singular values >= 1 - e
        assert w.min_singular >= 1 - w.sup_error - 1e-12

    def test_too_coarse(self):
        with pytest.raises(ApproximationTooCoarse):
            witness_series(2, 3, 1, 16)
