import numpy as np
import pytest

from oracles import kernel_normal_equations
from rgtv_deblur.conv import convolve, delta_kernel
from rgtv_deblur.errors import DegenerateInputError, DegenerateKernelError, InvalidInputError
from rgtv_deblur.kernel import (
    KernelSolveParams,
    crop_kernel,
    project_kernel,
    recenter_kernel,
    solve_kernel,
    solve_kernel_full,
    solve_kernel_raw,
)
from rgtv_deblur.synth import motion_kernel, piecewise_constant_image

ALL_SHIFTS_16 = [(i, j) for i in range(16) for j in range(16)]
CENTRE_SHIFTS_3 = [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)]


def noisy_pair(seed, shape=(16, 16), h=3, noise=0.01):
    rng = np.random.default_rng(seed)
    x = rng.random(shape)
    k = rng.random((h, h))
    k /= k.sum()
    return x, convolve(x, k, "circular") + noise * rng.standard_normal(shape), k


class TestSolveKernel:
    def test_identity_blur_gives_delta(self):
        x = piecewise_constant_image(48)
        k = solve_kernel(x, x, KernelSolveParams(mu=1e-8, kernel_size=5))
        assert 1.0 - k[2, 2] <= 1e-3

    def test_exact_recovery_circular(self):
        x = np.random.default_rng(20).random((64, 64))
        k_true = motion_kernel(5, 30)
        b = convolve(x, k_true, "circular")
        k = solve_kernel(x, b, KernelSolveParams(mu=1e-6, kernel_size=5))
        np.testing.assert_allclose(k, k_true, atol=1e-3, rtol=0)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_dense_normal_equations(self, seed):
        x, b, _ = noisy_pair(seed)
        expected, _, _ = kernel_normal_equations(x, b, 0.05, ALL_SHIFTS_16)
        full = solve_kernel_full(x, b, 0.05)
        np.testing.assert_allclose(full, expected.reshape(16, 16), atol=1e-8, rtol=0)
        np.testing.assert_allclose(
            solve_kernel_raw(x, b, 0.05, 3), crop_kernel(expected.reshape(16, 16), 3), atol=1e-8, rtol=0
        )

    def test_normal_equation_residual(self):
        x, b, _ = noisy_pair(3, shape=(12, 14))
        shifts = [(i, j) for i in range(12) for j in range(14)]
        _, A, y = kernel_normal_equations(x, b, 0.05, shifts)
        k = solve_kernel_full(x, b, 0.05).ravel()
        rhs = A.T @ y
        resid = A.T @ (A @ k) + 2 * 0.05 * k - rhs
        assert np.linalg.norm(resid) <= 1e-6 * np.linalg.norm(rhs)

    @pytest.mark.xfail(
        strict=True,
        reason="the cropped full-domain minimizer is not the minimizer over "
        "h x h supported kernels; the two differ by ~1e-2 per tap",
    )
    def test_matches_support_restricted_system(self):
        x, b, _ = noisy_pair(0)
        restricted, _, _ = kernel_normal_equations(x, b, 0.05, CENTRE_SHIFTS_3)
        np.testing.assert_allclose(solve_kernel_raw(x, b, 0.05, 3), restricted.reshape(3, 3), atol=1e-8)

    def test_shift_equivariance(self):
        x = piecewise_constant_image(48)
        b = convolve(x, motion_kernel(5, 0), "circular")
        raw = solve_kernel_raw(x, b, 0.05, 7)
        shifted = solve_kernel_raw(x, np.roll(b, 1, axis=0), 0.05, 7)
        peak = np.array(np.unravel_index(np.argmax(raw), raw.shape))
        peak_shifted = np.array(np.unravel_index(np.argmax(shifted), shifted.shape))
        assert tuple(peak_shifted - peak) == (1, 0)

    def test_constant_skeleton(self):
        with pytest.raises(DegenerateInputError):
            solve_kernel(np.full((8, 8), 0.5), np.random.default_rng(0).random((8, 8)), KernelSolveParams())

    def test_shape_checks(self):
        with pytest.raises(InvalidInputError):
            solve_kernel(np.zeros((8, 8)), np.zeros((8, 9)), KernelSolveParams())
        with pytest.raises(InvalidInputError):
            solve_kernel(np.eye(4), np.eye(4), KernelSolveParams(kernel_size=5))

    def test_params(self):
        with pytest.raises(InvalidInputError):
            KernelSolveParams(mu=0)
        with pytest.raises(InvalidInputError):
            KernelSolveParams(kernel_size=4)

    def test_output_is_valid_kernel(self):
        x, b, _ = noisy_pair(4, shape=(32, 32), h=5, noise=0.05)
        k = solve_kernel(x, b, KernelSolveParams(kernel_size=5))
        assert k.min() >= 0 and abs(k.sum() - 1) <= 1e-9


class TestProjectKernel:
    def test_example(self):
        np.testing.assert_allclose(project_kernel([0.2, -0.1, 0.3]), [0.4, 0.0, 0.6], atol=1e-15)

    def test_idempotent(self):
        k = motion_kernel(7, 20)
        np.testing.assert_allclose(project_kernel(k), k, atol=1e-12)
        once = project_kernel(np.random.default_rng(1).standard_normal((5, 5)))
        np.testing.assert_allclose(project_kernel(once), once, atol=1e-12)

    def test_uniform(self):
        np.testing.assert_allclose(project_kernel(np.full((3, 3), 2.5)), 1 / 9, atol=1e-15)

    def test_degenerate(self):
        with pytest.raises(DegenerateKernelError):
            project_kernel(-np.ones((3, 3)))
        with pytest.raises(DegenerateKernelError):
            project_kernel(np.zeros((3, 3)))


def test_recenter_moves_mass_to_centre():
    k = np.zeros((5, 5))
    k[0, 4] = 1.0
    out = recenter_kernel(k)
    assert out[2, 2] == 1.0
    np.testing.assert_array_equal(recenter_kernel(delta_kernel(5)), delta_kernel(5))
