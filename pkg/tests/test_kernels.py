"""Kernel-sum backends: agreement, closed forms, finite-difference checks."""
import numpy as np
import pytest

from londebye import _kernels
from londebye._kernels import numpy_backend

cython_backend = pytest.importorskip(
    "londebye._kernels.cython_backend", reason="compiled backend not built"
)


@pytest.fixture(scope="module")
def cloud():
    rng = np.random.default_rng(42)
    targets = rng.normal(size=(40, 3)) + np.array([0.0, 0.0, 4.0])
    sources = rng.normal(size=(300, 3)) * 0.4
    charge = rng.normal(size=300)
    vec = rng.normal(size=(300, 3))
    return targets, sources, charge, vec


class TestBackendAgreement:
    @pytest.mark.parametrize("kappa", [0.0, 1.0, 3.7])
    def test_potential(self, cloud, kappa):
        t, s, c, _ = cloud
        np.testing.assert_allclose(
            cython_backend.potential(t, s, c, kappa),
            numpy_backend.potential(t, s, c, kappa),
            rtol=1e-13,
        )

    @pytest.mark.parametrize("kappa", [0.0, 1.0])
    def test_gradient(self, cloud, kappa):
        t, s, c, _ = cloud
        np.testing.assert_allclose(
            cython_backend.gradient(t, s, c, kappa),
            numpy_backend.gradient(t, s, c, kappa),
            rtol=1e-12,
        )

    @pytest.mark.parametrize("kappa", [0.0, 1.0])
    def test_curl(self, cloud, kappa):
        t, s, _, v = cloud
        np.testing.assert_allclose(
            cython_backend.curl(t, s, v, kappa),
            numpy_backend.curl(t, s, v, kappa),
            rtol=1e-12,
        )


class TestDispatch:
    def test_complex_densities_split(self, cloud):
        t, s, c, v = cloud
        zc = c + 1j * c[::-1]
        out = _kernels.potential(t, s, zc, 1.0)
        assert np.iscomplexobj(out)
        np.testing.assert_allclose(out.real, _kernels.potential(t, s, c, 1.0), rtol=1e-13)
        zv = v + 2j * v[::-1]
        outv = _kernels.curl(t, s, zv, 1.0)
        np.testing.assert_allclose(outv.imag, 2 * _kernels.curl(t, s, v[::-1], 1.0), rtol=1e-12)

    def test_backend_is_reported(self):
        assert _kernels.BACKEND in {"cython", "numpy"}


class TestClosedForms:
    def test_single_source_potential(self):
        t = np.array([[0.0, 0.0, 2.0]])
        s = np.array([[0.0, 0.0, 0.0]])
        c = np.array([3.0])
        kappa = 0.7
        expect = 3.0 * np.exp(-kappa * 2.0) / (4 * np.pi * 2.0)
        assert _kernels.potential(t, s, c, kappa)[0] == pytest.approx(expect, rel=1e-14)

    def test_gradient_is_fd_of_potential(self, cloud):
        t, s, c, _ = cloud
        t = t[:5]
        h = 1e-6
        grad = _kernels.gradient(t, s, c, 1.3)
        for axis in range(3):
            dt = np.zeros(3)
            dt[axis] = h
            fd = (
                _kernels.potential(t + dt, s, c, 1.3)
                - _kernels.potential(t - dt, s, c, 1.3)
            ) / (2 * h)
            np.testing.assert_allclose(grad[:, axis], fd, rtol=1e-7, atol=1e-10)

    def test_curl_is_grad_cross_vec(self, cloud):
        t, s, _, v = cloud
        # single-source identity: curl contribution = grad g x v
        t1, s1, v1 = t[:3], s[:1], v[:1]
        g = _kernels.gradient(t1, s1, np.ones(1), 0.9)
        expect = np.cross(g, v1[0])
        np.testing.assert_allclose(_kernels.curl(t1, s1, v1, 0.9), expect, rtol=1e-13)
