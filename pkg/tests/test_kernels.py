import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bergfock import _kernels_py as py
from bergfock import kernels

try:
    from bergfock import _kernels as cy
except ImportError:  # pragma: no cover - extension not built
    cy = None

BACKENDS = [pytest.param(py, id="python"),
            pytest.param(cy, id="cython", marks=pytest.mark.skipif(cy is None, reason="extension not built"))]


def data(seed, n=300, deg=5):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    w = rng.uniform(0.1, 1.0, size=n)
    return c, z, w


def test_compiled_backend_selected_when_available():
    assert kernels.BACKEND == ("cython" if cy is not None else "python")


def test_env_var_forces_fallback():
    env = dict(os.environ, BERGFOCK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import bergfock.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("mod", BACKENDS)
def test_polyval_against_numpy(mod):
    c, z, _ = data(1)
    np.testing.assert_allclose(mod.polyval(c, z), np.polynomial.polynomial.polyval(z, c), rtol=1e-13)


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.7])
def test_lp_sum_direct(mod, p):
    c, z, w = data(2)
    v = np.polynomial.polynomial.polyval(z, c)
    assert mod.lp_sum(v, w, p) == pytest.approx(float(np.sum(w * np.abs(v) ** p)), rel=1e-13)


@pytest.mark.parametrize("mod", BACKENDS)
def test_dual_moments_direct_and_zero_sign(mod):
    c, z, w = data(3)
    v = np.polynomial.polynomial.polyval(z, c)
    v[::7] = 0.0
    p = 1.5
    dens = np.where(v != 0, np.abs(v) ** (p - 1) * np.conj(v / np.where(v != 0, np.abs(v), 1)), 0)
    expected = [np.sum(w * z**m * dens) for m in range(6)]
    np.testing.assert_allclose(mod.dual_moments(v, z, w, p, 6), expected, rtol=1e-12)


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_hessian_matches_finite_differences(mod, p):
    c, z, w = data(4, n=200, deg=3)
    nb = 4

    def grad(x):
        cc = x[:nb] + 1j * x[nb:]
        s = py.dual_moments(np.polynomial.polynomial.polyval(z, cc), z, w, p, nb)
        return p * np.concatenate([s.real, -s.imag])

    x = np.concatenate([c.real, c.imag])
    v = np.polynomial.polynomial.polyval(z, c)
    H = mod.lp_hessian(v, z, w, p, nb, 1e-300)
    h = 1e-6
    fd = np.array([(grad(x + h * e) - grad(x - h * e)) / (2 * h) for e in np.eye(2 * nb)])
    np.testing.assert_allclose(H, fd, rtol=1e-5, atol=1e-6 * np.abs(H).max())
    assert np.allclose(H, H.T)


@pytest.mark.skipif(cy is None, reason="extension not built")
@given(st.integers(0, 10_000), st.floats(1.05, 5.0), st.integers(0, 8))
def test_backends_agree(seed, p, deg):
    c, z, w = data(seed, n=64, deg=deg)
    v = py.polyval(c, z)
    np.testing.assert_allclose(cy.polyval(c, z), v, rtol=1e-12, atol=1e-12)
    assert cy.lp_sum(v, w, p) == pytest.approx(py.lp_sum(v, w, p), rel=1e-12)
    np.testing.assert_allclose(cy.dual_moments(v, z, w, p, deg + 1), py.dual_moments(v, z, w, p, deg + 1),
                               rtol=1e-10, atol=1e-10)
    Hc = cy.lp_hessian(v, z, w, p, deg + 1, 1e-12)
    Hp = py.lp_hessian(v, z, w, p, deg + 1, 1e-12)
    np.testing.assert_allclose(Hc, Hp, rtol=1e-9, atol=1e-9 * np.abs(Hp).max())
