import math

import numpy as np
import pytest
from scipy import integrate

from bergfock import density as D
from bergfock import weights as W
from bergfock.quadrature import build_disc_grid, build_grid
from bergfock.space import Poly, dilate, norm
from bergfock.weights import WeightDomainError

from conftest import random_poly

FOCK = W.fock(1)
AFF = W.affine_disc(2, 1)


def test_point_eval_examples():
    assert D.point_eval_bound(FOCK, 0, 2) == pytest.approx(math.sqrt(math.pi) * math.exp(0.5), rel=1e-14)
    assert D.point_eval_bound(FOCK, 0, 2, tight=True) == pytest.approx(math.exp(0.5) / math.sqrt(math.pi), rel=1e-14)
    assert D.point_eval_bound(AFF, 0, 2) == pytest.approx((7 * math.pi / 16) ** -0.5, rel=1e-14)
    with pytest.raises(WeightDomainError):
        D.point_eval_bound(AFF, 1.0, 2)


@pytest.mark.parametrize("spec", [FOCK, AFF, W.power_disc(2)])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_point_eval_dominates(spec, p, rng):
    grid = build_grid(spec, 5, p_max=3.0)
    top = 4.0 if spec.is_plane else 0.95
    for _ in range(100 // 9 + 1):
        f = random_poly(rng, int(rng.integers(0, 6)))
        f = f * (1 / norm(f, p, spec, grid))
        zs = top * np.sqrt(rng.uniform(size=20)) * np.exp(2j * np.pi * rng.uniform(size=20))
        for z in zs:
            assert abs(f(z)) <= D.point_eval_bound(spec, z, p, tight=True) * (1 + 1e-12)


def test_dilation_examples(rng):
    grid = build_grid(FOCK, 5)
    f = Poly.monomial(3)
    rep = D.dilation_convergence(f, FOCK, 2.0, [0.5, 0.9, 1.0], grid)
    base = norm(f, 2.0, FOCK, grid)
    for row in rep["rows"]:
        assert row["distance"] == pytest.approx((1 - row["rho"] ** 3) * base, rel=1e-12, abs=1e-15)
    assert rep["rows"][-1]["distance"] == 0.0
    g = random_poly(rng, 5)
    rep = D.dilation_convergence(g, FOCK, 2.0, [0.9, 0.99, 0.999], grid)
    assert rep["monotone"] and rep["contractive"]
    with pytest.raises(ValueError):
        D.dilation_convergence(g, FOCK, 2.0, [1.5])


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_plane_density_fock(p):
    rep = D.check_plane_density(FOCK, p, 0.5, 0.75)
    assert rep.finite and rep.integrals["I1"]["finite"] and rep.integrals["I2"]["finite"]
    assert rep.params["rho"] == 0.5 and rep.params["beta"] == 0.75


def test_plane_density_values_against_scipy():
    # fock(1): nu(r) = e^{-r^2}; I2 = 2 pi int r e^{beta (r+1)^2 - r^2} dr
    beta = 0.75
    rep = D.check_plane_density(FOCK, 2.0, 0.5, beta)
    oracle = 2 * math.pi * integrate.quad(lambda r: r * math.exp(beta * (r + 1) ** 2 - r * r), 0, np.inf)[0]
    assert rep.integrals["I2"]["value"] == pytest.approx(oracle, rel=1e-9)
    rho, p = 0.5, 2.0
    oracle1 = 2 * math.pi * integrate.quad(
        lambda r: r * math.exp(2 / p * (rho * r + 1) ** 2 - 2 * beta / p * r * r), 0, np.inf)[0]
    assert rep.integrals["I1"]["value"] == pytest.approx(oracle1, rel=1e-9)


def test_plane_density_counter_case():
    # beta < rho^2: the first integrand grows like exp((2/p)(rho^2 - beta) r^2)
    rep = D.check_plane_density(FOCK, 2.0, 0.9, 0.5)
    assert not rep.finite
    assert not rep.integrals["I1"]["finite"] and rep.integrals["I2"]["finite"]
    assert "I1 divergent" in rep.notes


@pytest.mark.parametrize("rho,beta", [(0.5, 1.0), (0.5, 0.0), (1.0, 0.5), (0.0, 0.5)])
def test_plane_density_rejects_boundary_params(rho, beta):
    with pytest.raises(ValueError):
        D.check_plane_density(FOCK, 2.0, rho, beta)


def test_disc_density_trivial():
    rep = D.check_plane_density(AFF, 2.0, 0.5, 0.75)
    assert rep.finite and rep.condition == "disc"


@pytest.mark.parametrize("alpha", [0.1, 1.0, 2.0])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_fock_certificate(alpha, p):
    rep = D.fock_density_certificate(alpha, p)
    assert rep.finite
    assert rep.params["alpha"] == alpha
    for it in rep.integrals.values():
        assert it["ratio"] < 0.5


def test_combined_envelope_is_decreasing():
    for alpha in (0.1, 0.5, 1.0, 3.0):
        log_nu = D.combined_fock_log_nu(alpha)
        r = np.linspace(0, 20, 400)
        vals = np.array([log_nu(x) for x in r])
        assert np.all(np.diff(vals) <= 1e-15)
        # and it dominates the weight itself
        assert np.all(vals >= np.log1p(r * r) - alpha * r * r - 1e-12 * (1 + np.abs(vals)))


def test_radial_tail_integral_gaussian():
    out = D.radial_tail_integral(lambda r: -r * r)
    assert out["finite"] and out["value"] == pytest.approx(math.pi, rel=1e-12)
    assert not D.radial_tail_integral(lambda r: 0.0)["finite"]


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_closed_graph_ratio(alpha):
    for n in range(16):
        assert D.closed_graph_ratio(alpha, n) == pytest.approx(math.sqrt((n + 1) / alpha), rel=1e-8)
    assert D.closed_graph_ratio(alpha, 4, 3.0) == pytest.approx(((4 * 3 + 2) / (2 * alpha)) ** (1 / 3), rel=1e-8)
