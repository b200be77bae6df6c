"""Moment grids: sampling, stencils, radial integrals, CSV round trips."""

from __future__ import annotations

import numpy as np
import pytest

from sphradon.fields import make_phantom
from sphradon.moments import (
    MomentGrid,
    laplacian_power,
    radial_integral,
    read_moment_csv,
    sample_moments,
    write_moment_csv,
)


def _ladder(du: float, n: int) -> np.ndarray:
    return du * np.arange(1, n + 1)


def _rsqz3_grid(origin=(-0.2, 0.4), h=0.1, n_p=7, n_q=7, du=0.25, n_u=8) -> MomentGrid:
    return sample_moments(make_phantom("rsqz3"), origin, h, n_p, n_q, _ladder(du, n_u))


# ----- sampling -----


def test_sample_zsq_mean_is_u_squared_over_three():
    grid = sample_moments(make_phantom("zsq"), (0.0, 0.0), 0.5, 3, 3, _ladder(0.5, 4))
    for iu, u in enumerate(grid.radial_nodes):
        assert np.allclose(grid.mf_values[:, :, iu], u * u / 3.0, rtol=0, atol=1e-15)
    assert np.all(grid.a01_values == 0.0)


def test_sample_rsqz3_columns():
    grid = _rsqz3_grid()
    assert np.all(grid.mf_values == 0.0)
    ip, iq, iu = 3, 5, 2
    p, q, u = grid.p_node(ip), grid.q_node(iq), grid.radial_nodes[iu]
    want = 0.6 * (p * p + q * q) * u**3 + (6.0 / 35.0) * u**5
    assert grid.a01_values[ip, iq, iu] == pytest.approx(want, rel=1e-14)


def test_sample_quadrature_agrees_with_analytic():
    f = make_phantom("zsq")
    nodes = _ladder(0.4, 3)
    ga = sample_moments(f, (0.1, -0.3), 0.2, 2, 2, nodes, analytic=True)
    gq = sample_moments(f, (0.1, -0.3), 0.2, 2, 2, nodes, analytic=False)
    assert np.allclose(ga.mf_values, gq.mf_values, rtol=0, atol=1e-12)
    assert np.allclose(ga.a01_values, gq.a01_values, rtol=0, atol=1e-12)


def test_grid_validation():
    nodes = _ladder(0.5, 2)
    ok = np.zeros((2, 2, 2))
    with pytest.raises(ValueError):
        MomentGrid((0, 0), -0.1, 2, 2, nodes, ok, ok)
    with pytest.raises(ValueError):
        MomentGrid((0, 0), 0.1, 2, 2, np.array([0.5, 0.5]), ok, ok)
    with pytest.raises(ValueError):
        MomentGrid((0, 0), 0.1, 2, 2, np.array([0.0, 0.5]), ok, ok)
    with pytest.raises(ValueError):
        MomentGrid((0, 0), 0.1, 2, 2, nodes, np.zeros((2, 2, 3)), ok)


def test_grid_arrays_are_frozen():
    grid = _rsqz3_grid(n_p=3, n_q=3, n_u=2)
    with pytest.raises(ValueError):
        grid.mf_values[0, 0, 0] = 1.0
    with pytest.raises(ValueError):
        grid.radial_nodes[0] = 9.0


# ----- stencils -----


def test_laplacian_exact_on_quadratic_data():
    # a01 of rsqz3 is quadratic in (p,q), so one stencil application is exact
    grid = _rsqz3_grid()
    for iu in (0, 4, 7):
        u = grid.radial_nodes[iu]
        got = laplacian_power(grid, "a01", 1, (3, 3, iu))
        assert got == pytest.approx(2.4 * u**3, rel=1e-12)
        assert laplacian_power(grid, "a01", 2, (3, 3, iu)) == pytest.approx(0.0, abs=1e-9)


def test_laplacian_power_zero_is_plain_lookup():
    grid = _rsqz3_grid(n_p=3, n_q=3)
    assert laplacian_power(grid, "a01", 0, (2, 1, 5)) == grid.a01_values[2, 1, 5]
    assert laplacian_power(grid, "Mf", 0, (0, 0, 0)) == 0.0


def test_laplacian_margin_and_argument_errors():
    grid = _rsqz3_grid(n_p=5, n_q=5)
    with pytest.raises(ValueError, match="insufficient margin"):
        laplacian_power(grid, "a01", 3, (2, 2, 0))
    with pytest.raises(ValueError, match="insufficient margin"):
        laplacian_power(grid, "a01", 1, (0, 2, 0))
    with pytest.raises(ValueError):
        laplacian_power(grid, "nope", 1, (2, 2, 0))
    with pytest.raises(ValueError):
        laplacian_power(grid, "Mf", -1, (2, 2, 0))
    with pytest.raises(ValueError):
        laplacian_power(grid, "Mf", 0, (2, 2, 99))


# ----- radial integrals -----


def test_radial_integral_gauss_nodes():
    x, w = np.polynomial.legendre.leggauss(4)
    us, ws = 0.5 * (x + 1.0), 0.5 * w
    assert radial_integral(np.ones_like(us), ws) == pytest.approx(1.0, rel=1e-15)
    assert radial_integral(us**5, ws) == pytest.approx(1.0 / 6.0, rel=1e-14)
    us2, ws2 = 2.0 * us, 2.0 * ws
    assert radial_integral(us2**3, ws2) == pytest.approx(4.0, rel=1e-14)
    with pytest.raises(ValueError):
        radial_integral(np.ones(3), np.ones(4))


# ----- CSV -----


def test_csv_round_trip_is_lossless(tmp_path):
    grid = sample_moments(
        make_phantom("gauss"), (-1.0, 0.5), 0.3, 3, 4, _ladder(0.2, 5)
    )
    path = str(tmp_path / "moments.csv")
    write_moment_csv(grid, path)
    back = read_moment_csv(path)
    assert back.origin == grid.origin
    assert back.h == grid.h
    assert (back.n_p, back.n_q) == (grid.n_p, grid.n_q)
    assert np.array_equal(back.radial_nodes, grid.radial_nodes)
    assert np.array_equal(back.mf_values, grid.mf_values)
    assert np.array_equal(back.a01_values, grid.a01_values)
    # writing the reread grid reproduces the file byte for byte
    path2 = str(tmp_path / "again.csv")
    write_moment_csv(back, path2)
    assert open(path, "rb").read() == open(path2, "rb").read()


def test_csv_rejects_nonuniform_ladder(tmp_path):
    nodes = np.array([0.1, 0.2, 0.4])
    z = np.zeros((1, 1, 3))
    grid = MomentGrid((0.0, 0.0), 0.1, 1, 1, nodes, z, z)
    with pytest.raises(ValueError, match="uniform"):
        write_moment_csv(grid, str(tmp_path / "bad.csv"))


def test_csv_reader_validates(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("# h=0.1 Np=1 Nq=1 u0=0.1 du=0.1 Nu=2\np,q,u,Mf,a01\n0,0,0.1,1,0\n")
    with pytest.raises(ValueError, match="row count"):
        read_moment_csv(str(path))
    path.write_text("p,q,u,Mf,a01\n0,0,0.1,1,0\n")
    with pytest.raises(ValueError, match="sidecar"):
        read_moment_csv(str(path))
