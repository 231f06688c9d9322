"""Eigenbasis geometry, Dirichlet map, Sobolev norms, boundary traces."""

import numpy as np
import pytest

from mgtlab.spectral import (
    BoundaryData,
    BoundarySignal,
    DomainSpec,
    SpectralField,
    TimeGrid,
    build_basis,
    dirichlet_map,
    lifting_values_square,
    normal_trace,
    sobolev_norm,
)

INTERVAL = DomainSpec("interval", 256)
SQUARE = DomainSpec("square", 64)


def test_interval_eigenvalues_closed_form():
    basis = build_basis(INTERVAL, 4)
    assert basis.eigenvalues[0] == pytest.approx(np.pi**2)
    assert basis.eigenvalues[2] == pytest.approx(9 * np.pi**2)


def test_square_eigenvalues_closed_form():
    basis = build_basis(SQUARE, 3)
    # row-major flattening: (1,2) is the second mode
    assert basis.eigenvalues[1] == pytest.approx(5 * np.pi**2)
    j, k = basis.indices[1]
    assert (j, k) == (1, 2)


def test_rejects_bad_mode_count():
    with pytest.raises(ValueError):
        build_basis(INTERVAL, 0)


def test_rejects_tiny_grid():
    with pytest.raises(ValueError):
        DomainSpec("interval", 4)


def test_orthonormality_by_grid_quadrature():
    # trapezoid quadrature is exact here once the modes are resolved
    basis = build_basis(INTERVAL, 16)
    x = np.linspace(0.0, 1.0, 257)
    mat = basis.eval_matrix_1d(x)
    gram = np.zeros((16, 16))
    for i in range(16):
        for j in range(16):
            gram[i, j] = np.trapezoid(mat[i] * mat[j], x)
    assert np.max(np.abs(gram - np.eye(16))) < 1e-8


@pytest.mark.parametrize("mode,cells", [(1, 256), (4, 256), (8, 256), (16, 1024)])
def test_eigen_residual_under_differencing(mode, cells):
    basis = build_basis(DomainSpec("interval", cells), mode)
    x = np.linspace(0.0, 1.0, cells + 1)
    h = 1.0 / cells
    e = np.sqrt(2.0) * np.sin(mode * np.pi * x)
    lap = np.zeros_like(e)
    lap[1:-1] = (e[:-2] - 2 * e[1:-1] + e[2:]) / h**2
    resid = lap[1:-1] + basis.eigenvalues[mode - 1] * e[1:-1]
    rel = np.linalg.norm(resid) / np.linalg.norm(basis.eigenvalues[mode - 1] * e[1:-1])
    assert rel < 1e-3


def test_dirichlet_map_affine_interval():
    basis = build_basis(INTERVAL, 8)
    lift = dirichlet_map(basis, [2.0, -1.0])
    x = basis.grid_points(64)
    assert np.allclose(lift.evaluate(64), 2.0 - 3.0 * x)


def test_dirichlet_map_coefficients_match_quadrature():
    # oracle: numerical quadrature of (1 - x) sqrt(2) sin(k pi x)
    basis = build_basis(INTERVAL, 8)
    lift = dirichlet_map(basis, [1.0, 0.0])
    x = np.linspace(0.0, 1.0, 20001)
    for k in range(1, 9):
        ref = np.trapezoid((1.0 - x) * np.sqrt(2) * np.sin(k * np.pi * x), x)
        assert lift.total_coeffs()[k - 1] == pytest.approx(ref, abs=1e-7)
        assert lift.total_coeffs()[k - 1] == pytest.approx(np.sqrt(2) / (k * np.pi))


def test_dirichlet_map_zero_data():
    basis = build_basis(INTERVAL, 8)
    lift = dirichlet_map(basis, [0.0, 0.0])
    assert np.all(lift.total_coeffs() == 0.0)
    assert np.all(lift.evaluate(32) == 0.0)


def test_dirichlet_map_rejects_nonfinite():
    basis = build_basis(INTERVAL, 4)
    with pytest.raises(ValueError):
        dirichlet_map(basis, [np.nan, 0.0])


@pytest.mark.parametrize("domain", [INTERVAL, SQUARE])
def test_flux_identity_all_modes(domain):
    # mu_k <D phi, e_k> + boundary pairing of phi with d_nu e_k = 0
    basis = build_basis(domain, 6)
    rng = np.random.default_rng(1)
    phi = rng.normal(size=domain.boundary_size)
    coeffs = phi @ basis.lift_matrix()
    pairing = phi @ basis.boundary_flux()
    assert np.max(np.abs(basis.eigenvalues * coeffs + pairing)) < 1e-12


def test_square_lifting_is_harmonic_and_matches_edges():
    vals = lifting_values_square(np.array([1.0, 0.0, 0.0, 0.0]),
                                 np.linspace(0.0, 1.0, 65))
    h = 1.0 / 64
    interior = vals[1:-1, 1:-1]
    lap = (vals[:-2, 1:-1] + vals[2:, 1:-1] + vals[1:-1, :-2] + vals[1:-1, 2:]
           - 4 * interior) / h**2
    # deep interior: the series is smooth and discretely harmonic there
    assert np.max(np.abs(lap[15:-15, 15:-15])) < 1e-2
    # truncated sine series of the constant edge value, away from the corners
    assert np.max(np.abs(vals[0, 8:-8] - 1.0)) < 2e-2
    # by the four-fold symmetry the exact extension equals 1/4 at the center
    assert vals[32, 32] == pytest.approx(0.25, abs=1e-3)


def test_sobolev_norm_orthonormal_mode():
    basis = build_basis(INTERVAL, 8)
    e1 = SpectralField(basis, np.eye(8)[0])
    assert sobolev_norm(e1, 0) == pytest.approx(1.0)
    assert sobolev_norm(e1, 1) == pytest.approx(np.sqrt(1 + np.pi**2))
    zero = SpectralField(basis, np.zeros(8))
    for s in (0, 1, 2):
        assert sobolev_norm(zero, s) == 0.0


def test_sobolev_norm_grid_agrees_with_spectral():
    basis = build_basis(DomainSpec("interval", 1024), 8)
    e1 = SpectralField(basis, np.eye(8)[0])
    spec = sobolev_norm(e1, 1, method="spectral")
    grid = sobolev_norm(e1, 1, method="grid")
    assert abs(spec - grid) / spec < 0.01


def test_sobolev_norm_agreement_under_refinement():
    # smooth combination, zero trace: both methods are H^1-consistent
    basis = build_basis(INTERVAL, 6)
    field = SpectralField(basis, np.array([1.0, -0.5, 0.25, 0.0, 0.1, 0.0]))
    spec = sobolev_norm(field, 1, method="spectral")
    prev = None
    for n in (256, 512, 1024):
        grid = sobolev_norm(field, 1, method="grid", n=n)
        err = abs(grid - spec) / spec
        assert err < 0.01
        if prev is not None:
            assert err <= prev * 1.05
        prev = err


def test_sobolev_norm_rejects_bad_order():
    basis = build_basis(INTERVAL, 4)
    f = SpectralField(basis, np.zeros(4))
    with pytest.raises(ValueError):
        sobolev_norm(f, 3)


def test_grid_norm_square_field():
    basis = build_basis(SQUARE, 4)
    coeffs = np.zeros(16)
    coeffs[0] = 1.0  # mode (1,1), L2-normalized
    field = SpectralField(basis, coeffs)
    assert sobolev_norm(field, 0, method="grid", n=128) == pytest.approx(1.0, rel=1e-3)


def test_normal_trace_eigenfunctions():
    basis = build_basis(INTERVAL, 8)
    e1 = SpectralField(basis, np.eye(8)[0])
    left = normal_trace(e1, 0)
    right = normal_trace(e1, 1)
    assert left.converged and right.converged
    assert left.value == pytest.approx(-np.sqrt(2) * np.pi)
    assert right.value == pytest.approx(np.sqrt(2) * np.pi * np.cos(np.pi))


def test_normal_trace_lifting_only():
    basis = build_basis(INTERVAL, 8)
    lift = dirichlet_map(basis, [1.0, 3.0])  # a + (b-a) x with slope 2
    res = normal_trace(lift, 1)
    assert res.converged
    assert res.value == pytest.approx(2.0)


def test_normal_trace_flags_slow_tail():
    # coefficients ~ (-1)^k / (k pi): the differentiated sum stalls
    basis = build_basis(INTERVAL, 64)
    k = np.arange(1, 65)
    coeffs = ((-1.0) ** k) / (k * np.pi)
    res = normal_trace(SpectralField(basis, coeffs), 1)
    assert not res.converged
    assert np.isnan(res.value)


def test_boundary_signal_shape_validation():
    grid = TimeGrid(1.0, 10)
    with pytest.raises(ValueError):
        BoundarySignal(grid, np.zeros((5, 2)), np.zeros((5, 2)), np.zeros((5, 2)))


def test_boundary_data_finite_difference_fallback():
    grid = TimeGrid(1.0, 400)
    data = BoundaryData(g=lambda t: np.array([np.sin(t), 0.0]), gt=None, gtt=None)
    sig = data.sample(grid)
    assert sig.derivative_source == "finite_difference"
    assert np.max(np.abs(sig.dvalues[:, 0] - np.cos(grid.times))) < 1e-4


def test_boundary_data_analytic_derivatives_recorded():
    grid = TimeGrid(1.0, 50)
    data = BoundaryData(g=lambda t: np.array([t, 0.0]),
                        gt=lambda t: np.array([1.0, 0.0]),
                        gtt=lambda t: np.array([0.0, 0.0]))
    sig = data.sample(grid)
    assert sig.derivative_source == "analytic"
    assert np.all(sig.dvalues[:, 0] == 1.0)
