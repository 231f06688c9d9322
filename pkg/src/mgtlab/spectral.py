"""Domains, Dirichlet eigenbases, spectral fields, liftings, norms and traces.

Everything downstream computes on the closed-form sine spectrum of the
Dirichlet Laplacian on the unit interval or the unit square.  A field is a
zero-trace eigen-expansion plus an optional harmonic lifting of boundary
values, so nonzero Dirichlet data never has to be squeezed through the sine
basis where its expansion converges slowly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

SQRT2 = np.sqrt(2.0)

INTERVAL = "interval"
SQUARE = "square"

# terms kept when evaluating the square-domain harmonic lifting
_SQUARE_LIFT_TERMS = 128


@dataclass(frozen=True)
class DomainSpec:
    """Unit interval or unit square with a default physical evaluation grid."""

    kind: str
    grid_points_per_axis: int = 256

    def __post_init__(self):
        if self.kind not in (INTERVAL, SQUARE):
            raise ValueError(f"unsupported domain kind {self.kind!r}")
        if self.grid_points_per_axis < 8:
            raise ValueError("grid_points_per_axis must be >= 8")

    @property
    def dimension(self) -> int:
        return 1 if self.kind == INTERVAL else 2

    @property
    def boundary_size(self) -> int:
        """Number of boundary values carried by data (2 nodes or 4 edges)."""
        return 2 if self.kind == INTERVAL else 4


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, T] carrying the default quadrature rule tag."""

    horizon: float
    steps: int
    rule: str = "trapezoid"

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.steps + 1)

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.horizon, self.steps * factor, self.rule)


class EigenBasis:
    """Closed-form Dirichlet eigenpairs, flattened row-major for the square."""

    def __init__(self, domain: DomainSpec, mode_count: int):
        if mode_count < 1:
            raise ValueError("mode_count must be >= 1")
        self.domain = domain
        self.mode_count = mode_count
        if domain.kind == INTERVAL:
            k = np.arange(1, mode_count + 1)
            self.indices = k[:, None]
            self.eigenvalues = (k * np.pi) ** 2
        else:
            j, k = np.meshgrid(np.arange(1, mode_count + 1),
                               np.arange(1, mode_count + 1), indexing="ij")
            self.indices = np.column_stack([j.ravel(), k.ravel()])
            self.eigenvalues = ((self.indices**2).sum(axis=1)) * np.pi**2
        self.sqrt_eigenvalues = np.sqrt(self.eigenvalues)

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    # -- eigenfunction geometry -------------------------------------------

    def eval_matrix_1d(self, x: np.ndarray) -> np.ndarray:
        """(modes, len(x)) values of sqrt(2) sin(k pi x); interval only."""
        k = self.indices[:, 0]
        return SQRT2 * np.sin(np.outer(k, np.pi * x))

    def grid_points(self, n: int | None = None) -> np.ndarray:
        n = n or self.domain.grid_points_per_axis
        return np.linspace(0.0, 1.0, n + 1)

    def normal_derivatives(self) -> np.ndarray:
        """(boundary_size, modes) pointwise normal derivative of each mode.

        Interval: d_nu e_k at x=0 and x=1 (outward normals -d/dx and +d/dx).
        Square: edge-averaged values are not pointwise; use boundary_flux.
        """
        if self.domain.kind != INTERVAL:
            raise NotImplementedError("pointwise normal derivatives are 1D only")
        k = self.indices[:, 0]
        d0 = -SQRT2 * k * np.pi
        d1 = SQRT2 * k * np.pi * np.where(k % 2 == 0, 1.0, -1.0)
        return np.vstack([d0, d1])

    def boundary_flux(self) -> np.ndarray:
        """(boundary_size, modes) pairings  integral_Gamma_i  d_nu e_k  dsigma.

        For the interval the boundary measure is counting measure, so this
        coincides with normal_derivatives.  For the square each row is the
        line integral of d_nu e over one edge (x=0, x=1, y=0, y=1) against
        constant edge data.
        """
        if self.domain.kind == INTERVAL:
            return self.normal_derivatives()
        j = self.indices[:, 0].astype(float)
        k = self.indices[:, 1].astype(float)
        oscil_k = 1.0 - np.where(self.indices[:, 1] % 2 == 0, 1.0, -1.0)
        oscil_j = 1.0 - np.where(self.indices[:, 0] % 2 == 0, 1.0, -1.0)
        sign_j = np.where(self.indices[:, 0] % 2 == 0, 1.0, -1.0)
        sign_k = np.where(self.indices[:, 1] % 2 == 0, 1.0, -1.0)
        fx0 = -2.0 * j * oscil_k / k
        fx1 = 2.0 * j * sign_j * oscil_k / k
        fy0 = -2.0 * k * oscil_j / j
        fy1 = 2.0 * k * sign_k * oscil_j / j
        return np.vstack([fx0, fx1, fy0, fy1])

    def lift_matrix(self) -> np.ndarray:
        """(boundary_size, modes) eigen-coefficients of unit boundary data.

        Row i holds <D(delta_i), e_k> = -(1/mu_k) * flux, the coefficients of
        the harmonic extension of a unit value on boundary node/edge i.
        """
        return -self.boundary_flux() / self.eigenvalues


def build_basis(domain: DomainSpec, mode_count: int) -> EigenBasis:
    """Closed-form Dirichlet spectrum; eigenfunctions orthonormal in L2."""
    return EigenBasis(domain, mode_count)


# -- fields ----------------------------------------------------------------


@dataclass
class SpectralField:
    """Zero-trace eigen-expansion plus an optional harmonic-lifting part.

    The represented function is sum_k coeffs_k e_k + D(boundary), where D is
    the harmonic extension of the boundary node/edge values.
    """

    basis: EigenBasis
    coeffs: np.ndarray
    boundary: np.ndarray | None = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise ValueError("coefficient length must match the basis")
        if self.boundary is not None:
            self.boundary = np.asarray(self.boundary, dtype=float)
            if self.boundary.shape != (self.basis.domain.boundary_size,):
                raise ValueError("boundary value count must match the domain")
            if not np.all(np.isfinite(self.boundary)):
                raise ValueError("boundary values must be finite")

    def total_coeffs(self) -> np.ndarray:
        """L2 eigen-coefficients of the full function, lifting included."""
        if self.boundary is None:
            return self.coeffs.copy()
        return self.coeffs + self.boundary @ self.basis.lift_matrix()

    def boundary_values(self) -> np.ndarray:
        if self.boundary is None:
            return np.zeros(self.basis.domain.boundary_size)
        return self.boundary.copy()

    def evaluate(self, n: int | None = None) -> np.ndarray:
        """Values on the uniform physical grid (1D array, or 2D for the square)."""
        if self.basis.domain.kind == INTERVAL:
            x = self.basis.grid_points(n)
            vals = self.coeffs @ self.basis.eval_matrix_1d(x)
            if self.boundary is not None:
                vals = vals + lifting_values_interval(self.boundary, x)
            return vals
        n = n or self.basis.domain.grid_points_per_axis
        x = self.basis.grid_points(n)
        nm = self.basis.mode_count
        cmat = self.coeffs.reshape(nm, nm)
        sx = np.sin(np.outer(np.arange(1, nm + 1) * np.pi, x))
        vals = 2.0 * sx.T @ cmat @ sx
        if self.boundary is not None:
            vals = vals + lifting_values_square(self.boundary, x)
        return vals


def dirichlet_map(basis: EigenBasis, boundary_values: np.ndarray) -> SpectralField:
    """Harmonic extension of boundary data as a lifted field.

    The returned field evaluates through the closed-form lifting and exposes
    the eigen-coefficients <D phi, e_k> = -(1/mu_k) * flux pairing through
    total_coeffs().
    """
    boundary_values = np.asarray(boundary_values, dtype=float)
    if not np.all(np.isfinite(boundary_values)):
        raise ValueError("boundary values must be finite")
    return SpectralField(basis, np.zeros(basis.size), boundary_values)


def lifting_values_interval(boundary: np.ndarray, x: np.ndarray) -> np.ndarray:
    # 1D harmonic functions are affine
    a, b = boundary
    return a + (b - a) * x


def lifting_values_square(boundary: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Harmonic extension of constant-per-edge data on the tensor grid x (x) x."""
    xx, yy = np.meshgrid(x, x, indexing="ij")
    out = np.zeros_like(xx)
    k = np.arange(1, _SQUARE_LIFT_TERMS + 1)
    amp = 2.0 * (1.0 - (-1.0) ** k) / (k * np.pi)  # Fourier sine coefficients of 1
    for edge, value in enumerate(boundary):
        if value == 0.0:
            continue
        if edge in (0, 1):  # x = 0 or x = 1
            depth = xx if edge == 0 else 1.0 - xx
            trans = yy
        else:  # y = 0 or y = 1
            depth = yy if edge == 2 else 1.0 - yy
            trans = xx
        # sinh(k pi (1-d)) / sinh(k pi) in overflow-safe exponential form
        kd = k[:, None, None] * np.pi
        ratio = np.exp(-kd * depth[None]) * (1.0 - np.exp(-2.0 * kd * (1.0 - depth[None])))
        ratio /= 1.0 - np.exp(-2.0 * kd)
        sines = np.sin(kd * trans[None])
        out += value * np.tensordot(amp, ratio * sines, axes=(0, 0))
    return out


def lifting_normal_derivative_interval(boundary: np.ndarray) -> np.ndarray:
    """Outward normal derivative of the affine lifting at the two nodes."""
    a, b = boundary
    return np.array([a - b, b - a])


# -- Sobolev norms ----------------------------------------------------------


def grid_sobolev_norm(values: np.ndarray, spacings, s: int) -> float:
    """Finite-difference H^s norm of grid samples; s in {0, 1, 2}."""
    if s not in (0, 1, 2):
        raise ValueError("s must be one of 0, 1, 2")
    values = np.asarray(values, dtype=float)
    if np.isscalar(spacings):
        spacings = [spacings] * values.ndim
    if len(spacings) != values.ndim:
        raise ValueError("one spacing per axis is required")

    def l2sq(arr):
        out = arr**2
        for h in reversed(spacings):
            out = np.trapezoid(out, dx=h, axis=-1)
        return float(out)

    total = l2sq(values)
    if s >= 1:
        grads = [np.gradient(values, h, axis=ax, edge_order=2)
                 for ax, h in enumerate(spacings)]
        total += sum(l2sq(g) for g in grads)
    if s == 2:
        # one term per multi-index: (2,0), (1,1), (0,2) in 2D
        for ax1, g in enumerate(grads):
            for ax2 in range(ax1, values.ndim):
                gg = np.gradient(g, spacings[ax2], axis=ax2, edge_order=2)
                total += l2sq(gg)
    return float(np.sqrt(total))


def sobolev_norm(target, s: int, method: str = "spectral",
                 n: int | None = None) -> float:
    """H^s norm of a SpectralField (or raw grid samples), s in {0, 1, 2}.

    method="spectral" returns (sum (1+mu_k)^s |u_k|^2)^(1/2) over the total
    eigen-coefficients; it is equivalent to H^s only for zero-trace fields
    when s > 1/2, so grid norms are the norm of record for lifted fields.
    method="grid" evaluates the field and applies finite differences.
    """
    if s not in (0, 1, 2):
        raise ValueError("s must be one of 0, 1, 2")
    if isinstance(target, SpectralField):
        if method == "spectral":
            u = target.total_coeffs()
            return float(np.sqrt(np.sum((1.0 + target.basis.eigenvalues) ** s * u**2)))
        if method == "grid":
            npts = n or target.basis.domain.grid_points_per_axis
            h = 1.0 / npts
            vals = target.evaluate(npts)
            return grid_sobolev_norm(vals, [h] * vals.ndim, s)
        raise ValueError(f"unknown norm method {method!r}")
    if method != "grid":
        raise ValueError("raw grid samples support only the grid method")
    values = np.asarray(target, dtype=float)
    h = 1.0 / (values.shape[0] - 1)
    return grid_sobolev_norm(values, [h] * values.ndim, s)


# -- boundary traces --------------------------------------------------------


class TraceResult(NamedTuple):
    value: float
    converged: bool


def normal_trace(field: SpectralField, node: int, rtol: float = 0.05) -> TraceResult:
    """Outward normal derivative of the field at a boundary node.

    The eigen-sum is Cauchy-tested: the partial sums over the lower half of
    the spectrum and over all modes must agree within rtol, else the result
    is flagged non-convergent and the value reported as NaN.
    """
    basis = field.basis
    if basis.domain.kind != INTERVAL:
        raise NotImplementedError("normal traces are implemented on the interval")
    dn = basis.normal_derivatives()[node]
    order = np.argsort(basis.eigenvalues, kind="stable")
    contrib = (field.coeffs * dn)[order]
    full = float(np.sum(contrib))
    half = float(np.sum(contrib[: max(1, len(contrib) // 2)]))
    if field.boundary is not None:
        lift = float(lifting_normal_derivative_interval(field.boundary)[node])
        full += lift
        half += lift
    if abs(full - half) <= rtol * abs(full) + 1e-12:
        return TraceResult(full, True)
    return TraceResult(float("nan"), False)


# -- time-sampled boundary data ----------------------------------------------


@dataclass
class BoundarySignal:
    """Dirichlet data sampled in time at each boundary node/edge.

    values/dvalues/ddvalues hold g, g_t, g_tt with shape (steps+1, nodes).
    When time derivatives are not supplied analytically they are produced by
    second-order centered differences and the source is recorded.
    """

    grid: TimeGrid
    values: np.ndarray
    dvalues: np.ndarray
    ddvalues: np.ndarray
    derivative_source: str = "analytic"

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        self.dvalues = np.atleast_2d(np.asarray(self.dvalues, dtype=float))
        self.ddvalues = np.atleast_2d(np.asarray(self.ddvalues, dtype=float))
        expected = self.grid.steps + 1
        for arr in (self.values, self.dvalues, self.ddvalues):
            if arr.shape != self.values.shape or arr.shape[0] != expected:
                raise ValueError("signal arrays must share the time grid length")

    @property
    def nodes(self) -> int:
        return self.values.shape[1]

    @classmethod
    def zero(cls, grid: TimeGrid, nodes: int) -> "BoundarySignal":
        z = np.zeros((grid.steps + 1, nodes))
        return cls(grid, z, z.copy(), z.copy())

    @classmethod
    def from_samples(cls, grid: TimeGrid, values: np.ndarray) -> "BoundarySignal":
        values = np.atleast_2d(np.asarray(values, dtype=float))
        dt = grid.dt
        dvals = np.gradient(values, dt, axis=0, edge_order=2)
        ddvals = np.gradient(dvals, dt, axis=0, edge_order=2)
        return cls(grid, values, dvals, ddvals, derivative_source="finite_difference")


@dataclass
class BoundaryData:
    """Analytic Dirichlet data: callables t -> per-node values."""

    g: Callable[[float], np.ndarray]
    gt: Callable[[float], np.ndarray] | None = None
    gtt: Callable[[float], np.ndarray] | None = None
    nodes: int = 2

    def sample(self, grid: TimeGrid) -> BoundarySignal:
        times = grid.times
        values = np.array([np.atleast_1d(self.g(t)) for t in times], dtype=float)
        if self.gt is None:
            return BoundarySignal.from_samples(grid, values)
        dvals = np.array([np.atleast_1d(self.gt(t)) for t in times], dtype=float)
        if self.gtt is not None:
            ddvals = np.array([np.atleast_1d(self.gtt(t)) for t in times], dtype=float)
            return BoundarySignal(grid, values, dvals, ddvals)
        ddvals = np.gradient(dvals, grid.dt, axis=0, edge_order=2)
        return BoundarySignal(grid, values, dvals, ddvals,
                              derivative_source="finite_difference")

    @classmethod
    def zero(cls, nodes: int = 2) -> "BoundaryData":
        z = np.zeros(nodes)
        return cls(g=lambda t: z, gt=lambda t: z, gtt=lambda t: z, nodes=nodes)


def trajectory_on_grid(basis: EigenBasis, interior: np.ndarray,
                       boundary: np.ndarray | None = None,
                       n: int | None = None) -> np.ndarray:
    """Evaluate a coefficient trajectory (steps+1, modes) on the 1D grid."""
    if basis.domain.kind != INTERVAL:
        raise NotImplementedError("trajectory evaluation is 1D only")
    x = basis.grid_points(n)
    vals = interior @ basis.eval_matrix_1d(x)
    if boundary is not None:
        a = boundary[:, 0][:, None]
        b = boundary[:, 1][:, None]
        vals = vals + a + (b - a) * x[None, :]
    return vals
