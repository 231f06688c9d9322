"""Independent ground truth: per-mode third-order ODE integration and roots.

Projecting the MGT equation on a Dirichlet eigenfunction e_k gives
    w_k''' + alpha w_k'' + b mu_k w_k' + c^2 mu_k w_k
        = f_k - c^2 q_k(t) - b q_k'(t),
where q_k(t) is the boundary pairing of the Dirichlet datum with d_nu e_k.
The cubic r^3 + alpha r^2 + b mu r + c^2 mu is the per-mode symbol; its root
pattern encodes the uniform-stability threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .reduction import MgtData, MgtParams
from .spectral import EigenBasis, TimeGrid

_CUBE_ROOTS_OF_UNITY = np.exp(2j * np.pi * np.arange(3) / 3)


@dataclass
class ModeOde:
    """One projected mode: cubic coefficients plus the boundary-flux source."""

    index: int
    mu: float
    params: MgtParams
    source: Callable[[float], float] | None = None

    def cubic_coefficients(self) -> np.ndarray:
        p = self.params
        return np.array([1.0, p.alpha, p.b * self.mu, p.c**2 * self.mu])


def _rk4(rhs, y0: np.ndarray, grid: TimeGrid) -> np.ndarray:
    dt = grid.dt
    out = np.empty((grid.steps + 1,) + y0.shape)
    out[0] = y0
    y = y0
    for m in range(grid.steps):
        t = m * dt
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[m + 1] = y
    return out


def integrate_mode(ode: ModeOde, initial: Sequence[float],
                   grid: TimeGrid) -> np.ndarray:
    """Classical RK4 integration of one mode; returns (steps+1, 3) states."""
    p = ode.params
    mu = ode.mu
    source = ode.source or (lambda t: 0.0)

    def rhs(t, y):
        return np.array([
            y[1],
            y[2],
            source(t) - p.alpha * y[2] - p.b * mu * y[1] - p.c**2 * mu * y[0],
        ])

    return _rk4(rhs, np.asarray(initial, dtype=float), grid)


def characteristic_roots(params: MgtParams, mu: float,
                         polish_steps: int = 2) -> np.ndarray:
    """Roots of r^3 + alpha r^2 + b mu r + c^2 mu by depressed cubic + Newton."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    alpha, b, c2 = params.alpha, params.b, params.c**2
    p = b * mu - alpha**2 / 3.0
    q = 2.0 * alpha**3 / 27.0 - alpha * b * mu / 3.0 + c2 * mu
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    sqrt_disc = np.sqrt(complex(disc))
    u3 = -q / 2.0 + sqrt_disc
    scale = max(abs(p) ** 1.5, abs(q), 1e-30)
    if abs(u3) < 1e-14 * scale:
        u3 = -q / 2.0 - sqrt_disc
    if abs(u3) < 1e-14 * scale:
        # p and q both vanish: triple root of the depressed cubic
        roots = np.full(3, -alpha / 3.0, dtype=complex)
    else:
        u = u3 ** (1.0 / 3.0)
        us = _CUBE_ROOTS_OF_UNITY * u
        vs = -p / (3.0 * us)
        roots = us + vs - alpha / 3.0
    for _ in range(polish_steps):
        val = roots**3 + alpha * roots**2 + b * mu * roots + c2 * mu
        der = 3.0 * roots**2 + 2.0 * alpha * roots + b * mu
        safe = np.abs(der) > 1e-30
        roots = np.where(safe, roots - val / der, roots)
    return roots[np.lexsort((roots.imag, roots.real))]


def principal_symbol_roots(b: float, mu: float) -> np.ndarray:
    """Roots of the principal part alone: 0 and +-i sqrt(b mu)."""
    w = np.sqrt(b * mu)
    return np.array([0.0, 1j * w, -1j * w])


def cubic_residual(params: MgtParams, mu: float, roots: np.ndarray) -> float:
    alpha, b, c2 = params.alpha, params.b, params.c**2
    val = roots**3 + alpha * roots**2 + b * mu * roots + c2 * mu
    return float(np.max(np.abs(val)))


def exact_exponential_solution(params: MgtParams, mu: float,
                               initial: Sequence[float],
                               times: np.ndarray) -> np.ndarray:
    """Closed-form homogeneous mode trajectory from the cubic's roots."""
    roots = characteristic_roots(params, mu)
    vand = np.vander(roots, 3, increasing=True).T
    coeff = np.linalg.solve(vand, np.asarray(initial, dtype=complex))
    vals = (coeff[None, :] * np.exp(np.outer(times, roots))).sum(axis=1)
    return vals.real


@dataclass
class ScanRow:
    alpha: float
    b: float
    c: float
    gamma: float
    mu: float
    max_real_part: float
    hurwitz_stable: bool


def stability_threshold_scan(param_grid: Sequence[MgtParams],
                             mu_grid: Sequence[float]) -> list[ScanRow]:
    """Max root real part across a parameter/frequency grid.

    The sign of gamma = alpha - c^2/b predicts the pattern via Routh-Hurwitz
    (alpha * b*mu > c^2*mu  iff gamma > 0, uniformly in mu > 0).
    """
    rows = []
    for params in param_grid:
        for mu in mu_grid:
            roots = characteristic_roots(params, mu)
            rows.append(ScanRow(
                alpha=params.alpha, b=params.b, c=params.c,
                gamma=params.gamma, mu=float(mu),
                max_real_part=float(np.max(roots.real)),
                hurwitz_stable=params.alpha * params.b > params.c**2))
    return rows


@dataclass
class OracleBundle:
    """Reference trajectories in total eigen-coefficients, with traces."""

    basis: EigenBasis
    grid: TimeGrid
    params: MgtParams
    w: np.ndarray
    wt: np.ndarray
    wtt: np.ndarray
    w_boundary: np.ndarray
    wt_boundary: np.ndarray

    def interior(self, which: str = "w") -> np.ndarray:
        total = {"w": self.w, "wt": self.wt, "wtt": self.wtt}[which]
        boundary = {"w": self.w_boundary, "wt": self.wt_boundary,
                    "wtt": None}[which]
        if boundary is None:
            raise ValueError("no boundary series stored for w_tt")
        return total - boundary @ self.basis.lift_matrix()

    def trace_series(self, which: str = "w") -> np.ndarray:
        from .spectral import lifting_normal_derivative_interval

        dn = self.basis.normal_derivatives()
        boundary = {"w": self.w_boundary, "wt": self.wt_boundary}[which]
        out = self.interior(which) @ dn.T
        out += np.array([lifting_normal_derivative_interval(row) for row in boundary])
        return out


def solve_by_modes(data: MgtData, params: MgtParams, grid: TimeGrid) -> OracleBundle:
    """Integrate every projected mode with RK4; the cross-validation oracle.

    Requires analytic g and g_t callables when Dirichlet data is present,
    because the source carries one time derivative of the boundary flux.
    """
    basis = data.basis
    flux = basis.boundary_flux()
    f = data.f
    if data.g is not None:
        if data.g.gt is None:
            raise ValueError("the oracle needs an analytic g_t callable")
        g_call, gt_call = data.g.g, data.g.gt
    else:
        g_call = gt_call = None

    c2, b = params.c**2, params.b
    mu = basis.eigenvalues
    zero = np.zeros(basis.size)

    def source(t: float) -> np.ndarray:
        out = f.modes(t) if f is not None else zero
        if g_call is not None:
            q = np.atleast_1d(g_call(t)) @ flux
            qd = np.atleast_1d(gt_call(t)) @ flux
            out = out - c2 * q - b * qd
        return out

    def rhs(t, y):
        acc = source(t) - params.alpha * y[2] - b * mu * y[1] - c2 * mu * y[0]
        return np.stack([y[1], y[2], acc])

    y0 = np.stack([data.w0.total_coeffs(), data.w1.total_coeffs(),
                   data.w2.total_coeffs()])
    states = _rk4(rhs, y0, grid)
    sig = (data.g.sample(grid) if data.g is not None
           else None)
    nodes = basis.domain.boundary_size
    w_boundary = sig.values if sig is not None else np.zeros((grid.steps + 1, nodes))
    wt_boundary = sig.dvalues if sig is not None else np.zeros((grid.steps + 1, nodes))
    return OracleBundle(basis, grid, params,
                        w=states[:, 0], wt=states[:, 1], wtt=states[:, 2],
                        w_boundary=w_boundary, wt_boundary=wt_boundary)
