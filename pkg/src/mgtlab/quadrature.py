"""Quadrature weight families shared by the convolution and Volterra machinery.

All rules act on uniform grids t_j = j*dt and integrate over [0, t_m].  The
"trapezoid" rule is the order-2 workhorse; "gregory4" upgrades the endpoint
weights so that smooth integrands are resolved to fourth order, which the
direct Volterra solver needs for its tightest reproduction targets.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

RULES = ("trapezoid", "gregory4")

# Gregory endpoint weights of the order-4 rule (interior weight is 1).
_GREGORY_EDGE = np.array([3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0])

# Closed rows used while the Gregory stencil does not fit (m <= 5):
# trapezoid, Simpson, Simpson 3/8, composite Simpson, Simpson + 3/8.
_SHORT_ROWS = {
    0: np.array([0.0]),
    1: np.array([0.5, 0.5]),
    2: np.array([1.0, 4.0, 1.0]) / 3.0,
    3: np.array([3.0, 9.0, 9.0, 3.0]) / 8.0,
    4: np.array([1.0, 4.0, 2.0, 4.0, 1.0]) / 3.0,
    5: np.array([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0 + 3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0]),
}


def composite_weights(m: int, dt: float, rule: str = "trapezoid") -> np.ndarray:
    """Weights w_0..w_m approximating the integral of samples over [0, m*dt]."""
    if rule not in RULES:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    if m < 0:
        raise ValueError("need m >= 0")
    if rule == "trapezoid":
        if m == 0:
            return np.zeros(1)
        w = np.full(m + 1, dt)
        w[0] = w[-1] = 0.5 * dt
        return w
    if m <= 5:
        return dt * _SHORT_ROWS[m].copy()
    w = np.ones(m + 1)
    w[:3] = _GREGORY_EDGE
    w[-3:] = _GREGORY_EDGE[::-1]
    return dt * w


def prefix_trapezoid(values: np.ndarray, dt: float) -> np.ndarray:
    """Running trapezoid integrals P_m = int_0^{t_m} along axis 0; P_0 = 0."""
    cs = np.cumsum(values, axis=0)
    return dt * (cs - 0.5 * values - 0.5 * values[0])


def prefix_exponential(rate: float, values: np.ndarray, dt: float) -> np.ndarray:
    """Running integrals of exp(rate*(t_m - s)) * values(s), exact for linear data.

    The per-step update uses the closed-form weights of an exponential
    integrator, so constant and linear sample profiles integrate exactly and
    the result is second-order accurate in dt for smooth data.
    """
    out = np.zeros_like(values, dtype=float)
    if abs(rate) < 1e-14:
        return prefix_trapezoid(values, dt)
    # int_{t_m}^{t_{m+1}} exp(rate*(t_{m+1}-s)) * linear(s) ds
    e = np.exp(rate * dt)
    i1 = (e - 1.0) / rate
    i2 = (e - 1.0) / rate**2 - dt / rate  # moment against (s - t_m)/dt scaled below
    w_left = i1 - i2 / dt
    w_right = i2 / dt
    for m in range(values.shape[0] - 1):
        out[m + 1] = e * out[m] + w_left * values[m] + w_right * values[m + 1]
    return out


def convolve_product(kernel_samples: np.ndarray, x: np.ndarray, dt: float,
                     rule: str = "trapezoid") -> np.ndarray:
    """Product-quadrature convolution (Wx)_m = sum_j w_j^{(m)} K_{m-j} x_j.

    Exactly the lower-triangular operator inverted by the direct Volterra
    solver with the same rule, so Neumann iteration on W reproduces the
    collocated solution.
    """
    if rule not in RULES:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    kernel = np.asarray(kernel_samples, dtype=float)
    xs = np.asarray(x, dtype=float)
    squeeze = False
    if xs.ndim == 1:
        xs = xs[:, None]
        squeeze = True
    if kernel.ndim == 1:
        kernel = kernel[:, None]
    if kernel.shape[1] == 1 and xs.shape[1] > 1:
        kernel = np.broadcast_to(kernel, xs.shape).copy()
    m_top = xs.shape[0] - 1
    full = fftconvolve(kernel, xs, axes=0)[: m_top + 1]
    if rule == "trapezoid":
        out = dt * (full - 0.5 * kernel * xs[0] - 0.5 * kernel[0] * xs)
        out[0] = 0.0
    else:
        corr = np.zeros_like(full)
        edge = _GREGORY_EDGE - 1.0
        for i, ei in enumerate(edge):
            corr[i:] += ei * kernel[: m_top + 1 - i] * xs[i]
            corr[i:] += ei * kernel[i] * xs[: m_top + 1 - i]
        out = dt * (full + corr)
        for m in range(min(5, m_top) + 1):
            w = composite_weights(m, dt, rule)
            out[m] = (w[:, None] * kernel[m::-1] * xs[: m + 1]).sum(axis=0)
    return out[:, 0] if squeeze else out
