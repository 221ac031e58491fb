"""Quadrature on the circle, the disk and the imaginary axis.

All integrals are normalized: ``circle_mean`` integrates against ``dm`` on the
unit circle and ``disk_mean`` against ``(1-|z|^2)^alpha dA`` with ``dA`` the
normalized area measure. Integration over the imaginary axis is pulled back to
the circle through the Cayley map, so there is one circle engine underneath.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize, special

__all__ = [
    "QuadratureError",
    "circle_nodes",
    "circle_mean",
    "adaptive_circle_mean",
    "taylor_coeffs",
    "bergman_moments",
    "analytic_disk_norm2",
    "disk_mean",
    "line_integral",
    "plane_integral",
    "halfplane_area_integral",
]

TWO_PI = 2 * np.pi


class QuadratureError(RuntimeError):
    pass


def circle_nodes(n, offset=0.0):
    """``exp(2 pi i (k + offset) / n)`` for k = 0..n-1."""
    return np.exp(1j * TWO_PI * (np.arange(n) + offset) / n)


def _finite_or_raise(vals, what="integrand"):
    if not np.all(np.isfinite(vals)):
        raise QuadratureError(f"{what} is not finite on the quadrature nodes")
    return vals


def circle_mean(func, n_min=256, n_max=2**16, rtol=1e-13, offset=0.0, fallback=True):
    """Mean of ``func`` over the unit circle.

    Trapezoid rule with doubling; for integrands that are smooth and periodic
    this converges geometrically and successive doublings give a reliable error
    estimate. If ``n_max`` is reached without convergence (sharply peaked or
    non-smooth integrands) the adaptive panel rule takes over.

    ``func`` maps an array of angles to real (or complex) values.
    """
    n = n_min
    prev = np.mean(_finite_or_raise(func(TWO_PI * (np.arange(n) + offset) / n)))
    while n < n_max:
        # the doubled rule reuses nothing; offset nodes interleave with the old ones
        new = np.mean(_finite_or_raise(func(TWO_PI * (np.arange(n) + offset + 0.5) / n)))
        cur = 0.5 * (prev + new)
        n *= 2
        if abs(cur - prev) <= rtol * abs(cur) + 1e-300:
            return cur
        prev = cur
    if not fallback:
        return prev
    return adaptive_circle_mean(func, coarse=min(n_max, 2**14), rtol=max(rtol, 1e-12))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)


def _panel_rule(func, a, b):
    """15-point Gauss-Legendre on each panel [a_k, b_k] (vectorized)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = _finite_or_raise(func(x.ravel())).reshape(x.shape)
    return half * (vals @ _GL_W)


def _find_peaks(func, coarse, max_peaks=16):
    theta = TWO_PI * np.arange(coarse) / coarse
    vals = np.abs(_finite_or_raise(func(theta)))
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    cand = np.flatnonzero((vals >= left) & (vals >= right) & (vals > 1e-6 * vals.max()))
    cand = cand[np.argsort(vals[cand])[::-1]][:max_peaks]
    h = TWO_PI / coarse
    peaks = []
    for k in cand:
        t0 = theta[k]
        # search in the offset from t0 so the relative x-tolerance does not
        # swamp peaks narrower than sqrt(eps) * t0
        res = optimize.minimize_scalar(
            lambda d: -abs(func(np.array([t0 + d]))[0]),
            bounds=(-h, h),
            method="bounded",
            options={"xatol": 1e-16},
        )
        peaks.append(float(np.mod(t0 + res.x, TWO_PI)) if res.success else t0)
    return peaks


def adaptive_circle_mean(
    func, coarse=2**12, rtol=1e-12, max_panels=100_000, peaks=None, noise_rtol=1e-6
):
    """Adaptive Gauss-Legendre panels over [0, 2 pi) with breakpoints at the
    local maxima of ``|func|`` found on a coarse grid. Handles Lorentzian-like
    peaks far narrower than the coarse spacing.

    Error control is global: the summed panel error estimates must fall below
    ``rtol`` times the integral. Near-singular integrands lose digits to
    cancellation in their own evaluation; when the error estimate stops
    improving below ``noise_rtol`` the current value is returned.
    """
    if peaks is None:
        peaks = _find_peaks(func, coarse)
    edges = np.linspace(0.0, TWO_PI, 65)
    edges = np.unique(np.concatenate([edges, np.mod(peaks, TWO_PI)]))
    a, b = edges[:-1], edges[1:]
    keep = b - a > 0
    a, b = a[keep], b[keep]
    whole = _panel_rule(func, a, b)
    done = 0.0
    done_err = 0.0
    n_panels = len(a)
    history = []
    for it in range(200):
        mid = 0.5 * (a + b)
        left = _panel_rule(func, a, mid)
        right = _panel_rule(func, mid, b)
        fine = left + right
        err = np.abs(fine - whole)
        total = abs(done + fine.sum()) + 1e-300
        est = (done_err + err.sum()) / total
        if est <= rtol:
            return (done + fine.sum()) / TWO_PI
        history.append(est)
        stalled = len(history) > 6 and est > 0.5 * history[-6]
        if stalled and est <= noise_rtol:
            return (done + fine.sum()) / TWO_PI
        ok = (err <= 0.1 * rtol * np.abs(fine)) | (b - a < 1e-15)
        done = done + fine[ok].sum()
        done_err += err[ok].sum()
        a, b, mid = a[~ok], b[~ok], mid[~ok]
        if len(a) == 0:
            return done / TWO_PI
        n_panels += len(a)
        if n_panels > max_panels:
            if est <= noise_rtol:
                return (done + fine[~ok].sum()) / TWO_PI
            raise QuadratureError(
                f"adaptive circle quadrature exceeded the panel budget (error estimate {est:.1e})"
            )
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        whole = np.concatenate([left[~ok], right[~ok]])
    raise QuadratureError("adaptive circle quadrature did not converge")


def taylor_coeffs(func, n, offset=0.5):
    """Taylor coefficients a_0..a_{n-1} of an analytic function from ``n``
    boundary samples (aliasing error ~ sum of |a_{k+n}|).

    Nodes are offset by half a step so that a boundary singularity at
    ``z = -1`` or ``z = 1`` is never sampled.
    """
    zeta = circle_nodes(n, offset)
    vals = _finite_or_raise(np.asarray(func(zeta), dtype=complex))
    c = np.fft.fft(vals) / n
    return c * np.exp(-1j * TWO_PI * offset * np.arange(n) / n)


def bergman_moments(n, alpha=0.0):
    """``int |z|^(2k) (1-|z|^2)^alpha dA`` for k = 0..n-1 (exact Beta integrals)."""
    k = np.arange(n, dtype=float)
    return np.exp(special.gammaln(k + 1) + special.gammaln(alpha + 1) - special.gammaln(k + alpha + 2))


def analytic_disk_norm2(func, alpha=0.0, n_min=1024, n_max=2**20, rtol=1e-13):
    """``int |f|^2 (1-|z|^2)^alpha dA`` for f analytic on a neighbourhood of the
    closed disk, from its Taylor coefficients. The FFT size doubles until the
    top half of the spectrum carries a negligible share of the weighted energy.
    """
    n = n_min
    while True:
        c = taylor_coeffs(func, n)
        e = np.abs(c) ** 2 * bergman_moments(n, alpha)
        total = e.sum()
        tail = e[n // 2 :].sum()
        if tail <= rtol * total or total == 0:
            return float(total)
        if n >= n_max:
            raise QuadratureError(f"Taylor series not resolved with {n} coefficients")
        n *= 2


def _radial_panels(depth):
    """Panels in t = r^2 graded geometrically toward t = 1, and toward t = 0
    where ``|z|^p`` factors are not smooth in t."""
    inner = [2.0 ** (-k) for k in range(12, 1, -1)]
    edges = [0.0] + inner + [1.0 - 2.0 ** (-k) for k in range(1, depth + 1)]
    return np.array(edges)


def disk_mean(func, alpha=0.0, depth=None, nodes_per_panel=12, n_max=2**15, rtol=1e-11):
    """``int func(z) (1-|z|^2)^alpha dA(z)`` by iterated quadrature.

    Outer: Gauss-Legendre panels in ``t = r^2`` graded toward the boundary
    (Gauss-Jacobi on the last panel carries the weight singularity). Inner:
    trapezoid on each circle ``|z| = sqrt(t)``, doubled per circle until
    converged. ``func`` takes complex points and returns real values.
    """
    depth = depth or 24
    edges = _radial_panels(depth)
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (a + b) + 0.5 * (b - a) * x
        ts.append(t)
        ws.append(0.5 * (b - a) * w * (1 - t) ** alpha)
    # last panel [1 - 2^-depth, 1] with Jacobi weight (1-t)^alpha
    a = edges[-1]
    xj, wj = special.roots_jacobi(nodes_per_panel, alpha, 0.0)
    half = 0.5 * (1 - a)
    ts.append(a + half * (xj + 1))
    ws.append(wj * half ** (alpha + 1))
    t = np.concatenate(ts)
    wt = np.concatenate(ws)
    r = np.sqrt(t)

    means = np.empty(len(r))
    todo = np.arange(len(r))
    n = 64
    prev = None
    while True:
        theta = TWO_PI * np.arange(n) / n if prev is None else TWO_PI * (np.arange(n // 2) + 0.5) / (n // 2)
        z = r[todo][:, None] * np.exp(1j * theta)[None, :]
        vals = np.real(_finite_or_raise(func(z.ravel()))).reshape(z.shape).mean(axis=1)
        if prev is None:
            cur = vals
        else:
            cur = 0.5 * (prev + vals)
            conv = np.abs(cur - prev) <= rtol * np.abs(cur) + 1e-300
            means[todo[conv]] = cur[conv]
            todo = todo[~conv]
            cur = cur[~conv]
            if len(todo) == 0:
                break
            if n >= n_max:
                # unresolved circles: peak-aware adaptive rule
                for i in todo:
                    ri = r[i]
                    means[i] = adaptive_circle_mean(
                        lambda th, ri=ri: np.real(func(ri * np.exp(1j * th))), rtol=max(rtol, 1e-10)
                    )
                break
        prev = cur
        n *= 2
    return float(means @ wt)


def line_integral(func, center=0.0, scale=1.0, **kw):
    """``int_R func(i y) dy`` with ``func`` evaluated on the imaginary axis.

    Pulled back to the circle by ``y = center + scale * t`` with
    ``i t = (1 - zeta) / (1 + zeta)``, for which
    ``dy = 4 pi scale dm(zeta) / |1 + zeta|^2``. A Lorentzian centred at
    ``center`` with half-width ``scale`` becomes constant on the circle.
    Integrands must decay at least like ``1/y^2``.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")

    def pulled(theta):
        zeta = np.exp(1j * theta)
        t = ((1 - zeta) / (1 + zeta)).imag
        return func(1j * (center + scale * t)) * 4 * np.pi * scale / np.abs(1 + zeta) ** 2

    kw.setdefault("offset", 0.5)
    return circle_mean(pulled, **kw)


def plane_integral_analytic2(func, **kw):
    """``int_{Re s > 0} |F(s)|^2 dx dy`` for F analytic on the right half-plane.

    Pulled back to the disk: ``G(z) = F(M z) * 2 / (1 + z)^2`` and the integral
    equals ``pi * int_D |G|^2 dA``.
    """

    def pulled(z):
        s = (1 - z) / (1 + z)
        return func(s) * 2.0 / (1 + z) ** 2

    return np.pi * analytic_disk_norm2(pulled, **kw)


def halfplane_area_integral(func, x_scale=1.0, n_outer=48, center=0.0, scale=None, **kw):
    """``int_0^inf int_R func(x + i y) dy dx`` for integrands decaying like
    ``|s|^-3`` or faster.

    Outer: Gauss-Legendre in ``u`` with ``x = x_scale * u / (1 - u)``, which is
    exact for ``(x + x_scale)^-3`` profiles; ``x_scale`` should be the distance
    over which the integrand decays. Inner: ``line_integral`` on each vertical
    line, focused at ``center`` with half-width ``scale + x`` (``scale``
    defaults to ``x_scale``).
    """
    if not x_scale > 0:
        raise ValueError("x_scale must be positive")
    u, wu = np.polynomial.legendre.leggauss(n_outer)
    u = 0.5 * (u + 1)
    wu = 0.5 * wu
    x = x_scale * u / (1 - u)
    jac = x_scale / (1 - u) ** 2
    total = 0.0
    for xi, wi, ji in zip(x, wu, jac):
        sc = (x_scale if scale is None else scale) + xi
        total += wi * ji * line_integral(lambda s, xi=xi: func(xi + s), center, sc, **kw)
    return total


plane_integral = plane_integral_analytic2
