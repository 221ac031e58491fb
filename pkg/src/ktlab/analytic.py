"""Boundary sampling, outer functions, inner-outer splitting and the Cayley
transfer between the disk and the right half-plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .expr import AnalyticExpr, EvaluationError
from .quadrature import circle_nodes

__all__ = [
    "BoundaryGrid",
    "DiskGrid",
    "OuterFunction",
    "FactorizationResult",
    "sample_boundary",
    "disk_grid",
    "outer_from_modulus",
    "inner_outer_factor",
    "winding_number",
    "cayley",
    "v_transform",
    "v_inverse",
    "EPS_FLOOR",
]

EPS_FLOOR = 1e-12


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class BoundaryGrid:
    """Samples at ``exp(2 pi i k / N)``; each node carries weight 1/N."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise ValueError("BoundaryGrid values must be one-dimensional")
        n = len(v)
        if n < 16 or not _is_pow2(n):
            raise ValueError(f"BoundaryGrid size must be a power of two >= 16, got {n}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self):
        return len(self.values)

    @property
    def theta(self):
        return 2 * np.pi * np.arange(self.N) / self.N

    @property
    def nodes(self):
        return circle_nodes(self.N)

    def mean(self, f=None):
        v = self.values if f is None else f(self.values)
        return np.mean(v)

    def fourier(self):
        """Fourier coefficients hat f(n) indexed like ``np.fft.fft`` output."""
        return np.fft.fft(self.values) / self.N


@dataclass(frozen=True)
class DiskGrid:
    """Quadrature nodes in the open disk for ``(1-|z|^2)^alpha dA``.

    The weights sum to ``1/(1+alpha)``, which is 1 for the unweighted
    normalized area measure.
    """

    z: np.ndarray
    w: np.ndarray
    scheme: str
    alpha: float = 0.0
    shape: tuple = field(default=())

    def __post_init__(self):
        if self.scheme not in ("polar-product", "quasi-uniform"):
            raise ValueError(f"unknown disk grid scheme {self.scheme!r}")
        if np.any(np.abs(self.z) >= 1):
            raise ValueError("disk grid nodes must lie in the open disk")
        if np.any(self.w <= 0):
            raise ValueError("disk grid weights must be positive")
        if abs(self.w.sum() - 1 / (1 + self.alpha)) > 1e-10:
            raise ValueError("disk grid weights do not sum to the measure's mass")

    def __len__(self):
        return len(self.z)


def disk_grid(n_r=64, n_theta=256, scheme="polar-product", alpha=0.0):
    """Polar product grid: Gauss-Jacobi in ``t = r^2`` (weight ``(1-t)^alpha``)
    times the uniform rule in angle; exact for ``z^j conj(z)^k`` with
    ``j + k < 2 n_r`` and ``|j - k| < n_theta``.

    The quasi-uniform scheme uses the midpoints of ``n_r x n_theta`` cells of
    equal ``(1-|z|^2)^alpha dA``-mass, so histogramming its nodes into a coarser
    aligned cell grid is exact.
    """
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    if scheme == "polar-product":
        x, wx = special.roots_jacobi(n_r, alpha, 0.0)
        t = 0.5 * (x + 1)
        wt = wx * 0.5 ** (alpha + 1)
    elif scheme == "quasi-uniform":
        # equal-mass bands in t for the measure (1-t)^alpha dt
        u = (np.arange(n_r) + 0.5) / n_r
        t = 1 - (1 - u) ** (1 / (alpha + 1))
        wt = np.full(n_r, 1.0 / (n_r * (alpha + 1)))
        theta = theta + np.pi / n_theta
    else:
        raise ValueError(f"unknown disk grid scheme {scheme!r}")
    r = np.sqrt(t)
    z = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    w = (wt[:, None] * np.full(n_theta, 1.0 / n_theta)[None, :]).ravel()
    return DiskGrid(z, w, scheme, float(alpha), (n_r, n_theta))


def sample_boundary(f, N) -> BoundaryGrid:
    """``values[k] = f(exp(2 pi i k / N))``."""
    if not _is_pow2(N) or N < 16:
        raise ValueError(f"N must be a power of two >= 16, got {N}")
    vals = np.asarray(f(circle_nodes(N)), dtype=complex)
    bad = np.flatnonzero(~np.isfinite(vals))
    if len(bad):
        k = int(bad[0])
        raise EvaluationError(
            f"function has a pole on boundary node k={k} (theta = 2*pi*{k}/{N})"
        )
    return BoundaryGrid(vals)


class OuterFunction:
    """Outer function stored through the Taylor coefficients of its logarithm.

    ``log F(z) = c_0 + 2 sum_{n>=1} c_n z^n`` with c_n the Fourier
    coefficients of ``log |F|`` on the circle (the Herglotz integral).
    """

    def __init__(self, log_coeffs):
        self.log_coeffs = np.asarray(log_coeffs, dtype=complex)

    @property
    def N(self):
        return 2 * (len(self.log_coeffs) - 1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c in self.log_coeffs[::-1]:
            out = out * z + c
        return np.exp(out)

    def log(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c in self.log_coeffs[::-1]:
            out = out * z + c
        return out

    def boundary_values(self, N=None) -> np.ndarray:
        """Values at the N-th roots of unity via one inverse FFT."""
        N = N or self.N
        spec = np.zeros(N, dtype=complex)
        m = min(len(self.log_coeffs), N // 2 + 1)
        spec[:m] = self.log_coeffs[:m]
        return np.exp(np.fft.ifft(spec) * N)

    def circle_values(self, radius, n):
        """Values on ``|z| = radius`` at n equispaced nodes (n >= len(log_coeffs))."""
        spec = np.zeros(n, dtype=complex)
        m = min(len(self.log_coeffs), n)
        spec[:m] = self.log_coeffs[:m] * radius ** np.arange(m)
        return np.exp(np.fft.ifft(spec) * n)

    def series(self, n):
        """First n Taylor coefficients of F itself (exp of a power series)."""
        L = np.zeros(n, dtype=complex)
        m = min(n, len(self.log_coeffs))
        L[:m] = self.log_coeffs[:m]
        g = np.zeros(n, dtype=complex)
        g[0] = np.exp(L[0])
        k = np.arange(n)
        for j in range(1, n):
            g[j] = np.dot(k[1 : j + 1] * L[1 : j + 1], g[j - 1 :: -1][:j]) / j
        return g

    def power(self, n):
        return OuterFunction(self.log_coeffs * n)


def outer_from_modulus(w) -> OuterFunction:
    """Outer function whose boundary modulus is ``w`` at the grid nodes.

    ``w`` is a BoundaryGrid (or array) of positive reals. Exact at the nodes:
    the real part of the discrete analytic completion of ``log w`` reproduces
    ``log w`` there, Nyquist term included.
    """
    vals = w.values if isinstance(w, BoundaryGrid) else np.asarray(w)
    if np.iscomplexobj(vals):
        if np.any(vals.imag != 0):
            raise ValueError("modulus must be real")
        vals = vals.real
    N = len(vals)
    if N < 16 or not _is_pow2(N):
        raise ValueError(f"grid size must be a power of two >= 16, got {N}")
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        k = int(np.flatnonzero(~(vals > 0))[0])
        raise ValueError(
            f"modulus must be positive everywhere (node {k} has {vals[k]!r}); "
            "floor it before taking logs"
        )
    c = np.fft.fft(np.log(vals)) / N
    log_coeffs = np.empty(N // 2 + 1, dtype=complex)
    log_coeffs[0] = c[0].real
    log_coeffs[1 : N // 2] = 2 * c[1 : N // 2]
    log_coeffs[N // 2] = c[N // 2].real
    return OuterFunction(log_coeffs)


def winding_number(f, radius=0.999, n=4096):
    """Zeros minus poles of ``f`` inside ``|z| < radius`` (argument principle)."""
    if isinstance(f, OuterFunction):
        vals = f.circle_values(radius, max(n, len(f.log_coeffs)))
    else:
        vals = np.asarray(f(radius * circle_nodes(n)), dtype=complex)
    if np.any(vals == 0) or not np.all(np.isfinite(vals)):
        raise EvaluationError("function vanishes or blows up on the contour")
    d = np.angle(np.roll(vals, -1) / vals)
    return int(round(d.sum() / (2 * np.pi)))


@dataclass
class FactorizationResult:
    outer: OuterFunction
    inner_boundary: BoundaryGrid
    residual: float
    floored_nodes: int = 0
    outer_zero_count: int = 0


def inner_outer_factor(h, N=1024, floor=EPS_FLOOR) -> FactorizationResult:
    """Split ``h`` into ``outer * inner`` with the inner part known only as
    boundary samples ``h / outer``. Boundary zeros of ``|h|`` are floored at
    ``floor * max|h|``.
    """
    hb = sample_boundary(h, N)
    mod = np.abs(hb.values)
    top = mod.max()
    if top == 0:
        raise ValueError("zero symbol: h vanishes identically on the boundary grid")
    lo = floor * top
    floored = int(np.count_nonzero(mod < lo))
    outer = outer_from_modulus(np.maximum(mod, lo))
    ob = outer.boundary_values(N)
    inner = hb.values / ob
    residual = float(np.max(np.abs(np.abs(inner) - 1)))
    zeros = winding_number(outer, 0.999, max(N, 4096))
    return FactorizationResult(outer, BoundaryGrid(inner), residual, floored, zeros)


# ---------------------------------------------------------------- Cayley / V


def cayley(z):
    """``M(z) = (1 - z) / (1 + z)``; maps the disk onto the right half-plane
    and is its own inverse."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == -1):
        raise ZeroDivisionError("cayley map has a pole at z = -1")
    out = (1 - z) / (1 + z)
    return out if out.ndim else complex(out)


def v_transform(f, s):
    """``(Vf)(s) = f(M(s)) / (sqrt(pi) (1 + s))``, the unitary map
    H^2(disk) -> H^2(right half-plane)."""
    s = np.asarray(s, dtype=complex)
    if np.any(s.real < 0):
        raise ValueError("v_transform needs Re s >= 0 (boundary values on the imaginary axis)")
    out = f(cayley(s)) / (np.sqrt(np.pi) * (1 + s))
    out = np.asarray(out)
    return out if out.ndim else complex(out)


def v_inverse(F, z):
    """Inverse of ``v_transform``: ``f(z) = 2 sqrt(pi) F(M(z)) / (1 + z)``."""
    z = np.asarray(z, dtype=complex)
    out = 2 * np.sqrt(np.pi) * F(cayley(z)) / (1 + z)
    out = np.asarray(out)
    return out if out.ndim else complex(out)
