"""Weighted composition operators ``f -> h * (f o psi)``: pointwise action,
quadrature norms, finite sections on monomial bases and Toeplitz sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .analytic import BoundaryGrid, DiskGrid, disk_grid
from .expr import AnalyticExpr, Const, parse_expr, validate_self_map
from .measure import pushforward_measure
from .quadrature import circle_mean, line_integral, plane_integral
from .spaces import SpaceSpec, monomial_basis_coeff, space_norm

__all__ = [
    "WcoSpec",
    "TruncatedMatrix",
    "NormCheck",
    "apply_wco",
    "wco_norm",
    "wco_norm_check",
    "wco_matrix",
    "toeplitz_matrix",
    "smallest_singular",
    "smooth_arc",
    "halfplane_self_map_ok",
    "MAX_DENSE",
]

MAX_DENSE = 2048


def _as_expr(e, variable):
    return parse_expr(e, variable) if isinstance(e, str) else e


def halfplane_self_map_ok(Phi, n=2000, seed=0):
    """``Re Phi > 0`` on a log-polar test grid of the right half-plane."""
    rng = np.random.default_rng(seed)
    rad = 10 ** rng.uniform(-3, 3, n)
    ang = rng.uniform(-np.pi / 2, np.pi / 2, n) * (1 - 1e-9)
    s = rad * np.exp(1j * ang)
    with np.errstate(all="ignore"):
        v = np.asarray(Phi(s), dtype=complex)
    return bool(np.all(np.isfinite(v)) and np.all(v.real > 0))


@dataclass(frozen=True)
class WcoSpec:
    """``h``, ``psi`` as expression trees (strings are parsed) on ``space``.

    Disk spaces require ``psi`` to pass ``validate_self_map``; half-plane
    spaces use the variable ``s`` and require ``Re psi > 0`` on a test grid.
    """

    h: AnalyticExpr
    psi: AnalyticExpr
    space: SpaceSpec = field(default_factory=SpaceSpec)
    allow_zero: bool = False

    def __post_init__(self):
        var = "z" if self.space.on_disk else "s"
        object.__setattr__(self, "h", _as_expr(self.h, var))
        object.__setattr__(self, "psi", _as_expr(self.psi, var))
        if self.space.on_disk:
            rep = validate_self_map(self.psi)
            if not rep.passed:
                raise ValueError(f"psi is not a self-map of the disk: {rep.message}")
        elif not halfplane_self_map_ok(self.psi):
            raise ValueError("psi does not map the right half-plane into itself")
        if not self.allow_zero and isinstance(self.h, Const) and self.h.value == 0:
            raise ValueError("h is identically zero")

    @property
    def variable(self):
        return "z" if self.space.on_disk else "s"

    def to_dict(self):
        v = self.variable
        return {"h": self.h.to_source(v), "psi": self.psi.to_source(v), "space": self.space.to_dict()}


def apply_wco(spec: WcoSpec, f, z):
    """``h(z) * f(psi(z))``."""
    z = np.asarray(z, dtype=complex)
    out = np.asarray(spec.h(z)) * np.asarray(f(spec.psi(z)))
    return out if out.ndim else complex(out)


@dataclass
class NormCheck:
    """Both sides of the pullback-measure identity for one function."""

    direct: float
    atom_sum: float | None
    rel_diff: float | None
    tolerance: float | None
    n_samples: int

    @property
    def agrees(self):
        return self.rel_diff is None or self.rel_diff <= self.tolerance


def _direct_norm(spec: WcoSpec, f):
    sp = spec.space
    g = lambda z: apply_wco(spec, f, z)
    if sp.is_hardy:
        p = sp.p
        val = circle_mean(lambda t: np.abs(g(np.exp(1j * t))) ** p)
        return float(val ** (1 / p))
    if sp.family == "hardy-halfplane":
        return float(line_integral(lambda s: np.abs(g(s)) ** 2) ** 0.5)
    if sp.family == "bergman-halfplane":
        return float(plane_integral(g) ** 0.5)
    return space_norm(g, sp)


def wco_norm_check(spec: WcoSpec, f, n_samples=2**16, rng=None, grid: DiskGrid | None = None) -> NormCheck:
    """``||W f||`` by direct quadrature, cross-checked against
    ``(int |f|^p dmu)^(1/p)`` over the pullback measure's atoms."""
    sp = spec.space
    direct = _direct_norm(spec, f)
    if not sp.on_disk:
        return NormCheck(direct, None, None, None, 0)
    if sp.is_hardy:
        mu = pushforward_measure(spec.h, spec.psi, sp.p, "hardy", n_samples, rng=rng)
        tol = 3 * n_samples**-0.5
        atom_p = mu.integrate(lambda z: np.abs(f(z)) ** sp.p)
    else:
        tol = 1e-8
        if grid is not None:
            mu = pushforward_measure(spec.h, spec.psi, sp.p, "bergman", grid=grid, alpha=sp.alpha)
            atom_p = mu.integrate(lambda z: np.abs(f(z)) ** sp.p)
        else:
            # double the angular resolution until the atom sum settles
            # (weights with zeros near the circle need it)
            n_theta, prev = 2048, None
            while True:
                mu = pushforward_measure(spec.h, spec.psi, sp.p, "bergman", alpha=sp.alpha,
                                         grid=disk_grid(256, n_theta, alpha=sp.alpha))
                atom_p = mu.integrate(lambda z: np.abs(f(z)) ** sp.p)
                if prev is not None and abs(atom_p - prev) <= 1e-11 * abs(atom_p) or n_theta >= 2**15:
                    break
                prev, n_theta = atom_p, 2 * n_theta
        n_samples = mu.n_samples
    atom = float(atom_p ** (1 / sp.p))
    # compare p-th powers: the identity is stated for them
    a, b = direct**sp.p, atom**sp.p
    rel = abs(a - b) / a if a > 0 else abs(b)
    return NormCheck(direct, atom, float(rel), tol, n_samples)


def wco_norm(spec: WcoSpec, f, cross_check=False, **kw) -> float:
    """``||W f||`` in the operator's space by direct quadrature."""
    if cross_check:
        return wco_norm_check(spec, f, **kw).direct
    return _direct_norm(spec, f)


# ---------------------------------------------------------------- matrices


@dataclass
class TruncatedMatrix:
    """Finite section ``entries[j, k] = <A e_k, e_j>`` on a monomial ONB."""

    entries: np.ndarray
    basis: str
    operator: str
    overflow: bool = False
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("matrix entries must be finite")
        if self.operator not in ("wco", "toeplitz"):
            raise ValueError(f"unknown operator tag {self.operator!r}")

    @property
    def n(self):
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def is_hermitian(self, tol=1e-12):
        e = self.entries
        return e.shape[0] == e.shape[1] and np.max(np.abs(e - e.conj().T), initial=0) <= tol

    def to_csv(self, path):
        """One row per entry: row, col, re, im."""
        e = self.entries
        j, k = np.indices(e.shape)
        arr = np.column_stack([j.ravel(), k.ravel(), e.real.ravel(), e.imag.ravel()])
        np.savetxt(path, arr, fmt=["%d", "%d", "%.17g", "%.17g"], delimiter=",", header="row,col,re,im", comments="")


def _basis_coeffs(space: SpaceSpec, n):
    return np.array([monomial_basis_coeff(space, k) for k in range(n)])


def wco_matrix(spec: WcoSpec, n, n_rows=None, N=None) -> TruncatedMatrix:
    """Finite section of ``W`` on the orthonormal monomials ``c_k z^k``.

    Column k holds the Taylor coefficients of ``h psi^k`` (from N boundary
    samples) scaled by ``c_k / c_j``. ``n_rows > n`` gives the rectangular
    section that keeps the image of the first n basis vectors. Aliasing is
    flagged when a polynomial column reaches degree N/4, or when a
    non-polynomial column keeps energy in the upper half of the spectrum.
    """
    sp = spec.space
    if sp.p != 2 or not sp.on_disk:
        raise NotImplementedError("finite sections are supported for p = 2 disk spaces only")
    n_rows = n if n_rows is None else int(n_rows)
    if n < 1 or n_rows < 1:
        raise ValueError("matrix size must be positive")
    if max(n, n_rows) > MAX_DENSE:
        raise ValueError(f"dense sections are capped at n = {MAX_DENSE}")
    dh, dpsi = spec.h.degree(), spec.psi.degree()
    if N is None:
        need = 4 * max(n_rows, (dh or 0) + (n - 1) * (dpsi or 1) + 1)
        N = max(1024, 1 << int(np.ceil(np.log2(need))))
        N = min(N, 2**15)
    if n_rows > N // 2:
        raise ValueError("quadrature resolution too small for the requested rows")
    c = _basis_coeffs(sp, max(n, n_rows))
    zeta = np.exp(1j * 2 * np.pi * (np.arange(N) + 0.5) / N)
    phase = np.exp(-1j * np.pi * np.arange(N) / N)
    hv = np.asarray(spec.h(zeta), dtype=complex) * np.ones(N)
    pv = np.asarray(spec.psi(zeta), dtype=complex) * np.ones(N)
    out = np.empty((n_rows, n), dtype=complex)
    overflow = False
    chunk = max(1, 2**22 // N)
    for k0 in range(0, n, chunk):
        ks = np.arange(k0, min(n, k0 + chunk))
        cols = hv[:, None] * pv[:, None] ** ks[None, :]
        a = np.fft.fft(cols, axis=0) / N * phase[:, None]
        if dh is None or dpsi is None:
            top = np.abs(a[N // 2 :]) ** 2
            if np.any(top.sum(axis=0) > 1e-24 * np.maximum((np.abs(a) ** 2).sum(axis=0), 1e-300)):
                overflow = True
        out[:, ks] = a[:n_rows] * (c[ks][None, :] / c[:n_rows, None])
    if dh is not None and dpsi is not None and dh + (n - 1) * dpsi >= N // 4:
        overflow = True
    out[np.abs(out) < 1e-15 * max(np.abs(out).max(), 1e-300)] = 0
    return TruncatedMatrix(out, sp.label, "wco", overflow)


def toeplitz_matrix(h_boundary: BoundaryGrid, n) -> TruncatedMatrix:
    """``T[j, k] = hat h(j - k)`` from the grid's discrete Fourier coefficients."""
    N = h_boundary.N
    if n < 1:
        raise ValueError("n must be >= 1")
    if 2 * n - 1 > N:
        raise ValueError(f"grid of size {N} cannot resolve Fourier index {n - 1}")
    if n > MAX_DENSE:
        raise ValueError(f"dense sections are capped at n = {MAX_DENSE}")
    coef = h_boundary.fourier()
    col = coef[np.arange(n)]  # hat h(j) for j >= 0, first column
    row = coef[-np.arange(n) % N]  # hat h(-k), first row
    T = linalg.toeplitz(col, row)
    notes = []
    v = h_boundary.values
    if np.any(np.abs(np.imag(v)) > 1e-12) or np.any(np.real(v) < -1e-12):
        notes.append("symbol is not real and nonnegative: outside the proven scope")
    return TruncatedMatrix(T, "H2", "toeplitz", False, notes)


def smallest_singular(m: TruncatedMatrix) -> float:
    """Smallest singular value of the section (dense; n <= 2048).

    Corroborating evidence only: a finite section says little about whether
    the full operator is bounded below.
    """
    e = m.entries
    if min(e.shape) < 1:
        raise ValueError("empty matrix")
    if max(e.shape) > MAX_DENSE:
        raise ValueError(f"dense decompositions are capped at n = {MAX_DENSE}")
    if m.is_hermitian():
        ev = linalg.eigvalsh(e)
        return float(np.min(np.abs(ev)))
    return float(linalg.svdvals(e).min())


def smooth_arc(center=np.pi, half_width=np.pi / 4, ramp=0.3, floor=0.0):
    """Boundary symbol equal to ``floor`` on the arc ``|theta - center| <
    half_width`` and 1 away from it, joined by C-infinity ramps of width
    ``ramp``. Returns a function of points on the circle."""
    if ramp <= 0 or half_width < 0:
        raise ValueError("ramp must be positive and half_width nonnegative")

    def bump(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1 / x[pos])
        return out

    def step(x):  # 0 for x <= 0, 1 for x >= 1
        a, b = bump(x), bump(1 - x)
        return a / (a + b)

    def h(z):
        th = np.angle(np.asarray(z, dtype=complex) * np.exp(-1j * center))
        d = (np.abs(th) - half_width) / ramp
        return floor + (1 - floor) * step(np.asarray(d, dtype=float))

    return h
