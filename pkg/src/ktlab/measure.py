"""Pullback measures of weighted composition operators and the criteria
computed from them: boundary density and its essential infimum, Carleson box
constants, Berezin transforms and the Luecking disc condition.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .analytic import DiskGrid, disk_grid
from .results import (
    BOUNDED_BELOW,
    INCONCLUSIVE,
    NOT_BOUNDED_BELOW,
    CriterionResult,
    ThresholdPolicy,
)

__all__ = [
    "R_BOUNDARY",
    "PullbackMeasure",
    "BoundaryDensity",
    "DiskDensity",
    "pushforward_measure",
    "rn_density_boundary",
    "ess_inf_criterion",
    "carleson_constant",
    "berezin_transform",
    "luecking_check",
    "disc_area_fraction",
    "disc_fractions",
]

R_BOUNDARY = 1 - 2.0**-20
TWO_PI = 2 * np.pi


@dataclass
class PullbackMeasure:
    """Atoms ``(location, weight)`` in the closed disk.

    ``source`` is ``"hardy"`` (pushforward of ``|h|^p dm`` on the circle) or
    ``"bergman"`` (pushforward of ``|h|^p (1-|z|^2)^alpha dA``).
    """

    locations: np.ndarray
    weights: np.ndarray
    source: str = "hardy"
    p: float = 2.0
    alpha: float = 0.0
    r_boundary: float = R_BOUNDARY
    n_samples: int = 0

    def __post_init__(self):
        self.locations = np.asarray(self.locations, dtype=complex).ravel()
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.locations.shape != self.weights.shape:
            raise ValueError("locations and weights differ in length")
        if self.source not in ("hardy", "bergman", "external"):
            raise ValueError(f"unknown measure source {self.source!r}")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite and nonnegative")
        if np.any(np.abs(self.locations) > 1 + 1e-9):
            raise ValueError("atoms must lie in the closed unit disk; is psi a self-map?")
        if not self.n_samples:
            self.n_samples = len(self.weights)

    @property
    def atoms(self):
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    @property
    def boundary_mask(self):
        return np.abs(self.locations) >= self.r_boundary

    @property
    def boundary_mass(self):
        return float(self.weights[self.boundary_mask].sum())

    @property
    def interior_mass(self):
        return float(self.weights[~self.boundary_mask].sum())

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def integrate(self, f):
        """``int f dmu`` for f evaluated at the atom locations."""
        return np.sum(np.asarray(f(self.locations)) * self.weights)

    # --- exchange formats: CSV (location_re, location_im, weight) and flat binary

    def to_csv(self, path):
        arr = np.column_stack([self.locations.real, self.locations.imag, self.weights])
        np.savetxt(path, arr, fmt="%.17g", delimiter=",", header="location_re,location_im,weight", comments="")

    @classmethod
    def from_csv(cls, path, **kw):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        kw.setdefault("source", "external")
        return cls(data[:, 0] + 1j * data[:, 1], data[:, 2], **kw)

    def to_binary(self, path):
        """Little-endian float64 triples (re, im, weight), no header."""
        arr = np.column_stack([self.locations.real, self.locations.imag, self.weights])
        arr.astype("<f8").tofile(path)

    @classmethod
    def from_binary(cls, path, **kw):
        arr = np.fromfile(path, dtype="<f8")
        if arr.size % 3:
            raise ValueError("binary measure file length is not a multiple of 3 doubles")
        arr = arr.reshape(-1, 3)
        kw.setdefault("source", "external")
        return cls(arr[:, 0] + 1j * arr[:, 1], arr[:, 2], **kw)


def pushforward_measure(
    h,
    psi,
    p=2.0,
    source="hardy",
    n_samples=2**20,
    rng=None,
    grid: DiskGrid | None = None,
    alpha=0.0,
    r_boundary=R_BOUNDARY,
    chunk=2**18,
) -> PullbackMeasure:
    """Atom cloud for ``mu(E) = int_{psi^-1(E)} |h|^p``.

    Hardy source: a uniform circle grid with a random rotation drawn from
    ``rng`` (unbiased for every rotation-invariant statistic). Bergman
    source: the nodes and weights of ``grid`` (default polar product
    256 x 2048 for ``(1-|z|^2)^alpha dA``).
    """
    if source == "hardy":
        rng = np.random.default_rng() if rng is None else rng
        u = rng.random()
        n = int(n_samples)
        locs = np.empty(n, dtype=complex)
        wts = np.empty(n)
        for s in range(0, n, chunk):
            k = np.arange(s, min(n, s + chunk))
            zeta = np.exp(1j * TWO_PI * (k + u) / n)
            locs[s : s + len(k)] = psi(zeta)
            wts[s : s + len(k)] = np.abs(h(zeta)) ** p / n
    elif source == "bergman":
        if grid is None:
            grid = disk_grid(256, 2048, "polar-product", alpha)
        if abs(grid.alpha - alpha) > 0:
            raise ValueError("disk grid alpha differs from the requested alpha")
        n = len(grid)
        locs = np.empty(n, dtype=complex)
        wts = np.empty(n)
        for s in range(0, n, chunk):
            z = grid.z[s : s + chunk]
            locs[s : s + len(z)] = psi(z)
            wts[s : s + len(z)] = np.abs(h(z)) ** p * grid.w[s : s + chunk]
    else:
        raise ValueError(f"unknown source {source!r}")
    if not (np.all(np.isfinite(locs)) and np.all(np.isfinite(wts))):
        raise ArithmeticError("symbol evaluation failed on the sampling set")
    return PullbackMeasure(locs, wts, source, float(p), float(alpha), r_boundary, n)


# ---------------------------------------------------------------- boundary density


@dataclass
class BoundaryDensity:
    n_bins: int
    bin_mass: np.ndarray
    density: np.ndarray
    half_width: np.ndarray
    ess_inf_estimate: float
    ess_inf_half_width: float
    boundary_mass: float
    total_mass: float
    percentile: float = 1.0

    @property
    def bin_centers(self):
        return TWO_PI * (np.arange(self.n_bins) + 0.5) / self.n_bins


def rn_density_boundary(mu: PullbackMeasure, n_bins=1024, percentile=1.0, z=2.0) -> BoundaryDensity:
    """Histogram estimate of ``d mu / dm`` on uniform arcs.

    Each bin's half-width is ``z`` standard deviations of a binomial-style
    variance of the weighted atom count. The essential infimum is estimated
    by a low percentile of the bin densities, not by the minimum.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be positive")
    if n_bins > mu.n_samples / 16:
        raise ValueError(
            f"undersampled bins: {n_bins} bins for {mu.n_samples} samples (need <= n/16)"
        )
    mask = mu.boundary_mask
    locs = mu.locations[mask]
    w = mu.weights[mask]
    ang = np.mod(np.angle(locs), TWO_PI)
    idx = np.minimum((ang / TWO_PI * n_bins).astype(int), n_bins - 1)
    mass = np.bincount(idx, weights=w, minlength=n_bins)
    sq = np.bincount(idx, weights=w * w, minlength=n_bins)
    n = max(mu.n_samples, 1)
    var = np.maximum(sq - mass**2 / n, 0.0)
    half = z * n_bins * np.sqrt(var)
    dens = mass * n_bins
    est = float(np.percentile(dens, percentile))
    low = dens <= est
    hw = float(half[low].max()) if low.any() else float(half[np.argmin(dens)])
    return BoundaryDensity(
        n_bins, mass, dens, half, est, hw, float(mass.sum()), mu.total_mass, percentile
    )


def ess_inf_criterion(d: BoundaryDensity, policy: ThresholdPolicy | None = None) -> CriterionResult:
    """Three-valued verdict on whether the boundary density is essentially
    bounded away from zero (hysteresis band reported as inconclusive)."""
    policy = policy or ThresholdPolicy()
    t0 = time.perf_counter()
    mass = d.total_mass
    dp, df = policy.delta_pass * mass, policy.delta_fail * mass
    est, hw = d.ess_inf_estimate, d.ess_inf_half_width
    if mass > 0 and est - hw > dp:
        verdict = BOUNDED_BELOW
    elif mass == 0 or est + hw < df:
        verdict = NOT_BOUNDED_BELOW
    else:
        verdict = INCONCLUSIVE
    return CriterionResult(
        "ess-inf-density",
        max(est, 0.0),
        verdict,
        grid={"n_bins": d.n_bins, "percentile": d.percentile},
        seconds=time.perf_counter() - t0,
        details={
            "ess_inf_half_width": hw,
            "boundary_mass": d.boundary_mass,
            "total_mass": mass,
            "delta_pass": dp,
            "delta_fail": df,
            "min_bin_density": float(d.density.min()),
            "max_bin_density": float(d.density.max()),
        },
    )


# ---------------------------------------------------------------- Carleson boxes


def carleson_constant(mu: PullbackMeasure, n_boxes=1024) -> float:
    """``sup mu(S(I)) / m(I)`` over boxes ``S(I) = {z : z/|z| in I, 1-|z| <= m(I)}``
    for arcs of normalized length ``2^-j``, ``j = 0..log2(n_boxes)``, started at
    every multiple of half their length.
    """
    if mu.total_mass == 0:
        return 0.0
    jmax = int(np.log2(n_boxes))
    r = np.abs(mu.locations)
    ang = np.mod(np.angle(mu.locations), TWO_PI)
    best = 0.0
    for j in range(jmax + 1):
        ell = 2.0**-j
        sel = 1 - r <= ell
        nb = 2 ** (j + 1)
        idx = np.minimum((ang[sel] / TWO_PI * nb).astype(int), nb - 1)
        bins = np.bincount(idx, weights=mu.weights[sel], minlength=nb)
        boxes = bins + np.roll(bins, -1)
        best = max(best, float(boxes.max()) / ell)
    return best


# ---------------------------------------------------------------- Berezin


def _bergman_kernel_sq(w, z, alpha=0.0):
    d = 1 - abs(w) ** 2
    e = 2 + alpha
    return (alpha + 1) * d**e / np.abs(1 - np.conj(w) * z) ** (2 * e)


def berezin_transform(mu: PullbackMeasure, w, alpha=None):
    """``sum |k_w(location)|^2 weight`` with the normalized (weighted) Bergman
    kernel; equals ``||W k_w||^2`` for the Bergman pullback measure."""
    alpha = mu.alpha if alpha is None else alpha
    w = complex(w)
    if not abs(w) < 1:
        raise ValueError("Berezin transform needs |w| < 1")
    return float(_bergman_kernel_sq(w, mu.locations, alpha) @ mu.weights)


# ---------------------------------------------------------------- disk density / Luecking


@dataclass
class DiskDensity:
    """Density of a measure against ``(1-|z|^2)^alpha dA`` on polar cells.

    Cells are ``n_r`` bands of equal reference mass (in ``t = r^2``) times
    ``n_theta`` equal angles, so every cell has the same reference mass.
    """

    density: np.ndarray
    alpha: float = 0.0
    cell_mass: np.ndarray | None = None
    total_mass: float = 0.0
    t_edges: np.ndarray = field(init=False)

    def __post_init__(self):
        self.density = np.asarray(self.density, dtype=float)
        if self.density.ndim != 2:
            raise ValueError("density must be an (n_r, n_theta) array")
        if np.any(self.density < 0):
            raise ValueError("densities must be nonnegative")
        self.t_edges = _band_edges(self.n_r, self.alpha)
        if self.cell_mass is None:
            self.cell_mass = self.density * self.cell_ref
        if not self.total_mass:
            self.total_mass = float(self.cell_mass.sum())

    @property
    def n_r(self):
        return self.density.shape[0]

    @property
    def n_theta(self):
        return self.density.shape[1]

    @property
    def cell_ref(self):
        return 1.0 / ((self.alpha + 1) * self.n_r * self.n_theta)

    def band_diameters(self):
        r = np.sqrt(self.t_edges)
        dr = np.diff(r)
        arc = 2 * r[1:] * np.sin(np.pi / self.n_theta)
        return np.hypot(dr, arc), r

    @classmethod
    def from_measure(cls, mu: PullbackMeasure, n_r=128, n_theta=1024, alpha=None):
        alpha = mu.alpha if alpha is None else alpha
        edges = _band_edges(n_r, alpha)
        t = np.minimum(np.abs(mu.locations) ** 2, 1.0)
        bi = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, n_r - 1)
        ang = np.mod(np.angle(mu.locations), TWO_PI)
        ti = np.minimum((ang / TWO_PI * n_theta).astype(int), n_theta - 1)
        mass = np.bincount(bi * n_theta + ti, weights=mu.weights, minlength=n_r * n_theta)
        mass = mass.reshape(n_r, n_theta)
        ref = 1.0 / ((alpha + 1) * n_r * n_theta)
        return cls(mass / ref, alpha, mass, mu.total_mass)

    @classmethod
    def from_function(cls, g, n_r=128, n_theta=1024, alpha=0.0, sub=4):
        """Cell averages of a density function ``g(z)`` over ``sub x sub``
        equal-mass sub-points per cell."""
        tt, th, _ = _subpoints(_band_edges(n_r, alpha), alpha, np.arange(n_r), n_theta, sub)
        z = np.sqrt(tt)[:, :, None, None] * np.exp(1j * th)[None, None, :, :]
        # z has shape (n_r, sub, n_theta, sub)
        vals = np.asarray(g(z.reshape(-1)), dtype=float).reshape(z.shape)
        return cls(vals.mean(axis=(1, 3)), alpha)


def _band_edges(n_r, alpha):
    u = np.arange(n_r + 1) / n_r
    edges = 1 - (1 - u) ** (1 / (alpha + 1))
    edges[-1] = 1.0
    return edges


def _subpoints(edges, alpha, bands, n_theta, sub):
    """Equal-reference-mass sub-points: t values (len(bands), sub) and angles
    (n_theta, sub) at sub-cell midpoints."""
    # inverse of the reference CDF on each band
    a = (1 - edges[bands]) ** (alpha + 1)
    b = (1 - edges[bands + 1]) ** (alpha + 1)
    frac = (np.arange(sub) + 0.5) / sub
    tt = 1 - (a[:, None] + (b - a)[:, None] * frac[None, :]) ** (1 / (alpha + 1))
    th = TWO_PI * (np.arange(n_theta)[:, None] + frac[None, :]) / n_theta
    return tt, th, frac


def disc_area_fraction(dd: DiskDensity, rho, sub=8):
    """Reference-measure weights of the cells covered by the disc of radius
    ``rho`` centred at ``z = 1``: returns ``W`` of shape ``(n_r, n_theta)`` with
    ``W[i, k]`` the reference mass of ``cell(i, k) & D(1, rho)``, cell angles
    indexed relative to the disc centre (wrapping)."""
    n_r, n_t = dd.n_r, dd.n_theta
    r_edges = np.sqrt(dd.t_edges)
    bands = np.flatnonzero(r_edges[1:] > 1 - rho)
    th_max = np.arcsin(min(rho, 1.0)) if rho < 1 else np.pi / 2 + np.arcsin(min(rho - 1, 1.0))
    kmax = int(np.ceil(th_max / TWO_PI * n_t)) + 1
    ks = np.arange(-kmax, kmax) % n_t
    ks = np.unique(ks)
    tt, th_all, _ = _subpoints(dd.t_edges, dd.alpha, bands, n_t, sub)
    th = th_all[ks]
    z = np.sqrt(tt)[:, :, None, None] * np.exp(1j * th)[None, None, :, :]
    inside = np.abs(z - 1) < rho
    frac = inside.mean(axis=(1, 3))
    W = np.zeros((n_r, n_t))
    W[np.ix_(bands, ks)] = frac * dd.cell_ref
    return W


def disc_fractions(d: DiskDensity, masks, radii, n_centers=256, sub=8):
    """``A(D & S) / A(D & disk)`` for each cell mask S in ``masks`` and every
    disc ``D(exp(2 pi i j / n_centers), rho)``; shape ``(len(masks),
    len(radii), n_centers)``. One FFT correlation along the angle per mask."""
    if d.n_theta % n_centers:
        raise ValueError("n_centers must divide the number of angular cells")
    step = d.n_theta // n_centers
    weights = [disc_area_fraction(d, rho, sub) for rho in radii]
    fw = [np.conj(np.fft.fft(W, axis=1)) for W in weights]
    denom = [W.sum() for W in weights]
    fracs = np.empty((len(masks), len(radii), n_centers))
    for a, m in enumerate(masks):
        fm = np.fft.fft(np.asarray(m, dtype=float), axis=1)
        for b in range(len(radii)):
            corr = np.fft.ifft((fw[b] * fm).sum(axis=0)).real
            fracs[a, b] = corr[::step][:n_centers] / denom[b]
    return np.clip(fracs, 0.0, 1.0)


def luecking_check(
    d: DiskDensity,
    delta_grid=None,
    radii=None,
    n_centers=256,
    policy: ThresholdPolicy | None = None,
    sub=8,
) -> CriterionResult:
    """Search for ``(delta, C)`` with
    ``A(D & {g > delta}) >= C A(D & disk)`` for every disc D on the grid
    (centres ``exp(2 pi i j / n_centers)``, dyadic radii).

    Radii default to the dyadic ``2^-j`` (j <= 11) resolved by the cell grid:
    cells meeting a disc of radius rho must have diameter <= rho / 8.
    """
    policy = policy or ThresholdPolicy()
    t0 = time.perf_counter()
    if d.n_theta % n_centers:
        raise ValueError("n_centers must divide the number of angular cells")
    diam, r_edges = d.band_diameters()

    def resolved(rho):
        meets = r_edges[1:] > 1 - rho
        return diam[meets].max() <= rho / 8

    if radii is None:
        radii = [2.0**-j for j in range(12) if resolved(2.0**-j)]
        if not radii:
            raise ValueError("cell grid too coarse for any dyadic disc radius")
    else:
        radii = [float(r) for r in radii]
        bad = [r for r in radii if not resolved(r)]
        if bad:
            raise ValueError(
                f"resolution precondition violated: cells exceed radius/8 for radii {bad}"
            )
    mass = d.total_mass
    if delta_grid is None:
        delta_grid = np.logspace(-4, 0, 16) * (mass / _ref_total(d.alpha) if mass > 0 else 1.0)
    delta_grid = np.asarray(delta_grid, dtype=float)

    fracs = disc_fractions(d, [d.density > delta for delta in delta_grid], radii, n_centers, sub)
    inf_frac = fracs.min(axis=(1, 2))
    ib = int(np.argmax(inf_frac))
    best = float(inf_frac[ib])
    worst = np.unravel_index(np.argmin(fracs[ib]), fracs[ib].shape)
    if best >= policy.luecking_c_pass:
        verdict = BOUNDED_BELOW
    elif best < policy.luecking_c_fail:
        verdict = NOT_BOUNDED_BELOW
    else:
        verdict = INCONCLUSIVE
    return CriterionResult(
        "luecking",
        best,
        verdict,
        grid={
            "n_centers": n_centers,
            "radii": radii,
            "n_r": d.n_r,
            "n_theta": d.n_theta,
            "delta_grid": delta_grid.tolist(),
        },
        seconds=time.perf_counter() - t0,
        details={
            "certificate": {"delta": float(delta_grid[ib]), "inf_fraction": best},
            "worst_disc": {
                "radius": radii[worst[0]],
                "center_angle": TWO_PI * worst[1] / n_centers,
            },
            "inf_fraction_by_delta": inf_frac.tolist(),
            "alpha": d.alpha,
        },
    )


def _ref_total(alpha):
    return 1.0 / (alpha + 1)
