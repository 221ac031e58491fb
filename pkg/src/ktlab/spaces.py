"""Function spaces, reproducing kernels and the normalized test functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .analytic import BoundaryGrid, DiskGrid
from .quadrature import (
    QuadratureError,
    analytic_disk_norm2,
    bergman_moments,
    circle_mean,
    disk_mean,
    line_integral,
    plane_integral,
)

__all__ = [
    "FAMILIES",
    "SpaceSpec",
    "KernelHandle",
    "kernel_norm_hardy",
    "hardy_kernel_norm_exact",
    "eval_kernel",
    "eval_kernel_abs",
    "kernel_factors",
    "space_norm",
    "monomial_basis_coeff",
    "space_from_config",
]

FAMILIES = (
    "hardy-disk",
    "bergman-disk",
    "bergman-disk-weighted",
    "hardy-halfplane",
    "bergman-halfplane",
)

_CONFIG_NAMES = {
    "H2": ("hardy-disk", 2.0),
    "Hp": ("hardy-disk", None),
    "A2": ("bergman-disk", 2.0),
    "Ap": ("bergman-disk", None),
    "A2alpha": ("bergman-disk-weighted", 2.0),
    "H2+": ("hardy-halfplane", 2.0),
    "A2+": ("bergman-halfplane", 2.0),
}


@dataclass(frozen=True)
class SpaceSpec:
    family: str = "hardy-disk"
    p: float = 2.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown space family {self.family!r}")
        if not self.p >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not self.alpha > -1:
            raise ValueError(f"alpha must be > -1, got {self.alpha}")
        if self.family != "bergman-disk-weighted" and self.alpha != 0:
            raise ValueError("alpha is only meaningful for the weighted Bergman space")
        if self.family == "bergman-disk-weighted" and self.p != 2:
            raise ValueError("weighted Bergman spaces are supported for p = 2 only")
        if self.family.endswith("halfplane") and self.p != 2:
            raise NotImplementedError("half-plane spaces are implemented for p = 2 only")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def conjugate(self):
        if self.p == 1:
            raise ValueError("conjugate index undefined for p = 1")
        return self.p / (self.p - 1)

    @property
    def is_hardy(self):
        return self.family == "hardy-disk"

    @property
    def is_bergman(self):
        return self.family in ("bergman-disk", "bergman-disk-weighted")

    @property
    def on_disk(self):
        return not self.family.endswith("halfplane")

    @property
    def label(self):
        if self.family == "hardy-disk":
            return "H2" if self.p == 2 else f"H^{self.p:g}"
        if self.family == "bergman-disk":
            return "A2" if self.p == 2 else f"A^{self.p:g}"
        if self.family == "bergman-disk-weighted":
            return f"A2_alpha(alpha={self.alpha:g})"
        return "H2(C+)" if self.family == "hardy-halfplane" else "A2(C+)"

    def to_dict(self):
        return {"family": self.family, "p": self.p, "alpha": self.alpha, "label": self.label}


def space_from_config(name, p=None, alpha=None) -> SpaceSpec:
    """``"H2" | "Hp" | "A2" | "Ap" | "A2alpha" | "H2+" | "A2+"`` to a SpaceSpec."""
    if name not in _CONFIG_NAMES:
        raise ValueError(f"unknown space {name!r}; expected one of {sorted(_CONFIG_NAMES)}")
    family, fixed_p = _CONFIG_NAMES[name]
    if fixed_p is None:
        if p is None:
            raise ValueError(f"space {name} needs an exponent p")
        fixed_p = p
    elif p is not None and float(p) != fixed_p:
        raise ValueError(f"space {name} fixes p = {fixed_p:g}")
    if family == "bergman-disk-weighted":
        if alpha is None:
            raise ValueError("space A2alpha needs alpha")
        return SpaceSpec(family, fixed_p, alpha)
    return SpaceSpec(family, fixed_p)


def kernel_norm_hardy(lam, p):
    """Norm of point evaluation at ``lam`` on H^{p'}: ``(1-|lam|^2)^(-1/p')``.

    Equals ``||k_lam||_2`` when p = 2; for other p it is comparable to
    ``||k_lam||_p`` up to constants independent of ``lam``.
    """
    if p <= 1:
        raise ValueError("kernel_norm_hardy needs p > 1 (duality argument)")
    if not abs(lam) < 1:
        raise ValueError("lambda must lie in the open disk")
    pc = p / (p - 1)
    return (1 - abs(lam) ** 2) ** (-1 / pc)


def hardy_kernel_norm_exact(lam, p):
    """``||k_lam||_{H^p} = 2F1(p/2, p/2; 1; |lam|^2)^(1/p)``."""
    x = np.abs(lam) ** 2
    return special.hyp2f1(p / 2, p / 2, 1.0, x) ** (1 / p)


@dataclass(frozen=True)
class KernelHandle:
    """A reproducing kernel or test function of ``space`` at ``point``."""

    space: SpaceSpec
    point: complex
    normalized: bool = True
    kind: str = "reproducing-kernel"

    def __post_init__(self):
        if self.kind not in ("reproducing-kernel", "test-function"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        pt = complex(self.point)
        if self.space.on_disk and not abs(pt) < 1:
            raise ValueError("kernel point must lie in the open disk")
        if not self.space.on_disk and not pt.real > 0:
            raise ValueError("kernel point must lie in the right half-plane")
        if self.kind == "reproducing-kernel" and self.space.family == "bergman-disk" and self.space.p != 2:
            raise NotImplementedError("A^p reproducing kernels are only provided for p = 2")
        object.__setattr__(self, "point", pt)

    def __call__(self, z):
        return eval_kernel(self, z)


def kernel_factors(handle: KernelHandle):
    """``(coef, e)`` with the kernel equal to ``coef * base(z)^(-e)``, where
    ``base = 1 - conj(w) z`` on the disk and ``z + conj(w)`` on the half-plane."""
    sp, w, kind = handle.space, handle.point, handle.kind
    p = sp.p
    norm = handle.normalized
    d = 1 - abs(w) ** 2 if sp.on_disk else w.real
    fam = sp.family
    if fam == "hardy-disk":
        if kind == "reproducing-kernel":
            return (1 / hardy_kernel_norm_exact(w, p) if norm else 1.0), 1.0
        return (d ** (1 / p) if norm else 1.0), 2 / p
    if fam == "bergman-disk":
        if kind == "reproducing-kernel":
            return (d if norm else 1.0), 2.0
        return (d ** (2 / p) if norm else 1.0), 4 / p
    if fam == "bergman-disk-weighted":
        a = sp.alpha
        e = 2 + a
        if kind == "reproducing-kernel":
            return (np.sqrt(a + 1) * d ** (e / 2) if norm else a + 1), e
        return (((a + 1) * d**e) ** (1 / p) if norm else 1.0), 2 * e / p
    if fam == "hardy-halfplane":
        return (np.sqrt(d / np.pi) if norm else 1 / (2 * np.pi)), 1.0
    return (2 * d / np.sqrt(np.pi) if norm else 1 / np.pi), 2.0


def _kernel_base(handle, z):
    w = handle.point
    base = 1 - np.conj(w) * z if handle.space.on_disk else z + np.conj(w)
    if np.any(base == 0):
        raise ZeroDivisionError("kernel singularity hit")
    return base


def eval_kernel(handle: KernelHandle, z):
    """Evaluate a kernel handle; fractional powers use the principal branch of
    ``(1 - conj(w) z)`` which has positive real part on the closed disk."""
    z = np.asarray(z, dtype=complex)
    coef, e = kernel_factors(handle)
    base = _kernel_base(handle, z)
    out = coef * (base**-1 if e == 1 else base ** (-e))
    return out if out.ndim else complex(out)


def eval_kernel_abs(handle: KernelHandle, z, q=1.0):
    """``|kernel(z)|^q`` using real powers only (cheaper than ``abs(eval_kernel)``)."""
    z = np.asarray(z, dtype=complex)
    coef, e = kernel_factors(handle)
    out = coef**q * np.abs(_kernel_base(handle, z)) ** (-e * q)
    return out if out.ndim else float(out)


def space_norm(f, space: SpaceSpec, grid=None, **kw):
    """Norm of ``f`` in ``space``.

    ``f`` may be a BoundaryGrid (Hardy), an array sampled on a DiskGrid passed
    as ``grid`` (Bergman), or a callable, in which case adaptive quadrature is
    used.
    """
    p = space.p
    if isinstance(f, BoundaryGrid):
        if not space.is_hardy:
            raise ValueError(f"boundary samples cannot be normed in {space.label}")
        return float(np.mean(np.abs(f.values) ** p) ** (1 / p))
    if grid is not None:
        if not isinstance(grid, DiskGrid):
            raise TypeError("grid must be a DiskGrid")
        if not space.is_bergman:
            raise ValueError(f"disk samples cannot be normed in {space.label}")
        if abs(grid.alpha - space.alpha) > 0:
            raise ValueError("disk grid weight does not match the space's alpha")
        vals = np.asarray(f)
        if vals.shape != grid.z.shape:
            raise ValueError("sample array does not match the disk grid")
        return float((np.abs(vals) ** p @ grid.w) ** (1 / p))
    if not callable(f):
        raise TypeError("f must be a BoundaryGrid, disk samples or a callable")
    if space.is_hardy:
        val = circle_mean(lambda t: np.abs(f(np.exp(1j * t))) ** p, **kw)
    elif space.is_bergman:
        val = None
        if p == 2 and not kw:
            try:
                val = analytic_disk_norm2(f, alpha=space.alpha)
            except QuadratureError:
                val = None  # not analytic across the circle; fall back
        if val is None:
            val = disk_mean(lambda z: np.abs(f(z)) ** p, alpha=space.alpha, **kw)
    elif space.family == "hardy-halfplane":
        val = line_integral(lambda s: np.abs(f(s)) ** 2, **kw)
    else:
        val = plane_integral(f, **kw)
    return float(np.real(val) ** (1 / p))


def monomial_basis_coeff(space: SpaceSpec, k: int) -> float:
    """``c_k`` with ``{c_k z^k}`` orthonormal in the p = 2 disk spaces."""
    if space.p != 2 or not space.on_disk:
        raise NotImplementedError("orthonormal monomial bases exist for p = 2 disk spaces only")
    if k < 0:
        raise ValueError("k must be >= 0")
    if space.is_hardy:
        return 1.0
    if space.family == "bergman-disk":
        return float(np.sqrt(k + 1))
    return float(bergman_moments(k + 1, space.alpha)[k] ** -0.5)
