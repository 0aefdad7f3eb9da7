"""Periodic pseudo-spectral calculus on a square box.

Grid layout: ``values[i, j]`` samples the point ``x = (i*d/n, j*d/n)``, so axis 0
is x1 and axis 1 is x2.  Fields may carry complex samples (eigenfields); every
operator here is real-linear and maps real input to real output.

Conventions::

    grad_perp(s) = (d2 s, -d1 s)
    rot(u)       = d2 u1 - d1 u2
    rot(grad_perp(s)) = laplacian(s)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "ScalarField",
    "VectorField",
    "SolenoidalField",
    "Weight",
    "GridMismatch",
    "SingularShift",
    "fft2",
    "ifft2",
    "inner",
    "norm",
    "max_norm",
    "leray_project",
    "leray_kernel_eval",
    "invert_helmholtz",
    "grad_perp",
    "grad",
    "rot",
    "div",
    "laplacian",
    "dealias",
    "weighted_norm",
    "weight_inequality_check",
    "lattice_weight_sum",
    "solenoidal",
]


class GridMismatch(ValueError):
    """Binary operation on fields living on different grids."""


class SingularShift(ArithmeticError):
    """Shift hits (or nearly hits) the spectrum of the discrete Laplacian."""


def fft2(a: np.ndarray) -> np.ndarray:
    return sfft.fft2(a, axes=(-2, -1), workers=-1)


def ifft2(a: np.ndarray) -> np.ndarray:
    return sfft.ifft2(a, axes=(-2, -1), workers=-1)


@dataclass(frozen=True)
class Grid:
    """Uniform ``n x n`` grid on the periodic box ``[0, d)^2``."""

    n: int
    d: float

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 32 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 32, got {n!r}")
        if not (self.d > 0 and math.isfinite(self.d)):
            raise ValueError(f"box side must be positive, got {self.d!r}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "d", float(self.d))

    @property
    def dx(self) -> float:
        return self.d / self.n

    @property
    def cell_area(self) -> float:
        return self.dx**2

    @property
    def area(self) -> float:
        return self.d**2

    @cached_property
    def index(self) -> np.ndarray:
        """Integer wavenumber index per axis, fft ordering, in [-n/2, n/2)."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)

    @cached_property
    def k(self) -> np.ndarray:
        return (2 * np.pi / self.d) * self.index.astype(float)

    @cached_property
    def k1(self) -> np.ndarray:
        return self.k[:, None] * np.ones((1, self.n))

    @cached_property
    def k2(self) -> np.ndarray:
        return np.ones((self.n, 1)) * self.k[None, :]

    @cached_property
    def ksq(self) -> np.ndarray:
        return self.k1**2 + self.k2**2

    @cached_property
    def _kd(self) -> np.ndarray:
        # first-derivative wavenumbers: Nyquist entry zeroed (odd derivative of a
        # real cosine at the Nyquist frequency vanishes on the grid)
        kd = self.k.copy()
        kd[self.n // 2] = 0.0
        return kd

    @cached_property
    def kd1(self) -> np.ndarray:
        return self._kd[:, None] * np.ones((1, self.n))

    @cached_property
    def kd2(self) -> np.ndarray:
        return np.ones((self.n, 1)) * self._kd[None, :]

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Square 2/3-rule mask: keep modes with ``|m1|, |m2| < n/3``."""
        keep = 3 * np.abs(self.index) < self.n
        return keep[:, None] & keep[None, :]

    @cached_property
    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")

    def periodic_offset(self, center) -> tuple[np.ndarray, np.ndarray]:
        """Minimum-image displacement ``x - center`` for every grid point."""
        x1, x2 = self.coords
        d = self.d
        z1 = (x1 - center[0] + d / 2) % d - d / 2
        z2 = (x2 - center[1] + d / 2) % d - d / 2
        return z1, z2

    def periodic_distance(self, center) -> np.ndarray:
        z1, z2 = self.periodic_offset(center)
        return np.hypot(z1, z2)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    if not np.isrealobj(a) and not np.iscomplexobj(a):
        raise TypeError("field samples must be numeric")
    if a.dtype.kind in "iub":
        a = a.astype(float)
    a.flags.writeable = False
    return a


class ScalarField:
    """Samples of a scalar on a :class:`Grid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        values = _frozen(values)
        if values.shape != (grid.n, grid.n):
            raise ValueError(f"expected shape {(grid.n, grid.n)}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("scalar field has non-finite samples")
        self.grid = grid
        self.values = values

    def _check(self, other):
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, ScalarField):
            self._check(c)
            return ScalarField(self.grid, self.values * c.values)
        return ScalarField(self.grid, c * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def __repr__(self):
        return f"ScalarField(n={self.grid.n}, d={self.grid.d})"


class VectorField:
    """Two-component field; ``values`` has shape ``(2, n, n)``."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        values = _frozen(values)
        if values.shape != (2, grid.n, grid.n):
            raise ValueError(f"expected shape {(2, grid.n, grid.n)}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("vector field has non-finite samples")
        self.grid = grid
        self.values = values

    @classmethod
    def from_components(cls, u1, u2):
        if isinstance(u1, ScalarField):
            if u1.grid != u2.grid:
                raise GridMismatch(f"{u1.grid} vs {u2.grid}")
            return cls(u1.grid, np.stack([u1.values, u2.values]))
        raise TypeError("components must be ScalarField instances")

    @classmethod
    def zeros(cls, grid: Grid, dtype=float):
        return cls(grid, np.zeros((2, grid.n, grid.n), dtype=dtype))

    @property
    def u1(self) -> ScalarField:
        return ScalarField(self.grid, self.values[0])

    @property
    def u2(self) -> ScalarField:
        return ScalarField(self.grid, self.values[1])

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def _check(self, other):
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check(other)
        return VectorField(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return VectorField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return VectorField(self.grid, c * self.values)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return VectorField(self.grid, self.values / c)

    def __neg__(self):
        return VectorField(self.grid, -self.values)

    def translated(self, shift) -> "VectorField":
        """Periodic translation by ``shift`` (any real vector), done spectrally."""
        return type(self)._rewrap(self, _translate(self.grid, self.values, shift))

    @staticmethod
    def _rewrap(template, values):
        return VectorField(template.grid, values)

    def __repr__(self):
        kind = "complex" if self.is_complex else "real"
        return f"{type(self).__name__}(n={self.grid.n}, d={self.grid.d}, {kind})"


class SolenoidalField(VectorField):
    """Vector field certified divergence-free with zero spatial mean.

    ``div_residual`` is the spectral max-norm of the divergence at construction.
    ``reference_scale`` lets a producer certify against the magnitude of its
    input when the output is mostly cancellation (e.g. projecting a gradient).
    """

    __slots__ = ("div_residual",)

    #: relative divergence tolerance enforced at construction
    DIV_TOL = 1e-10

    def __init__(self, grid: Grid, values, reference_scale: float = 0.0):
        super().__init__(grid, values)
        scale = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        scale = max(scale, float(reference_scale))
        uh = fft2(self.values)
        dh = 1j * (grid.kd1 * uh[0] + grid.kd2 * uh[1])
        self.div_residual = float(np.max(np.abs(ifft2(dh))))
        # scale the mean check by n^2: fft of the k=0 mode sums all samples
        mean = float(np.max(np.abs(uh[:, 0, 0]))) / grid.n**2
        tol = self.DIV_TOL * max(scale, 1e-300)
        # the divergence carries one derivative, so compare against k_max * |u|
        kmax = float(np.sqrt(np.max(grid.ksq)))
        if self.div_residual > tol * max(1.0, kmax) or mean > tol:
            raise ValueError(
                f"field is not solenoidal: div={self.div_residual:.3e}, "
                f"mean={mean:.3e}, scale={scale:.3e}"
            )

    @staticmethod
    def _rewrap(template, values):
        return SolenoidalField(template.grid, values)

    def plain(self) -> VectorField:
        return VectorField(self.grid, self.values)

    # sums fall back to plain VectorField: cancellation can inflate the relative
    # divergence past the certificate tolerance

    def __mul__(self, c):
        return SolenoidalField(self.grid, c * self.values)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return SolenoidalField(self.grid, self.values / c)

    def __neg__(self):
        return SolenoidalField(self.grid, -self.values)


def solenoidal(u: VectorField) -> SolenoidalField:
    """Certify ``u`` as solenoidal without projecting (raises if it is not)."""
    if isinstance(u, SolenoidalField):
        return u
    return SolenoidalField(u.grid, u.values)


def _translate(grid: Grid, values: np.ndarray, shift) -> np.ndarray:
    ph = np.exp(-1j * (grid.k1 * shift[0] + grid.k2 * shift[1]))
    # the Nyquist rows carry a real cosine; only integer-cell shifts keep them exact
    out = ifft2(fft2(values) * ph)
    return out.real if np.isrealobj(values) else out


def _real_if(like: np.ndarray, a: np.ndarray) -> np.ndarray:
    return a.real if np.isrealobj(like) else a


def inner(u, v) -> complex:
    """Discrete L2 product ``sum u . conj(v) dA`` (linear in the first slot)."""
    if u.grid != v.grid:
        raise GridMismatch(f"{u.grid} vs {v.grid}")
    val = np.vdot(v.values, u.values) * u.grid.cell_area
    if np.isrealobj(u.values) and np.isrealobj(v.values):
        return float(val.real)
    return complex(val)


def norm(u) -> float:
    return float(np.sqrt(np.sum(np.abs(u.values) ** 2) * u.grid.cell_area))


def max_norm(u) -> float:
    return float(np.max(np.abs(u.values)))


def leray_project(u: VectorField) -> SolenoidalField:
    """Project onto divergence-free, zero-mean fields (symbol ``I - k k^T/|k|^2``)."""
    g = u.grid
    uh = fft2(u.values)
    k1, k2 = g.kd1, g.kd2
    kk = k1**2 + k2**2
    with np.errstate(divide="ignore", invalid="ignore"):
        proj = np.where(kk > 0, (k1 * uh[0] + k2 * uh[1]) / kk, 0.0)
    out = np.stack([uh[0] - k1 * proj, uh[1] - k2 * proj])
    out[:, kk == 0] = 0.0
    ref = float(np.max(np.abs(u.values))) if u.values.size else 0.0
    return SolenoidalField(g, _real_if(u.values, ifft2(out)), reference_scale=ref)


def leray_kernel_eval(z) -> np.ndarray:
    """Off-diagonal (non-delta) part of the planar Leray kernel at ``z != 0``.

    ``(2 z z^T - |z|^2 I) / (2 pi |z|^4)``; the delta part ``I/2`` is omitted.
    """
    z1, z2 = float(z[0]), float(z[1])
    r2 = z1 * z1 + z2 * z2
    if r2 == 0.0:
        raise ValueError("Leray kernel is singular at z = 0")
    c = 1.0 / (2 * np.pi * r2 * r2)
    return c * np.array([[z1 * z1 - z2 * z2, 2 * z1 * z2], [2 * z1 * z2, z2 * z2 - z1 * z1]])


def invert_helmholtz(g: VectorField, shift: complex) -> VectorField:
    """Return ``w`` with ``(laplacian - shift) w = g``, diagonally in Fourier space.

    Raises :class:`SingularShift` when ``shift`` lies within 1e-14 of ``-|k|^2``
    for a mode that the right-hand side excites.
    """
    grid = g.grid
    sym = -grid.ksq - shift
    gh = fft2(g.values)
    small = np.abs(sym) < 1e-14
    if np.any(small):
        scale = max(float(np.max(np.abs(gh))), 1e-300)
        if np.any(np.abs(gh[:, small]) > 1e-12 * scale):
            raise SingularShift(f"shift {shift!r} hits the Laplacian spectrum")
    with np.errstate(divide="ignore", invalid="ignore"):
        wh = np.where(small, 0.0, gh / np.where(small, 1.0, sym))
    vals = ifft2(wh)
    if np.isrealobj(g.values) and np.imag(shift) == 0:
        vals = vals.real
    return VectorField(grid, vals)


def grad_perp(s: ScalarField) -> SolenoidalField:
    g = s.grid
    sh = fft2(s.values)
    out = np.stack([1j * g.kd2 * sh, -1j * g.kd1 * sh])
    return SolenoidalField(g, _real_if(s.values, ifft2(out)))


def grad(s: ScalarField) -> VectorField:
    g = s.grid
    sh = fft2(s.values)
    out = np.stack([1j * g.kd1 * sh, 1j * g.kd2 * sh])
    return VectorField(g, _real_if(s.values, ifft2(out)))


def rot(u: VectorField) -> ScalarField:
    g = u.grid
    uh = fft2(u.values)
    out = 1j * g.kd2 * uh[0] - 1j * g.kd1 * uh[1]
    return ScalarField(g, _real_if(u.values, ifft2(out)))


def div(u: VectorField) -> ScalarField:
    g = u.grid
    uh = fft2(u.values)
    out = 1j * g.kd1 * uh[0] + 1j * g.kd2 * uh[1]
    return ScalarField(g, _real_if(u.values, ifft2(out)))


def laplacian(f):
    g = f.grid
    out = ifft2(-g.ksq * fft2(f.values))
    out = _real_if(f.values, out)
    if isinstance(f, ScalarField):
        return ScalarField(g, out)
    return type(f)._rewrap(f, out) if isinstance(f, VectorField) else out


def dealias(f):
    """Zero every Fourier mode outside the 2/3-rule band."""
    g = f.grid
    out = _real_if(f.values, ifft2(fft2(f.values) * g.dealias_mask))
    if isinstance(f, ScalarField):
        return ScalarField(g, out)
    return type(f)._rewrap(f, out)


@dataclass(frozen=True)
class Weight:
    """Algebraic weight ``(1 + |x - center|)^(-p)`` with periodic distance."""

    center: tuple[float, float] = (0.0, 0.0)
    p: float = 3.0

    def __post_init__(self):
        if not self.p > 2:
            raise ValueError("weight exponent must exceed 2")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def evaluate(self, grid: Grid) -> np.ndarray:
        return (1.0 + grid.periodic_distance(self.center)) ** (-self.p)

    def planar(self, x) -> float:
        """Non-periodic value at a point of the plane."""
        dx = np.subtract(x, self.center)
        return float((1.0 + np.hypot(dx[..., 0], dx[..., 1])) ** (-self.p))


def weighted_norm(u: VectorField, w: Weight) -> float:
    th = w.evaluate(u.grid)
    mag2 = np.sum(np.abs(u.values) ** 2, axis=0)
    return float(np.sqrt(np.sum(mag2 * th) * u.grid.cell_area))


def _theta(x, p=3.0):
    x = np.asarray(x, dtype=float)
    return (1.0 + np.hypot(x[..., 0], x[..., 1])) ** (-p)


def weight_inequality_check(x, y, p: float = 3.0):
    """Check ``theta(x) theta(y) <= 4 theta(x - y) (theta(x) + theta(y))`` on the plane.

    Accepts single points or stacked arrays of points (last axis of length 2);
    returns a bool or a boolean array.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    tx, ty, txy = _theta(x, p), _theta(y, p), _theta(x - y, p)
    lhs = tx * ty
    rhs = 4.0 * txy * (tx + ty)
    # relative slack for rounding; the inequality is sharp only in degenerate limits
    ok = lhs <= rhs * (1 + 1e-12)
    return bool(ok) if np.ndim(ok) == 0 else ok


def lattice_weight_sum(L: float, cutoff_radius: int, p: float = 3.0, samples: int = 65):
    """Truncated lattice sums of the planar weight over ``L Z^2``.

    Returns ``(sum_all, sum_nonzero)``: the maximum over a sampled fundamental
    cell of ``sum_{|m|<=R} theta(x - L m)``, and ``sum_{0<|m|<=R} theta(L m)``.
    ``|m|`` is the max-norm of the integer vector.
    """
    if not L > 0:
        raise ValueError("lattice spacing must be positive")
    if cutoff_radius < 8:
        raise ValueError("cutoff_radius must be at least 8")
    R = int(cutoff_radius)
    m = np.arange(-R, R + 1, dtype=float)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    nodes = L * np.stack([m1.ravel(), m2.ravel()], axis=-1)
    nonzero = np.any(nodes != 0, axis=1)
    sum_nonzero = float(np.sum(_theta(nodes[nonzero], p)))
    # by symmetry the maximum over the cell is attained in [0, L/2]^2
    s = np.linspace(0.0, L / 2, samples)
    best = 0.0
    for a in s:
        pts = np.stack([np.full_like(s, a), s], axis=-1)
        tot = _theta(pts[:, None, :] - nodes[None, :, :], p).sum(axis=1)
        best = max(best, float(tot.max()))
    return best, sum_nonzero
