"""Coefficient-space representation of discrete solenoidal fields.

The state space is the set of divergence-free, zero-mean trigonometric
polynomials inside the 2/3-rule band.  A field is stored as one complex number
per retained wavenumber: its velocity amplitude along ``e = (k2, -k1)/|k|``,
scaled so that the Euclidean inner product of coefficient vectors equals the
discrete L2 inner product of the fields.  Quadratic products of band-limited
fields are then computed without aliasing, so the linearized operator and its
adjoint formula are exact transposes of each other up to rounding.
"""

from __future__ import annotations

import numpy as np

from .spectral import Grid, GridMismatch, SolenoidalField, VectorField, fft2, ifft2


class SolenoidalBasis:
    """Maps between fields on ``grid`` and coefficient vectors."""

    def __init__(self, grid: Grid):
        self.grid = grid
        mask = grid.dealias_mask & (grid.ksq > 0)
        self.mask = mask
        self.k1 = grid.k1[mask]
        self.k2 = grid.k2[mask]
        self.ksq = grid.ksq[mask]
        kabs = np.sqrt(self.ksq)
        self.kabs = kabs
        self.e1 = self.k2 / kabs
        self.e2 = -self.k1 / kabs
        self.scale = grid.d / grid.n**2
        self.size = int(mask.sum())
        # position of -k for every retained k (the band is symmetric)
        n = grid.n
        pos = -np.ones((n, n), dtype=np.int64)
        pos[mask] = np.arange(self.size)
        i, j = np.nonzero(mask)
        self.neg = pos[(-i) % n, (-j) % n]

    def conj_vec(self, vec: np.ndarray) -> np.ndarray:
        """Coefficients of the complex-conjugate field."""
        # u_hat'(k) = conj(u_hat(-k)) and e(-k) = -e(k)
        return -np.conj(vec[..., self.neg])

    def coeffs(self, values: np.ndarray) -> np.ndarray:
        """Project physical samples ``(2, n, n)`` onto the basis."""
        uh = fft2(values)
        return (self.e1 * uh[0][self.mask] + self.e2 * uh[1][self.mask]) * self.scale

    def coeffs_hat(self, uh: np.ndarray) -> np.ndarray:
        return (self.e1 * uh[0][self.mask] + self.e2 * uh[1][self.mask]) * self.scale

    def spectrum(self, vec: np.ndarray) -> np.ndarray:
        n = self.grid.n
        uh = np.zeros((2, n, n), dtype=complex)
        c = vec / self.scale
        uh[0][self.mask] = c * self.e1
        uh[1][self.mask] = c * self.e2
        return uh

    def values(self, vec: np.ndarray) -> np.ndarray:
        return ifft2(self.spectrum(vec))

    def field(self, vec: np.ndarray, real: bool = False) -> SolenoidalField:
        vals = self.values(vec)
        if real:
            vals = vals.real
        return SolenoidalField(self.grid, vals)

    def vec(self, u: VectorField) -> np.ndarray:
        if u.grid != self.grid:
            raise GridMismatch(f"{u.grid} vs {self.grid}")
        return self.coeffs(u.values)

    def stream_hat(self, vec: np.ndarray) -> np.ndarray:
        """Fourier coefficients of ``s`` with ``grad_perp(s)`` equal to the field."""
        n = self.grid.n
        sh = np.zeros((n, n), dtype=complex)
        # u_hat = i |k| s_hat e
        sh[self.mask] = vec / self.scale / (1j * self.kabs)
        return sh

    def rot_hat(self, vec: np.ndarray) -> np.ndarray:
        n = self.grid.n
        rh = np.zeros((n, n), dtype=complex)
        # rot = d2 u1 - d1 u2  ->  i (k2 e1 - k1 e2) c = i |k| c
        rh[self.mask] = 1j * self.kabs * vec / self.scale
        return rh


class OseenEngine:
    """Matrix-free ``A w = nu lap w - mu w - P div(U (x) w + w (x) U)`` on coefficients.

    ``U`` is band-limited onto the basis at construction.  ``shift`` is
    subtracted in :meth:`matvec` (``A - shift``) and its conjugate in
    :meth:`rmatvec`.
    """

    def __init__(self, basis: SolenoidalBasis, base_values: np.ndarray, nu: float, mu: float,
                 shift: complex = 0.0):
        self.basis = basis
        self.grid = basis.grid
        self.nu = float(nu)
        self.mu = float(mu)
        self.shift = complex(shift)
        bvec = basis.coeffs(np.asarray(base_values))
        self.base_vec = bvec
        self.U = basis.values(bvec).real
        self.has_flow = bool(np.any(bvec != 0))
        self.diag = -self.nu * basis.ksq - self.mu
        self.matvecs = 0

    @property
    def size(self) -> int:
        return self.basis.size

    def convective(self, vec: np.ndarray) -> np.ndarray:
        """Coefficients of ``P div(U (x) w + w (x) U)``."""
        if not self.has_flow:
            return np.zeros_like(vec, dtype=complex)
        b = self.basis
        g = self.grid
        w = b.values(vec)
        U1, U2 = self.U
        t = np.stack([2 * U1 * w[0], U1 * w[1] + w[0] * U2, 2 * U2 * w[1]])
        th = fft2(t)
        k1, k2 = g.k1, g.k2
        d1 = 1j * (k1 * th[0] + k2 * th[1])
        d2 = 1j * (k1 * th[1] + k2 * th[2])
        return b.coeffs_hat((d1, d2))

    def adjoint_convective(self, vec: np.ndarray) -> np.ndarray:
        """Coefficients of ``P(2 (U . grad) v - U_perp rot v)``, ``U_perp = (U2, -U1)``."""
        if not self.has_flow:
            return np.zeros_like(vec, dtype=complex)
        b = self.basis
        g = self.grid
        vh = b.spectrum(vec)
        k1, k2 = g.k1, g.k2
        grads = ifft2(np.stack([1j * k1 * vh[0], 1j * k2 * vh[0], 1j * k1 * vh[1], 1j * k2 * vh[1]]))
        U1, U2 = self.U
        adv1 = U1 * grads[0] + U2 * grads[1]
        adv2 = U1 * grads[2] + U2 * grads[3]
        r = grads[1] - grads[2]
        f = np.stack([2 * adv1 - U2 * r, 2 * adv2 + U1 * r])
        return b.coeffs(f)

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        self.matvecs += 1
        return (self.diag - self.shift) * vec - self.convective(vec)

    def rmatvec(self, vec: np.ndarray) -> np.ndarray:
        self.matvecs += 1
        return (self.diag - np.conj(self.shift)) * vec + self.adjoint_convective(vec)

    def diag_inverse(self, sigma: complex, adjoint: bool = False):
        """Diagonal preconditioner ``(nu lap - mu - shift - sigma)^-1``."""
        s = self.shift + sigma
        if adjoint:
            s = np.conj(self.shift) + sigma
        d = self.diag - s
        if np.min(np.abs(d)) < 1e-14:
            return None
        return 1.0 / d

    def dense(self, adjoint: bool = False) -> np.ndarray:
        """Explicit matrix, column by column (coarse grids only)."""
        n = self.size
        out = np.empty((n, n), dtype=complex)
        e = np.zeros(n, dtype=complex)
        op = self.rmatvec if adjoint else self.matvec
        for j in range(n):
            e[j] = 1.0
            out[:, j] = op(e)
            e[j] = 0.0
        return out
