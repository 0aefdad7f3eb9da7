"""Linearized (Oseen) operator, its adjoint, spectral projectors and cut-off frames."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .discrete import OseenEngine, SolenoidalBasis
from .krylov import NoConvergence, SolveInfo, gmres
from .spectral import (
    Grid,
    GridMismatch,
    ScalarField,
    SolenoidalField,
    VectorField,
    fft2,
    ifft2,
    inner,
    norm,
)

#: cut-off plateau and support radii, in units of the cut length
ALPHA = 0.4
BETA = 0.8


class CutoffTooLarge(ValueError):
    pass


_BASES: dict = {}


def basis_for(grid: Grid) -> SolenoidalBasis:
    """Shared coefficient basis per grid."""
    b = _BASES.get(grid)
    if b is None:
        if len(_BASES) > 8:
            _BASES.clear()
        b = _BASES[grid] = SolenoidalBasis(grid)
    return b


@dataclass(frozen=True, eq=False)
class OseenParams:
    """Linearization about ``base_flow``; ``shift`` is subtracted (``A - shift``)."""

    base_flow: VectorField
    nu: float
    mu: float = 0.0
    shift: complex = 0.0

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("viscosity must be positive")
        if self.mu < 0:
            raise ValueError("Ekman coefficient must be non-negative")
        if not np.isfinite(complex(self.shift)):
            raise ValueError("shift must be finite")

    @property
    def grid(self) -> Grid:
        return self.base_flow.grid

    @cached_property
    def basis(self) -> SolenoidalBasis:
        return basis_for(self.grid)

    @cached_property
    def engine(self) -> OseenEngine:
        return OseenEngine(self.basis, self.base_flow.values, self.nu, self.mu, self.shift)

    def shifted(self, shift: complex) -> "OseenParams":
        return OseenParams(self.base_flow, self.nu, self.mu, complex(shift))

    def vec(self, w: VectorField) -> np.ndarray:
        if w.grid != self.grid:
            raise GridMismatch(f"{w.grid} vs {self.grid}")
        return self.basis.vec(w)

    def field(self, vec: np.ndarray, real: bool = False) -> SolenoidalField:
        return self.basis.field(vec, real=real)


def apply_linearization(p: OseenParams, w: VectorField) -> SolenoidalField:
    """``(A - shift) w`` with ``A w = nu lap w - mu w - P div(U (x) w + w (x) U)``."""
    out = p.engine.matvec(p.vec(w))
    return p.field(out, real=not w.is_complex and p.shift.imag == 0)


def apply_adjoint(p: OseenParams, v: VectorField) -> SolenoidalField:
    """``(A* - conj(shift)) v`` with ``A* v = nu lap v - mu v + P(2 (U.grad) v - U_perp rot v)``."""
    out = p.engine.rmatvec(p.vec(v))
    return p.field(out, real=not v.is_complex and p.shift.imag == 0)


class RankProjector:
    """``w -> sum_j <w, psi_j> phi_j`` on coefficient vectors.

    Rows of ``phis`` and ``psis`` are coefficient vectors; any scalar
    normalizer is folded into ``phis``.
    """

    def __init__(self, phis: np.ndarray, psis: np.ndarray):
        self.phis = np.atleast_2d(np.asarray(phis, dtype=complex))
        self.psis = np.atleast_2d(np.asarray(psis, dtype=complex))

    @property
    def rank(self) -> int:
        return self.phis.shape[0]

    def coefficients(self, vec: np.ndarray) -> np.ndarray:
        return self.psis.conj() @ vec

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.coefficients(vec) @ self.phis

    def complement(self, vec: np.ndarray) -> np.ndarray:
        return vec - self.apply(vec)


@dataclass(eq=False)
class SpectralPair:
    """Eigenvalue with direct, adjoint and un-projected adjoint eigenfields.

    Normalized so that ``<phi, psi> = 1``; ``psi = P psi_tilde``.
    """

    lam: complex
    phi: SolenoidalField
    psi: SolenoidalField
    psi_tilde: VectorField
    residuals: tuple[float, float]
    center: tuple[float, float] = (0.0, 0.0)
    meta: dict = field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    def normalization(self) -> complex:
        return inner(self.phi, self.psi)

    def projector(self) -> RankProjector:
        b = basis_for(self.grid)
        return RankProjector(b.vec(self.phi), b.vec(self.psi))

    def metadata(self) -> dict:
        return {
            "lambda_re": float(np.real(self.lam)),
            "lambda_im": float(np.imag(self.lam)),
            "residual_direct": float(self.residuals[0]),
            "residual_adjoint": float(self.residuals[1]),
            "normalization_re": float(np.real(self.normalization())),
            "normalization_im": float(np.imag(self.normalization())),
            "center": list(self.center),
            **self.meta,
        }


def spectral_projector(pair: SpectralPair, w: VectorField) -> SolenoidalField:
    """``Pi_0 w = <w, psi_0> phi_0``."""
    if w.grid != pair.grid:
        raise GridMismatch(f"{w.grid} vs {pair.grid}")
    c = inner(w, pair.psi)
    return SolenoidalField(pair.grid, c * pair.phi.values)


def solve_auxiliary(p: OseenParams, proj, eps: Optional[float], g: VectorField, *,
                    tol: float = 1e-8, restart: int = 60, maxiter: int = 2000,
                    return_info: bool = False):
    """Solve ``(A - shift) w + eps * Pi w = g`` by preconditioned GMRES.

    ``proj`` is a :class:`SpectralPair` or a :class:`RankProjector`.  ``eps``
    defaults to ``0.1 Re(shift)``.  Raises :class:`NoConvergence` on stall.
    """
    if isinstance(proj, SpectralPair):
        proj = proj.projector()
    if eps is None:
        eps = 0.1 * p.shift.real
    if not eps > 0:
        raise ValueError("eps must be positive")
    eng = p.engine
    b = p.vec(g)

    def op(v):
        return eng.matvec(v) + eps * proj.apply(v)

    dinv = eng.diag_inverse(0.0)
    M = (lambda v: dinv * v) if dinv is not None else None
    x, info = gmres(op, b, M=M, tol=tol, restart=restart, maxiter=maxiter)
    w = p.field(x)
    return (w, info) if return_info else w


def smoothstep_cutoff(r: np.ndarray, L: float, alpha: float = ALPHA, beta: float = BETA) -> np.ndarray:
    """Radial C^2 cut-off: 1 for ``r <= alpha L``, 0 for ``r >= beta L``, quintic in between."""
    t = np.clip((r / L - alpha) / (beta - alpha), 0.0, 1.0)
    return 1.0 - t**3 * (10 - 15 * t + 6 * t**2)


def stream_of(w: VectorField) -> ScalarField:
    """Zero-mean stream function ``s`` with ``grad_perp(s) = w`` (band-limited)."""
    b = basis_for(w.grid)
    sh = b.stream_hat(b.vec(w))
    vals = ifft2(sh)
    return ScalarField(w.grid, vals if w.is_complex else vals.real)


def _band(grid: Grid, values: np.ndarray) -> np.ndarray:
    return ifft2(fft2(values) * grid.dealias_mask)


@dataclass(eq=False)
class LocalizedFrame:
    cut_radius: float
    alpha: float
    beta: float
    S0: ScalarField
    phi_L: SolenoidalField
    psi_tilde_L: VectorField
    alpha_L: complex
    center: tuple[float, float] = (0.0, 0.0)

    @property
    def psi_L(self) -> SolenoidalField:
        b = basis_for(self.phi_L.grid)
        return b.field(b.vec(self.psi_tilde_L))

    def translated(self, shift) -> "LocalizedFrame":
        """Frame moved by ``shift`` (exact on the grid for lattice-aligned shifts)."""
        c = (self.center[0] + shift[0], self.center[1] + shift[1])
        return LocalizedFrame(self.cut_radius, self.alpha, self.beta,
                              ScalarField(self.S0.grid, _shift_values(self.S0.grid, self.S0.values, shift)),
                              self.phi_L.translated(shift), self.psi_tilde_L.translated(shift),
                              self.alpha_L, c)


def _shift_values(grid: Grid, values, shift):
    ph = np.exp(-1j * (grid.k1 * shift[0] + grid.k2 * shift[1]))
    out = ifft2(fft2(values) * ph)
    return out if np.iscomplexobj(values) else out.real


def build_localized_frame(pair: SpectralPair, base, L: float, *, alpha: float = ALPHA,
                          beta: float = BETA, core_radius: Optional[float] = None) -> LocalizedFrame:
    """Cut the eigenfields off at radius ``L`` around the vortex centre.

    ``phi_L = grad_perp(band(Phi_L S0))`` with ``grad_perp(S0) = phi_0`` and
    ``psi_tilde_L = Phi_L psi_tilde_0``; ``alpha_L = 1 / <phi_L, psi_tilde_L>``.
    """
    grid = pair.grid
    if core_radius is None:
        spec = getattr(base, "spec", None)
        core_radius = spec.core_radius if spec is not None else 0.0
    if not 0 < alpha < beta < 1:
        raise ValueError("need 0 < alpha < beta < 1")
    if beta * L > grid.d / 2 - 2 * core_radius + 1e-12:
        raise CutoffTooLarge(f"beta*L = {beta * L:.4g} exceeds d/2 - 2 r0 = {grid.d / 2 - 2 * core_radius:.4g}")
    center = pair.center
    r = grid.periodic_distance(center)
    cut = smoothstep_cutoff(r, L, alpha, beta)
    S0 = stream_of(pair.phi)
    sh = fft2(cut * S0.values) * grid.dealias_mask
    phi_L = SolenoidalField(grid, ifft2(np.stack([1j * grid.k2 * sh, -1j * grid.k1 * sh])))
    psi_tilde_L = VectorField(grid, cut * pair.psi_tilde.values)
    g = inner(phi_L, psi_tilde_L)
    return LocalizedFrame(L, alpha, beta, S0, phi_L, psi_tilde_L, 1.0 / g, tuple(center))


def adjoint_tilde(pair_or_lam, psi: VectorField, base_flow: VectorField, nu: float, mu: float = 0.0) -> VectorField:
    """``-(nu lap - mu - conj(lam))^-1 (2 (U.grad) psi - U_perp rot psi)``, band-limited.

    Its Leray projection is ``psi`` whenever ``psi`` is an adjoint eigenfield.
    """
    lam = pair_or_lam.lam if isinstance(pair_or_lam, SpectralPair) else complex(pair_or_lam)
    grid = psi.grid
    if not np.any(psi.values):
        return VectorField.zeros(grid, complex)
    b = basis_for(grid)
    vh = b.spectrum(b.vec(psi))
    k1, k2 = grid.k1, grid.k2
    grads = ifft2(np.stack([1j * k1 * vh[0], 1j * k2 * vh[0], 1j * k1 * vh[1], 1j * k2 * vh[1]]))
    U = ifft2(fft2(base_flow.values) * grid.dealias_mask).real
    adv1 = U[0] * grads[0] + U[1] * grads[1]
    adv2 = U[0] * grads[2] + U[1] * grads[3]
    rr = grads[1] - grads[2]
    bh = fft2(np.stack([2 * adv1 - U[1] * rr, 2 * adv2 + U[0] * rr])) * grid.dealias_mask
    sym = -nu * grid.ksq - mu - np.conj(lam)
    out = -bh / sym
    out[:, 0, 0] = 0.0
    return VectorField(grid, ifft2(out))


def shell_profile(u: VectorField, center, r_min: float, r_max: float, bins: int = 24):
    """Angular (shell) averages of ``|u|`` on logarithmically spaced radii."""
    mag = np.sqrt(np.sum(np.abs(u.values) ** 2, axis=0))
    r = u.grid.periodic_distance(center)
    edges = np.geomspace(r_min, r_max, bins + 1)
    radii, means = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (r >= lo) & (r < hi)
        if np.any(sel):
            radii.append(np.sqrt(lo * hi))
            means.append(mag[sel].mean())
    return np.array(radii), np.array(means)


def decay_slope(u: VectorField, center, r_min: float, r_max: float, bins: int = 24) -> float:
    """Least-squares slope of log shell-average ``|u|`` against log radius."""
    radii, means = shell_profile(u, center, r_min, r_max, bins)
    good = means > 0
    return float(np.polyfit(np.log(radii[good]), np.log(means[good]), 1)[0])


def frame_residual(p: OseenParams, frame: LocalizedFrame) -> float:
    """``||(A - shift) phi_L||_2``."""
    return norm(apply_linearization(p, frame.phi_L))


__all__ = [
    "OseenParams", "SpectralPair", "LocalizedFrame", "RankProjector", "CutoffTooLarge",
    "NoConvergence", "SolveInfo", "apply_linearization", "apply_adjoint", "spectral_projector",
    "solve_auxiliary", "build_localized_frame", "adjoint_tilde", "smoothstep_cutoff",
    "stream_of", "shell_profile", "decay_slope", "frame_residual", "basis_for",
]
