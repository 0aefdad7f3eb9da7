"""Multi-vortex projector, block splitting of the shifted linearization and the neutral Riccati map.

With ``Pi`` the multi-vortex projector and ``Q = 1 - Pi`` the blocks of the
shifted operator ``T = A - lambda`` are::

    T11 = Q T Q    T12 = Q T Pi
    T21 = Pi T Q   T22 = Pi T Pi

The neutral invariant subspace is the graph ``x + K x`` over ``range(Pi)``
with ``K = T11^-1 (K T22 + K T21 K - T12)``.  Its restriction is the small
matrix ``T21 K + T22`` in frame coordinates; the hyperbolic part is
``T11 - K T21`` on ``range(Q)``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .krylov import gmres
from .oseen import (
    ALPHA,
    BETA,
    LocalizedFrame,
    OseenParams,
    RankProjector,
    SpectralPair,
    basis_for,
    build_localized_frame,
)
from .spectral import Grid, SolenoidalField, VectorField, fft2, ifft2, inner
from .steady import Lattice

log = logging.getLogger(__name__)


class FrameOverlap(ValueError):
    pass


class SolveFailed(RuntimeError):
    pass


class NoContraction(RuntimeError):
    def __init__(self, factor: float):
        super().__init__(f"Riccati iteration does not contract (factor {factor:.3g})")
        self.factor = factor


def _translate(grid: Grid, values: np.ndarray, shift) -> np.ndarray:
    ph = np.exp(-1j * (grid.k1 * shift[0] + grid.k2 * shift[1]))
    return ifft2(fft2(values) * ph)


def translate_pair(pair: SpectralPair, center) -> SpectralPair:
    """Move the (band-limited) eigenfields so the vortex sits at ``center``."""
    g = pair.grid
    s = (center[0] - pair.center[0], center[1] - pair.center[1])
    return SpectralPair(pair.lam, SolenoidalField(g, _translate(g, pair.phi.values, s)),
                        SolenoidalField(g, _translate(g, pair.psi.values, s)),
                        VectorField(g, _translate(g, pair.psi_tilde.values, s)),
                        pair.residuals, (float(center[0]), float(center[1])), dict(pair.meta))


@dataclass(eq=False)
class MultiProjector:
    """``Pi w = alpha_L sum_j <w, psi_tilde_j> phi_j`` over all lattice centres."""

    frames: list
    alpha_L: complex
    cut_radius: float

    @property
    def grid(self) -> Grid:
        return self.frames[0].phi_L.grid

    @property
    def rank(self) -> int:
        return len(self.frames)

    def vector_form(self) -> RankProjector:
        b = basis_for(self.grid)
        phis = np.array([self.alpha_L * b.vec(f.phi_L) for f in self.frames])
        psis = np.array([b.vec(f.psi_tilde_L) for f in self.frames])
        return RankProjector(phis, psis)

    def apply(self, w: VectorField) -> SolenoidalField:
        vals = sum(self.alpha_L * inner(w, f.psi_tilde_L) * f.phi_L.values for f in self.frames)
        return SolenoidalField(self.grid, vals)

    def gram(self) -> np.ndarray:
        """``G[i, j] = <phi_j, psi_tilde_i>`` (ideally ``alpha_L^-1`` times identity)."""
        return np.array([[inner(fj.phi_L, fi.psi_tilde_L) for fj in self.frames] for fi in self.frames])


def build_multiprojector(pair: SpectralPair, lattice: Lattice, L: float, *, alpha: float = ALPHA,
                         beta: float = BETA, core_radius: float = 0.0) -> MultiProjector:
    """Translate the cut-off frame of ``pair`` to every lattice centre.

    ``L`` is the cut length; frames of neighbouring centres are disjoint when
    ``beta L <= spacing / 2``.
    """
    if beta * L > lattice.spacing / 2 + 1e-12:
        raise FrameOverlap(f"beta*L = {beta * L:.4g} exceeds half the spacing {lattice.spacing / 2:.4g}")
    frames = [build_localized_frame(translate_pair(pair, c), None, L, alpha=alpha, beta=beta,
                                    core_radius=core_radius) for c in lattice.offsets]
    return MultiProjector(frames, frames[0].alpha_L, float(L))


@dataclass
class BlockReport:
    norm_L12: float
    norm_L21: float
    norm_L22: float
    inv_L11_bound: float
    L: float
    count: int
    samples: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class RiccatiResult:
    K_neu: np.ndarray  # rows: coefficient vectors of the columns of K
    neutral_block: np.ndarray
    iterations: int
    contraction_factor: float
    residual: float
    damped: bool = False
    history: list = field(default_factory=list)

    @property
    def radius(self) -> float:
        ev = np.linalg.eigvals(self.neutral_block)
        return float(np.max(np.abs(ev))) if ev.size else 0.0

    def to_dict(self) -> dict:
        nb = self.neutral_block
        return {
            "neutral_block": [[[float(z.real), float(z.imag)] for z in row] for row in nb],
            "neutral_eigenvalues": [[float(z.real), float(z.imag)] for z in np.linalg.eigvals(nb)],
            "iterations": self.iterations,
            "contraction_factor": self.contraction_factor,
            "residual": self.residual,
            "damped": self.damped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def write_matrix(path, M: np.ndarray):
    """Dense complex matrix as text: one row per line, ``re,im`` pairs separated by spaces."""
    lines = [" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row) for row in np.atleast_2d(M)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rows.append([complex(float(a), float(b)) for a, b in (t.split(",") for t in line.split())])
    return np.array(rows, dtype=complex)


class BlockSplit:
    """Matrix-free blocks of ``T = A - shift`` with respect to a rank projector."""

    def __init__(self, op: OseenParams, proj, *, tol: float = 1e-10):
        if isinstance(proj, MultiProjector):
            proj = proj.vector_form()
        self.op = op
        self.proj: RankProjector = proj
        self.engine = op.engine
        self.basis = op.basis
        self.tol = tol
        d = self.engine.diag_inverse(0.0)
        self._prec = (lambda v: d * v) if d is not None else None
        # coordinates: c_i(w) = <w, psi_i>; phis already carry alpha_L
        self.N = proj.rank

    # projector pieces
    def P(self, v):
        return self.proj.apply(v)

    def Q(self, v):
        return v - self.proj.apply(v)

    def Pstar(self, v):
        return self.proj.psis.T @ (self.proj.phis.conj() @ v)

    def Qstar(self, v):
        return v - self.Pstar(v)

    def T(self, v):
        return self.engine.matvec(v)

    def Tstar(self, v):
        return self.engine.rmatvec(v)

    def coords(self, v):
        return self.proj.coefficients(v)

    def from_coords(self, c):
        return c @ self.proj.phis

    # blocks as (operator, adjoint) pairs acting on full coefficient vectors
    def block(self, name: str):
        P, Q, Ps, Qs, T, Ts = self.P, self.Q, self.Pstar, self.Qstar, self.T, self.Tstar
        table = {
            "12": (lambda v: Q(T(P(v))), lambda v: Ps(Ts(Qs(v)))),
            "21": (lambda v: P(T(Q(v))), lambda v: Qs(Ts(Ps(v)))),
            "22": (lambda v: P(T(P(v))), lambda v: Ps(Ts(Ps(v)))),
            "11": (lambda v: Q(T(Q(v))), lambda v: Qs(Ts(Qs(v)))),
        }
        return table[name]

    def solve11(self, r: np.ndarray, extra=None, z: complex = 0.0, tol: Optional[float] = None):
        """Solve ``(T11 - extra - z) y = r`` on ``range(Q)``.

        ``Pi y`` is pinned to zero by adding the identity on ``range(Pi)``.
        """
        def op(v):
            qv = self.Q(v)
            out = self.Q(self.T(qv)) - z * qv + self.P(v)
            if extra is not None:
                out = out - extra(qv)
            return out

        prec = self._prec
        if z != 0 and prec is not None:
            dz = self.engine.diag_inverse(z)
            prec = (lambda v: dz * v) if dz is not None else None
        x, info = gmres(op, self.Q(r), M=prec, tol=tol or self.tol, raise_on_fail=False)
        return self.Q(x), info


def smooth_probe(basis, rng: np.random.Generator, count: int) -> np.ndarray:
    """Gaussian coefficient vectors with amplitude ``(1 + |k|^2)^-1``."""
    w = 1.0 / (1.0 + basis.ksq)
    z = rng.standard_normal((count, basis.size)) + 1j * rng.standard_normal((count, basis.size))
    return z * w


def _power_norm(fwd, adj, probes: np.ndarray, steps: int) -> float:
    best = 0.0
    for x in probes:
        nx = np.linalg.norm(x)
        if nx == 0:
            continue
        x = x / nx
        est = 0.0
        for _ in range(steps):
            y = adj(fwd(x))
            ny = np.linalg.norm(y)
            est = np.sqrt(ny)
            if ny == 0:
                break
            x = y / ny
        best = max(best, float(est))
    return best


def block_norm_probe(op: OseenParams, proj, samples: int = 20, *, power_steps: int = 10,
                     inverse_steps: int = 3, seed: int = 0, L: Optional[float] = None) -> BlockReport:
    """Randomized norm estimates of the off-diagonal and neutral blocks.

    Each norm is the largest of ``samples`` power iterations on ``B* B``;
    ``inv_L11_bound`` combines ``samples`` probe solves with a few steps of
    inverse iteration from the worst probe.
    """
    if samples < 20:
        raise ValueError("at least 20 samples are required")
    cut = L if L is not None else getattr(proj, "cut_radius", float("nan"))
    split = BlockSplit(op, proj)
    rng = np.random.default_rng(seed)
    probes = smooth_probe(split.basis, rng, samples)
    norms = {}
    for name in ("12", "21", "22"):
        fwd, adj = split.block(name)
        norms[name] = _power_norm(fwd, adj, probes, power_steps)
    # T11^-1 on range(Q)
    inv_probes = smooth_probe(split.basis, rng, samples)
    best, worst = 0.0, None
    for r in inv_probes:
        r = split.Q(r)
        y, info = split.solve11(r)
        if not info.converged:
            raise SolveFailed(f"T11 probe solve stalled at residual {info.residual:.2e}")
        ratio = np.linalg.norm(y) / np.linalg.norm(r)
        if ratio > best:
            best, worst = ratio, y
    for _ in range(inverse_steps):
        r = worst / np.linalg.norm(worst)
        y, info = split.solve11(r)
        if not info.converged:
            raise SolveFailed(f"T11 probe solve stalled at residual {info.residual:.2e}")
        best = max(best, float(np.linalg.norm(y)))
        worst = y
    return BlockReport(norms["12"], norms["21"], norms["22"], float(best), float(cut), split.N, samples)


def riccati_neutral(op: OseenParams, proj, report: Optional[BlockReport] = None, *, tol: float = 1e-6,
                    max_iter: int = 60, damping: float = 0.5) -> RiccatiResult:
    """Fixed point ``K = T11^-1 (K T22 + K T21 K - T12)`` for the neutral graph map.

    Columns of ``K`` are indexed by frame coordinates.  The iteration is damped
    by ``damping`` when the contraction estimate from ``report`` exceeds 0.7.
    """
    split = BlockSplit(op, proj, tol=min(1e-10, tol * 1e-3))
    N = split.N
    phis = split.proj.phis
    # coordinates of T phi_j and the field Q T phi_j
    Tphi = np.array([split.T(p) for p in phis])
    M22 = np.array([split.coords(t) for t in Tphi]).T  # M22[i, j] = c_i(T phi_j)
    T12 = np.array([split.Q(t) for t in Tphi])
    est = 0.0
    if report is not None:
        est = report.inv_L11_bound * (report.norm_L22 + 2 * report.norm_L21 * report.norm_L12 * report.inv_L11_bound)
    damped = est > 0.7
    step = damping if damped else 1.0

    def fmap(K):
        TK = np.array([split.T(k) for k in K])
        M21K = np.array([split.coords(t) for t in TK]).T if N else np.zeros((0, 0))
        rhs = (M21K + M22).T @ K - T12  # row j: sum_i K_i (M21K + M22)[i, j] - T12_j
        out = np.empty_like(K)
        for j in range(N):
            y, info = split.solve11(rhs[j])
            if not info.converged:
                raise SolveFailed(f"T11 solve stalled at residual {info.residual:.2e}")
            out[j] = y
        return out, M21K

    K = np.zeros_like(phis)
    scale = max(np.linalg.norm(T12, axis=1).max(), 1e-300)
    hist = []
    prev = None
    factor = 0.0
    for it in range(1, max_iter + 1):
        FK, _ = fmap(K)
        res = float(np.linalg.norm(FK - K, axis=1).max())
        rel = res / max(scale, float(np.linalg.norm(K, axis=1).max()) if K.size else scale)
        hist.append(rel)
        if prev is not None and prev > 0:
            factor = max(factor, res / prev) if it <= 3 else res / prev
        if rel <= tol:
            K = FK
            break
        if prev is not None and res > 10 * prev and it > 3:
            raise NoContraction(res / prev)
        prev = res
        K = K + step * (FK - K)
    else:
        raise NoContraction(factor if factor else float("inf"))
    FK, M21K = fmap(K)
    resid = float(np.linalg.norm(FK - K, axis=1).max() / max(scale, float(np.linalg.norm(K, axis=1).max())))
    TK = np.array([split.T(k) for k in K])
    M21K = np.array([split.coords(t) for t in TK]).T
    block = M21K + M22
    return RiccatiResult(K, block, it, float(min(factor, 0.999999) if factor else est), resid, damped, hist)


def hyperbolic_gap_probe(op: OseenParams, proj, K: RiccatiResult, delta_trial: float, *,
                         nodes: int = 12, probes: int = 2, seed: int = 0, bound: float = 1e3,
                         leak: float = 1e-3) -> bool:
    """Check that ``T11 - K T21`` has no spectrum in the disc ``|z| < delta_trial / 2``.

    Resolvent solves at ``nodes`` points of the circle ``|z| = delta_trial/2``
    must converge with ``|y| <= bound |r|``; in addition the trapezoid
    approximation of the Riesz projection ``(1/2 pi i) \\oint (z - B)^-1 r dz``
    must be negligible (``<= leak |r|``) for every probe ``r``.
    """
    if not delta_trial > 0:
        raise ValueError("delta_trial must be positive")
    split = BlockSplit(op, proj)
    Kv = K.K_neu

    def extra(v):
        # K T21 v, with T21 v expressed in frame coordinates
        if Kv.size == 0:
            return np.zeros_like(v)
        c = split.coords(split.T(v))
        return c @ Kv

    rng = np.random.default_rng(seed)
    rad = delta_trial / 2
    R = [split.Q(r) for r in smooth_probe(split.basis, rng, probes)]
    acc = [np.zeros_like(r) for r in R]
    for k in range(nodes):
        z = rad * np.exp(2j * np.pi * (k + 0.5) / nodes)
        for i, r in enumerate(R):
            y, info = split.solve11(r, extra=extra, z=z)
            if not info.converged:
                return False
            if np.linalg.norm(y) > bound * np.linalg.norm(r):
                return False
            # (1/2 pi i) * sum (z - B)^-1 r * i z dtheta  with (z - B)^-1 = -(B - z)^-1
            acc[i] += -y * z / nodes
    return all(np.linalg.norm(a) <= leak * np.linalg.norm(r) for a, r in zip(acc, R))


__all__ = [
    "MultiProjector", "BlockReport", "RiccatiResult", "BlockSplit", "FrameOverlap", "SolveFailed",
    "NoContraction", "build_multiprojector", "block_norm_probe", "riccati_neutral",
    "hyperbolic_gap_probe", "translate_pair", "write_matrix", "read_matrix", "smooth_probe",
]
