"""Restarted GMRES and Krylov-Schur Arnoldi for matrix-free complex operators."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

log = logging.getLogger(__name__)

Operator = Callable[[np.ndarray], np.ndarray]


class NoConvergence(RuntimeError):
    """Krylov linear solve stalled before reaching its tolerance."""

    def __init__(self, iterations: int, residual: float):
        super().__init__(f"GMRES stalled after {iterations} iterations, relative residual {residual:.3e}")
        self.iterations = iterations
        self.residual = residual


@dataclass
class SolveInfo:
    iterations: int
    residual: float
    converged: bool


def gmres(A: Operator, b: np.ndarray, *, M: Optional[Operator] = None, x0=None,
          tol: float = 1e-8, restart: int = 60, maxiter: int = 2000,
          raise_on_fail: bool = True) -> tuple[np.ndarray, SolveInfo]:
    """Right-preconditioned restarted GMRES.

    Solves ``A x = b`` to relative residual ``tol`` (true residual, checked at
    every restart).  ``M`` approximates ``A^-1``.  ``maxiter`` bounds the total
    number of inner iterations.
    """
    b = np.asarray(b, dtype=complex)
    bnorm = np.linalg.norm(b)
    n = b.size
    if bnorm == 0:
        return np.zeros(n, dtype=complex), SolveInfo(0, 0.0, True)
    prec = M if M is not None else (lambda v: v)
    x = np.zeros(n, dtype=complex) if x0 is None else np.array(x0, dtype=complex)
    r = b - A(x) if x0 is not None else b.copy()
    beta = np.linalg.norm(r)
    total = 0
    while True:
        if beta <= tol * bnorm:
            return x, SolveInfo(total, beta / bnorm, True)
        if total >= maxiter:
            break
        m = min(restart, maxiter - total)
        V = np.empty((m + 1, n), dtype=complex)
        H = np.zeros((m + 1, m), dtype=complex)
        cs = np.zeros(m, dtype=complex)
        sn = np.zeros(m, dtype=complex)
        g = np.zeros(m + 1, dtype=complex)
        g[0] = beta
        V[0] = r / beta
        j_used = 0
        for j in range(m):
            w = A(prec(V[j]))
            # modified Gram-Schmidt, one reorthogonalisation pass
            for _ in range(2):
                h = V[: j + 1].conj() @ w
                w = w - h @ V[: j + 1]
                H[: j + 1, j] += h
            hn = np.linalg.norm(w)
            H[j + 1, j] = hn
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -np.conj(sn[i]) * H[i, j] + np.conj(cs[i]) * H[i + 1, j]
                H[i, j] = t
            a, bb = H[j, j], H[j + 1, j]
            den = np.hypot(abs(a), abs(bb))
            if den == 0:
                cs[j], sn[j] = 1.0, 0.0
            elif abs(a) == 0:
                cs[j], sn[j] = 0.0, np.conj(bb) / abs(bb)
            else:
                cs[j] = abs(a) / den
                sn[j] = (a / abs(a)) * np.conj(bb) / den
            H[j, j] = cs[j] * a + sn[j] * bb
            H[j + 1, j] = 0.0
            g[j + 1] = -np.conj(sn[j]) * g[j]
            g[j] = cs[j] * g[j]
            total += 1
            j_used = j + 1
            if abs(g[j + 1]) <= 0.5 * tol * bnorm or hn == 0:
                break
            V[j + 1] = w / hn
        y = sla.solve_triangular(H[:j_used, :j_used], g[:j_used])
        x = x + prec(y @ V[:j_used])
        r = b - A(x)
        new_beta = np.linalg.norm(r)
        if new_beta >= beta * (1 - 1e-12) and j_used == m and abs(g[j_used]) >= beta * (1 - 1e-12):
            beta = new_beta
            break
        beta = new_beta
    info = SolveInfo(total, beta / bnorm, beta <= tol * bnorm)
    if not info.converged and raise_on_fail:
        raise NoConvergence(total, info.residual)
    return x, info


@dataclass
class ArnoldiResult:
    values: np.ndarray  # Ritz values of the transformed operator
    vectors: np.ndarray  # rows are unit Ritz vectors
    residuals: np.ndarray  # Ritz residual estimates
    iterations: int
    converged: bool


def _orthonormalize(V: np.ndarray, w: np.ndarray, k: int):
    h = np.zeros(k, dtype=complex)
    for _ in range(2):
        c = V[:k].conj() @ w
        w = w - c @ V[:k]
        h += c
    return w, h


def krylov_schur(op: Operator, n: int, nev: int, *, ncv: Optional[int] = None,
                 which: Callable[[np.ndarray], np.ndarray] = None, tol: float = 1e-12,
                 max_restarts: int = 100, v0: Optional[np.ndarray] = None,
                 rng: Optional[np.random.Generator] = None) -> ArnoldiResult:
    """Krylov-Schur restarted Arnoldi for ``nev`` wanted eigenvalues of ``op``.

    ``which`` maps Ritz values to a sort key (larger is more wanted); the default
    selects largest magnitude.  Converged Ritz pairs are locked by keeping them
    in the retained Schur block.
    """
    if which is None:
        which = np.abs
    ncv = ncv or max(2 * nev + 1, 20)
    ncv = min(ncv, n)
    nev = min(nev, ncv - 1)
    rng = rng or np.random.default_rng(0)
    if v0 is None:
        v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    V = np.zeros((ncv + 1, n), dtype=complex)
    H = np.zeros((ncv + 1, ncv), dtype=complex)
    V[0] = v0 / np.linalg.norm(v0)
    k = 0
    restarts = 0
    keep = min(ncv - 1, max(nev + (ncv - nev) // 2, nev + 1))
    while True:
        for j in range(k, ncv):
            w = op(V[j])
            w, h = _orthonormalize(V, w, j + 1)
            H[: j + 1, j] += h
            hn = np.linalg.norm(w)
            H[j + 1, j] = hn
            if hn < 1e-300:
                # invariant subspace: restart direction is arbitrary
                w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                w, _ = _orthonormalize(V, w, j + 1)
                hn = np.linalg.norm(w)
                H[j + 1, j] = 0.0
            V[j + 1] = w / hn
        T, Z = sla.schur(H[:ncv, :ncv], output="complex")
        ritz = np.diag(T).copy()
        order = np.argsort(-which(ritz), kind="stable")
        # reorder Schur form so the wanted Ritz values lead
        T, Z = _reorder_schur(T, Z, order)
        ritz = np.diag(T).copy()
        bvec = H[ncv, ncv - 1] * Z[ncv - 1, :]
        # Ritz residuals from eigenvectors of the leading triangular block
        S = _triangular_eigvecs(T)
        res = np.abs(bvec @ S)
        scale = np.maximum(np.abs(ritz), 1e-300)
        conv = res[:nev] <= tol * scale[:nev]
        if np.all(conv) or restarts >= max_restarts:
            X = (S[:, :nev].T @ Z.T) @ V[:ncv]
            X /= np.linalg.norm(X, axis=1, keepdims=True)
            return ArnoldiResult(ritz[:nev], X, res[:nev], restarts, bool(np.all(conv)))
        nconv = int(np.sum(conv))
        k = min(max(keep, nev + nconv), ncv - 1)
        Vk = (Z[:, :k].T @ V[:ncv])
        V[:k] = Vk
        V[k] = V[ncv]
        H[:] = 0.0
        H[:k, :k] = T[:k, :k]
        H[k, :k] = bvec[:k]
        restarts += 1
        log.debug("krylov-schur restart %d: %d/%d converged", restarts, nconv, nev)


def _reorder_schur(T: np.ndarray, Z: np.ndarray, order: np.ndarray):
    """Reorder a complex Schur form so that ``diag(T)`` follows ``order``."""
    T = T.copy()
    Z = Z.copy()
    n = T.shape[0]
    target = np.diag(T)[order].copy()
    for pos in range(n):
        diag = np.diag(T)
        # locate the wanted value among the not-yet-placed entries
        idx = pos + int(np.argmin(np.abs(diag[pos:] - target[pos])))
        for i in range(idx - 1, pos - 1, -1):
            _swap(T, Z, i)
    return T, Z


def _swap(T: np.ndarray, Z: np.ndarray, i: int):
    """Swap diagonal entries i and i+1 of an upper-triangular T with a Givens rotation."""
    a, b, c = T[i, i], T[i + 1, i + 1], T[i, i + 1]
    if a == b:
        return
    x = np.array([c, b - a])
    nx = np.linalg.norm(x)
    if nx == 0:
        return
    cs = x[0] / nx
    sn = x[1] / nx
    G = np.array([[np.conj(cs), np.conj(sn)], [-sn, cs]])
    T[[i, i + 1], :] = G @ T[[i, i + 1], :]
    T[:, [i, i + 1]] = T[:, [i, i + 1]] @ G.conj().T
    Z[:, [i, i + 1]] = Z[:, [i, i + 1]] @ G.conj().T
    T[i + 1, i] = 0.0


def _triangular_eigvecs(T: np.ndarray) -> np.ndarray:
    """Unit eigenvectors of an upper-triangular matrix (columns)."""
    n = T.shape[0]
    S = np.zeros((n, n), dtype=complex)
    d = np.diag(T)
    for j in range(n):
        s = np.zeros(n, dtype=complex)
        s[j] = 1.0
        for i in range(j - 1, -1, -1):
            den = d[i] - d[j]
            if abs(den) < 1e-14 * max(abs(d[j]), 1e-300):
                den = 1e-14 * max(abs(d[j]), 1e-300)
            s[i] = -(T[i, i + 1 : j + 1] @ s[i + 1 : j + 1]) / den
        S[:, j] = s / np.linalg.norm(s)
    return S
