"""Leading spectrum of the Oseen linearization, amplitude search and index counting.

Eigenvalues are computed matrix-free by shift-invert Krylov-Schur: every
Arnoldi step is one preconditioned GMRES solve with ``A - sigma``.  Shifts for
the rightmost part of the spectrum are placed at the eigenvalues of a cheap
dense proxy (the same operator on a coarse grid, or a single vortex in a small
box), since the unstable modes carry large imaginary parts and a real shift
separates them poorly.  Candidate vectors from all shifts (and their complex
conjugates) are merged by a block Rayleigh-Ritz step and every reported pair
is certified by an explicit residual.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg as sla

from .discrete import OseenEngine, SolenoidalBasis
from .krylov import gmres, krylov_schur
from .oseen import OseenParams, SpectralPair, adjoint_tilde, basis_for
from .spectral import Grid, SolenoidalField, VectorField, fft2, ifft2
from .steady import Lattice, SteadyState, VortexSpec, build_vortex

log = logging.getLogger(__name__)

RIGHTMOST = "rightmost"


class NotConverged(RuntimeError):
    def __init__(self, message: str, report: "EigenReport | None" = None):
        super().__init__(message)
        self.report = report


class ShiftSingular(ArithmeticError):
    pass


class NoInstabilityFound(RuntimeError):
    def __init__(self, a_hi: float, max_re: float):
        super().__init__(f"no eigenvalue above threshold up to amplitude {a_hi:g} (max Re = {max_re:.4g})")
        self.a_hi = a_hi
        self.max_re = max_re


class AdjointMismatch(RuntimeError):
    pass


@dataclass
class EigenRequest:
    operator: OseenParams
    how_many: int = 1
    subspace_dim: Optional[int] = None
    target: Union[str, complex] = RIGHTMOST
    tol: float = 1e-8
    seeds: Optional[Sequence[complex]] = None
    per_seed: Optional[int] = None
    inner_tol: float = 1e-11
    proxy_n: int = 64
    seed: int = 0
    max_restarts: int = 60

    def __post_init__(self):
        if self.how_many < 1:
            raise ValueError("how_many must be >= 1")
        if self.subspace_dim is None:
            self.subspace_dim = max(4 * self.how_many, 20)
        if not 4 * self.how_many <= self.subspace_dim <= 400:
            raise ValueError("subspace_dim must lie in [4 m, 400]")
        if not 1e-10 <= self.tol <= 1e-4:
            raise ValueError("tol must lie in [1e-10, 1e-4]")
        if not isinstance(self.target, str):
            self.target = complex(self.target)
        elif self.target != RIGHTMOST:
            raise ValueError(f"unknown target {self.target!r}")


@dataclass
class EigenPair:
    lam: complex
    vec: np.ndarray
    residual: float
    basis: SolenoidalBasis = field(repr=False)

    @property
    def phi(self) -> SolenoidalField:
        return self.basis.field(self.vec)


@dataclass
class EigenReport:
    pairs: list
    iterations: int
    converged: bool
    shifts: list = field(default_factory=list)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs], dtype=complex)

    def to_dict(self) -> dict:
        return {
            "pairs": [{"re": float(p.lam.real), "im": float(p.lam.imag), "residual": float(p.residual)}
                      for p in self.pairs],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------- building blocks

def _engine(params: OseenParams, shift: complex) -> OseenEngine:
    return OseenEngine(params.basis, params.base_flow.values, params.nu, params.mu, shift)


def shift_invert(params: OseenParams, sigma: complex, nev: int, ncv: int, *, adjoint: bool = False,
                 ks_tol: float = 1e-10, inner_tol: float = 1e-11, rng=None, max_restarts: int = 60):
    """Eigenvalues of ``A`` (or ``A*``) nearest ``sigma`` with Ritz vectors (rows)."""
    eng = _engine(params, np.conj(sigma) if adjoint else sigma)
    apply = eng.rmatvec if adjoint else eng.matvec
    dinv = eng.diag_inverse(0.0, adjoint=adjoint)
    if dinv is None:
        raise ShiftSingular(f"shift {sigma} hits the diffusion spectrum")
    if not eng.has_flow:
        # diagonal operator: the preconditioner is the exact inverse
        def op(v):
            return dinv * v
    else:
        def op(v):
            x, info = gmres(apply, v, M=lambda y: dinv * y, tol=inner_tol, raise_on_fail=False)
            if not np.all(np.isfinite(x)) or np.linalg.norm(x) > 1e14 * np.linalg.norm(v):
                raise ShiftSingular(f"shift {sigma} is within roundoff of an eigenvalue")
            if not info.converged:
                raise NotConverged(f"inner solve at shift {sigma} stalled: residual {info.residual:.2e}")
            return x
    rng = rng if rng is not None else np.random.default_rng(0)
    n = eng.size
    v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    res = krylov_schur(op, n, nev, ncv=ncv, tol=ks_tol, v0=v0, rng=rng, max_restarts=max_restarts)
    with np.errstate(divide="ignore"):
        lam = sigma + 1.0 / res.values
    return lam, res.vectors, res.iterations


def rayleigh_ritz(params: OseenParams, vectors: np.ndarray, *, adjoint: bool = False,
                  add_conjugates: bool = True, rank_tol: float = 1e-9):
    """Block Rayleigh-Ritz on the span of ``vectors`` (rows).

    Returns eigenvalues, unit Ritz vectors (rows) and explicit residual norms.
    """
    b = params.basis
    X = np.asarray(vectors, dtype=complex)
    if add_conjugates:
        X = np.vstack([X, b.conj_vec(X)])
    _, s, vh = np.linalg.svd(X, full_matrices=False)
    Q = vh[s > rank_tol * s[0]]
    eng = _engine(params, 0.0)
    apply = eng.rmatvec if adjoint else eng.matvec
    AQ = np.array([apply(q) for q in Q])
    H = Q.conj() @ AQ.T
    theta, Y = sla.eig(H)
    V = Y.T @ Q
    AV = Y.T @ AQ
    nv = np.linalg.norm(V, axis=1)
    V /= nv[:, None]
    AV /= nv[:, None]
    res = np.linalg.norm(AV - theta[:, None] * V, axis=1)
    return theta, V, res


def _sort_with_conjugates(lams: np.ndarray, tol: float) -> np.ndarray:
    """Indices by descending real part, conjugate partners kept adjacent."""
    order = list(np.argsort(-lams.real - 1e-12 * np.sign(lams.imag), kind="stable"))
    out: list = []
    used = set()
    for i in order:
        if i in used:
            continue
        out.append(i)
        used.add(i)
        if abs(lams[i].imag) > tol:
            cand = [j for j in order if j not in used and abs(lams[j] - np.conj(lams[i])) <= tol * max(1, abs(lams[i]))]
            if cand:
                out.append(cand[0])
                used.add(cand[0])
    return np.array(out, dtype=int)


def restrict_values(values: np.ndarray, grid: Grid, coarse: Grid) -> np.ndarray:
    """Fourier truncation of fine-grid samples onto a coarse grid with the same box."""
    if abs(grid.d - coarse.d) > 1e-12 * grid.d:
        raise ValueError("restriction needs equal boxes")
    n, m = grid.n, coarse.n
    vh = fft2(values)
    out = np.zeros(values.shape[:-2] + (m, m), dtype=complex)
    h = m // 2
    idx = np.r_[0:h, n - h:n]
    out[..., :, :] = vh[..., idx[:, None], idx[None, :]]
    out[..., h, :] = 0.0
    out[..., :, h] = 0.0
    return ifft2(out).real * (m * m) / (n * n)


def dense_spectrum(params: OseenParams) -> np.ndarray:
    """All eigenvalues of the explicitly assembled operator (coarse grids only)."""
    eng = _engine(params, 0.0)
    if eng.size > 6000:
        raise ValueError(f"dense assembly of size {eng.size} refused")
    return sla.eigvals(eng.dense())


def proxy_spectrum(params: OseenParams, n_proxy: int = 64) -> np.ndarray:
    """Dense spectrum of the operator restricted to a coarse grid of the same box."""
    g = params.grid
    m = min(n_proxy, g.n)
    coarse = Grid(m, g.d)
    vals = restrict_values(np.asarray(params.base_flow.values.real), g, coarse)
    return dense_spectrum(OseenParams(VectorField(coarse, vals), params.nu, params.mu))


def single_vortex_proxy(spec: VortexSpec, nu: float, mu: float, box: Optional[float] = None,
                        n: int = 64) -> np.ndarray:
    """Dense spectrum of one vortex in a small box (``8 r0`` by default)."""
    d = box if box is not None else 8 * spec.core_radius
    g = Grid(n, d)
    u = build_vortex(g, spec.at((0.0, 0.0)))
    return dense_spectrum(OseenParams(u, nu, mu))


def pick_seeds(lams: np.ndarray, count: int, min_gap: float = 0.05) -> list:
    """Rightmost proxy eigenvalues in the closed upper half plane, mutually separated."""
    lams = np.asarray(lams)
    cand = lams[lams.imag >= -1e-9]
    cand = cand[np.argsort(-cand.real, kind="stable")]
    seeds: list = []
    for z in cand:
        if all(abs(z - s) > min_gap * max(1.0, abs(s)) for s in seeds):
            seeds.append(complex(z.real, max(z.imag, 0.0)))
        if len(seeds) >= count:
            break
    return seeds


def _offset(z: complex) -> complex:
    return z + 2e-3 * (1 + abs(z)) * complex(math.cos(0.6), math.sin(0.6))


# ---------------------------------------------------------------- public operations

def certified_pairs(params: OseenParams, shifts: Sequence[complex], per: int, ncv: int, *,
                    tol: float = 1e-8, inner_tol: float = 1e-11, seed: int = 0,
                    max_restarts: int = 60) -> tuple[list, int]:
    """Shift-invert at every shift, merge by Rayleigh-Ritz, keep certified pairs.

    Pairs come back by descending real part with conjugates adjacent.
    """
    if params.shift != 0:
        params = params.shifted(0.0)
    rng = np.random.default_rng(seed)
    ks_tol = min(1e-10, 1e-2 * tol)
    size = params.basis.size
    per = max(1, min(per, size - 2))
    ncv = min(max(ncv, 2 * per + 1), size - 1, 400)
    vecs = []
    iters = 0
    for s in shifts:
        _, V, it = shift_invert(params, s, per, ncv, ks_tol=ks_tol, inner_tol=inner_tol, rng=rng,
                                max_restarts=max_restarts)
        vecs.append(V)
        iters += it
        log.info("shift %s: %d restarts", s, it)
    theta, V, _ = rayleigh_ritz(params, np.vstack(vecs))
    # independent re-evaluation of every residual
    eng = _engine(params, 0.0)
    res = np.array([np.linalg.norm(eng.matvec(v) - t * v) / np.linalg.norm(v) for t, v in zip(theta, V)])
    ok = res <= tol
    theta, V, res = theta[ok], V[ok], res[ok]
    order = _sort_with_conjugates(theta, 1e-8)
    pairs = [EigenPair(complex(theta[i]), V[i], float(res[i]), params.basis) for i in order]
    return pairs, iters


def subspace_pairs(params: OseenParams, sigma: complex, guess: np.ndarray, want: int, *,
                   tol: float = 1e-8, inner_tol: float = 1e-10, max_iter: int = 25) -> tuple[list, int]:
    """Block shift-invert subspace iteration started from ``guess`` (rows).

    Suited to tight clusters with exact degeneracies, where a single-vector
    Krylov method needs many restarts.  Iterates until the ``want`` Ritz
    values nearest ``sigma`` are certified, then returns every certified pair
    together with its conjugate, sorted like :func:`certified_pairs`.
    """
    if params.shift != 0:
        params = params.shifted(0.0)
    eng = _engine(params, sigma)
    base = _engine(params, 0.0)
    dinv = eng.diag_inverse(0.0)
    if dinv is None:
        raise ShiftSingular(f"shift {sigma} hits the diffusion spectrum")
    X = np.asarray(guess, dtype=complex)
    want = min(want, X.shape[0])
    theta = np.full(X.shape[0], sigma)
    it = 0
    for it in range(1, max_iter + 1):
        W = []
        for x, t in zip(X, theta):
            d = t - sigma
            x0 = x / d if abs(d) > 1e-14 else None
            y, info = gmres(eng.matvec, x, M=lambda v: dinv * v, x0=x0, tol=inner_tol, restart=80,
                            raise_on_fail=False)
            if not info.converged:
                raise NotConverged(f"inner solve at shift {sigma} stalled: residual {info.residual:.2e}")
            W.append(y)
        theta, X, res = rayleigh_ritz(params, np.array(W), add_conjugates=False)
        order = np.argsort(np.abs(theta - sigma), kind="stable")
        theta, X, res = theta[order], X[order], res[order]
        log.info("subspace step %d: residuals %s", it, np.array2string(res[:want], precision=2))
        if np.all(res[:want] <= 0.1 * tol):
            break
    else:
        raise NotConverged(f"subspace iteration at {sigma} did not certify {want} pairs in {max_iter} steps")
    theta, V, _ = rayleigh_ritz(params, X)
    res = np.array([np.linalg.norm(base.matvec(v) - t * v) / np.linalg.norm(v) for t, v in zip(theta, V)])
    ok = res <= tol
    theta, V, res = theta[ok], V[ok], res[ok]
    order = _sort_with_conjugates(theta, 1e-8)
    return [EigenPair(complex(theta[i]), V[i], float(res[i]), params.basis) for i in order], it


def _is_conj(a: complex, b: complex) -> bool:
    return abs(a.imag) > 1e-8 and abs(a - np.conj(b)) <= 1e-8 * max(1.0, abs(a))


def leading_spectrum(req: EigenRequest) -> EigenReport:
    """Leading eigenpairs of the unshifted linearization ``A``.

    ``target = "rightmost"`` sorts by real part; a complex target returns the
    eigenvalues nearest to it (still listed by descending real part).
    """
    params = req.operator
    m = req.how_many
    per = req.per_seed or m
    if isinstance(req.target, complex):
        shifts = [req.target]
    else:
        seeds = list(req.seeds) if req.seeds is not None else pick_seeds(proxy_spectrum(params, req.proxy_n), max(2, m))
        shifts = [_offset(s) for s in seeds]
    pairs, iters = certified_pairs(params, shifts, per, req.subspace_dim, tol=req.tol, inner_tol=req.inner_tol,
                                   seed=req.seed, max_restarts=req.max_restarts)
    if isinstance(req.target, complex):
        near = sorted(range(len(pairs)), key=lambda i: abs(pairs[i].lam - req.target))[:m]
        pairs = [pairs[i] for i in sorted(near)]
    else:
        keep = pairs[:m]
        if keep and len(pairs) > m and _is_conj(keep[-1].lam, pairs[m].lam):
            keep.append(pairs[m])
        pairs = keep
    report = EigenReport(pairs, iters, len(pairs) >= m, shifts)
    if not report.converged:
        raise NotConverged(f"only {len(pairs)} of {m} eigenpairs certified", report)
    return report


def adjoint_pair(lam: complex, phi: Union[SolenoidalField, np.ndarray], params: OseenParams, *,
                 tol: float = 1e-8, seed: int = 0, center=(0.0, 0.0)) -> SpectralPair:
    """Adjoint eigenfield at ``conj(lam)``, normalized so that ``<phi, psi> = 1``."""
    params = params.shifted(0.0) if params.shift != 0 else params
    b = params.basis
    pv = phi if isinstance(phi, np.ndarray) else b.vec(phi)
    target = np.conj(lam)
    rng = np.random.default_rng(seed)
    mus, V, _ = shift_invert(params, _offset(target), 1, 6, adjoint=True, rng=rng)
    theta, W, res = rayleigh_ritz(params, V, adjoint=True, add_conjugates=False)
    i = int(np.argmin(np.abs(theta - target)))
    if abs(theta[i] - target) > 1e-4 * max(1.0, abs(lam)):
        raise AdjointMismatch(f"nearest adjoint eigenvalue {theta[i]} is far from conj(lambda) = {target}")
    w = W[i]
    c = np.vdot(w, pv)  # <phi, psi> with the first slot linear
    if abs(c) < 1e-14:
        raise AdjointMismatch("adjoint eigenfield is orthogonal to the direct one")
    w = w / np.conj(c)
    eng = _engine(params, 0.0)
    r_dir = float(np.linalg.norm(eng.matvec(pv) - lam * pv) / np.linalg.norm(pv))
    r_adj = float(np.linalg.norm(eng.rmatvec(w) - target * w) / np.linalg.norm(w))
    phi_f = b.field(pv)
    psi_f = b.field(w)
    pt = adjoint_tilde(lam, psi_f, params.base_flow, params.nu, params.mu)
    return SpectralPair(complex(lam), phi_f, psi_f, pt, (r_dir, r_adj), tuple(center),
                        {"adjoint_lambda_re": float(np.conj(theta[i]).real),
                         "adjoint_lambda_im": float(np.conj(theta[i]).imag)})


@dataclass
class SearchResult:
    spec: VortexSpec
    pair: SpectralPair
    evaluations: dict
    below: Optional[float]
    report: EigenReport


def _leading_at(grid: Grid, spec: VortexSpec, nu: float, mu: float, seeds: Sequence[complex],
                seed: int, tol: float) -> EigenReport:
    u = build_vortex(grid, spec)
    req = EigenRequest(OseenParams(u, nu, mu), how_many=1, subspace_dim=6, seeds=seeds[:1], per_seed=1,
                       tol=tol, seed=seed)
    return leading_spectrum(req)


def find_unstable_vortex(family: str, r0: float, grid: Grid, a_range: tuple[float, float], *,
                         nu: float = 1.0, mu: float = 0.0, threshold: Optional[float] = None,
                         rel_width: float = 0.02, center=None, proxy_n: int = 64,
                         proxy_box: Optional[float] = None, seed: int = 0, tol: float = 1e-8) -> SearchResult:
    """Smallest amplitude on the grid ``a_hi / (1 + rel_width)^j`` with ``Re lambda >= threshold``.

    The bracket is first located with the small-box dense proxy and then
    confirmed by matrix-free evaluations on ``grid``.
    """
    a_lo, a_hi = map(float, a_range)
    if not 0 <= a_lo < a_hi:
        raise ValueError("need 0 <= a_lo < a_hi")
    thr = 0.05 * nu / r0**2 if threshold is None else threshold
    box = proxy_box if proxy_box is not None else min(8 * r0, grid.d)
    center = center if center is not None else (grid.d / 2, grid.d / 2)
    ratio = 1 + rel_width
    jmax = int(math.floor(math.log(a_hi / a_lo) / math.log(ratio))) if a_lo > 0 else 10**6
    proto = VortexSpec(family, a_hi, r0, center)

    def amp(j):
        return a_hi / ratio**j

    proxy_cache: dict = {}
    proxy_seeds: dict = {}

    def proxy_re(j):
        if j not in proxy_cache:
            lams = single_vortex_proxy(proto.with_amplitude(amp(j)), nu, mu, box, proxy_n)
            proxy_cache[j] = float(lams.real.max())
            proxy_seeds[j] = pick_seeds(lams, 1)
        return proxy_cache[j]

    fine: dict = {}

    def seeds_for(j):
        if j in proxy_seeds:
            return proxy_seeds[j]
        if fine:
            k = min(fine, key=lambda i: abs(i - j))
            z = fine[k].pairs[0].lam
            return [complex(z.real, abs(z.imag))]
        proxy_re(j)
        return proxy_seeds[j]

    def fine_eval(j):
        if j not in fine:
            rep = _leading_at(grid, proto.with_amplitude(amp(j)), nu, mu, seeds_for(j), seed, tol)
            fine[j] = rep
            log.info("a = %.6g: leading %s", amp(j), rep.pairs[0].lam)
        return fine[j].pairs[0].lam.real

    top = fine_eval(0)
    if top < thr:
        raise NoInstabilityFound(a_hi, top)
    # proxy bisection for a starting guess
    lo, hi = 0, min(jmax, 400)
    if proxy_re(hi) >= thr:
        guess = hi
    else:
        step_no = 0
        while hi - lo > 1:
            # regula falsi alternating with bisection, clamped to the open bracket
            f_lo, f_hi = proxy_re(lo), proxy_re(hi)
            t = (f_lo - thr) / (f_lo - f_hi) if f_lo != f_hi and step_no % 2 == 0 else 0.5
            step_no += 1
            mid = int(round(lo + t * (hi - lo)))
            mid = min(max(mid, lo + 1), hi - 1)
            if proxy_re(mid) >= thr:
                lo = mid
            else:
                hi = mid
        guess = lo
    guess = min(guess, jmax)
    # fine bracket: good index (unstable) and bad index (below threshold)
    good, bad = 0, None
    step = 1
    j = guess
    if j > 0 and fine_eval(j) >= thr:
        good = j
        while True:
            k = min(good + step, jmax)
            if k == good:
                break
            if fine_eval(k) >= thr:
                good = k
                step *= 2
            else:
                bad = k
                break
    else:
        bad = j if j > 0 else None
        if bad is not None:
            while True:
                k = max(bad - step, 0)
                if fine_eval(k) >= thr:
                    good = k
                    break
                bad = k
                step *= 2
    if bad is not None:
        while bad - good > 1:
            mid = (good + bad) // 2
            if fine_eval(mid) >= thr:
                good = mid
            else:
                bad = mid
    rep = fine[good]
    spec = proto.with_amplitude(amp(good))
    u = build_vortex(grid, spec)
    params = OseenParams(u, nu, mu)
    top_pair = rep.pairs[0]
    pair = adjoint_pair(top_pair.lam, top_pair.vec, params, seed=seed, center=spec.center)
    evals = {amp(k): complex(r.pairs[0].lam) for k, r in sorted(fine.items())}
    below = amp(bad) if bad is not None else None
    return SearchResult(spec, pair, evals, below, rep)


class UnstableCount(int):
    """Integer count carrying the certified eigenvalues and a cap flag."""

    eigenvalues: np.ndarray
    capped: bool
    report: Optional[EigenReport]

    def __new__(cls, value, eigenvalues, capped, report=None):
        obj = super().__new__(cls, value)
        obj.eigenvalues = np.asarray(eigenvalues, dtype=complex)
        obj.capped = bool(capped)
        obj.report = report
        return obj


def count_unstable(state: SteadyState, threshold: float, m_max: int = 64, *,
                   seeds: Optional[Sequence[complex]] = None, per_seed: Optional[int] = None,
                   tol: float = 1e-8, seed: int = 0, guess: Optional[np.ndarray] = None) -> UnstableCount:
    """Certified eigenvalues of the linearization with ``Re > threshold``.

    Conjugates counted separately.  Shifts default to the single-vortex proxy
    eigenvalues above ``threshold``; each shift resolves ``per_seed``
    eigenvalues (default ``#centres + 2``).  The result is a lower bound for
    the true count.  With ``guess`` (coefficient rows, e.g. translated
    single-vortex eigenvectors) a block subspace iteration at the first shift
    replaces the Krylov runs.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if seeds is None:
        if state.spec is None:
            raise ValueError("seeds are required for states without a vortex spec")
        lams = single_vortex_proxy(state.spec, state.nu, state.mu)
        seeds = pick_seeds(lams[lams.real > threshold], 8)
    seeds = [complex(s.real, abs(s.imag)) for s in seeds]
    nxi = len(state.lattice) if state.lattice is not None else 1
    per = per_seed or nxi + 2
    params = OseenParams(state.velocity, state.nu, state.mu)
    if not seeds:
        return UnstableCount(0, [], False, None)
    shifts = [_offset(s) for s in seeds]
    if guess is not None:
        pairs, iters = subspace_pairs(params, shifts[0], guess, len(guess), tol=tol)
    else:
        pairs, iters = certified_pairs(params, shifts, per, max(4 * per, 20), tol=tol, seed=seed)
    rep = EigenReport(pairs, iters, True, shifts)
    lams = rep.eigenvalues
    lams = lams[lams.real > threshold]
    capped = lams.size > m_max
    return UnstableCount(min(lams.size, m_max), lams, capped, rep)


__all__ = [
    "EigenRequest", "EigenReport", "EigenPair", "NotConverged", "ShiftSingular",
    "NoInstabilityFound", "AdjointMismatch", "UnstableCount", "SearchResult", "leading_spectrum",
    "find_unstable_vortex", "adjoint_pair", "count_unstable", "shift_invert", "rayleigh_ritz",
    "certified_pairs", "subspace_pairs", "dense_spectrum", "proxy_spectrum", "single_vortex_proxy", "pick_seeds", "restrict_values",
]
