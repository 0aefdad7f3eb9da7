"""Scaling studies: instability index against Grashof numbers, and the cut-length sweep."""

from __future__ import annotations

import concurrent.futures as cf
import hashlib
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import eigen
from .dichotomy import (
    NoContraction,
    SolveFailed,
    block_norm_probe,
    build_multiprojector,
    hyperbolic_gap_probe,
    riccati_neutral,
    smooth_probe,
)
from .oseen import OseenParams, apply_linearization, build_localized_frame, basis_for
from .io import write_snapshot
from .report import slope_fit
from .spectral import Grid, VectorField, fft2, ifft2, norm
from .steady import (
    Lattice,
    SteadyState,
    VortexSpec,
    assemble_multivortex,
    grashof_case1,
    grashof_case2,
)

log = logging.getLogger(__name__)

CASES = ("torus-proxy-I", "ekman-II", "lsweep")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PlanEntry:
    """One lattice: ``count`` centres with spacing ``L`` on an ``n x n`` grid of side ``d``."""

    count: int
    L: float
    n: int = 0
    d: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "PlanEntry":
        parts = [p.strip() for p in text.split(":")]
        if len(parts) not in (2, 3, 4):
            raise ConfigError(f"plan entry {text!r} must look like count:L[:n[:d]]")
        try:
            count = int(parts[0])
            L = float(parts[1])
            n = int(parts[2]) if len(parts) > 2 and parts[2] not in ("", "auto") else 0
            d = float(parts[3]) if len(parts) > 3 and parts[3] not in ("", "auto") else 0.0
        except ValueError as exc:
            raise ConfigError(f"plan entry {text!r}: {exc}") from None
        return cls(count, L, n, d)

    def text(self) -> str:
        return f"{self.count}:{self.L:g}:{self.n or 'auto'}:{self.d or 'auto'}"


def resolution(d: float, r0: float, points_per_r0: float = 16.0) -> int:
    """Smallest power of two with ``points_per_r0`` samples per core radius and 8 per unit length."""
    need = max(points_per_r0 * d / r0, 8 * d, 32)
    return 1 << int(math.ceil(math.log2(need) - 1e-12))


def lattice_for(case: str, count: int, L: float, d: float = 0.0) -> tuple[Lattice, float]:
    """Centre layout and box side for one plan entry.

    Case I uses square ``N x N`` lattices on a box of side ``N L``.  Otherwise
    a given box side ``d`` selects: one centre, a row of two (``d >= 2L``), a
    square lattice (``d = N L``) or the area-``count L^2`` lattice of
    :meth:`Lattice.rotated`; without ``d`` the rotated lattice is used.
    """
    if case == "torus-proxy-I":
        N = int(round(math.sqrt(count)))
        if N * N != count:
            raise ConfigError(f"case I needs a square number of centres, got {count}")
        return Lattice.square(N, L), N * L
    if d > 0:
        N = int(round(math.sqrt(count)))
        if count == 1:
            return Lattice(d, ((d / 2, d / 2),)), d
        if N * N == count and abs(N * L - d) <= 1e-9 * d:
            return Lattice.square(N, L), d
        if count == 2 and d >= 2 * L - 1e-9:
            return Lattice.row(2, L, d), d
    try:
        return Lattice.rotated(count, L)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


@dataclass
class ExperimentConfig:
    case: str = "torus-proxy-I"
    family: str = "counter-rotating-ring"
    r0: float = 1.0
    a: Union[float, str] = 150.0
    nu: float = 1.0
    mu: float = 0.0
    plan: list = field(default_factory=list)
    tol: float = 1e-8
    seed: int = 0
    output_dir: str = "out"
    workers: int = 1
    a_range: tuple = (80.0, 400.0)
    threshold_factor: float = 0.5
    m_max: int = 64
    points_per_r0: float = 16.0
    cut_fraction: float = 0.625
    probes: int = 20
    direct_spectrum: bool = True
    gap_factor: float = 3.0

    def __post_init__(self):
        self.plan = [p if isinstance(p, PlanEntry) else PlanEntry.parse(p) if isinstance(p, str) else PlanEntry(*p)
                     for p in self.plan]
        self.a_range = tuple(float(x) for x in self.a_range)

    def validate(self):
        if self.case not in CASES:
            raise ConfigError(f"case must be one of {CASES}")
        if not self.nu > 0:
            raise ConfigError("nu must be positive")
        if self.mu < 0:
            raise ConfigError("mu must be non-negative")
        if self.case == "ekman-II" and not self.mu > 0:
            raise ConfigError("case II requires mu > 0")
        if self.case == "torus-proxy-I" and self.mu != 0:
            raise ConfigError("case I runs without Ekman damping (mu = 0)")
        if not (self.a == "auto" or (isinstance(self.a, (int, float)) and self.a > 0)):
            raise ConfigError("a must be positive or 'auto'")
        if not 0 < self.threshold_factor < 1:
            raise ConfigError("threshold_factor must lie in (0, 1)")
        if not self.plan:
            raise ConfigError("plan is empty")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for p in self.plan:
            self.resolve(p)
        return self

    def resolve(self, p: PlanEntry) -> tuple[Grid, Lattice]:
        """Grid and lattice of a plan entry, with every precondition checked."""
        if p.count < 1 or not p.L > 0:
            raise ConfigError(f"bad plan entry {p.text()}")
        lat, side = lattice_for(self.case, p.count, p.L, p.d)
        d = p.d or side
        if abs(d - side) > 1e-9 * side and not (p.count == 1 and p.d):
            raise ConfigError(f"plan entry {p.text()}: box {d:g} does not match the lattice box {side:g}")
        n = p.n or resolution(d, self.r0, self.points_per_r0)
        try:
            grid = Grid(n, d)
        except ValueError as exc:
            raise ConfigError(f"plan entry {p.text()}: {exc}") from None
        if n * self.r0 / d < self.points_per_r0 - 1e-9 or n / d < 8 - 1e-9:
            raise ConfigError(f"plan entry {p.text()}: n = {n} under-resolves the core")
        if 4 * self.r0 > d:
            raise ConfigError(f"plan entry {p.text()}: box too small for the vortex")
        try:
            lat.validate(d, self.r0)
        except ValueError as exc:
            raise ConfigError(f"plan entry {p.text()}: {exc}") from None
        if self.case == "lsweep":
            cut = self.cut_length(p, lat)
            if 0.8 * cut > d / 2 - 2 * self.r0 + 1e-12:
                raise ConfigError(f"plan entry {p.text()}: cut length {cut:g} does not fit the box")
        return grid, lat

    def cut_length(self, p: PlanEntry, lat: Lattice) -> float:
        return self.cut_fraction * p.L

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("output_dir")
        d.pop("workers")
        d["plan"] = [p.text() for p in self.plan]
        d["a_range"] = list(self.a_range)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @classmethod
    def from_mapping(cls, m: dict) -> "ExperimentConfig":
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for k, v in m.items():
            k = k.replace("-", "_")
            if k not in known:
                raise ConfigError(f"unknown config key {k!r}")
            try:
                kw[k] = _coerce(k, v)
            except ValueError as exc:
                raise ConfigError(f"bad value for {k}: {exc}") from None
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


def _coerce(key: str, v):
    if not isinstance(v, str):
        return v
    s = v.strip()
    if key == "plan":
        return [t for t in (x.strip() for x in s.replace(";", ",").split(",")) if t]
    if key == "a_range":
        return tuple(float(x) for x in s.replace(",", " ").split())
    if key == "a":
        return s if s == "auto" else float(s)
    if key in ("case", "family", "output_dir"):
        return s
    if key in ("seed", "workers", "m_max", "probes"):
        return int(s)
    if key == "direct_spectrum":
        return s.lower() in ("1", "true", "yes", "on")
    return float(s)


@dataclass
class ExperimentRecord:
    study: str
    case: str
    nu: float
    mu: float
    L: float
    count: int
    box: float
    n: int
    grashof: float
    unstable_count: int
    leading_eigenvalues: list
    cluster_radius: float
    neutral_radius: float
    amplitude: float
    seed: int
    config_hash: str
    wall_time: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        extra = d.pop("extra")
        d.update(extra)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentRecord":
        names = {f.name for f in fields(cls)} - {"extra"}
        base = {k: d[k] for k in names}
        extra = {k: v for k, v in d.items() if k not in names}
        return cls(**base, extra=extra)

    def comparable(self) -> dict:
        d = self.to_dict()
        d.pop("wall_time")
        return d


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def append_record(path: Path, rec: ExperimentRecord):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a") as fh:
        fh.write(json.dumps({k: _json_safe(v) for k, v in rec.to_dict().items()}) + "\n")


# ------------------------------------------------------------------------ helpers

def _spec(cfg: ExperimentConfig, a: float) -> VortexSpec:
    return VortexSpec(cfg.family, float(a), cfg.r0, (0.0, 0.0))


def resolve_amplitude(cfg: ExperimentConfig) -> float:
    if cfg.a != "auto":
        return float(cfg.a)
    d = 16 * cfg.r0
    grid = Grid(resolution(d, cfg.r0, cfg.points_per_r0), d)
    res = eigen.find_unstable_vortex(cfg.family, cfg.r0, grid, cfg.a_range, nu=cfg.nu, mu=cfg.mu,
                                     seed=cfg.seed, tol=cfg.tol)
    return res.spec.amplitude


def reference_eigenvalue(cfg: ExperimentConfig, a: float, grid: Grid) -> eigen.EigenReport:
    """Leading eigenpair of one vortex at the box centre of ``grid``."""
    spec = _spec(cfg, a)
    box = min(8 * cfg.r0, grid.d)
    seeds = eigen.pick_seeds(eigen.single_vortex_proxy(spec, cfg.nu, cfg.mu, box), 1)
    st = assemble_multivortex(grid, spec, Lattice(grid.d, ((grid.d / 2, grid.d / 2),)), cfg.nu, cfg.mu)
    req = eigen.EigenRequest(OseenParams(st.velocity, cfg.nu, cfg.mu), how_many=1, subspace_dim=6,
                             seeds=seeds, per_seed=1, tol=cfg.tol, seed=cfg.seed)
    return eigen.leading_spectrum(req)


def _entry_seed(cfg: ExperimentConfig, index: int) -> int:
    return int(np.random.SeedSequence([cfg.seed, index]).generate_state(1)[0])


def lattice_guess(grid: Grid, phi_values: np.ndarray, center, lattice: Lattice) -> np.ndarray:
    """Coefficient rows of one eigenfield translated from ``center`` to every lattice centre."""
    b = basis_for(grid)
    h = fft2(phi_values)
    rows = []
    for c in lattice.offsets:
        ph = np.exp(-1j * (grid.k1 * (c[0] - center[0]) + grid.k2 * (c[1] - center[1])))
        rows.append(b.vec(VectorField(grid, ifft2(h * ph))))
    return np.array(rows)


def _cluster(lams: np.ndarray, ref: complex, k: int) -> tuple[list, float]:
    up = lams[lams.imag >= -1e-12] if ref.imag >= 0 else lams
    up = up[np.argsort(np.abs(up - ref), kind="stable")][:k]
    radius = float(np.max(np.abs(up - ref))) if up.size else float("nan")
    return up, radius


def _count_entry(cfg, a, index, p: PlanEntry, ref: complex, threshold: float, hash_: str) -> ExperimentRecord:
    t0 = time.perf_counter()
    grid, lat = cfg.resolve(p)
    spec = _spec(cfg, a)
    state = assemble_multivortex(grid, spec, lat, cfg.nu, cfg.mu)
    if cfg.case == "ekman-II":
        G = grashof_case2(state.forcing, cfg.mu, cfg.nu)
    else:
        G = grashof_case1(state.forcing, cfg.nu, grid.d**2)
    # isolated vortex on the same grid; its eigenfield, moved to every centre, starts the cluster solve
    iso = reference_eigenvalue(cfg, a, grid).pairs[0]
    guess = lattice_guess(grid, iso.phi.values, (grid.d / 2, grid.d / 2), lat)
    cnt = eigen.count_unstable(state, threshold, cfg.m_max, seeds=[iso.lam], tol=cfg.tol,
                               seed=_entry_seed(cfg, index), guess=guess)
    lams = cnt.eigenvalues
    cl, radius = _cluster(lams, complex(iso.lam.real, abs(iso.lam.imag)), p.count)
    snap = f"{cfg.case}_entry{index}_forcing.mvlb"
    write_snapshot(Path(cfg.output_dir) / snap, state.forcing)
    lead = [[float(z.real), float(z.imag)] for z in lams]
    return ExperimentRecord(
        study=cfg.case, case=cfg.case, nu=cfg.nu, mu=cfg.mu, L=p.L, count=p.count, box=grid.d, n=grid.n,
        grashof=float(G), unstable_count=int(cnt), leading_eigenvalues=lead, cluster_radius=radius,
        neutral_radius=float("nan"), amplitude=float(a), seed=cfg.seed, config_hash=hash_,
        wall_time=time.perf_counter() - t0,
        extra={"threshold": float(threshold), "isolated_re": float(iso.lam.real),
               "isolated_im": float(abs(iso.lam.imag)), "capped": bool(cnt.capped), "steady_residual": state.residual,
               "reference_re": float(ref.real), "reference_im": float(ref.imag),
               "forcing_norm": float(norm(state.forcing)), "forcing_snapshot": snap},
    )


def _run_entries(cfg: ExperimentConfig, fn, args_list) -> list:
    out_path = Path(cfg.output_dir) / f"{cfg.case}_records.jsonl"
    results = [None] * len(args_list)
    if cfg.workers == 1:
        for i, args in enumerate(args_list):
            results[i] = fn(*args)
            append_record(out_path, results[i])
    else:
        with cf.ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            futs = {ex.submit(fn, *args): i for i, args in enumerate(args_list)}
            for fut in cf.as_completed(futs):
                i = futs[fut]
                results[i] = fut.result()
                append_record(out_path, results[i])
    return results


def _scaling(cfg: ExperimentConfig) -> list:
    cfg.validate()
    a = resolve_amplitude(cfg)
    first = cfg.plan[0]
    # reference: one vortex in the box of a single lattice cell
    d_ref = first.L
    g_ref = Grid(resolution(d_ref, cfg.r0, cfg.points_per_r0), d_ref)
    ref = reference_eigenvalue(cfg, a, g_ref).pairs[0].lam
    ref = complex(ref.real, abs(ref.imag))
    thr = cfg.threshold_factor * ref.real
    if not thr > 0:
        raise eigen.NoInstabilityFound(a, ref.real)
    h = cfg.config_hash()
    args = [(cfg, a, i, p, ref, thr, h) for i, p in enumerate(cfg.plan)]
    return _run_entries(cfg, _count_entry, args)


def run_case1_scaling(cfg: ExperimentConfig) -> list:
    """Square ``N x N`` lattices on boxes of side ``N L``: count against ``G``."""
    if cfg.case != "torus-proxy-I":
        cfg = replace(cfg, case="torus-proxy-I")
    return _scaling(cfg)


def run_case2_scaling(cfg: ExperimentConfig) -> list:
    """``N`` vortices on boxes of area ``N L^2`` with Ekman damping: count against ``G1``.

    The forcing of each vortex is manufactured with damping, i.e. it is the
    undamped forcing plus ``mu`` times the vortex velocity.
    """
    if cfg.case != "ekman-II":
        cfg = replace(cfg, case="ekman-II")
    return _scaling(cfg)


def _pair_for(cfg: ExperimentConfig, a: float, grid: Grid, seed: int):
    spec = _spec(cfg, a)
    center = (grid.d / 2, grid.d / 2)
    st = assemble_multivortex(grid, spec, Lattice(grid.d, (center,)), cfg.nu, cfg.mu)
    rep = reference_eigenvalue(cfg, a, grid)
    top = rep.pairs[0]
    lam = complex(top.lam.real, abs(top.lam.imag))
    vec = top.vec if top.lam.imag >= 0 else basis_for(grid).conj_vec(top.vec)
    params = OseenParams(st.velocity, cfg.nu, cfg.mu)
    return eigen.adjoint_pair(lam, vec, params, seed=seed, center=center), st


def _lsweep_entry(cfg, a, index, p: PlanEntry, hash_: str, pair_cache: dict) -> ExperimentRecord:
    t0 = time.perf_counter()
    grid, lat = cfg.resolve(p)
    seed = _entry_seed(cfg, index)
    key = (grid.n, grid.d)
    if key not in pair_cache:
        pair_cache[key] = _pair_for(cfg, a, grid, seed)
    pair, single = pair_cache[key]
    lam = pair.lam
    cut = cfg.cut_length(p, lat)
    spec = _spec(cfg, a)
    # single-vortex frame diagnostics
    p0 = OseenParams(single.velocity, cfg.nu, cfg.mu, lam)
    frame = build_localized_frame(pair, single, cut, core_radius=cfg.r0)
    phi_L = frame.phi_L
    frame_res = norm(apply_linearization(p0, phi_L))
    frame_dist = norm(phi_L - pair.phi) / norm(pair.phi)
    b = basis_for(grid)
    rng = np.random.default_rng(seed)
    us = smooth_probe(b, rng, cfg.probes)
    ph0, ps0 = b.vec(pair.phi), b.vec(pair.psi)
    phL, psL = frame.alpha_L * b.vec(frame.phi_L), b.vec(frame.psi_tilde_L)
    proj_dist = max(np.linalg.norm(np.vdot(psL, u) * phL - np.vdot(ps0, u) * ph0) / np.linalg.norm(u) for u in us)
    # multi-vortex blocks
    state = assemble_multivortex(grid, spec, lat, cfg.nu, cfg.mu) if len(lat) > 1 else single
    op = OseenParams(state.velocity, cfg.nu, cfg.mu, lam)
    mp = build_multiprojector(pair, lat, cut, core_radius=cfg.r0)
    gram = mp.gram()
    alpha = frame.alpha_L
    rp = mp.vector_form()
    ws = smooth_probe(b, rng, 50)
    idem = max(np.linalg.norm(rp.apply(rp.apply(w)) - rp.apply(w)) / np.linalg.norm(w) for w in ws)
    extra = {
        "cut_length": cut,
        "frame_residual": float(frame_res),
        "frame_distance": float(frame_dist),
        "projector_distance": float(proj_dist),
        "projector_idempotency": float(idem),
        "alpha_L_re": float(np.real(alpha)),
        "alpha_L_im": float(np.imag(alpha)),
        "gram_offdiag": float(np.max(np.abs(gram - np.diag(np.diag(gram))))) if len(lat) > 1 else 0.0,
        "gram_error": float(np.max(np.abs(alpha * gram - np.eye(len(lat))))),
        "lambda_re": float(lam.real),
        "lambda_im": float(lam.imag),
    }
    radius = float("nan")
    neutral = np.array([], dtype=complex)
    try:
        rep = block_norm_probe(op, mp, cfg.probes, seed=seed, L=cut)
        extra.update(norm_L12=rep.norm_L12, norm_L21=rep.norm_L21, norm_L22=rep.norm_L22,
                     inv_L11_bound=rep.inv_L11_bound)
        ric = riccati_neutral(op, mp, rep)
        neutral = np.linalg.eigvals(ric.neutral_block) + lam
        radius = ric.radius
        delta = cfg.gap_factor * max(radius, 1e-6)
        gap = hyperbolic_gap_probe(op, mp, ric, delta, seed=seed)
        extra.update(
            riccati_residual=ric.residual,
            riccati_iterations=ric.iterations,
            contraction_factor=ric.contraction_factor,
            neutral_eigenvalues=[[float(z.real), float(z.imag)] for z in neutral],
            neutral_block=[[[float(z.real), float(z.imag)] for z in row] for row in ric.neutral_block],
            gap_delta=float(delta),
            gap_certified=bool(gap),
        )
    except (NoContraction, SolveFailed) as exc:
        # recorded, not raised: small spacings are expected to fall outside the dichotomy regime
        log.warning("entry %s: %s", p.text(), exc)
        extra["dichotomy_error"] = str(exc)
    lead: list = []
    cl_radius = float("nan")
    ucount = 0
    if cfg.direct_spectrum:
        thr = cfg.threshold_factor * lam.real
        guess = lattice_guess(grid, pair.phi.values, pair.center, lat)
        cnt = eigen.count_unstable(state, thr, cfg.m_max, seeds=[lam], tol=cfg.tol, seed=seed, guess=guess)
        ucount = int(cnt)
        lead = [[float(z.real), float(z.imag)] for z in cnt.eigenvalues]
        cl, cl_radius = _cluster(cnt.eigenvalues, lam, len(lat))
        # match neutral eigenvalues to the direct cluster
        if cl.size and neutral.size:
            extra["neutral_match"] = float(max(np.min(np.abs(cl - z)) for z in neutral))
    return ExperimentRecord(
        study="lsweep", case=cfg.case, nu=cfg.nu, mu=cfg.mu, L=p.L, count=p.count, box=grid.d, n=grid.n,
        grashof=float(grashof_case2(state.forcing, cfg.mu, cfg.nu) if cfg.mu > 0
                      else grashof_case1(state.forcing, cfg.nu, grid.d**2)),
        unstable_count=ucount, leading_eigenvalues=lead, cluster_radius=cl_radius,
        neutral_radius=float(radius), amplitude=float(a), seed=cfg.seed, config_hash=hash_,
        wall_time=time.perf_counter() - t0, extra=extra,
    )


def run_l_sweep(cfg: ExperimentConfig) -> list:
    """Per-length frame residuals, projector distances, block norms and neutral blocks."""
    if cfg.case != "lsweep":
        cfg = replace(cfg, case="lsweep")
    cfg.validate()
    a = resolve_amplitude(cfg)
    h = cfg.config_hash()
    cache: dict = {}
    out_path = Path(cfg.output_dir) / "lsweep_records.jsonl"
    recs = []
    # entries share eigenpairs per grid, so they run in order
    for i, p in enumerate(cfg.plan):
        rec = _lsweep_entry(cfg, a, i, p, h, cache)
        append_record(out_path, rec)
        recs.append(rec)
    return recs


def _sweep_summary(recs: list) -> dict:
    """Decay exponents in the cut length and per-doubling ratios for one centre count."""
    out: dict = {"L": [r.L for r in recs]}
    if len(recs) < 2:
        return out
    Ls = [r.extra["cut_length"] for r in recs]
    for key in ("frame_residual", "projector_distance", "norm_L12", "norm_L21", "norm_L22"):
        vals = [r.extra.get(key, float("nan")) for r in recs]
        if all(v > 0 for v in vals):
            out[f"{key}_exponent"] = slope_fit(Ls, vals)[0]
    for key in ("neutral_radius", "cluster_radius"):
        vals = [getattr(r, key) for r in recs]
        out[f"{key}_ratios"] = [b / a for a, b in zip(vals[:-1], vals[1:])]
    fr = [r.extra["frame_residual"] for r in recs]
    out["frame_residual_ratios"] = [b / a for a, b in zip(fr[:-1], fr[1:])]
    return out


def summarize(records: Sequence[ExperimentRecord]) -> dict:
    """Fitted slopes of a study."""
    recs = list(records)
    out: dict = {"records": len(recs)}
    if not recs:
        return out
    study = recs[0].study
    if study in ("torus-proxy-I", "ekman-II"):
        xs = [r.grashof for r in recs]
        ys = [r.unstable_count for r in recs]
        if len(recs) >= 2 and min(ys) > 0:
            s, h, _ = slope_fit(xs, ys)
            out.update(slope=s, half_width=h)
        g0 = recs[0].grashof / recs[0].count
        out["grashof_per_centre_ratio"] = [r.grashof / r.count / g0 for r in recs]
    else:
        groups: dict = {}
        for r in recs:
            groups.setdefault(r.count, []).append(r)
        out["by_count"] = {c: _sweep_summary(sorted(g, key=lambda r: r.L)) for c, g in sorted(groups.items())}
    return out


__all__ = [
    "ExperimentConfig", "ExperimentRecord", "PlanEntry", "ConfigError", "run_case1_scaling",
    "run_case2_scaling", "run_l_sweep", "summarize", "resolution", "lattice_for", "append_record",
    "resolve_amplitude", "reference_eigenvalue",
]
