"""Command-line entry point.

Exit codes: 0 success, 2 invalid configuration, 3 numerical non-convergence,
4 file-system problems.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import eigen
from .dichotomy import (
    FrameOverlap,
    NoContraction,
    SolveFailed,
    block_norm_probe,
    build_multiprojector,
    riccati_neutral,
    write_matrix,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    run_case1_scaling,
    run_case2_scaling,
    run_l_sweep,
    summarize,
)
from .io import IoError, load_pair, load_state, save_pair, save_state
from .krylov import NoConvergence
from .oseen import CutoffTooLarge, OseenParams
from .report import emit_report, read_json
from .spectral import Grid
from .steady import FAMILIES, GridTooSmall, Lattice, OverlapError, VortexSpec, assemble_multivortex

log = logging.getLogger("mvlb")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

NUMERIC_ERRORS = (eigen.NotConverged, eigen.NoInstabilityFound, eigen.AdjointMismatch, eigen.ShiftSingular,
                  NoConvergence, NoContraction, SolveFailed)
CONFIG_ERRORS = (ConfigError, GridTooSmall, OverlapError, FrameOverlap, CutoffTooLarge, ValueError)


def read_config(path, section: str = "experiment") -> dict:
    """Key=value pairs of one section of an INI-style file."""
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not cp.has_section(section):
        raise ConfigError(f"{path}: missing [{section}] section")
    return dict(cp.items(section))


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def _experiment_config(args, case: str) -> ExperimentConfig:
    m: dict = {}
    if args.config:
        m.update(read_config(args.config))
    m.update(_overrides(args.set))
    for key in ("a", "plan", "nu", "mu", "tol", "family", "r0"):
        val = getattr(args, key, None)
        if val is not None:
            m[key] = val
    m["case"] = case
    m["seed"] = args.seed
    m["workers"] = args.workers
    m["output_dir"] = str(args.out)
    cfg = ExperimentConfig.from_mapping(m)
    return cfg.validate()


def _write_study(records, args, name: str):
    out = Path(args.out)
    emit_report(records, "json", out / f"{name}.json")
    emit_report(records, "csv", out / f"{name}.csv")
    summary = summarize(records)
    if name != "lsweep":
        emit_report(records, "svg", out / f"{name}.svg", title=name)
    (out / f"{name}_summary.json").write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary, indent=2))


def cmd_vortex_find(args) -> int:
    grid = Grid(args.n, args.d)
    res = eigen.find_unstable_vortex(args.family, args.r0, grid, (args.a_lo, args.a_hi), nu=args.nu, mu=args.mu,
                                     threshold=args.threshold, seed=args.seed, tol=args.tol)
    out = Path(args.out)
    save_pair(out, res.pair)
    st = assemble_multivortex(grid, res.spec.at((0.0, 0.0)),
                              Lattice(grid.d, (res.spec.center,)), args.nu, args.mu)
    save_state(out, st)
    info = {
        "family": res.spec.family,
        "a": res.spec.amplitude,
        "r0": res.spec.core_radius,
        "lambda": [res.pair.lam.real, res.pair.lam.imag],
        "residuals": list(res.pair.residuals),
        "below": res.below,
        "evaluations": {f"{k:.6g}": [v.real, v.imag] for k, v in res.evaluations.items()},
    }
    (out / "vortex.json").write_text(json.dumps(info, indent=2))
    print(json.dumps(info, indent=2))
    return EXIT_OK


def _lattice(args, d: float) -> Lattice:
    if args.layout == "square":
        N = int(round(np.sqrt(args.count)))
        if N * N != args.count:
            raise ConfigError("square layout needs a square count")
        return Lattice.square(N, args.L)
    if args.layout == "row":
        return Lattice.row(args.count, args.L, d)
    lat, side = Lattice.rotated(args.count, args.L)
    if abs(side - d) > 1e-9 * d:
        raise ConfigError(f"rotated layout needs box side {side:g}")
    return lat


def cmd_multivortex_build(args) -> int:
    d = args.d
    grid = Grid(args.n, d)
    spec = VortexSpec(args.family, args.a, args.r0, (0.0, 0.0))
    st = assemble_multivortex(grid, spec, _lattice(args, d), args.nu, args.mu)
    save_state(args.out, st)
    print(json.dumps(st.metadata(), indent=2, default=str))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    st = load_state(args.state)
    params = OseenParams(st.velocity, st.nu, st.mu)
    target = complex(args.target) if args.target else "rightmost"
    req = eigen.EigenRequest(params, how_many=args.how_many, target=target, tol=args.tol, seed=args.seed,
                             proxy_n=args.proxy_n)
    rep = eigen.leading_spectrum(req)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "spectrum.json").write_text(rep.to_json())
    print(rep.to_json())
    return EXIT_OK


def cmd_dichotomy(args) -> int:
    st = load_state(args.state)
    pair = load_pair(args.pair)
    if st.lattice is None:
        raise ConfigError("state has no lattice metadata")
    op = OseenParams(st.velocity, st.nu, st.mu, pair.lam)
    proj = build_multiprojector(pair, st.lattice, args.cut, core_radius=st.spec.core_radius if st.spec else 0.0)
    rep = block_norm_probe(op, proj, args.samples, seed=args.seed, L=args.cut)
    ric = riccati_neutral(op, proj, rep, tol=args.tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "blocks.json").write_text(rep.to_json())
    (out / "riccati.json").write_text(ric.to_json())
    write_matrix(out / "neutral_block.txt", ric.neutral_block)
    print(json.dumps({"blocks": rep.to_dict(), "riccati": ric.to_dict()}, indent=2))
    return EXIT_OK


def cmd_scaling(args) -> int:
    if args.case == "case1":
        cfg = _experiment_config(args, "torus-proxy-I")
        recs = run_case1_scaling(cfg)
    else:
        cfg = _experiment_config(args, "ekman-II")
        recs = run_case2_scaling(cfg)
    _write_study(recs, args, cfg.case)
    return EXIT_OK


def cmd_lsweep(args) -> int:
    cfg = _experiment_config(args, "lsweep")
    recs = run_l_sweep(cfg)
    _write_study(recs, args, "lsweep")
    return EXIT_OK


def _load_records(path: Path) -> list:
    if path.suffix == ".jsonl":
        try:
            lines = path.read_text().splitlines()
        except OSError as exc:
            raise IoError(path, exc.strerror or str(exc)) from exc
        rows = [json.loads(s) for s in lines if s.strip()]
    else:
        rows = read_json(path)
    return [ExperimentRecord.from_dict(r) for r in rows]


def cmd_report(args) -> int:
    recs = _load_records(Path(args.records))
    if not recs:
        raise ConfigError("no records found")
    kw = {}
    if args.format == "svg":
        kw = {"x": args.x, "y": args.y}
    path = emit_report(recs, args.format, args.output, **kw)
    print(path)
    return EXIT_OK


def _add_vortex_args(p, amplitude: bool = True):
    p.add_argument("--family", default=FAMILIES[0], choices=FAMILIES)
    p.add_argument("--r0", type=float, default=1.0, help="core radius")
    if amplitude:
        p.add_argument("--a", type=float, default=150.0, help="amplitude")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)


def _add_study_args(p):
    p.add_argument("--config", help="INI file with an [experiment] section")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--plan", help="comma separated count:L[:n[:d]] entries")
    p.add_argument("--a", help="amplitude or 'auto'")
    p.add_argument("--nu", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mvlb", description="Multi-vortex instability index experiments.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("out"))
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    vortex = sub.add_parser("vortex", help="single-vortex tools")
    vsub = vortex.add_subparsers(dest="action", required=True)
    find = vsub.add_parser("find", help="smallest unstable amplitude")
    _add_vortex_args(find, amplitude=False)
    find.add_argument("--a-lo", type=float, default=80.0)
    find.add_argument("--a-hi", type=float, default=400.0)
    find.add_argument("--n", type=int, default=256)
    find.add_argument("--d", type=float, default=16.0)
    find.add_argument("--threshold", type=float)
    find.add_argument("--tol", type=float, default=1e-8)
    find.set_defaults(func=cmd_vortex_find)

    mv = sub.add_parser("multivortex", help="multi-vortex states")
    msub = mv.add_subparsers(dest="action", required=True)
    build = msub.add_parser("build", help="assemble and save a lattice of vortices")
    _add_vortex_args(build)
    build.add_argument("--count", type=int, default=1)
    build.add_argument("--L", type=float, default=8.0, help="lattice spacing")
    build.add_argument("--layout", choices=["square", "row", "rotated"], default="square")
    build.add_argument("--n", type=int, required=True)
    build.add_argument("--d", type=float, required=True)
    build.set_defaults(func=cmd_multivortex_build)

    sp = sub.add_parser("spectrum", help="leading eigenvalues of a saved state")
    sp.add_argument("--state", required=True)
    sp.add_argument("--how-many", type=int, default=2)
    sp.add_argument("--target", help="complex target, e.g. 3.9+4.1j")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--proxy-n", type=int, default=64)
    sp.set_defaults(func=cmd_spectrum)

    dc = sub.add_parser("dichotomy", help="block norms and Riccati neutral block")
    dc.add_argument("--state", required=True)
    dc.add_argument("--pair", required=True)
    dc.add_argument("--cut", type=float, required=True, help="cut-off length")
    dc.add_argument("--samples", type=int, default=20)
    dc.add_argument("--tol", type=float, default=1e-6)
    dc.set_defaults(func=cmd_dichotomy)

    sc = sub.add_parser("scaling", help="instability index against the Grashof number")
    sc.add_argument("case", choices=["case1", "case2"])
    _add_study_args(sc)
    sc.set_defaults(func=cmd_scaling)

    ls = sub.add_parser("lsweep", help="frame and block diagnostics over lattice spacings")
    _add_study_args(ls)
    ls.set_defaults(func=cmd_lsweep)

    rp = sub.add_parser("report", help="export records")
    rp.add_argument("--records", required=True, help=".json or .jsonl records")
    rp.add_argument("--format", choices=["csv", "json", "svg"], required=True)
    rp.add_argument("--output", required=True)
    rp.add_argument("--x", default="grashof")
    rp.add_argument("--y", default="unstable_count")
    rp.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (IoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
