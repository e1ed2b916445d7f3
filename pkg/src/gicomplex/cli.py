"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 I/O or unreadable input, 4 contract violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time

import numpy as np

from . import samplers
from .builders import SimplicialityError, build_gic, build_gic_pair, rips_on_subsample
from .core import GICError, MetricChoice, PointCloud, load_complex, load_points, save_complex, save_points
from .graph import build_neighborhood_graph
from .homology import ContractError, betti, induced_map_rank
from .recon import DimensionError, find_intersections, circumradius, reconstruct
from .sampling import SubsampleContractError, greedy_subsample, verify_subsample

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONTRACT = 0, 2, 3, 4

CSV_HEADER = ["method", "delta", "Q", "n0", "n1", "n2", "n3", "b0", "b1", "ms"]

log = logging.getLogger("gicomplex")


class UsageError(Exception):
    pass


class ContractViolation(Exception):
    pass


CONTRACT_ERRORS = (ContractViolation, ContractError, SimplicialityError, SubsampleContractError)


def _positive(name):
    def conv(s):
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {s!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {s}")
        return v
    return conv


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` inclusive of b (up to rounding), or a comma-separated list."""
    if "," in text or ":" not in text:
        vals = [float(x) for x in text.split(",") if x.strip()]
    else:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be a:b:step, got {text!r}")
        a, b, step = (float(x) for x in parts)
        if step <= 0 or b < a:
            raise UsageError(f"empty grid {text!r}")
        n = int(np.floor((b - a) / step + 1e-9)) + 1
        vals = [round(a + i * step, 12) for i in range(n)]
    if not vals:
        raise UsageError("empty grid")
    if any(v <= 0 for v in vals):
        raise UsageError("grid values must be positive")
    return vals


def _metric(kind: str, G) -> MetricChoice:
    return MetricChoice.graph_distance(G) if kind == "graph" else MetricChoice.euclidean()


def _checked_subsample(P, m, delta, seed):
    S = greedy_subsample(P, m, delta, seed)
    rep = verify_subsample(S, P)
    if not rep:
        raise SubsampleContractError(f"subsample check failed: {rep.violation}")
    return S


def _load(path) -> PointCloud:
    return load_points(path)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_build(args) -> int:
    P = _load(args.points)
    G = build_neighborhood_graph(P, args.alpha)
    S = _checked_subsample(P, _metric(args.metric, G), args.delta, args.seed)
    if S.n_components > 1:
        print(f"warning: graph has {S.n_components} components; each was subsampled separately", file=sys.stderr)
    res = build_gic(G, S, args.max_dim)
    counts = res.complex.counts()
    if args.out:
        nu_path = args.out + ".nu"
        S.save(nu_path)
        save_complex(args.out, res.complex, [
            f"alpha {args.alpha} delta {args.delta} metric {args.metric} seed {args.seed}",
            "counts " + " ".join(map(str, counts)),
            f"nu {nu_path}",
        ])
    print(f"points {len(P)}  Q {len(S)}  graph edges {G.n_edges}")
    print("counts " + " ".join(map(str, counts)))
    return EXIT_OK


def cmd_betti(args) -> int:
    K = load_complex(args.complex)
    b = betti(K, args.max_k)
    if args.json:
        print(json.dumps({"betti": b, "counts": K.counts()}))
    else:
        print(" ".join(map(str, b)))
    return EXIT_OK


def cmd_pair_persist(args) -> int:
    if args.delta2 <= args.delta:
        raise UsageError(f"--delta2 ({args.delta2}) must exceed --delta ({args.delta})")
    P = _load(args.points)
    try:
        pair = build_gic_pair(P, args.alpha, args.delta, args.delta2, args.metric, max(args.k + 1, 2),
                              args.multiplier, args.seed)
    except SimplicialityError as e:
        raise ContractViolation(f"{e}; the vertex map is not simplicial, try a larger --multiplier")
    for r in (pair.small, pair.large):
        rep = verify_subsample(r.subsample, P)
        if not rep:
            raise SubsampleContractError(f"subsample check failed: {rep.violation}")
    r = induced_map_rank(pair.map, args.k)
    print(f"K1 counts {' '.join(map(str, pair.small.complex.counts()))}  |Q| {len(pair.small.subsample)}")
    print(f"K2 counts {' '.join(map(str, pair.large.complex.counts()))}  |Q'| {len(pair.large.subsample)}")
    print(f"beta_{args.k}(K1) {r.domain_betti}  beta_{args.k}(K2) {r.codomain_betti}")
    print(f"rank {r.rank}")
    return EXIT_OK


def sweep_rows(P: PointCloud, alpha: float, grid: list[float], metric: str = "euclidean", max_dim: int = 2,
               seed: int = 0, methods=("gic", "rips-subsample")) -> list[dict]:
    """One row per (method, delta); counts beyond max_dim are reported as 0."""
    G = build_neighborhood_graph(P, alpha)
    m = _metric(metric, G)
    rows = []
    for delta in grid:
        t0 = time.perf_counter()
        S = _checked_subsample(P, m, delta, seed)
        t_sub = time.perf_counter() - t0
        for method in methods:
            t1 = time.perf_counter()
            if method == "gic":
                K = build_gic(G, S, max_dim).complex
            elif method == "rips-subsample":
                K = rips_on_subsample(P, S, alpha, max_dim)
            else:
                raise UsageError(f"unknown method {method!r}")
            b = betti(K, 1)
            ms = (time.perf_counter() - t1 + t_sub) * 1000
            n = (K.counts() + [0, 0, 0, 0])[:4]
            rows.append({"method": method, "delta": delta, "Q": len(S), "n0": n[0], "n1": n[1], "n2": n[2],
                         "n3": n[3], "b0": b[0], "b1": b[1] if len(b) > 1 else 0, "ms": round(ms, 1)})
    rows.sort(key=lambda r: (r["method"], r["delta"]))
    return rows


def write_sweep_csv(fh, rows) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({**r, "delta": f"{r['delta']:g}"})


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    P = _load(args.points)
    rows = sweep_rows(P, args.alpha, grid, args.metric, args.max_dim, args.seed)
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            write_sweep_csv(fh, rows)
    else:
        write_sweep_csv(sys.stdout, rows)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    P = _load(args.points)
    if P.dim != 3:
        raise DimensionError(f"reconstruction needs points in R^3, got R^{P.dim}")
    r = reconstruct(P, args.alpha, args.delta, args.seed, args.sharp_angle)
    mesh = r.mesh
    if args.out:
        mesh.write_off(args.out)
    b = betti(mesh.as_complex(), 2) if mesh.triangles else [0, 0, 0]
    print(f"Q {r.q_size}  GIC counts {' '.join(map(str, r.gic_counts))}")
    for k, v in r.stages.items():
        print(f"{k} {v}")
    print(f"mesh vertices {len(mesh.vertices)} edges {len(mesh.edges())} triangles {len(mesh.triangles)}")
    print(f"euler {mesh.euler_characteristic()}")
    print("betti " + " ".join(map(str, b)))
    print(f"watertight {'yes' if mesh.is_watertight() else 'no'}")
    if args.check:
        X = P.points
        worst = max((circumradius(*X[list(t)]) for t in mesh.triangles), default=0.0)
        bad = find_intersections(mesh.as_complex(), X)
        print(f"max circumradius {worst:.6g} (bound {2 * args.delta:g})")
        print(f"improper intersections {len(bad)}")
    if not r.defects.ok:
        print("defects:")
        print(r.defects)
    return EXIT_OK


def cmd_sample(args) -> int:
    fn = samplers.DATASETS[args.dataset]
    kw = {} if args.noise is None else {"noise": args.noise}
    if kw and args.dataset not in ("circle", "annulus"):
        raise UsageError(f"--noise is not supported for {args.dataset}")
    X = fn(args.n, seed=args.seed, **kw)
    save_points(args.out, X)
    print(f"{args.dataset}: {len(X)} points in R^{X.shape[1]} -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gic", description="Graph induced complexes on point data.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, delta=True):
        p.add_argument("--points", required=True, help="points file (one row per point)")
        p.add_argument("--alpha", type=_positive("alpha"), required=True, help="neighborhood graph radius")
        if delta:
            p.add_argument("--delta", type=_positive("delta"), required=True, help="subsample sparsity/cover radius")
        p.add_argument("--metric", choices=("euclidean", "graph"), default="euclidean")
        p.add_argument("--seed", type=int, default=0, help="first point of the greedy subsample")

    p = sub.add_parser("build", help="build a GIC and write its maximal simplices")
    common(p)
    p.add_argument("--max-dim", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("betti", help="Betti numbers of a complex file")
    p.add_argument("complex")
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("pair-persist", help="rank of the map induced between a GIC pair")
    common(p)
    p.add_argument("--delta2", type=_positive("delta2"), required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--multiplier", type=_positive("multiplier"), default=4.0)
    p.set_defaults(func=cmd_pair_persist)

    p = sub.add_parser("sweep", help="delta sweep: GIC against Rips on the subsample, CSV output")
    common(p, delta=False)
    p.add_argument("--grid", required=True, help="a:b:step or comma-separated deltas")
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reconstruct", help="surface reconstruction in R^3, OFF output")
    common(p)
    p.add_argument("--sharp-angle", type=float, default=60.0, help="sharp edge threshold in degrees")
    p.add_argument("--check", action="store_true", help="also scan the output for large or intersecting triangles")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("sample", help="write a synthetic point cloud")
    p.add_argument("dataset", choices=sorted(samplers.DATASETS))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--noise", type=float, default=None, help="jitter (circle, annulus)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)
    return ap


DEFAULT_SIZES = {"circle": 200, "annulus": 400, "sphere": 2000, "torus": 3000, "klein": 5000}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "dataset", None) and args.n is None:
        args.n = DEFAULT_SIZES[args.dataset]
    if getattr(args, "max_dim", 1) is not None and getattr(args, "max_dim", 1) < 1:
        print("error: --max-dim must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DimensionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CONTRACT_ERRORS as e:
        print(f"contract violation: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except (OSError, GICError) as e:
        # unreadable files and malformed or empty inputs
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
