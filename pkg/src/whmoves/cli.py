"""Command-line front end.

Subcommands: enumerate, build-meta, spectrum, bottleneck, pipeline,
compare-random, trends, verify.  Exit status is 0 iff every assertion made
by the invoked experiment holds; failures leave a machine-readable record
on stdout (or at --out).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import bottleneck as bn
from . import experiments, metagraph
from .config import CapExceededError, EnumerationCaps, SolverConfig
from .cubic import enumerate_labelled, enumerate_unlabelled
from .spectral import bottom_k_spectrum, jacobi_spectrum


def _caps(args) -> EnumerationCaps:
    if args.cap_override:
        return EnumerationCaps(args.cap_override, args.cap_override)
    return EnumerationCaps()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _write_table(table: experiments.Table, args) -> None:
    _emit(table.to_json() if args.format == "json" else table.to_csv(), args.out)


def cmd_enumerate(args) -> int:
    fn = enumerate_labelled if args.mode == "labelled" else enumerate_unlabelled
    graphs = fn(args.n, _caps(args))
    _emit("\n".join(g.text() for g in graphs), args.out)
    return 0


def cmd_build_meta(args) -> int:
    G = metagraph.build(args.n, args.mode, _caps(args))
    metagraph.save(G, args.out)
    stats = G.degree_stats()
    summary = {
        "mode": G.mode,
        "n": G.n,
        "vertices": G.num_vertices,
        "edges": G.num_edges,
        "connected": G.is_connected(),
        "min_degree": stats.minimum,
        "max_degree": stats.maximum,
        "mean_degree": str(stats.mean),
    }
    print(json.dumps(summary, indent=2))
    if args.degrees_csv:
        with open(args.degrees_csv, "w") as fh:
            fh.write("degree,count\n")
            for deg, count in stats.histogram:
                fh.write(f"{deg},{count}\n")
    return 0


def cmd_spectrum(args) -> int:
    G = metagraph.load(args.meta)
    solver = SolverConfig()
    nv = G.num_vertices
    if nv > solver.iterative_budget:
        raise SystemExit(f"|V|={nv} beyond solver budget {solver.iterative_budget}")
    if nv <= solver.dense_fast_cap:
        spec = jacobi_spectrum(G.laplacian(), want_vectors=True, tol=solver.tol)
    else:
        spec = bottom_k_spectrum(nv, G.edge_array, k=args.k or 8)
    values = spec.eigenvalues if args.k is None else spec.eigenvalues[: args.k]
    payload = {
        "eigenvalues": [float(v) for v in values],
        "tol": spec.tol,
        "method": spec.method,
        "approximate": spec.approximate,
    }
    if spec.eigenvectors is not None:
        Q = G.laplacian() if not spec.approximate else None
        if Q is not None:
            payload["residuals"] = [float(r) for r in spec.residuals(Q)[: len(values)]]
        if args.vectors:
            payload["eigenvectors"] = [
                [float(x) for x in spec.eigenvectors[:, i]] for i in range(len(values))
            ]
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


def _json_ready(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _json_ready(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(obj)
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, int):
        return f"{obj.numerator}/{obj.denominator}"
    return obj


def cmd_bottleneck(args) -> int:
    G = metagraph.load(args.meta)
    report = bn.jcycle_bottleneck(G, args.j)
    payload = _json_ready(report)
    payload["phi"] = str(report.phi)
    payload["rayleigh"] = str(report.rayleigh)
    payload["density"] = str(report.density)
    del payload["vector"]  # the two-valued vector is determined by the sizes
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


def cmd_pipeline(args) -> int:
    G = metagraph.load(args.meta)
    report = bn.theorem11_pipeline(G, args.k)
    payload = _json_ready(report)
    for row in payload["reports"]:
        del row["vector"]
    _emit(json.dumps(payload, indent=2), args.out)
    return 0 if report.holds is not False else 1


def cmd_compare_random(args) -> int:
    table = experiments.run_compare_random(args.n, args.k, args.trials, args.seed)
    _write_table(table, args)
    return 0


def cmd_trends(args) -> int:
    ns = [int(x) for x in args.n_list.split(",")]
    table = experiments.run_trends(ns, args.mode, _caps(args))
    _write_table(table, args)
    return 0


def cmd_verify(args) -> int:
    table = experiments.verify_invariants(seed=args.seed, caps=_caps(args))
    _write_table(table, args)
    for row in table.rows:
        print(f"{'PASS' if row['pass'] else 'FAIL'} {row['check']}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="whmoves", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--cap-override", type=int, default=None, help="replace enumeration caps"
        )

    p = sub.add_parser("enumerate", help="list cubic multigraphs of one order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("labelled", "unlabelled"), required=True)
    common(p)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("build-meta", help="build and save a move graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("labelled", "unlabelled"), required=True)
    p.add_argument("--degrees-csv", default=None, help="also write the degree histogram")
    common(p)
    p.set_defaults(fn=cmd_build_meta)

    p = sub.add_parser("spectrum", help="Laplacian spectrum of a saved move graph")
    p.add_argument("--meta", required=True)
    p.add_argument("--k", type=int, default=None, help="emit only the k smallest")
    p.add_argument("--vectors", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("bottleneck", help="j-cycle bottleneck report")
    p.add_argument("--meta", required=True)
    p.add_argument("--j", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_bottleneck)

    p = sub.add_parser("pipeline", help="k-bottleneck eigenvalue-bound pipeline")
    p.add_argument("--meta", required=True)
    p.add_argument("--k", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("compare-random", help="move-graph spectrum vs random regular")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    common(p)
    p.set_defaults(fn=cmd_compare_random)

    p = sub.add_parser("trends", help="lambda2 / conductance / degree trends")
    p.add_argument("--n-list", required=True, help="comma-separated orders")
    p.add_argument("--mode", choices=("labelled", "unlabelled"), default="unlabelled")
    common(p)
    p.set_defaults(fn=cmd_trends)

    p = sub.add_parser("verify", help="run the module invariant battery")
    common(p)
    p.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except experiments.VerificationError as exc:
        record = {"status": "failed", "error": str(exc), "record": exc.record}
        print(json.dumps(record, indent=2))
        return 1
    except (
        bn.DegenerateBottleneckError,
        metagraph.FormatCorruptionError,
        CapExceededError,
        ValueError,
    ) as exc:
        print(json.dumps({"status": "failed", "error": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
