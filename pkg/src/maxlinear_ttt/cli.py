"""Command line entry point: ``ttt <subcommand> ...``.

Exit codes: 0 success, 1 domain error (JSON payload on stderr), 2 usage
error or unreadable input.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from typing import Iterator, TextIO

from . import io as tio
from .errors import CriterionViolated, TttError
from .graph import TttGraph
from .identify import (
    identifiability_check,
    match_subatoms,
    non_identifiability_witness,
    recover_theta,
)
from .laws import DiscreteLaw
from .limits import direct_limit, factorized_limit, laws_equal
from .model import MaxLinearModel
from .montecarlo import MIN_EXCEEDANCES, empirical_conditional, sample, tv_to_law
from .spectral import AngularMeasure, angular_measure, subvector_measure


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated node labels, got {text!r}")


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ttt", description="Max-linear models on trees of transitive tournaments.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name: str, help: str, weights: bool = True) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--graph", required=True, help="graph JSON file")
        if weights:
            sp.add_argument("--weights", required=True, help="weights JSON file")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        return sp

    sp = cmd("validate", "check the graph (and weights, if given)", weights=False)
    sp.add_argument("--weights", help="weights JSON file")

    cmd("coeffs", "print the coefficient matrix B")

    sp = cmd("angular", "angular measure of X or of a sub-vector")
    sp.add_argument("--subset", type=_int_list, help="observed nodes, e.g. 1,2,5")

    sp = cmd("limit", "conditional tail limit given X_u large")
    sp.add_argument("--cond-node", type=int, required=True)
    sp.add_argument("--factorized", action="store_true", help="also compute the product-of-increments law")
    sp.add_argument("--tol", type=_positive, default=1e-9)

    sp = cmd("identify", "recover edge weights from an observed angular measure", weights=False)
    sp.add_argument("--latent", type=_int_list, default=[], help="latent nodes, e.g. 1,3,7")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--measure", help="angular measure CSV of the observed nodes")
    src.add_argument("--weights", help="weights JSON; the observed measure is generated from it")
    sp.add_argument("--tol", type=_positive, default=1e-9)

    sp = cmd("witness", "alternative weights with the same law away from a node")
    sp.add_argument("--node", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)

    sp = cmd("simulate", "Monte Carlo estimate of a conditional tail limit")
    sp.add_argument("--n", type=int, default=200_000)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--cond-node", type=int, required=True)
    sp.add_argument("--q", type=float, default=0.999)
    sp.add_argument("--min-exceedances", type=int, default=MIN_EXCEEDANCES)
    return p


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _graph(args) -> TttGraph:
    return tio.read_graph(args.graph)


def _model(args, g: TttGraph) -> MaxLinearModel:
    return MaxLinearModel.from_weights(g, tio.read_weights(args.weights))


def _emit_law(law: DiscreteLaw, fh: TextIO, fmt: str, extra: dict | None = None) -> None:
    if fmt == "json":
        obj = tio.law_to_json(law)
        obj.update(extra or {})
        tio.write_json(obj, fh)
    else:
        tio.law_to_csv(law, fh)
        for k, v in (extra or {}).items():
            fh.write(f"# {k}: {v}\n")


def cmd_validate(args, fh) -> None:
    g = _graph(args)
    srcs = sorted(g.sources())
    vs = g.v_structures()
    report = {
        "nodes": len(g.nodes),
        "edges": len(g.edges),
        "sources": srcs,
        "v_structures": [list(t) for t in vs],
        "tournaments": [list(t.nodes) for t in g.tournaments],
        "unique_source": g.has_unique_source,
    }
    if args.weights:
        _model(args, g)
        report["weights"] = "valid"
    if args.format == "json":
        tio.write_json(report, fh)
        return
    fh.write(f"sources: {','.join(map(str, srcs))}\n")
    fh.write(f"v-structures: {len(vs)}\n")
    for a, b, c in vs:
        fh.write(f"  {a} -> {c} <- {b}\n")
    fh.write(f"tournaments: {' '.join('{' + ','.join(map(str, t.nodes)) + '}' for t in g.tournaments)}\n")
    if args.weights:
        fh.write("weights: valid\n")


def cmd_coeffs(args, fh) -> None:
    m = _model(args, _graph(args))
    if args.format == "json":
        tio.write_json({"nodes": list(m.nodes), "B": m.B.tolist()}, fh)
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["node"] + [str(v) for v in m.nodes])
    for v, row in zip(m.nodes, m.B):
        w.writerow([v] + [tio.fmt(x) for x in row])


def cmd_angular(args, fh) -> None:
    m = _model(args, _graph(args))
    if args.subset:
        H = subvector_measure(m, args.subset)
    else:
        H = angular_measure(m)
    extra = {"nodes": list(H.node_of_atom)} if H.node_of_atom else None
    _emit_law(H.law, fh, args.format, extra if args.format == "json" else None)


def cmd_limit(args, fh) -> None:
    m = _model(args, _graph(args))
    d = direct_limit(m, args.cond_node).law
    if not args.factorized:
        _emit_law(d, fh, args.format)
        return
    f = factorized_limit(m, args.cond_node).law
    cmp = laws_equal(d, f, args.tol)
    _emit_law(f, fh, args.format, {"tv_to_direct": cmp.tv_distance, "equal": cmp.equal})


def cmd_identify(args, fh) -> None:
    g = _graph(args)
    Ubar = set(args.latent)
    rep = identifiability_check(g, Ubar)
    if not rep.ok:
        raise CriterionViolated(
            "; ".join(v.message for v in rep.violations),
            violations=[{"node": v.node, "condition": v.condition, "message": v.message} for v in rep.violations],
        )
    U = [v for v in g.nodes if v not in Ubar]
    truth = None
    if args.weights:
        m = _model(args, g)
        truth = m.theta.as_dict()
        H = subvector_measure(m, U)
    else:
        H = AngularMeasure(tio.read_law_csv(args.measure))
    out = recover_theta(match_subatoms(H, g, Ubar), g, Ubar)
    obj = {
        "latent": sorted(Ubar),
        **tio.weights_to_dict(out.theta_hat),
        "diag": {str(v): c for v, c in sorted(out.diag.items())},
        "atom_assignment": {str(r): i for r, i in sorted(out.atom_assignment.items())},
        "diagnostics": out.diagnostics,
    }
    if truth is not None:
        err = max((abs(out.theta_hat[e] - c) for e, c in truth.items()), default=0.0)
        obj["max_abs_error"] = err
        obj["round_trip"] = err <= args.tol
    tio.write_json(obj, fh)


def cmd_witness(args, fh) -> None:
    m = _model(args, _graph(args))
    w = non_identifiability_witness(m, args.node, seed=args.seed)
    tio.write_json(
        {
            "node": w.node,
            "found": w.found,
            "lambda": w.lam,
            "theta_prime": tio.weights_to_dict(w.theta_prime)["weights"] if w.found else None,
            "max_stdf_gap": w.max_abs_diff,
            "grid_points": w.grid_points,
            "diagnostic": w.diagnostic,
        },
        fh,
    )


def cmd_simulate(args, fh) -> None:
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    m = _model(args, _graph(args))
    batch = sample(m, args.n, args.seed)
    est = empirical_conditional(batch, args.cond_node, args.q, min_exceedances=args.min_exceedances)
    tv = tv_to_law(est.law, est.exact)
    summary = {
        "tv": tv,
        "exceedances": est.exceedances,
        "threshold": est.threshold,
        "stray_mass": est.stray_mass,
        "n": args.n,
        "seed": args.seed,
    }
    emp = est.law.as_dict(12)
    exact = est.exact.as_dict(12)
    keys = sorted(emp.keys() | exact.keys())
    if args.format == "json":
        rows = [{"atom": list(k), "empirical": emp.get(k, 0.0), "exact": exact.get(k, 0.0)} for k in keys]
        tio.write_json({"labels": list(est.exact.labels), "rows": rows, **summary}, fh)
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([str(v) for v in est.exact.labels] + ["empirical", "exact"])
    for k in keys:
        w.writerow([tio.fmt(x) for x in k] + [tio.fmt(emp.get(k, 0.0)), tio.fmt(exact.get(k, 0.0))])
    fh.write("# " + ", ".join(f"{k}: {v}" for k, v in summary.items()) + "\n")


COMMANDS = {
    "validate": cmd_validate,
    "coeffs": cmd_coeffs,
    "angular": cmd_angular,
    "limit": cmd_limit,
    "identify": cmd_identify,
    "witness": cmd_witness,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with _output(args.out) as fh:
            COMMANDS[args.command](args, fh)
    except TttError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), default=str) + "\n")
        return 1
    except (OSError, ValueError, KeyError, UsageError) as exc:
        # unreadable or malformed input files
        sys.stderr.write(f"ttt {args.command}: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
