"""Command-line front end: ``gengsp <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 numerical failure (a JSON error
object is written to stderr in both failure cases).
"""
import argparse
import json
import os
import sys

import numpy as np

from . import cascade, experiments, graph, hilbert, sampling, signal
from .errors import GenGSPError, NumericalError, RankDeficient, UsageError
from .filters import filter_from_spec

BASIS_ALIASES = {
    "half_fourier": "half_integer_fourier",
    "half_integer_fourier": "half_integer_fourier",
    "fourier": "fourier_series",
    "fourier_series": "fourier_series",
    "chebyshev": "chebyshev",
    "graph": "graph_basis",
    "graph_basis": "graph_basis",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ parsing

def load_graph(text):
    """``gen:topology:n[:seed[:p]]`` or a path to a ``u,v,w`` edge CSV."""
    if text.startswith("gen:"):
        parts = text.split(":")[1:]
        if len(parts) < 2:
            raise UsageError("generator syntax is gen:topology:n[:seed[:p]]")
        topology, n = parts[0], int(parts[1])
        seed = int(parts[2]) if len(parts) > 2 else None
        p = float(parts[3]) if len(parts) > 3 else None
        if topology == "er" or seed is not None:
            return graph.random_weighted_graph(n, topology, seed, p)
        return graph.standard_graph(topology, n)
    if not os.path.exists(text):
        raise UsageError(f"graph file {text!r} not found")
    return graph.read_edge_csv(text)


def parse_basis(text, hilbert_graph=None, shift_kind="laplacian"):
    """``kind:M[:period]``."""
    parts = text.split(":")
    if len(parts) not in (2, 3) or parts[0] not in BASIS_ALIASES:
        raise UsageError(f"basis must look like kind:M[:period] with kind in {sorted(BASIS_ALIASES)}")
    kind = BASIS_ALIASES[parts[0]]
    try:
        truncation = int(parts[1])
        period = float(parts[2]) if len(parts) == 3 else None
    except ValueError as exc:
        raise UsageError(f"bad basis spec {text!r}") from exc
    g = load_graph(hilbert_graph) if kind == "graph_basis" and hilbert_graph else None
    return hilbert.make_basis(kind, truncation, period=period, graph=g, shift_kind=shift_kind)


def parse_subspace(text, shift, basis):
    """``k=K,B=B`` (first K eigenvectors, B lowest |freq_label|) or
    ``phi=0;1,xi=3;4`` with explicit positions."""
    fields = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"bad subspace item {item!r}")
        fields[key.strip()] = val.strip()
    try:
        if "phi" in fields:
            phi = tuple(int(x) for x in fields["phi"].split(";"))
        else:
            phi = tuple(range(int(fields["k"])))
        if "xi" in fields:
            xi = tuple(int(x) for x in fields["xi"].split(";"))
        else:
            xi = sampling.lowest(basis, int(fields["B"]))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad subspace spec {text!r}") from exc
    return sampling.SubspaceSpec(phi, xi).check(shift, basis)


def parse_strategy(text):
    """``vertex_subset``, ``distributed:t`` or
    ``random_async:uniform|truncnorm:count[:seed[:mu:sigma]]``."""
    parts = text.split(":")
    try:
        if parts[0] == "vertex_subset" and len(parts) == 1:
            return sampling.Strategy("vertex_subset"), None
        if parts[0] == "distributed" and len(parts) == 2:
            return sampling.Strategy("distributed", t=int(parts[1])), None
        if parts[0] == "random_async" and len(parts) >= 3:
            seed = int(parts[3]) if len(parts) > 3 else None
            mu = float(parts[4]) if len(parts) > 4 else 0.0
            sigma = float(parts[5]) if len(parts) > 5 else 1.0
            return (sampling.Strategy("random_async", distribution=parts[1], mu=mu,
                                      sigma=sigma, seed=seed), int(parts[2]))
    except ValueError as exc:
        raise UsageError(f"bad strategy {text!r}") from exc
    raise UsageError(f"bad strategy {text!r}")


def _context(args):
    shift = graph.build_shift(load_graph(args.graph), args.shift)
    basis = parse_basis(args.basis, getattr(args, "hilbert_graph", None), args.shift)
    return shift, basis


def _emit(obj):
    print(json.dumps(obj, sort_keys=True))


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


# --------------------------------------------------------------- commands

def cmd_transform(args):
    shift, basis = _context(args)
    if args.inverse:
        if not (args.grid and args.points):
            raise UsageError("--inverse needs --grid and --points")
        coeffs = signal.read_grid_csv(args.grid, (shift.n, basis.size))
        plan = sampling.read_plan_csv(args.points)
        f = signal.GeneralizedSignal(shift, basis, coeffs)
        values = f.evaluate(plan.vertices, plan.xs)
        _ensure_parent(args.out)
        signal.write_samples_csv(plan.vertices, plan.xs, values, args.out)
        return
    if not args.signal:
        raise UsageError("transform needs --signal (or --inverse)")
    vs, xs, vals = signal.read_samples_csv(args.signal)
    coeffs, res = signal.grid_from_samples(shift, basis, vs, xs, vals)
    if res.rank_deficient and not args.min_norm:
        raise RankDeficient(
            f"sample table determines only {res.rank} of {shift.n * basis.size} coefficients; "
            "pass --min-norm to accept the minimum-norm grid")
    _ensure_parent(args.out)
    signal.write_grid_csv(coeffs, args.out)
    _emit({"rank": res.rank, "residual_norm": res.residual_norm})


def cmd_filter(args):
    shift, basis = _context(args)
    with open(args.filter) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.filter}: invalid JSON ({exc})") from exc
    shape = (shift.n, basis.size)
    filt = filter_from_spec(spec, grid_loader=lambda p: signal.read_grid_csv(p, shape))
    coeffs = signal.read_grid_csv(args.grid, shape)
    out = filt.grid_apply(coeffs, shift, basis)
    _ensure_parent(args.out)
    signal.write_grid_csv(out, args.out)


def cmd_sample(args):
    shift, basis = _context(args)
    spec = parse_subspace(args.spec, shift, basis)
    strategy, count = parse_strategy(args.strategy)
    if count is not None:
        strategy = sampling.Strategy(strategy.name, distribution=strategy.distribution,
                                     mu=strategy.mu, sigma=strategy.sigma,
                                     counts=(count,) * shift.n, seed=strategy.seed)
    w = sampling.plan_samples(spec, shift, basis, strategy)
    _ensure_parent(args.out)
    sampling.write_plan_csv(w, args.out)
    _emit({"samples": len(w), "k_v": w.k_v(shift.n).tolist(),
           "determines": bool(sampling.determines(w, spec, shift, basis))})


def cmd_recover(args):
    shift, basis = _context(args)
    spec = parse_subspace(args.spec, shift, basis)
    vs, xs, vals = signal.read_samples_csv(args.samples)
    w = sampling.SampleSet(vs, xs)
    rec = sampling.recover(w, vals, spec, shift, basis)
    if rec.rank_deficient:
        raise RankDeficient(f"sampling matrix has rank {rec.rank} < {spec.dim}")
    _ensure_parent(args.out)
    signal.write_grid_csv(rec.coeffs, args.out)
    _emit({"rank": rec.rank, "residual_norm": rec.residual_norm})


def cmd_cascade(args):
    g = load_graph(args.graph)
    seeds = [int(s) for s in args.seeds.split(",")]
    trace = cascade.simulate(g, args.model, args.lambda_i, args.lambda_r, args.horizon,
                             seeds, args.rng_seed)
    _ensure_parent(args.out)
    cascade.write_trace_csv(trace, args.out)


def cmd_spectrum(args):
    shift = graph.build_shift(load_graph(args.graph), args.shift)
    trace = cascade.read_trace_csv(args.trace, shift.n, args.horizon)
    if args.method == "step":
        if not args.basis:
            raise UsageError("--method step needs --basis")
        basis = parse_basis(args.basis)
        spec = cascade.step_spectrum(trace, shift, basis)
    else:
        spec = cascade.tv_spectrum(trace, shift, args.slots)
    _ensure_parent(args.out)
    cascade.write_spectrum_csv(spec, args.out)
    _emit({"spread": cascade.spectral_spread(spec, shift.kind == "laplacian")})


def cmd_experiment(args):
    cfg = experiments.ExperimentConfig.from_json(args.config)
    report = experiments.run(cfg, args.out_dir)
    print(report.to_json())


def build_parser():
    p = _Parser(prog="gengsp", description="Generalized graph signal processing tools")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ctx(sp, basis=True):
        sp.add_argument("--graph", required=True, help="edge CSV or gen:topology:n[:seed[:p]]")
        sp.add_argument("--shift", choices=graph.SHIFT_KINDS, default="laplacian")
        if basis:
            sp.add_argument("--basis", required=True, help="kind:M[:period]")
            sp.add_argument("--hilbert-graph", help="graph for graph_basis (same syntax as --graph)")

    sp = sub.add_parser("transform", help="sample table -> coefficient grid (or back)")
    ctx(sp)
    sp.add_argument("--signal", help="samples CSV vertex,x,re,im")
    sp.add_argument("--inverse", action="store_true")
    sp.add_argument("--grid", help="coefficient grid CSV (with --inverse)")
    sp.add_argument("--points", help="plan CSV vertex,x (with --inverse)")
    sp.add_argument("--min-norm", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("filter", help="apply a JSON filter spec to a grid")
    ctx(sp)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--filter", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_filter)

    sp = sub.add_parser("sample", help="build a sample plan")
    ctx(sp)
    sp.add_argument("--spec", required=True, help="k=K,B=B or phi=i;j,xi=p;q")
    sp.add_argument("--strategy", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("recover", help="least-squares recovery from samples")
    ctx(sp)
    sp.add_argument("--spec", required=True)
    sp.add_argument("--samples", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_recover)

    sp = sub.add_parser("cascade", help="simulate SI/SIR/SIRI")
    ctx(sp, basis=False)
    sp.add_argument("--model", choices=cascade.MODELS, required=True)
    sp.add_argument("--lambda-i", type=float, required=True)
    sp.add_argument("--lambda-r", type=float)
    sp.add_argument("--horizon", type=float, required=True)
    sp.add_argument("--seeds", default="0")
    sp.add_argument("--rng-seed", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_cascade)

    sp = sub.add_parser("spectrum", help="spectrum of a cascade trace")
    ctx(sp, basis=False)
    sp.add_argument("--trace", required=True)
    sp.add_argument("--horizon", type=float, required=True)
    sp.add_argument("--method", choices=("step", "tv"), default="step")
    sp.add_argument("--basis")
    sp.add_argument("--slots", type=int, default=64)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("experiment", help="run an experiment config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_experiment)
    return p


def _fail(exc, code):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}) + "\n")
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except NumericalError as exc:
        return _fail(exc, 2)
    except (UsageError, GenGSPError, OSError, ValueError, KeyError, TypeError) as exc:
        return _fail(exc, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
