"""Command line entry point: ``suplift <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .. import _json
from ..barthe import BartheInstance, constant_E, random_pd_floor
from ..estimates import Budget
from ..means import check_triple_properties, triple_from_json
from ..measure import Lebesgue
from ..polytope import DifferenceBody, Polytope, affine_combination, lp_combination, volume
from ..stepfn import LayeredFunction
from ..supconv import (AffineCombination, HeisenbergProduct, LevelSetLp, LpUnion, SchneiderShift,
                       SupConvolutionSpec, family_from_json, integrate_supconv, supconv_layered)
from .cases import InequalityCase, RunConfig, generate_instance, instance_seed, schneider_constant
from .runner import emit_report, named_suites, run_suite


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- verify -------------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.case:
        cases = [InequalityCase.parse(c) for c in args.case]
    else:
        suites = named_suites()
        if args.suite not in suites:
            print(f"unknown suite {args.suite!r}; choose from {sorted(suites)}", file=sys.stderr)
            return 2
        cases = suites[args.suite]
    cfg = RunConfig(seed=args.seed, instances=args.instances, samples=args.samples,
                    tolerance=args.tolerance, out=args.out, format=args.format, jobs=args.jobs)
    summary = run_suite(cases, cfg)
    if args.out:
        emit_report(summary.reports, args.format, args.out)
    print(summary.table(), file=sys.stderr)
    if summary.failures:
        print("failed: " + ", ".join(summary.failures), file=sys.stderr)
    return 0 if summary.passed else 1


# -- supconv ------------------------------------------------------------------

_FAMILIES = {
    "affine": lambda a: AffineCombination(a.t),
    "level_set_lp": lambda a: LevelSetLp(a.p, a.t),
    "lp_union": lambda a: LpUnion(a.p, a.t),
    "schneider": lambda a: SchneiderShift(a.m),
    "heisenberg": lambda a: HeisenbergProduct(),
}


def _family(args):
    if args.family in _FAMILIES:
        return _FAMILIES[args.family](args)
    return family_from_json(_read_json(args.family))


def cmd_supconv(args) -> int:
    fam = _family(args)
    fs = [LayeredFunction.from_json(_read_json(p)) for p in args.inputs]
    spec = SupConvolutionSpec.standard(fam, args.alpha)
    h = supconv_layered(spec, fs)
    m = Lebesgue(h.dim)
    try:
        integral = integrate_supconv(h, m, Budget.exact())
    except ValueError:
        integral = integrate_supconv(h, m, Budget.monte_carlo(args.samples, seed=args.seed))
    out = {"spec": spec.to_json(), "h": h.to_json(), "integral": integral.value,
           "integral_stderr": integral.stderr}
    _write(_json.dumps(out, indent=1) + "\n", args.out)
    return 0


# -- barthe -------------------------------------------------------------------


def cmd_barthe(args) -> int:
    inst = BartheInstance.from_json(_read_json(args.instance))
    res = constant_E(inst, starts=args.starts, seed=args.seed)
    floor = random_pd_floor(inst, args.floor_samples, args.seed) if args.floor_samples else None
    out = {"E": res.E, "objective": res.objective, "sampling_floor": floor,
           "geometric": inst.is_geometric(1e-9),
           "starts": [{"value": s.value, "grad_norm": s.grad_norm, "iterations": s.iterations,
                       "converged": s.converged} for s in res.starts]}
    _write(_json.dumps(out, indent=1) + "\n", args.out)
    return 0


# -- schneider ----------------------------------------------------------------


def cmd_schneider(args) -> int:
    K = Polytope.from_json(_read_json(args.body))
    n, m = K.dim, args.m
    D = DifferenceBody(K, m)
    vK = volume(K).value
    if n * m <= 3:
        vD = volume(D.polytope)
    else:
        vD = volume(D.polytope, Budget.monte_carlo(args.mc_samples, seed=args.seed))
    ratio = vD.value / vK**m
    out = {"n": n, "m": m, "ratio": ratio, "ratio_stderr": vD.stderr / vK**m,
           "rogers_shephard_bound": math.comb(n * (m + 1), n)}
    if n in (2, 3):
        out["schneider_constant"] = schneider_constant(m, n)[0]
    _write(_json.dumps(out, indent=1) + "\n", args.out)
    return 0


# -- means --------------------------------------------------------------------


def cmd_means(args) -> int:
    triple = triple_from_json(_read_json(args.check))
    rep = check_triple_properties(triple, args.samples, args.seed)
    out = {"all_hold": rep.all_hold, "config_error": rep.config_error,
           "checks": {k: {"holds": c.holds, "worst_margin": c.worst_margin, "witness": c.witness}
                      for k, c in rep.checks.items()}}
    _write(_json.dumps(out, indent=1) + "\n", args.out)
    return 0 if rep.all_hold else 1


# -- plotdata -----------------------------------------------------------------


def _plot_spec(case: InequalityCase):
    k, p = case.kind, case.p
    if k in ("PrekopaLeindler", "GaussianBBL", "StarHomogeneousBBL", "WeightedConcaveBM"):
        return SupConvolutionSpec.standard(AffineCombination(p["t"]), p.get("alpha") or 0.0)
    if k == "LpFunctional":
        return SupConvolutionSpec.standard(LevelSetLp(p["p"], p["t"]), p["alpha"])
    return None


def cmd_plotdata(args) -> int:
    case = InequalityCase.parse(args.case)
    inst = generate_instance(case, instance_seed(args.seed, case, 1))
    if inst.functions and inst.functions[0].dim in (1, 2) and _plot_spec(case) is not None:
        f, g = inst.functions
        h = supconv_layered(_plot_spec(case), [f, g])
        fns = (f.evaluate, g.evaluate, h.evaluate)
        boxes = [f.layers[0][1].bounding_box(), g.layers[0][1].bounding_box(), h.bounding_box()]
    elif len(inst.bodies) == 2 and inst.bodies[0].dim == 2:
        A, B = inst.bodies
        t = case.get("t", 0.5)
        if case.kind in ("LpBM", "LogBMUnconditional"):
            C = lp_combination(A, B, t, case.get("p", 0.0)).inner
        else:
            C = affine_combination(A, B, t)
        fns = tuple((lambda P: (lambda X: P.contains_points(X).astype(float)))(P) for P in (A, B, C))
        boxes = [P.bounding_box() for P in (A, B, C)]
    else:
        print(f"no plot data for {case.name}", file=sys.stderr)
        return 2
    lo = np.min([b[0] for b in boxes], axis=0) - 0.1
    hi = np.max([b[1] for b in boxes], axis=0) + 0.1
    res = args.resolution
    axes = [np.linspace(l, u, res) for l, u in zip(lo, hi)]
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo))
    cols = [X[:, i] for i in range(X.shape[1])] + [fn(X) for fn in fns]
    names = ["x", "y"][:X.shape[1]] + ["f", "g", "h"]
    lines = [",".join(names)]
    lines += [",".join(format(float(v), ".17g") for v in row) for row in zip(*cols)]
    _write("\n".join(lines) + "\n", args.out)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="suplift", description="Sup-convolution inequality laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run inequality cases and report margins")
    v.add_argument("--suite", default="default")
    v.add_argument("--case", action="append", help="Kind or Kind:key=value,...; repeatable")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--instances", type=int, default=3)
    v.add_argument("--samples", type=int, default=200_000)
    v.add_argument("--tolerance", type=float, default=1e-9)
    v.add_argument("--out")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("supconv", help="sup-convolution of layered functions given as JSON")
    s.add_argument("--family", required=True, help=f"one of {sorted(_FAMILIES)} or a family JSON file")
    s.add_argument("--inputs", nargs="+", required=True)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--t", type=float, default=0.5)
    s.add_argument("--p", type=float, default=0.0)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--samples", type=int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_supconv)

    b = sub.add_parser("barthe", help="estimate the reverse Brascamp-Lieb constant")
    b.add_argument("--instance", required=True)
    b.add_argument("--starts", type=int, default=8)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--floor-samples", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_barthe)

    k = sub.add_parser("schneider", help="difference-body volume ratio of a polytope")
    k.add_argument("--body", required=True)
    k.add_argument("--m", type=int, default=1)
    k.add_argument("--mc-samples", type=int, default=10**6)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out")
    k.set_defaults(func=cmd_schneider)

    mm = sub.add_parser("means", help="check the properties of a mean triple")
    mm.add_argument("--check", required=True)
    mm.add_argument("--samples", type=int, default=500)
    mm.add_argument("--seed", type=int, default=0)
    mm.add_argument("--out")
    mm.set_defaults(func=cmd_means)

    pd = sub.add_parser("plotdata", help="dump function samples of a case instance as CSV")
    pd.add_argument("--case", required=True)
    pd.add_argument("--out", required=True)
    pd.add_argument("--seed", type=int, default=0)
    pd.add_argument("--resolution", type=int, default=101)
    pd.set_defaults(func=cmd_plotdata)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return int(args.func(args))


if __name__ == "__main__":
    sys.exit(main())
