"""Running cases and suites, and writing report files."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .. import _json
from ..report import REPORT_FIELDS, VerificationReport
from .cases import InequalityCase, RunConfig, generate_instance, instance_seed, run_instance

__all__ = ["run_case", "run_suite", "SuiteSummary", "emit_report", "default_suite", "named_suites"]


def _one(args):
    case, index, config = args
    seed = instance_seed(config.seed, case, index)
    inst = generate_instance(case, seed, equality=(index == 0))
    return run_instance(inst, config)


def _instances_for(case: InequalityCase, config: RunConfig) -> int:
    # the Ehrhard grid search has no randomness
    return 1 if case.kind == "EhrhardCounterexample" else config.instances


def run_case(case: InequalityCase, config: RunConfig | None = None) -> list[VerificationReport]:
    """Reports for ``config.instances`` seeded instances; instance 0 is the equality instance."""
    config = config or RunConfig()
    jobs = [(case, i, config) for i in range(_instances_for(case, config))]
    return _map(jobs, config.jobs)


def _map(jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_one, jobs))  # map keeps submission order


@dataclass
class SuiteSummary:
    reports: list = field(default_factory=list)
    worst: dict = field(default_factory=dict)  # case name -> worst margin
    failures: list = field(default_factory=list)  # case names with a non-conditional failure

    @property
    def passed(self) -> bool:
        return not self.failures

    def table(self) -> str:
        lines = [f"{'case':<58} {'n':>3} {'worst margin':>14}  status"]
        by_case: dict[str, list] = {}
        for r in self.reports:
            by_case.setdefault(r.case, []).append(r)
        for name, reps in by_case.items():
            statuses = {r.status for r in reps}
            st = "FAIL" if name in self.failures else ("evidence" if statuses == {"evidence-only"} else "ok")
            lines.append(f"{name:<58} {len(reps):>3} {self.worst[name]:>14.6g}  {st}")
        return "\n".join(lines)


def run_suite(cases: Sequence[InequalityCase], config: RunConfig | None = None) -> SuiteSummary:
    config = config or RunConfig()
    jobs = [(c, i, config) for c in cases for i in range(_instances_for(c, config))]
    reports = _map(jobs, config.jobs)
    summary = SuiteSummary(reports)
    for r in reports:
        m = r.margin if math.isfinite(r.margin) else -math.inf
        summary.worst[r.case] = min(summary.worst.get(r.case, math.inf), m)
        if r.status in ("fail", "error") and r.case not in summary.failures:
            summary.failures.append(r.case)
    return summary


def named_suites() -> dict[str, list[InequalityCase]]:
    mk = InequalityCase.make
    default = [
        mk("BM_2D"),
        mk("PrekopaLeindler", t=0.25), mk("PrekopaLeindler", t=0.5), mk("PrekopaLeindler", t=0.75),
        mk("GaussianDimBM"),
        mk("GaussianBBL", alpha=-0.5), mk("GaussianBBL", alpha=0.0), mk("GaussianBBL", alpha=1.0),
        mk("RadialLogConcaveBM"), mk("RadialLogConcaveBM", w="w_softplus", a=1.0, p=1.5, t=0.3),
        mk("StarHomogeneousBBL", alpha=-0.25), mk("StarHomogeneousBBL", s=3.0, alpha=0.5),
        mk("WeightedConcaveBM"), mk("WeightedConcaveBM", alpha=0.0), mk("WeightedConcaveBM", alpha=-1 / 3),
        mk("WeightedConcaveBM", alpha=-1 / 3, r_form="displayed"),
        mk("LpBM"), mk("LpBM", p=0.9),
        mk("LpFunctional", p=0.0, alpha=0.0, inputs="unconditional"),
        mk("LpFunctional", p=1.0, alpha=-0.5),
        mk("LpFunctional", p=0.5, alpha=0.0),
        mk("LogBMUnconditional", family="box"), mk("LogBMUnconditional", family="polygon"),
        mk("SchneiderRatio", m=1, n=2), mk("SchneiderRatio", m=2, n=2),
        mk("SchneiderRatio", m=1, n=2, symmetric=False),
        mk("SchneiderRatio", m=1, n=3), mk("SchneiderRatio", m=2, n=3),
        mk("RogersShephardUpper", m=1, n=2), mk("RogersShephardUpper", m=2, n=2),
        mk("RogersShephardUpper", m=1, n=3),
        mk("BartheReverseBL", instance="lines_120"), mk("BartheReverseBL", instance="coordinate_planes"),
        mk("BartheReverseBL", instance="random"),
        mk("NilpotentBBL", alpha=0.0), mk("NilpotentBBL", alpha=-1 / 3), mk("NilpotentBBL", alpha=1.0),
        mk("MeanHolderFuzz"), mk("EhrhardCounterexample"), mk("TripleDualityCheck"),
    ]
    quick = [c for c in default if c.kind in ("BM_2D", "PrekopaLeindler", "LpBM", "LogBMUnconditional",
                                              "RogersShephardUpper", "MeanHolderFuzz")
             and not (c.kind == "RogersShephardUpper" and c["m"] > 1)]
    return {"default": default, "quick": quick}


def default_suite() -> list[InequalityCase]:
    return named_suites()["default"]


# --------------------------------------------------------------------------
# emission


def _csv_cell(v):
    if isinstance(v, float):
        return _json._num(v)
    return str(v)


def emit_report(reports: Iterable[VerificationReport], format: str = "json", path=None) -> str:
    """Write reports as a JSON array or CSV (floats to 17 significant digits); return the text."""
    rows = [r.row() for r in reports]
    if format == "json":
        text = _json.dumps(rows, indent=1) + "\n"
    elif format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for row in rows:
            w.writerow([_csv_cell(row[k]) for k in REPORT_FIELDS])
        text = buf.getvalue()
    else:
        raise ValueError("format must be json or csv")
    if path is not None:
        d = os.path.dirname(os.fspath(path))
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
