"""Run configured analyses and render deterministic reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .algebra import FullLattice, star_closure_check
from .config import CHECKS, AnalysisConfig, encode_matrix
from .lattice import join
from .matrix_core import coordinate_projector, opnorm, rank, rank_one
from .nogo import (
    random_selection,
    finite_sublattice,
    commuting_family,
    disjoint_family,
    h2_commutant_counterexample,
    h2_quasiboolean_obstruction,
    positive_existence_demo,
    von_neumann_spin_demo,
)
from .rules import build_rule, make_density_state
from .sampling import random_projection, rng_for
from .valuations import (
    build_measure,
    check_countable_additivity,
    check_quasiboolean,
    ideal_where,
    verify_statistics,
)

SCHEMA = "modalalg.report/1"
PASS, FAIL, NA = "pass", "fail", "not-applicable"
# Report floats are rounded to this many decimals so that noise far below
# every tolerance cannot change the bytes of a report.
DECIMALS = 12


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        y = round(float(x), DECIMALS)
        return 0.0 if y == 0 else y
    if isinstance(x, complex):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _matrix(M):
    return _num(encode_matrix(M)) if M is not None else None


@dataclass
class CheckResult:
    name: str
    status: str
    details: dict = field(default_factory=dict)
    witness: list | None = None

    def __post_init__(self):
        self.details = _num(self.details)

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "details": self.details, "witness": self.witness}

    @classmethod
    def from_dict(cls, d: dict) -> "CheckResult":
        return cls(d["name"], d["status"], d["details"], d["witness"])


@dataclass
class AnalysisReport:
    config: dict
    spectrum: list
    x_list: list | None
    checks: list
    schema: str = SCHEMA

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "config": self.config,
            "spectrum": self.spectrum,
            "x_list": self.x_list,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["config"], d["spectrum"], d["x_list"],
                   [CheckResult.from_dict(c) for c in d["checks"]], d["schema"])


# -- individual checks --------------------------------------------------------

def _check_closure(cfg, state, spec, ctx):
    d = FullLattice(cfg.dimension) if spec is None else spec
    rep = star_closure_check(d, sample_budget=cfg.samples["closure"], ctx=ctx,
                             seed=int(rng_for(cfg.seed, 1).integers(2**31)))
    wit = rep.witness if rep.witness is not None else (rep.disagreements[0] if rep.disagreements else None)
    return CheckResult("closure", PASS if rep.passed else FAIL, rep.summary(), _matrix(wit))


def _check_quasiboolean(cfg, state, spec, ctx):
    if spec is None:
        rng = rng_for(cfg.seed, 2)
        P = coordinate_projector([0], 2)
        Q = random_projection(2, rng, rank=1)
        obs = h2_quasiboolean_obstruction(P, Q, ctx)
        return CheckResult("quasiboolean", NA, {
            "reason": "the naive set is every projection, which is not of X-form; already two skew lines "
                      "in a plane admit no two-valued homomorphism",
            "obstruction_confirmed": obs.passed,
            "sample_pair_homomorphisms": obs.homomorphism_count,
        })
    L = finite_sublattice(spec, ctx)
    ideal = ideal_where(L, lambda E: opnorm(E @ state.W) <= ctx.atol)
    res = check_quasiboolean(L, ideal, ctx)
    details = {
        "lattice_size": len(L),
        "ideal_size": len(ideal),
        "atom_set": res.atom_set,
        "homomorphism_count": res.homomorphism_count,
        "routes_agree": res.by_characterization == res.by_enumeration,
    }
    wit = L.elements[res.unreached[0]] if res.unreached else None
    return CheckResult("quasiboolean", PASS if res.is_quasiboolean else FAIL, details, _matrix(wit))


def _check_statistics(cfg, state, spec, ctx):
    if spec is None:
        return CheckResult("statistics", NA, {"reason": "no X-form set, so no valuation measure is constructed"})
    measure = build_measure(spec, state, ctx)
    rng = rng_for(cfg.seed, 3)
    worst, n, bad = 0.0, 0, None
    for _ in range(cfg.samples["statistics"]):
        fam = commuting_family(spec, 3, rng, ctx)
        for size in (1, 2, 3):
            rep = verify_statistics(measure, fam[:size], [random_selection(A, rng, ctx) for A in fam[:size]], ctx)
            worst = max(worst, rep.difference)
            n += 1
            if not rep.passed and bad is None:
                bad = fam[0]
    details = {"weights": list(measure.weights), "total_weight": measure.total(),
               "checks": n, "max_difference": worst}
    return CheckResult("statistics", FAIL if bad is not None else PASS, details, _matrix(bad))


def _check_additivity(cfg, state, spec, ctx):
    if spec is None:
        return CheckResult("additivity", NA, {"reason": "no X-form set, so no valuation measure is constructed"})
    measure = build_measure(spec, state, ctx)
    rng = rng_for(cfg.seed, 4)
    worst_mu = worst_op = 0.0
    bad = None
    for _ in range(cfg.samples["additivity"]):
        fam = disjoint_family(spec, rng)
        rep = check_countable_additivity(measure, fam, ctx)
        worst_mu = max(worst_mu, abs(rep.measure_of_join - rep.sum_of_measures))
        worst_op = max(worst_op, rep.operator_residual)
        if not rep.passed and bad is None:
            bad = fam[0]
            for P in fam[1:]:
                bad = join(bad, P, ctx)
    details = {"families": cfg.samples["additivity"], "max_measure_difference": worst_mu,
               "max_operator_residual": worst_op}
    return CheckResult("additivity", FAIL if bad is not None else PASS, details, _matrix(bad))


def demo_spin(ctx) -> CheckResult:
    r = von_neumann_spin_demo(ctx)
    return CheckResult("demo:spin", PASS if r.passed else FAIL, {
        "min_residual": r.min_residual,
        "spectrum": list(r.spectrum),
        "assignments": r.assignments,
    })


def demo_h2_obstruction(ctx) -> CheckResult:
    P = coordinate_projector([0], 2)
    Q = rank_one([1, 1])
    r = h2_quasiboolean_obstruction(P, Q, ctx)
    return CheckResult("demo:h2-obstruction", PASS if r.passed else FAIL, {
        "lattice_size": r.lattice_size,
        "homomorphism_count": r.homomorphism_count,
        "common_resolving_elements": len(r.common),
        "quasiboolean_ideals": len(r.quasiboolean_ideals),
    })


def demo_h2_commutant(ctx) -> CheckResult:
    pair1 = (coordinate_projector([0], 2), coordinate_projector([1], 2))
    pair2 = (rank_one([1, 1]), rank_one([1, -1]))
    r = h2_commutant_counterexample(pair1, pair2, ctx)
    # the demo confirms a negative: its witness is part of the result
    return CheckResult("demo:h2-commutant", PASS if r.passed else FAIL, {
        "double_commutant_dim": r.double_commutant_dim,
        "witness_in_double_commutant": r.witness_in_double_commutant,
        "witness_min_distance": r.witness_min_distance,
        "closure_check_passed": r.closure_report.passed,
    }, _matrix(r.witness))


DEMOS = {"spin": demo_spin, "h2-obstruction": demo_h2_obstruction, "h2-commutant": demo_h2_commutant}


def _check_demos(cfg, state, spec, ctx):
    out = [fn(ctx) for fn in DEMOS.values()]
    if spec is not None:
        r = positive_existence_demo(state, cfg.rule, observable_count=cfg.samples["statistics"],
                                    seed=int(rng_for(cfg.seed, 5).integers(2**31)), ctx=ctx,
                                    bub=cfg.bub_input(), sample_budget=cfg.samples["closure"])
        out.append(CheckResult("demo:positive", PASS if r.passed else FAIL, {
            "x_ranks": r.x_ranks,
            "closure_passed": r.closure.passed,
            "quasiboolean": r.quasiboolean.is_quasiboolean,
            "lattice_size": r.lattice_size,
            "statistics_checks": r.statistics_checks,
            "max_statistics_difference": r.max_statistics_difference,
            "additivity_passed": all(a.passed for a in r.additivity),
            "incompatible_pair_found": r.incompatible_pair is not None,
            "notes": r.notes,
        }, _matrix(r.incompatible_pair[1]) if r.incompatible_pair else None))
    return out


RUNNERS = {
    "closure": _check_closure,
    "quasiboolean": _check_quasiboolean,
    "statistics": _check_statistics,
    "additivity": _check_additivity,
    "demos": _check_demos,
}


def run_analysis(cfg: AnalysisConfig) -> AnalysisReport:
    """Run the configured checks in a fixed order.

    Each check draws from its own seeded stream, so adding or removing a
    check never changes another check's numbers.  Failed checks are
    recorded; only structural errors propagate.
    """
    ctx = cfg.tolerances
    state = make_density_state(cfg.W, ctx)
    spec = None if cfg.rule == "naive" else build_rule(cfg.rule, state, cfg.bub_input(), ctx)
    spectrum = [{"value": lam, "rank": rank(P)} for lam, P in state.spectral]
    results = []
    for name in CHECKS:
        if name in cfg.checks:
            got = RUNNERS[name](cfg, state, spec, ctx)
            results.extend(got if isinstance(got, list) else [got])
    return AnalysisReport(
        config=_num(cfg.echo()),
        spectrum=_num(spectrum),
        x_list=None if spec is None else [_matrix(X) for X in spec.X_list],
        checks=results,
    )


def demo_report(name: str, ctx) -> AnalysisReport:
    return AnalysisReport(config={"demo": name}, spectrum=[], x_list=None, checks=[DEMOS[name](ctx)])


# -- rendering ----------------------------------------------------------------

def _fmt_scalar(z) -> str:
    re, im = z
    if im == 0:
        return f"{re:.6g}"
    return f"{re:.6g}{im:+.6g}i"


def _fmt_matrix(M, indent="    ") -> list:
    cells = [[_fmt_scalar(z) for z in row] for row in M]
    w = max(len(c) for row in cells for c in row)
    return [indent + "[ " + "  ".join(c.rjust(w) for c in row) + " ]" for row in cells]


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and len(v) > 8:
        return f"[{len(v)} entries]"
    return json.dumps(v, sort_keys=True)


def render_text(report: AnalysisReport) -> str:
    lines = [f"schema {report.schema}"]
    cfg = report.config
    if "rule" in cfg:
        lines.append(f"rule {cfg['rule']}  dimension {cfg['dimension']}  seed {cfg['seed']}")
    if report.spectrum:
        lines.append("spectrum of W (value x rank): " + ", ".join(
            f"{s['value']:.6g} x {s['rank']}" for s in report.spectrum))
    if report.x_list is not None:
        lines.append(f"X list: {len(report.x_list)} projection(s)")
    for c in report.checks:
        tag = {PASS: "PASS", FAIL: "FAIL", NA: "N/A "}[c.status]
        lines.append(f"{tag} {c.name}")
        for k in sorted(c.details):
            if k == "assignments":
                lines.append("    a   b   c   residual")
                for row in c.details[k]:
                    lines.append(f"   {row['a']:+d}  {row['b']:+d}  {row['c']:+d}   {row['residual']:.6f}")
                continue
            lines.append(f"    {k}: {_fmt_value(c.details[k])}")
        if c.witness is not None:
            lines.append("    witness:")
            lines.extend(_fmt_matrix(c.witness, "      "))
    lines.append("overall: " + ("PASS" if report.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def render_report(report: AnalysisReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "text":
        return render_text(report).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")
