"""Scenario runner and reporting front end.

Verbs:
  run        execute every check in a scenario file
  sweep      sandwich reports over a (p, q) grid
  phi-audit  additivity / monotonicity / derivative audit of the set function

Exit codes: 0 when all invariant assertions hold, 1 on input errors,
2 when a sandwich or equality assertion fails.  Output is CSV with a
fixed column order; floats carry 17 significant digits, and identical
inputs with the same seed produce byte-identical files (wall times are
written as 0 unless --timing is passed).

Flags may also be set through environment variables prefixed with the
tool name: MIXEDOP_SEED, MIXEDOP_SAMPLES, MIXEDOP_OUT, MIXEDOP_TOLERANCE.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from pathlib import Path

from .boundedness import (
    criterion_general_result,
    exact_norm_decoupled,
    phi_derivative,
    phi_value,
    sandwich_report,
)
from .errors import (
    MixedOpError,
    SandwichViolationError,
    ScenarioError,
    UnsupportedExponentsError,
)
from .generators import random_density, random_partition
from .kernels import kappa
from .measure import integrate_change_of_variables
from .mixedcomp import criterion_mixed_composition, direct_integral_instance
from .scenario import Check, Scenario, load_scenario

COLUMNS = [
    "scenario_id",
    "check",
    "p",
    "q",
    "alpha",
    "beta",
    "kappa",
    "value",
    "lower",
    "upper",
    "oracle",
    "equality",
    "value_certificate",
    "lower_certificate",
    "upper_certificate",
    "status",
    "reason",
    "wall_ms",
]

ENV_PREFIX = "MIXEDOP_"
DEFAULT_TOLERANCE = 1e-9
CHANGE_OF_VARS_TOL = 1e-12
MIXEDCOMP_TOL = 1e-6

STATUS_OK = "ok"
STATUS_REJECTED = "rejected"
STATUS_VIOLATION = "violation"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return format(x, ".17g")
    return str(x)


def _row(**kw) -> dict:
    row = {c: None for c in COLUMNS}
    row["status"] = STATUS_OK
    row["reason"] = ""
    row["wall_ms"] = 0
    row.update(kw)
    return row


def _write_rows(rows: list[dict], out_path: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in COLUMNS])
    data = buf.getvalue()
    if out_path:
        Path(out_path).write_text(data, encoding="utf-8")
    else:
        sys.stdout.write(data)


def _reject_reason(p: float, q: float, alpha: float | None = None, beta: float | None = None) -> str | None:
    if q > p:
        return "p<q out of supported scope"
    if math.isinf(p):
        return "p=inf out of scope"
    if alpha is not None and beta is not None:
        if alpha > beta:
            return "alpha>beta out of supported scope"
        if math.isinf(beta):
            return "beta=inf out of scope"
    return None


def _phi_audit_value(kernel, p: float, q: float, partitions: int, seed: int) -> float:
    """Max relative violation of additivity, monotonicity along prefix
    unions, and the derivative inequality/equality, over seeded random
    partitions of T."""
    ids = list(kernel.relation.target.ids)
    mu = kernel.relation.target
    phi_total = phi_value(kernel, ids, p, q).value
    denom = phi_total if phi_total > 0 else 1.0
    worst = 0.0
    for k in range(partitions):
        blocks = random_partition(ids, seed * 100003 + k)
        block_values = [phi_value(kernel, b, p, q).value for b in blocks]
        worst = max(worst, abs(sum(block_values) - phi_total) / denom)
        prefix: list[str] = []
        prev = 0.0
        for block in blocks:
            prefix.extend(block)
            current = phi_value(kernel, prefix, p, q).value
            worst = max(worst, max(0.0, prev - current) / denom)
            prev = current
            deriv_sum = sum(phi_derivative(kernel, t, p, q) * mu.weight(t) for t in prefix)
            worst = max(worst, abs(deriv_sum - current) / denom)
    return worst


def _execute_check(
    sc: Scenario,
    check: Check,
    exps: tuple[float, ...],
    seed: int,
    samples: int,
    tolerance: float,
) -> dict:
    kind = check.kind
    p, q = exps[0], exps[1]
    alpha = exps[2] if len(exps) == 4 else None
    beta = exps[3] if len(exps) == 4 else None
    row = _row(check=kind, p=p, q=q, alpha=alpha, beta=beta)
    reason = _reject_reason(p, q, alpha, beta)
    if reason is not None:
        row.update(status=STATUS_REJECTED, reason=reason)
        return row
    if kind == "phi_audit" and p == q:
        row.update(status=STATUS_REJECTED, reason="p=q: set function undefined (kappa=inf)")
        return row
    row["kappa"] = kappa(p, q)

    if kind == "criterion":
        res = criterion_general_result(sc.kernel_for(check), p, q)
        row.update(value=res.value, value_certificate=res.certificate)
    elif kind == "exact_norm":
        res = exact_norm_decoupled(sc.kernel_for(check), p, q)
        row.update(value=res.value, value_certificate=res.certificate)
    elif kind == "sandwich":
        try:
            rep = sandwich_report(sc.kernel_for(check), p, q, samples, seed)
        except SandwichViolationError as e:
            row.update(status=STATUS_VIOLATION, reason=str(e))
            return row
        row.update(
            lower=rep.lower,
            upper=rep.upper,
            oracle=rep.oracle,
            equality=rep.equality,
            lower_certificate=rep.lower_certificate,
            upper_certificate=rep.upper_certificate,
        )
    elif kind == "phi_audit":
        worst = _phi_audit_value(sc.kernel_for(check), p, q, check.partitions, seed)
        row.update(value=worst)
        if worst > tolerance:
            row.update(status=STATUS_VIOLATION, reason=f"set-function violation {worst:.3e}")
    elif kind == "mixedcomp":
        if sc.mixed is None:
            raise ScenarioError("mixedcomp check needs a mixed_composition block")
        if alpha is None:
            raise ScenarioError("mixedcomp check needs [p, q, alpha, beta] exponents")
        value = criterion_mixed_composition(sc.mixed, p, q, alpha, beta)
        instance, _ = direct_integral_instance(sc.mixed, alpha, beta)
        brute = exact_norm_decoupled(instance, p, q)
        equal = abs(value - brute.value) <= MIXEDCOMP_TOL * max(value, 1.0)
        row.update(
            value=value,
            lower=brute.value,
            lower_certificate=brute.certificate,
            equality=equal,
        )
        if not equal:
            row.update(
                status=STATUS_VIOLATION,
                reason=f"criterion {value:.15g} vs operator norm {brute.value:.15g}",
            )
    elif kind == "change_of_vars":
        psi = sc.mapping_for(check)
        f = sc.density_for(check)
        if f is None:
            f = random_density(psi.target, seed)
        lhs, rhs = integrate_change_of_variables(f, psi, psi.source, psi.target)
        equal = abs(lhs - rhs) <= CHANGE_OF_VARS_TOL * max(abs(lhs), 1.0)
        row.update(value=lhs, lower=rhs, equality=equal)
        if not equal:
            row.update(status=STATUS_VIOLATION, reason=f"lhs {lhs:.17g} != rhs {rhs:.17g}")
    else:
        raise ScenarioError(f"unknown check kind {kind!r}")
    return row


def _finish(rows: list[dict], sc_id: str, timing: bool, out_path: str | None) -> int:
    for row in rows:
        row["scenario_id"] = sc_id
        if not timing:
            row["wall_ms"] = 0
    _write_rows(rows, out_path)
    return 2 if any(r["status"] == STATUS_VIOLATION for r in rows) else 0


def run(
    scenario_path: str,
    out_path: str | None = None,
    seed: int | None = None,
    samples: int | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    timing: bool = False,
) -> int:
    """Execute every check of a scenario; one CSV row per (check, tuple)."""
    sc = load_scenario(scenario_path)
    rows = []
    for check in sc.checks:
        use_seed = seed if seed is not None else check.seed
        use_samples = samples if samples is not None else check.samples
        for exps in check.exponents:
            t0 = time.perf_counter()
            row = _execute_check(sc, check, exps, use_seed, use_samples, tolerance)
            row["wall_ms"] = int(1000 * (time.perf_counter() - t0))
            rows.append(row)
    return _finish(rows, sc.id, timing, out_path)


def sweep(
    scenario_path: str,
    p_grid: list[float],
    q_grid: list[float],
    out_path: str | None = None,
    seed: int | None = None,
    samples: int | None = None,
    timing: bool = False,
) -> int:
    """Sandwich reports over the (p, q) grid; q > p rows are rejected."""
    if not p_grid or not q_grid:
        raise ScenarioError("sweep needs nonempty p and q grids")
    sc = load_scenario(scenario_path)
    check = Check(kind="sandwich", exponents=[])
    rows = []
    for p in p_grid:
        for q in q_grid:
            t0 = time.perf_counter()
            row = _execute_check(
                sc,
                check,
                (p, q),
                seed if seed is not None else 0,
                samples if samples is not None else 1000,
                DEFAULT_TOLERANCE,
            )
            row["wall_ms"] = int(1000 * (time.perf_counter() - t0))
            rows.append(row)
    return _finish(rows, sc.id, timing, out_path)


def phi_audit(
    scenario_path: str,
    partitions: int = 50,
    seed: int | None = None,
    out_path: str | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    timing: bool = False,
) -> int:
    """Audit the set function for every distinct (p, q) pair named by the
    scenario's checks; p = q pairs are rejected (kappa is infinite)."""
    sc = load_scenario(scenario_path)
    pairs: list[tuple[float, float]] = []
    for check in sc.checks:
        for exps in check.exponents:
            pq = (exps[0], exps[1])
            if pq not in pairs:
                pairs.append(pq)
    rows = []
    audit = Check(kind="phi_audit", exponents=[], partitions=partitions)
    for p, q in pairs:
        t0 = time.perf_counter()
        row = _execute_check(sc, audit, (p, q), seed if seed is not None else 0, 0, tolerance)
        row["wall_ms"] = int(1000 * (time.perf_counter() - t0))
        rows.append(row)
    return _finish(rows, sc.id, timing, out_path)


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def _grid(text: str, where: str) -> list[float]:
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.lower() == "inf":
            vals.append(math.inf)
        else:
            try:
                vals.append(float(tok))
            except ValueError:
                raise ScenarioError(f"{where}: bad number {tok!r}") from None
    if not vals:
        raise ScenarioError(f"{where}: empty grid")
    return vals


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mixedop",
        description="Scenario runner for mixed-operator boundedness checks.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(sp):
        sp.add_argument("scenario", help="path to a scenario JSON file")
        sp.add_argument("--out", default=None, help="output CSV path (default stdout)")
        sp.add_argument("--seed", type=int, default=None, help="override check seeds")
        sp.add_argument("--samples", type=int, default=None, help="override oracle sample counts")
        sp.add_argument("--tolerance", type=float, default=None, help="assertion tolerance")
        sp.add_argument("--timing", action="store_true", help="record wall times (breaks byte-determinism)")

    sp_run = sub.add_parser("run", help="execute every check in the scenario")
    add_common(sp_run)

    sp_sweep = sub.add_parser("sweep", help="sandwich reports over a (p, q) grid")
    add_common(sp_sweep)
    sp_sweep.add_argument("--p-grid", required=True, help="comma-separated p values")
    sp_sweep.add_argument("--q-grid", required=True, help="comma-separated q values")

    sp_audit = sub.add_parser("phi-audit", help="audit the set function on random partitions")
    add_common(sp_audit)
    sp_audit.add_argument("--partitions", type=int, default=50, help="random partitions per pair")

    args = parser.parse_args(argv)

    seed = args.seed if args.seed is not None else (int(_env("SEED")) if _env("SEED") else None)
    samples = args.samples if args.samples is not None else (
        int(_env("SAMPLES")) if _env("SAMPLES") else None
    )
    out = args.out if args.out is not None else _env("OUT")
    tolerance = args.tolerance if args.tolerance is not None else (
        float(_env("TOLERANCE")) if _env("TOLERANCE") else DEFAULT_TOLERANCE
    )

    try:
        if args.verb == "run":
            return run(args.scenario, out, seed, samples, tolerance, args.timing)
        if args.verb == "sweep":
            return sweep(
                args.scenario,
                _grid(args.p_grid, "--p-grid"),
                _grid(args.q_grid, "--q-grid"),
                out,
                seed,
                samples,
                args.timing,
            )
        if args.verb == "phi-audit":
            return phi_audit(args.scenario, args.partitions, seed, out, tolerance, args.timing)
        parser.error(f"unknown verb {args.verb!r}")
    except ScenarioError as e:
        print(f"mixedop: input error: {e}", file=sys.stderr)
        return 1
    except UnsupportedExponentsError as e:
        print(f"mixedop: input error: {e}", file=sys.stderr)
        return 1
    except MixedOpError as e:
        print(f"mixedop: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
