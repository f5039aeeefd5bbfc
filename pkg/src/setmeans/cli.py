"""Command-line front end.

Exit codes: 0 all requested checks pass (for ``check``: the verdict was
decided), 2 usage errors (unknown mean/property/builder, bad DSL), 3 an
evaluation came back Undefined.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click

from . import catalog as cat
from .constructions import (
    ConstructionFailed,
    build_oscillating,
    build_thin_finite_unbounded,
    build_thin_infinite,
    build_with_prescribed_mean,
    verify_certificate,
)
from .dsl import DslError, parse_set_expr, set_to_dsl
from .extension import WindowSchedule, cesaro_average, extend_mean, trace_to_csv_rows
from .means import get_mean, known_mean_names, mean_set_hf
from .properties import (
    check_continuity,
    check_infinite_behavior,
    check_internality,
    check_invariance,
    check_monotonicity,
)
from .reproduce import format_rows, run_reproduction
from .sets import SetDomainError, UnsupportedClipError, interval_set


def _load_mean(name: str):
    try:
        return get_mean(name)
    except KeyError:
        raise click.UsageError(
            f"unknown mean {name!r}; known: {', '.join(known_mean_names())}"
        )


def _load_set(expr: str):
    try:
        return parse_set_expr(expr)
    except DslError as exc:
        raise click.UsageError(f"bad set expression: {exc}")
    except (SetDomainError, ValueError) as exc:
        raise click.UsageError(f"bad set expression: {exc}")


@click.group()
def main():
    """Means of bounded and unbounded subsets of the real line."""


@main.command("eval")
@click.option("--mean", "mean_name", required=True, help="mean name, e.g. mmu:harmonic")
@click.option("--set", "set_expr", required=True, help="set expression in the DSL")
def eval_cmd(mean_name: str, set_expr: str):
    """Evaluate a mean on a set and print the value."""
    h = _load_set(set_expr)
    if mean_name == "mshf":
        try:
            itv = mean_set_hf(h)
        except SetDomainError as exc:
            click.echo(f"undefined ({exc})")
            sys.exit(3)
        click.echo(f"[{itv.lo},{itv.hi}]")
        return
    mean = _load_mean(mean_name)
    v = mean(h)
    click.echo(v.pretty())
    if v.kind == "undefined":
        sys.exit(3)


@main.command("extend")
@click.option("--mean", "mean_name", required=True)
@click.option("--set", "set_expr", required=True)
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="write the window trace as CSV (k,x,y,value)")
@click.option("--kmax", type=int, default=48, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
def extend_cmd(mean_name: str, set_expr: str, trace_path, kmax: int, tol: float):
    """Window-limit extension of a mean at a set."""
    mean = _load_mean(mean_name)
    h = _load_set(set_expr)
    sched = WindowSchedule(k_max=kmax, tol=tol)
    result = extend_mean(mean, h, sched)
    click.echo(result.pretty())
    if trace_path:
        with open(trace_path, "w") as fh:
            fh.write("\n".join(trace_to_csv_rows(result)) + "\n")
        click.echo(f"trace written to {trace_path}")
    if result.value.kind == "undefined":
        sys.exit(3)


@main.command("cesaro")
@click.option("--mean", "mean_name", required=True)
@click.option("--set", "set_expr", required=True)
@click.option("--pmax", type=int, default=64, show_default=True)
@click.option("--grid", type=int, default=256, show_default=True)
def cesaro_cmd(mean_name: str, set_expr: str, pmax: int, grid: int):
    """Double-average cross-check of the extension (CSV on stdout)."""
    mean = _load_mean(mean_name)
    h = _load_set(set_expr)
    ps = [p for p in (4, 8, 16, 32, 64, 128, 256) if p <= pmax] or [pmax]
    if ps[-1] != pmax:
        ps.append(pmax)
    points = cesaro_average(mean, h, tuple(ps), grid=grid)
    click.echo("p,value,undefined_fraction")
    for pt in points:
        click.echo(f"{pt.p},{pt.value:.12g},{pt.undefined_fraction:.6g}")


_PROPERTY_RUNNERS = {}


def _property(name):
    def mark(fn):
        _PROPERTY_RUNNERS[name] = fn
        return fn

    return mark


@_property("internality")
def _run_internality(mean):
    return check_internality(mean, "plain", cat.build_catalog())


@_property("strong-internality")
def _run_strong(mean):
    return check_internality(mean, "strong", cat.build_catalog())


@_property("i-strong-internality")
def _run_istrong(mean):
    return check_internality(mean, "i-strong", cat.build_catalog())


@_property("monotone")
def _run_monotone(mean):
    return check_monotonicity(mean, "monotone", cat.ordered_pairs(100))


@_property("base-monotone")
def _run_base(mean):
    return check_monotonicity(mean, "base", cat.disjoint_pairs(100))


@_property("strong-base-monotone")
def _run_strong_base(mean):
    return check_monotonicity(mean, "strong-base", cat.nested_triples(200))


@_property("clip-increasing")
def _run_clip_incr(mean):
    xs = [Fraction(2) ** k for k in range(0, 20)]
    cases = [(h, xs) for h in cat.build_catalog().values()]
    return check_monotonicity(mean, "clip-increasing", cases)


@_property("interval-infinite")
def _run_interval_infinite(mean):
    base = interval_set(1, 2) if mean.requires_positive_support else interval_set(0, 1)
    return check_infinite_behavior(mean, "interval-infinite", [(base, base)])


@_property("interval-continuous")
def _run_interval_cont(mean):
    h = interval_set(1, 2) if mean.requires_positive_support else interval_set(0, 1)
    return check_continuity(mean, "interval-continuous", h, other=h)


@_property("i-slice-continuous")
def _run_islice(mean):
    h = interval_set(1, 2) if mean.requires_positive_support else interval_set(0, 1)
    return check_continuity(mean, "i-slice", h)


@_property("finite")
def _run_finite(mean):
    return check_infinite_behavior(mean, "finite", cat.build_catalog().values())


@_property("subset-finite")
def _run_subset_finite(mean):
    from .sets import clip as clip_op
    from .extreal import POS_INF, NEG_INF

    cases = []
    for h in cat.build_catalog().values():
        for x, y in cat.random_clip_windows(3):
            sub = clip_op(h, x, y)
            if not sub.is_empty:
                cases.append((h, sub))
    return check_infinite_behavior(mean, "subset-finite", cases)


@_property("bounded-finite")
def _run_bounded_finite(mean):
    ks = [interval_set(30, 31), interval_set(-7, -6)]
    cases = [(h, k) for h in cat.build_catalog().values() for k in ks]
    return check_infinite_behavior(mean, "bounded-finite", cases)


@_property("limit-finite")
def _run_limit_finite(mean):
    return check_infinite_behavior(mean, "limit-finite", cat.build_catalog().values())


@_property("shift-invariant")
def _run_shift(mean):
    return check_invariance(mean, "shift", cat.shift_cases(60))


@_property("symmetric")
def _run_symmetric(mean):
    cases = [
        (cat.build_catalog()["sym-unit"], 0),
        (cat.build_catalog()["sym-geom-tail"], 0),
        (interval_set(2, 8), 5),
    ]
    return check_invariance(mean, "symmetric", cases)


@main.command("check")
@click.option("--mean", "mean_name", required=True)
@click.option("--property", "prop_name", required=True,
              help="one of: " + ", ".join(sorted(_PROPERTY_RUNNERS)))
@click.option("--json", "json_path", type=click.Path(), default=None)
def check_cmd(mean_name: str, prop_name: str, json_path):
    """Run a property checker; exit 0 when the verdict is decided."""
    mean = _load_mean(mean_name)
    runner = _PROPERTY_RUNNERS.get(prop_name)
    if runner is None:
        raise click.UsageError(
            f"unknown property {prop_name!r}; known: {', '.join(sorted(_PROPERTY_RUNNERS))}"
        )
    report = runner(mean)
    click.echo(report.to_text())
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(report.to_record(), fh, indent=2)
        click.echo(f"report written to {json_path}")
    if report.verdict == "inconclusive":
        sys.exit(1)


_BUILDERS = {
    "thin-infinite": lambda mean, eps, h, n: build_thin_infinite(mean, eps, n or 12),
    "oscillating": lambda mean, eps, h, n: build_oscillating(mean, eps, n or 8),
    "thin-finite-unbounded": lambda mean, eps, h, n: build_thin_finite_unbounded(
        mean, eps, n or 20
    ),
    "prescribed-mean": lambda mean, eps, h, n: build_with_prescribed_mean(mean, h),
}


@main.command("construct")
@click.option("--builder", "builder_name", required=True,
              help="one of: " + ", ".join(sorted(_BUILDERS)))
@click.option("--mean", "mean_name", default="avg1", show_default=True)
@click.option("--eps", default="1", show_default=True, help="measure budget (rational)")
@click.option("--h", "target", default="0", show_default=True,
              help="target mean for prescribed-mean (rational)")
@click.option("--n", "n_stages", type=int, default=None, help="number of stages")
def construct_cmd(builder_name, mean_name, eps, target, n_stages):
    """Run a constructive existence proof and verify its certificate."""
    mean = _load_mean(mean_name)
    builder = _BUILDERS.get(builder_name)
    if builder is None:
        raise click.UsageError(
            f"unknown builder {builder_name!r}; known: {', '.join(sorted(_BUILDERS))}"
        )
    try:
        built = builder(mean, Fraction(eps), Fraction(target), n_stages)
    except ConstructionFailed as exc:
        click.echo(f"construction-failed: {exc}")
        for line in exc.trace[-6:]:
            click.echo(f"  {line}")
        sys.exit(1)
    try:
        click.echo(set_to_dsl(built.result))
    except ValueError:
        click.echo(repr(built.result))
    for line in built.certificate.to_lines():
        click.echo(line)
    ok, lines = verify_certificate(mean, built)
    for line in lines:
        click.echo(f"verify: {line}")
    click.echo("certificate verified" if ok else "certificate FAILED verification")
    if not ok:
        sys.exit(1)


@main.command("reproduce")
def reproduce_cmd():
    """Reproduce the full golden-value table (one PASS/FAIL line per row)."""
    rows = run_reproduction()
    for line in format_rows(rows):
        click.echo(line)
    if not all(r.passed for r in rows):
        sys.exit(1)


if __name__ == "__main__":
    main()
