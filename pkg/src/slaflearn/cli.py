"""Command-line front end.

Exit codes: 0 success, 1 unexpected error, 2 usage error, 3 parse error
(PDDL, trace, snapshot or config), 4 learning failure (including
simulation), 5 extraction failure, 6 an oracle check found a mismatch.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from .errors import ParseError, PddlTypeError, SlafError, SolverFailure
from .pipeline import (
    ENGINES,
    BenchConfig,
    PipelineConfig,
    RunReport,
    StageError,
    bench as run_bench,
    extract as run_extract,
    load_config_file,
    load_problem,
    make_trace,
    run_pipeline,
)
from .simulator import POLICIES, write_trace

EXIT_OK, EXIT_OTHER, EXIT_USAGE, EXIT_PARSE, EXIT_LEARN, EXIT_EXTRACT, EXIT_CHECK = 0, 1, 2, 3, 4, 5, 6
STAGE_CODES = {"parse": EXIT_PARSE, "simulate": EXIT_LEARN, "learn": EXIT_LEARN, "extract": EXIT_EXTRACT}

D = PipelineConfig()


def _guard(fn):
    """Map library errors to the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StageError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(STAGE_CODES.get(e.stage, EXIT_OTHER))
        except (ParseError, PddlTypeError) as e:
            click.echo(f"parse error: {e}", err=True)
            sys.exit(EXIT_PARSE)
        except SolverFailure as e:
            click.echo(f"extraction error: {e}", err=True)
            sys.exit(EXIT_EXTRACT)
        except SlafError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_LEARN)
        except ValueError as e:
            raise click.UsageError(str(e)) from None

    return wrapper


@click.group(context_settings={"show_default": True, "help_option_names": ["-h", "--help"]})
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              help="TOML file of option defaults; a table named after a command applies to that command only.")
@click.pass_context
def main(ctx: click.Context, config):
    """Learn STRIPS action models from partially observed action traces."""
    if config:
        commands = ("simulate", "learn", "extract", "bench", "oracle-check")
        try:
            ctx.default_map = {cmd: load_config_file(config, cmd) for cmd in commands}
        except Exception as e:  # tomllib raises its own decode error type
            click.echo(f"config error: {e}", err=True)
            sys.exit(EXIT_PARSE)


def domain_options(fn):
    fn = click.option("--problem", type=click.Path(exists=True, dir_okay=False), default=None,
                      help="Problem file (default: the fixture's problem).")(fn)
    fn = click.option("--domain", default=D.domain,
                      help="Bundled fixture (blocksworld, driverlog, zenotravel, depots, locked-door) or a domain file.")(fn)
    return fn


def trace_options(fn):
    fn = click.option("--coverage-k", type=int, default=None,
                      help="Observe every fluent at least once per window of this many steps.")(fn)
    fn = click.option("--policy", type=click.Choice(POLICIES), default=None,
                      help="Action selection (default: any-action for pre, executable-only otherwise).")(fn)
    fn = click.option("--seed", type=int, default=D.seed)(fn)
    fn = click.option("--obs-per-step", type=int, default=D.obs_per_step, help="Fluents observed after each step.")(fn)
    fn = click.option("--steps", type=int, default=D.steps)(fn)
    return fn


def extraction_options(fn):
    fn = click.option("--dump-cnf", is_flag=True, default=D.dump_cnf, help="Also write the SAT instance as DIMACS.")(fn)
    fn = click.option("--solver", default=D.solver,
                      help="'dpll' for the embedded solver, or a command reading a DIMACS file path.")(fn)
    fn = click.option("--bias-1to1/--no-bias-1to1", default=D.bias_1to1,
                      help="Add the clauses tying each effect to a precondition on its complement.")(fn)
    fn = click.option("--schematize/--no-schematize", default=D.schematize,
                      help="Share learned propositions across all groundings of an action schema.")(fn)
    return fn


# ---------------------------------------------------------------- simulate

@main.command()
@domain_options
@trace_options
@click.option("--out", type=click.Path(dir_okay=False, allow_dash=True), default="-", help="Trace file (JSONL).")
@_guard
def simulate(domain, problem, steps, obs_per_step, seed, policy, coverage_k, out):
    """Generate a random trace from the domain's hidden model."""
    cfg = PipelineConfig(domain=domain, problem=problem, steps=steps, obs_per_step=obs_per_step, seed=seed,
                         policy=policy, coverage_k=coverage_k)
    prob = load_problem(domain, problem)
    try:
        trace = make_trace(cfg, prob)
    except SlafError as e:
        raise StageError("simulate", str(e)) from None
    with click.open_file(out, "w") as fh:
        write_trace(trace, prob.domain, fh)


# ---------------------------------------------------------------- learn

def _print_report(r: RunReport) -> None:
    steps = f"; {r.steps} steps" if r.steps >= 0 else ""
    click.echo(f"domain {r.domain}: {r.fluents} fluents, {r.actions} actions; engine {r.engine}{steps}")
    if r.records:
        click.echo("step  slaf_s  ms/step  dag_nodes  clauses  max_len")
        for x in r.records:
            cells = [x.dag_nodes, x.clauses, x.max_clause_len]
            click.echo(f"{x.step:>4} {x.slaf_seconds:7.3f} {x.step_seconds * 1e3:8.3f} "
                       + " ".join(f"{'-' if c is None else c:>9}" for c in cells))
    if r.steps >= 0:
        click.echo(f"SLAF time {r.slaf_seconds:.3f}s")
    if r.final_belief is not None:
        click.echo(f"final belief ({len(r.final_belief)} pairs):")
        for line in r.final_belief:
            click.echo("  " + line)
    if r.extraction:
        e = r.extraction
        click.echo(f"extraction {e['seconds']:.3f}s: {e['clauses']} clauses, {e['variables']} variables, "
                   f"{e['solver'].get('solver_calls', 1)} solver calls")
    if r.bias_dropped:
        click.echo("bias dropped (contradicted by the trace): " + ", ".join(r.bias_dropped))
    if r.golden_mismatches is not None:
        click.echo(f"effect rows differing from the generating domain: {len(r.golden_mismatches)}")
        for line in r.golden_mismatches:
            click.echo("  " + line)
    if r.anchors:
        a = r.anchors
        click.echo(f"reference run: {a['clauses']} clauses, {a['variables']} variables, "
                   f"SLAF {a['slaf_seconds']}s, inference {a['inference_seconds']}s")
    if r.model is not None:
        for line in r.model.lines():
            click.echo(line)
    for k, v in r.files.items():
        click.echo(f"wrote {k}: {v}")


@main.command()
@domain_options
@click.option("--engine", type=click.Choice(ENGINES), default=D.engine)
@trace_options
@extraction_options
@click.option("--record-every", type=int, default=D.record_every, help="Record metrics every this many steps.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Write trace, report.json, metrics.csv, metrics.png, model.sexp and more here.")
@click.option("--trace", default=None,
              help="Learn from this trace file (or a fixture's bundled trace) instead of simulating.")
@click.option("--off-parameter", type=click.Choice(["assume-keeps", "keep-ground"]), default=D.off_parameter,
              help="How a schematized run treats fluents outside an action's arguments.")
@click.option("--failure-mode", type=click.Choice(["append", "distribute"]), default=D.failure_mode,
              help="How the known-precondition engine records a failed action.")
@click.option("--measure-cnf/--no-measure-cnf", default=D.measure_cnf, help="Render the belief to CNF at each record.")
@click.option("--extract/--no-extract", default=D.extract)
@click.option("--needs-provenance/--no-needs-provenance", default=D.needs_provenance,
              help="Classify each learned precondition as forced by data, by the bias, or a solver choice.")
@click.option("--figures/--no-figures", default=D.figures)
@click.option("--candidate", "candidates", multiple=True,
              help="Oracle engine: a candidate domain file (repeatable).")
@click.option("--quiet", is_flag=True, help="Only print the learned model.")
@_guard
def learn(domain, problem, engine, steps, obs_per_step, seed, policy, coverage_k, schematize, bias_1to1, solver,
          dump_cnf, record_every, out_dir, trace, off_parameter, failure_mode, measure_cnf, extract,
          needs_provenance, figures, candidates, quiet):
    """Simulate (or read) a trace, learn, extract a model and report."""
    cfg = PipelineConfig(
        domain=domain, problem=problem, engine=engine, steps=steps, obs_per_step=obs_per_step, seed=seed,
        policy=policy, schematize=schematize, bias_1to1=bias_1to1, solver=solver, record_every=record_every,
        out_dir=out_dir, trace=trace, coverage_k=coverage_k, off_parameter=off_parameter,
        failure_mode=failure_mode, measure_cnf=measure_cnf, extract=extract, needs_provenance=needs_provenance,
        dump_cnf=dump_cnf, figures=figures, candidates=list(candidates) or None,
    )
    r = run_pipeline(cfg)
    if quiet:
        if r.model is not None:
            for line in r.model.lines():
                click.echo(line)
    else:
        _print_report(r)


# ---------------------------------------------------------------- extract

@main.command()
@click.option("--belief", "belief_file", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Belief snapshot written by 'learn --out-dir'.")
@domain_options
@extraction_options
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@_guard
def extract(belief_file, domain, problem, schematize, bias_1to1, solver, dump_cnf, out_dir):
    """Extract an action model from a saved belief snapshot."""
    from .engines import PreBelief, load_belief
    from .extraction import emit_model, schema_keys, ground_keys
    from .logic.dimacs import write_dimacs

    prob = load_problem(domain, problem)
    v = prob.domain.vocab
    keys = schema_keys(prob.smap) if schematize else ground_keys(prob.domain)
    for k in keys:
        for slot in range(5):
            v.group_atom(k, slot)
    try:
        belief = load_belief(Path(belief_file).read_text(), v.lookup)
    except (KeyError, IndexError, ValueError) as e:
        raise StageError("parse", f"bad belief snapshot: {e}") from None
    engine = "pre" if isinstance(belief, PreBelief) else "as"
    cfg = PipelineConfig(domain=domain, problem=problem, engine=engine, schematize=schematize,
                         bias_1to1=bias_1to1, solver=solver, out_dir=out_dir, dump_cnf=dump_cnf)
    d = prob.domain
    report = RunReport(cfg.to_dict(), d.name, d.n_fluents, d.n_actions, engine, steps=-1)
    inst = run_extract(cfg, prob, belief, report)
    _print_report(report)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "model.sexp", "w") as fh:
            emit_model(report.model, fh)
        if dump_cnf and inst is not None:
            with open(out / "instance.cnf", "w") as fh:
                write_dimacs(inst.cnf, fh, v.name)
        (out / "report.json").write_text(report.to_json())


# ---------------------------------------------------------------- bench

def _csv_list(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


@main.command()
@click.option("--domains", default="blocksworld,driverlog,zenotravel,depots", help="Comma-separated fixtures.")
@click.option("--sizes", default="fixture",
              help="Comma-separated problem sizes for the generators, or 'fixture' for the bundled problem.")
@click.option("--engines", default="as", help="Comma-separated engines.")
@click.option("--steps", type=int, default=5000)
@click.option("--obs-per-step", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--record-every", type=int, default=200)
@click.option("--size-metric", type=click.Choice(["dag", "clauses"]), default="dag",
              help="formula_size column: shared DAG nodes, or clauses of the rendered CNF.")
@click.option("--coverage-k", type=int, default=None)
@click.option("--jobs", type=int, default=1, help="Cells run in this many processes.")
@click.option("--out-dir", type=click.Path(file_okay=False), default="bench-out")
@click.option("--figures/--no-figures", default=True)
@_guard
def bench(domains, sizes, engines, steps, obs_per_step, seed, record_every, size_metric, coverage_k, jobs, out_dir,
          figures):
    """Time-per-step and formula-size sweep; writes bench.csv, bench.dat and figures."""
    size_list = [None if s == "fixture" else int(s) for s in _csv_list(sizes)]
    eng = _csv_list(engines)
    for e in eng:
        if e not in ENGINES:
            raise click.BadParameter(f"unknown engine {e}", param_hint="--engines")
    bc = BenchConfig(_csv_list(domains), size_list, eng, steps, obs_per_step, seed, record_every, size_metric,
                     coverage_k, jobs, out_dir, figures)
    res = run_bench(bc)
    click.echo(f"{len(res.rows)} rows written to {Path(out_dir) / 'bench.csv'}")
    for dom, size, e, msg in res.failures:
        click.echo(f"cell failed: {dom} size={size or 'fixture'} {e}: {msg}", err=True)


# ---------------------------------------------------------------- oracle-check

@main.command("oracle-check")
@click.option("--instances", type=int, default=200)
@click.option("--seed", type=int, default=0)
@click.option("--checks", default="as,slaf0,pre", help="Comma-separated subset of as, slaf0, pre.")
@_guard
def oracle_check(instances, seed, checks):
    """Compare the engines with exact pair-set filtering on random tiny domains."""
    from .checks import check_as_oracle, check_pre, check_slaf0_as

    table = {"as": check_as_oracle, "slaf0": check_slaf0_as, "pre": check_pre}
    ok = True
    for name in _csv_list(checks):
        if name not in table:
            raise click.BadParameter(f"unknown check {name}", param_hint="--checks")
        r = table[name](instances, seed)
        click.echo(r.line())
        ok &= r.ok
    sys.exit(EXIT_OK if ok else EXIT_CHECK)


if __name__ == "__main__":
    main()
