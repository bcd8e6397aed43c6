"""End-to-end runs: simulate, learn, extract, emit; plus the benchmark sweep."""

from __future__ import annotations

import csv
import dataclasses
import gc
import io
import json
import shlex
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .action_model.domain import GroundDomain, State, StripsActionModel
from .action_model.oracle import (
    OracleBelief,
    OracleStep,
    VectorOracle,
    model_space,
    oracle_slaf,
    satisfies,
)
from .action_model.tiny import TinyVocab
from .engines import (
    AsEngine,
    BeliefRenderer,
    FluentFactoredBelief,
    GroundProvider,
    LiteralSlafTable,
    PreBelief,
    PreEngine,
    dump_belief,
    factored_step,
    slaf0_step,
)
from .errors import SlafError, VocabularyTooLarge
from .extraction import (
    DpllSolver,
    EffectRow,
    ExternalSolver,
    Label,
    SchemaActionModel,
    consistent_bias,
    default_phase,
    emit_model,
    extract_model,
    ground_keys,
    make_instance,
    model_to_pddl,
    query_prop,
    row_namer,
    schema_keys,
    schematize,
)
from .logic.atoms import SLOT_NEEDS_NEG, SLOT_NEEDS_POS
from .logic.cnf import CnfFormula, CnfRenderer, make_axiom_reducer
from .logic.dimacs import write_dimacs
from .logic.nnf import Node, dag_size, term
from .pddl import (
    CANDIDATES,
    FIXTURES,
    GENERATORS,
    TRACES,
    DomainSchema,
    ProblemInstance,
    SchemaMap,
    SchemaProvider,
    fixture_text,
    golden_rows,
    ground,
    parse_domain,
    parse_problem,
    strips_model,
)
from .simulator import Trace, TraceConfig, generate_trace, load_trace, read_trace, save_trace

ENGINES = ("oracle", "slaf0", "factored", "as", "pre")

# revised-language SLAF0 multiplies out the effect axioms; keep it to toy sizes
SLAF0_MAX_ROWS = 16

# order-of-magnitude reference figures for the bundled fixtures (not tolerances)
ANCHORS = {
    "blocksworld": {"fluents": 209, "clauses": 235492, "variables": 187, "slaf_seconds": 2.203, "inference_seconds": 42.312},
    "driverlog": {"fluents": 231, "clauses": 82338, "variables": 210, "slaf_seconds": 2.469, "inference_seconds": 8.406},
    "zenotravel": {"fluents": 91, "clauses": 71119, "variables": 138, "slaf_seconds": 1.109, "inference_seconds": 11.015},
    "depots": {"fluents": 250, "clauses": 85359, "variables": 236, "slaf_seconds": 2.797, "inference_seconds": 8.062},
}


class StageError(SlafError):
    """A failure tagged with the pipeline stage that raised it."""

    def __init__(self, stage: str, msg: str):
        super().__init__(f"{stage}: {msg}")
        self.stage = stage


# ---------------------------------------------------------------- configuration

@dataclass
class PipelineConfig:
    domain: str = "blocksworld"  # fixture name or domain file
    problem: Optional[str] = None  # problem file; default: the fixture's problem
    engine: str = "as"
    steps: int = 1000
    obs_per_step: int = 10
    seed: int = 0
    policy: Optional[str] = None  # default: any-action for pre, executable-only otherwise
    schematize: bool = True
    bias_1to1: bool = True
    solver: str = "dpll"  # or a command line for an external DIMACS solver
    record_every: int = 200
    out_dir: Optional[str] = None
    trace: Optional[str] = None  # trace file (or fixture name) instead of simulating
    coverage_k: Optional[int] = None
    off_parameter: str = "assume-keeps"
    failure_mode: str = "append"
    measure_cnf: bool = True
    extract: bool = True
    prefer_keeps: bool = True
    needs_provenance: bool = True
    dump_cnf: bool = False
    figures: bool = True
    candidates: Optional[list] = None  # oracle: alternative domain files

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if self.record_every < 1:
            raise ValueError("record_every must be positive")

    @property
    def effective_policy(self) -> str:
        if self.policy is not None:
            return self.policy
        return "any-action" if self.engine == "pre" else "executable-only"

    @classmethod
    def from_mapping(cls, d: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        kw = {}
        for k, v in d.items():
            key = k.replace("-", "_")
            if key not in names:
                raise ValueError(f"unknown configuration key {k!r}")
            kw[key] = v
        return cls(**kw)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config_file(path: str | Path, section: Optional[str] = None) -> dict:
    """Settings from a TOML file: top-level keys, overridden by the ``section`` table when given.

    Dashes in keys are read as underscores.
    """
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    out = {k.replace("-", "_"): v for k, v in data.items() if not isinstance(v, dict)}
    if section is not None:
        out.update({k.replace("-", "_"): v for k, v in data.get(section, {}).items()})
    return out


# ---------------------------------------------------------------- loading

@dataclass
class Problem:
    schema: DomainSchema
    instance: ProblemInstance
    domain: GroundDomain
    smap: SchemaMap
    init: State
    hidden: StripsActionModel
    fixture: Optional[str] = None


def load_problem(domain: str, problem: Optional[str] = None, size: Optional[int] = None) -> Problem:
    """Parse and ground a fixture name or a domain file, with an optional problem file or generated size."""
    fixture = domain if domain in FIXTURES else None
    try:
        text = fixture_text(FIXTURES[domain][0]) if fixture else Path(domain).read_text()
        schema = parse_domain(text)
        if problem is not None:
            ptext = Path(problem).read_text()
        elif size is not None:
            if fixture not in GENERATORS:
                raise StageError("parse", f"no problem generator for {domain}")
            ptext = GENERATORS[fixture](size)
        elif fixture:
            ptext = fixture_text(FIXTURES[domain][1])
        else:
            raise StageError("parse", "a problem file is required for a domain file")
        inst = parse_problem(ptext, schema)
    except OSError as e:
        raise StageError("parse", str(e)) from None
    d, smap, init = ground(schema, inst)
    return Problem(schema, inst, d, smap, init, strips_model(smap), fixture)


def _load_trace(spec: str, domain: GroundDomain) -> Trace:
    if spec in TRACES:
        return read_trace(io.StringIO(fixture_text(TRACES[spec])), domain)
    return load_trace(spec, domain)


def make_trace(cfg: PipelineConfig, prob: Problem) -> Trace:
    if cfg.trace is not None:
        return _load_trace(cfg.trace, prob.domain)
    tc = TraceConfig(cfg.steps, cfg.obs_per_step, cfg.effective_policy, cfg.seed, cfg.record_every,
                     coverage_k=cfg.coverage_k)
    return generate_trace(prob.domain, prob.hidden, prob.init, tc)


def make_solver(spec: str, inst=None):
    if spec == "dpll":
        return DpllSolver(default_phase(inst.vocab) if inst is not None else None)
    return ExternalSolver(shlex.split(spec))


# ---------------------------------------------------------------- learners

class _Learner:
    """Uniform step interface over the engines, with size measurement."""

    belief = None

    def step(self, a: int, obs: tuple, ok: bool) -> None:
        raise NotImplementedError

    def dag_nodes(self) -> Optional[int]:
        return None

    def cnf(self) -> Optional[CnfFormula]:
        return None

    def pairs(self) -> Optional[int]:
        return None


class _AsLearner(_Learner):
    def __init__(self, prob: Problem, provider, init_obs):
        self.engine = AsEngine(prob.domain, provider)
        self.renderer = BeliefRenderer(prob.domain)
        self.belief = self.engine.initial(init_obs)

    def step(self, a, obs, ok):
        self.belief = self.engine.step(self.belief, a, obs, ok)

    def roots(self) -> list[Node]:
        return self.belief.roots()

    def dag_nodes(self):
        return dag_size(self.roots())

    def cnf(self):
        return self.renderer.render(self.belief)


class _PreLearner(_AsLearner):
    def __init__(self, prob: Problem, provider, init_obs, failure_mode: str):
        pre = {a: prob.hidden.precondition(a) for a in range(prob.domain.n_actions)}
        self.engine = PreEngine(prob.domain, pre, provider, failure_mode)
        self.renderer = CnfRenderer(make_axiom_reducer(prob.domain.vocab))
        self.vocab = prob.domain.vocab
        self.belief = self.engine.initial(init_obs)

    def roots(self):
        return [r for phi in self.belief.branches() for r in phi.roots()]

    def cnf(self):
        return self.renderer.render([self.belief.denotation(self.vocab.fluent)])


class _Slaf0Learner(_Learner):
    def __init__(self, prob: Problem, init_obs):
        d = prob.domain
        if d.n_fluents * d.n_actions > SLAF0_MAX_ROWS:
            raise VocabularyTooLarge(f"slaf0 is limited to {SLAF0_MAX_ROWS} action-fluent pairs")
        self.domain = d
        self.belief = CnfFormula.of([[self._lit(f, v)] for f, v in init_obs])

    def _lit(self, f: int, v: bool) -> int:
        x = self.domain.vocab.fluent(f)
        return x if v else -x

    def step(self, a, obs, ok):
        self.belief = slaf0_step(self.belief, a, [self._lit(f, v) for f, v in obs], self.domain, ok)

    def cnf(self):
        return self.belief


class _FactoredLearner(_Learner):
    def __init__(self, prob: Problem, init_obs):
        self.tiny = TinyVocab(prob.domain)
        if self.tiny.n > 6:
            raise VocabularyTooLarge(f"{self.tiny.n} fluents; factored SLAF needs at most 6")
        self.table = LiteralSlafTable(prob.domain, self.tiny)
        self.belief = term(self._lits(init_obs))

    @staticmethod
    def _lits(obs):
        return [(f + 1) if v else -(f + 1) for f, v in obs]

    def step(self, a, obs, ok):
        if not ok:
            raise SlafError("factored SLAF handles successful actions only")
        self.belief = factored_step(self.belief, a, self._lits(obs), self.table)

    def dag_nodes(self):
        return dag_size([self.belief])


class _OracleLearner(_Learner):
    """Exact pair-set filtering over candidate models, or over every effect model with known preconditions."""

    def __init__(self, prob: Problem, init_obs, candidates: Optional[Sequence[str]]):
        d = prob.domain
        self.domain = d
        states = [s for s in range(1 << d.n_fluents) if satisfies(s, init_obs)] if d.n_fluents <= 16 else None
        if states is None:
            raise VocabularyTooLarge(f"{d.n_fluents} fluents is too many for the oracle")
        if candidates:
            self.names = {}
            models = []
            for c in candidates:
                m, name = _candidate_model(c, prob)
                self.names[m] = name
                models.append(m)
            self.vector = None
            self.belief = OracleBelief(frozenset((s, m) for m in models for s in states))
        else:
            self.names = None
            pre = {a: prob.hidden.precondition(a) for a in range(d.n_actions)}
            self.vector = VectorOracle(model_space(d, free_pre=False, fixed_pre=pre))
            mask = self.vector.full()
            self.mask = self.vector.observe(mask, init_obs)

    def step(self, a, obs, ok):
        if self.vector is None:
            self.belief = oracle_slaf(self.belief, [OracleStep(a, obs, ok)])
        else:
            self.mask = self.vector.step(self.mask, a, obs, ok)

    def final(self) -> OracleBelief:
        if self.vector is None:
            return self.belief
        return self.vector.decode(self.mask)

    def pairs(self):
        return len(self.belief) if self.vector is None else int(self.mask.sum())

    def describe(self) -> list[str]:
        out = []
        for s, m in self.final().pairs:
            state = "{" + " ".join(self.domain.true_fluents(s)) + "}"
            if self.names is not None:
                name = self.names[m]
            else:
                name = "[" + "; ".join(l for l in m.describe(self.domain).lines() if " causes " in l) + "]"
            out.append(f"<{state}, {name}>")
        return sorted(out)


def _candidate_model(spec: str, prob: Problem) -> tuple[StripsActionModel, str]:
    text = fixture_text(spec) if not Path(spec).exists() else Path(spec).read_text()
    schema = parse_domain(text)
    inst = dataclasses.replace(prob.instance, domain=schema.name)
    d, smap, _ = ground(schema, inst)
    if d.fluents != prob.domain.fluents or d.actions != prob.domain.actions:
        raise StageError("parse", f"candidate {schema.name} does not share the grounded vocabulary")
    return strips_model(smap), schema.name


# ---------------------------------------------------------------- reports

@dataclass
class StepRecord:
    step: int
    slaf_seconds: float  # cumulative
    step_seconds: float  # mean over the window ending here
    dag_nodes: Optional[int] = None
    clauses: Optional[int] = None
    max_clause_len: Optional[int] = None
    pairs: Optional[int] = None


METRIC_COLUMNS = [f.name for f in dataclasses.fields(StepRecord)]


@dataclass
class RunReport:
    config: dict
    domain: str
    fluents: int
    actions: int
    engine: str
    steps: int = 0
    records: list = field(default_factory=list)
    slaf_seconds: float = 0.0
    action_distribution: dict = field(default_factory=dict)
    extraction: dict = field(default_factory=dict)
    bias_dropped: list = field(default_factory=list)
    needs_source: dict = field(default_factory=dict)
    golden_mismatches: Optional[list] = None
    final_belief: Optional[list] = None
    anchors: Optional[dict] = None
    files: dict = field(default_factory=dict)
    model: Optional[SchemaActionModel] = None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("model")
        d["records"] = [dataclasses.asdict(r) for r in self.records]
        d["model_lines"] = self.model.lines() if self.model is not None else []
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, default=str)

    def write_metrics(self, sink) -> None:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for r in self.records:
            w.writerow(["" if getattr(r, c) is None else getattr(r, c) for c in METRIC_COLUMNS])


def _make_learner(cfg: PipelineConfig, prob: Problem, init_obs) -> _Learner:
    if cfg.engine == "oracle":
        cands = cfg.candidates
        if cands is None and prob.fixture in CANDIDATES:
            cands = list(CANDIDATES[prob.fixture])
        return _OracleLearner(prob, init_obs, cands)
    if cfg.engine == "slaf0":
        return _Slaf0Learner(prob, init_obs)
    if cfg.engine == "factored":
        return _FactoredLearner(prob, init_obs)
    needs = cfg.engine == "as"
    if cfg.schematize:
        provider = SchemaProvider(prob.smap, needs=needs, policy=cfg.off_parameter)
    else:
        provider = GroundProvider(prob.domain, needs=needs)
    if cfg.engine == "as":
        return _AsLearner(prob, provider, init_obs)
    return _PreLearner(prob, provider, init_obs, cfg.failure_mode)


def learn(cfg: PipelineConfig, prob: Problem, trace: Trace, on_record=None) -> tuple[_Learner, list[StepRecord], float]:
    """Run the engine over the trace, timing each update and recording sizes every record_every steps."""
    try:
        learner = _make_learner(cfg, prob, trace.init_obs)
    except SlafError as e:
        raise StageError("learn", str(e)) from None
    # like timeit: cyclic GC pauses would be charged to whichever step they hit
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        return learner, *_timed_steps(cfg, learner, trace, on_record)
    finally:
        if gc_was_enabled:
            gc.enable()


def _timed_steps(cfg: PipelineConfig, learner: _Learner, trace: Trace, on_record) -> tuple[list[StepRecord], float]:
    records: list[StepRecord] = []
    total = 0.0
    window = 0.0
    last = 0
    for st in trace.steps:
        t0 = time.perf_counter()
        try:
            learner.step(st.action, st.obs, st.ok)
        except SlafError as e:
            raise StageError("learn", f"step {st.index}: {e}") from None
        dt = time.perf_counter() - t0
        total += dt
        window += dt
        if st.index % cfg.record_every == 0:
            rec = StepRecord(st.index, total, window / (st.index - last), learner.dag_nodes(), pairs=learner.pairs())
            if cfg.measure_cnf:
                f = learner.cnf()
                if f is not None:
                    rec.clauses, rec.max_clause_len = len(f), f.max_clause_len()
            records.append(rec)
            if on_record is not None:
                on_record(rec)
            window, last = 0.0, st.index
    return records, total


def _keys_and_known_pre(cfg: PipelineConfig, prob: Problem):
    if cfg.schematize:
        keys = schema_keys(prob.smap)
        pre = {}
        for a in prob.schema.actions:
            for l in a.pre:
                pre.setdefault((a.name, (l.pred, l.args)), set()).add(l.positive)
        return keys, pre
    keys = ground_keys(prob.domain)
    n = prob.domain.n_fluents
    pre = {}
    for a in range(prob.domain.n_actions):
        for f, v in prob.hidden.precondition(a):
            pre.setdefault(a * n + f, set()).add(v)
    return keys, pre


def _golden_mismatches(cfg: PipelineConfig, prob: Problem, m: SchemaActionModel) -> list[str]:
    out = []
    if cfg.schematize:
        gold = golden_rows(prob.smap)
        for (s, pat), row in m.rows.items():
            if gold[s][pat] != row.effect:
                out.append(f"{s} {pat}: expected {gold[s][pat]}, got {row.effect}")
    else:
        n = prob.domain.n_fluents
        tag = {0: "keeps", 1: "+", 2: "-"}
        for key, row in m.rows.items():
            a, f = divmod(key, n)
            e = prob.hidden.effect(a, f)
            want = "+" if e.name == "CAUSES_TRUE" else "-" if e.name == "CAUSES_FALSE" else "keeps"
            if want != row.effect:
                out.append(f"{prob.domain.actions[a]} {prob.domain.fluents[f]}: expected {want}, got {row.effect}")
    return out


def unknown_model(keys: Iterable, namer) -> SchemaActionModel:
    """Every row undecided: what is known before any action."""
    return SchemaActionModel({k: EffectRow(None) for k in keys}, namer, "none")


def extract(cfg: PipelineConfig, prob: Problem, belief, report: RunReport):
    """Belief to SAT instance to one action model; fills the report's extraction fields."""
    keys, known_pre = _keys_and_known_pre(cfg, prob)
    namer = row_namer(prob.domain)
    if report.steps == 0:
        report.model = unknown_model(keys, namer)
        return None
    t0 = time.perf_counter()
    if isinstance(belief, CnfFormula) and cfg.schematize:
        belief = schematize(belief, prob.smap, cfg.off_parameter)
    inst = make_instance(belief, prob.domain, keys, needs=cfg.engine != "pre")
    base = inst
    solver = make_solver(cfg.solver, inst)
    if cfg.bias_1to1 and cfg.engine != "pre":
        inst, dropped = consistent_bias(inst, solver)
        report.bias_dropped = [" ".join(namer(k)) for k in dropped]
    build = time.perf_counter() - t0
    m = extract_model(inst, solver, cfg.prefer_keeps, known_pre if cfg.engine == "pre" else None)
    if m is None:
        raise StageError("extract", "the learned belief is unsatisfiable")
    report.model = m
    report.extraction = {
        "seconds": time.perf_counter() - t0,
        "build_seconds": build,
        "clauses": inst.n_clauses(),
        "variables": inst.n_vars(),
        "groups": inst.counts(),
        "solver": {k: v for k, v in m.stats.items() if k != "seconds"},
        "needs_source": m.needs_source,
    }
    if cfg.needs_provenance and m.needs_source == "solver":
        report.needs_source = _needs_provenance(base, inst, m, solver, namer)
    report.golden_mismatches = _golden_mismatches(cfg, prob, m)
    return inst


def _needs_provenance(base, biased, m: SchemaActionModel, solver, namer) -> dict:
    """Per NEEDS row: 'data' if the belief alone entails it, 'bias' if only the bias does, else 'choice'."""
    out = {}
    v = base.vocab
    for key, row in m.rows.items():
        for val in row.needs:
            atom = v.group_atom(key, SLOT_NEEDS_POS if val else SLOT_NEEDS_NEG)
            act, fl = namer(key)
            line = f"({act} NEEDS {fl if val else f'(NOT {fl})'})"
            if query_prop(base, atom, solver) is Label.ENTAILED:
                out[line] = "data"
            elif query_prop(biased, atom, solver) is Label.ENTAILED:
                out[line] = "bias"
            else:
                out[line] = "choice"
    return out


def run_pipeline(cfg: PipelineConfig, prob: Optional[Problem] = None) -> RunReport:
    if prob is None:
        prob = load_problem(cfg.domain, cfg.problem)
    d = prob.domain
    try:
        trace = make_trace(cfg, prob)
    except SlafError as e:
        raise StageError("simulate", str(e)) from None
    report = RunReport(cfg.to_dict(), d.name, d.n_fluents, d.n_actions, cfg.engine, len(trace.steps))
    report.action_distribution = trace.action_distribution(d)
    report.anchors = ANCHORS.get(prob.fixture or "")
    out = Path(cfg.out_dir) if cfg.out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        save_trace(trace, d, out / "trace.jsonl")
        report.files["trace"] = str(out / "trace.jsonl")
    learner, report.records, report.slaf_seconds = learn(cfg, prob, trace)
    inst = None
    if isinstance(learner, _OracleLearner):
        report.final_belief = learner.describe()
    elif cfg.extract and not isinstance(learner, _FactoredLearner):
        inst = extract(cfg, prob, learner.belief, report)
    if out is not None:
        _write_outputs(cfg, prob, learner, report, inst, out)
    return report


def _write_outputs(cfg, prob, learner, report: RunReport, inst, out: Path) -> None:
    with open(out / "metrics.csv", "w") as fh:
        report.write_metrics(fh)
    report.files["metrics"] = str(out / "metrics.csv")
    if report.model is not None:
        with open(out / "model.sexp", "w") as fh:
            emit_model(report.model, fh)
        report.files["model"] = str(out / "model.sexp")
        if cfg.schematize and cfg.engine in ("as", "pre", "slaf0"):
            (out / "model.pddl").write_text(model_to_pddl(report.model, prob.schema))
            report.files["model_pddl"] = str(out / "model.pddl")
    if isinstance(learner.belief, (FluentFactoredBelief, PreBelief)):
        (out / "belief.sexp").write_text(dump_belief(learner.belief, prob.domain.vocab.name))
        report.files["belief"] = str(out / "belief.sexp")
    if cfg.dump_cnf and inst is not None:
        with open(out / "instance.cnf", "w") as fh:
            write_dimacs(inst.cnf, fh, prob.domain.vocab.name)
        report.files["cnf"] = str(out / "instance.cnf")
    if cfg.figures and report.records:
        plot_metrics(report, out / "metrics.png")
        report.files["figure"] = str(out / "metrics.png")
    (out / "report.json").write_text(report.to_json())


# ---------------------------------------------------------------- figures

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_metrics(report: RunReport, path: str | Path) -> None:
    plt = _pyplot()
    steps = [r.step for r in report.records]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(steps, [r.step_seconds * 1e3 for r in report.records], marker="o")
    ax1.set_xlabel("step")
    ax1.set_ylabel("time per step (ms)")
    ax1.set_ylim(bottom=0)
    sizes = [r.clauses if r.clauses is not None else r.dag_nodes for r in report.records]
    ax2.plot(steps, [s if s is not None else 0 for s in sizes], marker="o")
    ax2.set_xlabel("step")
    ax2.set_ylabel("CNF clauses" if report.records[0].clauses is not None else "DAG nodes")
    fig.suptitle(f"{report.domain} ({report.fluents} fluents), engine {report.engine}")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


# ---------------------------------------------------------------- benchmark sweep

BENCH_COLUMNS = ["domain", "fluents", "engine", "step", "time_per_step", "formula_size"]


@dataclass
class BenchConfig:
    domains: list = field(default_factory=lambda: ["blocksworld"])
    sizes: list = field(default_factory=lambda: [None])  # None: the fixture problem
    engines: list = field(default_factory=lambda: ["as"])
    steps: int = 1000
    obs_per_step: int = 10
    seed: int = 0
    record_every: int = 200
    size_metric: str = "dag"  # or "clauses"
    coverage_k: Optional[int] = None
    jobs: int = 1
    out_dir: Optional[str] = None
    figures: bool = True


@dataclass
class BenchResult:
    rows: list = field(default_factory=list)  # dicts keyed by BENCH_COLUMNS
    failures: list = field(default_factory=list)  # (domain, size, engine, message)

    def write_csv(self, sink) -> None:
        w = csv.DictWriter(sink, BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)

    def write_gnuplot(self, sink) -> None:
        """One index block per (domain, fluents, engine): columns step, time_per_step, formula_size."""
        blocks: dict[tuple, list] = {}
        for r in self.rows:
            blocks.setdefault((r["domain"], r["fluents"], r["engine"]), []).append(r)
        first = True
        for (dom, n, eng), rows in blocks.items():
            if not first:
                sink.write("\n\n")
            first = False
            sink.write(f"# {dom} fluents={n} engine={eng}\n# step time_per_step formula_size\n")
            for r in rows:
                sink.write(f"{r['step']} {r['time_per_step']:.9g} {r['formula_size']}\n")


def _bench_cell(bc: BenchConfig, domain: str, size, engine: str) -> list[dict]:
    cfg = PipelineConfig(domain=domain, engine=engine, steps=bc.steps, obs_per_step=bc.obs_per_step,
                         seed=bc.seed, record_every=bc.record_every, coverage_k=bc.coverage_k,
                         measure_cnf=bc.size_metric == "clauses", extract=False, figures=False)
    prob = load_problem(domain, size=size)
    obs = min(cfg.obs_per_step, prob.domain.n_fluents)
    cfg.obs_per_step = obs
    trace = make_trace(cfg, prob)
    _, records, _ = learn(cfg, prob, trace)
    rows = []
    for r in records:
        size_val = r.clauses if bc.size_metric == "clauses" else r.dag_nodes
        if size_val is None:
            size_val = r.pairs
        rows.append({"domain": domain, "fluents": prob.domain.n_fluents, "engine": engine, "step": r.step,
                     "time_per_step": r.step_seconds, "formula_size": size_val})
    return rows


def _bench_cell_safe(args):
    bc, domain, size, engine = args
    try:
        return _bench_cell(bc, domain, size, engine), None
    except (SlafError, ValueError) as e:
        return [], (domain, size, engine, str(e))


def bench(bc: BenchConfig) -> BenchResult:
    """Cross product of domains, sizes and engines; a failing cell is recorded and skipped."""
    cells = [(bc, d, s, e) for d in bc.domains for s in bc.sizes for e in bc.engines]
    res = BenchResult()
    if bc.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(bc.jobs) as ex:
            outcomes = list(ex.map(_bench_cell_safe, cells))
    else:
        outcomes = [_bench_cell_safe(c) for c in cells]
    for rows, err in outcomes:
        res.rows += rows
        if err is not None:
            res.failures.append(err)
    if bc.out_dir:
        out = Path(bc.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "bench.csv", "w") as fh:
            res.write_csv(fh)
        with open(out / "bench.dat", "w") as fh:
            res.write_gnuplot(fh)
        if res.failures:
            (out / "failures.json").write_text(json.dumps(res.failures, indent=1))
        if bc.figures and res.rows:
            plot_bench(res, out)
    return res


def plot_bench(res: BenchResult, out: Path) -> None:
    plt = _pyplot()
    blocks: dict[tuple, list] = {}
    for r in res.rows:
        blocks.setdefault((r["domain"], r["fluents"], r["engine"]), []).append(r)
    for col, fname, label in (("time_per_step", "time_per_step.png", "time per step (ms)"),
                              ("formula_size", "formula_size.png", "formula size")):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for (dom, n, eng), rows in blocks.items():
            ys = [r[col] * (1e3 if col == "time_per_step" else 1) for r in rows]
            ax.plot([r["step"] for r in rows], ys, marker=".", label=f"{dom} ({n}) {eng}")
        ax.set_xlabel("step")
        ax.set_ylabel(label)
        ax.set_ylim(bottom=0)
        ax.legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(out / fname, dpi=100)
        plt.close(fig)


def decile_ratio(values: Sequence[float]) -> float:
    """Mean of the last tenth over the mean of the first tenth."""
    k = max(1, len(values) // 10)
    first = sum(values[:k]) / k
    last = sum(values[-k:]) / k
    return last / first if first > 0 else float("inf")
