"""Command-line entry point: ``lacent compute|sweep|evaluate|simulate``.

Every field of :class:`RunConfig` is both a ``--flag`` (underscores become
hyphens) and a key of the flat ``key=value`` config file. Precedence:
flags, then the config file, then the defaults below.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ConfigError, LACentralityError
from .evaluation import (
    BroadcastLog,
    correlation_report,
    delta_sweep,
    report_to_csv,
    simulate_la_cascades,
    sweep_to_csv,
)
from .exact import EXACT_SOLVERS, CentralityParams, Measure, Starting
from .graph import ConditioningMode, DegreeConditioning, read_edge_list, transpose
from .push import approximate_push

COMMANDS = ("compute", "sweep", "evaluate", "simulate")
SEPARATORS = {"tab": "\t", "comma": ",", "space": " ", "whitespace": None}
THREADS_ENV = "LACENT_THREADS"


@dataclass
class RunConfig:
    command: str = "compute"
    graph: str = ""
    log: str = ""
    measure: str = "laac"
    measures: str = "pr,lapr,ac,laac"
    alpha: float = 0.85
    alphas: str = "1e-4,1e-3,1e-2"
    delta: float = 0.1
    deltas: str = "1.0,0.5,0.1,0.05,0.01"
    approx: bool = False
    transpose: bool = False
    transpose_walks: bool = True
    epsilon_deg: float = 0.01
    conditioning_mode: str = ConditioningMode.ALL.value
    starting: str = ""
    tol: float = 1e-10
    max_iter: int = 10_000
    min_items: int = 2
    min_rebroadcasts: int = 10
    followers_only: bool = True
    items_per_user: int = 1
    seed: int = 0
    separator: str = "tab"
    undirected: bool = False
    id_base: str = ""
    output: str = ""
    format: str = "csv"
    threads: int = 1
    max_exact_nodes: int = 20_000
    force: bool = False

    @property
    def conditioning(self) -> DegreeConditioning:
        return DegreeConditioning(self.epsilon_deg, ConditioningMode(self.conditioning_mode))

    def alpha_list(self) -> list[float]:
        return _floats(self.alphas)

    def delta_list(self) -> list[float]:
        return _floats(self.deltas)

    def measure_list(self) -> list[Measure]:
        return [Measure(m.strip()) for m in self.measures.split(",") if m.strip()]

    def to_text(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in sorted(asdict(self).items()))


HELP = {
    "command": "subcommand (set by the positional argument)",
    "graph": "edge-list file (src<sep>dst per line, '#' comments)",
    "log": "broadcast log CSV item_id,user_id,seq (evaluate)",
    "measure": "pr | lapr | ac | laac (compute, sweep)",
    "measures": "comma-separated measures (evaluate)",
    "alpha": "damping / attenuation (compute, sweep, simulate)",
    "alphas": "comma-separated alphas (evaluate)",
    "delta": "push error tolerance in (0, 1] (compute --approx)",
    "deltas": "comma-separated deltas (sweep; evaluate with --approx)",
    "approx": "use the residual-push approximation",
    "transpose": "run on the transposed graph (compute, sweep)",
    "transpose_walks": "evaluate PR/laPR on the transposed follower graph",
    "epsilon_deg": "degree conditioning constant",
    "conditioning_mode": "all-degrees | zero-degrees-only",
    "starting": "starting vector: uniform | indegree-inverse | out-degree | la-out-degree (empty: measure default)",
    "tol": "exact solver convergence tolerance (max-norm change)",
    "max_iter": "exact solver iteration cap",
    "min_items": "influence filter: minimum qualifying items per user",
    "min_rebroadcasts": "influence filter: minimum re-broadcasts per item",
    "followers_only": "count only re-broadcasts by followers of the submitter",
    "items_per_user": "items submitted per user (simulate)",
    "seed": "random seed (simulate)",
    "separator": "tab | comma | space | whitespace",
    "undirected": "expand every edge-list line to both directions",
    "id_base": "integer node ids with this base (0 or 1); empty for free-form labels",
    "output": "output path (default depends on the command)",
    "format": "csv | json (compute scores)",
    "threads": f"worker threads for sweeps (default from ${THREADS_ENV}, else 1)",
    "max_exact_nodes": "refuse exact solves above this node count unless --force",
    "force": "override --max-exact-nodes",
}

DEFAULT_OUTPUT = {
    "compute": "scores.csv",
    "sweep": "sweep.csv",
    "evaluate": "report.csv",
    "simulate": "log.csv",
}


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config_file(path) -> dict:
    """Parse a flat ``key=value`` file; returns raw string values."""
    known = {f.name for f in fields(RunConfig)}
    out, problems = {}, []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            problems.append(f"{path}:{lineno}: expected key=value")
        elif key not in known:
            problems.append(f"{path}:{lineno}: unknown key {key!r}")
        else:
            out[key] = value.strip()
    if problems:
        raise ConfigError(problems)
    return out


def _coerce(raw: dict) -> dict:
    types = {f.name: f.type for f in fields(RunConfig)}
    out, problems = {}, []
    for key, value in raw.items():
        t = types[key]
        try:
            if not isinstance(value, str):
                out[key] = value
            elif t == "bool":
                out[key] = _parse_bool(value)
            elif t == "int":
                out[key] = int(value)
            elif t == "float":
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError as exc:
            problems.append(f"{key}: {exc}")
    if problems:
        raise ConfigError(problems)
    return out


def validate(cfg: RunConfig) -> None:
    """Raise :class:`ConfigError` listing every violated field."""
    p = []
    if cfg.command not in COMMANDS:
        p.append(f"command: must be one of {', '.join(COMMANDS)}")
    if not cfg.graph:
        p.append("graph: required")
    elif not Path(cfg.graph).exists():
        p.append(f"graph: no such file {cfg.graph!r}")
    if cfg.command == "evaluate":
        if not cfg.log:
            p.append("log: required for evaluate")
        elif not Path(cfg.log).exists():
            p.append(f"log: no such file {cfg.log!r}")
    measure = None
    try:
        measure = Measure(cfg.measure)
    except ValueError:
        p.append(f"measure: unknown {cfg.measure!r}")
    try:
        cfg.measure_list()
    except ValueError as exc:
        p.append(f"measures: {exc}")
    if not (math.isfinite(cfg.alpha) and cfg.alpha >= 0):
        p.append(f"alpha: must be finite and >= 0, got {cfg.alpha}")
    elif measure is not None and measure.walk_based and cfg.alpha >= 1 and cfg.command in ("compute", "sweep"):
        p.append(f"alpha: {measure.value} needs alpha in [0, 1), got {cfg.alpha}")
    elif cfg.command == "simulate" and cfg.alpha <= 0:
        p.append(f"alpha: simulate needs alpha > 0, got {cfg.alpha}")
    try:
        if any(not (math.isfinite(a) and a >= 0) for a in cfg.alpha_list()):
            p.append("alphas: every alpha must be finite and >= 0")
    except ValueError as exc:
        p.append(f"alphas: {exc}")
    if not 0 < cfg.delta <= 1:
        p.append(f"delta: must be in (0, 1], got {cfg.delta}")
    try:
        ds = cfg.delta_list()
        if not ds or any(not 0 < d <= 1 for d in ds):
            p.append("deltas: need one or more values in (0, 1]")
    except ValueError as exc:
        p.append(f"deltas: {exc}")
    if (cfg.approx or cfg.command == "sweep") and measure is Measure.PR:
        p.append("measure: no push approximation for pr")
    if not cfg.epsilon_deg >= 0:
        p.append(f"epsilon_deg: must be >= 0, got {cfg.epsilon_deg}")
    if cfg.conditioning_mode not in [m.value for m in ConditioningMode]:
        p.append(f"conditioning_mode: unknown {cfg.conditioning_mode!r}")
    if cfg.starting and cfg.starting not in [s.value for s in Starting if s is not Starting.CUSTOM]:
        p.append(f"starting: unknown {cfg.starting!r}")
    if not cfg.tol > 0:
        p.append(f"tol: must be > 0, got {cfg.tol}")
    if cfg.max_iter < 1:
        p.append(f"max_iter: must be >= 1, got {cfg.max_iter}")
    if cfg.min_items < 0:
        p.append(f"min_items: must be >= 0, got {cfg.min_items}")
    if cfg.min_rebroadcasts < 0:
        p.append(f"min_rebroadcasts: must be >= 0, got {cfg.min_rebroadcasts}")
    if cfg.items_per_user < 1:
        p.append(f"items_per_user: must be >= 1, got {cfg.items_per_user}")
    if cfg.separator not in SEPARATORS:
        p.append(f"separator: one of {', '.join(SEPARATORS)}")
    if cfg.id_base not in ("", "0", "1"):
        p.append(f"id_base: must be empty, 0 or 1, got {cfg.id_base!r}")
    if cfg.format not in ("csv", "json"):
        p.append(f"format: csv or json, got {cfg.format!r}")
    if cfg.threads < 1:
        p.append(f"threads: must be >= 1, got {cfg.threads}")
    if cfg.max_exact_nodes < 1:
        p.append(f"max_exact_nodes: must be >= 1, got {cfg.max_exact_nodes}")
    if p:
        raise ConfigError(p)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    defaults = RunConfig()
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        flag = "--" + f.name.replace("_", "-")
        default = getattr(defaults, f.name)
        help_text = f"{HELP[f.name]} [default: {_fmt(default) or 'none'}]"
        if f.type == "bool":
            common.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction,
                                default=argparse.SUPPRESS, help=help_text)
        else:
            conv = {"int": int, "float": float}.get(f.type, str)
            common.add_argument(flag, dest=f.name, type=conv, default=argparse.SUPPRESS,
                                metavar=f.name.upper(), help=help_text)
    parser = argparse.ArgumentParser(
        prog="lacent", description="Limited-attention centrality: compute, sweep, evaluate, simulate."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="score every node with one measure")
    sub.add_parser("sweep", parents=[common], help="push work and rms error across deltas")
    sub.add_parser("evaluate", parents=[common], help="rank correlation against empirical influence")
    sub.add_parser("simulate", parents=[common], help="generate a limited-attention cascade log")
    return parser


def resolve_config(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    config_path = ns.pop("config", None)
    merged: dict = {}
    env_threads = os.environ.get(THREADS_ENV)
    if env_threads:
        merged["threads"] = env_threads
    if config_path:
        merged.update(read_config_file(config_path))
    merged.update({k: v for k, v in ns.items() if v is not None})
    cfg = RunConfig(**_coerce(merged))
    validate(cfg)
    return cfg


def _load_graph(cfg: RunConfig):
    g = read_edge_list(
        cfg.graph,
        sep=SEPARATORS[cfg.separator],
        undirected=cfg.undirected,
        id_base=int(cfg.id_base) if cfg.id_base else None,
    )
    return transpose(g) if cfg.transpose else g


def _guard(cfg: RunConfig, g, what: str):
    if g.node_count > cfg.max_exact_nodes and not cfg.force:
        raise ConfigError(
            [f"{what}: graph has {g.node_count} nodes > max_exact_nodes={cfg.max_exact_nodes}; pass --force"]
        )


def _with_header(cfg: RunConfig, body: str) -> str:
    return "".join(f"# {line}\n" for line in cfg.to_text().splitlines()) + body


def _output(cfg: RunConfig) -> Path:
    if cfg.output:
        return Path(cfg.output)
    name = DEFAULT_OUTPUT[cfg.command]
    if cfg.command == "compute" and cfg.format == "json":
        name = "scores.json"
    return Path(name)


def _stats_path(out: Path) -> Path:
    return out.with_name(out.stem + ".stats.json")


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_compute(cfg: RunConfig) -> list[Path]:
    g = _load_graph(cfg)
    measure = Measure(cfg.measure)
    out = _output(cfg)
    written = [out]
    if cfg.approx:
        s = None
        if cfg.starting:
            from .exact import starting_vector

            s = starting_vector(g, measure, CentralityParams(cfg.alpha, Starting(cfg.starting),
                                                             conditioning=cfg.conditioning))
        scores, stats = approximate_push(g, measure, cfg.alpha, cfg.delta, s, conditioning=cfg.conditioning)
        stats_doc = dict(stats.to_dict(), config=asdict(cfg))
        _write(_stats_path(out), json.dumps(stats_doc, indent=2, sort_keys=True) + "\n")
        written.append(_stats_path(out))
    else:
        _guard(cfg, g, "exact solve")
        params = CentralityParams(
            alpha=cfg.alpha,
            starting=Starting(cfg.starting) if cfg.starting else None,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            conditioning=cfg.conditioning,
        )
        scores = EXACT_SOLVERS[measure](g, params)
    if cfg.format == "json":
        doc = json.loads(scores.to_json(g.labels))
        doc["config"] = asdict(cfg)
        _write(out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        _write(out, _with_header(cfg, scores.to_csv(g.labels)))
    return written


def cmd_sweep(cfg: RunConfig) -> list[Path]:
    g = _load_graph(cfg)
    with_rms = g.node_count <= cfg.max_exact_nodes or cfg.force
    rows = delta_sweep(
        g, cfg.measure, cfg.alpha, cfg.delta_list(),
        with_rms=with_rms, conditioning=cfg.conditioning, threads=cfg.threads,
    )
    out = _output(cfg)
    _write(out, _with_header(cfg, sweep_to_csv(rows)))
    return [out]


def cmd_evaluate(cfg: RunConfig) -> list[Path]:
    g = _load_graph(cfg)
    log = BroadcastLog.from_csv(Path(cfg.log).read_text())
    deltas = cfg.delta_list() if cfg.approx else [None]
    if not cfg.approx:
        _guard(cfg, g, "exact solve")
    rows = correlation_report(
        g, log, cfg.measure_list(), cfg.alpha_list(), deltas,
        min_items=cfg.min_items, min_rebroadcasts=cfg.min_rebroadcasts,
        followers_only=cfg.followers_only, transpose_walks=cfg.transpose_walks,
        conditioning=cfg.conditioning,
    )
    out = _output(cfg)
    _write(out, _with_header(cfg, report_to_csv(rows)))
    return [out]


def cmd_simulate(cfg: RunConfig) -> list[Path]:
    g = _load_graph(cfg)
    log = simulate_la_cascades(g, cfg.alpha, cfg.items_per_user, cfg.seed, cfg.conditioning)
    out = _output(cfg)
    _write(out, _with_header(cfg, log.to_csv()))
    return [out]


COMMAND_FUNCS = {
    "compute": cmd_compute,
    "sweep": cmd_sweep,
    "evaluate": cmd_evaluate,
    "simulate": cmd_simulate,
}


def run(cfg: RunConfig) -> list[Path]:
    validate(cfg)
    return COMMAND_FUNCS[cfg.command](cfg)


def _fail(exc: Exception, code: int) -> int:
    msg = str(exc).replace("\n", " ")
    print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
    except ConfigError as exc:
        return _fail(exc, 2)
    try:
        for path in run(cfg):
            print(path)
    except ConfigError as exc:
        return _fail(exc, 2)
    except (LACentralityError, OSError, ValueError) as exc:
        return _fail(exc, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
