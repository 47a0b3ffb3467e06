"""Influence ground truth, rank correlation and accuracy benchmarks."""
from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyLog, InsufficientData, LACentralityError, ParamError, ShapeError
from .exact import CentralityParams, Measure, ScoreVector, solve_fixed_point, starting_vector, EXACT_SOLVERS
from .graph import DegreeConditioning, DirectedGraph, condition_degrees, transpose
from .push import approximate_push

# alpha values named for the Digg and Twitter runs
ALPHA_PRESETS = {
    "digg": {Measure.LAAC: 9.0e-4, Measure.LAPR: 9.0e-4},
    "twitter": {Measure.LAAC: 1.0e-4, Measure.LAPR: 0.9},
}


@dataclass(frozen=True)
class Record:
    item_id: str
    user_id: str
    seq: int


@dataclass
class BroadcastLog:
    """Item-sharing events; per item the lowest ``seq`` is the submitter."""

    records: list[Record]

    def items(self) -> dict[str, list[Record]]:
        by_item: dict[str, list[Record]] = {}
        for rec in self.records:
            by_item.setdefault(rec.item_id, []).append(rec)
        for recs in by_item.values():
            recs.sort(key=lambda r: r.seq)
        return by_item

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["item_id", "user_id", "seq"])
        for r in self.records:
            w.writerow([r.item_id, r.user_id, r.seq])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str | Iterable[str]) -> "BroadcastLog":
        lines = io.StringIO(text) if isinstance(text, str) else text
        rows = csv.DictReader(line for line in lines if line.strip() and not line.startswith("#"))
        return cls([Record(r["item_id"], r["user_id"], int(r["seq"])) for r in rows])


@dataclass
class InfluenceScore:
    scores: dict[str, float]
    items_counted: dict[str, int]
    min_items: int = 2
    min_rebroadcasts: int = 10
    followers_only: bool = True


def empirical_influence(
    log: BroadcastLog,
    g: DirectedGraph,
    min_items: int = 2,
    min_rebroadcasts: int = 10,
    followers_only: bool = True,
) -> InfluenceScore:
    """Mean follower re-broadcasts per submitted item.

    An item qualifies when it has at least ``min_rebroadcasts`` counted
    re-broadcasts; a user is scored over qualifying items and kept only with
    at least ``min_items`` of them. Followers of ``u`` are its out-neighbours
    in ``g``. Repeated (item, user) records count once.
    """
    if not log.records:
        raise EmptyLog("broadcast log has no records")
    index = g.index
    per_user: dict[str, list[int]] = {}
    duplicates = 0
    for item, recs in sorted(log.items().items()):
        submitter = recs[0].user_id
        seen = {submitter}
        sub_id = index.get(submitter)
        followers = set(g.out_neighbors[sub_id]) if sub_id is not None else set()
        count = 0
        for rec in recs[1:]:
            if rec.user_id in seen:
                if rec.user_id != submitter:
                    duplicates += 1
                continue
            seen.add(rec.user_id)
            if followers_only:
                uid = index.get(rec.user_id)
                if uid is None or uid not in followers:
                    continue
            count += 1
        per_user.setdefault(submitter, []).append(count)
    if duplicates:
        warnings.warn(f"{duplicates} duplicate (item, user) records ignored", stacklevel=2)
    scores, counted = {}, {}
    for user, counts in per_user.items():
        kept = [c for c in counts if c >= min_rebroadcasts]
        if len(kept) >= min_items and kept:
            scores[user] = sum(kept) / len(kept)
            counted[user] = len(kept)
    return InfluenceScore(scores, counted, min_items, min_rebroadcasts, followers_only)


class UndefinedCorrelation(float):
    """NaN that says why the correlation is undefined."""

    def __new__(cls, reason: str):
        obj = super().__new__(cls, math.nan)
        obj.reason = reason
        return obj

    def __repr__(self):
        return f"UndefinedCorrelation({self.reason!r})"


def _as_mapping(x) -> Mapping:
    if isinstance(x, Mapping):
        return x
    return dict(enumerate(np.asarray(x, dtype=float).tolist()))


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks, tied values sharing the mean of their positions."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    ranks = np.empty(len(v))
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman's rho over the shared keys of two score mappings."""
    x, y = _as_mapping(x), _as_mapping(y)
    keys = sorted(set(x) & set(y), key=str)
    if len(keys) < 3:
        raise InsufficientData(f"need at least 3 shared keys, got {len(keys)}")
    rx = average_ranks([x[k] for k in keys])
    ry = average_ranks([y[k] for k in keys])
    rx -= rx.mean()
    ry -= ry.mean()
    sx, sy = math.sqrt(float(rx @ rx)), math.sqrt(float(ry @ ry))
    if sx == 0 or sy == 0:
        return UndefinedCorrelation("zero rank variance in " + ("x" if sx == 0 else "y"))
    return max(-1.0, min(1.0, float(rx @ ry) / (sx * sy)))


def rms_error(a, b) -> float:
    a = np.asarray(a.scores if isinstance(a, ScoreVector) else a, dtype=float)
    b = np.asarray(b.scores if isinstance(b, ScoreVector) else b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return math.sqrt(float(np.mean((a - b) ** 2)))


@dataclass
class SweepResult:
    delta: float
    pushes: int | None
    theoretical_bound: float | None
    rms_error: float | None
    wall_time: float
    error: str | None = None


SWEEP_HEADER = "delta,pushes,theoretical_bound,rms_error,wall_time_ms"


def sweep_to_csv(rows: Sequence[SweepResult]) -> str:
    out = [SWEEP_HEADER]
    for r in rows:
        fields = [
            repr(r.delta),
            "" if r.pushes is None else str(r.pushes),
            "" if r.theoretical_bound is None or not math.isfinite(r.theoretical_bound) else repr(r.theoretical_bound),
            "" if r.rms_error is None else repr(r.rms_error),
            f"{r.wall_time * 1000:.3f}",
        ]
        out.append(",".join(fields))
    return "\n".join(out) + "\n"


def delta_sweep(
    g: DirectedGraph,
    measure: Measure | str,
    alpha: float,
    deltas: Iterable[float],
    s: np.ndarray | None = None,
    *,
    with_rms: bool = True,
    conditioning: DegreeConditioning = DegreeConditioning(),
    exact_tol: float = 1e-13,
    threads: int = 1,
) -> list[SweepResult]:
    """One independent push run per delta, same starting vector throughout.

    With ``with_rms`` the push output is compared to the iterative exact
    solution (tolerance ``exact_tol``); without it only work is reported.
    A failing row carries its error message instead of aborting the sweep.
    """
    measure = Measure(measure)
    deltas = sorted(set(float(d) for d in deltas), reverse=True)
    if s is None:
        s = starting_vector(g, measure, CentralityParams(alpha=alpha, conditioning=conditioning))
    exact = None
    if with_rms:
        exact, _, ok = solve_fixed_point(
            g, measure, alpha, s, tol=exact_tol, max_iter=100_000, conditioning=conditioning
        )
        if not ok:
            warnings.warn("exact reference did not reach exact_tol", stacklevel=2)

    def run(delta: float) -> SweepResult:
        try:
            scores, stats = approximate_push(g, measure, alpha, delta, s, conditioning=conditioning)
        except LACentralityError as exc:
            return SweepResult(delta, None, None, None, 0.0, f"{type(exc).__name__}: {exc}")
        rms = rms_error(scores, exact) if exact is not None else None
        return SweepResult(delta, stats.pushes, stats.theoretical_bound, rms, stats.wall_time)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, deltas))
    return [run(d) for d in deltas]


def simulate_la_cascades(
    g: DirectedGraph,
    alpha: float,
    items_per_user: int = 1,
    seed: int = 0,
    conditioning: DegreeConditioning = DegreeConditioning(),
) -> BroadcastLog:
    """Limited-attention independent cascades.

    Every user submits ``items_per_user`` items. A holder ``i`` passes the
    item to each not-yet-reached out-neighbour ``j`` with probability
    ``min(1, alpha / din(j))``; every adopter re-broadcasts exactly once.
    Records follow BFS adoption order. Item ``k`` of user ``u`` draws from
    its own stream seeded by ``(seed, u, k)``, so each cascade is
    reproducible on its own.
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise ParamError(f"alpha must be finite and > 0, got {alpha}")
    if items_per_user < 1:
        raise ParamError(f"items_per_user must be >= 1, got {items_per_user}")
    deg = condition_degrees(g, conditioning)
    p = np.minimum(1.0, alpha / deg.d_in_c).tolist()
    labels = g.labels
    out = g.out_neighbors
    records: list[Record] = []
    for u in range(g.node_count):
        for k in range(items_per_user):
            rng = np.random.default_rng([seed, u, k])
            item = f"{labels[u]}#{k}"
            reached = {u}
            frontier = [u]
            seq = 0
            records.append(Record(item, labels[u], seq))
            while frontier:
                nxt = []
                for i in frontier:
                    nbrs = [j for j in out[i] if j not in reached]
                    if not nbrs:
                        continue
                    draws = rng.random(len(nbrs))
                    for j, x in zip(nbrs, draws):
                        if x < p[j]:
                            reached.add(j)
                            nxt.append(j)
                            seq += 1
                            records.append(Record(item, labels[j], seq))
                frontier = nxt
    return BroadcastLog(records)


@dataclass
class ReportRow:
    measure: Measure
    alpha: float
    delta: float | None
    rho: float
    n_users: int
    transposed: bool
    note: str = ""


REPORT_HEADER = "measure,alpha,delta,rho,n_users,transposed"


def report_to_csv(rows: Sequence[ReportRow]) -> str:
    out = [REPORT_HEADER]
    for r in rows:
        rho = "" if math.isnan(r.rho) else repr(r.rho)
        delta = "" if r.delta is None else repr(r.delta)
        out.append(f"{r.measure.value},{r.alpha!r},{delta},{rho},{r.n_users},{int(r.transposed)}")
    return "\n".join(out) + "\n"


def centrality_scores(
    g: DirectedGraph,
    measure: Measure,
    alpha: float,
    delta: float | None = None,
    conditioning: DegreeConditioning = DegreeConditioning(),
) -> ScoreVector:
    """Exact scores when ``delta`` is None, push approximation otherwise."""
    measure = Measure(measure)
    if delta is None:
        return EXACT_SOLVERS[measure](g, CentralityParams(alpha=alpha, conditioning=conditioning))
    return approximate_push(g, measure, alpha, delta, conditioning=conditioning)[0]


def correlation_report(
    g: DirectedGraph,
    log: BroadcastLog,
    measures: Iterable[Measure | str],
    alphas: Iterable[float],
    deltas: Iterable[float | None] = (None,),
    *,
    min_items: int = 2,
    min_rebroadcasts: int = 10,
    followers_only: bool = True,
    transpose_walks: bool = True,
    conditioning: DegreeConditioning = DegreeConditioning(),
    influence: InfluenceScore | None = None,
) -> list[ReportRow]:
    """Spearman rho of each (measure, alpha, delta) ranking against influence.

    Walk-based measures (PR, laPR) run on the transposed follower graph when
    ``transpose_walks`` is set, since influence counts walks a node emits.
    Rows that cannot be computed keep ``rho=nan`` and a note.
    """
    if influence is None:
        influence = empirical_influence(log, g, min_items, min_rebroadcasts, followers_only)
    gt = None
    rows = []
    for m in measures:
        m = Measure(m)
        flip = transpose_walks and m.walk_based
        if flip and gt is None:
            gt = transpose(g)
        graph = gt if flip else g
        for a in alphas:
            for d in deltas:
                try:
                    sv = centrality_scores(graph, m, a, d, conditioning)
                    rho = spearman(sv.as_mapping(graph.labels), influence.scores)
                    note = getattr(rho, "reason", "")
                except LACentralityError as exc:
                    rho, note = math.nan, f"{type(exc).__name__}: {exc}"
                n = len(set(influence.scores) & set(graph.labels))
                rows.append(ReportRow(m, a, d, float(rho), n, flip, note))
    return rows
