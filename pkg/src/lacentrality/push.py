"""Residual-push approximations of laPR, laAC and AC.

Each run keeps a residual vector ``r`` (initially the starting vector) and
an accumulator ``approx`` (initially zero). Popping node ``i`` moves its
residual into ``approx`` and spreads the attenuated remainder to its
neighbours:

* laPR: ``approx[i] += (1 - a) r[i]``; each out-neighbour ``j`` gets
  ``a r[i] / (dout(i) din(j))``.
* laAC: ``approx[i] += r[i]``; each in-neighbour gets ``a r[i] / din(i)``.
* AC:   ``approx[i] += r[i]``; each in-neighbour gets ``a r[i]``.

A node is queued (FIFO, O(1) membership flag) while ``r[i] / dmax > eps``
with ``eps = delta * |s|_1 / (|V| dmax)``; ``dmax`` is the raw maximum
out-degree for laPR and in-degree otherwise. At every point
``approx = exact(s) - exact(r)``, so ``approx`` never overshoots. The AC
variant has no published pseudocode; it mirrors laAC without the in-degree
division.
"""
from __future__ import annotations

import json
import math
import random
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParamError
from .exact import (
    CentralityParams,
    Measure,
    ScoreVector,
    dense_solve,
    divergence_gate,
    starting_vector,
)
from .graph import DegreeConditioning, DirectedGraph, condition_degrees, max_degrees

RESUM_INTERVAL = 1 << 20


@dataclass
class PushState:
    residual: list[float]
    approx: list[float]
    queue: deque | list
    queued: bytearray
    epsilon: float
    pushes: int
    residual_l1: float

    def snapshot(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.approx), np.array(self.residual)


@dataclass
class PushStats:
    measure: Measure
    alpha: float
    delta: float
    epsilon: float
    pushes: int
    theoretical_bound: float
    residual_l1_final: float
    wall_time: float
    bound_label: str = ""

    def to_dict(self) -> dict:
        bound = self.theoretical_bound
        return {
            "measure": self.measure.value,
            "alpha": self.alpha,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "pushes": self.pushes,
            "theoretical_bound": bound if math.isfinite(bound) else None,
            "bound_label": self.bound_label,
            "residual_l1_final": self.residual_l1_final,
            "wall_time_ms": round(self.wall_time * 1000.0, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class PushSnapshot:
    """Copy of a run's vectors at one point, for checking approx + exact(r) = exact(s)."""

    measure: Measure
    alpha: float
    conditioning: DegreeConditioning
    source: np.ndarray
    approx: np.ndarray
    residual: np.ndarray
    pushes: int


@dataclass(frozen=True)
class Lemma1Report:
    defect: float
    scale: float
    tolerance: float
    passed: bool


def _validate(measure: Measure, alpha: float, delta: float):
    if not (isinstance(delta, (int, float)) and 0 < delta <= 1):
        raise ParamError(f"delta must be in (0, 1], got {delta}")
    if not (math.isfinite(alpha) and alpha >= 0):
        raise ParamError(f"alpha must be finite and >= 0, got {alpha}")


def _bound(measure: Measure, alpha: float, s_l1: float, eps: float, dmax: int, dmax_in: int):
    if measure is Measure.LAPR:
        return s_l1 / ((1 - alpha) * eps * dmax), "Theorem 1"
    if measure is Measure.LAAC:
        return s_l1 / ((1 - alpha) * eps * dmax), "Theorem 2 with c:=alpha"
    # AC: each push banks r[i] > eps*dmax and the bank never exceeds
    # |ac(s)|_1 <= |s|_1 / (1 - alpha * max column sum of A)
    kappa = alpha * dmax_in
    if kappa >= 1:
        return math.inf, "AC (reconstructed): unbounded when alpha*dmax_in >= 1"
    return s_l1 / ((1 - kappa) * eps * dmax), "AC (reconstructed): |ac(s)|_1 bound"


def approximate_push(
    g: DirectedGraph,
    measure: Measure | str,
    alpha: float,
    delta: float,
    s: np.ndarray | None = None,
    *,
    conditioning: DegreeConditioning = DegreeConditioning(),
    order: str = "fifo",
    seed: int = 0,
    debug: bool = False,
    observer: Callable[[PushState], None] | None = None,
) -> tuple[ScoreVector, PushStats]:
    """Run the residual push for ``measure`` (laPR, laAC or AC).

    ``order="random"`` pops a uniformly random queued node (seeded) instead
    of FIFO. ``debug`` asserts per push that the residual mass shrinks by
    more than ``(1 - alpha) * eps * dmax`` (laPR/laAC). ``observer`` is
    called with the live state after initialisation and after every push; it
    must not mutate it.
    """
    measure = Measure(measure)
    if measure is Measure.PR:
        raise ParamError("no push algorithm for plain PR")
    _validate(measure, alpha, delta)
    dmax_out, dmax_in = max_degrees(g)
    divergence_gate(g, measure, alpha, conditioning)
    if measure is not Measure.AC and alpha >= 1:
        raise ParamError(f"{measure.value}: alpha must be < 1, got {alpha}")
    if order not in ("fifo", "random"):
        raise ParamError(f"order must be 'fifo' or 'random', got {order!r}")

    n = g.node_count
    if s is None:
        s = starting_vector(g, measure, CentralityParams(alpha=alpha, conditioning=conditioning))
    s = np.asarray(s, dtype=float)
    if s.shape != (n,):
        raise ParamError(f"starting vector has shape {s.shape}, expected ({n},)")
    if (s < 0).any() or not np.isfinite(s).all():
        raise ParamError("starting vector entries must be finite and >= 0")
    s_l1 = float(s.sum())
    if s_l1 <= 0:
        raise ParamError("starting vector must not be all zero")

    deg = condition_degrees(g, conditioning)
    dmax = dmax_out if measure is Measure.LAPR else dmax_in
    eps = delta * s_l1 / (n * dmax)
    bound, bound_label = _bound(measure, alpha, s_l1, eps, dmax, dmax_in)

    t0 = time.perf_counter()
    r = s.tolist()
    approx = [0.0] * n
    queued = bytearray(n)
    init = [i for i in range(n) if r[i] / dmax > eps]
    for i in init:
        queued[i] = 1
    fifo = order == "fifo"
    queue: deque | list = deque(init) if fifo else list(init)
    rng = random.Random(seed)
    state = PushState(r, approx, queue, queued, eps, 0, s_l1)
    if observer is not None:
        observer(state)

    if measure is Measure.LAPR:
        keep = 1.0 - alpha
        targets = g.out_neighbors
        # per-pop weight a/dout(i); per-target weight 1/din(j)
        src_w = (alpha / deg.d_out_c).tolist()
        dst_w = (1.0 / deg.d_in_c).tolist()
    else:
        keep = 1.0
        targets = g.in_neighbors
        src_w = (alpha / deg.d_in_c).tolist() if measure is Measure.LAAC else [alpha] * n
        dst_w = None
    min_removal = (1.0 - alpha) * eps * dmax
    pushes = 0
    l1 = s_l1
    popleft = queue.popleft if fifo else None

    while queue:
        if fifo:
            i = popleft()
        else:
            k = rng.randrange(len(queue))
            queue[k], queue[-1] = queue[-1], queue[k]
            i = queue.pop()
        queued[i] = 0
        ri = r[i]
        approx[i] += keep * ri
        T = src_w[i] * ri
        r[i] = 0.0
        added = 0.0
        if dst_w is None:
            for j in targets[i]:
                rj = r[j] + T
                r[j] = rj
                added += T
                if not queued[j] and rj / dmax > eps:
                    queued[j] = 1
                    queue.append(j)
        else:
            for j in targets[i]:
                inc = T * dst_w[j]
                rj = r[j] + inc
                r[j] = rj
                added += inc
                if not queued[j] and rj / dmax > eps:
                    queued[j] = 1
                    queue.append(j)
        pushes += 1
        if debug and measure is not Measure.AC:
            removed = ri - added
            assert removed > 0, f"push {pushes}: residual mass did not decrease"
            assert removed > min_removal, (
                f"push {pushes}: removed {removed!r} <= (1-alpha)*eps*dmax = {min_removal!r}"
            )
        l1 += added - ri
        if pushes % RESUM_INTERVAL == 0:
            l1 = math.fsum(r)
        if observer is not None:
            state.pushes = pushes
            state.residual_l1 = l1
            observer(state)

    wall = time.perf_counter() - t0
    state.pushes = pushes
    state.residual_l1 = l1
    params = {
        "alpha": alpha,
        "delta": delta,
        "epsilon": eps,
        "order": order,
        "conditioning": {"epsilon_deg": conditioning.epsilon_deg, "mode": conditioning.mode.value},
    }
    scores = ScoreVector(np.array(approx), measure, params, pushes, True)
    stats = PushStats(measure, alpha, delta, eps, pushes, bound, l1, wall, bound_label)
    return scores, stats


def approx_la_pagerank(g, alpha, delta, s=None, **kwargs):
    return approximate_push(g, Measure.LAPR, alpha, delta, s, **kwargs)


def approx_la_alpha_centrality(g, alpha, delta, s=None, **kwargs):
    return approximate_push(g, Measure.LAAC, alpha, delta, s, **kwargs)


def approx_alpha_centrality(g, alpha, delta, s=None, **kwargs):
    return approximate_push(g, Measure.AC, alpha, delta, s, **kwargs)


def record_snapshots(
    g: DirectedGraph,
    measure: Measure | str,
    alpha: float,
    delta: float,
    s: np.ndarray | None = None,
    *,
    at: set[int] | None = None,
    conditioning: DegreeConditioning = DegreeConditioning(),
    **kwargs,
) -> tuple[list[PushSnapshot], ScoreVector, PushStats]:
    """Run the push and copy the state at the push counts in ``at``.

    ``at=None`` records every state. The final state is always recorded.
    """
    measure = Measure(measure)
    if s is None:
        s = starting_vector(g, measure, CentralityParams(alpha=alpha, conditioning=conditioning))
    source = np.asarray(s, dtype=float).copy()
    snaps: list[PushSnapshot] = []
    live: list[PushState] = []

    def grab(state: PushState):
        if not live:
            live.append(state)
        if at is None or state.pushes in at:
            approx, res = state.snapshot()
            snaps.append(PushSnapshot(measure, alpha, conditioning, source, approx, res, state.pushes))

    scores, stats = approximate_push(
        g, measure, alpha, delta, source, conditioning=conditioning, observer=grab, **kwargs
    )
    if not snaps or snaps[-1].pushes != stats.pushes:
        approx, res = live[0].snapshot()
        snaps.append(PushSnapshot(measure, alpha, conditioning, source, approx, res, stats.pushes))
    return snaps, scores, stats


def verify_lemma1(
    snap: PushSnapshot,
    g: DirectedGraph,
    exact: Callable[[np.ndarray], np.ndarray] | None = None,
    *,
    measure: Measure | str | None = None,
    alpha: float | None = None,
) -> Lemma1Report:
    """Check ``approx + exact(r) = exact(s)`` for a snapshot.

    ``exact`` maps a starting vector to the exact centrality; the default is
    the dense oracle for the snapshot's measure. Passing ``measure`` or
    ``alpha`` asserts they match the snapshot.
    """
    if measure is not None and Measure(measure) is not snap.measure:
        raise ParamError(f"snapshot is {snap.measure.value}, checker asked for {Measure(measure).value}")
    if alpha is not None and alpha != snap.alpha:
        raise ParamError(f"snapshot alpha={snap.alpha}, checker alpha={alpha}")
    if exact is None:

        def exact(v):
            return dense_solve(g, snap.measure, snap.alpha, v, snap.conditioning)

    full = np.asarray(exact(snap.source))
    rest = np.asarray(exact(snap.residual))
    defect = float(np.max(np.abs(snap.approx + rest - full)))
    scale = max(1.0, float(np.max(np.abs(full))))
    tol = 1e-8 * scale
    return Lemma1Report(defect, scale, tol, defect <= tol)
