"""Exact fixed-point solvers for PR, laPR, AC and laAC.

All four measures are linear fixed points ``x = b + alpha * W @ x`` over a
sparse weight matrix ``W`` that depends on the measure:

=======  ==========================================  ==================
measure  component form                              source ``b``
=======  ==========================================  ==================
PR       x[j] = sum_{i in in(j)} x[i] / dout(i)      (1 - alpha) * s
laPR     x[j] = sum_{i in in(j)} x[i] / (dout(i) din(j))   (1 - alpha) * s
AC       x[i] = sum_{j in out(i)} x[j]               s
laAC     x[i] = sum_{j in out(i)} x[j] / din(j)      s
=======  ==========================================  ==================

Degrees in the table are conditioned degrees. The iterative solvers sweep
the whole vector per step (Jacobi); :func:`dense_solve_oracle` builds the
dense system independently from the edge lists and solves it by LU with
partial pivoting, for use as a test oracle.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import (
    DivergenceError,
    EmptyGraph,
    NotConverged,
    NotConvergedWarning,
    ParamError,
    SingularSystem,
)
from .graph import DegreeConditioning, DirectedGraph, condition_degrees

#: Divergence gate: reject alpha >= GATE_MARGIN / rho_hat.
GATE_MARGIN = 0.99
DENSE_NODE_LIMIT = 2000


class Measure(str, Enum):
    PR = "pr"
    LAPR = "lapr"
    AC = "ac"
    LAAC = "laac"

    @property
    def walk_based(self) -> bool:
        return self in (Measure.PR, Measure.LAPR)


class Starting(str, Enum):
    UNIFORM = "uniform"
    INDEGREE_INVERSE = "indegree-inverse"
    OUT_DEGREE = "out-degree"
    LA_OUT_DEGREE = "la-out-degree"
    CUSTOM = "custom"


DEFAULT_STARTING = {
    Measure.PR: Starting.UNIFORM,
    Measure.LAPR: Starting.UNIFORM,
    Measure.AC: Starting.OUT_DEGREE,
    Measure.LAAC: Starting.LA_OUT_DEGREE,
}


@dataclass(frozen=True)
class CentralityParams:
    """Solver parameters.

    ``starting=None`` selects the measure's default starting vector. A
    ``custom`` vector implies ``starting=Starting.CUSTOM``.
    """

    alpha: float
    starting: Starting | None = None
    custom: tuple[float, ...] | None = None
    tol: float = 1e-10
    max_iter: int = 10_000
    conditioning: DegreeConditioning = field(default_factory=DegreeConditioning)

    def __post_init__(self):
        if self.custom is not None:
            object.__setattr__(self, "custom", tuple(float(v) for v in self.custom))
            if self.starting is None:
                object.__setattr__(self, "starting", Starting.CUSTOM)
        if self.starting is not None:
            object.__setattr__(self, "starting", Starting(self.starting))
        problems = []
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            problems.append(f"alpha must be finite and >= 0, got {self.alpha}")
        if not self.tol > 0:
            problems.append(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            problems.append(f"max_iter must be >= 1, got {self.max_iter}")
        if self.starting is Starting.CUSTOM:
            if self.custom is None:
                problems.append("starting=custom requires a custom vector")
            else:
                c = np.asarray(self.custom)
                if (c < 0).any() or not np.isfinite(c).all():
                    problems.append("custom starting vector entries must be finite and >= 0")
                elif not c.any():
                    problems.append("custom starting vector must not be all zero")
        if problems:
            raise ParamError("; ".join(problems))

    def snapshot(self) -> dict:
        d = asdict(self)
        d["starting"] = self.starting.value if self.starting else None
        d["conditioning"] = {
            "epsilon_deg": self.conditioning.epsilon_deg,
            "mode": self.conditioning.mode.value,
        }
        return d


@dataclass
class ScoreVector:
    scores: np.ndarray
    measure: Measure
    params: dict
    iterations_used: int = 0
    converged: bool = True

    def __len__(self):
        return len(self.scores)

    def as_mapping(self, labels: Sequence[str]) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(labels, self.scores)}

    def to_csv(self, labels: Sequence[str]) -> str:
        """``node_label,score`` rows by descending score, ties by label."""
        order = sorted(range(len(self.scores)), key=lambda i: (-self.scores[i], labels[i]))
        rows = ["node_label,score"]
        rows += [f"{labels[i]},{float(self.scores[i])!r}" for i in order]
        return "\n".join(rows) + "\n"

    def to_json(self, labels: Sequence[str]) -> str:
        return json.dumps(
            {
                "measure": self.measure.value,
                "params": self.params,
                "iterations_used": self.iterations_used,
                "converged": self.converged,
                "scores": {lab: float(v) for lab, v in zip(labels, self.scores)},
            },
            indent=2,
            sort_keys=True,
        )


def _require_edges(g: DirectedGraph):
    if g.edge_count == 0:
        raise EmptyGraph(f"graph with {g.node_count} nodes has no edges")


def starting_vector(
    g: DirectedGraph, measure: Measure, params: CentralityParams
) -> np.ndarray:
    measure = Measure(measure)
    kind = params.starting or DEFAULT_STARTING[measure]
    n = g.node_count
    if kind is Starting.CUSTOM:
        s = np.asarray(params.custom, dtype=float)
        if len(s) != n:
            raise ParamError(f"custom starting vector has length {len(s)}, graph has {n} nodes")
        return s.copy()
    if kind is Starting.UNIFORM:
        return np.full(n, 1.0 / n)
    if kind is Starting.OUT_DEGREE:
        return g.d_out.astype(float)
    deg = condition_degrees(g, params.conditioning)
    if kind is Starting.INDEGREE_INVERSE:
        return 1.0 / deg.d_in_c
    # la-out-degree: s[i] = sum_{j in out(i)} 1 / din(j)
    return g.adjacency @ (1.0 / deg.d_in_c)


def weight_matrix(g: DirectedGraph, measure: Measure, conditioning: DegreeConditioning) -> sp.csr_matrix:
    """Sparse ``W`` of the fixed point ``x = b + alpha W x`` (see module doc)."""
    measure = Measure(measure)
    A = g.adjacency
    if measure is Measure.AC:
        return A.copy()
    deg = condition_degrees(g, conditioning)
    inv_in = sp.diags(1.0 / deg.d_in_c)
    if measure is Measure.LAAC:
        return (A @ inv_in).tocsr()
    inv_out = sp.diags(1.0 / deg.d_out_c)
    P = inv_out @ A
    if measure is Measure.LAPR:
        P = P @ inv_in
    return P.T.tocsr()


def source_vector(measure: Measure, alpha: float, s: np.ndarray) -> np.ndarray:
    return (1.0 - alpha) * s if Measure(measure).walk_based else np.asarray(s, dtype=float)


@dataclass(frozen=True)
class SpectralEstimate:
    value: float
    rel_change: float
    iterations: int

    def __float__(self):
        return self.value


def spectral_radius(
    g: DirectedGraph,
    matrix: str = "A",
    iters: int = 5000,
    seed: int = 0,
    tol: float = 1e-12,
    conditioning: DegreeConditioning = DegreeConditioning(),
) -> SpectralEstimate:
    """Power-iteration estimate of the spectral radius of ``A`` or ``M = A D_in^-1``.

    Iterates on the shifted matrix ``B + I``: for a non-negative ``B`` the
    shift moves the Perron root by exactly one and removes the periodicity
    that stalls plain power iteration on cycles and bipartite graphs.
    """
    n = g.node_count
    if n == 0 or g.edge_count == 0:
        return SpectralEstimate(0.0, 0.0, 0)
    key = (matrix, iters, seed, tol, conditioning)
    cache = g.__dict__.setdefault("_spectral_cache", {})
    if key in cache:
        return cache[key]
    if matrix == "A":
        B = g.adjacency
    elif matrix == "M":
        B = weight_matrix(g, Measure.LAAC, conditioning)
    else:
        raise ParamError(f"matrix must be 'A' or 'M', got {matrix!r}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.5, 1.5, size=n)
    x /= x.sum()
    est, prev, rel = 0.0, math.inf, math.inf
    k = 0
    for k in range(1, iters + 1):
        y = B @ x + x
        norm = y.sum()
        est = norm - 1.0
        x = y / norm
        rel = abs(est - prev) / max(abs(est), 1e-300)
        if rel < tol:
            break
        prev = est
    cache[key] = result = SpectralEstimate(max(float(est), 0.0), float(rel), k)
    return result


def divergence_gate(
    g: DirectedGraph, measure: Measure, alpha: float, conditioning: DegreeConditioning
) -> float:
    """Raise :class:`DivergenceError` unless ``alpha < GATE_MARGIN / rho_hat``.

    Returns ``rho_hat``. Only the AC family has a divergence boundary.
    """
    measure = Measure(measure)
    if measure.walk_based:
        return 0.0
    rho = spectral_radius(g, "A" if measure is Measure.AC else "M", conditioning=conditioning).value
    if rho > 0 and alpha >= GATE_MARGIN / rho:
        raise DivergenceError(
            f"{measure.value}: alpha={alpha} >= {GATE_MARGIN}/rho_hat = {GATE_MARGIN / rho:.6g} "
            f"(rho_hat={rho:.6g})"
        )
    return rho


def _check_alpha(measure: Measure, alpha: float):
    if measure.walk_based and not 0 <= alpha < 1:
        raise ParamError(f"{measure.value}: alpha must be in [0, 1), got {alpha}")


def solve_fixed_point(
    g: DirectedGraph,
    measure: Measure,
    alpha: float,
    source: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    conditioning: DegreeConditioning = DegreeConditioning(),
) -> tuple[np.ndarray, int, bool]:
    """Jacobi sweeps for ``x = b + alpha W x``; ``source`` is the starting vector s.

    No divergence gate and no validation of ``source``: callers that need
    them go through the public solvers.
    """
    W = weight_matrix(g, measure, conditioning)
    b = source_vector(measure, alpha, np.asarray(source, dtype=float))
    x = b.copy()
    for it in range(1, max_iter + 1):
        x_new = b + alpha * (W @ x)
        change = np.max(np.abs(x_new - x)) if len(x) else 0.0
        x = x_new
        if change < tol:
            return x, it, True
        if not np.isfinite(change):
            break
    return x, max_iter, False


def _solve(g, measure, p: CentralityParams, strict: bool) -> ScoreVector:
    measure = Measure(measure)
    _require_edges(g)
    _check_alpha(measure, p.alpha)
    divergence_gate(g, measure, p.alpha, p.conditioning)
    s = starting_vector(g, measure, p)
    x, iters, ok = solve_fixed_point(
        g, measure, p.alpha, s, tol=p.tol, max_iter=p.max_iter, conditioning=p.conditioning
    )
    result = ScoreVector(x, measure, p.snapshot(), iters, ok)
    if not ok:
        msg = f"{measure.value} did not converge in {p.max_iter} iterations (tol={p.tol})"
        if strict:
            raise NotConverged(msg, result)
        warnings.warn(msg, NotConvergedWarning, stacklevel=3)
    return result


def pagerank_exact(g: DirectedGraph, p: CentralityParams, strict: bool = False) -> ScoreVector:
    return _solve(g, Measure.PR, p, strict)


def la_pagerank_exact(g: DirectedGraph, p: CentralityParams, strict: bool = False) -> ScoreVector:
    return _solve(g, Measure.LAPR, p, strict)


def alpha_centrality_exact(g: DirectedGraph, p: CentralityParams, strict: bool = False) -> ScoreVector:
    return _solve(g, Measure.AC, p, strict)


def la_alpha_centrality_exact(g: DirectedGraph, p: CentralityParams, strict: bool = False) -> ScoreVector:
    return _solve(g, Measure.LAAC, p, strict)


EXACT_SOLVERS = {
    Measure.PR: pagerank_exact,
    Measure.LAPR: la_pagerank_exact,
    Measure.AC: alpha_centrality_exact,
    Measure.LAAC: la_alpha_centrality_exact,
}


def dense_system(
    g: DirectedGraph, measure: Measure, alpha: float, conditioning: DegreeConditioning
) -> np.ndarray:
    """Dense ``I - alpha * W`` assembled edge by edge from the neighbour lists."""
    measure = Measure(measure)
    n = g.node_count
    d_out = np.array([len(r) for r in g.out_neighbors], dtype=float)
    d_in = np.array([len(r) for r in g.in_neighbors], dtype=float)
    if measure is not Measure.AC:
        deg = condition_degrees(g, conditioning)
        d_out, d_in = deg.d_out_c, deg.d_in_c
    K = np.eye(n)
    for u in range(n):
        for v in g.out_neighbors[u]:
            if measure is Measure.PR:
                K[v, u] -= alpha / d_out[u]
            elif measure is Measure.LAPR:
                K[v, u] -= alpha / (d_out[u] * d_in[v])
            elif measure is Measure.AC:
                K[u, v] -= alpha
            else:
                K[u, v] -= alpha / d_in[v]
    return K


def dense_solve(
    g: DirectedGraph,
    measure: Measure,
    alpha: float,
    source: np.ndarray,
    conditioning: DegreeConditioning = DegreeConditioning(),
) -> np.ndarray:
    """Solve the dense system for an arbitrary starting vector ``source``."""
    if g.node_count > DENSE_NODE_LIMIT:
        raise ParamError(f"dense oracle limited to {DENSE_NODE_LIMIT} nodes, got {g.node_count}")
    K = dense_system(g, measure, alpha, conditioning)
    b = source_vector(measure, alpha, np.asarray(source, dtype=float))
    lu, piv = scipy.linalg.lu_factor(K, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.size and pivots.min() <= np.finfo(float).eps * max(1.0, pivots.max()) * len(b):
        raise SingularSystem(f"{Measure(measure).value}: system is singular at alpha={alpha}")
    return scipy.linalg.lu_solve((lu, piv), b)


def dense_solve_oracle(g: DirectedGraph, measure: Measure, p: CentralityParams) -> ScoreVector:
    measure = Measure(measure)
    s = starting_vector(g, measure, p)
    x = dense_solve(g, measure, p.alpha, s, p.conditioning)
    return ScoreVector(x, measure, p.snapshot(), 1, True)
