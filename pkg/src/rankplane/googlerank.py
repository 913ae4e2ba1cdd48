"""Matrix-free Google operator and the power-iteration PageRank/CheiRank solver.

The stochastic matrix is never materialized.  One application of the
operator to a probability vector v is

    y = alpha * (column-normalized multigraph push of v)
        + alpha * (mass of v on dangling nodes) / N
        + (1 - alpha) / N

which is exactly the damped Google matrix product in exact arithmetic: the
dangling columns (nodes without outgoing links) act as uniform 1/N columns
via the rank-1 correction, and the teleport term spreads (1-alpha)
uniformly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np
import scipy.sparse as sp

from .errors import ContractViolation, ConvergenceError, ParseError
from .graph import DirectedGraph, invert

DEFAULT_ALPHA = 0.85
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1000

# How closely a stored probability vector must sum to one.
NORMALIZATION_TOL = 1e-12
# How closely an *input* vector must sum to one before we refuse it.
INPUT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class DampingParams:
    """Damping for the forward (alpha) and link-inverted (alpha_star) solves."""

    alpha: float = DEFAULT_ALPHA
    alpha_star: float = DEFAULT_ALPHA

    def __post_init__(self):
        for name, value in (("alpha", self.alpha), ("alpha_star", self.alpha_star)):
            if not 0.0 < value <= 1.0:
                raise ContractViolation(f"{name} must lie in (0, 1], got {value}")


@dataclass
class RankVector:
    """Converged probability vector over nodes, summing to one.

    kind is "pagerank" (forward links) or "cheirank" (inverted links).
    """

    kind: str
    values: np.ndarray
    alpha: float
    iterations: int
    residual: float

    def __post_init__(self):
        total = math.fsum(self.values.tolist())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ContractViolation(
                f"{self.kind} vector sums to {total!r}, expected 1 within {NORMALIZATION_TOL}"
            )
        if self.alpha < 1.0 and np.any(self.values <= 0.0):
            raise ContractViolation(f"{self.kind} vector has non-positive entries")

    @property
    def n_nodes(self) -> int:
        return len(self.values)


class GoogleOperator:
    """Reusable damped-transition operator for one (graph, alpha) pair.

    The push matrix (transposed, column-normalized adjacency) is built once;
    apply() is then a sparse matvec plus two scalar corrections.  With
    workers > 1 the output rows are partitioned into contiguous chunks and
    computed concurrently; every output component is the same dot product
    regardless of the partition, so results are bitwise independent of the
    worker count.
    """

    def __init__(self, g: DirectedGraph, alpha: float, workers: int = 1):
        if not 0.0 < alpha <= 1.0:
            raise ContractViolation(f"alpha must lie in (0, 1], got {alpha}")
        if workers < 1:
            raise ContractViolation(f"workers must be >= 1, got {workers}")
        self.alpha = alpha
        self.n = g.n_nodes
        out_w = g.out_weight()
        self.dangling = np.flatnonzero(out_w == 0.0)

        adj = g.adj
        if adj.nnz:
            row_of = np.repeat(np.arange(self.n), np.diff(adj.indptr))
            data = adj.data.astype(np.float64) / out_w[row_of]
            normalized = sp.csr_matrix(
                (data, adj.indices.copy(), adj.indptr.copy()), shape=adj.shape
            )
            self.push = normalized.T.tocsr()
        else:
            self.push = sp.csr_matrix((self.n, self.n), dtype=np.float64)

        self.workers = min(workers, self.n)
        self._chunks: list[tuple[int, int, sp.csr_matrix]] = []
        if self.workers > 1:
            # Contiguous row ranges balanced by nnz.
            targets = np.linspace(0, self.push.nnz, self.workers + 1)
            bounds = np.searchsorted(self.push.indptr, targets)
            bounds[0], bounds[-1] = 0, self.n
            for a, b in zip(bounds[:-1], bounds[1:]):
                a, b = int(a), int(b)
                if a < b:
                    self._chunks.append((a, b, self.push[a:b]))
            self._pool = ThreadPoolExecutor(max_workers=self.workers)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """One operator application; assumes v is already a probability vector."""
        if self.workers > 1:
            y = np.empty(self.n, dtype=np.float64)
            futures = [
                self._pool.submit(chunk.dot, v) for _, _, chunk in self._chunks
            ]
            for (a, b, _), fut in zip(self._chunks, futures):
                y[a:b] = fut.result()
            y *= self.alpha
        else:
            y = self.alpha * (self.push @ v)
        dangling_mass = float(v[self.dangling].sum()) if len(self.dangling) else 0.0
        y += (self.alpha * dangling_mass + (1.0 - self.alpha)) / self.n
        return y

    def close(self) -> None:
        if self.workers > 1:
            self._pool.shutdown(wait=False)


def _check_probability_vector(v: np.ndarray, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ContractViolation(f"vector length {v.shape} does not match {n} nodes")
    if np.any(v < 0.0):
        raise ContractViolation("probability vector has negative entries")
    total = float(np.sum(v))
    if abs(total - 1.0) > INPUT_SUM_TOL:
        raise ContractViolation(f"probability vector sums to {total!r}, not 1")
    return v


def apply_google(g: DirectedGraph, alpha: float, v: np.ndarray, workers: int = 1) -> np.ndarray:
    """Single damped-transition step; validates the input vector."""
    v = _check_probability_vector(v, g.n_nodes)
    op = GoogleOperator(g, alpha, workers=workers)
    try:
        return op.apply(v)
    finally:
        op.close()


def _power_iteration(
    g: DirectedGraph,
    alpha: float,
    tol: float,
    max_iter: int,
    workers: int,
    kind: str,
) -> RankVector:
    if tol <= 0.0:
        raise ContractViolation(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ContractViolation(f"max_iter must be >= 1, got {max_iter}")
    n = g.n_nodes
    op = GoogleOperator(g, alpha, workers=workers)
    try:
        v = np.full(n, 1.0 / n)
        residual = math.inf
        for iteration in range(1, max_iter + 1):
            nxt = op.apply(v)
            residual = float(np.abs(nxt - v).sum())
            v = nxt
            if residual < tol:
                v = v / np.sum(v)  # shed accumulated rounding drift
                return RankVector(
                    kind=kind, values=v, alpha=alpha, iterations=iteration, residual=residual
                )
        raise ConvergenceError(
            f"{kind} did not reach tol={tol} after {max_iter} iterations "
            f"(residual={residual:.3e})",
            iterate=v,
            residual=residual,
            iterations=max_iter,
        )
    finally:
        op.close()


def pagerank(
    g: DirectedGraph,
    alpha: float = DEFAULT_ALPHA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    workers: int = 1,
) -> RankVector:
    """Stationary probability of the damped random surfer on g."""
    return _power_iteration(g, alpha, tol, max_iter, workers, kind="pagerank")


def cheirank(
    g: DirectedGraph,
    alpha_star: float = DEFAULT_ALPHA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    workers: int = 1,
) -> RankVector:
    """PageRank of the link-inverted graph: highlights outgoing connectivity."""
    rv = _power_iteration(invert(g), alpha_star, tol, max_iter, workers, kind="cheirank")
    return rv


# ---- persistence -----------------------------------------------------------


def write_rank_vector(rv: RankVector, names: list[str], target: str | Path | IO[str]) -> None:
    """TSV: one "name<TAB>probability" row per node, in node-index order."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            write_rank_vector(rv, names, f)
        return
    out: IO[str] = target
    out.write(
        f"# kind={rv.kind} alpha={rv.alpha!r} iterations={rv.iterations} "
        f"residual={rv.residual!r}\n"
    )
    for name, p in zip(names, rv.values):
        out.write(f"{name}\t{float(p)!r}\n")


def read_rank_vector(source: str | Path | IO[str]) -> tuple[RankVector, list[str]]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return read_rank_vector(f)
    meta: dict[str, str] = {}
    names: list[str] = []
    values: list[float] = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, _, val = token.partition("=")
                    meta[key] = val
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError("expected name<TAB>probability", line_no)
        names.append(fields[0])
        values.append(float(fields[1]))
    if not values:
        raise ParseError("empty rank vector file")
    rv = RankVector(
        kind=meta.get("kind", "pagerank"),
        values=np.asarray(values),
        alpha=float(meta.get("alpha", DEFAULT_ALPHA)),
        iterations=int(meta.get("iterations", 0)),
        residual=float(meta.get("residual", 0.0)),
    )
    return rv, names
