"""Statistics over the rank plane: correlator, density grids, diagonal
profiles, power-law fits, the independent-product null model, and a seeded
scale-free graph generator for desk-scale experiments.

Reference values measured on the August 2009 English Wikipedia article
network (N = 3,282,257) are recorded below for orientation only; nothing in
this package asserts them, since that snapshot is not shipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .errors import ContractViolation, ConvergenceError, ParseError
from .googlerank import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    INPUT_SUM_TOL,
    RankVector,
    pagerank,
)
from .graph import DegreeHistogram, DirectedGraph, invert
from .twodrank import RankTable

# August 2009 English Wikipedia article network, for reference only.
WIKIPEDIA_2009_KAPPA = 4.08        # rank-probability correlator
WIKIPEDIA_2009_MU_IN = 2.09        # in-degree exponent, +/- 0.04
WIKIPEDIA_2009_MU_OUT = 2.76       # out-degree exponent, +/- 0.06
WIKIPEDIA_2009_BETA_IN = 0.92      # pagerank rank-curve exponent
WIKIPEDIA_2009_BETA_OUT = 0.57     # cheirank rank-curve exponent


# ---- correlator ------------------------------------------------------------


@dataclass(frozen=True)
class CorrelatorPoint:
    """kappa = N * sum_i P(i) P*(i) - 1 at one (alpha, alpha_star) pair."""

    kappa: float
    alpha: float
    alpha_star: float
    converged: bool = True


def correlator(p: RankVector, p_star: RankVector) -> CorrelatorPoint:
    """Correlation of the two rank probability vectors around independence.

    Zero for uniform (or independent-by-construction) vectors; positive when
    nodes that collect ingoing weight also emit outgoing weight.
    """
    if p.n_nodes != p_star.n_nodes:
        raise ContractViolation(
            f"vector lengths differ: {p.n_nodes} vs {p_star.n_nodes}"
        )
    n = p.n_nodes
    kappa = n * float(np.dot(p.values, p_star.values)) - 1.0
    return CorrelatorPoint(kappa=kappa, alpha=p.alpha, alpha_star=p_star.alpha)


def correlator_sweep(
    g: DirectedGraph,
    alphas: Sequence[float],
    alpha_stars: Sequence[float] | None = None,
    mode: str = "diagonal",
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[CorrelatorPoint]:
    """Correlator over a damping sweep, one freshly converged pair per point.

    Modes: "diagonal" walks alpha = alpha_star over `alphas`; "fix_alpha"
    holds alphas[0] and walks `alpha_stars`; "fix_alpha_star" holds
    alpha_stars[0] and walks `alphas`.  Points where either solve fails to
    converge are kept in the output, flagged converged=False with NaN kappa.
    """
    if mode == "diagonal":
        pairs = [(a, a) for a in alphas]
    elif mode == "fix_alpha":
        if len(alphas) != 1 or not alpha_stars:
            raise ContractViolation("fix_alpha needs one alpha and a list of alpha_stars")
        pairs = [(alphas[0], s) for s in alpha_stars]
    elif mode == "fix_alpha_star":
        if alpha_stars is None or len(alpha_stars) != 1 or not alphas:
            raise ContractViolation("fix_alpha_star needs one alpha_star and a list of alphas")
        pairs = [(a, alpha_stars[0]) for a in alphas]
    else:
        raise ContractViolation(f"unknown sweep mode {mode!r}")
    for a, s in pairs:
        if not (0.0 < a < 1.0 and 0.0 < s < 1.0):
            raise ContractViolation(
                f"sweep damping values must lie strictly inside (0, 1), got ({a}, {s})"
            )

    g_inv = invert(g)
    forward: dict[float, RankVector | None] = {}
    backward: dict[float, RankVector | None] = {}
    points: list[CorrelatorPoint] = []
    for a, s in pairs:
        if a not in forward:
            try:
                forward[a] = pagerank(g, alpha=a, tol=tol, max_iter=max_iter)
            except ConvergenceError:
                forward[a] = None
        if s not in backward:
            try:
                backward[s] = pagerank(g_inv, alpha=s, tol=tol, max_iter=max_iter)
            except ConvergenceError:
                backward[s] = None
        p, p_star = forward[a], backward[s]
        if p is None or p_star is None:
            points.append(CorrelatorPoint(math.nan, a, s, converged=False))
        else:
            kappa = g.n_nodes * float(np.dot(p.values, p_star.values)) - 1.0
            points.append(CorrelatorPoint(kappa, a, s))
    return points


# ---- density grid in the (ln K, ln K*) plane --------------------------------


@dataclass(frozen=True)
class DensityGrid:
    """Cell-count histogram over an equidistant grid in log-rank space.

    Both axes span [0, ln(n_ranks)]; cells are half-open with the last cell
    closed, so every rank in [1, n_ranks] lands in exactly one cell.
    counts[i, j] holds nodes whose (ln K, ln K*) falls in cell (i, j); w is
    counts normalized by the number of samples (sums to one).
    """

    counts: np.ndarray
    n_ranks: int
    n_samples: int

    @property
    def cells(self) -> int:
        return self.counts.shape[0]

    @property
    def axis_max(self) -> float:
        return math.log(self.n_ranks)

    @property
    def w(self) -> np.ndarray:
        return self.counts / self.n_samples

    def cell_of(self, rank: int) -> int:
        """Cell index along one axis for a 1-based rank."""
        h = self.axis_max / self.cells
        return min(int(math.log(rank) / h), self.cells - 1)

    def density_per_area(self) -> np.ndarray:
        """Differential density: count / (samples * linear-rank cell area)."""
        edges = np.exp(np.linspace(0.0, self.axis_max, self.cells + 1))
        widths = np.diff(edges)
        return self.counts / (self.n_samples * np.outer(widths, widths))


def grid_from_rank_pairs(
    k: np.ndarray, k_star: np.ndarray, n_ranks: int, cells: int = 100
) -> DensityGrid:
    """Bin (rank, rank*) pairs on the cells x cells log grid."""
    if n_ranks < 2:
        raise ContractViolation("need at least 2 ranks for a log-spaced grid")
    if cells < 2:
        raise ContractViolation("need at least 2 cells per axis")
    k = np.asarray(k, dtype=np.int64)
    k_star = np.asarray(k_star, dtype=np.int64)
    if len(k) != len(k_star):
        raise ContractViolation("rank arrays differ in length")
    if k.min() < 1 or k_star.min() < 1 or k.max() > n_ranks or k_star.max() > n_ranks:
        raise ContractViolation(f"ranks must lie in [1, {n_ranks}]")
    h = math.log(n_ranks) / cells
    ix = np.minimum((np.log(k) / h).astype(np.int64), cells - 1)
    iy = np.minimum((np.log(k_star) / h).astype(np.int64), cells - 1)
    flat = np.bincount(ix * cells + iy, minlength=cells * cells)
    return DensityGrid(
        counts=flat.reshape(cells, cells), n_ranks=n_ranks, n_samples=len(k)
    )


def density_grid(table: RankTable, cells: int = 100) -> DensityGrid:
    """Empirical density of the table's nodes in the log-rank plane."""
    return grid_from_rank_pairs(
        table.pagerank_rank, table.cheirank_rank, len(table), cells=cells
    )


@dataclass(frozen=True)
class EtaSlice:
    """Grid densities sampled along ln K = x0 + eta/2, ln K* = x0 - eta/2."""

    x0: float
    eta: np.ndarray
    density: np.ndarray


def slice_density(grid: DensityGrid, x0: float) -> EtaSlice:
    """Walk the diagonal line through (x0, x0), one sample per cell crossed.

    Samples are taken at the eta-midpoint of each cell traversal, so every
    sampled point is within half a cell of the line's intersection with the
    cell.
    """
    L = grid.axis_max
    if not 0.0 <= x0 <= L:
        raise ContractViolation(f"x0={x0} outside the grid range [0, {L:.6g}]")
    half_span = 2.0 * min(x0, L - x0)
    w = grid.w
    h = L / grid.cells

    if half_span == 0.0:
        cell = grid.cells - 1 if x0 == L else 0
        return EtaSlice(x0=x0, eta=np.zeros(1), density=np.array([w[cell, cell]]))

    boundaries = np.arange(grid.cells + 1) * h
    crossings = np.concatenate([2.0 * (boundaries - x0), 2.0 * (x0 - boundaries)])
    crossings = crossings[(crossings > -half_span) & (crossings < half_span)]
    stops = np.unique(np.concatenate([[-half_span], crossings, [half_span]]))
    mids = (stops[:-1] + stops[1:]) / 2.0

    ix = np.minimum(((x0 + mids / 2.0) / h).astype(np.int64), grid.cells - 1)
    iy = np.minimum(((x0 - mids / 2.0) / h).astype(np.int64), grid.cells - 1)
    return EtaSlice(x0=x0, eta=mids, density=w[ix, iy])


# ---- power-law fitting -------------------------------------------------------


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares log-log slope over logarithmically binned data.

    exponent is the decay exponent (positive for decreasing data); bin_x and
    bin_y are the geometric bin representatives that were regressed.
    """

    exponent: float
    stderr: float
    fit_range: tuple[float, float]
    r_squared: float
    bin_x: np.ndarray
    bin_y: np.ndarray


def fit_power_law(
    x: np.ndarray,
    y: np.ndarray,
    fit_range: tuple[float, float],
    num_bins: int = 20,
) -> PowerLawFit:
    """Fit value ~ x^(-exponent) on [fit_range] by binned log-log regression.

    Points are grouped into equal-ratio bins; each bin contributes the
    geometric mean of its x and y values, which keeps exact power-law input
    exactly on the regression line regardless of binning.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    lo, hi = float(fit_range[0]), float(fit_range[1])
    if not 0.0 < lo < hi:
        raise ContractViolation(f"invalid fit range [{lo}, {hi}]")
    inside = (x >= lo) & (x <= hi)
    if np.any(y[inside] <= 0.0):
        raise ContractViolation("zero or negative values inside the fit range")
    xs, ys = x[inside], y[inside]
    if len(xs) < 5:
        raise ContractViolation(
            f"need at least 5 points inside the fit range, found {len(xs)}"
        )

    edges = np.exp(np.linspace(math.log(lo), math.log(hi), num_bins + 1))
    edges[-1] = np.nextafter(edges[-1], np.inf)  # keep x == hi inside the last bin
    which = np.digitize(xs, edges) - 1
    log_x, log_y = np.log(xs), np.log(ys)
    bx, by = [], []
    for b in range(num_bins):
        sel = which == b
        if np.any(sel):
            bx.append(log_x[sel].mean())
            by.append(log_y[sel].mean())
    bx = np.asarray(bx)
    by = np.asarray(by)
    if len(bx) < 3:
        raise ContractViolation(f"only {len(bx)} occupied bins; need at least 3")

    slope, intercept = np.polyfit(bx, by, 1)
    predicted = slope * bx + intercept
    resid = by - predicted
    dof = len(bx) - 2
    var_x = float(np.sum((bx - bx.mean()) ** 2))
    stderr = math.sqrt(float(np.sum(resid**2)) / dof / var_x) if dof > 0 else math.nan
    total = float(np.sum((by - by.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(resid**2)) / total if total > 0 else 1.0
    return PowerLawFit(
        exponent=-float(slope),
        stderr=stderr,
        fit_range=(lo, hi),
        r_squared=r_squared,
        bin_x=np.exp(bx),
        bin_y=np.exp(by),
    )


def histogram_curve(hist: DegreeHistogram) -> tuple[np.ndarray, np.ndarray]:
    """(degree, frequency) points for fitting; degree-0 nodes are dropped."""
    total = hist.total_nodes()
    ks = np.asarray(sorted(k for k in hist.counts if k >= 1), dtype=np.float64)
    ws = np.asarray([hist.counts[int(k)] / total for k in ks])
    return ks, ws


def rank_curve(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(rank, probability) with rank 1 the largest value."""
    v = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    return np.arange(1, len(v) + 1, dtype=np.float64), v


# ---- independent-product null model ------------------------------------------


def sample_independent(
    p_curve: np.ndarray,
    p_star_curve: np.ndarray,
    n: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n (rank, rank*) pairs with each coordinate sampled independently
    from its own rank-probability curve (with replacement).

    Binning the pairs with grid_from_rank_pairs gives the null-model grid
    against which the empirical rank-plane density is compared.
    """
    if n < 1:
        raise ContractViolation("need at least one sample")
    ks = _sample_curve(np.asarray(p_curve, dtype=np.float64), n, np.random.default_rng(seed))
    k_stars = _sample_curve(
        np.asarray(p_star_curve, dtype=np.float64), n, np.random.default_rng(seed + 1)
    )
    return ks, k_stars


def _sample_curve(curve: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    total = float(np.sum(curve))
    if abs(total - 1.0) > INPUT_SUM_TOL:
        raise ContractViolation(f"rank curve sums to {total!r}, not 1")
    if np.any(curve < 0.0):
        raise ContractViolation("rank curve has negative entries")
    cum = np.cumsum(curve)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(n), side="right").astype(np.int64) + 1


# ---- scale-free generator ------------------------------------------------------


def power_law_pmf(exponent: float, k_max: int, k_min: int = 1) -> np.ndarray:
    """Normalized pmf proportional to k^(-exponent) on {k_min..k_max}.

    Index 0 of the result corresponds to degree k_min.
    """
    if k_min < 1 or k_max < k_min:
        raise ContractViolation(f"bad support [{k_min}, {k_max}]")
    k = np.arange(k_min, k_max + 1, dtype=np.float64)
    p = k**-exponent
    return p / p.sum()


def _mean_adjusted_pmf(exponent: float, mean: float, k_max: int) -> tuple[int, np.ndarray]:
    """Degree pmf with an exact power-law tail and the requested mean.

    The tail {k0+1..k_max} is exactly proportional to k^(-exponent); the
    single head bin at k0 takes whatever mass makes the mean come out right.
    Returns (k0, pmf over {k0..k_max}).
    """
    k = np.arange(1, k_max + 1, dtype=np.float64)
    weight = k**-exponent
    # Suffix sums: mass and first moment of the un-normalized tail from k upward.
    mass = np.cumsum(weight[::-1])[::-1]
    moment = np.cumsum((weight * k)[::-1])[::-1]
    tail_mean = moment / mass  # tail_mean[j] = mean of the pure law on {j+1..k_max}

    k0 = None
    for candidate in range(1, min(k_max - 1, 1000) + 1):
        if tail_mean[candidate] >= mean:  # tail support {candidate+1 .. k_max}
            k0 = candidate
            break
    if k0 is None:
        raise ContractViolation(
            f"mean degree {mean} is not reachable with exponent {exponent} "
            f"and cutoff {k_max}"
        )
    m_tail = float(tail_mean[k0])
    head = (m_tail - mean) / (m_tail - k0)
    if not 0.0 <= head <= 1.0:
        raise ContractViolation(
            f"mean degree {mean} infeasible: head mass {head:.4f} out of [0, 1]"
        )
    pmf = np.empty(k_max - k0 + 1)
    pmf[0] = head
    tail = weight[k0:]  # degrees k0+1 .. k_max
    pmf[1:] = (1.0 - head) * tail / tail.sum()
    return k0, pmf


def generate_scale_free(
    n: int,
    mu_in: float,
    mu_out: float,
    mean_degree: float,
    seed: int,
) -> DirectedGraph:
    """Directed configuration-model graph with power-law degree tails.

    In- and out-degree sequences are i.i.d. draws (cutoff k_max = n, head
    bin adjusted so both directions hit mean_degree); stubs are matched
    uniformly at random, excess stubs on the heavier side are trimmed
    uniformly at random, and repeated pairs merge into multiplicities.
    Self-loops are kept.
    """
    if n < 100:
        raise ContractViolation(f"need n >= 100, got {n}")
    if mu_in <= 2.0 or mu_out <= 2.0:
        raise ContractViolation("degree exponents must exceed 2 (finite mean)")
    if mean_degree < 1.0:
        raise ContractViolation(f"mean degree must be >= 1, got {mean_degree}")

    rng = np.random.default_rng(seed)
    k0_in, pmf_in = _mean_adjusted_pmf(mu_in, mean_degree, n)
    k0_out, pmf_out = _mean_adjusted_pmf(mu_out, mean_degree, n)
    deg_in = _draw_degrees(pmf_in, k0_in, n, rng)
    deg_out = _draw_degrees(pmf_out, k0_out, n, rng)

    in_stubs = np.repeat(np.arange(n, dtype=np.int64), deg_in)
    out_stubs = np.repeat(np.arange(n, dtype=np.int64), deg_out)
    m = min(len(in_stubs), len(out_stubs))
    if len(in_stubs) > m:
        in_stubs = in_stubs[rng.permutation(len(in_stubs))[:m]]
    elif len(out_stubs) > m:
        out_stubs = out_stubs[rng.permutation(len(out_stubs))[:m]]
    dst = in_stubs[rng.permutation(m)]
    src = out_stubs

    code = src * np.int64(n) + dst
    unique, counts = np.unique(code, return_counts=True)
    width = len(str(n - 1))
    names = [f"n{i:0{width}d}" for i in range(n)]
    return DirectedGraph.from_edges(
        names, unique // n, unique % n, counts.astype(np.int64)
    )


def _draw_degrees(pmf: np.ndarray, k_start: int, n: int, rng: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(pmf)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(n), side="right").astype(np.int64) + k_start


# ---- persistence -----------------------------------------------------------


def write_density_grid(grid: DensityGrid, target: str | Path | IO[str]) -> None:
    """CSV with one row per cell: i,j,count,w,density_per_area."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            write_density_grid(grid, f)
        return
    out: IO[str] = target
    out.write(
        f"# n_ranks={grid.n_ranks} n_samples={grid.n_samples} cells={grid.cells} "
        f"axis_max={grid.axis_max!r}\n"
    )
    out.write("i,j,count,w,density_per_area\n")
    per_area = grid.density_per_area()
    w = grid.w
    for i in range(grid.cells):
        for j in range(grid.cells):
            out.write(
                f"{i},{j},{int(grid.counts[i, j])},{float(w[i, j])!r},"
                f"{float(per_area[i, j])!r}\n"
            )


def read_density_grid(source: str | Path | IO[str]) -> DensityGrid:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return read_density_grid(f)
    meta: dict[str, str] = {}
    rows: list[tuple[int, int, int]] = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line or line.startswith("i,"):
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, _, val = token.partition("=")
                    meta[key] = val
            continue
        fields = line.split(",")
        if len(fields) != 5:
            raise ParseError("expected i,j,count,w,density_per_area", line_no)
        rows.append((int(fields[0]), int(fields[1]), int(fields[2])))
    cells = int(meta["cells"])
    counts = np.zeros((cells, cells), dtype=np.int64)
    for i, j, c in rows:
        counts[i, j] = c
    return DensityGrid(
        counts=counts, n_ranks=int(meta["n_ranks"]), n_samples=int(meta["n_samples"])
    )


def write_eta_slice(sl: EtaSlice, target: str | Path | IO[str]) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            write_eta_slice(sl, f)
        return
    target.write(f"# x0={float(sl.x0)!r}\n")
    target.write("eta,density\n")
    for e, d in zip(sl.eta, sl.density):
        target.write(f"{float(e)!r},{float(d)!r}\n")


def write_power_law_fit(fit: PowerLawFit, target: str | Path | IO[str]) -> None:
    """Binned points as x,y rows; the fitted parameters live in the header."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            write_power_law_fit(fit, f)
        return
    target.write(
        f"# exponent={fit.exponent!r} stderr={fit.stderr!r} "
        f"r_squared={fit.r_squared!r} fit_min={fit.fit_range[0]!r} "
        f"fit_max={fit.fit_range[1]!r}\n"
    )
    target.write("x,y\n")
    for xv, yv in zip(fit.bin_x, fit.bin_y):
        target.write(f"{float(xv)!r},{float(yv)!r}\n")


def write_correlator_points(
    points: Sequence[CorrelatorPoint], target: str | Path | IO[str]
) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            write_correlator_points(points, f)
        return
    target.write("alpha,alpha_star,kappa,converged\n")
    for pt in points:
        target.write(f"{pt.alpha!r},{pt.alpha_star!r},{pt.kappa!r},{int(pt.converged)}\n")


def read_csv_series(source: str | Path | IO[str]) -> tuple[dict[str, str], dict[str, list[str]]]:
    """Generic reader for the two-column-and-up series CSVs written above."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return read_csv_series(f)
    meta: dict[str, str] = {}
    header: list[str] | None = None
    columns: dict[str, list[str]] = {}
    for raw in source:
        line = raw.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, _, val = token.partition("=")
                    meta[key] = val
            continue
        fields = line.split(",")
        if header is None:
            header = fields
            columns = {name: [] for name in header}
            continue
        for name, value in zip(header, fields):
            columns[name].append(value)
    return meta, columns
