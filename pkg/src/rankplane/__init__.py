"""Two-axis link analysis for directed multigraphs.

Popularity (ingoing-link) and communicativity (outgoing-link) stationary
rankings, their combined square-expansion rank, and the statistics of the
two-dimensional rank plane: correlator, log-cell density grids, diagonal
profiles, power-law fits, overlap metrics, and a seeded scale-free
generator.  See the `cli` module (console script ``rankplane``) for the
file-based pipeline.
"""

from .errors import ContractViolation, ConvergenceError, ParseError
from .graph import (
    DegreeHistogram,
    DirectedGraph,
    IngestStats,
    NodeSubset,
    SubsetReport,
    degree_distribution,
    invert,
    load_edge_list,
    load_node_subset,
    subset_from_names,
    write_edge_list,
)
from .googlerank import (
    DEFAULT_ALPHA,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    DampingParams,
    GoogleOperator,
    RankVector,
    apply_google,
    cheirank,
    pagerank,
    read_rank_vector,
    write_rank_vector,
)
from .twodrank import (
    RankIndex,
    RankTable,
    build_rank_table,
    rank_indices,
    read_rank_table,
    subset_rank,
    two_d_rank,
    write_rank_table,
)
from .netstats import (
    CorrelatorPoint,
    DensityGrid,
    EtaSlice,
    PowerLawFit,
    correlator,
    correlator_sweep,
    density_grid,
    fit_power_law,
    generate_scale_free,
    grid_from_rank_pairs,
    histogram_curve,
    power_law_pmf,
    rank_curve,
    read_density_grid,
    sample_independent,
    slice_density,
    write_density_grid,
)
from .overlap import (
    OverlapSeries,
    RankedList,
    load_ranked_list,
    overlap_curve,
    overlap_fraction,
    ranked_list,
    read_overlap_series,
    subset_window_fraction,
    window_overlap,
    write_overlap_series,
)

__version__ = "0.1.0"

__all__ = [
    "ContractViolation",
    "ConvergenceError",
    "ParseError",
    "DegreeHistogram",
    "DirectedGraph",
    "IngestStats",
    "NodeSubset",
    "SubsetReport",
    "degree_distribution",
    "invert",
    "load_edge_list",
    "load_node_subset",
    "subset_from_names",
    "write_edge_list",
    "DEFAULT_ALPHA",
    "DEFAULT_MAX_ITER",
    "DEFAULT_TOL",
    "DampingParams",
    "GoogleOperator",
    "RankVector",
    "apply_google",
    "cheirank",
    "pagerank",
    "read_rank_vector",
    "write_rank_vector",
    "RankIndex",
    "RankTable",
    "build_rank_table",
    "rank_indices",
    "read_rank_table",
    "subset_rank",
    "two_d_rank",
    "write_rank_table",
    "CorrelatorPoint",
    "DensityGrid",
    "EtaSlice",
    "PowerLawFit",
    "correlator",
    "correlator_sweep",
    "density_grid",
    "fit_power_law",
    "generate_scale_free",
    "grid_from_rank_pairs",
    "histogram_curve",
    "power_law_pmf",
    "rank_curve",
    "read_density_grid",
    "sample_independent",
    "slice_density",
    "write_density_grid",
    "OverlapSeries",
    "RankedList",
    "load_ranked_list",
    "overlap_curve",
    "overlap_fraction",
    "ranked_list",
    "read_overlap_series",
    "subset_window_fraction",
    "window_overlap",
    "write_overlap_series",
]
