"""Directed multigraph storage, edge-list ingestion, and degree statistics.

The graph is immutable after construction: a CSR adjacency (row = source,
column = target, value = link multiplicity) plus a dense node-id table in
first-appearance order.  All ranking code operates on node indices; names
only matter at the file boundary.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import ContractViolation, ParseError

COMMENT_CHAR = "#"


@dataclass(frozen=True)
class IngestStats:
    """What the loader saw: raw records vs. the merged graph."""

    lines: int
    edges: int
    self_loops: int
    duplicates_merged: int


@dataclass(frozen=True)
class DegreeHistogram:
    """Map degree -> number of nodes with that degree (degree-0 included)."""

    direction: str  # "in" | "out"
    weighted: bool
    counts: Mapping[int, int]

    def total_nodes(self) -> int:
        return sum(self.counts.values())


class DirectedGraph:
    """Immutable directed multigraph with per-edge multiplicities.

    `adj` is canonical CSR: sorted indices, duplicate (source, target)
    pairs merged by summing multiplicities, every multiplicity >= 1.
    Self-loops are kept; they participate in degree sums and column
    normalization like any other edge.
    """

    def __init__(self, names: list[str], adj: sp.csr_matrix, ingest: IngestStats | None = None):
        n = len(names)
        if adj.shape != (n, n):
            raise ContractViolation(f"adjacency shape {adj.shape} does not match {n} names")
        self.names = names
        self.adj = adj
        self.ingest = ingest
        self._name_index: dict[str, int] | None = None
        self._out_weight: np.ndarray | None = None

    # ---- construction ----------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        names: list[str],
        src: np.ndarray,
        dst: np.ndarray,
        mult: np.ndarray,
        ingest: IngestStats | None = None,
    ) -> "DirectedGraph":
        """Build the canonical CSR from parallel edge arrays (duplicates merged)."""
        n = len(names)
        mult = np.asarray(mult, dtype=np.int64)
        if mult.size and np.any(mult <= 0):
            raise ContractViolation("every edge multiplicity must be >= 1")
        adj = sp.coo_matrix(
            (mult, (np.asarray(src), np.asarray(dst))), shape=(n, n)
        ).tocsr()
        adj.sum_duplicates()
        adj.sort_indices()
        return cls(names, adj, ingest)

    # ---- basic queries ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.names)

    @property
    def name_index(self) -> dict[str, int]:
        if self._name_index is None:
            self._name_index = {name: i for i, name in enumerate(self.names)}
        return self._name_index

    @property
    def total_edge_weight(self) -> int:
        return int(self.adj.data.sum()) if self.adj.nnz else 0

    @property
    def n_edges(self) -> int:
        """Distinct (source, target) pairs."""
        return self.adj.nnz

    def out_weight(self) -> np.ndarray:
        """Multiplicity-weighted out-degree per node (float64)."""
        if self._out_weight is None:
            self._out_weight = np.asarray(self.adj.sum(axis=1), dtype=np.float64).ravel()
        return self._out_weight

    def in_weight(self) -> np.ndarray:
        return np.bincount(
            self.adj.indices, weights=self.adj.data, minlength=self.n_nodes
        )

    def self_loop_count(self) -> int:
        return int(np.count_nonzero(self.adj.diagonal()))

    def same_structure(self, other: "DirectedGraph") -> bool:
        """Structural equality: same node names and the same merged edge
        multiset between them.

        Internal numbering is an artifact of file appearance order, so it is
        factored out: the graphs are compared under the name correspondence.
        """
        if self.names == other.names:
            return (
                self.adj.shape == other.adj.shape
                and np.array_equal(self.adj.indptr, other.adj.indptr)
                and np.array_equal(self.adj.indices, other.adj.indices)
                and np.array_equal(self.adj.data, other.adj.data)
            )
        if sorted(self.names) != sorted(other.names):
            return False
        perm = np.asarray([other.name_index[name] for name in self.names])
        remapped = other.adj[perm][:, perm]
        return self.adj.nnz == remapped.nnz and (self.adj != remapped).nnz == 0

    def content_hash(self) -> str:
        """Stable hex digest of the node table plus canonical CSR arrays."""
        h = hashlib.sha256()
        h.update(str(self.n_nodes).encode())
        h.update(b"\x00".join(name.encode("utf-8") for name in self.names))
        h.update(self.adj.indptr.astype(np.int64).tobytes())
        h.update(self.adj.indices.astype(np.int64).tobytes())
        h.update(self.adj.data.astype(np.int64).tobytes())
        return h.hexdigest()[:16]

    def __repr__(self) -> str:
        return (
            f"DirectedGraph(nodes={self.n_nodes}, edges={self.n_edges}, "
            f"weight={self.total_edge_weight})"
        )


def invert(g: DirectedGraph) -> DirectedGraph:
    """Reverse every link: edge (i -> j, m) becomes (j -> i, m).

    The node table is shared, so ranks computed on the result refer to the
    same indices.  Involution: invert(invert(g)) is structurally equal to g.
    """
    adj = g.adj.T.tocsr()
    adj.sort_indices()
    return DirectedGraph(g.names, adj, ingest=None)


def degree_distribution(g: DirectedGraph, direction: str, weighted: bool = True) -> DegreeHistogram:
    """Histogram of in- or out-degrees over all nodes.

    By default an edge of multiplicity m contributes m (consistent with the
    stochastic-matrix column weights); weighted=False counts distinct
    neighbors instead.
    """
    if direction not in ("in", "out"):
        raise ContractViolation(f"direction must be 'in' or 'out', got {direction!r}")
    if direction == "out":
        if weighted:
            degrees = np.asarray(g.adj.sum(axis=1)).ravel().astype(np.int64)
        else:
            degrees = np.diff(g.adj.indptr).astype(np.int64)
    else:
        if weighted:
            degrees = np.bincount(
                g.adj.indices, weights=g.adj.data, minlength=g.n_nodes
            ).astype(np.int64)
        else:
            degrees = np.bincount(g.adj.indices, minlength=g.n_nodes).astype(np.int64)
    values, counts = np.unique(degrees, return_counts=True)
    return DegreeHistogram(
        direction=direction,
        weighted=weighted,
        counts={int(k): int(c) for k, c in zip(values, counts)},
    )


# ---- edge-list format ------------------------------------------------------
#
# UTF-8 text, one edge per line: "source<TAB>target[<TAB>multiplicity]".
# Missing multiplicity means 1.  Lines starting with '#' are comments;
# blank lines are ignored.  Names are trimmed of surrounding whitespace.


def _open_text(source: str | Path | IO[str]) -> tuple[Iterable[str], bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8"), True
    return source, False


def load_edge_list(source: str | Path | IO[str]) -> DirectedGraph:
    """Parse an edge list into a graph with merged multiplicities.

    Node indices are assigned in first-appearance order (source before
    target within a line), which makes repeated runs on the same file
    deterministic.
    """
    stream, owns = _open_text(source)
    names: list[str] = []
    index: dict[str, int] = {}
    src: list[int] = []
    dst: list[int] = []
    mult: list[int] = []
    records = 0
    self_loop_records = 0

    def intern(name: str, line_no: int) -> int:
        name = name.strip()
        if not name:
            raise ParseError("empty node name", line_no)
        i = index.get(name)
        if i is None:
            i = len(names)
            index[name] = i
            names.append(name)
        return i

    try:
        for line_no, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith(COMMENT_CHAR):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise ParseError(
                    f"expected 2 or 3 tab-separated fields, got {len(fields)}", line_no
                )
            s = intern(fields[0], line_no)
            t = intern(fields[1], line_no)
            if len(fields) == 3:
                text = fields[2].strip()
                if not text.isdigit() or (m := int(text)) <= 0:
                    raise ParseError(
                        f"multiplicity must be a positive integer, got {text!r}", line_no
                    )
            else:
                m = 1
            src.append(s)
            dst.append(t)
            mult.append(m)
            records += 1
            if s == t:
                self_loop_records += 1
    finally:
        if owns:
            stream.close()  # type: ignore[union-attr]

    if records == 0:
        raise ParseError("empty edge list: no edge records found")

    g = DirectedGraph.from_edges(
        names,
        np.asarray(src, dtype=np.int64),
        np.asarray(dst, dtype=np.int64),
        np.asarray(mult, dtype=np.int64),
    )
    g.ingest = IngestStats(
        lines=records,
        edges=g.n_edges,
        self_loops=g.self_loop_count(),
        duplicates_merged=records - g.n_edges,
    )
    return g


def write_edge_list(g: DirectedGraph, target: str | Path | IO[str]) -> None:
    """Serialize in canonical CSR order; reloading reproduces the graph."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            write_edge_list(g, f)
        return
    out: IO[str] = target
    out.write(f"{COMMENT_CHAR} directed edge list: source\ttarget\tmultiplicity\n")
    indptr, indices, data = g.adj.indptr, g.adj.indices, g.adj.data
    for s in range(g.n_nodes):
        row = slice(indptr[s], indptr[s + 1])
        for t, m in zip(indices[row], data[row]):
            out.write(f"{g.names[s]}\t{g.names[int(t)]}\t{int(m)}\n")


# ---- node subsets ----------------------------------------------------------


@dataclass(frozen=True)
class NodeSubset:
    """Named, ordered collection of node indices (category members)."""

    label: str
    members: tuple[int, ...]
    names: tuple[str, ...] = field(repr=False, default=())

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class SubsetReport:
    resolved: int
    duplicates: int
    unresolved: tuple[str, ...]


def load_node_subset(
    source: str | Path | IO[str],
    name_index: Mapping[str, int],
    label: str = "subset",
    strict: bool = True,
) -> tuple[NodeSubset, SubsetReport]:
    """Resolve a one-name-per-line file against a node table.

    Duplicated names keep their first occurrence.  In strict mode any
    unresolved name aborts with its line number; in lenient mode unresolved
    names are collected in the report and skipped.
    """
    stream, owns = _open_text(source)
    members: list[int] = []
    member_names: list[str] = []
    seen: set[str] = set()
    duplicates = 0
    unresolved: list[str] = []
    try:
        for line_no, raw in enumerate(stream, start=1):
            name = raw.rstrip("\n").rstrip("\r").strip()
            if not name or name.startswith(COMMENT_CHAR):
                continue
            if name in seen:
                duplicates += 1
                continue
            seen.add(name)
            idx = name_index.get(name)
            if idx is None:
                if strict:
                    raise ParseError(f"unknown node name {name!r}", line_no)
                unresolved.append(name)
                continue
            members.append(idx)
            member_names.append(name)
    finally:
        if owns:
            stream.close()  # type: ignore[union-attr]

    subset = NodeSubset(label=label, members=tuple(members), names=tuple(member_names))
    report = SubsetReport(
        resolved=len(members), duplicates=duplicates, unresolved=tuple(unresolved)
    )
    return subset, report


def subset_from_names(
    names: Iterable[str], name_index: Mapping[str, int], label: str = "subset"
) -> NodeSubset:
    """Resolve an in-memory name sequence (strict) into a NodeSubset."""
    buf = io.StringIO("".join(f"{n}\n" for n in names))
    subset, _ = load_node_subset(buf, name_index, label=label, strict=True)
    return subset
