"""Rank permutations and the two-dimensional combined rank.

Probabilities become rank indices by stable descending sort (rank 1 is the
largest probability; ties break toward the smaller node index).  The
combined rank orders nodes by their first appearance on the boundary of the
growing square [1..k] x [1..k] in the (pagerank rank, cheirank rank) plane:
a node lands on the boundary at k = max of its two ranks, right-edge
entries (pagerank rank = k) are listed before top-edge entries (cheirank
rank = k), and the corner node of a square counts once, as a right-edge
entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Mapping

import numpy as np

from .errors import ContractViolation, ParseError
from .graph import NodeSubset

_TABLE_COLUMNS = ("name", "pagerank", "pagerank_rank", "cheirank", "cheirank_rank", "rank2d")


@dataclass(frozen=True)
class RankIndex:
    """A rank permutation and its inverse.

    order[r - 1] is the node holding rank r; position[i] is the (1-based)
    rank of node i.
    """

    kind: str
    order: np.ndarray
    position: np.ndarray

    def __len__(self) -> int:
        return len(self.order)


def rank_indices(values: np.ndarray, kind: str = "rank", tie_key: np.ndarray | None = None) -> RankIndex:
    """Stable descending rank of a score vector.

    tie_key overrides the default node-index tie-break (used when re-ranking
    rows whose original index order is encoded in an existing rank column).
    """
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if tie_key is None:
        order = np.argsort(-values, kind="stable")
    else:
        order = np.lexsort((np.asarray(tie_key), -values))
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(1, n + 1)
    return RankIndex(kind=kind, order=order.astype(np.int64), position=position)


def two_d_rank(k_index: RankIndex, k_star_index: RankIndex) -> RankIndex:
    """Combined rank from square expansion over two rank permutations.

    Node i first appears on the square boundary at side length
    max(position, position*): on the right edge if position >= position*
    (the corner case included), on the top edge otherwise.  Entry order is
    (side length, right-before-top), which this implements as one lexsort.
    """
    n = len(k_index)
    if len(k_star_index) != n:
        raise ContractViolation(
            f"rank permutations cover {n} and {len(k_star_index)} nodes"
        )
    k = k_index.position
    k_star = k_star_index.position
    entry_side = np.maximum(k, k_star)
    top_edge = (k_star > k).astype(np.int8)
    order = np.lexsort((top_edge, entry_side)).astype(np.int64)
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(1, n + 1)
    return RankIndex(kind="rank2d", order=order, position=position)


@dataclass
class RankTable:
    """Per-node ranking record: probabilities plus the three rank columns."""

    names: list[str]
    pagerank: np.ndarray
    cheirank: np.ndarray
    pagerank_rank: np.ndarray
    cheirank_rank: np.ndarray
    rank2d: np.ndarray
    meta: dict = field(default_factory=dict)

    _name_index: dict | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.names)

    @property
    def name_index(self) -> Mapping[str, int]:
        if self._name_index is None:
            self._name_index = {name: i for i, name in enumerate(self.names)}
        return self._name_index

    def names_by(self, column: str) -> list[str]:
        """Node names sorted by one of the rank columns, best rank first."""
        ranks = getattr(self, column)
        return [self.names[i] for i in np.argsort(ranks)]


def build_rank_table(
    names: list[str],
    pagerank_values: np.ndarray,
    cheirank_values: np.ndarray,
    meta: dict | None = None,
) -> RankTable:
    """Assemble the full table: both rank permutations plus the combined rank."""
    n = len(names)
    if len(pagerank_values) != n or len(cheirank_values) != n:
        raise ContractViolation("probability vectors do not match the node table")
    k_idx = rank_indices(pagerank_values, kind="pagerank_rank")
    k_star_idx = rank_indices(cheirank_values, kind="cheirank_rank")
    k2_idx = two_d_rank(k_idx, k_star_idx)
    return RankTable(
        names=list(names),
        pagerank=np.asarray(pagerank_values, dtype=np.float64),
        cheirank=np.asarray(cheirank_values, dtype=np.float64),
        pagerank_rank=k_idx.position,
        cheirank_rank=k_star_idx.position,
        rank2d=k2_idx.position,
        meta=dict(meta or {}),
    )


def subset_rank(table: RankTable, subset: NodeSubset) -> RankTable:
    """Re-rank a category densely (1..|subset|) by the global probabilities.

    The combined rank is recomputed on the dense sub-ranks, so it depends
    only on how members order among themselves, not on outsiders.  Ties
    follow the parent table's order (its rank columns encode the original
    tie-break).
    """
    if len(subset) == 0:
        raise ContractViolation("subset is empty")
    rows = np.asarray(subset.members, dtype=np.int64)
    if rows.max() >= len(table):
        raise ContractViolation("subset member outside the table")
    k_idx = rank_indices(
        table.pagerank[rows], kind="pagerank_rank", tie_key=table.pagerank_rank[rows]
    )
    k_star_idx = rank_indices(
        table.cheirank[rows], kind="cheirank_rank", tie_key=table.cheirank_rank[rows]
    )
    k2_idx = two_d_rank(k_idx, k_star_idx)
    meta = dict(table.meta)
    meta.update(subset_label=subset.label, subset_size=len(subset))
    return RankTable(
        names=[table.names[i] for i in rows],
        pagerank=table.pagerank[rows],
        cheirank=table.cheirank[rows],
        pagerank_rank=k_idx.position,
        cheirank_rank=k_star_idx.position,
        rank2d=k2_idx.position,
        meta=meta,
    )


# ---- persistence -----------------------------------------------------------


def write_rank_table(table: RankTable, target: str | Path | IO[str]) -> None:
    """TSV rows sorted by pagerank rank; '#' header lines carry the metadata."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            write_rank_table(table, f)
        return
    out: IO[str] = target
    if table.meta:
        pairs = " ".join(f"{k}={table.meta[k]!r}" for k in sorted(table.meta))
        out.write(f"# {pairs}\n")
    out.write("\t".join(_TABLE_COLUMNS) + "\n")
    for i in np.argsort(table.pagerank_rank):
        out.write(
            f"{table.names[i]}\t{float(table.pagerank[i])!r}\t{int(table.pagerank_rank[i])}"
            f"\t{float(table.cheirank[i])!r}\t{int(table.cheirank_rank[i])}\t{int(table.rank2d[i])}\n"
        )


def read_rank_table(source: str | Path | IO[str]) -> RankTable:
    """Parse a table written by write_rank_table (rows keep file order)."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return read_rank_table(f)
    meta: dict = {}
    names: list[str] = []
    columns: list[list] = [[], [], [], [], []]
    saw_header = False
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, _, val = token.partition("=")
                    meta[key] = val.strip("'\"")
            continue
        fields = line.split("\t")
        if not saw_header:
            if tuple(fields) != _TABLE_COLUMNS:
                raise ParseError(
                    f"expected column header {_TABLE_COLUMNS}, got {fields}", line_no
                )
            saw_header = True
            continue
        if len(fields) != len(_TABLE_COLUMNS):
            raise ParseError(f"expected {len(_TABLE_COLUMNS)} columns", line_no)
        names.append(fields[0])
        for j, parse in enumerate((float, int, float, int, int), start=1):
            columns[j - 1].append(parse(fields[j]))
    if not names:
        raise ParseError("empty rank table file")
    return RankTable(
        names=names,
        pagerank=np.asarray(columns[0], dtype=np.float64),
        pagerank_rank=np.asarray(columns[1], dtype=np.int64),
        cheirank=np.asarray(columns[2], dtype=np.float64),
        cheirank_rank=np.asarray(columns[3], dtype=np.int64),
        rank2d=np.asarray(columns[4], dtype=np.int64),
        meta=meta,
    )
