"""End-to-end command-line behaviour: files in, files out, exit codes."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from rankplane import (
    DirectedGraph,
    cheirank,
    load_edge_list,
    pagerank,
    read_density_grid,
    read_overlap_series,
    read_rank_table,
    write_edge_list,
)
from rankplane.cli import main
from rankplane.netstats import read_csv_series


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def cycle_edges(tmp_path):
    path = tmp_path / "cycle.tsv"
    path.write_text("a\tb\nb\ta\n")
    return path


@pytest.fixture
def random_edges(tmp_path):
    rng = np.random.default_rng(50)
    n = 50
    mask = rng.random((n, n)) < 0.12
    src, dst = np.nonzero(mask)
    g = DirectedGraph.from_edges(
        [f"v{i:02d}" for i in range(n)], src, dst, np.ones(len(src), dtype=np.int64)
    )
    path = tmp_path / "random.tsv"
    write_edge_list(g, path)
    return path


def rank_table_for(edges, tmp_path, *extra):
    out = tmp_path / "table.tsv"
    assert run("rank", edges, "-o", out, *extra) == 0
    return out


# ---- rank ---------------------------------------------------------------------


def test_rank_two_node_cycle(cycle_edges, tmp_path, capsys):
    out = tmp_path / "table.tsv"
    assert run("rank", cycle_edges, "-o", out) == 0
    table = read_rank_table(out)
    np.testing.assert_allclose(table.pagerank, [0.5, 0.5], atol=1e-14)
    np.testing.assert_allclose(table.cheirank, [0.5, 0.5], atol=1e-14)
    assert list(table.rank2d) == [1, 2]
    assert "kappa=" in capsys.readouterr().out

    manifest = json.loads((tmp_path / "table.tsv.manifest.json").read_text())
    assert manifest["command"] == "rank"
    assert manifest["config"]["alpha"] == 0.85
    assert manifest["input"]["n_nodes"] == 2
    assert manifest["input"]["dangling_nodes"] == 0
    assert manifest["solves"]["pagerank"]["residual"] <= 1e-10


def test_rank_rerun_is_byte_identical(random_edges, tmp_path):
    out = tmp_path / "table.tsv"
    manifest = tmp_path / "run.json"
    assert run("rank", random_edges, "-o", out, "--manifest", manifest) == 0
    first = out.read_bytes(), manifest.read_bytes()
    assert run("rank", random_edges, "-o", out, "--manifest", manifest) == 0
    assert (out.read_bytes(), manifest.read_bytes()) == first


def test_rank_worker_count_does_not_change_the_table(random_edges, tmp_path):
    a = tmp_path / "a.tsv"
    b = tmp_path / "b.tsv"
    assert run("rank", random_edges, "-o", a, "--workers", 1) == 0
    assert run("rank", random_edges, "-o", b, "--workers", 4) == 0
    assert a.read_bytes() == b.read_bytes()


def test_rank_table_matches_the_library(random_edges, tmp_path):
    out = rank_table_for(random_edges, tmp_path, "--alpha", 0.7, "--alpha-star", 0.9)
    table = read_rank_table(out)
    g = load_edge_list(random_edges)
    p = pagerank(g, alpha=0.7)
    p_star = cheirank(g, alpha_star=0.9)
    # rows come back sorted by rank; the repr round-trip itself is lossless
    order = [table.name_index[name] for name in g.names]
    np.testing.assert_array_equal(table.pagerank[order], p.values)
    np.testing.assert_array_equal(table.cheirank[order], p_star.values)
    assert table.meta["alpha"] == "0.7"
    assert table.meta["alpha_star"] == "0.9"


# ---- exit codes ------------------------------------------------------------------


def test_malformed_edge_list_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("just-one-field\n")
    assert run("rank", bad, "-o", tmp_path / "t.tsv") == 2
    assert "rankplane: parse error" in capsys.readouterr().err


def test_missing_input_exits_2(tmp_path, capsys):
    assert run("rank", tmp_path / "nope.tsv", "-o", tmp_path / "t.tsv") == 2
    assert "rankplane:" in capsys.readouterr().err


def test_non_convergence_exits_3(random_edges, tmp_path, capsys):
    code = run(
        "rank", random_edges, "-o", tmp_path / "t.tsv", "--max-iter", 2, "--tol", 1e-15
    )
    assert code == 3
    assert "convergence" in capsys.readouterr().err


def test_contract_violation_exits_4(random_edges, tmp_path, capsys):
    table = rank_table_for(random_edges, tmp_path)
    code = run(
        "stats", "density", table, "-o", tmp_path / "g.csv", "--null-samples", 100
    )
    assert code == 4  # --null-samples without --seed
    assert "contract violation" in capsys.readouterr().err


def test_unknown_flag_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        run("rank", "x.tsv", "-o", "y.tsv", "--frobnicate")
    assert exc.value.code == 2


def test_bad_fit_range_is_a_usage_error(random_edges, tmp_path):
    table = rank_table_for(random_edges, tmp_path)
    with pytest.raises(SystemExit):
        run("stats", "fitcurve", table, "-o", tmp_path / "f.csv", "--fit-range", "5")


# ---- synth -----------------------------------------------------------------------


def test_synth_is_deterministic(tmp_path, capsys):
    a = tmp_path / "a.tsv"
    b = tmp_path / "b.tsv"
    assert run("synth", 300, "-o", a, "--seed", 9) == 0
    assert run("synth", 300, "-o", b, "--seed", 9) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "300 nodes" in capsys.readouterr().out
    g = load_edge_list(a)
    assert g.n_nodes == 300


def test_synth_seed_changes_the_graph(tmp_path):
    a = tmp_path / "a.tsv"
    b = tmp_path / "b.tsv"
    assert run("synth", 200, "-o", a, "--seed", 1) == 0
    assert run("synth", 200, "-o", b, "--seed", 2) == 0
    assert a.read_bytes() != b.read_bytes()


# ---- stats -----------------------------------------------------------------------


def test_density_grid_output(random_edges, tmp_path):
    table = rank_table_for(random_edges, tmp_path)
    out = tmp_path / "grid.csv"
    assert run("stats", "density", table, "-o", out, "--cells", 30) == 0
    grid = read_density_grid(out)
    assert grid.cells == 30
    assert grid.n_samples == 50
    assert abs(grid.w.sum() - 1.0) < 1e-12


def test_null_model_grid_is_reproducible(random_edges, tmp_path):
    table = rank_table_for(random_edges, tmp_path)
    out = tmp_path / "grid.csv"
    args = ("stats", "density", table, "-o", out, "--cells", 20,
            "--null-samples", 4000, "--seed", 3)
    assert run(*args) == 0
    null_path = tmp_path / "grid.csv.null.csv"
    first = null_path.read_bytes()
    assert run(*args) == 0
    assert null_path.read_bytes() == first
    null_grid = read_density_grid(null_path)
    assert null_grid.n_samples == 4000
    assert abs(null_grid.w.sum() - 1.0) < 1e-12


def test_slice_output(random_edges, tmp_path):
    table = rank_table_for(random_edges, tmp_path)
    out = tmp_path / "slice.csv"
    assert run("stats", "slice", table, "-o", out, "--x0", 1.5, "--cells", 10) == 0
    meta, cols = read_csv_series(out)
    assert float(meta["x0"]) == 1.5
    assert len(cols["eta"]) == len(cols["density"]) > 0
    assert all(0.0 <= float(v) <= 1.0 for v in cols["density"])


def test_correlator_output(random_edges, tmp_path):
    table_path = rank_table_for(random_edges, tmp_path)
    out = tmp_path / "kappa.csv"
    assert run("stats", "correlator", table_path, "-o", out) == 0
    _, cols = read_csv_series(out)
    table = read_rank_table(table_path)
    expected = len(table) * float(np.dot(table.pagerank, table.cheirank)) - 1.0
    assert float(cols["kappa"][0]) == expected
    assert float(cols["alpha"][0]) == 0.85


def test_fitcurve_output(random_edges, tmp_path):
    table = rank_table_for(random_edges, tmp_path)
    out = tmp_path / "fit.csv"
    code = run(
        "stats", "fitcurve", table, "-o", out,
        "--column", "cheirank", "--fit-range", "2:40", "--bins", 10,
    )
    assert code == 0
    meta, cols = read_csv_series(out)
    assert float(meta["exponent"]) > 0
    assert float(meta["fit_min"]) == 2.0 and float(meta["fit_max"]) == 40.0
    assert 3 <= len(cols["x"]) <= 10


# ---- overlap ----------------------------------------------------------------------


def write_list(path, names):
    path.write_text("".join(f"{n}\n" for n in names))
    return path


def test_overlap_curve_command(tmp_path):
    names = [f"n{i}" for i in range(30)]
    a = write_list(tmp_path / "a.txt", names)
    b = write_list(tmp_path / "b.txt", names)
    out = tmp_path / "curve.csv"
    assert run("overlap", "curve", a, b, "-o", out, "--ks-max", 10) == 0
    series = read_overlap_series(out)
    assert series.kind == "cumulative_f"
    assert series.fractions() == [1.0] * 10


def test_overlap_window_command(tmp_path):
    names = [f"n{i}" for i in range(40)]
    a = write_list(tmp_path / "a.txt", names)
    b = write_list(tmp_path / "b.txt", names[20:] + names[:20])
    out = tmp_path / "win.csv"
    assert run("overlap", "window", a, b, "-o", out, "--window", 20) == 0
    series = read_overlap_series(out)
    assert series.window == 20
    assert series.fractions() == [0.0, 0.0]


def test_overlap_subset_window_command(tmp_path, capsys):
    names = [f"n{i}" for i in range(60)]
    ranking = write_list(tmp_path / "ranking.txt", names)
    subset = write_list(tmp_path / "marked.txt", ["n5", "n6", "n45"])
    out = tmp_path / "sub.csv"
    assert run("overlap", "subset-window", ranking, subset, "-o", out, "--window", 20) == 0
    series = read_overlap_series(out)
    assert series.fractions() == [0.1, 0.0, 0.05]
    assert "3 members" in capsys.readouterr().out


def test_overlap_subset_window_is_strict(tmp_path, capsys):
    ranking = write_list(tmp_path / "ranking.txt", [f"n{i}" for i in range(30)])
    subset = write_list(tmp_path / "marked.txt", ["n3", "intruder"])
    code = run("overlap", "subset-window", ranking, subset, "-o", tmp_path / "s.csv")
    assert code == 2
    assert "intruder" in capsys.readouterr().err


# ---- subset -------------------------------------------------------------------------


def test_subset_command_preserves_relative_order(random_edges, tmp_path):
    table_path = rank_table_for(random_edges, tmp_path)
    table = read_rank_table(table_path)
    members = [table.names[i] for i in (0, 7, 13, 21, 34, 42, 48)]
    subset_file = write_list(tmp_path / "members.txt", members)
    out = tmp_path / "sub.tsv"
    assert run("subset", table_path, subset_file, "-o", out, "--label", "probe") == 0
    sub = read_rank_table(out)
    assert sorted(sub.names) == sorted(members)
    assert sorted(sub.pagerank_rank) == list(range(1, 8))
    assert sorted(sub.cheirank_rank) == list(range(1, 8))
    assert sub.meta["subset_label"] == "probe"
    assert sub.meta["subset_size"] == "7"
    # dense re-ranking keeps the parent ordering within the subset
    parent_order = {n: r for n, r in zip(table.names, table.pagerank_rank)}
    by_sub_rank = [n for _, n in sorted(zip(sub.pagerank_rank, sub.names))]
    assert by_sub_rank == sorted(members, key=parent_order.__getitem__)


def test_subset_command_strict_vs_lenient(random_edges, tmp_path, capsys):
    table_path = rank_table_for(random_edges, tmp_path)
    subset_file = write_list(tmp_path / "members.txt", ["v01", "v02", "ghost"])
    assert run("subset", table_path, subset_file, "-o", tmp_path / "s.tsv") == 2
    capsys.readouterr()
    code = run(
        "subset", table_path, subset_file, "-o", tmp_path / "s.tsv", "--lenient"
    )
    assert code == 0
    captured = capsys.readouterr()
    assert "skipped 1 unresolved" in captured.err
    assert len(read_rank_table(tmp_path / "s.tsv")) == 2


# ---- console script ------------------------------------------------------------------


def test_installed_entry_point(tmp_path):
    exe = shutil.which("rankplane")
    assert exe, "console script should be installed"
    out = tmp_path / "edges.tsv"
    result = subprocess.run(
        [exe, "synth", "150", "-o", str(out), "--seed", "4"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "150 nodes" in result.stdout
    usage = subprocess.run([exe], capture_output=True, text=True)
    assert usage.returncode == 2
