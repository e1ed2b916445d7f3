import csv
import io
import json

import numpy as np
import pytest

from gicomplex import samplers
from gicomplex.cli import CSV_HEADER, EXIT_CONTRACT, EXIT_IO, EXIT_OK, EXIT_USAGE, main, parse_grid, UsageError
from gicomplex.core import load_complex, load_points, save_complex, save_points, SimplexTree
from gicomplex.homology import betti
from gicomplex.recon import read_off


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def circle_file(tmp_path):
    f = tmp_path / "circle.txt"
    save_points(f, samplers.circle(200, noise=0.01, seed=0))
    return f


@pytest.fixture
def annulus_file(tmp_path):
    f = tmp_path / "annulus.txt"
    save_points(f, samplers.annulus(400, noise=0.02, seed=0))
    return f


# -- build ------------------------------------------------------------------


def test_build_writes_complex(capsys, tmp_path, circle_file):
    out = tmp_path / "k.txt"
    code, text, _ = run(capsys, "build", "--points", circle_file, "--alpha", 0.2, "--delta", 0.1, "--out", out)
    assert code == EXIT_OK
    K = load_complex(out)
    counts = [int(x) for x in text.split("counts")[1].split()]
    assert K.counts()[:len(counts)] == counts[:K.max_dim + 1]
    assert (tmp_path / "k.txt.nu").exists()
    assert betti(K, 1) == [1, 1]


@pytest.mark.parametrize("delta", ["0", "-1", "abc"])
def test_build_bad_delta(capsys, circle_file, delta):
    code, _, _ = run(capsys, "build", "--points", circle_file, "--alpha", 0.2, "--delta", delta)
    assert code == EXIT_USAGE


def test_build_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "build", "--points", tmp_path / "nope.txt", "--alpha", 0.2, "--delta", 0.1)
    assert code == EXIT_IO and err


def test_build_graph_metric_disconnected(capsys, tmp_path):
    f = tmp_path / "two.txt"
    X = np.vstack([samplers.circle(200, noise=0, seed=1), samplers.circle(200, noise=0, seed=2) + 10])
    save_points(f, X)
    code, text, err = run(capsys, "build", "--points", f, "--alpha", 0.3, "--delta", 0.4, "--metric", "graph")
    assert code == EXIT_OK
    assert "2 components" in err


# -- betti ------------------------------------------------------------------


def test_betti_hollow_triangle(capsys, tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("0 1\n1 2\n0 2\n")
    assert run(capsys, "betti", f)[:2] == (EXIT_OK, "1 1\n")


def test_betti_seven_vertex_torus(capsys, tmp_path):
    tris = [sorted({i, (i + 1) % 7, (i + 3) % 7}) for i in range(7)]
    tris += [sorted({i, (i + 2) % 7, (i + 3) % 7}) for i in range(7)]
    f = tmp_path / "torus.txt"
    save_complex(f, SimplexTree.from_simplices(tris, 2))
    assert run(capsys, "betti", f)[:2] == (EXIT_OK, "1 2 1\n")
    code, text, _ = run(capsys, "betti", f, "--json")
    assert json.loads(text)["betti"] == [1, 2, 1]


def test_betti_empty_file(capsys, tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("")
    assert run(capsys, "betti", f)[0] == EXIT_IO


# -- pair-persist -----------------------------------------------------------


def test_pair_persist_annulus(capsys, annulus_file):
    code, text, _ = run(capsys, "pair-persist", "--points", annulus_file, "--alpha", 0.15,
                        "--delta", 0.05, "--delta2", 0.1)
    assert code == EXIT_OK
    assert text.strip().splitlines()[-1] == "rank 1"


def test_pair_persist_single_point(capsys, tmp_path):
    f = tmp_path / "one.txt"
    f.write_text("0 0\n")
    code, text, _ = run(capsys, "pair-persist", "--points", f, "--alpha", 0.1, "--delta", 0.1, "--delta2", 0.2)
    assert code == EXIT_OK and "rank 0" in text


def test_pair_persist_bad_deltas(capsys, annulus_file):
    code, _, _ = run(capsys, "pair-persist", "--points", annulus_file, "--alpha", 0.15,
                     "--delta", 0.1, "--delta2", 0.05)
    assert code == EXIT_USAGE


def test_pair_persist_small_multiplier(capsys, annulus_file):
    code, _, err = run(capsys, "pair-persist", "--points", annulus_file, "--alpha", 0.15,
                       "--delta", 0.05, "--delta2", 0.1, "--multiplier", 0.2)
    assert code == EXIT_CONTRACT
    assert "multiplier" in err


# -- sweep ------------------------------------------------------------------


def test_parse_grid():
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert parse_grid("0.5,0.25") == [0.5, 0.25]
    for bad in ("0.3:0.1:0.1", "", "0:1:0.5", "0.1:0.2"):
        with pytest.raises((UsageError, ValueError)):
            parse_grid(bad)


def test_sweep_csv(capsys, tmp_path, circle_file):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--points", circle_file, "--alpha", 0.2, "--grid", "0.05:0.5:0.05",
                     "--out", out)
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == list(CSV_HEADER)
    gic = [r for r in rows if r["method"] == "gic"]
    assert len(gic) == 10 and len(rows) == 20
    assert all(r["b1"] == "1" for r in gic)


def test_sweep_counts_match_build(capsys, tmp_path, circle_file):
    code, text, _ = run(capsys, "sweep", "--points", circle_file, "--alpha", 0.2, "--grid", "0.1,0.2")
    rows = [r for r in csv.DictReader(io.StringIO(text)) if r["method"] == "gic"]
    for r in rows:
        out = tmp_path / f"k{r['delta']}.txt"
        run(capsys, "build", "--points", circle_file, "--alpha", 0.2, "--delta", r["delta"], "--max-dim", 2,
            "--out", out)
        K = load_complex(out)
        n = K.counts() + [0]
        assert [int(r[f"n{k}"]) for k in range(4)] == n[:4]
        assert [int(r["b0"]), int(r["b1"])] == betti(K, 1)


def test_sweep_deterministic(capsys, circle_file):
    a = run(capsys, "sweep", "--points", circle_file, "--alpha", 0.2, "--grid", "0.1,0.3")[1]
    b = run(capsys, "sweep", "--points", circle_file, "--alpha", 0.2, "--grid", "0.1,0.3")[1]
    strip = lambda t: [line.rsplit(",", 1)[0] for line in t.splitlines()]
    assert strip(a) == strip(b)


def test_sweep_empty_grid(capsys, circle_file):
    assert run(capsys, "sweep", "--points", circle_file, "--alpha", 0.2, "--grid", "0.5:0.1:0.1")[0] == EXIT_USAGE


# -- reconstruct and sample -------------------------------------------------


def test_reconstruct_planar_input(capsys, circle_file):
    code, _, err = run(capsys, "reconstruct", "--points", circle_file, "--alpha", 0.4, "--delta", 0.15)
    assert code == EXIT_USAGE and "R^3" in err


def test_reconstruct_coarse_sphere(capsys, tmp_path):
    f = tmp_path / "s.txt"
    save_points(f, samplers.sphere(300, seed=0))
    out = tmp_path / "m.off"
    code, text, _ = run(capsys, "reconstruct", "--points", f, "--alpha", 0.8, "--delta", 0.3, "--out", out, "--check")
    assert code == EXIT_OK
    V, F = read_off(out)
    assert V.shape[1] == 3 and F and all(max(t) < len(V) for t in F)
    assert "euler 2" in text and "watertight yes" in text
    assert "improper intersections 0" in text


def test_reconstruct_empty_result_is_reported(capsys, tmp_path):
    f = tmp_path / "s.txt"
    save_points(f, samplers.sphere(300, seed=0))
    out = tmp_path / "m.off"
    code, text, _ = run(capsys, "reconstruct", "--points", f, "--alpha", 0.6, "--delta", 0.3, "--out", out)
    assert code == EXIT_OK
    assert "watertight no" in text and "no closed surface" in text
    V, F = read_off(out)
    assert V.shape == (0, 3) and F == []


@pytest.mark.parametrize("name", ["circle", "annulus", "sphere", "torus", "klein"])
def test_sample(capsys, tmp_path, name):
    out = tmp_path / f"{name}.txt"
    code, _, _ = run(capsys, "sample", name, "--n", 50, "--out", out)
    assert code == EXIT_OK
    P = load_points(out)
    assert len(P) == 50
    assert P.dim == {"circle": 2, "annulus": 2, "sphere": 3, "torus": 3, "klein": 4}[name]


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
