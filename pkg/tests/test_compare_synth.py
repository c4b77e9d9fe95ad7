from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from incdemon.compare import compare_snapshots, f1, similarity
from incdemon.engine import Config, run_batch
from incdemon.graph import Graph, load_edge_list
from incdemon.merge import SnapshotError, read_snapshot, write_snapshot
from incdemon.synth import gen_synthetic, write_synthetic


def test_identical_files(tmp_path):
    p = tmp_path / "a.txt"
    write_snapshot([{1, 2, 3}, {4, 5}], p)
    rep = compare_snapshots(p, p)
    assert rep.best_match_f1 == 1.0
    assert (rep.unmatched_a, rep.unmatched_b) == (0, 0)


def test_single_community_formula(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    write_snapshot([{1, 2, 3}], a)
    write_snapshot([{1, 2, 4}], b)
    assert compare_snapshots(a, b).best_match_f1 == pytest.approx(2 * 2 / 6)


def test_disjoint(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    write_snapshot([{1, 2}], a)
    write_snapshot([{3, 4}], b)
    rep = compare_snapshots(a, b)
    assert rep.best_match_f1 == 0.0
    assert (rep.unmatched_a, rep.unmatched_b) == (1, 1)


def test_mean_over_larger_side():
    rep = similarity([{1, 2, 3}], [{1, 2, 3}, {7, 8}])
    assert rep.best_match_f1 == pytest.approx(0.5)
    assert (rep.unmatched_a, rep.unmatched_b) == (0, 1)


def test_malformed_snapshot(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 2 3\n4 five\n")
    with pytest.raises(SnapshotError) as exc:
        compare_snapshots(p, p)
    assert exc.value.line == 2


def test_report_csv(tmp_path):
    rep = similarity([{1, 2}, {3, 4}], [{1, 2, 5}])
    rep.write_csv(tmp_path / "s.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert rows[0] == "id_a,id_b,f1"
    assert len(rows) == 3


communities = st.sets(st.frozensets(st.integers(0, 40), min_size=1, max_size=8), min_size=1, max_size=12).map(list)


@given(communities, communities)
def test_similarity_properties(a, b):
    assert similarity(a, a).best_match_f1 == pytest.approx(1.0)
    ab = similarity(a, b).best_match_f1
    ba = similarity(b, a).best_match_f1
    assert 0.0 <= ab <= 1.0
    # only equal-length sides can make the matching direction differ
    if len(a) != len(b):
        assert ab == pytest.approx(ba)
    for _, _, score in similarity(a, b).per_community_matches:
        assert 0.0 <= score <= 1.0


def test_planted_truth_file(tmp_path):
    sg = gen_synthetic("planted-cliques", 40, 4, seed=1, stream=5)
    paths = write_synthetic(sg, tmp_path)
    truth = read_snapshot(paths["truth"])
    assert len(truth) == 4
    assert all(len(c) == 10 for c in truth)
    g = load_edge_list(paths["base"])
    assert g.m == len(sg.base)


def test_pa_generator_deterministic(tmp_path):
    a = write_synthetic(gen_synthetic("preferential-attachment", 1000, 3, 7), tmp_path / "a")
    b = write_synthetic(gen_synthetic("preferential-attachment", 1000, 3, 7), tmp_path / "b")
    for key in ("base", "stream"):
        assert a[key].read_bytes() == b[key].read_bytes()
    sg = gen_synthetic("preferential-attachment", 1000, 3, 7)
    assert len(sg.stream) == 100
    assert abs(len(sg.edges) - 3000) <= 10


@pytest.mark.parametrize(
    "kind,n,k",
    [("planted-cliques", 41, 4), ("preferential-attachment", 3, 5), ("bogus", 10, 2), ("gnm", 1, 1)],
)
def test_generator_rejects_bad_parameters(kind, n, k):
    with pytest.raises(ValueError):
        gen_synthetic(kind, n, k, 0, stream=0)


def test_planted_cliques_recovered():
    for seed in range(5):
        sg = gen_synthetic("planted-cliques", 40, 4, seed, stream=0)
        found = run_batch(Graph(sg.edges), Config(epsilon=0.25)).communities()
        recovered = sum(1 for t in sg.truth if max(f1(t, c) for c in found) >= 0.9)
        assert recovered >= 3
