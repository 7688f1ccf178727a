import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choicetree.observables import recount_max_stats
from choicetree.tree_model import (
    ModelConfig,
    TreeState,
    export_edge_list,
    grow_step,
    init_tree,
    make_rng,
    run_growth,
    sample_candidate,
    sample_max_degree,
    select_attachment,
)


def tree_with_degrees(seq):
    """Tree built by attaching vertex v+1 to seq-derived parents; used for (2,1,1)."""
    state = init_tree()
    for parent in seq:
        from choicetree.tree_model import _attach

        _attach(state, parent)
    return state


configs = st.builds(
    ModelConfig,
    d=st.integers(1, 5),
    choice_rule=st.sampled_from(["max", "min", "none"]),
    attachment=st.sampled_from(["preferential", "uniform"]),
    seed=st.integers(0, 2**64 - 1),
)


def test_init_tree():
    state = init_tree()
    assert state.m == 1
    assert state.degrees.tolist() == [1, 1]
    assert state.endpoint_list.tolist() == [1, 2]
    assert state.degree_histogram == {1: 2}
    assert state.degrees.sum() == 2 * state.m


@pytest.mark.parametrize(
    "kwargs",
    [{"d": 0}, {"choice_rule": "median"}, {"attachment": "linear"}, {"tie_break": "coin"}, {"seed": -1}, {"seed": 2**64}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ModelConfig(**kwargs)


def test_config_is_immutable():
    cfg = ModelConfig()
    with pytest.raises(AttributeError):
        cfg.d = 3


def test_sample_candidate_frequencies():
    rng = make_rng(0)
    p1 = init_tree()
    draws = [sample_candidate(p1, ModelConfig(), rng) for _ in range(20000)]
    assert abs(np.mean(np.array(draws) == 1) - 0.5) < 0.015

    state = tree_with_degrees([1])  # degrees (2, 1, 1)
    assert state.degrees.tolist() == [2, 1, 1]
    pref = np.array([sample_candidate(state, ModelConfig(), rng) for _ in range(40000)])
    assert abs(np.mean(pref == 1) - 2 / 4) < 0.01
    unif = np.array([sample_candidate(state, ModelConfig(attachment="uniform"), rng) for _ in range(40000)])
    for v in (1, 2, 3):
        assert abs(np.mean(unif == v) - 1 / 3) < 0.01


def test_select_attachment_rules():
    state = tree_with_degrees([1, 1])  # degrees (3, 1, 1, 1)
    rng = make_rng(1)
    assert select_attachment((1, 2), state, ModelConfig(choice_rule="max"), rng) == 1
    assert select_attachment((1, 2), state, ModelConfig(choice_rule="min"), rng) == 2
    assert select_attachment((2, 1), state, ModelConfig(choice_rule="none"), rng) == 2


def test_tie_break_is_fair_over_distinct_vertices():
    state = tree_with_degrees([1, 2])  # degrees (2, 2, 1, 1)
    rng = make_rng(2)
    cfg = ModelConfig(choice_rule="max")
    picks = np.array([select_attachment((1, 2), state, cfg, rng) for _ in range(20000)])
    assert abs(np.mean(picks == 1) - 0.5) < 0.015
    # a vertex drawn twice still counts once among the tied
    cfg3 = ModelConfig(d=3)
    picks = np.array([select_attachment((1, 1, 2), state, cfg3, rng) for _ in range(20000)])
    assert abs(np.mean(picks == 1) - 0.5) < 0.015


def test_select_attachment_consumes_one_double():
    state = init_tree()
    a, b = make_rng(9), make_rng(9)
    select_attachment((1, 2), state, ModelConfig(choice_rule="none"), a)
    b.random()
    assert a.random() == b.random()


def test_first_step_gives_path_on_three_vertices():
    state = init_tree()
    out = grow_step(state, ModelConfig(), make_rng(3))
    assert sorted(state.degrees.tolist()) == [1, 1, 2]
    assert out.chosen in out.candidates
    assert out.new_vertex == 3
    assert (out.max_before, out.max_after) == (1, 2)


def test_max_choice_picks_hub_three_quarters():
    hits = 0
    trials = 20000
    rng = make_rng(4)
    cfg = ModelConfig(d=2)
    for _ in range(trials):
        state = tree_with_degrees([1])
        hits += grow_step(state, cfg, rng).chosen == 1
    # 1 - (1 - 2/4)^2
    assert abs(hits / trials - 0.75) < 0.012


@given(configs, st.integers(1, 120))
@settings(max_examples=60, deadline=None)
def test_step_invariants(cfg, n):
    state = init_tree()
    rng = make_rng(cfg.seed)
    for _ in range(n - 1):
        sum_before = int(state.degrees.sum())
        len_before = state.endpoint_list.shape[0]
        out = grow_step(state, cfg, rng)
        assert out.chosen in out.candidates
        assert len(out.candidates) == cfg.d
        assert out.max_after - out.max_before in (0, 1)
        assert (out.max_after - out.max_before == 1) == (out.chosen_degree == out.max_before)
        assert state.endpoint_list.shape[0] == len_before + 2
        assert int(state.degrees.sum()) == sum_before + 2
    state.check_invariants()
    assert state.n_vertices == n + 1


@given(configs, st.integers(1, 400))
@settings(max_examples=60, deadline=None)
def test_compiled_and_python_paths_agree(cfg, n):
    points = sorted({1, max(1, n // 3), n})
    fast = run_growth(cfg, n, points, keep_state=True)
    slow = run_growth(cfg, n, points, observers=[lambda *a: None], keep_state=True)
    assert fast.snapshots == slow.snapshots
    assert fast.final == slow.final
    assert np.array_equal(fast.state.endpoint_list, slow.state.endpoint_list)
    fast.state.check_invariants()
    assert recount_max_stats(fast.state) == (fast.final.max_degree, fast.final.max_count, fast.final.leader)


def test_run_growth_counts_and_determinism():
    cfg = ModelConfig(d=3, seed=11)
    a = run_growth(cfg, 5000, [10, 100, 1000, 5000], keep_state=True)
    b = run_growth(cfg, 5000, [10, 100, 1000, 5000], keep_state=True)
    assert a.snapshots == b.snapshots
    assert a.state.m == 5000 and a.state.n_vertices == 5001
    assert [s.n for s in a.snapshots] == [10, 100, 1000, 5000]
    assert export_edge_list(a.state) == export_edge_list(b.state)


def test_two_edges_max_choice():
    for seed in range(20):
        rec = run_growth(ModelConfig(d=2, seed=seed), 2, [2])
        assert (rec.final.max_degree, rec.final.max_count) == (2, 1)


def test_run_growth_rejects_bad_checkpoints():
    with pytest.raises(ValueError):
        run_growth(ModelConfig(), 10, [5, 3])
    with pytest.raises(ValueError):
        run_growth(ModelConfig(), 10, [11])
    with pytest.raises(ValueError):
        run_growth(ModelConfig(), 0)


def test_chunked_stream_matches_single_block():
    # the stream must not depend on how draws are split into blocks
    rng_a, rng_b = make_rng(5), make_rng(5)
    block = rng_a.random((7, 3))
    rows = np.array([[rng_b.random() for _ in range(3)] for _ in range(7)])
    assert np.array_equal(block, rows)


def test_export_edge_list():
    assert export_edge_list(init_tree()) == "1\t2\n"
    rec = run_growth(ModelConfig(seed=3), 50, keep_state=True)
    lines = export_edge_list(rec.state).splitlines()
    assert len(lines) == 50
    ids = [int(x) for line in lines for x in line.split("\t")]
    assert min(ids) >= 1 and max(ids) <= 51
    # the second column is the vertex created by that edge
    assert [int(line.split("\t")[1]) for line in lines] == list(range(2, 52))
    with pytest.raises(ValueError):
        export_edge_list(TreeState())


def test_reserve_grows_storage():
    state = init_tree(capacity=1)
    rng = make_rng(0)
    for _ in range(40):
        grow_step(state, ModelConfig(), rng)
    assert state.capacity >= 41
    state.check_invariants()


def test_sample_max_degree_shape_and_determinism():
    cfg = ModelConfig(d=2, seed=1)
    a = sample_max_degree(cfg, 6, 1000)
    assert a.shape == (1000,)
    assert np.array_equal(a, sample_max_degree(cfg, 6, 1000))
    assert a.min() >= 2 and a.max() <= 6
