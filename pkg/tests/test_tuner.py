import pytest

import planted
from metainterp.clustering import ClusterParams
from metainterp.evaluation import Lemmatizer, Matcher, QualifiedMetaphor, SynonymTable, evaluate, load_gold
from metainterp.pipeline import PipelineConfig
from metainterp.tuner import Grid, config_for, evaluate_tuned, frange, grid_search, report_metrics, split_dev_test


def test_frange():
    assert frange(0.1, 1.0, 0.5) == [0.1, 0.6]
    assert frange(1, 6, 1) == [1, 2, 3, 4, 5, 6]
    assert frange(0.1, 1.0, 0.1)[-1] == 1.0
    with pytest.raises(ValueError):
        frange(0, 1, 0)


def test_default_grid():
    g = Grid.from_ranges()
    assert g.sem_topic == (0.1, 0.6) and g.freq == (1.0, 4.0, 7.0, 10.0)
    assert g.epsilon == (1.0, 2.0, 3.0, 4.0, 5.0, 6.0) and g.mu == (1, 2, 3, 4, 5)
    assert g.n_per_cluster == (1, 4, 7, 10)
    assert g.size == 2**4 * 4 * 6 * 5 * 4
    with pytest.raises(ValueError):
        Grid(mu=())
    with pytest.raises(ValueError):
        Grid(metric="F1")


def test_points_first_parameter_outermost():
    g = Grid(sem_topic=(1, 2), sem_vehicle=(3,), npmi_topic=(4,), npmi_vehicle=(5,), freq=(6, 7),
             epsilon=(1.0,), mu=(1,), n_per_cluster=(1,))
    assert [(p["sem_topic"], p["freq"]) for p in g.points()] == [(1, 6), (1, 7), (2, 6), (2, 7)]


def test_split_sizes_and_determinism():
    items = list(range(76))
    dev, test = split_dev_test(items, 0.5, seed=3)
    assert len(dev) == len(test) == 38
    assert sorted(dev + test) == items
    assert split_dev_test(items, 0.5, seed=3) == (dev, test)
    assert split_dev_test(items, 0.5, seed=4) != (dev, test)
    dev, test = split_dev_test(list(range(8)), 0.25)
    assert (len(dev), len(test)) == (2, 6)


def test_split_errors():
    with pytest.raises(ValueError):
        split_dev_test([1], 0.5)
    with pytest.raises(ValueError):
        split_dev_test([1, 2, 3], 0.1)
    with pytest.raises(ValueError):
        split_dev_test([1, 2], 1.0)


DEV = [QualifiedMetaphor(planted.METAPHOR, frozenset({"x"}))]


def singleton():
    return Grid(sem_topic=(0.6,), sem_vehicle=(1.1,), npmi_topic=(0.1,), npmi_vehicle=(0.1,), freq=(3.0,),
                epsilon=(4.0,), mu=(5,), n_per_cluster=(1,), metric="MRR")


def test_singleton_grid_equals_plain_evaluation():
    r = planted.resources()
    res = grid_search(DEV, r, singleton(), PipelineConfig(k=5), Ks=(1, 5))
    assert len(res.trace) == 1
    cfg = config_for(res.best_params, PipelineConfig(k=5))
    assert cfg.weights == PipelineConfig().weights and cfg.cluster == ClusterParams()
    assert res.trace[0][2] == report_metrics(evaluate(DEV, r, cfg, Ks=(1, 5)))
    assert res.best_value == 1.0


def test_planted_grid_prefers_semantic_weight():
    # 2x2 grid over the semantic weights, everything else switched off
    r = planted.resources(without_x=True)
    dev = [QualifiedMetaphor(planted.METAPHOR, frozenset({"a"}))]
    grid = Grid(sem_topic=(0.0, 1.0), sem_vehicle=(0.0, 1.0), npmi_topic=(0.0,), npmi_vehicle=(0.0,), freq=(0.0,),
                epsilon=(0.1,), mu=(1,), n_per_cluster=(1,), metric="MRR")
    res = grid_search(dev, r, grid, PipelineConfig(k=5), Ks=(1,))
    assert len(res.trace) == 4
    by_point = {(p["sem_topic"], p["sem_vehicle"]): m["MRR"] for _, p, m in res.trace}
    assert res.best_value == max(by_point.values())
    # the all-zero point ties everything, ranks alphabetically and puts "a" first
    assert by_point[(0.0, 0.0)] == 1.0
    assert res.best_by_metric["MRR"]["index"] == 0


def world_dev(world):
    lem = Lemmatizer.from_file(world / "lemmas.txt")
    matcher = Matcher(lem, SynonymTable.from_file(world / "synonyms.txt"))
    return load_gold(world / "gold.tsv", lemmatizer=lem), matcher


SMALL = dict(sem_topic=(0.1, 0.6, 1.1), sem_vehicle=(0.6, 1.1, 1.6), npmi_topic=(0.1,), npmi_vehicle=(0.1,),
             freq=(1.0, 3.0), epsilon=(1.5,), mu=(2,), n_per_cluster=(1,))


def test_fast_path_matches_slow_path(world, world_resources):
    qs, matcher = world_dev(world)
    base = PipelineConfig(k=5, top_n_output=20)
    grid = Grid(**{**SMALL, "epsilon": (0.5, 1.5), "mu": (1, 3), "n_per_cluster": (1, 2)}, metric="R@5")
    res = grid_search(qs, world_resources, grid, base, matcher, Ks=(1, 5))
    assert len(res.trace) == grid.size
    for _, params, metrics in res.trace:
        slow = report_metrics(evaluate(qs, world_resources, config_for(params, base), matcher, Ks=(1, 5)))
        assert metrics == slow


def test_exhaustive_and_argmax(world, world_resources):
    qs, matcher = world_dev(world)
    grid = Grid(**SMALL, metric="MRR")
    res = grid_search(qs, world_resources, grid, PipelineConfig(k=5, top_n_output=20), matcher, Ks=(5,))
    assert len(res.trace) == 18 and [i for i, _, _ in res.trace] == list(range(18))
    seen = {tuple(p.values()) for _, p, _ in res.trace}
    assert len(seen) == 18
    values = [m["MRR"] for _, _, m in res.trace]
    assert res.best_value == max(values)
    assert res.best_by_metric["MRR"]["index"] == values.index(max(values))


class Killed(Exception):
    pass


def test_resume_after_interruption(world, world_resources, tmp_path):
    qs, matcher = world_dev(world)
    grid = Grid(**SMALL, metric="R@5")
    base = PipelineConfig(k=5, top_n_output=20)
    full = grid_search(qs, world_resources, grid, base, matcher, Ks=(5,))

    trace = tmp_path / "trace.tsv"

    def kill_at_7(i):
        if i == 7:
            raise Killed

    with pytest.raises(Killed):
        grid_search(qs, world_resources, grid, base, matcher, Ks=(5,), trace_path=trace, chunk=4, on_point=kill_at_7)
    assert len(trace.read_text().splitlines()) == 2 + 8

    # a torn last line from an interrupted write is dropped on resume
    with open(trace, "a") as fh:
        fh.write('8\t{"sem_topic": 0.')
    calls = []
    resumed = grid_search(qs, world_resources, grid, base, matcher, Ks=(5,), trace_path=trace, on_point=calls.append)
    assert calls == list(range(8, 18))
    assert resumed.best_params == full.best_params and resumed.trace == full.trace

    # everything is traced now; a third run evaluates nothing
    again = grid_search(qs, world_resources, grid, base, matcher, Ks=(5,), trace_path=trace, on_point=calls.append)
    assert calls == list(range(8, 18)) and again.trace == full.trace


def test_trace_from_other_grid_is_rejected(world, world_resources, tmp_path):
    qs, matcher = world_dev(world)
    trace = tmp_path / "trace.tsv"
    grid_search(qs, world_resources, Grid(**SMALL), PipelineConfig(k=5), matcher, Ks=(5,), trace_path=trace)
    with pytest.raises(ValueError, match="different grid"):
        grid_search(qs, world_resources, Grid(**{**SMALL, "mu": (3,)}), PipelineConfig(k=5), matcher, Ks=(5,), trace_path=trace)


def test_parallel_equals_serial(world, world_resources):
    qs, matcher = world_dev(world)
    grid = Grid(**SMALL, metric="MAP")
    serial = grid_search(qs, world_resources, grid, PipelineConfig(k=5), matcher, Ks=(5,))
    parallel = grid_search(qs, world_resources, grid, PipelineConfig(k=5), matcher, Ks=(5,), workers=2, chunk=5)
    assert serial.trace == parallel.trace and serial.best_params == parallel.best_params


def test_evaluate_tuned_reports_per_metric(world, world_resources):
    qs, matcher = world_dev(world)
    dev, test = split_dev_test(qs, 0.5, seed=0)
    res = grid_search(dev, world_resources, Grid(**SMALL), PipelineConfig(k=5), matcher, Ks=(5, 10))
    reports = evaluate_tuned(test, world_resources, res, PipelineConfig(k=5), matcher, Ks=(5, 10))
    assert set(reports) == {"MRR", "MAP", "@5", "@10", "@50"}
    assert all(0 <= rep.mrr <= 1 for rep in reports.values())
    assert res.to_json()["points"] == 18
