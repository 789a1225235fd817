"""Score against the gold set, compare with/without clustering, then tune.

Run: python3 demos/05_evaluation_and_tuning.py
"""

import io
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from metainterp.cli import load_matcher, load_resources, main, read_config
from metainterp.evaluation import evaluate_ablation, format_table, load_gold
from metainterp.toydata import write_world
from metainterp.tuner import Grid, evaluate_tuned, grid_search, split_dev_test

world = write_world(Path(tempfile.mkdtemp()) / "world")
ini = str(world / "metainterp.ini")
with redirect_stdout(io.StringIO()):  # ingest prints a count summary
    main(["ingest", "--config", ini])
cfg = read_config(ini)
res = load_resources(cfg)
matcher = load_matcher(cfg)
gold = load_gold(world / "gold.tsv", lemmatizer=matcher.lemmatizer)
print(f"{len(gold)} metaphors with qualified interpretations\n")

pair = evaluate_ablation(gold, res, cfg.pipeline, matcher, Ks=(1, 3, 5, 10))
print(format_table({"w/o clustering": pair["without_clustering"], "w/ clustering": pair["with_clustering"]},
                   Ks=(1, 3, 5, 10), first_column="Method"))

dev, test = split_dev_test(gold, 0.5, seed=0)
grid = Grid.from_ranges(weight_range=(0.1, 1.1), weight_step=1.0, freq_range=(1, 3), freq_step=2,
                        epsilon_range=(1.0, 2.0), epsilon_step=0.5, mu_range=(1, 3), n_range=(1, 2), n_step=1,
                        metric="R@5")
print(f"grid search over {grid.size} points on {len(dev)} dev metaphors")
result = grid_search(dev, res, grid, cfg.pipeline, matcher, Ks=(1, 3, 5, 10))
print(f"best {result.metric} = {result.best_value:.3f} at {result.best_params}\n")

print("held-out metaphors, one row per optimisation target:")
print(format_table(evaluate_tuned(test, res, result, cfg.pipeline, matcher, Ks=(1, 3, 5, 10)), Ks=(1, 3, 5, 10)))
