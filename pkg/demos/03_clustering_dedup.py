"""Near-synonyms crowd the top of a ranking; DBSCAN dedup thins them out.

Run: python3 demos/03_clustering_dedup.py
"""

import io
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from metainterp.candidates import Metaphor
from metainterp.cli import load_resources, main, read_config
from metainterp.clustering import ClusterParams, dbscan
from metainterp.pipeline import PipelineConfig, Resources, interpret
from metainterp.toydata import write_world

world = write_world(Path(tempfile.mkdtemp()) / "world")
with redirect_stdout(io.StringIO()):  # ingest prints a count summary
    main(["ingest", "--config", str(world / "metainterp.ini")])
res: Resources = load_resources(read_config(str(world / "metainterp.ini")))

m = Metaphor("anger", "fire")
plain = interpret(m, res, PipelineConfig(k=5, cluster=None, top_n_output=10))
print("without clustering:", ", ".join(plain.words))

params = ClusterParams(epsilon=1.5, mu=2, n_per_cluster=1)
labels = dbscan([(w, res.store.get(w)) for w in plain.words], params).labels
groups = {}
for w in plain.words:
    groups.setdefault(labels[w], []).append(w)
for cid, members in sorted(groups.items()):
    print(f"  cluster {cid:>2}: {members}" if cid >= 0 else f"  noise     : {members}")

deduped = interpret(m, res, PipelineConfig(k=5, cluster=params, top_n_output=10))
print("with clustering:   ", ", ".join(deduped.words))
