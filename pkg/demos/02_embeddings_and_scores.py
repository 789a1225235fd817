"""The five per-candidate scores and how the weights combine them.

Run: python3 demos/02_embeddings_and_scores.py
"""

import tempfile
from pathlib import Path

from metainterp.candidates import Metaphor
from metainterp.corpus import corpus_files, ingest_paths
from metainterp.embeddings import cosine, load_embeddings
from metainterp.scoring import Weights, final_score, score_vector, significant_collocations
from metainterp.toydata import write_world

world = write_world(Path(tempfile.mkdtemp()) / "world")
index = ingest_paths(corpus_files(world / "corpus"))
store = load_embeddings(world / "vectors.txt")

print(f"{len(store)} vectors of {store.dims} dims")
print(f"cos(hot, burning) = {cosine(store, 'hot', 'burning'):+.3f}")
print(f"cos(hot, icy)     = {cosine(store, 'hot', 'icy'):+.3f}")

m = Metaphor("anger", "fire")
topic_anchors = significant_collocations(index, m.topic, 5)
vehicle_anchors = significant_collocations(index, m.vehicle, 5)
print("\nanchors for anger:", topic_anchors)
print("anchors for fire: ", vehicle_anchors)

w = Weights()
print(f"\n{'word':10} {'semT':>6} {'semV':>6} {'npmiT':>6} {'npmiV':>6} {'freq':>7} {'final':>8}")
for word in ["hot", "dangerous", "red", "sweet", "good"]:
    s = score_vector(word, m, index, store, topic_anchors, vehicle_anchors)
    cells = ["   n/a" if v is None else f"{v:+.3f}" for v in (s.sem_topic, s.sem_vehicle, s.npmi_topic, s.npmi_vehicle)]
    print(f"{word:10} {' '.join(cells)} {s.freq:7.4f} {final_score(s, w):8.3f}")

# scaling every weight by the same factor scales the score, not the order
print(f"\nhot, weights x2: {final_score(score_vector('hot', m, index, store, topic_anchors, vehicle_anchors), w.scaled(2)):.3f}")
