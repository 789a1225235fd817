"""Count adjective/noun arcs in a small CoNLL corpus and look at NPMI.

Run: python3 demos/01_corpus_statistics.py
"""

import tempfile
from pathlib import Path

from metainterp.corpus import collocations_of, corpus_files, ingest_paths, npmi, rel_freq
from metainterp.toydata import write_world

world = write_world(Path(tempfile.mkdtemp()) / "world")
index = ingest_paths(corpus_files(world / "corpus"))

s = index.stats
print(f"{s.files_read} files, {s.sentences} sentences, {s.tokens} tokens, {s.arcs_kept} kept arcs")

# what do people say about fire?
print("\nmost frequent dependents of 'fire':")
for word, count in collocations_of(index, "fire")[:8]:
    print(f"  {word:12} {count:4}  npmi={npmi(index, word, 'fire'):+.3f}")

# NPMI is undefined for pairs that never occur
print("\nnpmi(sweet, fire) =", npmi(index, "sweet", "fire"))
print(f"relative frequency of 'hot': {rel_freq(index, 'hot'):.4f}")
