"""Interpret a few metaphors with the command-line tool's defaults.

Run: python3 demos/04_interpret_end_to_end.py
"""

import io
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from metainterp.cli import load_resources, main, read_config
from metainterp.pipeline import format_tsv, interpret, preprocess_metaphor
from metainterp.toydata import write_world

world = write_world(Path(tempfile.mkdtemp()) / "world")
ini = str(world / "metainterp.ini")
with redirect_stdout(io.StringIO()):  # ingest prints a count summary
    main(["ingest", "--config", ini])
cfg = read_config(ini)
res = load_resources(cfg)

for topic, vehicle in [("City", "jungle"), ("love", "candy"), ("time", "money"), ("sermon", "sleeping pill")]:
    m = preprocess_metaphor(topic, vehicle)
    it = interpret(m, res, cfg.pipeline)
    print(f"== {m.topic} is a {m.vehicle}")
    if it.diagnostic:
        print(f"   ({it.diagnostic})")
    print(format_tsv(it.results[:5]), end="")

# the same thing from the shell:
print("\n$ metainterp interpret --config", ini, "city jungle --top-n 3")
main(["interpret", "--config", ini, "--top-n", "3", "city", "jungle"])
