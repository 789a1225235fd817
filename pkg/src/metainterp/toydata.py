"""A small synthetic world for demos and integration tests.

Nouns carry a profile of property groups ("fire" is hot, bright and
dangerous). Corpus sentences attach group adjectives to their nouns, word
vectors cluster by group, and the gold set names group heads as the
interpretations of a few metaphors. Everything is seeded.
"""

from __future__ import annotations

import gzip
from pathlib import Path

import numpy as np

GROUPS = {
    "hot": ["hot", "burning", "fiery", "scorching"],
    "cold": ["cold", "icy", "freezing"],
    "fast": ["fast", "quick", "speedy", "rushing"],
    "strong": ["strong", "powerful", "mighty"],
    "dark": ["dark", "black", "gloomy"],
    "bright": ["bright", "red", "shining"],
    "calm": ["calm", "peaceful", "quiet"],
    "wild": ["wild", "crazy", "chaotic"],
    "crowded": ["crowded", "busy", "packed"],
    "valuable": ["valuable", "precious", "rich"],
    "dangerous": ["dangerous", "deadly", "threatening"],
    "sweet": ["sweet", "delicious", "tasty"],
}
GENERIC = ["good", "new", "old", "big", "little", "great"]

PROFILES = {
    "fire": ["hot", "bright", "dangerous"],
    "anger": ["hot", "dangerous", "dark"],
    "jungle": ["wild", "crowded", "dangerous"],
    "city": ["crowded", "busy_only", "bright"],
    "money": ["valuable", "strong"],
    "time": ["fast", "valuable"],
    "river": ["fast", "calm", "cold"],
    "memory": ["calm", "dark"],
    "ice": ["cold", "bright"],
    "storm": ["dark", "wild", "strong"],
    "candy": ["sweet", "bright"],
    "love": ["sweet", "hot", "strong"],
}

METAPHORS = [
    ("anger", "fire", {"hot": 12, "dangerous": 7, "red": 3}),
    ("city", "jungle", {"crowded": 9, "wild": 6, "busy": 2}),
    ("time", "money", {"valuable": 14, "precious": 5}),
    ("memory", "river", {"calm": 6, "fast": 5, "long": 4}),
    ("love", "candy", {"sweet": 11}),
    ("anger", "storm", {"wild": 8, "dark": 5}),
    ("love", "fire", {"hot": 9, "burning": 6}),
    ("river", "ice", {"cold": 7, "quiet": 2}),
]


def _words_for(group: str) -> list:
    if group == "busy_only":
        return ["busy"]
    return GROUPS[group]


def _conll_sentence(adj: str, adj_tag: str, noun: str) -> str:
    rows = [
        ("1", "the", "the", "DET", "DT", "_", "3", "det"),
        ("2", adj, adj, "ADJ" if adj_tag.startswith("JJ") else "VERB", adj_tag, "_", "3", "amod"),
        ("3", noun, noun, "NOUN", "NN", "_", "4", "nsubj"),
        ("4", "remains", "remain", "VERB", "VBZ", "_", "0", "root"),
    ]
    return "\n".join("\t".join(r + ("_", "_")) for r in rows) + "\n\n"


def corpus_text(seed: int = 0, scale: int = 1) -> str:
    rng = np.random.default_rng(seed)
    chunks = []
    for noun, groups in PROFILES.items():
        for g in groups:
            for adj in _words_for(g):
                tag = "VBG" if adj.endswith("ing") else "JJ"
                for _ in range(int(rng.integers(3, 9)) * scale):
                    chunks.append(_conll_sentence(adj, tag, noun))
        for adj in GENERIC:
            for _ in range(int(rng.integers(1, 3)) * scale):
                chunks.append(_conll_sentence(adj, "JJ", noun))
    # group words also modify unrelated nouns now and then
    fillers = ["house", "road", "day", "man", "book"]
    all_adj = [w for ws in GROUPS.values() for w in ws]
    for _ in range(200 * scale):
        adj = all_adj[int(rng.integers(len(all_adj)))]
        tag = "VBG" if adj.endswith("ing") else "JJ"
        chunks.append(_conll_sentence(adj, tag, fillers[int(rng.integers(len(fillers)))]))
    order = rng.permutation(len(chunks))
    return "".join(chunks[i] for i in order)


def vectors(seed: int = 0, dims: int = 8) -> dict:
    rng = np.random.default_rng(seed + 1)
    out = {}
    for group, words in GROUPS.items():
        centre = rng.normal(0.0, 2.0, dims)
        for w in words:
            out[w] = centre + rng.normal(0.0, 0.25, dims)
    for w in GENERIC + list(PROFILES) + ["house", "road", "day", "man", "book", "the", "remains", "long"]:
        out.setdefault(w, rng.normal(0.0, 2.0, dims))
    return out


def write_world(directory, seed: int = 0, scale: int = 1) -> Path:
    """Write corpus, vectors, lexicon, norms, gold, lemma/synonym tables and a config."""
    d = Path(directory)
    (d / "corpus").mkdir(parents=True, exist_ok=True)
    text = corpus_text(seed, scale)
    half = len(text) // 2
    cut = text.rfind("\n\n", 0, half) + 2
    (d / "corpus" / "part-000.conll").write_text(text[:cut], encoding="utf-8")
    with gzip.open(d / "corpus" / "part-001.conll.gz", "wt", encoding="utf-8") as fh:
        fh.write(text[cut:])

    vecs = vectors(seed)
    with open(d / "vectors.txt", "w", encoding="utf-8") as fh:
        for w, v in vecs.items():
            fh.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")

    lexicon = sorted(({w for ws in GROUPS.values() for w in ws} | set(GENERIC)) - {"shining"})
    (d / "lexicon.txt").write_text("\n".join(lexicon) + "\n", encoding="utf-8")

    norms = ["cue,response,strength"]
    norms += ["fire,hot,0.30", "fire,red,0.12", "fire,ice cream,0.01", "jungle,tarzan,0.2", "jungle,wild,0.15",
              "money,rich,0.25", "money,time,0.05", "candy,sweet,0.6", "river,long,0.1", "memory,long,0.08"]
    (d / "norms.csv").write_text("\n".join(norms) + "\n", encoding="utf-8")

    gold = ["topic\tvehicle\tinterpretation\tparticipants"]
    for topic, vehicle, answers in METAPHORS:
        for word, n in answers.items():
            gold.append(f"{topic}\t{vehicle}\t{word}\t{n}")
    (d / "gold.tsv").write_text("\n".join(gold) + "\n", encoding="utf-8")

    (d / "lemmas.txt").write_text("burning burn\nrushing rush\nshining shine\n", encoding="utf-8")
    (d / "synonyms.txt").write_text("".join(" ".join(ws) + "\n" for ws in GROUPS.values()), encoding="utf-8")

    (d / "metainterp.ini").write_text(
        "[paths]\n"
        "corpus = corpus\nindex = index\nembeddings = vectors.txt\nlexicon = lexicon.txt\n"
        "norms = norms.csv\ngold = gold.tsv\nlemmas = lemmas.txt\nsynonyms = synonyms.txt\n"
        "output_dir = out\n\n"
        "[pipeline]\nk = 5\nweights = 0.6, 1.1, 0.1, 0.1, 3\nepsilon = 1.5\nmu = 2\nn_per_cluster = 1\n"
        "top_n = 20\n\n"
        "[grid]\nmetric = R@5\nsem_topic = 0.1, 0.6\nsem_vehicle = 0.6, 1.1\nnpmi_topic = 0.1\n"
        "npmi_vehicle = 0.1\nfreq = 1, 3\nepsilon = 1.0, 1.5\nmu = 2\nn_per_cluster = 1, 2\n"
        "dev_fraction = 0.5\n\n"
        "[run]\nseed = 0\nk_values = 1, 3, 5, 10\n",
        encoding="utf-8",
    )
    return d
