"""Command line: ``metainterp {ingest,interpret,evaluate,tune}``.

Settings come from an INI file (``--config``); flags override it. Relative
paths in the file are resolved against the file's directory. See
``README.md`` for the full list of keys.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import __version__
from .candidates import load_lexicon, load_norms
from .clustering import ClusterParams
from .corpus import ConllColumns, corpus_files, ingest_paths, load_index, save_index
from .embeddings import load_embeddings
from .evaluation import (
    DEFAULT_KS,
    GoldColumns,
    Lemmatizer,
    Matcher,
    SynonymTable,
    evaluate,
    evaluate_ablation,
    format_rows,
    format_table,
    load_gold,
)
from .pipeline import PipelineConfig, Resources, format_tsv, interpret, preprocess_metaphor
from .scoring import Weights
from .tuner import PARAMS, Grid, TuneResult, config_for, evaluate_tuned, grid_search, split_dev_test

log = logging.getLogger("metainterp")

PATH_KEYS = ("corpus", "index", "embeddings", "lexicon", "norms", "gold", "lemmas", "synonyms", "output_dir", "trace")


class UsageError(Exception):
    """Bad configuration or missing input; exits with status 2."""


@dataclass
class RunConfig:
    paths: dict = field(default_factory=dict)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    grid: Grid = field(default_factory=Grid.from_ranges)
    columns: ConllColumns = field(default_factory=ConllColumns)
    gold_columns: GoldColumns = field(default_factory=GoldColumns)
    norm_columns: tuple = ("cue", "response", "strength")
    min_participants: int = 5
    dev_fraction: float = 0.5
    Ks: tuple = DEFAULT_KS
    seed: int = 0
    threads: int = 1
    log_level: str = "INFO"

    def path(self, key: str, required: bool = True) -> Optional[Path]:
        value = self.paths.get(key)
        if value is None:
            if required:
                raise UsageError(f"missing path setting '{key}' (config [paths] section)")
            return None
        return Path(value)

    def digest(self) -> str:
        blob = json.dumps(
            {
                "paths": self.paths,
                "pipeline": repr(self.pipeline),
                "grid": repr(self.grid),
                "columns": repr(self.columns),
                "gold_columns": repr(self.gold_columns),
                "norm_columns": self.norm_columns,
                "min_participants": self.min_participants,
                "dev_fraction": self.dev_fraction,
                "Ks": self.Ks,
                "seed": self.seed,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def header(self) -> str:
        return f"# metainterp {__version__} config={self.digest()}\n"


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.replace(",", " ").split())


def read_config(path: Optional[str]) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise UsageError(f"cannot read config file {path}")
    base = Path(path).resolve().parent

    if parser.has_section("paths"):
        for key, value in parser.items("paths"):
            if key not in PATH_KEYS:
                raise UsageError(f"unknown [paths] key '{key}'")
            p = Path(value).expanduser()
            cfg.paths[key] = str(p if p.is_absolute() else base / p)

    if parser.has_section("pipeline"):
        sec = parser["pipeline"]
        cluster = ClusterParams(
            epsilon=sec.getfloat("epsilon", 4.0),
            mu=sec.getint("mu", 5),
            n_per_cluster=sec.getint("n_per_cluster", 1),
        )
        cfg.pipeline = PipelineConfig(
            k=sec.getint("k", 10),
            weights=Weights(*_floats(sec["weights"])) if "weights" in sec else Weights(),
            cluster=cluster if sec.getboolean("clustering", True) else None,
            use_associations=sec.getboolean("use_associations", True),
            top_n_output=sec.getint("top_n", 100),
        )

    if parser.has_section("grid"):
        sec = parser["grid"]
        values = {}
        for name in PARAMS:
            if name in sec:
                values[name] = _ints(sec[name]) if name in ("mu", "n_per_cluster") else _floats(sec[name])
        cfg.grid = replace(cfg.grid, metric=sec.get("metric", cfg.grid.metric), **values)
        cfg.dev_fraction = sec.getfloat("dev_fraction", cfg.dev_fraction)

    if parser.has_section("corpus"):
        sec = parser["corpus"]
        id_col = sec.get("id_column", "0")
        cfg.columns = ConllColumns(
            id=None if id_col.strip().lower() in ("", "none") else int(id_col),
            token=sec.getint("token_column", 1),
            lemma=sec.getint("lemma_column", 2),
            pos=sec.getint("pos_column", 4),
            head=sec.getint("head_column", 6),
            deprel=sec.getint("deprel_column", 7),
        )

    if parser.has_section("norms"):
        sec = parser["norms"]
        cfg.norm_columns = (
            sec.get("cue_column", "cue"),
            sec.get("response_column", "response"),
            sec.get("strength_column", "strength"),
        )

    if parser.has_section("gold"):
        sec = parser["gold"]
        cond = sec.get("condition_column", "")
        cfg.gold_columns = GoldColumns(
            topic=sec.getint("topic_column", 0),
            vehicle=sec.getint("vehicle_column", 1),
            interpretation=sec.getint("interpretation_column", 2),
            participants=sec.getint("participants_column", 3),
            condition=int(cond) if cond.strip() else None,
            condition_value=sec.get("condition_value", "metaphor"),
        )
        cfg.min_participants = sec.getint("min_participants", 5)

    if parser.has_section("run"):
        sec = parser["run"]
        cfg.seed = sec.getint("seed", cfg.seed)
        cfg.threads = sec.getint("threads", cfg.threads)
        cfg.log_level = sec.get("log_level", cfg.log_level)
        if "k_values" in sec:
            cfg.Ks = _ints(sec["k_values"])
    return cfg


def apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    pipe = cfg.pipeline
    if args.k is not None:
        pipe = replace(pipe, k=args.k)
    if args.top_n is not None:
        pipe = replace(pipe, top_n_output=args.top_n)
    if args.no_associations:
        pipe = replace(pipe, use_associations=False)
    cfg.pipeline = pipe
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    if args.metric is not None:
        cfg.grid = replace(cfg.grid, metric=args.metric)
    if args.K_values is not None:
        cfg.Ks = _ints(args.K_values)
    if args.log_level is not None:
        cfg.log_level = args.log_level
    for key in PATH_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg.paths[key] = value
    return cfg


# --- resource loading -----------------------------------------------------

def _existing(cfg: RunConfig, key: str, required: bool = True) -> Optional[Path]:
    p = cfg.path(key, required)
    if p is not None and not p.exists():
        raise UsageError(f"{key} not found: {p}")
    return p


def load_resources(cfg: RunConfig) -> Resources:
    index = load_index(_existing(cfg, "index"))
    store = load_embeddings(_existing(cfg, "embeddings"))
    lexicon = load_lexicon(_existing(cfg, "lexicon"))
    norms_path = _existing(cfg, "norms", required=False)
    norms = load_norms(norms_path, *cfg.norm_columns) if norms_path else None
    return Resources(index, store, lexicon, norms)


def load_matcher(cfg: RunConfig) -> Matcher:
    lemmas = _existing(cfg, "lemmas", required=False)
    syns = _existing(cfg, "synonyms", required=False)
    return Matcher(Lemmatizer.from_file(lemmas) if lemmas else Lemmatizer(), SynonymTable.from_file(syns) if syns else None)


def _output_dir(cfg: RunConfig) -> Path:
    out = cfg.path("output_dir", required=False) or Path("metainterp-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, cfg: RunConfig, body: str) -> None:
    path.write_text(cfg.header() + body, encoding="utf-8")


# --- commands ------------------------------------------------------------

def cmd_ingest(cfg: RunConfig) -> int:
    corpus = _existing(cfg, "corpus")
    out = cfg.path("index")
    files = corpus_files(corpus)
    if not files:
        log.warning("no corpus files under %s; writing an empty index", corpus)
    index = ingest_paths(files, cfg.columns, workers=cfg.threads)
    try:
        save_index(index, out)
    except OSError as exc:
        print(f"error: cannot write index to {out}: {exc}", file=sys.stderr)
        return 1
    s = index.stats
    print(
        f"files_read\t{s.files_read}\nfiles_skipped\t{s.files_skipped}\nsentences\t{s.sentences}\n"
        f"tokens\t{s.tokens}\narcs_kept\t{s.arcs_kept}\nrows_skipped\t{s.rows_skipped}\n"
        f"distinct_pairs\t{len(index.pair_count)}"
    )
    if s.files_skipped:
        log.warning("%d corpus file(s) could not be read and were skipped", s.files_skipped)
    return 0


def cmd_interpret(cfg: RunConfig, topic: str, vehicle: str) -> int:
    resources = load_resources(cfg)
    try:
        metaphor = preprocess_metaphor(topic, vehicle)
    except ValueError as exc:
        raise UsageError(str(exc))
    result = interpret(metaphor, resources, cfg.pipeline)
    if result.diagnostic:
        print(f"{metaphor}: {result.diagnostic}", file=sys.stderr)
    sys.stdout.write(format_tsv(result.results))
    return 0


def _gold(cfg: RunConfig, matcher: Matcher) -> list:
    qualified = load_gold(_existing(cfg, "gold"), cfg.min_participants, matcher.lemmatizer, cfg.gold_columns)
    if not qualified:
        raise UsageError("gold file has no qualified metaphors")
    return qualified


def _select_split(cfg: RunConfig, qualified: list, split: str) -> list:
    if split == "all":
        return qualified
    dev, test = split_dev_test(qualified, cfg.dev_fraction, cfg.seed)
    return dev if split == "dev" else test


def cmd_evaluate(cfg: RunConfig, ablate: bool = False, split: str = "all", from_tune: Optional[str] = None) -> int:
    resources = load_resources(cfg)
    matcher = load_matcher(cfg)
    qualified = _select_split(cfg, _gold(cfg, matcher), split)
    out = _output_dir(cfg)

    if from_tune:
        saved = json.loads(Path(from_tune).read_text(encoding="utf-8"))
        result = TuneResult(saved["metric"], saved["best_params"], saved["best_value"], saved["best_by_metric"])
        reports = evaluate_tuned(qualified, resources, result, cfg.pipeline, matcher, cfg.Ks)
        first = "Optimization"
    elif ablate:
        pair = evaluate_ablation(qualified, resources, cfg.pipeline, matcher, cfg.Ks)
        reports = {"w/o clustering": pair["without_clustering"], "w/ clustering": pair["with_clustering"]}
        first = "Method"
    else:
        reports = {"system": evaluate(qualified, resources, cfg.pipeline, matcher, cfg.Ks)}
        first = "Run"

    table = format_table(reports, cfg.Ks, first)
    _write(out / "report.txt", cfg, table)
    _write(out / "report.tsv", cfg, format_rows(reports))
    lines = ["run\tmetaphor\tgold\trr\tap"]
    for name, rep in reports.items():
        for p in rep.per_metaphor:
            lines.append(f"{name}\t{p['metaphor']}\t{','.join(p['gold'])}\t{p['rr']:.6f}\t{p['ap']:.6f}")
    _write(out / "per_metaphor.tsv", cfg, "\n".join(lines) + "\n")
    sys.stdout.write(table)
    return 0


def cmd_tune(cfg: RunConfig) -> int:
    resources = load_resources(cfg)
    matcher = load_matcher(cfg)
    dev, test = split_dev_test(_gold(cfg, matcher), cfg.dev_fraction, cfg.seed)
    out = _output_dir(cfg)
    trace = cfg.path("trace", required=False) or out / "tune_trace.tsv"
    log.info("grid search: %d points over %d dev metaphors (%d held out)", cfg.grid.size, len(dev), len(test))
    result = grid_search(
        dev, resources, cfg.grid, cfg.pipeline, matcher, cfg.Ks, trace_path=trace, workers=cfg.threads
    )
    # json files can't carry a comment line; the header is stored as a key instead
    payload = dict(result.to_json(), header=cfg.header().strip())
    (out / "tune_best.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    labels = list(result.best_by_metric)
    rows = ["param\t" + "\t".join(labels)]
    for name in PARAMS:
        rows.append(name + "\t" + "\t".join(str(result.best_by_metric[m]["params"][name]) for m in labels))
    rows.append("value\t" + "\t".join(f"{result.best_by_metric[m]['value']:.6f}" for m in labels))
    _write(out / "tune_params.tsv", cfg, "\n".join(rows) + "\n")
    print(f"best {result.metric} = {result.best_value:.6f} at {json.dumps(result.best_params)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--threads", type=int, help="worker processes for ingest/tune")
    common.add_argument("--seed", type=int, help="seed for the dev/test split")
    common.add_argument("--k", type=int, help="significant collocations per noun")
    common.add_argument("--top-n", dest="top_n", type=int, help="interpretations to emit")
    common.add_argument("--no-associations", action="store_true", help="collocation candidates only")
    common.add_argument("--metric", help="tuning metric: MRR, MAP or R@K")
    common.add_argument("--K-values", dest="K_values", help="comma-separated recall cut-offs")
    common.add_argument("--log-level", dest="log_level")
    for key in PATH_KEYS:
        common.add_argument(f"--{key.replace('_', '-')}", dest=key, help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="metainterp", description="Nominal metaphor interpretation.")
    parser.add_argument("--version", action="version", version=f"metainterp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="build an index snapshot from a CoNLL corpus")
    p = sub.add_parser("interpret", parents=[common], help="rank interpretations of TOPIC is VEHICLE")
    p.add_argument("topic")
    p.add_argument("vehicle")
    p = sub.add_parser("evaluate", parents=[common], help="score the system against the gold set")
    p.add_argument("--ablate-clustering", action="store_true", help="report with and without clustering")
    p.add_argument("--split", choices=("all", "dev", "test"), default="all")
    p.add_argument("--from-tune", help="tune_best.json: one report per optimisation metric")
    sub.add_parser("tune", parents=[common], help="grid-search weights and clustering parameters")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = apply_flags(read_config(args.config), args)
        logging.basicConfig(level=cfg.log_level.upper(), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "interpret":
            return cmd_interpret(cfg, args.topic, args.vehicle)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.ablate_clustering, args.split, args.from_tune)
        return cmd_tune(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
