import gzip
import json
import os
import subprocess
import sys

import pytest

from metainterp.cli import main
from metainterp.corpus import load_index


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def cfg(world):
    return ["--config", world / "metainterp.ini"]


def test_ingest_summary_and_snapshot(world, tmp_path, capsys):
    code, out, _ = run(capsys, "ingest", *cfg(world), "--index", tmp_path / "idx")
    assert code == 0
    summary = dict(line.split("\t") for line in out.splitlines())
    assert summary["files_read"] == "2" and summary["files_skipped"] == "0"
    idx = load_index(tmp_path / "idx")
    assert idx.pair_total == int(summary["arcs_kept"])
    assert len(idx.pair_count) == int(summary["distinct_pairs"])
    assert idx == load_index(world / "index")


def test_ingest_threads_match_serial(world, tmp_path, capsys):
    run(capsys, "ingest", *cfg(world), "--index", tmp_path / "a")
    run(capsys, "ingest", *cfg(world), "--index", tmp_path / "b", "--threads", 2)
    assert load_index(tmp_path / "a") == load_index(tmp_path / "b")


def test_ingest_empty_corpus(world, tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    code, out, _ = run(capsys, "ingest", *cfg(world), "--corpus", tmp_path / "empty", "--index", tmp_path / "idx")
    assert code == 0 and "arcs_kept\t0" in out
    assert load_index(tmp_path / "idx").pair_total == 0


def test_ingest_skips_corrupt_gzip(world, tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "ok.conll").write_text((world / "corpus" / "part-000.conll").read_text())
    (corpus / "bad.conll.gz").write_bytes(gzip.compress(b"1\tx\tx\t_\tJJ\t_\t2\tamod\n")[:15])
    code, out, _ = run(capsys, "ingest", *cfg(world), "--corpus", corpus, "--index", tmp_path / "idx")
    assert code == 0 and "files_skipped\t1" in out


def test_ingest_unwritable_output(world, tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "ingest", *cfg(world), "--index", blocker / "idx")
    assert code != 0 and "error" in err


def test_interpret_prints_ranked_tsv(world, capsys):
    code, out, err = run(capsys, "interpret", *cfg(world), "city", "jungle")
    assert code == 0 and err == ""
    rows = [line.split("\t") for line in out.splitlines()]
    assert [r[0] for r in rows] == [str(i) for i in range(1, len(rows) + 1)]
    assert len(rows) <= 20
    assert [float(r[2]) for r in rows] == sorted((float(r[2]) for r in rows), reverse=True)


def test_interpret_top_n_and_associations(world, capsys):
    _, out, _ = run(capsys, "interpret", *cfg(world), "--top-n", 3, "anger", "fire")
    assert len(out.splitlines()) == 3
    # "long" is not in the lexicon, only the association norms reach it
    _, with_assoc, _ = run(capsys, "interpret", *cfg(world), "--top-n", 100, "memory", "river")
    _, without, _ = run(capsys, "interpret", *cfg(world), "--top-n", 100, "--no-associations", "memory", "river")
    assert "\tlong\t" in with_assoc and "\tlong\t" not in without


def test_interpret_unknown_words(world, capsys):
    code, out, err = run(capsys, "interpret", *cfg(world), "xylophone", "qwerty")
    assert code == 0 and out == ""
    assert "no candidates" in err


def test_interpret_deterministic_across_processes(world):
    def once(hashseed):
        env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
        cmd = [sys.executable, "-m", "metainterp.cli", "interpret", "--config", str(world / "metainterp.ini"), "love", "fire"]
        return subprocess.run(cmd, env=env, capture_output=True, check=True).stdout

    first = once(1)
    assert first and first == once(2)


def test_missing_resource_exits_nonzero(world, tmp_path, capsys):
    code, _, err = run(capsys, "interpret", *cfg(world), "--embeddings", tmp_path / "nope.txt", "city", "jungle")
    assert code != 0 and "nope.txt" in err
    code, _, _ = run(capsys, "interpret", "--config", tmp_path / "missing.ini", "city", "jungle")
    assert code == 2


def test_evaluate_writes_reports(world, tmp_path, capsys):
    code, out, _ = run(capsys, "evaluate", *cfg(world), "--output-dir", tmp_path, "--K-values", "1,5")
    assert code == 0
    assert out.splitlines()[0] == "Run\tMRR\tMAP\t@1\t@5"
    for name in ("report.txt", "report.tsv", "per_metaphor.tsv"):
        assert (tmp_path / name).read_text().startswith("# metainterp 0.1.0 config=")
    assert len((tmp_path / "per_metaphor.tsv").read_text().splitlines()) == 2 + 8


def test_evaluate_ablation(world, tmp_path, capsys):
    code, out, _ = run(capsys, "evaluate", *cfg(world), "--output-dir", tmp_path, "--ablate-clustering")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("Method\tMRR\tMAP")
    assert [line.split("\t")[0] for line in lines[1:]] == ["w/o clustering", "w/ clustering"]


def test_tune_then_evaluate(world, tmp_path, capsys):
    code, out, _ = run(capsys, "tune", *cfg(world), "--output-dir", tmp_path)
    assert code == 0 and out.startswith("best @5 = ")
    best = json.loads((tmp_path / "tune_best.json").read_text())
    assert best["points"] == 32 and best["metric"] == "@5"
    assert best["header"].startswith("# metainterp 0.1.0")
    params = (tmp_path / "tune_params.tsv").read_text().splitlines()
    assert params[1].startswith("param\tMRR\tMAP\t@1\t@3\t@5\t@10")
    assert len((tmp_path / "tune_trace.tsv").read_text().splitlines()) == 2 + 32

    code, out, _ = run(capsys, "evaluate", *cfg(world), "--output-dir", tmp_path, "--split", "test",
                       "--from-tune", tmp_path / "tune_best.json")
    assert code == 0
    assert [line.split("\t")[0] for line in out.splitlines()[1:]] == ["MRR", "MAP", "@1", "@3", "@5", "@10"]


def test_tune_singleton_grid(world, tmp_path, capsys):
    ini = (world / "metainterp.ini").read_text()
    ini = ini.replace("sem_topic = 0.1, 0.6", "sem_topic = 0.6").replace("sem_vehicle = 0.6, 1.1", "sem_vehicle = 1.1")
    ini = ini.replace("freq = 1, 3", "freq = 3").replace("epsilon = 1.0, 1.5", "epsilon = 1.5").replace("n_per_cluster = 1, 2", "n_per_cluster = 1")
    p = world / "singleton.ini"
    p.write_text(ini)
    code, _, _ = run(capsys, "tune", "--config", p, "--output-dir", tmp_path, "--metric", "MRR")
    assert code == 0
    best = json.loads((tmp_path / "tune_best.json").read_text())
    assert best["points"] == 1 and best["metric"] == "MRR"
    assert best["best_params"]["sem_vehicle"] == 1.1


def test_bad_flags(world, capsys):
    assert run(capsys, "interpret", *cfg(world), "--k", 0, "city", "jungle")[0] != 0
    assert run(capsys, "tune", *cfg(world), "--metric", "F1")[0] != 0
    with pytest.raises(SystemExit):
        main(["frobnicate"])
