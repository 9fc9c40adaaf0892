from __future__ import annotations

import json
from pathlib import Path

import pytest

from fivew1h.cli import main

DATA_DIR = Path(__file__).resolve().parent / "data"
CORPUS = str(DATA_DIR / "corpus")


def read_tree(out_dir: Path) -> dict[str, str]:
    return {p.name: p.read_text(encoding="utf-8") for p in sorted(out_dir.glob("*.json"))}


def test_extract_writes_one_report_per_article(tmp_path):
    out = tmp_path / "out"
    assert main(["extract", "--corpus", CORPUS, "--out", str(out)]) == 0
    reports = read_tree(out)
    assert len(reports) == 10
    payload = json.loads(reports["a01-verglas.json"])
    assert payload["id"] == "a01-verglas"
    assert set(payload["answers"]) == {"who", "what", "when", "where", "why", "how"}


def test_extract_deterministic_across_runs_and_jobs(tmp_path):
    out1, out2, out4 = tmp_path / "r1", tmp_path / "r2", tmp_path / "j4"
    assert main(["extract", "--corpus", CORPUS, "--out", str(out1), "--jobs", "1"]) == 0
    assert main(["extract", "--corpus", CORPUS, "--out", str(out2), "--jobs", "1"]) == 0
    assert main(["extract", "--corpus", CORPUS, "--out", str(out4), "--jobs", "4"]) == 0
    assert read_tree(out1) == read_tree(out2) == read_tree(out4)


def test_extract_remote_down_reports_endpoint(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "provider": {"kind": "remote", "endpoint": "http://127.0.0.1:9", "timeout_s": 0.2, "retries": 0},
    }), encoding="utf-8")
    code = main(["extract", "--config", str(config), "--corpus", CORPUS, "--out", str(tmp_path / "out")])
    assert code == 1
    err = capsys.readouterr().err
    assert "127.0.0.1:9" in err


def test_extract_bad_config_exits_2(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"provider": {"kind": "remote"}}), encoding="utf-8")
    assert main(["extract", "--config", str(config), "--corpus", CORPUS]) == 2


def test_extract_unreadable_article_is_per_article_failure(tmp_path, capsys):
    import shutil

    broken = tmp_path / "corpus"
    shutil.copytree(Path(CORPUS), broken)
    (broken / "articles" / "a05-feux.json").write_text("{pas du json", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["extract", "--corpus", str(broken), "--out", str(out)]) == 1
    err = capsys.readouterr().err
    assert "a05-feux" in err
    # the other nine articles still produce reports
    assert len(list(out.glob("*.json"))) == 9


def test_extract_bad_weights_exit_2(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"weights": {"who": {"frequency": 0.9}}}), encoding="utf-8")
    assert main(["extract", "--config", str(config), "--corpus", CORPUS]) == 2


def test_evaluate_emits_reports(tmp_path):
    out = tmp_path / "out"
    code = main(["evaluate", "--corpus", CORPUS, "--participants", "system,ann1,ann2",
                 "--out", str(out)])
    assert code == 0
    agreement = json.loads((out / "agreement.json").read_text(encoding="utf-8"))
    assert set(agreement["participants"]) == {"system", "ann1", "ann2"}
    counts = json.loads((out / "answer_counts.json").read_text(encoding="utf-8"))
    assert "system" in counts and "ann1" in counts
    assert (out / "agreement.txt").exists()


def test_evaluate_empty_participants_errors(tmp_path, capsys):
    code = main(["evaluate", "--corpus", CORPUS, "--participants", " ", "--out", str(tmp_path)])
    assert code == 2


def test_sweep_writes_curve_and_suggestion(tmp_path):
    out = tmp_path / "out"
    code = main(["sweep", "--corpus", CORPUS, "--question", "who",
                 "--grid", "0,0.5,0.9", "--out", str(out)])
    assert code == 0
    curve = json.loads((out / "sweep_who.json").read_text(encoding="utf-8"))
    assert [row["tau"] for row in curve["curve"]] == [0.0, 0.5, 0.9]
    suggested = json.loads((out / "sweep_who_suggested.json").read_text(encoding="utf-8"))
    assert "who" in suggested["thresholds"]


def test_sweep_empty_grid_exit_2(tmp_path):
    assert main(["sweep", "--corpus", CORPUS, "--question", "who", "--grid", "",
                 "--out", str(tmp_path)]) == 2


def test_baseline_replays_cache(tmp_path):
    cache = tmp_path / "cache"
    cache.mkdir()
    answers = {q: ["Hydro-Québec a annoncé lundi"] for q in
               ("who", "what", "where", "when", "why", "how")}
    for article in Path(CORPUS, "articles").glob("*.json"):
        article_id = json.loads(article.read_text(encoding="utf-8"))["id"]
        (cache / f"{article_id}.txt").write_text(json.dumps(answers, ensure_ascii=False), encoding="utf-8")
    out = tmp_path / "out"
    code = main(["baseline", "--corpus", CORPUS, "--cache-dir", str(cache), "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "baseline_answers.json").read_text(encoding="utf-8"))
    assert len(payload) == 10
    assert payload["a01-verglas"]["cached"] is True


def test_evaluate_with_baseline_participant(tmp_path):
    cache = tmp_path / "cache"
    cache.mkdir()
    answers = {q: [] for q in ("who", "what", "where", "when", "why", "how")}
    answers["who"] = ["Hydro-Québec"]
    for article in Path(CORPUS, "articles").glob("*.json"):
        article_id = json.loads(article.read_text(encoding="utf-8"))["id"]
        (cache / f"{article_id}.txt").write_text(json.dumps(answers, ensure_ascii=False), encoding="utf-8")
    out = tmp_path / "out"
    code = main(["evaluate", "--corpus", CORPUS, "--participants", "ann1,baseline",
                 "--baseline-cache", str(cache), "--out", str(out)])
    assert code == 0
    agreement = json.loads((out / "agreement.json").read_text(encoding="utf-8"))
    assert "ann1|baseline" in agreement["per_question"]["who"]


def test_explain_prints_breakdown(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["extract", "--corpus", CORPUS, "--out", str(out)]) == 0
    report = out / "a01-verglas.json"
    assert main(["explain", "--report", str(report), "--question", "who", "--rank", "0"]) == 0
    printed = capsys.readouterr().out
    assert "weight=" in printed
    assert "total" in printed


def test_validate_corpus_ok(capsys):
    assert main(["validate-corpus", "--corpus", CORPUS]) == 0
    assert "10 article(s)" in capsys.readouterr().out


def test_validate_corpus_broken(tmp_path, capsys):
    (tmp_path / "articles").mkdir()
    (tmp_path / "manifest.json").write_text(json.dumps({"articles": ["x"]}), encoding="utf-8")
    assert main(["validate-corpus", "--corpus", str(tmp_path)]) == 1
    assert "missing" in capsys.readouterr().err
