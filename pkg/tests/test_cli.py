import json

import pytest

from vcrank import cli
from vcrank.corpus import load_corpus, load_embeddings


def run(*args):
    return cli.run([str(a) for a in args])


@pytest.fixture()
def pipeline_dir(tmp_path, corpus_path, candidates_path, embeddings_path):
    return {
        "tmp": tmp_path,
        "corpus": corpus_path,
        "candidates": candidates_path,
        "embeddings": embeddings_path,
    }


class TestHelp:
    @pytest.mark.parametrize(
        "sub",
        ["build-dataset", "stats", "train", "rerank", "eval", "bias", "search", "embed-toy"],
    )
    def test_subcommand_help_exits_zero(self, sub, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.run([sub, "--help"])
        assert exc.value.code == 0

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.run(["frobnicate"])
        assert exc.value.code == 2  # argparse usage error


class TestBuildDataset:
    def test_writes_relatedness_and_counts(self, pipeline_dir, capsys):
        out = pipeline_dir["tmp"] / "d.jsonl"
        rc = run(
            "build-dataset",
            "--corpus", pipeline_dir["corpus"],
            "--embeddings", pipeline_dir["embeddings"],
            "--out", out,
            "--thresholds", "0.2,0.3,0.4",
        )
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 18  # 6 captions x 3 thresholds
        printed = capsys.readouterr().out
        assert "threshold 0.2" in printed

    def test_idempotent_byte_identical(self, pipeline_dir):
        a = pipeline_dir["tmp"] / "a.jsonl"
        b = pipeline_dir["tmp"] / "b.jsonl"
        for out in (a, b):
            assert run(
                "build-dataset",
                "--corpus", pipeline_dir["corpus"],
                "--embeddings", pipeline_dir["embeddings"],
                "--out", out,
            ) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_overlap_and_stats_outputs(self, pipeline_dir):
        out = pipeline_dir["tmp"] / "d.jsonl"
        overlap = pipeline_dir["tmp"] / "o.jsonl"
        stats = pipeline_dir["tmp"] / "s.jsonl"
        rc = run(
            "build-dataset",
            "--corpus", pipeline_dir["corpus"],
            "--embeddings", pipeline_dir["embeddings"],
            "--out", out,
            "--overlap-out", overlap,
            "--stats-out", stats,
        )
        assert rc == 0
        overlap_rows = [json.loads(l) for l in overlap.read_text().splitlines()]
        assert all(row["label"] == 1 for row in overlap_rows)
        stats_rows = [json.loads(l) for l in stats.read_text().splitlines()]
        assert {"label", "count"} <= set(stats_rows[0])

    def test_missing_file_is_io_error(self, pipeline_dir, capsys):
        rc = run(
            "build-dataset",
            "--corpus", pipeline_dir["tmp"] / "nope.jsonl",
            "--embeddings", pipeline_dir["embeddings"],
            "--out", pipeline_dir["tmp"] / "d.jsonl",
        )
        assert rc == 2

    def test_bad_schema_is_validation_error(self, pipeline_dir, capsys):
        bad = pipeline_dir["tmp"] / "bad.jsonl"
        bad.write_text('{"image_id": "x", "captions": ["a"], "contexts": [{"label": "d", "confidence": 7}]}\n')
        rc = run(
            "build-dataset",
            "--corpus", bad,
            "--embeddings", pipeline_dir["embeddings"],
            "--out", pipeline_dir["tmp"] / "d.jsonl",
        )
        assert rc == 1
        assert "line 1" in capsys.readouterr().err


class TestRerankEval:
    def _rerank(self, d, out, **extra):
        args = [
            "rerank",
            "--candidates", d["candidates"],
            "--corpus", d["corpus"],
            "--embeddings", d["embeddings"],
            "--scorer", "simprob",
            "--out", out,
        ]
        for k, v in extra.items():
            args.extend([k, v])
        return run(*args)

    def test_rerank_writes_rankings(self, pipeline_dir):
        out = pipeline_dir["tmp"] / "r.jsonl"
        assert self._rerank(pipeline_dir, out) == 0
        rows = [json.loads(l) for l in out.read_text().splitlines()]
        assert {r["image_id"] for r in rows} == {"i3", "i4"}
        assert len(rows[0]["ranking"]) == 9

    def test_rerank_deterministic_across_jobs(self, pipeline_dir):
        outs = []
        for jobs in ("1", "4"):
            out = pipeline_dir["tmp"] / f"r{jobs}.jsonl"
            assert self._rerank(pipeline_dir, out, **{"--jobs": jobs}) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_eval_metrics_json(self, pipeline_dir):
        reranked = pipeline_dir["tmp"] / "r.jsonl"
        assert self._rerank(pipeline_dir, reranked) == 0
        metrics = pipeline_dir["tmp"] / "m.json"
        rc = run(
            "eval",
            "--reranked", reranked,
            "--corpus", pipeline_dir["corpus"],
            "--out", metrics,
        )
        assert rc == 0
        data = json.loads(metrics.read_text())
        for key in ("bleu1", "bleu4", "rouge_l", "mbleu", "cider_d", "div1", "vocab"):
            assert key in data


class TestTrain:
    def test_train_cnn_end_to_end(self, pipeline_dir):
        dataset = pipeline_dir["tmp"] / "d.jsonl"
        assert run(
            "build-dataset",
            "--corpus", pipeline_dir["corpus"],
            "--embeddings", pipeline_dir["embeddings"],
            "--out", dataset,
        ) == 0
        weights = pipeline_dir["tmp"] / "w.jsonl"
        losses = pipeline_dir["tmp"] / "losses.jsonl"
        rc = run(
            "train",
            "--dataset", dataset,
            "--embeddings", pipeline_dir["embeddings"],
            "--out", weights,
            "--loss-log", losses,
            "--threshold", "0.2",
            "--kernels", "8",
            "--epochs", "2",
        )
        assert rc == 0
        assert weights.exists()
        loss_rows = [json.loads(l) for l in losses.read_text().splitlines()]
        assert len(loss_rows) == 2

    def test_train_deterministic(self, pipeline_dir):
        dataset = pipeline_dir["tmp"] / "d.jsonl"
        run(
            "build-dataset",
            "--corpus", pipeline_dir["corpus"],
            "--embeddings", pipeline_dir["embeddings"],
            "--out", dataset,
        )
        blobs = []
        for name in ("w1", "w2"):
            weights = pipeline_dir["tmp"] / f"{name}.jsonl"
            assert run(
                "train",
                "--dataset", dataset,
                "--embeddings", pipeline_dir["embeddings"],
                "--out", weights,
                "--threshold", "0.2",
                "--kernels", "4",
                "--epochs", "1",
            ) == 0
            blobs.append(weights.read_bytes())
        assert blobs[0] == blobs[1]


class TestBias:
    def test_fixture_report(self, pipeline_dir, capsys):
        out = pipeline_dir["tmp"] / "bias.jsonl"
        rc = run(
            "bias",
            "--corpus", pipeline_dir["corpus"],
            "--objects", "skateboard,umbrella",
            "--out", out,
        )
        assert rc == 0
        rows = [json.loads(l) for l in out.read_text().splitlines()]
        by_obj = {r["object"]: r for r in rows}
        # "a man on a skateboard in a park" + "a person riding a skateboard"
        assert by_obj["skateboard"]["with_man"] == 1
        assert by_obj["skateboard"]["with_person"] == 1
        # "a woman under and umbrella ..."
        assert by_obj["umbrella"]["with_woman"] == 1


class TestSearch:
    def test_search_self_key(self, pipeline_dir, capsys):
        out = pipeline_dir["tmp"] / "hits.jsonl"
        rc = run(
            "search",
            "--embeddings", pipeline_dir["embeddings"],
            "--contexts", "umbrella",
            "--k", "3",
            "--out", out,
        )
        assert rc == 0
        rows = [json.loads(l) for l in out.read_text().splitlines()]
        assert rows[0]["rank"] == 1
        assert rows[0]["id"] == "umbrella"  # the key itself is indexed
        assert rows[0]["score"] == pytest.approx(1.0)


class TestEmbedToy:
    def test_covers_pipeline_keys(self, pipeline_dir, fixture_corpus):
        table = load_embeddings(pipeline_dir["embeddings"])
        for record in fixture_corpus:
            for cap in record.human_captions:
                assert cap in table

    def test_texts_file(self, tmp_path):
        texts = tmp_path / "texts.txt"
        texts.write_text("a dog\na cat\n")
        out = tmp_path / "e.jsonl"
        assert run("embed-toy", "--texts", texts, "--dim", "16", "--out", out) == 0
        table = load_embeddings(out)
        assert set(table.entries) == {"a dog", "a cat"}
        assert table.dim == 16


class TestConfigFile:
    def test_config_supplies_flags_cli_overrides(self, pipeline_dir, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"dim": 16, "out": str(tmp_path / "from_cfg.jsonl")}))
        texts = tmp_path / "texts.txt"
        texts.write_text("a dog\n")
        # out comes from the config file
        assert run("--config", cfg, "embed-toy", "--texts", texts) == 0
        assert load_embeddings(tmp_path / "from_cfg.jsonl").dim == 16
        # command line overrides the config's dim
        override = tmp_path / "override.jsonl"
        assert run("--config", cfg, "embed-toy", "--texts", texts, "--dim", "8", "--out", override) == 0
        assert load_embeddings(override).dim == 8
