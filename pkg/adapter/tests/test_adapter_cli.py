import json

import pytest

import vcrank
from vcadapter import cli


class TestExtractContexts:
    def test_end_to_end(self, tmp_path, sample_dir, captions_path, capsys):
        out = tmp_path / "corpus.jsonl"
        code = cli.run([
            "extract-contexts", "--images", str(sample_dir),
            "--captions", str(captions_path),
            "--classifiers", "colorname,luminance", "--out", str(out),
        ])
        assert code == 0
        assert "wrote 10 corpus rows" in capsys.readouterr().out
        assert len(vcrank.load_corpus(out)) == 10

    def test_deterministic_across_runs(self, tmp_path, sample_dir, captions_path):
        outs = []
        for name in ("a.jsonl", "b.jsonl"):
            out = tmp_path / name
            assert cli.run([
                "extract-contexts", "--images", str(sample_dir),
                "--captions", str(captions_path), "--out", str(out),
            ]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_unknown_classifier_is_validation_error(self, tmp_path, sample_dir, captions_path):
        code = cli.run([
            "extract-contexts", "--images", str(sample_dir),
            "--captions", str(captions_path),
            "--classifiers", "alexnet", "--out", str(tmp_path / "c.jsonl"),
        ])
        assert code == 1

    def test_missing_captions_file_is_io_error(self, tmp_path, sample_dir):
        code = cli.run([
            "extract-contexts", "--images", str(sample_dir),
            "--captions", str(tmp_path / "missing.json"),
            "--out", str(tmp_path / "c.jsonl"),
        ])
        assert code == 2

    def test_skipped_image_warns(self, tmp_path, capsys):
        images = tmp_path / "imgs"
        images.mkdir()
        (images / "bad.png").write_bytes(b"junk")
        caps = tmp_path / "caps.json"
        caps.write_text(json.dumps({"bad": ["a caption"]}))
        out = tmp_path / "corpus.jsonl"
        assert cli.run([
            "extract-contexts", "--images", str(images),
            "--captions", str(caps), "--out", str(out),
        ]) == 0
        assert "skipped" in capsys.readouterr().err
        assert out.read_text() == ""


class TestEmbedTexts:
    def test_end_to_end(self, tmp_path):
        texts = tmp_path / "texts.txt"
        texts.write_text("a red ball\nblue car\na red ball\n")
        out = tmp_path / "emb.jsonl"
        assert cli.run([
            "embed-texts", "--texts", str(texts), "--dim", "32", "--out", str(out),
        ]) == 0
        table = vcrank.load_embeddings(out)
        assert table.dim == 32
        assert set(table.entries) == {"a red ball", "blue car"}

    def test_empty_input_is_validation_error(self, tmp_path):
        texts = tmp_path / "texts.txt"
        texts.write_text("")
        code = cli.run([
            "embed-texts", "--texts", str(texts), "--out", str(tmp_path / "e.jsonl"),
        ])
        assert code == 1

    def test_unknown_encoder_is_validation_error(self, tmp_path):
        texts = tmp_path / "texts.txt"
        texts.write_text("hello\n")
        code = cli.run([
            "embed-texts", "--texts", str(texts), "--encoder", "word2vec",
            "--out", str(tmp_path / "e.jsonl"),
        ])
        assert code == 1
