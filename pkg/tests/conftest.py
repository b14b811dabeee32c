import pathlib

import pytest

from vcrank import cli, load_candidates, load_corpus, load_embeddings

DATA = pathlib.Path(__file__).parent / "data"

TOY_DIM = 64
TOY_SEED = 42


@pytest.fixture(scope="session")
def corpus_path():
    return DATA / "corpus.jsonl"


@pytest.fixture(scope="session")
def candidates_path():
    return DATA / "candidates.jsonl"


@pytest.fixture(scope="session")
def fixture_corpus(corpus_path):
    return load_corpus(corpus_path)


@pytest.fixture(scope="session")
def fixture_candidates(candidates_path):
    return load_candidates(candidates_path)


@pytest.fixture(scope="session")
def embeddings_path(tmp_path_factory, corpus_path, candidates_path):
    """Toy embeddings covering every key the fixture pipeline looks up."""
    out = tmp_path_factory.mktemp("emb") / "embeddings.jsonl"
    rc = cli.run(
        [
            "embed-toy",
            "--corpus", str(corpus_path),
            "--candidates", str(candidates_path),
            "--tokens",
            "--dim", str(TOY_DIM),
            "--seed", str(TOY_SEED),
            "--out", str(out),
        ]
    )
    assert rc == 0
    return out


@pytest.fixture(scope="session")
def toy_table(embeddings_path):
    return load_embeddings(embeddings_path)
