import random

import pytest

from vcrank import textnorm


class TestTokenize:
    def test_punctuation_and_case(self):
        assert textnorm.tokenize("A man, on a Skateboard.") == ["a", "man", "on", "a", "skateboard"]

    def test_empty(self):
        assert textnorm.tokenize("") == []

    def test_figure_caption(self):
        assert textnorm.tokenize("two ladies in traditional japanese garb") == [
            "two", "ladies", "in", "traditional", "japanese", "garb",
        ]

    def test_keeps_intra_word_hyphen_and_apostrophe(self):
        assert textnorm.tokenize("a red-haired man's dog") == ["a", "red-haired", "man's", "dog"]

    def test_edge_punctuation_stripped(self):
        assert textnorm.tokenize("'hello' - world") == ["hello", "world"]

    def test_idempotent_on_rejoined_output(self):
        rng = random.Random(7)
        words = ["A", "man,", "on", "Skate-board.", "l'eau", "¡hola!", "FOO", "bar's"]
        for _ in range(50):
            text = " ".join(rng.choices(words, k=rng.randint(0, 8)))
            once = textnorm.tokenize(text)
            assert textnorm.tokenize(" ".join(once)) == once


class TestNgrams:
    def test_bigrams(self):
        assert dict(textnorm.ngrams(["a", "b", "a"], 2)) == {("a", "b"): 1, ("b", "a"): 1}

    def test_too_short(self):
        assert dict(textnorm.ngrams(["a"], 2)) == {}

    def test_unigram_multiset(self):
        grams = textnorm.ngrams(["a", "a", "a"], 1)
        assert grams[("a",)] == 3
        assert len(grams) == 1

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            textnorm.ngrams(["a"], 0)

    def test_count_identity(self):
        rng = random.Random(3)
        for _ in range(100):
            seq = [str(rng.randint(0, 5)) for _ in range(rng.randint(0, 12))]
            n = rng.randint(1, 5)
            assert sum(textnorm.ngrams(seq, n).values()) == max(0, len(seq) - n + 1)


class TestGenderLexicon:
    def test_defaults(self):
        lex = textnorm.default_gender_lexicon()
        assert "man" in lex.man_terms
        assert "ladies" in lex.woman_terms
        assert "person" in lex.person_terms
        assert "dog" not in lex.man_terms | lex.woman_terms | lex.person_terms

    def test_disjoint(self):
        lex = textnorm.default_gender_lexicon()
        assert not lex.man_terms & lex.woman_terms
        assert not lex.man_terms & lex.person_terms
        assert not lex.woman_terms & lex.person_terms

    def test_override_file(self, tmp_path):
        p = tmp_path / "lex.json"
        p.write_text('{"man": ["dude"], "woman": ["gal"], "person": ["human"]}')
        lex = textnorm.load_gender_lexicon(p)
        assert lex.man_terms == {"dude"}

    def test_overlapping_override_rejected(self, tmp_path):
        p = tmp_path / "lex.json"
        p.write_text('{"man": ["x"], "woman": ["x"], "person": ["human"]}')
        with pytest.raises(ValueError, match="disjoint"):
            textnorm.load_gender_lexicon(p)
