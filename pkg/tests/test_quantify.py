import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llmc.quantify import (
    Lexicon,
    QuantifierSpec,
    default_lexicon,
    quantify_all,
    quantify_gender,
    quantify_readability,
    quantify_sentiment,
    quantify_similarity,
)

from conftest import FEMALE, MALE, VALENCE

words = st.lists(
    st.sampled_from(["he", "she", "his", "her", "good", "bad", "game", "the"]),
    max_size=20,
)
texts = words.map(" ".join)


class TestGender:
    def test_empty(self):
        assert quantify_gender("", MALE, FEMALE) == 0

    def test_hand_count(self):
        assert quantify_gender("he said she and he left", MALE, FEMALE) == 1

    def test_no_hits(self):
        assert quantify_gender("the game ended", MALE, FEMALE) == 0

    def test_case_and_punctuation(self):
        assert quantify_gender("He, his... SHE!", MALE, FEMALE) == 1

    def test_rejects_overlapping_lexicons(self):
        with pytest.raises(ValueError, match="disjoint"):
            quantify_gender("x", Lexicon({"he": 1}), Lexicon({"he": 1}))

    @given(texts)
    @settings(max_examples=100, deadline=None)
    def test_swap_antisymmetry(self, text):
        assert quantify_gender(text, MALE, FEMALE) == -quantify_gender(text, FEMALE, MALE)


class TestSentiment:
    def test_empty(self):
        assert quantify_sentiment("", VALENCE) == 0

    def test_hand_mean(self):
        assert quantify_sentiment("good good bad", VALENCE) == 20

    def test_clamp_boundary(self):
        lex = Lexicon({"stellar": 5})
        assert quantify_sentiment("stellar stellar stellar", lex) == 100

    def test_negative_rounding_half_away(self):
        # mean -1.5 * 20 = -30 exactly; mean 0.5*... exercise rounding:
        lex = Lexicon({"a": 1, "b": -2})
        # hits [1, -2] -> mean -0.5 -> -10
        assert quantify_sentiment("a b", lex) == -10

    @given(texts)
    @settings(max_examples=100, deadline=None)
    def test_range(self, text):
        assert -100 <= quantify_sentiment(text, VALENCE) <= 100


class TestReadability:
    def test_empty(self):
        assert quantify_readability("") == 0

    def test_hand_flesch(self):
        # words=3, sentences=1, syllables=3 -> 206.835 - 3.045 - 84.6 = 119.19
        assert quantify_readability("The cat sat.") == 11919

    def test_ratio_invariance(self):
        one = quantify_readability("The cat sat on the mat.")
        two = quantify_readability("The cat sat on the mat. The cat sat on the mat.")
        assert one == two

    def test_silent_e_and_le(self):
        # "table" ends in 'le': vowel groups a, e -> 2 syllables, no subtraction
        # "date" ends in silent 'e': groups a, e -> 2, minus 1 -> 1
        # words=2, sentences=1, syllables=3
        expected = round((206.835 - 1.015 * 2 - 84.6 * 1.5) * 100)
        assert quantify_readability("table date") == expected

    def test_word_free_text(self):
        assert quantify_readability("... 123 !!!") == 0


class TestSimilarity:
    def test_identity(self):
        assert quantify_similarity("light of my life", "light of my life") == 100

    def test_empty_text(self):
        assert quantify_similarity("", "light of my life") == 0

    def test_hand_lcs(self):
        assert quantify_similarity("light of his life", "light of my life") == 75

    def test_empty_reference(self):
        with pytest.raises(ValueError):
            quantify_similarity("x", "   ")

    def test_subsequence_scores_full(self):
        assert quantify_similarity("the light in of my whole life", "light of my life") == 100

    @given(texts, st.lists(st.sampled_from(["light", "of", "my", "life"]), min_size=1, max_size=4))
    @settings(max_examples=100, deadline=None)
    def test_range_and_monotonicity(self, text, ref_words):
        ref = " ".join(ref_words)
        base = quantify_similarity(text, ref)
        assert 0 <= base <= 100
        extended = quantify_similarity(text + " " + ref, ref)
        assert extended >= base


class TestQuantifyAll:
    def test_single_spec_empty_text(self, gender_spec):
        assert quantify_all("", [gender_spec]) == (0,)

    def test_componentwise(self, gender_spec, sentiment_spec):
        assert quantify_all("he is good", [gender_spec, sentiment_spec]) == (1, 60)

    def test_three_specs_empty(self, gender_spec, sentiment_spec):
        spec3 = QuantifierSpec(kind="readability", name="readability")
        assert quantify_all("", [gender_spec, sentiment_spec, spec3]) == (0, 0, 0)

    def test_duplicate_names_rejected(self, gender_spec):
        with pytest.raises(ValueError, match="duplicate"):
            quantify_all("x", [gender_spec, gender_spec])

    def test_reserved_names_rejected(self):
        with pytest.raises(ValueError):
            QuantifierSpec(kind="readability", name="step")

    def test_invalid_identifier_rejected(self):
        with pytest.raises(ValueError):
            QuantifierSpec(kind="readability", name="2bad")


class TestDefaultLexicons:
    def test_bundled_lexicons_load(self):
        male = default_lexicon("male")
        female = default_lexicon("female")
        valence = default_lexicon("valence")
        assert "he" in male.entries
        assert "she" in female.entries
        assert not (male.entries.keys() & female.entries.keys())
        assert all(-5 <= w <= 5 for w in valence.entries.values())
