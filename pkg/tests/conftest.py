"""Shared fixtures and fuzzing helpers."""

from __future__ import annotations

import hashlib
import random

import pytest

from llmc.quantify import Lexicon, QuantifierSpec
from llmc.tokens import Token, TokenDistribution, TokenProvider

MALE = Lexicon({"he": 1, "him": 1, "his": 1})
FEMALE = Lexicon({"she": 1, "her": 1})
VALENCE = Lexicon({"good": 3, "bad": -3})


@pytest.fixture
def gender_spec():
    return QuantifierSpec(kind="gender", name="gender", params={"male": MALE, "female": FEMALE})


@pytest.fixture
def sentiment_spec():
    return QuantifierSpec(kind="sentiment", name="sentiment", params={"valence": VALENCE})


def random_distribution(rng: random.Random, size: int | None = None) -> TokenDistribution:
    size = size or rng.randint(1, 8)
    weights = [rng.random() + 1e-6 for _ in range(size)]
    total = sum(weights)
    pairs = [(Token(id=i, text=f" w{i}"), w / total) for i, w in enumerate(weights)]
    return TokenDistribution.from_pairs(pairs)


# Words drawn by the fuzz provider; a few gendered terms so the gender
# feature is non-constant across fuzz models.
_FUZZ_WORDS = ["he", "she", "his", "her", "game", "win", "run", "ball"]


class RandomContextProvider(TokenProvider):
    """Deterministic pseudo-random distribution per context string.

    Behaves like a huge table provider: identical contexts always yield
    identical full distributions.
    """

    def __init__(self, seed: int, vocab_size: int = 6):
        self.seed = seed
        words = _FUZZ_WORDS[:vocab_size]
        self._tokens = [Token(id=i, text=" " + w) for i, w in enumerate(words)]

    def next_distribution(self, context: str, need: int = 1) -> TokenDistribution:
        digest = hashlib.sha256(f"{self.seed}|{context}".encode()).digest()
        rng = random.Random(int.from_bytes(digest[:8], "big"))
        weights = [rng.random() + 1e-6 for _ in self._tokens]
        total = sum(weights)
        return TokenDistribution.from_pairs(
            (tok, w / total) for tok, w in zip(self._tokens, weights)
        )
