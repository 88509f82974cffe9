"""Text quantification: pure string -> integer feature functions.

Four methods are provided: gendered-term counting, lexicon sentiment,
Flesch Reading Ease (scaled x100), and word-level LCS similarity against
a reference string.  Values become DTMC state features.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

KINDS = ("gender", "sentiment", "readability", "similarity")
RESERVED_NAMES = {"step", "uid"}
_IDENT_RE = re.compile(r"^[a-zA-Z_][a-zA-Z0-9_]*$")
_WORD_RE = re.compile(r"[a-z0-9]+")
_LETTERS_RE = re.compile(r"[a-z]+")
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class Lexicon:
    """Lowercase word -> integer weight."""

    entries: dict[str, int]

    def __post_init__(self):
        for word in self.entries:
            if word != word.lower() or any(c.isspace() for c in word):
                raise ValueError(f"lexicon key must be lowercase, whitespace-free: {word!r}")

    @classmethod
    def from_file(cls, path) -> "Lexicon":
        """One `word<TAB>weight` per line; '#' lines are comments."""
        entries: dict[str, int] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, _, weight = line.partition("\t")
            entries[word.strip().lower()] = int(weight) if weight else 1
        return cls(entries)


@dataclass(frozen=True)
class QuantifierSpec:
    """One feature: a kind, its DTMC variable name, and kind-specific params.

    params by kind:
      gender      male: Lexicon, female: Lexicon
      sentiment   valence: Lexicon
      readability (none)
      similarity  reference: str
    """

    kind: str
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown quantifier kind: {self.kind!r}")
        if not _IDENT_RE.match(self.name) or self.name in RESERVED_NAMES:
            raise ValueError(f"invalid feature name: {self.name!r}")


def _words(text: str) -> list[str]:
    """Lowercase word tokens split on non-alphanumeric boundaries."""
    return _WORD_RE.findall(text.lower())


def quantify_gender(text: str, male_lexicon: Lexicon, female_lexicon: Lexicon) -> int:
    """Male-term occurrences minus female-term occurrences (positive = male-leaning)."""
    if not male_lexicon.entries or not female_lexicon.entries:
        raise ValueError("gender lexicons must be nonempty")
    overlap = male_lexicon.entries.keys() & female_lexicon.entries.keys()
    if overlap:
        raise ValueError(f"gender lexicons must be disjoint, both contain {sorted(overlap)}")
    score = 0
    for word in _words(text):
        if word in male_lexicon.entries:
            score += 1
        elif word in female_lexicon.entries:
            score -= 1
    return score


def _round_half_away(x: float) -> int:
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def quantify_sentiment(text: str, valence: Lexicon) -> int:
    """Mean valence of matched words, scaled by 20, clamped to [-100, 100]."""
    hits = [valence.entries[w] for w in _words(text) if w in valence.entries]
    if not hits:
        return 0
    scaled = _round_half_away(20.0 * sum(hits) / len(hits))
    return max(-100, min(100, scaled))


def _syllables(word: str) -> int:
    """Vowel-group count with a terminal silent-'e' correction, minimum 1."""
    groups = len(_VOWEL_GROUP_RE.findall(word))
    if word.endswith("e") and not word.endswith("le") and groups > 1:
        groups -= 1
    return max(1, groups)


def quantify_readability(text: str) -> int:
    """Flesch Reading Ease x100, rounded; 0 for word-free text."""
    words = _LETTERS_RE.findall(text.lower())
    if not words:
        return 0
    sentences = sum(
        1 for seg in re.split(r"[.!?]", text) if _LETTERS_RE.search(seg.lower())
    )
    sentences = max(1, sentences)
    syllables = sum(_syllables(w) for w in words)
    score = 206.835 - 1.015 * (len(words) / sentences) - 84.6 * (syllables / len(words))
    return _round_half_away(score * 100.0)


def _lcs_len(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def quantify_similarity(text: str, reference: str) -> int:
    """100 * |word-LCS(text, reference)| / |reference words|, floored."""
    ref_words = _words(reference)
    if not ref_words:
        raise ValueError("reference must contain at least one word")
    return (100 * _lcs_len(_words(text), ref_words)) // len(ref_words)


def make_evaluator(spec: QuantifierSpec):
    """Bind a spec's params into a text -> int callable."""
    if spec.kind == "gender":
        male, female = spec.params["male"], spec.params["female"]
        return lambda text: quantify_gender(text, male, female)
    if spec.kind == "sentiment":
        valence = spec.params["valence"]
        return lambda text: quantify_sentiment(text, valence)
    if spec.kind == "readability":
        return quantify_readability
    reference = spec.params["reference"]
    return lambda text: quantify_similarity(text, reference)


def quantify_all(text: str, specs: list[QuantifierSpec]) -> tuple[int, ...]:
    """Per-spec values in spec order; names must be unique."""
    if not specs:
        raise ValueError("specs must be nonempty")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate feature names: {names}")
    return tuple(make_evaluator(s)(text) for s in specs)


def default_lexicon(name: str) -> Lexicon:
    """Bundled lexicons: 'male', 'female', or 'valence'."""
    ref = resources.files("llmc").joinpath(f"data/{name}.txt")
    with resources.as_file(ref) as path:
        return Lexicon.from_file(path)
