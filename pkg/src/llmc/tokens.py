"""Token providers and the bounded top-(alpha, k) selection operator.

A provider maps a context string to a probability distribution over its
vocabulary.  Three implementations are included: an exact lookup table
(JSON file), a toy add-one-smoothed n-gram model, and an HTTP client for
a remote model-serving bridge.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import (
    ContextTooLongError,
    InsufficientCoverageError,
    PartialDistributionError,
    ProviderError,
    ProviderUnavailableError,
)

MASS_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class Token:
    """An atomic text element; `id` is unique within one provider."""

    id: int
    text: str


@dataclass(frozen=True)
class TokenDistribution:
    """Probability-weighted token list, sorted by descending probability.

    `covered_mass` is the honest sum of the listed entries; it is below 1
    when the provider truncated the tail.  Truncated mass is never
    renormalized away.
    """

    entries: tuple[tuple[Token, float], ...]
    covered_mass: float

    @classmethod
    def from_pairs(cls, pairs) -> "TokenDistribution":
        """Sort (token, prob) pairs canonically and compute covered mass."""
        ordered = tuple(sorted(pairs, key=lambda tp: (-tp[1], tp[0].id)))
        mass = math.fsum(p for _, p in ordered)
        dist = cls(entries=ordered, covered_mass=mass)
        dist.check()
        return dist

    def check(self) -> None:
        if self.covered_mass > 1 + MASS_TOL:
            raise ProviderError(
                f"covered_mass {self.covered_mass} exceeds 1"
            )
        seen: set[int] = set()
        prev = None
        for tok, p in self.entries:
            if not 0.0 <= p <= 1.0:
                raise ProviderError(f"probability {p} out of [0,1] for {tok}")
            if tok.id in seen:
                raise ProviderError(f"duplicate token id {tok.id}")
            seen.add(tok.id)
            if prev is not None:
                pt, pp = prev
                if p > pp or (p == pp and tok.id <= pt.id):
                    raise ProviderError("entries not in canonical order")
            prev = (tok, p)
        if abs(math.fsum(p for _, p in self.entries) - self.covered_mass) > MASS_TOL:
            raise ProviderError("covered_mass does not match entry sum")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SelectedTokens:
    """Prefix of a distribution chosen by `top_alpha_k`."""

    pairs: tuple[tuple[Token, float], ...]
    p_sum: float


def top_alpha_k(dist: TokenDistribution, alpha: float, k: int) -> SelectedTokens:
    """Select the shortest prefix reaching cumulative mass alpha, capped at k.

    Raises InsufficientCoverageError when the listed entries run out below
    alpha with fewer than k pairs and the distribution was truncated; the
    caller should re-request with a larger `need`.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not dist.entries:
        raise ValueError("empty distribution")

    taken = []
    cum = 0.0
    for tok, p in dist.entries:
        taken.append((tok, p))
        cum += p
        if cum >= alpha - MASS_TOL or len(taken) == k:
            return SelectedTokens(pairs=tuple(taken), p_sum=cum)

    # Entries exhausted below alpha with fewer than k pairs.  Legal only
    # when the distribution itself is complete.
    if dist.covered_mass >= 1.0 - MASS_TOL:
        return SelectedTokens(pairs=tuple(taken), p_sum=cum)
    raise InsufficientCoverageError(
        f"distribution truncated at mass {dist.covered_mass:.12g} < alpha {alpha}",
        covered_mass=dist.covered_mass,
        entries=len(dist.entries),
    )


def apply_temperature(dist: TokenDistribution, t: float) -> TokenDistribution:
    """Rescale a full distribution: p_i -> p_i^(1/t) / Z.

    Rejects truncated distributions; temperature on partial mass is
    ill-defined.
    """
    if t <= 0:
        raise ValueError(f"temperature must be > 0, got {t}")
    if dist.covered_mass < 1.0 - MASS_TOL:
        raise PartialDistributionError(
            f"temperature requires covered_mass 1, got {dist.covered_mass}"
        )
    if t == 1.0:
        return dist
    raised = [(tok, p ** (1.0 / t)) for tok, p in dist.entries]
    z = math.fsum(p for _, p in raised)
    return TokenDistribution.from_pairs((tok, p / z) for tok, p in raised)


class TokenProvider(ABC):
    """Uniform next-token distribution source.

    `concurrent_safe` declares whether read-only queries may run in
    parallel; callers must serialize when it is False.
    """

    concurrent_safe: bool = True

    @abstractmethod
    def next_distribution(self, context: str, need: int = 1) -> TokenDistribution:
        """Return at least min(need, vocab size) entries for `context`."""


class TableProvider(TokenProvider):
    """Exact-match lookup table; context "*" is the fallback row."""

    FALLBACK = "*"

    def __init__(self, table: dict[str, list]):
        self._vocab: dict[str, Token] = {}
        self._rows: dict[str, TokenDistribution] = {}
        for context, pairs in table.items():
            built = []
            for text, prob in pairs:
                if text not in self._vocab:
                    self._vocab[text] = Token(id=len(self._vocab), text=text)
                built.append((self._vocab[text], float(prob)))
            self._rows[context] = TokenDistribution.from_pairs(built)

    @classmethod
    def from_file(cls, path) -> "TableProvider":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def next_distribution(self, context: str, need: int = 1) -> TokenDistribution:
        row = self._rows.get(context)
        if row is None:
            row = self._rows.get(self.FALLBACK)
        if row is None:
            raise ProviderError(
                f"no table entry for context {context!r} and no '*' fallback"
            )
        return row


class NgramProvider(TokenProvider):
    """Add-one (Laplace) smoothed n-gram model over a whitespace-tokenized corpus.

    Token surface forms carry a leading space so that plain concatenation
    of generated tokens reproduces word boundaries.
    """

    def __init__(self, corpus: str, order: int = 2):
        if order < 2:
            raise ValueError("order must be >= 2")
        words = corpus.split()
        if not words:
            raise ValueError("empty corpus")
        self.order = order
        vocab = sorted(set(words))
        self._tokens = {w: Token(id=i, text=" " + w) for i, w in enumerate(vocab)}
        self._vocab = vocab
        self._follow: dict[tuple[str, ...], Counter] = defaultdict(Counter)
        self._hist_total: Counter = Counter()
        n = order - 1
        for i in range(len(words) - 1):
            hist = tuple(words[max(0, i - n + 1): i + 1])
            self._follow[hist][words[i + 1]] += 1
            self._hist_total[hist] += 1

    @classmethod
    def from_file(cls, path, order: int = 2) -> "NgramProvider":
        return cls(Path(path).read_text(encoding="utf-8"), order=order)

    def next_distribution(self, context: str, need: int = 1) -> TokenDistribution:
        hist = tuple(context.split()[-(self.order - 1):])
        counts = self._follow.get(hist, Counter())
        total = self._hist_total.get(hist, 0)
        v = len(self._vocab)
        pairs = [
            (self._tokens[w], (counts.get(w, 0) + 1) / (total + v))
            for w in self._vocab
        ]
        return TokenDistribution.from_pairs(pairs)


def parse_distribution_response(payload: dict) -> TokenDistribution:
    """Validate and convert a bridge DistributionResponse into a distribution."""
    try:
        raw = payload["tokens"]
        reported = float(payload["covered_mass"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ProviderError(f"malformed bridge response: {exc}") from exc
    pairs = [(Token(id=int(e["id"]), text=str(e["text"])), float(e["prob"])) for e in raw]
    for (_, a), (_, b) in zip(pairs, pairs[1:]):
        if b > a:
            raise ProviderError("bridge response probabilities not non-increasing")
    dist = TokenDistribution.from_pairs(pairs)
    if abs(dist.covered_mass - reported) > 1e-6:
        raise ProviderError(
            f"bridge covered_mass {reported} disagrees with entry sum "
            f"{dist.covered_mass}"
        )
    return dist


class RemoteProvider(TokenProvider):
    """Client for the JSON-over-HTTP bridge (POST /v1/distribution).

    Bridge inference is sequential per model instance, so this provider
    declares itself serial.
    """

    concurrent_safe = False

    def __init__(self, base_url: str, temperature: float = 1.0, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.temperature = temperature
        self.timeout = timeout
        self._session = requests.Session()

    def next_distribution(self, context: str, need: int = 1) -> TokenDistribution:
        body = {"context": context, "top_n": need, "temperature": self.temperature}
        try:
            resp = self._session.post(
                f"{self.base_url}/v1/distribution", json=body, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise ProviderUnavailableError(
                f"bridge at {self.base_url} unreachable: {exc}"
            ) from exc
        if resp.status_code == 413:
            raise ContextTooLongError(
                f"context of {len(context)} chars exceeds the model window"
            )
        if resp.status_code != 200:
            raise ProviderUnavailableError(
                f"bridge returned HTTP {resp.status_code}: {resp.text[:200]}"
            )
        return parse_distribution_response(resp.json())


class TemperatureProvider(TokenProvider):
    """Wraps a provider and rescales every full distribution it returns."""

    def __init__(self, inner: TokenProvider, temperature: float):
        self.inner = inner
        self.temperature = temperature
        self.concurrent_safe = inner.concurrent_safe

    def next_distribution(self, context: str, need: int = 1) -> TokenDistribution:
        return apply_temperature(self.inner.next_distribution(context, need), self.temperature)
