"""Model backends: anything that maps a context string to next-token logits."""

from __future__ import annotations

import hashlib
import math
from typing import Protocol


class ContextTooLong(Exception):
    pass


class ModelBackend(Protocol):
    model_id: str
    vocab: list[str]  # index = token id

    def next_token_logits(self, context: str) -> list[float]:
        """Raw logits over the full vocabulary for the next position."""
        ...


class StubBackend:
    """Deterministic toy backend for tests and offline development.

    Logits are a stable hash of (context, token id), so identical requests
    always produce identical distributions without any model weights.
    """

    def __init__(self, vocab: list[str] | None = None, model_id: str = "stub",
                 max_context_chars: int = 4096):
        self.model_id = model_id
        self.vocab = vocab or [" the", " a", " he", " she", " game", " player", ".", " won"]
        self.max_context_chars = max_context_chars

    def next_token_logits(self, context: str) -> list[float]:
        if len(context) > self.max_context_chars:
            raise ContextTooLong(f"{len(context)} chars > {self.max_context_chars}")
        logits = []
        for i in range(len(self.vocab)):
            digest = hashlib.sha256(f"{context}|{i}".encode()).digest()
            logits.append(int.from_bytes(digest[:4], "big") / 2**32 * 6.0)
        return logits


class HFBackend:
    """Wraps a Hugging Face transformer, causal or masked.

    Causal LMs read the final-position logits for the given context.
    Masked LMs are adapted autoregressively by appending one mask token
    and reading that position's logits.
    """

    def __init__(self, model_id: str, device: str = "cpu"):
        import torch
        from transformers import AutoConfig, AutoModelForCausalLM, AutoModelForMaskedLM, AutoTokenizer

        self.model_id = model_id
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        config = AutoConfig.from_pretrained(model_id)
        archs = config.architectures or []
        self._masked = any("MaskedLM" in a for a in archs)
        loader = AutoModelForMaskedLM if self._masked else AutoModelForCausalLM
        self._model = loader.from_pretrained(model_id).to(device).eval()
        self._device = device
        self.max_tokens = getattr(config, "max_position_embeddings", 512)
        self.vocab = [
            self._tokenizer.decode([i]) for i in range(config.vocab_size)
        ]

    def next_token_logits(self, context: str) -> list[float]:
        torch = self._torch
        if self._masked:
            text = context + self._tokenizer.mask_token
            enc = self._tokenizer(text, return_tensors="pt")
            if enc.input_ids.shape[1] > self.max_tokens:
                raise ContextTooLong(f"{enc.input_ids.shape[1]} tokens > {self.max_tokens}")
            with torch.no_grad():
                out = self._model(**enc.to(self._device))
            mask_pos = (enc.input_ids[0] == self._tokenizer.mask_token_id).nonzero()[0, 0]
            logits = out.logits[0, mask_pos]
        else:
            enc = self._tokenizer(context, return_tensors="pt")
            if enc.input_ids.shape[1] > self.max_tokens:
                raise ContextTooLong(f"{enc.input_ids.shape[1]} tokens > {self.max_tokens}")
            with torch.no_grad():
                out = self._model(**enc.to(self._device))
            logits = out.logits[0, -1]
        return [float(x) for x in logits[: len(self.vocab)]]


def softmax(logits: list[float], temperature: float = 1.0) -> list[float]:
    scaled = [x / temperature for x in logits]
    peak = max(scaled)
    exps = [math.exp(x - peak) for x in scaled]
    z = math.fsum(exps)
    return [e / z for e in exps]
