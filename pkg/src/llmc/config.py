"""Run configuration: one JSON file binding provider, quantifiers, and queries."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .dtmc import DEFAULT_STATE_CAP
from .errors import ConfigError
from .quantify import Lexicon, QuantifierSpec, default_lexicon
from .tokens import NgramProvider, RemoteProvider, TableProvider, TemperatureProvider, TokenProvider

BRIDGE_URL_ENV = "LLMC_BRIDGE_URL"


@dataclass
class RunConfig:
    start: str
    alpha: float
    k: int
    horizon: int
    provider_spec: dict
    quantifiers: list[QuantifierSpec]
    queries: list[str]
    output_dir: Path
    state_cap: int = DEFAULT_STATE_CAP
    temperature: float = 1.0
    run_name: str = "run"
    base_dir: Path = field(default_factory=Path)

    def make_provider(self) -> TokenProvider:
        provider = _build_provider(self.provider_spec, self.base_dir)
        if self.temperature != 1.0:
            provider = TemperatureProvider(provider, self.temperature)
        return provider


def _resolve(path: str, base: Path) -> Path:
    p = Path(path)
    return p if p.is_absolute() else base / p


def _build_provider(spec: dict, base: Path) -> TokenProvider:
    kind = spec.get("type")
    if kind == "table":
        path = _resolve(spec["path"], base)
        if not path.exists():
            raise ConfigError(f"table provider file not found: {path}")
        return TableProvider.from_file(path)
    if kind == "ngram":
        path = _resolve(spec["corpus_path"], base)
        if not path.exists():
            raise ConfigError(f"ngram corpus file not found: {path}")
        return NgramProvider.from_file(path, order=int(spec.get("order", 2)))
    if kind == "remote":
        url = os.environ.get(BRIDGE_URL_ENV) or spec.get("url")
        if not url:
            raise ConfigError("remote provider needs 'url' or LLMC_BRIDGE_URL")
        return RemoteProvider(url, timeout=float(spec.get("timeout", 120.0)))
    raise ConfigError(f"unknown provider type: {kind!r}")


def _load_lexicon(params: dict, key: str, default_name: str, base: Path) -> Lexicon:
    if key in params:
        return Lexicon.from_file(_resolve(params[key], base))
    return default_lexicon(default_name)


def _build_quantifier(entry: dict, base: Path) -> QuantifierSpec:
    kind = entry.get("kind")
    name = entry.get("name", kind)
    params = dict(entry.get("params", {}))
    try:
        if kind == "gender":
            params = {
                "male": _load_lexicon(params, "male_lexicon", "male", base),
                "female": _load_lexicon(params, "female_lexicon", "female", base),
            }
        elif kind == "sentiment":
            params = {"valence": _load_lexicon(params, "valence_lexicon", "valence", base)}
        elif kind == "readability":
            params = {}
        elif kind == "similarity":
            if "reference" not in params:
                raise ConfigError(f"similarity quantifier {name!r} needs 'reference'")
            params = {"reference": params["reference"]}
        else:
            raise ConfigError(f"unknown quantifier kind: {kind!r}")
        return QuantifierSpec(kind=kind, name=name, params=params)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"quantifier {name!r}: {exc}") from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

    base = path.parent
    try:
        alpha = float(doc["alpha"])
        k = int(doc["k"])
        horizon = int(doc["L"])
        start = doc["start"]
        provider_spec = doc["provider"]
    except KeyError as exc:
        raise ConfigError(f"config missing required field {exc}") from exc

    if not 0.0 < alpha <= 1.0:
        raise ConfigError(f"alpha must be in (0, 1], got {alpha}")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if horizon < 0:
        raise ConfigError(f"L must be >= 0, got {horizon}")

    quantifiers = [_build_quantifier(e, base) for e in doc.get("quantifiers", [])]
    names = [q.name for q in quantifiers]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate quantifier names: {names}")

    return RunConfig(
        start=start,
        alpha=alpha,
        k=k,
        horizon=horizon,
        provider_spec=provider_spec,
        quantifiers=quantifiers,
        queries=list(doc.get("queries", [])),
        output_dir=_resolve(doc.get("output_dir", "."), base),
        state_cap=int(doc.get("state_cap", DEFAULT_STATE_CAP)),
        temperature=float(doc.get("temperature", 1.0)),
        run_name=doc.get("run_name", path.stem),
        base_dir=base,
    )
