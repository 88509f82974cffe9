"""Bounded DTMC verification of language-model text generation."""

from .dtmc import BuildStats, Dtmc, GenState, PLACEHOLDER_VALUE, build_dtmc, validate
from .pctl import CheckResult, PctlQuery, brute_force_check, check, parse_query
from .quantify import Lexicon, QuantifierSpec, quantify_all
from .tokens import (
    SelectedTokens,
    Token,
    TokenDistribution,
    apply_temperature,
    top_alpha_k,
)

__version__ = "0.1.0"
