"""DTMC data model and the bounded-generation tree builder.

The builder expands the generation tree depth-first to horizon L, keeping
only the top-(alpha, k) tokens at each step.  Unselected probability mass
flows to an absorbing rest state per expansion.  Strings live only in the
recursion; states store integer features.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

from .errors import InsufficientCoverageError, ProviderError, StateBudgetExceededError
from .quantify import QuantifierSpec, make_evaluator
from .tokens import MASS_TOL, TokenProvider, top_alpha_k

# Sentinel feature value for rest states; outside every quantifier's range
# so user-range atoms can never accidentally hold there.
PLACEHOLDER_VALUE = -(2**31)

INNER = "inner"
LEAF_TERMINAL = "leaf_terminal"
REST_TERMINAL = "rest_terminal"
KINDS = (INNER, LEAF_TERMINAL, REST_TERMINAL)

DEFAULT_STATE_CAP = 5_000_000


@dataclass(frozen=True, slots=True)
class GenState:
    uid: int
    step: int
    features: tuple[int, ...]
    kind: str


@dataclass
class Dtmc:
    """Finite state set, stochastic transition map, initial state.

    `transitions` preserves insertion order: children in selection order,
    rest child last, terminal self-loops at creation time.
    """

    states: dict[int, GenState]
    transitions: dict[tuple[int, int], float]
    initial_uid: int
    feature_names: tuple[str, ...]

    def outgoing(self, uid: int):
        return [(dst, p) for (src, dst), p in self.transitions.items() if src == uid]


@dataclass
class BuildStats:
    state_count: int
    transition_count: int
    provider_calls: int
    wall_time_ms: float


def _fetch_selection(provider, context, alpha, k, calls):
    """Query the provider, enlarging `need` until the selection contract holds."""
    need = k
    last_len = -1
    while True:
        dist = provider.next_distribution(context, need)
        calls[0] += 1
        try:
            return top_alpha_k(dist, alpha, k)
        except InsufficientCoverageError:
            if len(dist) == last_len:
                raise ProviderError(
                    f"provider cannot cover alpha={alpha} for context {context!r}"
                )
            last_len = len(dist)
            need = max(need * 2, len(dist) * 2)


def build_dtmc(
    provider: TokenProvider,
    start: str,
    alpha: float,
    k: int,
    horizon_L: int,
    specs: list[QuantifierSpec],
    *,
    state_cap: int = DEFAULT_STATE_CAP,
    placeholder: int = PLACEHOLDER_VALUE,
) -> tuple[Dtmc, BuildStats]:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if horizon_L < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon_L}")

    t0 = time.monotonic()
    evaluators = [make_evaluator(s) for s in specs]
    rest_features = tuple(placeholder for _ in specs)

    states: dict[int, GenState] = {}
    transitions: dict[tuple[int, int], float] = {}
    calls = [0]

    def new_uid() -> int:
        uid = len(states)
        if uid >= state_cap:
            raise StateBudgetExceededError(
                f"state budget of {state_cap} exceeded"
            )
        return uid

    def quantify(text: str) -> tuple[int, ...]:
        return tuple(ev(text) for ev in evaluators)

    def expand(text: str, step: int) -> int:
        """Create the state for `text` at `step`, recurse, return its uid."""
        uid = new_uid()
        if step == horizon_L:
            states[uid] = GenState(uid, step, quantify(text), LEAF_TERMINAL)
            transitions[(uid, uid)] = 1.0
            return uid
        states[uid] = GenState(uid, step, quantify(text), INNER)
        try:
            selected = _fetch_selection(provider, text, alpha, k, calls)
        except ProviderError as exc:
            raise type(exc)(f"{exc} [context={text!r}]") from exc
        for tok, p in selected.pairs:
            child = expand(text + tok.text, step + 1)
            transitions[(uid, child)] = p
        if selected.p_sum < 1.0 - MASS_TOL:
            rest = new_uid()
            states[rest] = GenState(rest, step + 1, rest_features, REST_TERMINAL)
            transitions[(uid, rest)] = 1.0 - selected.p_sum
            transitions[(rest, rest)] = 1.0
        return uid

    root = expand(start, 0)
    dtmc = Dtmc(
        states=states,
        transitions=transitions,
        initial_uid=root,
        feature_names=tuple(s.name for s in specs),
    )
    stats = BuildStats(
        state_count=len(states),
        transition_count=len(transitions),
        provider_calls=calls[0],
        wall_time_ms=(time.monotonic() - t0) * 1000.0,
    )
    return dtmc, stats


def validate(dtmc: Dtmc) -> list[str]:
    """Return violation descriptions; empty list means the DTMC is valid."""
    violations: list[str] = []
    out: dict[int, list[tuple[int, float]]] = {uid: [] for uid in dtmc.states}
    incoming: dict[int, int] = {uid: 0 for uid in dtmc.states}
    for (src, dst), p in dtmc.transitions.items():
        if src not in dtmc.states or dst not in dtmc.states:
            violations.append(f"transition ({src},{dst}) references unknown state")
            continue
        if not 0.0 < p <= 1.0:
            violations.append(f"transition ({src},{dst}) probability {p} not in (0,1]")
        out[src].append((dst, p))
        if src != dst:
            incoming[dst] += 1

    if dtmc.initial_uid not in dtmc.states:
        violations.append(f"initial uid {dtmc.initial_uid} not a state")
        return violations

    for uid, state in dtmc.states.items():
        row = math.fsum(p for _, p in out[uid])
        if abs(row - 1.0) > MASS_TOL:
            violations.append(
                f"state {uid}: outgoing sum {row:.12g} deviates from 1 by {row - 1.0:.3g}"
            )
        terminal_shape = len(out[uid]) == 1 and out[uid][0][0] == uid
        if state.kind in (LEAF_TERMINAL, REST_TERMINAL) and not terminal_shape:
            violations.append(f"state {uid}: kind {state.kind} but not a pure self-loop")
        if state.kind == INNER and terminal_shape:
            violations.append(f"state {uid}: kind inner but shaped as a terminal")
        if state.kind not in KINDS:
            violations.append(f"state {uid}: unknown kind {state.kind!r}")

    # Non-self-loop edges must form a tree rooted at the initial state with
    # strictly increasing steps.
    if incoming[dtmc.initial_uid] != 0:
        violations.append("initial state has incoming tree edges")
    for uid in dtmc.states:
        if uid != dtmc.initial_uid and incoming[uid] != 1:
            violations.append(f"state {uid}: {incoming[uid]} incoming tree edges, expected 1")
    for (src, dst), _ in dtmc.transitions.items():
        if src != dst and src in dtmc.states and dst in dtmc.states:
            if dtmc.states[dst].step != dtmc.states[src].step + 1:
                violations.append(
                    f"edge ({src},{dst}): step {dtmc.states[src].step} -> "
                    f"{dtmc.states[dst].step} is not +1"
                )
    return violations


def dtmc_to_json(dtmc: Dtmc) -> str:
    doc = {
        "states": [
            {"uid": s.uid, "step": s.step, "kind": s.kind, "features": list(s.features)}
            for s in dtmc.states.values()
        ],
        "transitions": [[src, dst, p] for (src, dst), p in dtmc.transitions.items()],
        "initial": dtmc.initial_uid,
        "feature_names": list(dtmc.feature_names),
    }
    return json.dumps(doc, indent=2)


def dtmc_from_json(text: str) -> Dtmc:
    doc = json.loads(text)
    states = {
        s["uid"]: GenState(s["uid"], s["step"], tuple(s["features"]), s["kind"])
        for s in doc["states"]
    }
    transitions = {(src, dst): p for src, dst, p in doc["transitions"]}
    return Dtmc(
        states=states,
        transitions=transitions,
        initial_uid=doc["initial"],
        feature_names=tuple(doc["feature_names"]),
    )
