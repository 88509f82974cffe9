"""PCTL fragment over DTMC feature predicates: P=?/P~p with F and G paths.

Checking is exact: built models are step-stratified trees with absorbing
terminals, so a single backward pass in decreasing-step order computes
reachability probabilities without an iterative solver.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass
from typing import Union

from .dtmc import Dtmc, GenState, validate
from .errors import InvalidDtmcError, PctlSyntaxError, UnknownFeatureError

CMP_OPS = ("<=", ">=", "!=", "<", ">", "=")
_CMP_CANON = {"≤": "<=", "≥": ">=", "≠": "!=", "∧": "&", "∨": "|", "¬": "!"}


@dataclass(frozen=True)
class Atom:
    feature: str  # declared feature name or reserved "step"
    cmp: str
    constant: int


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Not:
    child: "StateFormula"


@dataclass(frozen=True)
class And:
    left: "StateFormula"
    right: "StateFormula"


@dataclass(frozen=True)
class Or:
    left: "StateFormula"
    right: "StateFormula"


StateFormula = Union[Atom, TrueF, FalseF, Not, And, Or]


@dataclass(frozen=True)
class PctlQuery:
    path_op: str  # "F" | "G"
    phi: StateFormula
    mode: str  # "query" | "bound"
    bound_cmp: str | None = None
    bound_p: float | None = None


@dataclass
class CheckResult:
    probability: float
    satisfied: bool | None
    target_state_count: int
    check_time_ms: float


class _Lexer:
    """Tokenizer; unicode operators are canonicalized to their ASCII forms."""

    _TOKEN_RE = re.compile(
        r"\s*(?:(?P<num>-?\d+(?:\.\d+)?)|(?P<ident>[a-zA-Z_][a-zA-Z0-9_]*)"
        r"|(?P<op>=\?|<=|>=|!=|[<>=!&|()\[\]]))"
    )

    def __init__(self, text: str):
        self.text = "".join(_CMP_CANON.get(c, c) for c in text)
        self.pos = 0

    def peek(self):
        m = self._TOKEN_RE.match(self.text, self.pos)
        if m is None:
            if self.text[self.pos:].strip():
                raise PctlSyntaxError(
                    f"unexpected character {self.text[self.pos:].lstrip()[0]!r}", self.pos
                )
            return None, None
        kind = m.lastgroup
        return kind, m.group(kind)

    def next(self):
        m = self._TOKEN_RE.match(self.text, self.pos)
        if m is None:
            raise PctlSyntaxError("unexpected end of query", self.pos)
        self.pos = m.end()
        kind = m.lastgroup
        return kind, m.group(kind)

    def expect_op(self, op: str):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise PctlSyntaxError(f"expected {op!r}, got {val!r}", self.pos)


def parse_query(text: str, declared_features: list[str]) -> PctlQuery:
    """Parse `P(F phi)`, `P=? [F phi]`, or `P<cmp><num> [F phi]` styles."""
    features = set(declared_features) | {"step"}
    lex = _Lexer(text)

    kind, val = lex.next()
    if kind != "ident" or val != "P":
        raise PctlSyntaxError(f"query must start with 'P', got {val!r}", lex.pos)

    mode, bound_cmp, bound_p = "query", None, None
    kind, val = lex.peek()
    if kind == "op" and val == "=?":
        lex.next()
    elif kind == "op" and val in ("<", "<=", ">", ">="):
        lex.next()
        bound_cmp = val
        nkind, nval = lex.next()
        if nkind != "num":
            raise PctlSyntaxError(f"expected probability bound, got {nval!r}", lex.pos)
        bound_p = float(nval)
        if not 0.0 <= bound_p <= 1.0:
            raise PctlSyntaxError(f"bound {bound_p} outside [0,1]", lex.pos)
        mode = "bound"

    kind, val = lex.next()
    if kind != "op" or val not in ("(", "["):
        raise PctlSyntaxError(f"expected '(' or '[', got {val!r}", lex.pos)
    closer = ")" if val == "(" else "]"

    kind, val = lex.next()
    if kind != "ident" or val not in ("F", "G"):
        raise PctlSyntaxError(f"expected path operator F or G, got {val!r}", lex.pos)
    path_op = val

    phi = _parse_or(lex, features)
    lex.expect_op(closer)
    kind, val = lex.peek()
    if kind is not None:
        raise PctlSyntaxError(f"trailing input {val!r}", lex.pos)
    return PctlQuery(path_op=path_op, phi=phi, mode=mode, bound_cmp=bound_cmp, bound_p=bound_p)


def _parse_or(lex, features):
    node = _parse_and(lex, features)
    while True:
        kind, val = lex.peek()
        if kind == "op" and val == "|":
            lex.next()
            node = Or(node, _parse_and(lex, features))
        else:
            return node


def _parse_and(lex, features):
    node = _parse_unary(lex, features)
    while True:
        kind, val = lex.peek()
        if kind == "op" and val == "&":
            lex.next()
            node = And(node, _parse_unary(lex, features))
        else:
            return node


def _parse_unary(lex, features):
    kind, val = lex.peek()
    if kind == "op" and val == "!":
        lex.next()
        return Not(_parse_unary(lex, features))
    if kind == "op" and val == "(":
        lex.next()
        node = _parse_or(lex, features)
        lex.expect_op(")")
        return node
    if kind == "ident":
        lex.next()
        if val == "true":
            return TrueF()
        if val == "false":
            return FalseF()
        if val not in features:
            raise UnknownFeatureError(val)
        ckind, cval = lex.next()
        if ckind != "op" or cval not in ("<", "<=", ">", ">=", "=", "!="):
            raise PctlSyntaxError(f"expected comparison after {val!r}, got {cval!r}", lex.pos)
        nkind, nval = lex.next()
        if nkind != "num" or "." in nval:
            raise PctlSyntaxError(f"expected integer constant, got {nval!r}", lex.pos)
        return Atom(feature=val, cmp=cval, constant=int(nval))
    raise PctlSyntaxError(f"expected formula, got {val!r}", lex.pos)


_CMP_FN = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def eval_state(phi: StateFormula, state: GenState, feature_names) -> bool:
    if isinstance(phi, TrueF):
        return True
    if isinstance(phi, FalseF):
        return False
    if isinstance(phi, Not):
        return not eval_state(phi.child, state, feature_names)
    if isinstance(phi, And):
        return eval_state(phi.left, state, feature_names) and eval_state(
            phi.right, state, feature_names
        )
    if isinstance(phi, Or):
        return eval_state(phi.left, state, feature_names) or eval_state(
            phi.right, state, feature_names
        )
    value = state.step if phi.feature == "step" else state.features[
        list(feature_names).index(phi.feature)
    ]
    return _CMP_FN[phi.cmp](value, phi.constant)


def negate(phi: StateFormula) -> StateFormula:
    return Not(phi)


def _reach_probability(dtmc: Dtmc, phi: StateFormula) -> tuple[float, int]:
    """P(F phi) by one backward pass over the step-stratified tree."""
    names = dtmc.feature_names
    children: dict[int, list[tuple[int, float]]] = {uid: [] for uid in dtmc.states}
    for (src, dst), p in dtmc.transitions.items():
        if src != dst:
            children[src].append((dst, p))

    pr: dict[int, float] = {}
    targets = 0
    for state in sorted(dtmc.states.values(), key=lambda s: -s.step):
        if eval_state(phi, state, names):
            pr[state.uid] = 1.0
            targets += 1
        elif not children[state.uid]:
            pr[state.uid] = 0.0
        else:
            # Kahan-compensated sum across children.
            total = 0.0
            comp = 0.0
            for dst, p in children[state.uid]:
                y = p * pr[dst] - comp
                t = total + y
                comp = (t - total) - y
                total = t
            pr[state.uid] = min(1.0, total)
    return pr[dtmc.initial_uid], targets


def _apply_bound(prob: float, q: PctlQuery, targets: int, t0: float) -> CheckResult:
    satisfied = None
    if q.mode == "bound":
        satisfied = _CMP_FN[q.bound_cmp](prob, q.bound_p)
    return CheckResult(
        probability=prob,
        satisfied=satisfied,
        target_state_count=targets,
        check_time_ms=(time.monotonic() - t0) * 1000.0,
    )


def check(dtmc: Dtmc, q: PctlQuery) -> CheckResult:
    """Exact model check; G is evaluated as 1 - P(F !phi)."""
    t0 = time.monotonic()
    violations = validate(dtmc)
    if violations:
        raise InvalidDtmcError("; ".join(violations))
    if q.path_op == "F":
        prob, targets = _reach_probability(dtmc, q.phi)
    else:
        reach, _ = _reach_probability(dtmc, negate(q.phi))
        prob = 1.0 - reach
        targets = sum(
            1 for s in dtmc.states.values() if eval_state(q.phi, s, dtmc.feature_names)
        )
    prob = min(1.0, max(0.0, prob))
    return _apply_bound(prob, q, targets, t0)


def brute_force_check(dtmc: Dtmc, q: PctlQuery) -> CheckResult:
    """Independent oracle: enumerate every root-to-terminal path literally."""
    if len(dtmc.states) > 200_000:
        raise ValueError("brute-force oracle limited to 200000 states")
    t0 = time.monotonic()
    names = dtmc.feature_names
    children: dict[int, list[tuple[int, float]]] = {uid: [] for uid in dtmc.states}
    for (src, dst), p in dtmc.transitions.items():
        if src != dst:
            children[src].append((dst, p))

    sat = {uid: eval_state(q.phi, s, names) for uid, s in dtmc.states.items()}
    total = 0.0
    stack = [(dtmc.initial_uid, 1.0, sat[dtmc.initial_uid], sat[dtmc.initial_uid])]
    while stack:
        uid, prob, any_sat, all_sat = stack.pop()
        if not children[uid]:
            hit = any_sat if q.path_op == "F" else all_sat
            if hit:
                total += prob
            continue
        for dst, p in children[uid]:
            stack.append((dst, prob * p, any_sat or sat[dst], all_sat and sat[dst]))
    targets = sum(1 for v in sat.values() if v)
    return _apply_bound(min(1.0, max(0.0, total)), q, targets, t0)
