"""PRISM-language export of built models, plus a restricted importer.

Guards use only `uid=<u>` (uid is bijective with states); features appear
in updates and properties.  The importer accepts exactly the subset this
exporter emits and exists for round-trip validation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dtmc import INNER, LEAF_TERMINAL, PLACEHOLDER_VALUE, REST_TERMINAL, Dtmc, GenState, validate
from .errors import InvalidDtmcError, UnsupportedConstructError
from .pctl import And, Atom, FalseF, Not, Or, PctlQuery, StateFormula, TrueF

MODULE_NAME = "llmgen"


@dataclass(frozen=True)
class PrismModel:
    text: str


def _fmt(p: float) -> str:
    return f"{p:.17g}"


def _var(name: str) -> str:
    # Prefix avoids collisions with PRISM keywords.
    return f"f_{name}"


def export_prism(dtmc: Dtmc, feature_names=None) -> PrismModel:
    violations = validate(dtmc)
    if violations:
        raise InvalidDtmcError("; ".join(violations))
    names = tuple(feature_names if feature_names is not None else dtmc.feature_names)

    max_uid = max(dtmc.states)
    max_step = max(s.step for s in dtmc.states.values())
    root = dtmc.states[dtmc.initial_uid]

    lines = ["dtmc", "", f"module {MODULE_NAME}", ""]
    lines.append(f"  uid : [0..{max_uid}] init {dtmc.initial_uid};")
    lines.append(f"  step : [0..{max_step}] init {root.step};")
    for i, name in enumerate(names):
        values = [s.features[i] for s in dtmc.states.values()]
        lines.append(
            f"  {_var(name)} : [{min(values)}..{max(values)}] init {root.features[i]};"
        )
    lines.append("")

    outgoing: dict[int, list[tuple[int, float]]] = {uid: [] for uid in dtmc.states}
    for (src, dst), p in dtmc.transitions.items():
        outgoing[src].append((dst, p))

    for uid, state in dtmc.states.items():
        edges = outgoing[uid]
        if len(edges) == 1 and edges[0][0] == uid:
            lines.append(f"  [] uid={uid} -> 1:(uid'={uid});")
            continue
        terms = []
        for dst, p in edges:
            target = dtmc.states[dst]
            assigns = [f"(uid'={dst})", f"(step'={target.step})"]
            assigns += [
                f"({_var(name)}'={target.features[i]})" for i, name in enumerate(names)
            ]
            terms.append(f"{_fmt(p)}:{'&'.join(assigns)}")
        lines.append(f"  [] uid={uid} -> {' + '.join(terms)};")

    lines += ["", "endmodule", ""]
    return PrismModel(text="\n".join(lines))


def _render_formula(phi: StateFormula) -> str:
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, FalseF):
        return "false"
    if isinstance(phi, Not):
        return f"!{_render_formula(phi.child)}"
    if isinstance(phi, And):
        return f"({_render_formula(phi.left)}&{_render_formula(phi.right)})"
    if isinstance(phi, Or):
        return f"({_render_formula(phi.left)}|{_render_formula(phi.right)})"
    name = phi.feature if phi.feature == "step" else _var(phi.feature)
    return f"({name}{phi.cmp}{phi.constant})"


def export_properties(queries: list[PctlQuery]) -> str:
    """One PRISM/Storm property per line."""
    lines = []
    for q in queries:
        body = f"{q.path_op} {_render_formula(q.phi)}"
        if q.mode == "query":
            lines.append(f"P=? [ {body} ];")
        else:
            cmp = q.bound_cmp
            lines.append(f"P{cmp}{q.bound_p:g} [ {body} ];")
    return "\n".join(lines) + ("\n" if lines else "")


_VAR_RE = re.compile(r"^(\w+) : \[(-?\d+)\.\.(-?\d+)\] init (-?\d+);$")
_CMD_RE = re.compile(r"^\[\] uid=(\d+) -> (.+);$")
_TERM_RE = re.compile(r"^([0-9.eE+-]+):(.+)$")
_ASSIGN_RE = re.compile(r"^\((\w+)'=(-?\d+)\)$")


def import_prism_subset(text: str, placeholder: int = PLACEHOLDER_VALUE) -> Dtmc:
    """Rebuild a Dtmc from a file produced by `export_prism`.

    Rest states are recognized by their all-placeholder feature vectors.
    """
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(n, ln) for n, ln in lines if ln]
    if not lines:
        raise UnsupportedConstructError("empty input", 0)
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise UnsupportedConstructError("unexpected end of file", lines[-1][0])
        item = lines[pos]
        pos += 1
        return item

    n, ln = take()
    if ln != "dtmc":
        raise UnsupportedConstructError(f"expected 'dtmc' header, got {ln!r}", n)
    n, ln = take()
    if ln != f"module {MODULE_NAME}":
        raise UnsupportedConstructError(f"expected module declaration, got {ln!r}", n)

    var_order: list[str] = []
    inits: dict[str, int] = {}
    while pos < len(lines) and _VAR_RE.match(lines[pos][1]):
        n, ln = take()
        m = _VAR_RE.match(ln)
        var_order.append(m.group(1))
        inits[m.group(1)] = int(m.group(4))
    if var_order[:2] != ["uid", "step"]:
        raise UnsupportedConstructError("expected uid and step variable declarations", lines[pos - 1][0] if pos else 0)
    feature_vars = var_order[2:]
    for fv in feature_vars:
        if not fv.startswith("f_"):
            raise UnsupportedConstructError(f"unexpected variable {fv!r}", 0)
    feature_names = tuple(fv[2:] for fv in feature_vars)

    transitions: dict[tuple[int, int], float] = {}
    valuations: dict[int, tuple[int, tuple[int, ...]]] = {}
    self_loops: set[int] = set()
    initial = inits["uid"]
    valuations[initial] = (inits["step"], tuple(inits[fv] for fv in feature_vars))

    while pos < len(lines):
        n, ln = take()
        if ln == "endmodule":
            break
        m = _CMD_RE.match(ln)
        if not m:
            raise UnsupportedConstructError(f"unsupported line {ln!r}", n)
        src = int(m.group(1))
        for term in m.group(2).split(" + "):
            tm = _TERM_RE.match(term.strip())
            if not tm:
                raise UnsupportedConstructError(f"unsupported update term {term!r}", n)
            prob = float(tm.group(1))
            assigns: dict[str, int] = {}
            for part in tm.group(2).split("&"):
                am = _ASSIGN_RE.match(part.strip())
                if not am:
                    raise UnsupportedConstructError(f"unsupported assignment {part!r}", n)
                assigns[am.group(1)] = int(am.group(2))
            dst = assigns["uid"]
            if set(assigns) == {"uid"} and dst == src:
                self_loops.add(src)
            else:
                if set(assigns) != set(var_order):
                    raise UnsupportedConstructError(
                        f"update must assign all variables, got {sorted(assigns)}", n
                    )
                valuations[dst] = (
                    assigns["step"],
                    tuple(assigns[fv] for fv in feature_vars),
                )
            transitions[(src, dst)] = prob
    else:
        raise UnsupportedConstructError("missing endmodule", lines[-1][0])

    states: dict[int, GenState] = {}
    for uid, (step, features) in sorted(valuations.items()):
        if uid in self_loops:
            if features and all(f == placeholder for f in features):
                kind = REST_TERMINAL
            else:
                kind = LEAF_TERMINAL
        else:
            kind = INNER
        states[uid] = GenState(uid, step, features, kind)
    for uid in self_loops:
        if uid not in states:
            raise UnsupportedConstructError(
                f"terminal uid {uid} never assigned a valuation", 0
            )
    return Dtmc(
        states=states,
        transitions=transitions,
        initial_uid=initial,
        feature_names=feature_names,
    )
