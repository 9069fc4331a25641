"""Deterministic and probabilistic classical computing over bit registers.

Circuits are expression trees over OR, AND, NOT and input taps; probabilistic
machines are row-stochastic tables mapping each input word to a distribution
over output words.  The induced measure of an output event is shown to behave
like ordinary probability, and ``check_kolmogorov`` probes that numerically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import (
    ArityMismatch,
    GroundMismatch,
    ParseError,
    SizeCapExceeded,
    UnknownInput,
    ValidationFailure,
)

# truth tables of the generating gates, written out rather than derived
_NOT = {(0,): 1, (1,): 0}
_OR = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1}
_AND = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1}
_GATES = {"not": _NOT, "or": _OR, "and": _AND}


def eval_gate(name: str, args: Sequence[int]) -> int:
    """Evaluate one generating gate by table lookup."""
    try:
        table = _GATES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; expected or/and/not")
    key = tuple(int(a) for a in args)
    if any(b not in (0, 1) for b in key):
        raise ValueError(f"arguments must be bits, got {args!r}")
    if key not in table:
        raise ArityMismatch(f"gate {name!r} takes {len(next(iter(table)))} arguments")
    return table[key]


@dataclass(frozen=True)
class Var:
    """Tap on input wire ``index``."""
    index: int


@dataclass(frozen=True)
class Not:
    child: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


Expr = Union[Var, Not, Or, And]


@dataclass(frozen=True)
class BoolCircuit:
    """An expression tree computing one output bit from ``arity`` inputs."""

    arity: int
    root: Expr

    def __post_init__(self):
        if self.arity < 0:
            raise ArityMismatch(f"arity must be >= 0, got {self.arity}")
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                if not 0 <= node.index < self.arity:
                    raise ArityMismatch(
                        f"input x{node.index} out of range for arity {self.arity}")
            elif isinstance(node, Not):
                stack.append(node.child)
            elif isinstance(node, (Or, And)):
                stack.extend((node.left, node.right))
            else:
                raise ValidationFailure("circuit-node", 0.0, f"bad node {node!r}")


def eval_circuit(circuit: BoolCircuit, bits: str) -> int:
    """Evaluate on an input bitstring; character j is input wire j."""
    if len(bits) != circuit.arity:
        raise ArityMismatch(
            f"input length {len(bits)} vs arity {circuit.arity}")
    if any(c not in "01" for c in bits):
        raise ValueError(f"input must be a bitstring, got {bits!r}")

    def go(node: Expr) -> int:
        if isinstance(node, Var):
            return int(bits[node.index])
        if isinstance(node, Not):
            return eval_gate("not", (go(node.child),))
        if isinstance(node, Or):
            return eval_gate("or", (go(node.left), go(node.right)))
        return eval_gate("and", (go(node.left), go(node.right)))

    return go(circuit.root)


def all_inputs(arity: int) -> list[str]:
    """All bitstrings of the given length in ascending order."""
    return [format(i, f"0{arity}b") if arity else "" for i in range(2 ** arity)]


def equal_functions(
    f: BoolCircuit, g: BoolCircuit, *, max_arity: int = 20
) -> tuple[bool, str | None]:
    """Exhaustive function equality; returns the first differing input if any.

    Inputs are scanned in ascending bitstring order, so the witness is
    deterministic.  Arities beyond ``max_arity`` are refused rather than
    silently spinning through 2**N evaluations.
    """
    if f.arity != g.arity:
        raise ArityMismatch(f"arity {f.arity} vs {g.arity}")
    if f.arity > max_arity:
        raise SizeCapExceeded(f"arity {f.arity} exceeds cap {max_arity}")
    for x in all_inputs(f.arity):
        if eval_circuit(f, x) != eval_circuit(g, x):
            return False, x
    return True, None


# ---------------------------------------------------------------------------
# s-expression syntax: (or (not x0) (and x0 x1))

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_circuit(text: str, arity: int | None = None) -> BoolCircuit:
    """Parse an s-expression circuit; arity is inferred when not given."""
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise ParseError("empty circuit text")
    pos = 0

    def expr() -> Expr:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise ParseError("unexpected end of input after '('")
            head = tokens[pos]
            pos += 1
            if head == "not":
                node: Expr = Not(expr())
            elif head == "or":
                node = Or(expr(), expr())
            elif head == "and":
                node = And(expr(), expr())
            else:
                raise ParseError(f"unknown operator {head!r}")
            if pos >= len(tokens) or tokens[pos] != ")":
                raise ParseError(f"missing ')' after {head}")
            pos += 1
            return node
        if tok == ")":
            raise ParseError("unexpected ')'")
        m = re.fullmatch(r"x(\d+)", tok)
        if not m:
            raise ParseError(f"bad atom {tok!r}; inputs look like x0, x1, ...")
        return Var(int(m.group(1)))

    root = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens: {' '.join(tokens[pos:])}")
    if arity is None:
        arity = 0
        stack = [root]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                arity = max(arity, node.index + 1)
            elif isinstance(node, Not):
                stack.append(node.child)
            elif isinstance(node, (Or, And)):
                stack.extend((node.left, node.right))
    return BoolCircuit(arity, root)


def circuit_to_text(circuit: BoolCircuit) -> str:
    """Inverse of :func:`parse_circuit`."""

    def go(node: Expr) -> str:
        if isinstance(node, Var):
            return f"x{node.index}"
        if isinstance(node, Not):
            return f"(not {go(node.child)})"
        if isinstance(node, Or):
            return f"(or {go(node.left)} {go(node.right)})"
        return f"(and {go(node.left)} {go(node.right)})"

    return go(circuit.root)


# ---------------------------------------------------------------------------
# probabilistic machines


@dataclass(frozen=True)
class StochasticOutput:
    """Row-stochastic table: each input word gets a distribution on outputs.

    ``table[x][k]`` is the probability of output word k (as an integer index
    into the ascending enumeration of bitstrings of length ``output_bits``).
    Rows must be complete, non-negative, and sum to one within ``tolerance``.
    """

    input_bits: int
    output_bits: int
    table: Mapping[str, tuple[float, ...]]
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.input_bits < 0 or self.output_bits < 0:
            raise ValidationFailure("register-size", 0.0, "negative width")
        rows = {}
        expected = set(all_inputs(self.input_bits))
        width = 2 ** self.output_bits
        for x, row in dict(self.table).items():
            if x not in expected:
                raise UnknownInput(f"row key {x!r} is not a {self.input_bits}-bit word")
            vec = tuple(float(v) for v in row)
            if len(vec) != width:
                raise ValidationFailure(
                    "row-length", abs(len(vec) - width),
                    f"row {x!r} has {len(vec)} entries, needs {width}")
            neg = min(vec)
            if neg < 0:
                raise ValidationFailure("nonnegative", -neg, f"row {x!r}")
            gap = abs(sum(vec) - 1.0)
            if gap > self.tolerance:
                raise ValidationFailure("row-sum", gap, f"row {x!r}")
            rows[x] = vec
        missing = expected - rows.keys()
        if missing:
            raise ValidationFailure(
                "row-complete", len(missing), f"missing rows, e.g. {sorted(missing)[0]!r}")
        object.__setattr__(self, "table", rows)


def from_circuits(circuits: Sequence[BoolCircuit]) -> StochasticOutput:
    """Deterministic machine computing each circuit as one output bit.

    All circuits must share an arity; output bit j (leftmost = j = 0) is
    circuit j, so every row is a point mass.
    """
    if not circuits:
        raise ArityMismatch("need at least one circuit")
    arity = circuits[0].arity
    for c in circuits:
        if c.arity != arity:
            raise ArityMismatch(f"arity {c.arity} vs {arity}")
    n = len(circuits)
    table = {}
    for x in all_inputs(arity):
        word = "".join(str(eval_circuit(c, x)) for c in circuits)
        row = [0.0] * (2 ** n)
        row[int(word, 2)] = 1.0
        table[x] = tuple(row)
    return StochasticOutput(arity, n, table)


@dataclass(frozen=True)
class EventSubset:
    """A subset of output words over a ground set of fixed width."""

    ground_bits: int
    members: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        for y in self.members:
            if len(y) != self.ground_bits or any(c not in "01" for c in y):
                raise ValidationFailure(
                    "event-member", 0.0,
                    f"{y!r} is not a {self.ground_bits}-bit word")

    def complement(self) -> "EventSubset":
        ground = set(all_inputs(self.ground_bits))
        return EventSubset(self.ground_bits, frozenset(ground - self.members))


def induced_measure(machine: StochasticOutput, x: str, event: EventSubset) -> float:
    """Probability the machine's output on x lands in the event set."""
    if event.ground_bits != machine.output_bits:
        raise GroundMismatch(
            f"event over {event.ground_bits}-bit words, outputs are "
            f"{machine.output_bits}-bit")
    if x not in machine.table:
        raise UnknownInput(f"no row for input {x!r}")
    row = machine.table[x]
    # fixed ascending summation order keeps repeat calls bit-identical
    return float(sum(row[int(y, 2)] for y in sorted(event.members)))


@dataclass(frozen=True)
class KolmogorovReport:
    trials: int
    max_complement_gap: float
    max_additivity_gap: float
    max_monotonicity_gap: float

    @property
    def max_gap(self) -> float:
        return max(self.max_complement_gap, self.max_additivity_gap,
                   self.max_monotonicity_gap)


def check_kolmogorov(
    machine: StochasticOutput, x: str, *, trials: int = 200, seed: int = 0
) -> KolmogorovReport:
    """Numerically probe measure axioms for the machine's output on x.

    Random events A (and disjoint pairs A, B) are drawn with a seeded
    generator; the report carries the worst deviations seen for
    complementation, finite additivity on disjoint pairs, and monotonicity
    under inclusion.  Valid tables land within accumulation rounding.
    """
    if x not in machine.table:
        raise UnknownInput(f"no row for input {x!r}")
    rng = np.random.default_rng(seed)
    ground = all_inputs(machine.output_bits)
    comp_gap = add_gap = mono_gap = 0.0
    for _ in range(trials):
        colors = rng.integers(0, 3, size=len(ground))
        a = EventSubset(machine.output_bits,
                        frozenset(y for y, c in zip(ground, colors) if c == 0))
        b = EventSubset(machine.output_bits,
                        frozenset(y for y, c in zip(ground, colors) if c == 1))
        mu_a = induced_measure(machine, x, a)
        mu_b = induced_measure(machine, x, b)
        comp_gap = max(comp_gap,
                       abs(induced_measure(machine, x, a.complement()) - (1.0 - mu_a)))
        union = EventSubset(machine.output_bits, a.members | b.members)
        add_gap = max(add_gap, abs(induced_measure(machine, x, union) - mu_a - mu_b))
        mono_gap = max(mono_gap, max(0.0, mu_a - induced_measure(machine, x, union)))
    return KolmogorovReport(trials, comp_gap, add_gap, mono_gap)


def sample_output(machine: StochasticOutput, x: str, *, rng: np.random.Generator) -> str:
    """Draw one output word according to the machine's row for x."""
    if x not in machine.table:
        raise UnknownInput(f"no row for input {x!r}")
    row = np.array(machine.table[x])
    k = int(rng.choice(len(row), p=row / row.sum()))
    return format(k, f"0{machine.output_bits}b") if machine.output_bits else ""


def machine_to_json(machine: StochasticOutput) -> dict:
    """Serialize as ``{"M": in_bits, "N": out_bits, "rows": {...}}``."""
    return {
        "M": machine.input_bits,
        "N": machine.output_bits,
        "rows": {x: list(row) for x, row in sorted(machine.table.items())},
    }


def machine_from_json(obj: dict) -> StochasticOutput:
    """Inverse of :func:`machine_to_json`; constructor revalidates."""
    try:
        return StochasticOutput(int(obj["M"]), int(obj["N"]), dict(obj["rows"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad stochastic table payload: {exc}")
