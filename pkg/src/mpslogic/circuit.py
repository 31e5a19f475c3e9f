"""Circuit text format, SWAP routing, and execution against an MPS state.

The format is line-oriented: `bits n` first, then any mix of gate, pgate,
table2, insert, remove and sweep directives plus optional `input` / `output`
register declarations.  Indices are 1-based and always refer to the current
bit numbering at that point in the file; insert and remove renumber the bits
that follow them.  Two-bit gates may name any pair of bits; routing rewrites
long-range gates into SWAP chains so execution only ever touches neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gates import (
    DEFAULT_SVD,
    ONE_BIT_GATES,
    SWAP,
    TWO_BIT_GATES,
    OneBitGate,
    SvdConfig,
    TwoBitGate,
    apply_one_bit,
    apply_two_bit,
    recompress_sweeps,
)
from .state import BitAssignment, MpsState, init_state, insert_bit, remove_bit


@dataclass(frozen=True)
class OneBit:
    """One-bit gate on ``index``; ``name`` is set for built-ins, None for
    pgate lines."""

    index: int
    gate: OneBitGate
    name: str | None = None


@dataclass(frozen=True)
class TwoBit:
    """Two-bit gate with left operand at ``i`` and right operand at ``j``."""

    i: int
    j: int
    gate: TwoBitGate


@dataclass(frozen=True)
class Insert:
    """New bit fixed to ``value``, placed directly after bit ``position``
    (0 prepends)."""

    position: int
    value: int


@dataclass(frozen=True)
class Remove:
    index: int


@dataclass(frozen=True)
class Sweep:
    pass


CircuitOp = OneBit | TwoBit | Insert | Remove | Sweep


class ParseError(ValueError):
    """All diagnostics for a malformed circuit file, as (line, message)."""

    def __init__(self, diagnostics: list[tuple[int, str]]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(f"line {ln}: {msg}"
                                   for ln, msg in self.diagnostics))


@dataclass(frozen=True)
class Circuit:
    """Parsed circuit: declared width, input/output registers, op sequence.

    input_bits index into the numbering before any op runs; output_bits index
    into the numbering after the last op.
    """

    n_declared: int
    input_bits: tuple[int, ...] = ()
    output_bits: tuple[int, ...] = ()
    ops: tuple[CircuitOp, ...] = ()
    custom_gates: dict[str, TwoBitGate] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_declared < 1:
            raise ValueError("circuit needs at least one bit")
        if len(set(self.input_bits)) != len(self.input_bits):
            raise ValueError("duplicate input bits")
        if len(set(self.output_bits)) != len(self.output_bits):
            raise ValueError("duplicate output bits")

    @property
    def n_final(self) -> int:
        """Bit count after all inserts and removes."""
        width = self.n_declared
        for op in self.ops:
            if isinstance(op, Insert):
                width += 1
            elif isinstance(op, Remove):
                width -= 1
        return width

    def has_probabilistic_gates(self) -> bool:
        return any(isinstance(op, OneBit) and not op.gate.is_deterministic()
                   for op in self.ops)


def _parse_index(token: str, width: int, what: str = "bit") -> int:
    try:
        idx = int(token)
    except ValueError:
        raise ValueError(f"{what} index {token!r} is not an integer") from None
    if not 1 <= idx <= width:
        raise ValueError(f"{what} index {idx} out of range 1..{width}")
    return idx


def _parse_table2(args: list[str]) -> tuple[str, TwoBitGate]:
    if len(args) != 5:
        raise ValueError("table2 needs a name and 4 output pairs")
    name = args[0].upper()
    if name in ONE_BIT_GATES or name in TWO_BIT_GATES:
        raise ValueError(f"gate name {name} collides with a built-in")
    table = []
    for token in args[1:]:
        if len(token) != 2 or any(c not in "01" for c in token):
            raise ValueError(f"output pair {token!r} must be two bits")
        table.append((int(token[0]), int(token[1])))
    return name, TwoBitGate(name=name, table=tuple(table))


def parse_circuit(text: str) -> Circuit:
    """Parse the text format; raises ParseError carrying every diagnostic."""
    diagnostics: list[tuple[int, str]] = []
    lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((line_no, stripped.split()))

    if not lines or lines[0][1][0] != "bits":
        raise ParseError([(lines[0][0] if lines else 1,
                           "first directive must be 'bits <n>'")])
    first_no, first = lines[0]
    try:
        n_declared = int(first[1]) if len(first) == 2 else -1
    except ValueError:
        n_declared = -1
    if n_declared < 1:
        raise ParseError([(first_no, "'bits' needs one positive integer")])

    width = n_declared
    ops: list[CircuitOp] = []
    custom: dict[str, TwoBitGate] = {}
    input_bits: tuple[int, ...] | None = None
    output_tokens: tuple[int, list[str]] | None = None

    for line_no, tokens in lines[1:]:
        directive, args = tokens[0], tokens[1:]
        try:
            if directive == "bits":
                raise ValueError("'bits' may only appear once, first")
            elif directive == "input":
                if input_bits is not None:
                    raise ValueError("'input' may appear at most once")
                indices = [_parse_index(t, n_declared, "input") for t in args]
                if len(set(indices)) != len(indices):
                    raise ValueError("duplicate input bits")
                input_bits = tuple(indices)
            elif directive == "output":
                if output_tokens is not None:
                    raise ValueError("'output' may appear at most once")
                output_tokens = (line_no, args)
            elif directive == "gate":
                if not args:
                    raise ValueError("'gate' needs a gate name")
                name = args[0].upper()
                if name in ONE_BIT_GATES:
                    if len(args) != 2:
                        raise ValueError(f"{name} takes exactly one bit")
                    idx = _parse_index(args[1], width)
                    ops.append(OneBit(idx, ONE_BIT_GATES[name], name))
                elif name in TWO_BIT_GATES or name in custom:
                    if len(args) != 3:
                        raise ValueError(f"{name} takes exactly two bits")
                    i = _parse_index(args[1], width)
                    j = _parse_index(args[2], width)
                    if i == j:
                        raise ValueError("two-bit gate needs distinct bits")
                    gate = TWO_BIT_GATES.get(name) or custom[name]
                    ops.append(TwoBit(i, j, gate))
                else:
                    raise ValueError(f"unknown gate {name}")
            elif directive == "pgate":
                if len(args) != 3:
                    raise ValueError("'pgate' needs bit, p, q")
                idx = _parse_index(args[0], width)
                try:
                    p, q = float(args[1]), float(args[2])
                except ValueError:
                    raise ValueError("p and q must be decimals") from None
                if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
                    raise ValueError("p and q must lie in [0, 1]")
                ops.append(OneBit(idx, OneBitGate(p, q)))
            elif directive == "table2":
                name, gate = _parse_table2(args)
                if name in custom:
                    raise ValueError(f"gate {name} defined twice")
                custom[name] = gate
            elif directive == "insert":
                if len(args) != 2:
                    raise ValueError("'insert' needs position and value")
                try:
                    position, value = int(args[0]), int(args[1])
                except ValueError:
                    raise ValueError("position and value must be integers") \
                        from None
                if not 0 <= position <= width:
                    raise ValueError(
                        f"insert position {position} out of range 0..{width}")
                if value not in (0, 1):
                    raise ValueError("inserted value must be 0 or 1")
                ops.append(Insert(position, value))
                width += 1
            elif directive == "remove":
                if len(args) != 1:
                    raise ValueError("'remove' needs one bit index")
                if width < 2:
                    raise ValueError("cannot remove the last remaining bit")
                ops.append(Remove(_parse_index(args[0], width)))
                width -= 1
            elif directive == "sweep":
                if args:
                    raise ValueError("'sweep' takes no arguments")
                ops.append(Sweep())
            else:
                raise ValueError(f"unknown directive {directive!r}")
        except ValueError as exc:
            diagnostics.append((line_no, str(exc)))

    output_bits: tuple[int, ...] = ()
    if output_tokens is not None:
        line_no, args = output_tokens
        try:
            indices = [_parse_index(t, width, "output") for t in args]
            if len(set(indices)) != len(indices):
                raise ValueError("duplicate output bits")
            output_bits = tuple(indices)
        except ValueError as exc:
            diagnostics.append((line_no, str(exc)))

    if diagnostics:
        diagnostics.sort(key=lambda d: d[0])
        raise ParseError(diagnostics)
    return Circuit(n_declared=n_declared,
                   input_bits=input_bits or (),
                   output_bits=output_bits,
                   ops=tuple(ops),
                   custom_gates=custom)


def _route_two_bit(op: TwoBit) -> list[TwoBit]:
    i, j = op.i, op.j
    if abs(i - j) == 1:
        return [op]
    if i < j:
        chain = [TwoBit(k, k + 1, SWAP) for k in range(j - 1, i, -1)]
        core = TwoBit(i, i + 1, op.gate)
    else:
        chain = [TwoBit(k, k + 1, SWAP) for k in range(j, i - 1)]
        core = TwoBit(i, i - 1, op.gate)
    return chain + [core] + chain[::-1]


def route_nearest_neighbor(circuit: Circuit) -> Circuit:
    """Rewrite every long-range two-bit gate as SWAPs in, adjacent gate,
    SWAPs out; bit positions are restored afterwards so later indices and
    the output register are unaffected.  Idempotent."""
    ops: list[CircuitOp] = []
    for op in circuit.ops:
        if isinstance(op, TwoBit):
            ops.extend(_route_two_bit(op))
        else:
            ops.append(op)
    return Circuit(n_declared=circuit.n_declared,
                   input_bits=circuit.input_bits,
                   output_bits=circuit.output_bits,
                   ops=tuple(ops),
                   custom_gates=circuit.custom_gates)


def initial_state_for(circuit: Circuit,
                      fixed_inputs: BitAssignment | None = None,
                      log_steps: bool = False) -> MpsState:
    """Initial state under the circuit's conventions: input bits uniform
    unless pinned in ``fixed_inputs``, every other bit fixed to 0."""
    fixed_inputs = dict(fixed_inputs or {})
    input_set = set(circuit.input_bits)
    for index, value in fixed_inputs.items():
        if index not in input_set:
            raise ValueError(f"bit {index} is not an input bit")
        if value not in (0, 1):
            raise ValueError(f"pinned value for bit {index} must be 0 or 1")
    fixed = {b: 0 for b in range(1, circuit.n_declared + 1)
             if b not in input_set}
    fixed.update(fixed_inputs)
    state = init_state(circuit.n_declared, fixed)
    state.profile.log_steps = log_steps
    return state


def apply_op(state: MpsState, op: CircuitOp,
             cfg: SvdConfig = DEFAULT_SVD) -> MpsState:
    """Apply one already-routed op; two-bit gates must be on adjacent bits.

    A reversed adjacent pair is handled by flipping the gate's truth table,
    and each remove is followed by the mandatory recompression sweep.
    """
    if isinstance(op, OneBit):
        apply_one_bit(state, op.index, op.gate)
    elif isinstance(op, TwoBit):
        if op.i + 1 == op.j:
            apply_two_bit(state, op.i, op.gate, cfg)
        elif op.j + 1 == op.i:
            apply_two_bit(state, op.j, op.gate.flipped(), cfg)
        else:
            raise ValueError(f"gate ({op.i}, {op.j}) is not nearest-neighbor; "
                             "route the circuit first")
    elif isinstance(op, Insert):
        insert_bit(state, op.position, op.value)
    elif isinstance(op, Remove):
        remove_bit(state, op.index)
        recompress_sweeps(state, cfg)
    elif isinstance(op, Sweep):
        recompress_sweeps(state, cfg)
    else:
        raise TypeError(f"unhandled op {op!r}")
    return state


def execute(circuit: Circuit,
            fixed_inputs: BitAssignment | None = None,
            cfg: SvdConfig = DEFAULT_SVD,
            log_steps: bool = False) -> MpsState:
    """Run the circuit and return the final state.

    Routes long-range gates first, then applies every op in order via
    :func:`apply_op` starting from :func:`initial_state_for`.
    """
    routed = route_nearest_neighbor(circuit)
    state = initial_state_for(circuit, fixed_inputs, log_steps)
    if routed.ops:
        state.profile.record("init", state.bond_dims())
    for op in routed.ops:
        apply_op(state, op, cfg)
    return state


def format_circuit(circuit: Circuit) -> str:
    """Render back to the text format; parsing the result reproduces the
    circuit exactly."""
    out = [f"bits {circuit.n_declared}"]
    for gate in circuit.custom_gates.values():
        pairs = " ".join(f"{a}{b}" for a, b in gate.table)
        out.append(f"table2 {gate.name} {pairs}")
    if circuit.input_bits:
        out.append("input " + " ".join(map(str, circuit.input_bits)))
    for op in circuit.ops:
        if isinstance(op, OneBit):
            if op.name is not None:
                out.append(f"gate {op.name} {op.index}")
            else:
                out.append(f"pgate {op.index} {op.gate.p!r} {op.gate.q!r}")
        elif isinstance(op, TwoBit):
            out.append(f"gate {op.gate.name} {op.i} {op.j}")
        elif isinstance(op, Insert):
            out.append(f"insert {op.position} {op.value}")
        elif isinstance(op, Remove):
            out.append(f"remove {op.index}")
        elif isinstance(op, Sweep):
            out.append("sweep")
    if circuit.output_bits:
        out.append("output " + " ".join(map(str, circuit.output_bits)))
    return "\n".join(out) + "\n"
