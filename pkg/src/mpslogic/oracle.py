"""Brute-force reference simulator over the full 2^n probability vector.

Everything here is deliberately independent of the MPS machinery: gates act
on a dense array (or on concrete bit lists for counting), long-range gates
are evaluated directly without routing, and no SVD is involved.  That makes
the module slow and memory-hungry but trustworthy, which is its entire job.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .circuit import Circuit, Insert, OneBit, Remove, Sweep, TwoBit
from .state import BitAssignment, check_assignment

HARD_CAP = 20


@dataclass(frozen=True)
class DenseDistribution:
    """Probability of every n-bit string; bit 1 is the most significant
    index bit."""

    probs: np.ndarray
    n: int

    def __post_init__(self) -> None:
        if self.probs.shape != (2 ** self.n,):
            raise ValueError(f"expected {2 ** self.n} entries")
        if np.any(self.probs < -1e-12):
            raise ValueError("negative probability in dense distribution")
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise ValueError("dense distribution is not normalized")

    def prob_of(self, constraint: BitAssignment) -> float:
        """Marginal probability of the constrained bits."""
        check_assignment(constraint, self.n)
        arr = self.probs.reshape((2,) * self.n)
        index = tuple(constraint.get(j, slice(None))
                      for j in range(1, self.n + 1))
        return float(np.sum(arr[index]))


def _initial_array(circuit: Circuit,
                   fixed_inputs: BitAssignment) -> np.ndarray:
    input_set = set(circuit.input_bits)
    arr = np.array(1.0)
    for bit in range(1, circuit.n_declared + 1):
        if bit in fixed_inputs:
            vec = [0.0, 0.0]
            vec[fixed_inputs[bit]] = 1.0
        elif bit in input_set:
            vec = [0.5, 0.5]
        else:
            vec = [1.0, 0.0]
        arr = np.multiply.outer(arr, np.array(vec))
    return arr


def _axis_index(n: int, fixed_axes: dict[int, int]) -> tuple:
    index: list = [slice(None)] * n
    for axis, value in fixed_axes.items():
        index[axis] = value
    return tuple(index)


def oracle_execute(circuit: Circuit,
                   fixed_inputs: BitAssignment | None = None) -> DenseDistribution:
    """Propagate the dense distribution through the circuit.

    Uses the same input/ancilla conventions as circuit.execute but applies
    long-range two-bit gates directly on the array, so the result does not
    depend on routing.  Hard-capped at 20 bits.
    """
    fixed_inputs = dict(fixed_inputs or {})
    input_set = set(circuit.input_bits)
    for index, value in fixed_inputs.items():
        if index not in input_set:
            raise ValueError(f"bit {index} is not an input bit")
        if value not in (0, 1):
            raise ValueError(f"pinned value for bit {index} must be 0 or 1")
    if circuit.n_declared > HARD_CAP:
        raise ValueError(f"oracle capped at {HARD_CAP} bits")

    arr = _initial_array(circuit, fixed_inputs)
    for op in circuit.ops:
        n = arr.ndim
        if isinstance(op, OneBit):
            axis = op.index - 1
            arr = np.moveaxis(
                np.tensordot(op.gate.transfer(), arr, axes=([1], [axis])),
                0, axis)
        elif isinstance(op, TwoBit):
            ai, aj = op.i - 1, op.j - 1
            new = np.zeros_like(arr)
            for a, b in product((0, 1), repeat=2):
                out_a, out_b = op.gate.outputs(a, b)
                new[_axis_index(n, {ai: out_a, aj: out_b})] += \
                    arr[_axis_index(n, {ai: a, aj: b})]
            arr = new
        elif isinstance(op, Insert):
            if n + 1 > HARD_CAP:
                raise ValueError(f"oracle capped at {HARD_CAP} bits")
            new = np.zeros((2,) * (n + 1))
            new[_axis_index(n + 1, {op.position: op.value})] = arr
            arr = new
        elif isinstance(op, Remove):
            arr = arr.sum(axis=op.index - 1)
        elif isinstance(op, Sweep):
            pass
        else:
            raise AssertionError(f"unhandled op {op!r}")
    return DenseDistribution(probs=arr.reshape(-1), n=arr.ndim)


def evaluate_assignment(circuit: Circuit,
                        inputs: BitAssignment) -> list[int]:
    """Final bit values for one concrete input assignment.

    Only defined for circuits whose gates are all deterministic; raises
    ValueError otherwise.
    """
    if circuit.has_probabilistic_gates():
        raise ValueError("circuit contains probabilistic gates")
    input_set = set(circuit.input_bits)
    for index in inputs:
        if index not in input_set:
            raise ValueError(f"bit {index} is not an input bit")
    missing = input_set - set(inputs)
    if missing:
        raise ValueError(f"input bits {sorted(missing)} left unassigned")

    bits = [0] * circuit.n_declared
    for index, value in inputs.items():
        bits[index - 1] = value
    for op in circuit.ops:
        if isinstance(op, OneBit):
            bits[op.index - 1] = op.gate.apply_to_value(bits[op.index - 1])
        elif isinstance(op, TwoBit):
            a, b = bits[op.i - 1], bits[op.j - 1]
            bits[op.i - 1], bits[op.j - 1] = op.gate.outputs(a, b)
        elif isinstance(op, Insert):
            bits.insert(op.position, op.value)
        elif isinstance(op, Remove):
            del bits[op.index - 1]
        elif isinstance(op, Sweep):
            pass
        else:
            raise AssertionError(f"unhandled op {op!r}")
    return bits


def oracle_count(circuit: Circuit, target: BitAssignment) -> int:
    """Count input assignments whose final output bits match ``target``
    by exhaustive deterministic evaluation."""
    check_assignment(target, circuit.n_final)
    n_in = len(circuit.input_bits)
    if n_in > HARD_CAP:
        raise ValueError(f"oracle capped at {HARD_CAP} input bits")
    count = 0
    for values in product((0, 1), repeat=n_in):
        assignment = dict(zip(circuit.input_bits, values))
        bits = evaluate_assignment(circuit, assignment)
        if all(bits[j - 1] == v for j, v in target.items()):
            count += 1
    return count
