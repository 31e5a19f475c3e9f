"""Preimage search by bit fixing, and exact solution counting.

With all inputs uniform, the probability of observing the target output y is
N / 2^{n_in} where N counts the inputs mapped to y, so one circuit run counts
solutions exactly.  The search pins input bits one at a time: pin the next
bit to 0, re-run, and keep the 0 branch iff at least one solution remains
under the pinned prefix; otherwise the bit must be 1.  Thresholds are
compared in count space (N_k >= 0.5) because the true values are integers,
which makes the comparison immune to rounding noise in P(y).
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, execute, route_nearest_neighbor
from .gates import DEFAULT_SVD, SvdConfig
from .state import BitAssignment, evaluate_probability


class IntegralityViolation(RuntimeError):
    """P(y) * 2^{n_in} landed too far from an integer to trust the count."""


class BranchFailure(RuntimeError):
    """Both branches of a search step fell below threshold, or the finished
    witness failed its final check; indicates numerical corruption."""


@dataclass(frozen=True)
class SearchStep:
    """One bit-fixing step: pinned ``bit`` took ``value``; the surviving
    branch measured ``prob`` = P(y), i.e. ``remaining`` solutions against the
    exact probability threshold; ``retried`` marks a failed 0 branch."""

    bit: int
    value: int
    prob: float
    remaining: float
    threshold: float
    retried: bool


@dataclass(frozen=True)
class SearchOutcome:
    """witness is None exactly when the target is unsatisfiable; count is
    the exact number of solutions; executions counts full circuit runs."""

    witness: BitAssignment | None
    count: int
    trace: tuple[SearchStep, ...]
    executions: int

    @property
    def satisfiable(self) -> bool:
        return self.witness is not None


def _check_target(circuit: Circuit, target: BitAssignment) -> None:
    if set(target) != set(circuit.output_bits):
        raise ValueError(
            f"target must cover exactly the output bits {circuit.output_bits}")
    for index, value in target.items():
        if value not in (0, 1):
            raise ValueError(f"target value for bit {index} must be 0 or 1")


def _target_probability(circuit: Circuit, pinned: BitAssignment,
                        target: BitAssignment, cfg: SvdConfig) -> float:
    state = execute(circuit, pinned, cfg)
    return evaluate_probability(state, target)


def _to_count(prob: float, free_bits: int, cfg: SvdConfig) -> int:
    raw = prob * 2.0 ** free_bits
    count = round(raw)
    if not cfg.approximate and abs(raw - count) >= 0.25:
        raise IntegralityViolation(
            f"P(y)*2^{free_bits} = {raw!r} is not close to an integer")
    return max(int(count), 0)


def count_solutions(circuit: Circuit, target: BitAssignment,
                    cfg: SvdConfig = DEFAULT_SVD) -> int:
    """Exact number of input assignments the circuit maps to ``target``.

    One execution with all inputs uniform; the result is rounded to the
    nearest integer and the residual is asserted below 0.25 unless lossy
    truncation is active.
    """
    _check_target(circuit, target)
    prob = _target_probability(circuit, {}, target, cfg)
    return _to_count(prob, len(circuit.input_bits), cfg)


def search_preimage(circuit: Circuit, target: BitAssignment,
                    cfg: SvdConfig = DEFAULT_SVD) -> SearchOutcome:
    """Find the lexicographically smallest input mapped to ``target``.

    Runs the counting step first and returns an unsatisfiable outcome when
    no solution exists.  Each subsequent step pins one more input bit,
    preferring 0; a failed 0 branch is re-executed with 1 and the threshold
    is asserted there rather than inferred, so silent numerical trouble
    surfaces as BranchFailure.  Uses n_in + 1 executions when every 0 branch
    survives and at most 2 n_in + 1 overall.  The finished witness is
    verified on the last execution, where all inputs are pinned and a
    deterministic circuit must yield P(y) = 1.
    """
    _check_target(circuit, target)
    routed = route_nearest_neighbor(circuit)
    n_in = len(routed.input_bits)

    prob = _target_probability(routed, {}, target, cfg)
    executions = 1
    total = _to_count(prob, n_in, cfg)
    if total == 0:
        return SearchOutcome(witness=None, count=0, trace=(),
                             executions=executions)

    pinned: dict[int, int] = {}
    trace: list[SearchStep] = []
    final_prob = prob
    for k, bit in enumerate(routed.input_bits, start=1):
        free = n_in - k
        threshold = 2.0 ** (-free - 1)
        prob0 = _target_probability(routed, {**pinned, bit: 0}, target, cfg)
        executions += 1
        remaining0 = prob0 * 2.0 ** free
        if remaining0 >= 0.5:
            pinned[bit] = 0
            final_prob = prob0
            trace.append(SearchStep(bit, 0, prob0, remaining0, threshold,
                                    retried=False))
            continue
        prob1 = _target_probability(routed, {**pinned, bit: 1}, target, cfg)
        executions += 1
        remaining1 = prob1 * 2.0 ** free
        if remaining1 < 0.5:
            raise BranchFailure(
                f"both branches below threshold at bit {bit}: "
                f"N0={remaining0!r}, N1={remaining1!r}")
        pinned[bit] = 1
        final_prob = prob1
        trace.append(SearchStep(bit, 1, prob1, remaining1, threshold,
                                retried=True))

    if abs(final_prob - 1.0) > 1e-6:
        raise BranchFailure(
            f"witness failed final verification: P(y) = {final_prob!r}")
    return SearchOutcome(witness=pinned, count=total, trace=tuple(trace),
                         executions=executions)
