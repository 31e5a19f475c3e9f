"""Probabilistic one-bit gates, deterministic two-bit gates, and recompression.

A one-bit gate mixes a site's two matrices through a 2x2 stochastic transfer
matrix.  A two-bit gate is applied by assembling a block matrix over the two
neighbouring sites from the gate's 0/1 transfer function and factoring it
back into two sites with an SVD; the shared dimension after the split is the
numerical rank of the block matrix.  Both constructions preserve the overall
normalization exactly because each transfer column sums to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import heights
from .state import CorruptStateError, MpsState, SiteMatrices


@dataclass(frozen=True)
class OneBitGate:
    """Stochastic single-bit gate: 0 stays 0 with probability p, 1 stays 1
    with probability q."""

    p: float
    q: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError("gate probabilities must lie in [0, 1]")

    def transfer(self) -> np.ndarray:
        """2x2 transfer matrix t[out, in]; each column sums to one."""
        return np.array([[self.p, 1.0 - self.q],
                         [1.0 - self.p, self.q]])

    def is_deterministic(self) -> bool:
        return self.p in (0.0, 1.0) and self.q in (0.0, 1.0)

    def apply_to_value(self, value: int) -> int:
        """Deterministic output for a definite input; gate must be 0/1-valued."""
        if not self.is_deterministic():
            raise ValueError("gate is probabilistic")
        return int(self.q) if value else int(self.p == 0.0)


@dataclass(frozen=True)
class TwoBitGate:
    """Deterministic two-bit gate given by output truth tables.

    ``table[2a + b]`` holds the output pair (A(a, b), B(a, b)) where a is the
    left bit and b the right bit.  The induced transfer function has exactly
    one 1 per input column, so normalization is preserved automatically.
    """

    name: str
    table: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.table) != 4:
            raise ValueError("truth table needs exactly 4 entries")
        for entry in self.table:
            if len(entry) != 2 or any(v not in (0, 1) for v in entry):
                raise ValueError(f"bad truth table entry {entry}")

    def outputs(self, a: int, b: int) -> tuple[int, int]:
        return self.table[2 * a + b]

    def logic_a(self, a: int, b: int) -> int:
        return self.table[2 * a + b][0]

    def logic_b(self, a: int, b: int) -> int:
        return self.table[2 * a + b][1]

    def flipped(self) -> "TwoBitGate":
        """Same gate with its two operands exchanged."""
        table = tuple(self.table[2 * b + a][::-1]
                      for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)))
        return TwoBitGate(name=f"{self.name}_R", table=table)


NOT = OneBitGate(p=0.0, q=0.0)
RAND = OneBitGate(p=0.5, q=0.5)
RST = OneBitGate(p=1.0, q=0.0)
SET = OneBitGate(p=0.0, q=1.0)

ONE_BIT_GATES: dict[str, OneBitGate] = {
    "NOT": NOT, "RAND": RAND, "RST": RST, "SET": SET,
}


def _table(fn_a, fn_b) -> tuple[tuple[int, int], ...]:
    return tuple((fn_a(a, b), fn_b(a, b))
                 for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)))


ID = TwoBitGate("ID", _table(lambda a, b: a, lambda a, b: b))
SWAP = TwoBitGate("SWAP", _table(lambda a, b: b, lambda a, b: a))
CNAND = TwoBitGate("CNAND", _table(lambda a, b: a, lambda a, b: 1 - (a & b)))
CAND = TwoBitGate("CAND", _table(lambda a, b: a, lambda a, b: a & b))
COR = TwoBitGate("COR", _table(lambda a, b: a, lambda a, b: a | b))
CXOR = TwoBitGate("CXOR", _table(lambda a, b: a, lambda a, b: a ^ b))
CNOR = TwoBitGate("CNOR", _table(lambda a, b: a, lambda a, b: 1 - (a | b)))

TWO_BIT_GATES: dict[str, TwoBitGate] = {
    g.name: g for g in (ID, SWAP, CNAND, CAND, COR, CXOR, CNOR)
}


@dataclass(frozen=True)
class SvdConfig:
    """Controls the SVD split after two-bit gates.

    rank_tol: relative singular-value cutoff defining the numerical rank.
    trunc_max_rank: optional lossy cap on the kept rank; when set, results
        are approximate and exactness checks downstream are skipped.
    """

    rank_tol: float = 1e-12
    trunc_max_rank: int | None = None

    def __post_init__(self) -> None:
        if self.rank_tol < 0:
            raise ValueError("rank_tol must be nonnegative")
        if self.trunc_max_rank is not None and self.trunc_max_rank < 1:
            raise ValueError("trunc_max_rank must be positive")

    @property
    def approximate(self) -> bool:
        return self.trunc_max_rank is not None


DEFAULT_SVD = SvdConfig()


def apply_one_bit(state: MpsState, index: int, gate: OneBitGate) -> MpsState:
    """Mix the matrices of bit ``index`` through the gate's transfer matrix.

    Bond dimensions, tracked heights and the gate counter are unchanged.
    Mutates and returns ``state``.
    """
    if not 1 <= index <= state.n:
        raise IndexError(f"bit index {index} out of range 1..{state.n}")
    t = gate.transfer()
    site = state.sites[index - 1]
    state.sites[index - 1] = SiteMatrices(
        t[0, 0] * site.m0 + t[0, 1] * site.m1,
        t[1, 0] * site.m0 + t[1, 1] * site.m1,
    )
    state.profile.record(f"pgate {index} {gate.p} {gate.q}", state.bond_dims())
    return state


def assemble_gate_blocks(left: SiteMatrices, right: SiteMatrices,
                         gate: TwoBitGate) -> np.ndarray:
    """Build the 2*D_left x 2*D_right block matrix for a two-bit gate.

    Block (a', b') accumulates left.mat(a) @ right.mat(b) over every input
    pair (a, b) the gate maps to (a', b'); row blocks are indexed by the new
    left bit value, column blocks by the new right bit value.
    """
    if left.shape[1] != right.shape[0]:
        raise CorruptStateError(
            f"sites do not share a bond: {left.shape} next to {right.shape}")
    d_left, d_right = left.shape[0], right.shape[1]
    blocks = [[np.zeros((d_left, d_right)) for _ in range(2)] for _ in range(2)]
    for a, b in product((0, 1), repeat=2):
        out_a, out_b = gate.outputs(a, b)
        blocks[out_a][out_b] = blocks[out_a][out_b] + left.mat(a) @ right.mat(b)
    return np.block(blocks)


def svd_split(blocks: np.ndarray,
              cfg: SvdConfig = DEFAULT_SVD) -> tuple[SiteMatrices, SiteMatrices]:
    """Factor an assembled block matrix back into two sites via SVD.

    Keeps the singular values above ``rank_tol`` relative to the largest one
    (at least one, capped at ``trunc_max_rank`` when set) and splits each
    sqrt(sigma) symmetrically into the two factors, so without a lossy cap
    the product of the factors reconstructs ``blocks`` to the cutoff.
    """
    blocks = np.asarray(blocks, dtype=float)
    if blocks.ndim != 2 or blocks.shape[0] % 2 or blocks.shape[1] % 2:
        raise ValueError(f"block matrix has invalid shape {blocks.shape}")
    u, s, vt = np.linalg.svd(blocks, full_matrices=False)
    s_max = s[0] if s.size else 0.0
    if s_max <= 0.0:
        raise CorruptStateError(
            "gate produced an identically zero block matrix")
    rank = max(int(np.count_nonzero(s > cfg.rank_tol * s_max)), 1)
    if cfg.trunc_max_rank is not None:
        rank = min(rank, cfg.trunc_max_rank)
    scale = np.sqrt(s[:rank])
    left_factor = u[:, :rank] * scale
    right_factor = vt[:rank, :] * scale[:, None]
    d_left = blocks.shape[0] // 2
    d_right = blocks.shape[1] // 2
    return (SiteMatrices(left_factor[:d_left], left_factor[d_left:]),
            SiteMatrices(right_factor[:, :d_right], right_factor[:, d_right:]))


def _replace_pair(state: MpsState, left_index: int, gate: TwoBitGate,
                  cfg: SvdConfig) -> None:
    pos = left_index - 1
    blocks = assemble_gate_blocks(state.sites[pos], state.sites[pos + 1], gate)
    new_left, new_right = svd_split(blocks, cfg)
    state.sites[pos] = new_left
    state.sites[pos + 1] = new_right


def apply_two_bit(state: MpsState, left_index: int, gate: TwoBitGate,
                  cfg: SvdConfig = DEFAULT_SVD) -> MpsState:
    """Apply a deterministic gate to bits (left_index, left_index + 1).

    Assembles the block matrix, splits it with the SVD, counts the gate and
    updates the tracked height at the cut between the two bits by the
    worst-case min-plus-one rule.  Mutates and returns ``state``.
    """
    if not 1 <= left_index <= state.n - 1:
        raise IndexError(
            f"left index {left_index} out of range 1..{state.n - 1}")
    _replace_pair(state, left_index, gate, cfg)
    heights.update_on_gate(state.profile, left_index)
    state.profile.record(f"gate {gate.name} {left_index} {left_index + 1}",
                         state.bond_dims())
    return state


def recompress_sweeps(state: MpsState,
                      cfg: SvdConfig = DEFAULT_SVD) -> MpsState:
    """Run identity gates left-to-right then back to recompress the chain.

    The double sweep cannot increase any bond dimension and repairs the
    height faults left by bit removal: afterwards the tracked heights are
    recomputed from the actual dimensions and satisfy the height difference
    constraint again.  All 2(n-1) identity gates count toward the gate
    counter.  Mutates and returns ``state``.
    """
    n = state.n
    if n >= 2:
        for i in range(1, n):
            _replace_pair(state, i, ID, cfg)
        for i in range(n - 1, 0, -1):
            _replace_pair(state, i, ID, cfg)
        state.profile.gate_count += 2 * (n - 1)
    heights.recompute_from_dims(state.profile, state.bond_dims())
    state.profile.record("sweep", state.bond_dims())
    return state
