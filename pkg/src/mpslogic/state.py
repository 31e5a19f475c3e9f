"""Matrix-product representation of the probability distribution over n bits.

The distribution is stored as a chain of per-bit matrix pairs: the
probability of a bit string is the product of one matrix per bit, selected by
that bit's value, contracted left to right.  The first and last matrices are
a row and a column vector, so the contraction collapses to a scalar without
any trace.  Individual matrix entries may be negative; only the contracted
values are probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .heights import HeightProfile


class CorruptStateError(RuntimeError):
    """The site matrices no longer form a consistent chain."""


# A bit assignment is a plain dict from 1-based bit index to 0 or 1.
BitAssignment = dict


@dataclass
class SiteMatrices:
    """Pair of real matrices (one per bit value) for a single site."""

    m0: np.ndarray
    m1: np.ndarray

    def __post_init__(self) -> None:
        self.m0 = np.asarray(self.m0, dtype=float)
        self.m1 = np.asarray(self.m1, dtype=float)
        if self.m0.ndim != 2 or self.m1.ndim != 2:
            raise ValueError("site matrices must be two-dimensional")
        if self.m0.shape != self.m1.shape:
            raise ValueError(
                f"site matrices differ in shape: {self.m0.shape} vs {self.m1.shape}")
        if not (np.isfinite(self.m0).all() and np.isfinite(self.m1).all()):
            raise ValueError("site matrices must be finite")

    def mat(self, value: int) -> np.ndarray:
        return self.m1 if value else self.m0

    def summed(self) -> np.ndarray:
        """Matrix left after summing the bit out, m0 + m1."""
        return self.m0 + self.m1

    @property
    def shape(self) -> tuple[int, int]:
        return self.m0.shape

    def copy(self) -> "SiteMatrices":
        return SiteMatrices(self.m0.copy(), self.m1.copy())


class MpsState:
    """Chain of site matrices plus tracked worst-case heights.

    Attributes:
        sites: one :class:`SiteMatrices` per bit, left to right.
        profile: the :class:`HeightProfile` carrying tracked heights, the
            two-bit gate counter and optional per-step logging.
    """

    def __init__(self, sites: list[SiteMatrices],
                 profile: HeightProfile | None = None):
        if not sites:
            raise ValueError("a state needs at least one bit")
        self.sites = list(sites)
        self.profile = profile if profile is not None else HeightProfile(
            heights=[0] * (len(sites) + 1))
        self._validate()

    def _validate(self) -> None:
        if self.sites[0].shape[0] != 1 or self.sites[-1].shape[1] != 1:
            raise CorruptStateError("boundary bonds must have dimension 1")
        for left, right in zip(self.sites, self.sites[1:]):
            if left.shape[1] != right.shape[0]:
                raise CorruptStateError(
                    f"interior bond mismatch: {left.shape} next to {right.shape}")
        if len(self.profile.heights) != self.n + 1:
            raise CorruptStateError("height profile length does not match chain")

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def tracked_heights(self) -> list[int]:
        return self.profile.heights

    @property
    def gate_count(self) -> int:
        return self.profile.gate_count

    def bond_dims(self) -> list[int]:
        """Actual bond dimensions D_0..D_n (boundaries included)."""
        return [self.sites[0].shape[0]] + [s.shape[1] for s in self.sites]

    def max_bond_dim(self) -> int:
        return max(self.bond_dims())

    def copy(self) -> "MpsState":
        return MpsState([s.copy() for s in self.sites], self.profile.copy())


def check_assignment(assignment: BitAssignment, n: int) -> None:
    """Validate a bit assignment against an n-bit chain."""
    for index, value in assignment.items():
        if not isinstance(index, int) or not 1 <= index <= n:
            raise IndexError(f"bit index {index} out of range 1..{n}")
        if value not in (0, 1):
            raise ValueError(f"bit value for index {index} must be 0 or 1")


def init_state(n: int, fixed: BitAssignment | None = None) -> MpsState:
    """Product state with every unfixed bit uniform and fixed bits pinned.

    Each unfixed bit carries the 1x1 pair (1/2, 1/2); a bit fixed to v
    carries 1 for value v and 0 for the other value, so the represented
    distribution is the corresponding product distribution.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    fixed = fixed or {}
    check_assignment(fixed, n)
    sites = []
    for j in range(1, n + 1):
        if j in fixed:
            v = fixed[j]
            m0 = np.array([[1.0 - v]])
            m1 = np.array([[float(v)]])
        else:
            m0 = np.array([[0.5]])
            m1 = np.array([[0.5]])
        sites.append(SiteMatrices(m0, m1))
    return MpsState(sites)


def evaluate_probability(state: MpsState, constraint: BitAssignment) -> float:
    """Marginal probability that the constrained bits take the given values.

    Contracts the chain strictly left to right as a row vector times the next
    matrix, using m0 + m1 at unconstrained sites, so the cost is O(n D^2).
    An empty constraint returns the normalization, which is 1 for any state
    produced by the library's operations.
    """
    check_assignment(constraint, state.n)
    row: np.ndarray | None = None
    for j, site in enumerate(state.sites, start=1):
        mat = site.mat(constraint[j]) if j in constraint else site.summed()
        try:
            row = mat if row is None else row @ mat
        except ValueError as exc:
            raise CorruptStateError(str(exc)) from exc
    assert row is not None
    if row.shape != (1, 1):
        raise CorruptStateError(f"contraction ended with shape {row.shape}")
    return float(row[0, 0])


def full_distribution(state: MpsState) -> np.ndarray:
    """All 2^n probabilities, indexed with bit 1 as the most significant bit.

    Equivalent to calling :func:`evaluate_probability` with every complete
    constraint, but expands the chain once instead of 2^n times.  Intended
    for validation at small n; the array has 2^n entries.
    """
    vec = np.ones((1, 1))
    for site in state.sites:
        stacked = np.stack([site.m0, site.m1])          # (2, D_l, D_r)
        vec = np.einsum("pl,xlr->pxr", vec, stacked)
        vec = vec.reshape(-1, stacked.shape[2])
    return vec[:, 0]


def insert_bit(state: MpsState, position: int, value: int) -> MpsState:
    """Insert a new bit fixed to ``value`` after bit ``position`` (0 prepends).

    The new site carries the DxD identity for the inserted value and the zero
    matrix for the other value, D being the bond dimension at the insertion
    cut, so every marginal over the pre-existing bits is untouched.  Mutates
    and returns ``state``.
    """
    if value not in (0, 1):
        raise ValueError("inserted value must be 0 or 1")
    if not 0 <= position <= state.n:
        raise IndexError(f"insert position {position} out of range 0..{state.n}")
    dim = 1 if position == 0 else state.sites[position - 1].shape[1]
    eye = np.eye(dim)
    zero = np.zeros((dim, dim))
    site = SiteMatrices(eye, zero) if value == 0 else SiteMatrices(zero, eye)
    state.sites.insert(position, site)
    # Height change is zero on both sides of a square inserted site.
    state.profile.heights.insert(position, state.profile.heights[position])
    state.profile.record(f"insert {position} {value}", state.bond_dims())
    return state


def remove_bit(state: MpsState, index: int) -> MpsState:
    """Remove bit ``index`` by summing it out into a neighbour.

    The site is summed over its bit value and multiplied into the right
    neighbour (into the left one when removing the last bit), which leaves
    every marginal over the surviving bits unchanged.  Tracked heights become
    stale; follow up with ``recompress_sweeps`` to restore the height
    difference constraint.  Mutates and returns ``state``.
    """
    n = state.n
    if n < 2:
        raise ValueError("cannot remove a bit from a 1-bit state")
    if not 1 <= index <= n:
        raise IndexError(f"bit index {index} out of range 1..{n}")
    pos = index - 1
    merged = state.sites[pos].summed()
    if index == n:
        left = state.sites[pos - 1]
        state.sites[pos - 1] = SiteMatrices(left.m0 @ merged, left.m1 @ merged)
        removed_cut = n - 1
    else:
        right = state.sites[pos + 1]
        state.sites[pos + 1] = SiteMatrices(merged @ right.m0, merged @ right.m1)
        removed_cut = index
    del state.sites[pos]
    del state.profile.heights[removed_cut]
    state.profile.stale = True
    state.profile.record(f"remove {index}", state.bond_dims())
    return state
