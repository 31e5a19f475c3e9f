"""Worst-case entanglement-height bookkeeping and bond-dimension bound checks.

Every two-bit gate applied at cut ``j`` can at most double the bond dimension
on either side of the cut, so the base-2 logs of the worst-case dimensions
(the "heights" ``h_0 .. h_n``) obey a simple update rule:
``h_j <- min(h_{j-1}, h_{j+1}) + 1``.  Neighbouring heights then never differ
by more than one (the height difference constraint, hdc), which is what makes
the global dimension bound ``D <= min(2**isqrt(2*n_g), 2**(n//2))`` work.

This module tracks those heights alongside the actual (post-SVD) dimensions,
verifies the bounds at runtime, and exports per-step CSV logs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class StepSnapshot:
    """State of the height profile right after one logical operation."""

    step: int
    op: str
    heights: tuple[int, ...]      # h_0 .. h_n
    dims: tuple[int, ...]         # actual D_0 .. D_n
    gate_count: int
    stale: bool = False           # heights pending recompute (post bit-removal)


@dataclass
class HeightProfile:
    """Tracked worst-case heights h_0..h_n plus the two-bit gate counter.

    ``heights[j]`` bounds log2 of the actual bond dimension at cut j; the
    boundary entries stay 0 because the chain ends in 1-dimensional bonds.
    ``stale`` is set by bit removal and cleared by the recompression sweeps
    that the caller is required to run afterwards.
    """

    heights: list[int]
    gate_count: int = 0
    stale: bool = False
    log_steps: bool = False
    log: list[StepSnapshot] = field(default_factory=list)
    peak_dim: int = 1
    peak_width: int = 1

    @property
    def n(self) -> int:
        return len(self.heights) - 1

    def record(self, op: str, dims: list[int]) -> None:
        """Note one finished operation: update the peak dimension and width
        and, when step logging is on, append a snapshot."""
        self.peak_dim = max(self.peak_dim, max(dims))
        self.peak_width = max(self.peak_width, len(dims) - 1)
        if self.log_steps:
            self.log.append(StepSnapshot(
                step=len(self.log),
                op=op,
                heights=tuple(self.heights),
                dims=tuple(dims),
                gate_count=self.gate_count,
                stale=self.stale,
            ))

    def copy(self) -> "HeightProfile":
        return HeightProfile(
            heights=list(self.heights),
            gate_count=self.gate_count,
            stale=self.stale,
            log_steps=self.log_steps,
            log=list(self.log),
            peak_dim=self.peak_dim,
            peak_width=self.peak_width,
        )


def update_on_gate(profile: HeightProfile, cut: int) -> HeightProfile:
    """Apply the worst-case height update for a two-bit gate at ``cut``.

    Sets ``h_cut = min(min(h_{cut-1}, h_{cut+1}) + 1, cut, n - cut)`` and
    bumps the gate counter.  The positional clamp can never be exceeded by an
    actual rank, since a cut with only ``k`` bits on one side carries at most
    ``2**k`` dimensions.
    """
    n = profile.n
    if not 1 <= cut <= n - 1:
        raise IndexError(f"gate cut {cut} out of range for {n} bits")
    h = profile.heights
    h[cut] = min(min(h[cut - 1], h[cut + 1]) + 1, cut, n - cut)
    profile.gate_count += 1
    if not profile.stale:
        # Guaranteed by induction; a violation is a bookkeeping bug.
        if abs(h[cut] - h[cut - 1]) > 1 or abs(h[cut + 1] - h[cut]) > 1:
            raise AssertionError(
                f"height difference constraint broken at cut {cut}: {h}")
    return profile


def recompute_from_dims(profile: HeightProfile, dims: list[int]) -> None:
    """Reset tracked heights from actual bond dimensions.

    Used after the mandatory identity sweeps that follow a bit removal.  The
    base value at each cut is ``ceil(log2 D_j)``; a two-directional repair
    pass then raises entries where needed so the hdc holds (raising never
    breaks the dominance of heights over actual log-dimensions).
    """
    if len(dims) != len(profile.heights):
        raise ValueError("dimension list does not match height profile")
    base = [(d - 1).bit_length() for d in dims]
    for j in range(1, len(base)):
        base[j] = max(base[j], base[j - 1] - 1)
    for j in range(len(base) - 2, -1, -1):
        base[j] = max(base[j], base[j + 1] - 1)
    profile.heights[:] = base
    profile.stale = False


def height_cap(n: int, gate_count: int) -> int:
    """Largest height permitted after ``gate_count`` two-bit gates on n bits."""
    return min(math.isqrt(2 * gate_count), n // 2)


@dataclass(frozen=True)
class BoundsReport:
    """Outcome of checking the dimension bounds over a run."""

    ok: bool
    h_max: int
    h_max_bound: int
    area: int
    area_bound: int
    peak_dim: int
    peak_dim_bound: int
    violations: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "h_max": self.h_max,
            "h_max_bound": self.h_max_bound,
            "area": self.area,
            "area_bound": self.area_bound,
            "peak_bond_dim": self.peak_dim,
            "peak_bond_dim_bound": self.peak_dim_bound,
            "violations": list(self.violations),
        }


def _check_one(heights: tuple[int, ...], dims: tuple[int, ...] | None,
               gate_count: int, stale: bool, label: str,
               violations: list[str]) -> None:
    n = len(heights) - 1
    if not stale:
        if heights[0] != 0 or heights[n] != 0:
            violations.append(f"{label}: boundary height not zero: {heights}")
        for j in range(1, n + 1):
            if abs(heights[j] - heights[j - 1]) > 1:
                violations.append(f"{label}: hdc broken at cut {j}: {heights}")
        cap = height_cap(n, gate_count)
        if max(heights) > cap:
            violations.append(
                f"{label}: max height {max(heights)} exceeds bound {cap}")
        if sum(heights) > 2 * gate_count:
            violations.append(
                f"{label}: area {sum(heights)} exceeds 2*n_g = {2 * gate_count}")
    if dims is not None:
        for j, d in enumerate(dims):
            if (d - 1).bit_length() > heights[j]:
                violations.append(
                    f"{label}: actual dim {d} at cut {j} above height "
                    f"{heights[j]}")


def check_bounds(profile: HeightProfile,
                 dims: list[int] | None = None) -> BoundsReport:
    """Verify the height and dimension bounds for the profile's whole history.

    Checks the current heights plus every logged snapshot: hdc, the per-gate
    area bound ``sum(h) <= 2*n_g``, the global height cap, and dominance of
    tracked heights over actual dimensions.  Snapshots flagged stale (between
    a bit removal and its sweeps) are exempt from the height checks but not
    from dominance.  Pass the state's current bond dimensions as ``dims`` to
    include them in the dominance check.
    """
    violations: list[str] = []
    _check_one(tuple(profile.heights), tuple(dims) if dims else None,
               profile.gate_count, profile.stale, "current", violations)
    widest = max(profile.n, profile.peak_width)
    for snap in profile.log:
        _check_one(snap.heights, snap.dims, snap.gate_count, snap.stale,
                   f"step {snap.step} ({snap.op})", violations)
    # The global cap uses the widest chain of the run: a removed bit must not
    # retroactively tighten the bound on dimensions reached while it existed.
    cap = height_cap(widest, profile.gate_count)
    if profile.peak_dim > 2 ** cap:
        violations.append(
            f"peak dim {profile.peak_dim} exceeds global bound {2 ** cap}")
    return BoundsReport(
        ok=not violations,
        h_max=max(profile.heights),
        h_max_bound=height_cap(profile.n, profile.gate_count),
        area=sum(profile.heights),
        area_bound=2 * profile.gate_count,
        peak_dim=profile.peak_dim,
        peak_dim_bound=2 ** cap,
        violations=tuple(violations),
    )


def export_profile(profile: HeightProfile) -> str:
    """Render the per-step log as CSV.

    One row per logged step with the interior heights ``h_1..h_{n-1}``, the
    actual interior dimensions ``D_1..D_{n-1}`` and the running gate count.
    Rows from steps where the chain was shorter or longer than the widest
    snapshot leave the missing columns blank.
    """
    width = profile.n - 1
    for snap in profile.log:
        width = max(width, len(snap.heights) - 2)
    header = (["step", "op"]
              + [f"h_{j}" for j in range(1, width + 1)]
              + [f"D_{j}" for j in range(1, width + 1)]
              + ["n_g"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for snap in profile.log:
        inner_h = list(snap.heights[1:-1])
        inner_d = list(snap.dims[1:-1])
        pad = [""] * (width - len(inner_h))
        writer.writerow([snap.step, snap.op]
                        + inner_h + pad + inner_d + pad
                        + [snap.gate_count])
    return buf.getvalue()
