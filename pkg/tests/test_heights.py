import pytest

from mpslogic.circuit import execute, parse_circuit
from mpslogic.heights import (
    HeightProfile,
    check_bounds,
    export_profile,
    height_cap,
    recompute_from_dims,
    update_on_gate,
)


def test_first_gate_raises_one_cut():
    profile = HeightProfile(heights=[0, 0, 0, 0, 0])
    update_on_gate(profile, 1)
    assert profile.heights == [0, 1, 0, 0, 0]
    assert profile.gate_count == 1


def test_update_uses_min_plus_one():
    profile = HeightProfile(heights=[0, 1, 1, 1, 0])
    update_on_gate(profile, 2)
    assert profile.heights[2] == 2


def test_update_clamped_at_boundary():
    profile = HeightProfile(heights=[0, 1, 0])
    update_on_gate(profile, 1)
    assert profile.heights == [0, 1, 0]


def test_update_cut_range_checked():
    profile = HeightProfile(heights=[0, 0, 0])
    with pytest.raises(IndexError):
        update_on_gate(profile, 0)
    with pytest.raises(IndexError):
        update_on_gate(profile, 2)


def test_height_cap_values():
    assert height_cap(2, 1) == 1
    assert height_cap(12, 50) == 6
    assert height_cap(20, 400) == 10
    assert height_cap(24, 23) == 6


def test_bounds_fresh_profile():
    report = check_bounds(HeightProfile(heights=[0] * 7))
    assert report.ok
    assert report.h_max == 0


def test_bounds_saturating_profile():
    heights = list(range(7)) + list(range(5, -1, -1))
    profile = HeightProfile(heights=heights, gate_count=50)
    report = check_bounds(profile)
    assert report.ok
    assert report.h_max == 6
    assert report.h_max_bound == 6


def test_bounds_single_gate():
    profile = HeightProfile(heights=[0, 1, 0], gate_count=1)
    report = check_bounds(profile)
    assert report.ok
    assert report.h_max_bound == 1


def test_bounds_flag_hdc_violation():
    profile = HeightProfile(heights=[0, 2, 0], gate_count=10)
    report = check_bounds(profile)
    assert not report.ok
    assert any("hdc" in v for v in report.violations)


def test_bounds_flag_area_violation():
    profile = HeightProfile(heights=[0, 1, 1, 1, 0], gate_count=1)
    report = check_bounds(profile)
    assert not report.ok
    assert any("area" in v for v in report.violations)


def test_bounds_flag_dominance_violation():
    profile = HeightProfile(heights=[0, 1, 0], gate_count=5)
    report = check_bounds(profile, dims=[1, 4, 1])
    assert not report.ok
    assert any("actual dim" in v for v in report.violations)


def test_bounds_flag_peak_dim_violation():
    profile = HeightProfile(heights=[0, 1, 0], gate_count=1, peak_dim=8,
                            peak_width=2)
    report = check_bounds(profile)
    assert not report.ok
    assert any("peak dim" in v for v in report.violations)


def test_stale_profile_skips_height_checks_keeps_dominance():
    profile = HeightProfile(heights=[0, 3, 0], gate_count=0, stale=True)
    assert check_bounds(profile).ok
    report = check_bounds(profile, dims=[1, 16, 1])
    assert not report.ok


def test_recompute_from_dims_repairs_hdc():
    profile = HeightProfile(heights=[9, 9, 9, 9], stale=True)
    recompute_from_dims(profile, [1, 4, 1, 1])
    assert profile.heights == [1, 2, 1, 0]
    assert not profile.stale


def test_recompute_length_checked():
    profile = HeightProfile(heights=[0, 0, 0])
    with pytest.raises(ValueError):
        recompute_from_dims(profile, [1, 1])


def test_export_empty_log_is_header_only():
    profile = HeightProfile(heights=[0, 0, 0])
    lines = export_profile(profile).strip().splitlines()
    assert lines == ["step,op,h_1,D_1,n_g"]


def test_export_one_gate_run_has_two_rows():
    circuit = parse_circuit("bits 2\ninput 1 2\ngate CNAND 1 2\noutput 2\n")
    state = execute(circuit, log_steps=True)
    lines = export_profile(state.profile).strip().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("0,init,")
    assert lines[2].split(",")[1].startswith("gate CNAND")


def test_export_nand_final_dims_within_height():
    circuit = parse_circuit("bits 2\ninput 1 2\ngate CNAND 1 2\noutput 2\n")
    state = execute(circuit, log_steps=True)
    rows = export_profile(state.profile).strip().splitlines()
    step, op, h1, d1, n_g = rows[-1].split(",")
    assert int(d1) == 2
    assert int(d1) <= 2 ** int(h1)
    assert int(n_g) == 1


def test_export_pads_rows_after_removal():
    text = "bits 3\ninput 1 2 3\ngate CNAND 1 2\nremove 3\noutput 1 2\n"
    state = execute(parse_circuit(text), log_steps=True)
    lines = export_profile(state.profile).strip().splitlines()
    width = len(lines[0].split(","))
    assert all(len(line.split(",")) == width for line in lines[1:])


def test_peak_tracking_without_step_log():
    text = "bits 4\ninput 1 2 3 4\ngate CAND 2 3\nremove 4\noutput 1 2 3\n"
    state = execute(parse_circuit(text))
    assert state.profile.peak_width == 4
    assert state.profile.peak_dim >= 2
    assert check_bounds(state.profile, state.bond_dims()).ok


def test_profile_copy_is_deep():
    profile = HeightProfile(heights=[0, 1, 0], gate_count=3, peak_dim=2)
    clone = profile.copy()
    update_on_gate(clone, 1)
    assert profile.gate_count == 3
    assert profile.heights == [0, 1, 0]
