import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chambersim.metrics import (
    BenchmarkInvalidError,
    RunTrace,
    compare,
    first_nlos_tick,
    format_pct,
    nlos_total_time,
    onset_delay,
    recovery_time,
)

DT = 0.2


def trace_from_los(flags, dt=DT, **meta):
    base = {"use_case": "T", "policy_id": "p", "seed": "0", "config_hash": "c", "dt": repr(dt)}
    base.update({k: str(v) for k, v in meta.items()})
    t = RunTrace(meta=base)
    for i, los in enumerate(flags):
        t.rows.append((i, 4.0, 4.0, 3.5, 2.0 + 0.1 * i, 2.0, int(los), 50.0 + los * 20.0, 0, 0.5 - los))
    return t


def test_all_los_trace_has_zero_nlos_time():
    assert nlos_total_time(trace_from_los([0] * 30)) == 0.0


def test_nlos_time_counts_ticks_times_dt():
    flags = [0] * 5 + [1] * 10 + [0] * 5
    assert nlos_total_time(trace_from_los(flags)) == pytest.approx(2.0)


def test_nlos_time_alternating():
    flags = [i % 2 for i in range(20)]
    assert nlos_total_time(trace_from_los(flags)) == pytest.approx(2.0)


def test_onset_delay_self_comparison_is_zero():
    t = trace_from_los([0] * 10 + [1] * 5)
    delay, never = onset_delay(t, t)
    assert delay == 0.0
    assert never is False


def test_onset_delay_scales_by_dt():
    rl = trace_from_los([0] * 30 + [1] * 5 + [0] * 40)
    static = trace_from_los([0] * 25 + [1] * 10 + [0] * 40)
    delay, never = onset_delay(rl, static)
    assert delay == pytest.approx(1.0)
    assert never is False


def test_onset_delay_when_rl_never_obstructed():
    rl = trace_from_los([0] * 75)
    static = trace_from_los([0] * 25 + [1] * 10 + [0] * 40)
    delay, never = onset_delay(rl, static)
    assert never is True
    assert delay == pytest.approx((75 - 25) * DT)
    assert delay == pytest.approx(10.0)


def test_onset_delay_requires_obstructed_baseline():
    with pytest.raises(BenchmarkInvalidError):
        onset_delay(trace_from_los([0] * 10), trace_from_los([0] * 10))


def test_compare_reproduces_published_ratios():
    static = trace_from_los([1] * 12 + [0] * 63)      # 2.4 s
    rl = trace_from_los([0] * 2 + [1] * 7 + [0] * 66)  # 1.4 s
    rep = compare(rl, static)
    assert rep.nlos_time_static_s == pytest.approx(2.4)
    assert rep.nlos_time_rl_s == pytest.approx(1.4)
    assert rep.reduction_pct == pytest.approx(100.0 * (2.4 - 1.4) / 2.4)
    assert format_pct(rep.reduction_pct) == "41.6"

    static = trace_from_los([1] * 8 + [0] * 20)        # 1.6 s
    rl = trace_from_los([0] + [1] * 7 + [0] * 20)      # 1.4 s
    rep = compare(rl, static)
    assert rep.reduction_pct == pytest.approx(12.5)
    assert format_pct(rep.reduction_pct) == "12.5"


def test_compare_no_improvement_is_zero_percent():
    static = trace_from_los([1] * 10 + [0] * 10)
    rl = trace_from_los([0] * 5 + [1] * 10 + [0] * 5)
    assert compare(rl, static).reduction_pct == pytest.approx(0.0)


def test_reduction_hits_hundred_only_with_zero_nlos():
    static = trace_from_los([1] * 10 + [0] * 10)
    spotless = trace_from_los([0] * 20)
    nearly = trace_from_los([0] * 19 + [1])
    assert compare(spotless, static).reduction_pct == pytest.approx(100.0)
    assert compare(nearly, static).reduction_pct < 100.0


def test_compare_swap_negates_delay_and_rebases_reduction():
    a = trace_from_los([0] * 10 + [1] * 4 + [0] * 20)
    b = trace_from_los([0] * 6 + [1] * 8 + [0] * 20)
    fwd = compare(a, b)
    rev = compare(b, a)
    assert fwd.onset_delay_s == pytest.approx(-rev.onset_delay_s)
    assert fwd.reduction_pct == pytest.approx(100.0 * (1.6 - 0.8) / 1.6)
    assert rev.reduction_pct == pytest.approx(100.0 * (0.8 - 1.6) / 0.8)


def test_recovery_time_for_obstructed_start():
    t = trace_from_los([1] * 7 + [0] * 10)
    assert recovery_time(t) == pytest.approx(1.4)
    assert recovery_time(trace_from_los([0] * 5)) is None
    assert first_nlos_tick(trace_from_los([0] * 5)) is None


def test_csv_round_trip_is_identical():
    t = trace_from_los([0, 0, 1, 1, 0], dt=0.2)
    # awkward floats must survive the round trip bit-exactly
    t.rows[2] = (2, 0.1 + 0.2, 1e-17, -3.5, 6.02, 2.0, 1, 63.321373642332334, 2, -0.33333333333333337)
    text = t.to_csv()
    back = RunTrace.from_csv(text)
    assert back.meta == t.meta
    assert back.rows == t.rows
    assert back.to_csv() == text


def test_csv_rejects_non_contiguous_ticks():
    t = trace_from_los([0, 0, 0])
    t.rows[2] = (7,) + t.rows[2][1:]
    with pytest.raises(ValueError):
        RunTrace.from_csv(t.to_csv())


@given(flags=st.lists(st.integers(0, 1), min_size=1, max_size=200))
@settings(max_examples=100, deadline=None)
def test_round_trip_property(flags):
    t = trace_from_los(flags)
    assert RunTrace.from_csv(t.to_csv()).rows == t.rows
