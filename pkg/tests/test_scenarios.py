import pytest

from chambersim.chamber import NLOS, BounceX, Scripted, Static, advance
from chambersim.config import AppConfig, EntityLayout
from chambersim.scenarios import (
    EPISODE_TICKS,
    SCENARIO_D_OBSTACLE_SPEED,
    SCENARIO_DURATIONS,
    V_OBJECT,
    BenchmarkInvalidError,
    OutOfEpisodeError,
    build_scenario,
    build_use_case,
    episode_initial_state,
    instantiate_scenario,
    scenario_at,
    scenario_id_at,
    scenario_starts,
    validate_benchmark,
)

APP = AppConfig().resolved()
CFG = APP.chamber
LAYOUT = APP.layout


def test_durations_fill_the_episode():
    assert SCENARIO_DURATIONS == {"A": 100, "B": 450, "C": 450, "D": 2000}
    assert EPISODE_TICKS == 3000


def test_scenario_lookup_boundaries():
    assert scenario_id_at(0) == "A"
    assert scenario_id_at(99) == "A"
    assert scenario_id_at(100) == "B"
    assert scenario_id_at(549) == "B"
    assert scenario_id_at(550) == "C"
    assert scenario_id_at(999) == "C"
    assert scenario_id_at(1000) == "D"
    assert scenario_id_at(2999) == "D"
    with pytest.raises(OutOfEpisodeError):
        scenario_id_at(3000)
    with pytest.raises(OutOfEpisodeError):
        scenario_id_at(-1)


def test_scenario_starts_are_cumulative_sums():
    assert scenario_starts() == {0: "A", 100: "B", 550: "C", 1000: "D"}


def test_scenario_a_is_fully_static_blockage():
    spec = build_scenario("A", CFG, LAYOUT)
    assert isinstance(spec.ue.motion, Static)
    assert isinstance(spec.obstacle.motion, Static)
    state = episode_initial_state(CFG, LAYOUT)
    assert state.los == NLOS  # obstacle parked in front of the UE


def test_scenario_b_moves_only_the_obstacle():
    spec = build_scenario("B", CFG, LAYOUT)
    assert isinstance(spec.ue.motion, Static)
    assert isinstance(spec.obstacle.motion, BounceX)
    assert spec.obstacle.motion.speed == V_OBJECT


def test_scenario_c_moves_only_the_ue():
    spec = build_scenario("C", CFG, LAYOUT)
    assert isinstance(spec.ue.motion, BounceX)
    assert isinstance(spec.obstacle.motion, Static)


def test_scenario_d_uses_distinct_speeds():
    spec = build_scenario("D", CFG, LAYOUT)
    assert isinstance(spec.ue.motion, BounceX)
    assert isinstance(spec.obstacle.motion, BounceX)
    assert spec.ue.motion.speed == V_OBJECT
    assert spec.obstacle.motion.speed == SCENARIO_D_OBSTACLE_SPEED
    assert spec.ue.motion.speed != spec.obstacle.motion.speed
    assert (spec.ue.x, spec.ue.vx) != (spec.obstacle.x, spec.obstacle.vx)


def test_boundary_swap_preserves_the_gnb():
    state = episode_initial_state(CFG, LAYOUT)
    for _ in range(99):
        state = advance(state, 0.35, CFG)
    gnb_before = state.gnb
    spec = scenario_at(100, CFG, LAYOUT)
    swapped = instantiate_scenario(spec, state, CFG)
    assert swapped.gnb == gnb_before
    assert swapped.tick_index == state.tick_index
    assert isinstance(swapped.obstacle.motion, BounceX)
    assert isinstance(swapped.ue.motion, Static)


def test_use_case_s_starts_obstructed():
    state = build_use_case("S", CFG, LAYOUT)
    assert state.los == NLOS
    assert isinstance(state.ue.motion, Static)
    assert isinstance(state.obstacle.motion, Static)


def test_use_case_o1_scripts_the_obstacle_left_to_right():
    state = build_use_case("O.1", CFG, LAYOUT)
    assert isinstance(state.obstacle.motion, Scripted)
    assert state.obstacle.x == 2.0
    assert state.obstacle.vx == 0.0  # parked through the pre-roll
    assert isinstance(state.ue.motion, Static)
    moving = state
    for _ in range(6):  # past the 1 s pre-roll
        moving = advance(moving, 0.0, CFG)
    assert moving.obstacle.vx == pytest.approx(V_OBJECT)


def test_use_case_u2_scripts_the_ue_right_to_left():
    state = build_use_case("U.2", CFG, LAYOUT)
    assert isinstance(state.ue.motion, Scripted)
    assert state.ue.x == 6.0
    assert isinstance(state.obstacle.motion, Static)
    moving = state
    for _ in range(6):
        moving = advance(moving, 0.0, CFG)
    assert moving.ue.vx == pytest.approx(-V_OBJECT)


def test_movement_pattern_completes_within_run_length():
    # 1 s pre-roll plus 4 m at 0.6 m/s is about 38.4 ticks; the node then holds
    state = build_use_case("U.1", CFG, LAYOUT)
    for _ in range(40):
        state = advance(state, 0.0, CFG)
    assert state.ue.x == pytest.approx(6.0)
    assert state.ue.vx == 0.0
    held = advance(state, 0.0, CFG)
    assert held.ue.x == pytest.approx(6.0)


def test_invalid_use_case_names_rejected():
    for bad in ("O", "U", "S.1", "O.3", "X.1", ""):
        with pytest.raises(ValueError):
            build_use_case(bad, CFG, LAYOUT)


def test_vacuous_benchmark_rejected():
    # obstacle tucked in a corner above the UE line: nothing ever blocks
    layout = EntityLayout(obstacle_x=7.5, obstacle_y=4.5)
    with pytest.raises(BenchmarkInvalidError):
        validate_benchmark("U.1", CFG, layout, run_ticks=75)


def test_default_benchmarks_are_valid():
    for name in ("S", "O.1", "O.2", "U.1", "U.2"):
        validate_benchmark(name, CFG, LAYOUT, run_ticks=APP.evaluation.run_ticks)
