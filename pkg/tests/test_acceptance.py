"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured numbers when it holds. Tolerances and budgets are fixed here.
"""

import itertools
import math
import random
import time

import numpy as np

from errandbot.cli import data_path
from errandbot.control import ControllerParams, Obstacle, ObservationSnapshot, select_velocity
from errandbot.corpus import evaluate_corpus, load_corpus, serialize_corpus
from errandbot.fsm import EventKind, FsmEvent, FsmState, TaskExecutor
from errandbot.nlu import CommandText, TaskSpec, TranslatorConfig, interpret
from errandbot.planning import NoPath, plan_path
from errandbot.sim import parse_scenario, run_scripted, serialize_scenario
from errandbot.world import (
    GridMap,
    LandmarkRef,
    Pose2D,
    load_landmarks,
    load_map,
    serialize_landmarks,
    serialize_map,
)

from .conftest import LOBBY_SEEDS
from .oracles import closest_approach, dijkstra_steps, path_step_counts, vo_select_exhaustive

MOCK = TranslatorConfig()


def _passed(name, detail):
    print(f"\nACCEPTANCE {name}: PASS ({detail})")


def test_nlu_corpus_accuracy(office_landmarks):
    t0 = time.perf_counter()
    entries = load_corpus(data_path("commands.corpus").read_text())
    assert len(entries) == 50
    results, accuracy = evaluate_corpus(entries, office_landmarks, MOCK)
    elapsed = time.perf_counter() - t0
    assert accuracy == 1.0, [r for r in results if not r["ok"]]
    assert elapsed < 5.0

    paper_one = interpret(
        CommandText("Could you please bring the keys from security to TRAIL?"),
        MOCK, office_landmarks,
    )
    assert (paper_one.pickup.name, paper_one.item, paper_one.delivery.name) == (
        "security", "keys", "trail",
    )
    paper_two = interpret(
        CommandText("I forgot my laptop, please bring a laptop from the computer station to the robotics lab."),
        MOCK, office_landmarks,
    )
    assert (paper_two.pickup.name, paper_two.item, paper_two.delivery.name) == (
        "computer station", "laptop", "robotics lab",
    )
    _passed("nlu-corpus-accuracy", f"50/50 exact, {elapsed:.2f}s")


def test_article_insensitivity(office_landmarks):
    rng = random.Random(20240817)
    verbs = ["bring", "take", "deliver", "carry", "fetch", "get"]
    items = ["keys", "laptop", "envelopes", "package", "badge", "coffee mug", "stapler"]
    places = [lm.name for lm in office_landmarks]
    articles = ["the", "a", "an"]
    pairs_equal = 0
    for _ in range(200):
        verb = rng.choice(verbs)
        item = rng.choice(items)
        pickup, delivery = rng.sample(places, 2)
        bare = f"{verb} {item} from {pickup} to {delivery}"
        dressed = (
            f"{verb} {rng.choice(articles)} {item} "
            f"from {rng.choice(articles)} {pickup} to {rng.choice(articles)} {delivery}"
        )
        a = interpret(CommandText(bare), MOCK, office_landmarks)
        b = interpret(CommandText(dressed), MOCK, office_landmarks)
        if a == b:
            pairs_equal += 1
    assert pairs_equal == 200
    _passed("article-insensitivity", "200/200 pairs identical")


def test_astar_oracle_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(4242)
    solved = 0
    attempts = 0
    while solved < 100:
        attempts += 1
        assert attempts < 2000
        n = 20
        cells = np.zeros((n, n), dtype=bool)
        for cy in range(n):
            for cx in range(n):
                if rng.random() < 0.3:
                    cells[cy, cx] = True
        grid = GridMap(0.5, (0.0, 0.0), n, n, cells)
        free_cells = [(cx, cy) for cy in range(n) for cx in range(n) if not cells[cy, cx]]
        if len(free_cells) < 2:
            continue
        start, goal = rng.sample(free_cells, 2)
        oracle = dijkstra_steps(lambda cx, cy: not grid.is_occupied(cx, cy), n, n, start, goal)
        if oracle is None:
            continue  # only solvable instances count
        path = plan_path(grid, grid.cell_to_world(*start), grid.cell_to_world(*goal))
        got = path_step_counts(path.waypoints, grid.resolution)
        assert got == oracle, (start, goal, got, oracle)
        ax, diag = oracle
        assert path.total_cost == (ax + diag * math.sqrt(2.0)) * grid.resolution or \
            abs(path.total_cost - (ax + diag * math.sqrt(2.0)) * grid.resolution) < 1e-9
        solved += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _passed("astar-oracle-equivalence", f"100/100 solvable grids exact, {elapsed:.2f}s")


def test_vo_oracle_equivalence_and_safety():
    t0 = time.perf_counter()
    rng = random.Random(90125)
    params = ControllerParams()
    exact = 0
    safety_checked = 0
    for scene in range(500):
        robot = Pose2D(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-math.pi, math.pi))
        n_peds = 1 if scene % 2 == 0 else 3
        peds = [
            Obstacle(
                robot.x + rng.uniform(-3, 3),
                robot.y + rng.uniform(-3, 3),
                rng.uniform(-1.5, 1.5),
                rng.uniform(-1.5, 1.5),
                rng.uniform(0.2, 0.5),
            )
            for _ in range(n_peds)
        ]
        angle = rng.uniform(-math.pi, math.pi)
        speed = rng.uniform(0.0, params.v_max)
        preferred = (speed * math.cos(angle), speed * math.sin(angle))
        obs = ObservationSnapshot(robot, (0.0, 0.0), peds, (5.0, 5.0))

        got = select_velocity(obs, preferred, params)
        want = vo_select_exhaustive(robot, peds, preferred, params)
        assert got == want, (scene, got, want)
        exact += 1

        chosen, admissible = got
        if admissible:
            for ped in peds:
                combined = params.robot_radius + ped.radius
                approach = closest_approach((robot.x, robot.y), chosen, ped, params.horizon)
                assert approach >= combined - 1e-9, (scene, approach, combined)
                safety_checked += 1
    elapsed = time.perf_counter() - t0
    assert exact == 500
    assert elapsed < 10.0
    _passed(
        "vo-oracle-equivalence-and-safety",
        f"500/500 selections exact, {safety_checked} safety checks, {elapsed:.2f}s",
    )


def _task(n=0):
    return TaskSpec(
        pickup=LandmarkRef("a", (0.0, 0.0)),
        delivery=LandmarkRef("b", (1.0, 1.0)),
        item=f"item-{n}",
        command_id=f"cmd-{n:04d}",
        issued_at=0.0,
    )


def test_fsm_exhaustive_closure_and_five_step_sequence():
    def reach(state):
        ex = TaskExecutor()
        if state is FsmState.IDLE:
            return ex
        ex.submit(_task())
        if state is FsmState.NAVIGATING_TO_PICKUP:
            return ex
        ex.step(FsmEvent.arrived_at_goal())
        if state is FsmState.PICKING_UP_ITEM:
            return ex
        ex.step(FsmEvent.action_complete())
        if state is FsmState.NAVIGATING_TO_DELIVERY:
            return ex
        ex.step(FsmEvent.arrived_at_goal())
        return ex

    def event_of(kind):
        if kind is EventKind.NEW_TASK:
            return FsmEvent.new_task(_task(9))
        if kind is EventKind.NAVIGATION_FAILED:
            return FsmEvent.navigation_failed("x")
        return FsmEvent(kind)

    combos = 0
    for state, kind in itertools.product(FsmState, EventKind):
        ex = reach(state)
        assert ex.state is state
        ex.step(event_of(kind))
        assert ex.state in set(FsmState)
        combos += 1
    assert combos == 25

    ex = TaskExecutor()
    sequence = [
        FsmEvent.new_task(_task()),
        FsmEvent.arrived_at_goal(),
        FsmEvent.action_complete(),
        FsmEvent.arrived_at_goal(),
        FsmEvent.action_complete(),
    ]
    seen = []
    for event in sequence:
        ex.step(event)
        seen.append(ex.state)
    assert seen == [
        FsmState.NAVIGATING_TO_PICKUP,
        FsmState.PICKING_UP_ITEM,
        FsmState.NAVIGATING_TO_DELIVERY,
        FsmState.DELIVERING_ITEM,
        FsmState.IDLE,
    ]
    assert ex.carried_item is None
    _passed("fsm-closure-and-five-step", "25/25 pairs closed, five-step returns to Idle")


def test_end_to_end_lobby_runs(lobby_scenario_path):
    t0 = time.perf_counter()
    for seed in LOBBY_SEEDS:
        report = run_scripted(lobby_scenario_path, seed=seed)
        assert report.tasks_completed == 2, (seed, report.to_dict())
        assert report.static_collisions == 0, (seed, report.to_dict())
        assert report.pedestrian_collisions == 0, (seed, report.to_dict())
        assert report.completed_order == ["cmd-0001", "cmd-0002"]

    first, second = [], []
    run_scripted(lobby_scenario_path, seed=LOBBY_SEEDS[0], record=first)
    run_scripted(lobby_scenario_path, seed=LOBBY_SEEDS[0], record=second)
    assert first == second and len(first) > 0
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _passed(
        "end-to-end-lobby",
        f"seeds {LOBBY_SEEDS}: 2/2 tasks, 0 collisions each; identical streams; {elapsed:.1f}s",
    )


def test_format_round_trips(office_landmarks):
    grid_text = data_path("lobby.grid").read_text()
    grid = load_map(grid_text)
    assert load_map(serialize_map(grid)) == grid

    landmarks_text = serialize_landmarks(office_landmarks)
    assert load_landmarks(landmarks_text) == office_landmarks

    corpus = load_corpus(data_path("commands.corpus").read_text())
    assert load_corpus(serialize_corpus(corpus)) == corpus

    scenario = parse_scenario(data_path("lobby.scenario").read_text())
    assert parse_scenario(serialize_scenario(scenario)) == scenario
    _passed("format-round-trips", "gridmap, landmarks, corpus, scenario")
