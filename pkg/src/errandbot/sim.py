"""Deterministic fixed-step simulation of the robot, the crowd, and the task
loop, plus the scenario file format and the headless scripted runner.

Sub-step order within a tick is pinned (replan, observe, select, integrate
robot, integrate pedestrians, detect collisions, emit events, feed the FSM) so
that identical inputs produce byte-identical snapshot streams.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import queue
import shlex
from dataclasses import dataclass, field
from pathlib import Path as FilePath

import numpy as np

from .control import (
    ControllerParams,
    Obstacle,
    ObservationSnapshot,
    PathCursor,
    VelocityCommand,
    command_crosses_obstacle,
    select_velocity,
    to_diff_drive,
)
from .fsm import (
    Effect,
    ExecutorStatus,
    FsmEvent,
    FsmState,
    QueueFull,
    SetGoal,
    StartAction,
    TaskCompleted,
    TaskExecutor,
    TaskFailed,
)
from .nlu import CommandText, NluError, Source, TaskSpec, TranslatorConfig, interpret
from .planning import Path, PlanningError, plan_path
from .world import (
    AmbiguousLocation,
    GridMap,
    LandmarkDictionary,
    OutOfBounds,
    Pose2D,
    UnknownLocation,
    load_landmarks,
    load_map,
)

log = logging.getLogger(__name__)

PED_RADIUS_DEFAULT = 0.3
PED_SPEED_MIN = 0.3
PED_SPEED_MAX = 1.5
PED_WAYPOINT_TOLERANCE = 0.2
MIN_SPAWN_DISTANCE = 1.0  # meters from the robot start
# Pedestrian radii are padded by this much in the controller's observation so
# avoidance engages before the exact contact distance; collision counting
# still uses the true radii.
VO_SAFETY_MARGIN = 0.05
# The preferred velocity blends goal attraction with short-range repulsion
# from pedestrians and walls, so the robot yields space before velocity
# cones close around it and rarely needs the emergency stop.
PED_REPULSE_RANGE = 1.5  # surface distance, meters
PED_REPULSE_GAIN = 1.6
WALL_REPULSE_RANGE = 0.6  # from inflated cell centers, meters
WALL_REPULSE_GAIN = 1.0


class InsufficientFreeSpace(Exception):
    pass


class ScenarioFormatError(Exception):
    pass


@dataclass
class SimConfig:
    dt: float = 0.05
    seed: int = 0
    pedestrian_count: int = 0
    arrival_tolerance: float = 0.3
    dwell: float = 2.0
    replan_period: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.dt <= 0.2:
            raise ValueError("dt must be in (0, 0.2]")
        if self.arrival_tolerance <= 0:
            raise ValueError("arrival_tolerance must be > 0")


@dataclass
class PedestrianState:
    id: int
    position: tuple[float, float]
    velocity: tuple[float, float]
    radius: float
    waypoint: tuple[float, float]
    speed: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("pedestrian radius must be > 0")
        if not PED_SPEED_MIN <= self.speed <= PED_SPEED_MAX:
            raise ValueError(f"pedestrian speed must be in [{PED_SPEED_MIN}, {PED_SPEED_MAX}]")


@dataclass(frozen=True)
class WorldSnapshot:
    tick: int
    sim_time: float
    robot: Pose2D
    command: VelocityCommand
    pedestrians: tuple[PedestrianState, ...]
    executor: ExecutorStatus
    path: Path | None
    collisions_so_far: int
    emergency_stops_so_far: int


def spawn_pedestrians(
    config: SimConfig,
    grid: GridMap,
    rng: np.random.Generator,
    robot_start: tuple[float, float],
) -> list[PedestrianState]:
    """Place pedestrians uniformly on free cells at least 1 m from the robot
    start, without replacement; speeds uniform in the walking range. They are
    dynamic, non-responsive obstacles and never react to the robot."""
    if config.pedestrian_count == 0:
        return []
    free = grid.free_cells()
    eligible = [
        c for c in free
        if math.hypot(grid.cell_to_world(*c)[0] - robot_start[0],
                      grid.cell_to_world(*c)[1] - robot_start[1]) >= MIN_SPAWN_DISTANCE
    ]
    if len(eligible) < config.pedestrian_count:
        raise InsufficientFreeSpace(
            f"need {config.pedestrian_count} spawn cells, only {len(eligible)} eligible"
        )
    picks = rng.choice(len(eligible), size=config.pedestrian_count, replace=False)
    pedestrians = []
    for i, idx in enumerate(picks):
        position = grid.cell_to_world(*eligible[int(idx)])
        speed = float(rng.uniform(PED_SPEED_MIN, PED_SPEED_MAX))
        waypoint = grid.cell_to_world(*free[int(rng.integers(len(free)))])
        pedestrians.append(
            PedestrianState(
                id=i,
                position=position,
                velocity=(0.0, 0.0),
                radius=PED_RADIUS_DEFAULT,
                waypoint=waypoint,
                speed=speed,
            )
        )
    return pedestrians


class Simulation:
    """One robot, one crowd, one task executor, stepped at a fixed dt.

    Only the owner of :meth:`tick` may mutate state; other threads interact
    through :meth:`enqueue_task` and immutable snapshots.
    """

    def __init__(
        self,
        grid: GridMap,
        landmarks: LandmarkDictionary,
        config: SimConfig,
        controller: ControllerParams,
        robot_start: Pose2D,
    ):
        self.grid = grid
        self.landmarks = landmarks
        self.config = config
        self.controller = controller
        self.inflated = grid.inflate(controller.robot_radius)
        self.robot = robot_start
        self.command = VelocityCommand(0.0, 0.0)
        self.executor = TaskExecutor(dwell=config.dwell)
        self.rng = np.random.default_rng(config.seed)
        self._free_cells = grid.free_cells()
        self.pedestrians = spawn_pedestrians(config, grid, self.rng, robot_start.position)
        self.tick_index = 0
        self.path: Path | None = None
        self.cursor: PathCursor | None = None
        self._replan_elapsed = 0.0
        self._dwell_ticks: int | None = None
        self.collisions_static = 0
        self.collisions_pedestrian = 0
        self.emergency_stops = 0
        self._ped_colliding: set[int] = set()
        self._static_colliding = False
        self.min_pedestrian_clearance: float | None = None
        self._inbox: "queue.Queue[TaskSpec]" = queue.Queue()

    @property
    def sim_time(self) -> float:
        return self.tick_index * self.config.dt

    def enqueue_task(self, task: TaskSpec) -> None:
        """Thread-safe handoff into the tick loop."""
        self._inbox.put(task)

    def pending_task_count(self) -> int:
        return len(self.executor.queue) + self._inbox.qsize()

    # -- tick ---------------------------------------------------------------

    def tick(self) -> list[Effect]:
        cfg = self.config
        params = self.controller
        now = self.sim_time
        tick_effects: list[Effect] = []
        events: list[FsmEvent] = []

        # (0) drain cross-thread submissions in arrival order
        while True:
            try:
                task = self._inbox.get_nowait()
            except queue.Empty:
                break
            try:
                effs = self.executor.submit(task, now)
            except QueueFull:
                log.warning("dropping task %s: queue full", task.command_id)
            else:
                self._handle_effects(effs)
                tick_effects.extend(effs)

        # (1) replan while navigating, when the timer elapses or no path exists
        goal = self.executor.goal_of()
        if goal is not None:
            self._replan_elapsed += cfg.dt
            if self.path is None or self._replan_elapsed >= cfg.replan_period - 1e-9:
                try:
                    self.path = plan_path(self.inflated, (self.robot.x, self.robot.y), goal)
                    self.cursor = PathCursor(self.path)
                    self._replan_elapsed = 0.0
                except (PlanningError, OutOfBounds) as exc:
                    self.path = None
                    self.cursor = None
                    events.append(FsmEvent.navigation_failed(type(exc).__name__))

        # (2)-(3) observe and choose a command
        if goal is not None and self.path is not None and self.cursor is not None:
            target = self.cursor.next_waypoint(self.robot, params)
            preferred = self._preferred_velocity(target)
            heading = self.robot.heading
            obs = ObservationSnapshot(
                robot=self.robot,
                robot_velocity=(
                    self.command.linear * math.cos(heading),
                    self.command.linear * math.sin(heading),
                ),
                pedestrians=[
                    Obstacle(
                        p.position[0], p.position[1], p.velocity[0], p.velocity[1],
                        p.radius + VO_SAFETY_MARGIN,
                    )
                    for p in self.pedestrians
                ],
                goal=goal,
                grid=self.inflated,
            )
            chosen, admissible = select_velocity(obs, preferred, params)
            if not admissible:
                command = VelocityCommand(0.0, 0.0)
                self.emergency_stops += 1
            else:
                command = to_diff_drive(chosen, self.robot, params)
                if command.linear > 0.0 and command_crosses_obstacle(self.robot, command, self.inflated):
                    command = VelocityCommand(0.0, 0.0)
                    self.emergency_stops += 1
        else:
            command = VelocityCommand(0.0, 0.0)
        self.command = command

        # (4) integrate robot unicycle kinematics (translate on the old
        # heading, then rotate)
        th = self.robot.heading
        self.robot = Pose2D(
            self.robot.x + command.linear * math.cos(th) * cfg.dt,
            self.robot.y + command.linear * math.sin(th) * cfg.dt,
            th + command.angular * cfg.dt,
        )

        # (5) integrate pedestrians
        for ped in self.pedestrians:
            self._step_pedestrian(ped)

        # (6) collisions and clearance; counted on entry, never fatal
        try:
            static_hit = self.grid.occupied_at_point(self.robot.x, self.robot.y)
        except OutOfBounds:
            static_hit = True
        if static_hit and not self._static_colliding:
            self.collisions_static += 1
        self._static_colliding = static_hit
        for ped in self.pedestrians:
            dist = math.hypot(ped.position[0] - self.robot.x, ped.position[1] - self.robot.y)
            combined = params.robot_radius + ped.radius
            clearance = dist - combined
            if self.min_pedestrian_clearance is None or clearance < self.min_pedestrian_clearance:
                self.min_pedestrian_clearance = clearance
            if dist < combined:
                if ped.id not in self._ped_colliding:
                    self.collisions_pedestrian += 1
                    self._ped_colliding.add(ped.id)
            else:
                self._ped_colliding.discard(ped.id)

        # (7) arrival and dwell events
        goal = self.executor.goal_of()
        if goal is not None:
            if math.hypot(goal[0] - self.robot.x, goal[1] - self.robot.y) <= cfg.arrival_tolerance:
                events.append(FsmEvent.arrived_at_goal())
        if self._dwell_ticks is not None:
            self._dwell_ticks -= 1
            if self._dwell_ticks <= 0:
                self._dwell_ticks = None
                events.append(FsmEvent.action_complete())

        # (8) feed events to the executor, in emission order
        for event in events:
            effs = self.executor.step(event, now)
            self._handle_effects(effs)
            tick_effects.extend(effs)

        self.tick_index += 1
        return tick_effects

    def _handle_effects(self, effects: list[Effect]) -> None:
        for eff in effects:
            if isinstance(eff, SetGoal):
                self.path = None
                self.cursor = None
                self._replan_elapsed = 0.0
            elif isinstance(eff, StartAction):
                self._dwell_ticks = max(1, math.ceil(eff.duration / self.config.dt - 1e-9))

    def _preferred_velocity(self, target: tuple[float, float]) -> tuple[float, float]:
        dx = target[0] - self.robot.x
        dy = target[1] - self.robot.y
        d = math.hypot(dx, dy)
        if d < 1e-9:
            return (0.0, 0.0)
        speed = self.controller.v_max
        if self.cursor is not None and self.cursor.at_final_waypoint:
            speed = min(speed, d)  # taper on final approach
        px, py = self._repulsion()
        vx = dx / d + px
        vy = dy / d + py
        norm = math.hypot(vx, vy)
        if norm < 1e-9:
            return (0.0, 0.0)
        return (vx / norm * speed, vy / norm * speed)

    def _repulsion(self) -> tuple[float, float]:
        """Short-range push away from pedestrians and inflated walls, added to
        the goal direction when forming the preferred velocity."""
        rx = ry = 0.0
        for ped in self.pedestrians:
            ox = self.robot.x - ped.position[0]
            oy = self.robot.y - ped.position[1]
            dist = math.hypot(ox, oy)
            if dist < 1e-9:
                continue
            surface = dist - (self.controller.robot_radius + ped.radius)
            if surface < PED_REPULSE_RANGE:
                w = (PED_REPULSE_RANGE - max(surface, 0.0)) / PED_REPULSE_RANGE
                rx += ox / dist * w * PED_REPULSE_GAIN
                ry += oy / dist * w * PED_REPULSE_GAIN
        grid = self.inflated
        reach = int(math.ceil(WALL_REPULSE_RANGE / grid.resolution)) + 1
        try:
            ccx, ccy = grid.world_to_cell(self.robot.x, self.robot.y)
        except OutOfBounds:
            return (rx, ry)
        for cx in range(ccx - reach, ccx + reach + 1):
            for cy in range(ccy - reach, ccy + reach + 1):
                if not grid.in_bounds_cell(cx, cy) or not grid.is_occupied(cx, cy):
                    continue
                wx, wy = grid.cell_to_world(cx, cy)
                ox = self.robot.x - wx
                oy = self.robot.y - wy
                dist = math.hypot(ox, oy)
                if dist < 1e-9 or dist >= WALL_REPULSE_RANGE:
                    continue
                w = (WALL_REPULSE_RANGE - dist) / WALL_REPULSE_RANGE
                rx += ox / dist * w * WALL_REPULSE_GAIN
                ry += oy / dist * w * WALL_REPULSE_GAIN
        return (rx, ry)

    def _step_pedestrian(self, ped: PedestrianState) -> None:
        px, py = ped.position
        wx, wy = ped.waypoint
        d = math.hypot(wx - px, wy - py)
        if d <= PED_WAYPOINT_TOLERANCE:
            ped.waypoint = self._random_free_point()
            wx, wy = ped.waypoint
            d = math.hypot(wx - px, wy - py)
        if d < 1e-9:
            ped.velocity = (0.0, 0.0)
            return
        vx = (wx - px) / d * ped.speed
        vy = (wy - py) / d * ped.speed
        nx, ny = px + vx * self.config.dt, py + vy * self.config.dt
        blocked = False
        try:
            if self.grid.occupied_at_point(nx, ny):
                blocked = True
        except OutOfBounds:
            blocked = True
        if blocked:
            # stay put this tick and retarget; keeps walkers out of walls
            ped.velocity = (0.0, 0.0)
            ped.waypoint = self._random_free_point()
        else:
            ped.position = (nx, ny)
            ped.velocity = (vx, vy)

    def _random_free_point(self) -> tuple[float, float]:
        idx = int(self.rng.integers(len(self._free_cells)))
        return self.grid.cell_to_world(*self._free_cells[idx])

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> WorldSnapshot:
        return WorldSnapshot(
            tick=self.tick_index,
            sim_time=self.sim_time,
            robot=self.robot,
            command=self.command,
            pedestrians=tuple(dataclasses.replace(p) for p in self.pedestrians),
            executor=self.executor.status(),
            path=Path(list(self.path.waypoints), self.path.total_cost) if self.path else None,
            collisions_so_far=self.collisions_static + self.collisions_pedestrian,
            emergency_stops_so_far=self.emergency_stops,
        )


# -- snapshot (de)serialization ---------------------------------------------


def _point_dict(p: tuple[float, float]) -> dict:
    return {"x": p[0], "y": p[1]}


def _point_from(d: dict) -> tuple[float, float]:
    return (d["x"], d["y"])


def snapshot_to_dict(s: WorldSnapshot) -> dict:
    return {
        "tick": s.tick,
        "sim_time": s.sim_time,
        "robot": {
            "pose": {"x": s.robot.x, "y": s.robot.y, "heading": s.robot.heading},
            "command": {"linear": s.command.linear, "angular": s.command.angular},
        },
        "pedestrians": [
            {
                "id": p.id,
                "position": _point_dict(p.position),
                "velocity": _point_dict(p.velocity),
                "radius": p.radius,
                "waypoint": _point_dict(p.waypoint),
                "speed": p.speed,
            }
            for p in s.pedestrians
        ],
        "executor": {
            "state": s.executor.state.value,
            "active_task": s.executor.active_task.to_dict() if s.executor.active_task else None,
            "queue": [t.to_dict() for t in s.executor.queue],
            "carried_item": s.executor.carried_item,
            "history": [{"t": t, "state": st, "event": ev} for t, st, ev in s.executor.history],
        },
        "path": (
            {"waypoints": [_point_dict(w) for w in s.path.waypoints], "total_cost": s.path.total_cost}
            if s.path
            else None
        ),
        "collisions_so_far": s.collisions_so_far,
        "emergency_stops_so_far": s.emergency_stops_so_far,
    }


def snapshot_from_dict(d: dict) -> WorldSnapshot:
    ex = d["executor"]
    return WorldSnapshot(
        tick=d["tick"],
        sim_time=d["sim_time"],
        robot=Pose2D(d["robot"]["pose"]["x"], d["robot"]["pose"]["y"], d["robot"]["pose"]["heading"]),
        command=VelocityCommand(d["robot"]["command"]["linear"], d["robot"]["command"]["angular"]),
        pedestrians=tuple(
            PedestrianState(
                id=p["id"],
                position=_point_from(p["position"]),
                velocity=_point_from(p["velocity"]),
                radius=p["radius"],
                waypoint=_point_from(p["waypoint"]),
                speed=p["speed"],
            )
            for p in d["pedestrians"]
        ),
        executor=ExecutorStatus(
            state=FsmState(ex["state"]),
            active_task=TaskSpec.from_dict(ex["active_task"]) if ex["active_task"] else None,
            queue=tuple(TaskSpec.from_dict(t) for t in ex["queue"]),
            carried_item=ex["carried_item"],
            history=tuple((h["t"], h["state"], h["event"]) for h in ex["history"]),
        ),
        path=(
            Path([_point_from(w) for w in d["path"]["waypoints"]], d["path"]["total_cost"])
            if d["path"]
            else None
        ),
        collisions_so_far=d["collisions_so_far"],
        emergency_stops_so_far=d["emergency_stops_so_far"],
    )


def serialize_snapshot(s: WorldSnapshot) -> str:
    return json.dumps(snapshot_to_dict(s), sort_keys=True)


# -- scenario files -----------------------------------------------------------


@dataclass
class Scenario:
    map_path: str
    landmarks_path: str
    robot_start: Pose2D
    pedestrian_count: int = 0
    seed: int = 0
    commands: list[tuple[float, str]] = field(default_factory=list)
    params: dict[str, float] = field(default_factory=dict)


def parse_scenario(text: str) -> Scenario:
    map_path = None
    landmarks_path = None
    robot_start = None
    pedestrian_count = 0
    seed = 0
    commands: list[tuple[float, str]] = []
    params: dict[str, float] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            tokens = shlex.split(stripped)
        except ValueError as exc:
            raise ScenarioFormatError(f"line {lineno}: {exc}") from None
        key = tokens[0]
        try:
            if key == "map" and len(tokens) == 2:
                map_path = tokens[1]
            elif key == "landmarks" and len(tokens) == 2:
                landmarks_path = tokens[1]
            elif key == "robot_start" and len(tokens) == 4:
                robot_start = Pose2D(float(tokens[1]), float(tokens[2]), float(tokens[3]))
            elif key == "pedestrians" and len(tokens) == 2:
                pedestrian_count = int(tokens[1])
            elif key == "seed" and len(tokens) == 2:
                seed = int(tokens[1])
            elif key == "at" and len(tokens) == 4 and tokens[2] == "command":
                commands.append((float(tokens[1]), tokens[3]))
            elif key == "param" and len(tokens) == 3:
                params[tokens[1]] = float(tokens[2])
            else:
                raise ScenarioFormatError(f"line {lineno}: unrecognized directive {stripped!r}")
        except ValueError as exc:
            raise ScenarioFormatError(f"line {lineno}: {exc}") from None

    if map_path is None or landmarks_path is None or robot_start is None:
        raise ScenarioFormatError("scenario requires map, landmarks, and robot_start lines")
    if pedestrian_count < 0:
        raise ScenarioFormatError("pedestrian count must be >= 0")
    return Scenario(map_path, landmarks_path, robot_start, pedestrian_count, seed, commands, params)


def serialize_scenario(sc: Scenario) -> str:
    """Canonical writer: fixed directive order, repr floats, quoted commands."""
    out = [
        f"map {sc.map_path}",
        f"landmarks {sc.landmarks_path}",
        "robot_start {} {} {}".format(
            repr(sc.robot_start.x), repr(sc.robot_start.y), repr(sc.robot_start.heading)
        ),
        f"pedestrians {sc.pedestrian_count}",
        f"seed {sc.seed}",
    ]
    for name, value in sc.params.items():
        out.append(f"param {name} {value!r}")
    for t, text in sc.commands:
        out.append(f'at {t!r} command "{text}"')
    return "\n".join(out) + "\n"


@dataclass
class ScenarioBundle:
    scenario: Scenario
    grid: GridMap
    landmarks: LandmarkDictionary
    config: SimConfig
    controller: ControllerParams


def _apply_param_overrides(
    overrides: dict[str, float], config: SimConfig, controller: ControllerParams
) -> tuple[SimConfig, ControllerParams]:
    sim_fields = {f.name: f for f in dataclasses.fields(SimConfig)}
    ctl_fields = {f.name: f for f in dataclasses.fields(ControllerParams)}
    for name, value in overrides.items():
        if name in sim_fields:
            cast = int(value) if sim_fields[name].type == "int" else float(value)
            config = dataclasses.replace(config, **{name: cast})
        elif name in ctl_fields:
            cast = int(value) if ctl_fields[name].type == "int" else float(value)
            controller = dataclasses.replace(controller, **{name: cast})
        else:
            raise ScenarioFormatError(f"unknown param override {name!r}")
    return config, controller


def load_scenario_bundle(
    path: str | FilePath,
    *,
    seed: int | None = None,
    pedestrian_count: int | None = None,
) -> ScenarioBundle:
    """Load a scenario plus the map and landmark files it references
    (relative paths resolve against the scenario file's directory)."""
    path = FilePath(path)
    scenario = parse_scenario(path.read_text())
    base = path.parent
    grid = load_map((base / scenario.map_path).read_text())
    landmarks = load_landmarks((base / scenario.landmarks_path).read_text(), grid)
    config = SimConfig(
        seed=scenario.seed if seed is None else seed,
        pedestrian_count=scenario.pedestrian_count if pedestrian_count is None else pedestrian_count,
    )
    controller = ControllerParams()
    config, controller = _apply_param_overrides(scenario.params, config, controller)
    return ScenarioBundle(scenario, grid, landmarks, config, controller)


def build_simulation(bundle: ScenarioBundle) -> Simulation:
    return Simulation(
        grid=bundle.grid,
        landmarks=bundle.landmarks,
        config=bundle.config,
        controller=bundle.controller,
        robot_start=bundle.scenario.robot_start,
    )


# -- headless scripted runs ----------------------------------------------------


@dataclass
class MetricsReport:
    tasks_completed: int
    tasks_failed: int
    parse_failures: int
    collisions: int
    static_collisions: int
    pedestrian_collisions: int
    emergency_stops: int
    completed_order: list[str]
    sim_time_per_task: list[float]
    min_pedestrian_clearance: float | None
    ticks: int
    sim_time: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_MAX_TICKS = 20000


def run_scripted(
    scenario_path: str | FilePath,
    *,
    max_ticks: int = DEFAULT_MAX_TICKS,
    seed: int | None = None,
    translator: TranslatorConfig | None = None,
    record: list[str] | None = None,
) -> MetricsReport:
    """Execute a scenario's timed command script headlessly and report metrics.

    Commands are interpreted when their injection time arrives (ids and
    timestamps come from sim time, keeping runs reproducible). The run stops
    once the script is exhausted and the executor is idle, or at the tick cap.
    Passing a list as ``record`` collects one canonical JSON snapshot line per
    tick for determinism comparisons.
    """
    bundle = load_scenario_bundle(scenario_path, seed=seed)
    sim = build_simulation(bundle)
    tcfg = translator or TranslatorConfig()
    pending = sorted(bundle.scenario.commands, key=lambda c: c[0])

    parse_failures = 0
    completed: list[TaskSpec] = []
    failed: list[TaskSpec] = []
    start_times: dict[str, float] = {}
    durations: list[float] = []
    prev_active: str | None = None
    n_commands = 0

    while sim.tick_index < max_ticks:
        now = sim.sim_time
        while pending and pending[0][0] <= now + 1e-9:
            _, text = pending.pop(0)
            n_commands += 1
            try:
                task = interpret(
                    CommandText(text, Source.CLI),
                    tcfg,
                    bundle.landmarks,
                    command_id=f"cmd-{n_commands:04d}",
                    issued_at=now,
                )
            except (NluError, UnknownLocation, AmbiguousLocation) as exc:
                log.warning("scripted command failed to parse: %s (%s)", text, exc)
                parse_failures += 1
            else:
                sim.enqueue_task(task)

        effects = sim.tick()

        active = sim.executor.active_task
        if active is not None and active.command_id != prev_active:
            start_times.setdefault(active.command_id, now)
            prev_active = active.command_id
        elif active is None:
            prev_active = None

        for eff in effects:
            if isinstance(eff, TaskCompleted):
                completed.append(eff.task)
                started = start_times.get(eff.task.command_id, eff.task.issued_at)
                durations.append(sim.sim_time - started)
            elif isinstance(eff, TaskFailed):
                failed.append(eff.task)

        if record is not None:
            record.append(serialize_snapshot(sim.snapshot()))

        if not pending and sim.executor.state is FsmState.IDLE and sim._inbox.empty():
            break

    return MetricsReport(
        tasks_completed=len(completed),
        tasks_failed=len(failed),
        parse_failures=parse_failures,
        collisions=sim.collisions_static + sim.collisions_pedestrian,
        static_collisions=sim.collisions_static,
        pedestrian_collisions=sim.collisions_pedestrian,
        emergency_stops=sim.emergency_stops,
        completed_order=[t.command_id for t in completed],
        sim_time_per_task=durations,
        min_pedestrian_clearance=sim.min_pedestrian_clearance,
        ticks=sim.tick_index,
        sim_time=sim.sim_time,
    )
