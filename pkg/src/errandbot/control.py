"""Local control: sampled velocity obstacles plus differential-drive conversion.

The admissibility test and the candidate grid are spelled out exactly (down to
evaluation order of the arithmetic) so an exhaustive reference search over the
same candidate set reproduces the selection bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .planning import Path
from .world import GridMap, OutOfBounds, Pose2D, wrap_angle


@dataclass(frozen=True)
class ControllerParams:
    v_max: float = 0.7
    omega_max: float = 1.5
    robot_radius: float = 0.3
    horizon: float = 3.0
    n_speed: int = 8
    n_heading: int = 24
    heading_gain: float = 2.0
    waypoint_advance_radius: float = 0.4

    def __post_init__(self):
        for name in ("v_max", "omega_max", "robot_radius", "horizon",
                     "heading_gain", "waypoint_advance_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.n_speed < 2:
            raise ValueError("n_speed must be >= 2")
        if self.n_heading < 8:
            raise ValueError("n_heading must be >= 8")


@dataclass(frozen=True)
class VelocityCommand:
    linear: float
    angular: float


@dataclass(frozen=True)
class Obstacle:
    """A moving disc as the controller sees it (a pedestrian, typically)."""

    x: float
    y: float
    vx: float
    vy: float
    radius: float


@dataclass
class ObservationSnapshot:
    robot: Pose2D
    robot_velocity: tuple[float, float]
    pedestrians: list[Obstacle]
    goal: tuple[float, float]
    grid: GridMap | None = None


@dataclass(frozen=True)
class VelocityCone:
    """Truncated collision cone in velocity space for one obstacle.

    Velocities inside the cone (relative to ``apex``, the obstacle velocity)
    reach the combined radius within the horizon. ``all_blocking`` marks the
    degenerate already-overlapping case d <= R.
    """

    apex: tuple[float, float]
    axis: float
    half_angle: float
    horizon: float
    all_blocking: bool


def compute_velocity_obstacles(obs: ObservationSnapshot, params: ControllerParams) -> list[VelocityCone]:
    cones = []
    rx, ry = obs.robot.x, obs.robot.y
    for ped in obs.pedestrians:
        px, py = ped.x - rx, ped.y - ry
        d = math.hypot(px, py)
        combined = params.robot_radius + ped.radius
        axis = math.atan2(py, px)
        if d <= combined:
            cones.append(VelocityCone((ped.vx, ped.vy), axis, math.pi, params.horizon, True))
        else:
            half = math.asin(combined / d)
            cones.append(VelocityCone((ped.vx, ped.vy), axis, half, params.horizon, False))
    return cones


def candidate_velocities(preferred: tuple[float, float], params: ControllerParams) -> list[tuple[float, float]]:
    """The fixed polar sampling grid, plus the zero and preferred velocities.

    speeds[i] = v_max * i / (n_speed - 1); headings[k] = -pi + 2*pi*(k+1)/n_heading,
    which spans (-pi, pi]. Expressions are kept in this exact form so reference
    implementations can reproduce the floats.
    """
    cands: list[tuple[float, float]] = []
    for i in range(params.n_speed):
        s = params.v_max * i / (params.n_speed - 1)
        for k in range(params.n_heading):
            h = -math.pi + (2.0 * math.pi * (k + 1)) / params.n_heading
            cands.append((s * math.cos(h), s * math.sin(h)))
    cands.append((0.0, 0.0))
    cands.append((preferred[0], preferred[1]))
    return cands


def _blocked_any(cands: np.ndarray, obs: ObservationSnapshot, params: ControllerParams) -> np.ndarray:
    """Mask of candidates whose closest approach to any obstacle within the
    horizon falls below the combined radius (squared comparison throughout)."""
    vx = cands[:, 0]
    vy = cands[:, 1]
    blocked = np.zeros(len(cands), dtype=bool)
    rx, ry = obs.robot.x, obs.robot.y
    tau = params.horizon
    for ped in obs.pedestrians:
        px = ped.x - rx
        py = ped.y - ry
        combined = params.robot_radius + ped.radius
        r2 = combined * combined
        d2 = px * px + py * py
        if d2 <= r2:
            blocked[:] = True  # already overlapping: every velocity collides
            return blocked
        relx = vx - ped.vx
        rely = vy - ped.vy
        s2 = relx * relx + rely * rely
        safe_s2 = np.where(s2 > 0.0, s2, 1.0)
        t_star = np.where(s2 > 0.0, (px * relx + py * rely) / safe_s2, 0.0)
        t_c = np.clip(t_star, 0.0, tau)
        cx = px - t_c * relx
        cy = py - t_c * rely
        dmin2 = cx * cx + cy * cy
        blocked |= dmin2 < r2
    return blocked


def select_velocity(
    obs: ObservationSnapshot,
    preferred: tuple[float, float],
    params: ControllerParams,
) -> tuple[tuple[float, float], bool]:
    """Pick the admissible sampled velocity closest to the preferred one.

    Ties break on smaller |heading change from the robot heading|, then smaller
    speed, then smaller heading. With no admissible candidate, returns the zero
    velocity flagged inadmissible (emergency stop).
    """
    if preferred[0] * preferred[0] + preferred[1] * preferred[1] > params.v_max * params.v_max * (1 + 1e-12):
        raise ValueError("preferred velocity exceeds v_max")

    cands = candidate_velocities(preferred, params)
    arr = np.asarray(cands, dtype=float)
    blocked = _blocked_any(arr, obs, params)
    if bool(blocked.all()):
        return ((0.0, 0.0), False)

    heading = obs.robot.heading
    best = None
    best_key = None
    for idx in np.nonzero(~blocked)[0]:
        vx, vy = cands[int(idx)]
        dpx = vx - preferred[0]
        dpy = vy - preferred[1]
        h = math.atan2(vy, vx)
        key = (
            dpx * dpx + dpy * dpy,
            abs(wrap_angle(h - heading)),
            vx * vx + vy * vy,
            h,
        )
        if best_key is None or key < best_key:
            best_key = key
            best = (vx, vy)
    assert best is not None
    return (best, True)


def to_diff_drive(velocity: tuple[float, float], robot: Pose2D, params: ControllerParams) -> VelocityCommand:
    """Project a holonomic velocity onto (linear, angular) for a unicycle.

    angular = clamp(k * heading_error); linear = |v| * max(0, cos(error)),
    so a target behind the robot turns in place rather than reversing.
    """
    speed = math.hypot(velocity[0], velocity[1])
    theta_des = math.atan2(velocity[1], velocity[0])
    e = wrap_angle(theta_des - robot.heading)
    angular = max(-params.omega_max, min(params.omega_max, params.heading_gain * e))
    linear = max(0.0, min(params.v_max, speed * max(0.0, math.cos(e))))
    return VelocityCommand(linear, angular)


class PathCursor:
    """Monotone progress marker along a planned path.

    Advances past every waypoint within the advance radius and never moves
    backward; owned by the single simulation tick thread.
    """

    def __init__(self, path: Path):
        self._waypoints = path.waypoints
        self._index = 0

    def next_waypoint(self, robot: Pose2D, params: ControllerParams) -> tuple[float, float]:
        wps = self._waypoints
        while (
            self._index < len(wps) - 1
            and math.hypot(wps[self._index][0] - robot.x, wps[self._index][1] - robot.y)
            <= params.waypoint_advance_radius
        ):
            self._index += 1
        return wps[self._index]

    @property
    def at_final_waypoint(self) -> bool:
        return self._index == len(self._waypoints) - 1


def command_crosses_obstacle(
    robot: Pose2D,
    command: VelocityCommand,
    grid: GridMap,
    horizon: float = 0.5,
    steps: int = 10,
) -> bool:
    """True when integrating the commanded arc enters an occupied cell (or
    leaves the map) within the horizon. Used as a static-obstacle guard in
    front of the velocity-obstacle output."""
    x, y, th = robot.x, robot.y, robot.heading
    dt = horizon / steps
    for _ in range(steps):
        x += command.linear * math.cos(th) * dt
        y += command.linear * math.sin(th) * dt
        th += command.angular * dt
        try:
            if grid.occupied_at_point(x, y):
                return True
        except OutOfBounds:
            return True
    return False
