"""Global path planning: A* over the 8-connected inflated occupancy grid."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .world import GridMap

SQRT2 = math.sqrt(2.0)

# 8-neighborhood: (dx, dy, unit cost)
_MOVES = [
    (1, 0, 1.0),
    (-1, 0, 1.0),
    (0, 1, 1.0),
    (0, -1, 1.0),
    (1, 1, SQRT2),
    (1, -1, SQRT2),
    (-1, 1, SQRT2),
    (-1, -1, SQRT2),
]


class PlanningError(Exception):
    pass


class StartOccupied(PlanningError):
    pass


class GoalOccupied(PlanningError):
    pass


class NoPath(PlanningError):
    pass


@dataclass
class Path:
    waypoints: list[tuple[float, float]]
    total_cost: float


def octile_distance(a: tuple[int, int], b: tuple[int, int]) -> float:
    """Shortest 8-connected metric in cell units: max + (sqrt2 - 1) * min."""
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    return max(dx, dy) + (SQRT2 - 1.0) * min(dx, dy)


def plan_path(grid: GridMap, start: tuple[float, float], goal: tuple[float, float]) -> Path:
    """Minimal-cost path between two world points on an inflated grid.

    Axial moves cost resolution, diagonals sqrt(2) * resolution; a diagonal is
    forbidden when both adjacent axial cells are occupied (no corner cutting).
    Waypoints are cell centers, first the start cell and last the goal cell.
    """
    start_cell = grid.world_to_cell(*start)
    goal_cell = grid.world_to_cell(*goal)
    if grid.is_occupied(*start_cell):
        raise StartOccupied(f"start cell {start_cell} is occupied")
    if grid.is_occupied(*goal_cell):
        raise GoalOccupied(f"goal cell {goal_cell} is occupied")

    res = grid.resolution
    if start_cell == goal_cell:
        return Path([grid.cell_to_world(*start_cell)], 0.0)

    def free(cx: int, cy: int) -> bool:
        return grid.in_bounds_cell(cx, cy) and not grid.is_occupied(cx, cy)

    g_score: dict[tuple[int, int], float] = {start_cell: 0.0}
    came_from: dict[tuple[int, int], tuple[int, int]] = {}
    # Counter breaks heap ties deterministically (insertion order).
    counter = 0
    open_heap: list[tuple[float, int, tuple[int, int]]] = [
        (octile_distance(start_cell, goal_cell) * res, counter, start_cell)
    ]
    closed: set[tuple[int, int]] = set()

    while open_heap:
        _, _, current = heapq.heappop(open_heap)
        if current in closed:
            continue
        if current == goal_cell:
            waypoints = [current]
            while waypoints[-1] in came_from:
                waypoints.append(came_from[waypoints[-1]])
            waypoints.reverse()
            return Path([grid.cell_to_world(*c) for c in waypoints], g_score[goal_cell])
        closed.add(current)

        cx, cy = current
        for dx, dy, unit in _MOVES:
            nx, ny = cx + dx, cy + dy
            if not free(nx, ny):
                continue
            # No corner cutting: a diagonal requires both axial cells free,
            # otherwise the segment between centers grazes the blocked corner.
            if dx != 0 and dy != 0:
                if not (free(cx + dx, cy) and free(cx, cy + dy)):
                    continue
            tentative = g_score[current] + unit * res
            neighbor = (nx, ny)
            if neighbor not in g_score or tentative < g_score[neighbor]:
                g_score[neighbor] = tentative
                came_from[neighbor] = current
                counter += 1
                f = tentative + octile_distance(neighbor, goal_cell) * res
                heapq.heappush(open_heap, (f, counter, neighbor))

    raise NoPath(f"no path from {start_cell} to {goal_cell}")
