"""Sequential task execution: a five-state machine with a FIFO task queue.

The executor is single-owner (the simulation tick thread). Submissions from
other threads must be handed over through a serialized queue; the machine
itself never runs concurrently.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .nlu import TaskSpec
from .world import LandmarkRef

log = logging.getLogger(__name__)

MAX_QUEUE = 32


class QueueFull(Exception):
    pass


class FsmState(str, Enum):
    IDLE = "Idle"
    NAVIGATING_TO_PICKUP = "NavigatingToPickup"
    PICKING_UP_ITEM = "PickingUpItem"
    NAVIGATING_TO_DELIVERY = "NavigatingToDelivery"
    DELIVERING_ITEM = "DeliveringItem"


class EventKind(str, Enum):
    NEW_TASK = "NewTask"
    ARRIVED_AT_GOAL = "ArrivedAtGoal"
    ACTION_COMPLETE = "ActionComplete"
    ABORT = "Abort"
    NAVIGATION_FAILED = "NavigationFailed"


@dataclass(frozen=True)
class FsmEvent:
    kind: EventKind
    task: TaskSpec | None = None
    reason: str | None = None

    @classmethod
    def new_task(cls, task: TaskSpec) -> "FsmEvent":
        return cls(EventKind.NEW_TASK, task=task)

    @classmethod
    def arrived_at_goal(cls) -> "FsmEvent":
        return cls(EventKind.ARRIVED_AT_GOAL)

    @classmethod
    def action_complete(cls) -> "FsmEvent":
        return cls(EventKind.ACTION_COMPLETE)

    @classmethod
    def abort(cls) -> "FsmEvent":
        return cls(EventKind.ABORT)

    @classmethod
    def navigation_failed(cls, reason: str) -> "FsmEvent":
        return cls(EventKind.NAVIGATION_FAILED, reason=reason)

    def describe(self) -> str:
        if self.kind is EventKind.NEW_TASK and self.task is not None:
            return f"NewTask({self.task.command_id})"
        if self.kind is EventKind.NAVIGATION_FAILED:
            return f"NavigationFailed({self.reason})"
        return self.kind.value


# Effects emitted by transitions, for the surrounding engine to act on.

@dataclass(frozen=True)
class SetGoal:
    target: LandmarkRef


@dataclass(frozen=True)
class StartAction:
    action: str  # "pickup" | "deliver"
    duration: float


@dataclass(frozen=True)
class ClearCarried:
    pass


@dataclass(frozen=True)
class TaskCompleted:
    task: TaskSpec


@dataclass(frozen=True)
class TaskFailed:
    task: TaskSpec
    reason: str


Effect = SetGoal | StartAction | ClearCarried | TaskCompleted | TaskFailed


@dataclass(frozen=True)
class ExecutorStatus:
    """Immutable snapshot of the executor for publication."""

    state: FsmState
    active_task: TaskSpec | None
    queue: tuple[TaskSpec, ...]
    carried_item: str | None
    history: tuple[tuple[float, str, str], ...]


class TaskExecutor:
    """The five-state pick-and-delivery executor.

    Unlisted (state, event) pairs are ignored with a logged warning rather
    than rejected: spurious arrival events from the simulator must not crash
    execution. Abort and navigation failure return to Idle but keep the queue;
    queued work resumes on the next submission (FIFO order preserved).
    """

    def __init__(self, dwell: float = 2.0):
        self.dwell = dwell
        self.state = FsmState.IDLE
        self.active_task: TaskSpec | None = None
        self.queue: deque[TaskSpec] = deque()
        self.carried_item: str | None = None
        self.history: list[tuple[float, str, str]] = []

    def submit(self, task: TaskSpec, now: float = 0.0) -> list[Effect]:
        """Queue a task; if idle, activation happens immediately. Tasks are
        always pulled from the queue front so order survives aborts. An idle
        submission nets no queue growth, so the bound only applies while busy."""
        if self.state is not FsmState.IDLE and len(self.queue) >= MAX_QUEUE:
            raise QueueFull(f"task queue is limited to {MAX_QUEUE} entries")
        self.queue.append(task)
        if self.state is FsmState.IDLE:
            return self.step(FsmEvent.new_task(self.queue.popleft()), now)
        return []

    def step(self, event: FsmEvent, now: float = 0.0) -> list[Effect]:
        effects: list[Effect] = []
        state, kind = self.state, event.kind

        if kind is EventKind.ABORT:
            self.state = FsmState.IDLE
            self.active_task = None
            self.carried_item = None
            effects.append(ClearCarried())
        elif kind is EventKind.NAVIGATION_FAILED:
            failed = self.active_task
            self.state = FsmState.IDLE
            self.active_task = None
            self.carried_item = None
            if failed is not None:
                effects.append(TaskFailed(failed, event.reason or "navigation failed"))
        elif state is FsmState.IDLE and kind is EventKind.NEW_TASK and event.task is not None:
            self.state = FsmState.NAVIGATING_TO_PICKUP
            self.active_task = event.task
            effects.append(SetGoal(event.task.pickup))
        elif state is FsmState.NAVIGATING_TO_PICKUP and kind is EventKind.ARRIVED_AT_GOAL:
            self.state = FsmState.PICKING_UP_ITEM
            effects.append(StartAction("pickup", self.dwell))
        elif state is FsmState.PICKING_UP_ITEM and kind is EventKind.ACTION_COMPLETE:
            assert self.active_task is not None
            self.state = FsmState.NAVIGATING_TO_DELIVERY
            self.carried_item = self.active_task.item
            effects.append(SetGoal(self.active_task.delivery))
        elif state is FsmState.NAVIGATING_TO_DELIVERY and kind is EventKind.ARRIVED_AT_GOAL:
            self.state = FsmState.DELIVERING_ITEM
            effects.append(StartAction("deliver", self.dwell))
        elif state is FsmState.DELIVERING_ITEM and kind is EventKind.ACTION_COMPLETE:
            assert self.active_task is not None
            completed = self.active_task
            self.carried_item = None
            effects.append(ClearCarried())
            effects.append(TaskCompleted(completed))
            if self.queue:
                nxt = self.queue.popleft()
                self.active_task = nxt
                self.state = FsmState.NAVIGATING_TO_PICKUP
                effects.append(SetGoal(nxt.pickup))
            else:
                self.active_task = None
                self.state = FsmState.IDLE
        else:
            log.warning("ignoring event %s in state %s", event.describe(), state.value)

        self.history.append((now, self.state.value, event.describe()))
        self._check_invariants()
        return effects

    def goal_of(self) -> tuple[float, float] | None:
        """World goal while navigating; None in all other states."""
        if self.state is FsmState.NAVIGATING_TO_PICKUP and self.active_task:
            return self.active_task.pickup.position
        if self.state is FsmState.NAVIGATING_TO_DELIVERY and self.active_task:
            return self.active_task.delivery.position
        return None

    def status(self) -> ExecutorStatus:
        return ExecutorStatus(
            state=self.state,
            active_task=self.active_task,
            queue=tuple(self.queue),
            carried_item=self.carried_item,
            history=tuple(self.history),
        )

    def _check_invariants(self) -> None:
        carrying_states = (FsmState.NAVIGATING_TO_DELIVERY, FsmState.DELIVERING_ITEM)
        assert (self.carried_item is not None) == (self.state in carrying_states), (
            f"carried_item={self.carried_item!r} inconsistent with state {self.state}"
        )
        assert (self.active_task is not None) == (self.state is not FsmState.IDLE), (
            f"active_task presence inconsistent with state {self.state}"
        )
