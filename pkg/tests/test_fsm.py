import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errandbot.fsm import (
    MAX_QUEUE,
    ClearCarried,
    EventKind,
    FsmEvent,
    FsmState,
    QueueFull,
    SetGoal,
    StartAction,
    TaskCompleted,
    TaskExecutor,
    TaskFailed,
)
from errandbot.nlu import TaskSpec
from errandbot.world import LandmarkRef


def _task(n=0):
    return TaskSpec(
        pickup=LandmarkRef("security", (0.0, 0.0)),
        delivery=LandmarkRef("trail", (3.0, 4.0)),
        item=f"item-{n}",
        command_id=f"cmd-{n:04d}",
        issued_at=0.0,
    )


def _executor_in(state: FsmState) -> TaskExecutor:
    """Drive a fresh executor into the requested state via real transitions."""
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
    assert ex.state is FsmState.DELIVERING_ITEM
    return ex


def test_submit_to_idle_starts_navigation():
    ex = TaskExecutor()
    effects = ex.submit(_task())
    assert ex.state is FsmState.NAVIGATING_TO_PICKUP
    assert ex.active_task == _task()
    assert effects == [SetGoal(_task().pickup)]


def test_submit_while_busy_queues_fifo():
    ex = _executor_in(FsmState.NAVIGATING_TO_PICKUP)
    assert ex.submit(_task(1)) == []
    assert [t.command_id for t in ex.queue] == ["cmd-0001"]
    assert ex.state is FsmState.NAVIGATING_TO_PICKUP


def test_queue_full():
    ex = _executor_in(FsmState.NAVIGATING_TO_PICKUP)
    for i in range(1, MAX_QUEUE + 1):
        ex.submit(_task(i))
    with pytest.raises(QueueFull):
        ex.submit(_task(99))


def test_arrival_starts_pickup_action():
    ex = _executor_in(FsmState.NAVIGATING_TO_PICKUP)
    effects = ex.step(FsmEvent.arrived_at_goal())
    assert ex.state is FsmState.PICKING_UP_ITEM
    assert effects == [StartAction("pickup", ex.dwell)]


def test_pickup_complete_sets_delivery_goal_and_carries():
    ex = _executor_in(FsmState.PICKING_UP_ITEM)
    effects = ex.step(FsmEvent.action_complete())
    assert ex.state is FsmState.NAVIGATING_TO_DELIVERY
    assert ex.carried_item == "item-0"
    assert effects == [SetGoal(_task().delivery)]


def test_delivery_complete_empty_queue_goes_idle():
    ex = _executor_in(FsmState.DELIVERING_ITEM)
    effects = ex.step(FsmEvent.action_complete())
    assert ex.state is FsmState.IDLE
    assert ex.carried_item is None
    assert ClearCarried() in effects
    assert TaskCompleted(_task()) in effects


def test_delivery_complete_dequeues_next():
    ex = _executor_in(FsmState.DELIVERING_ITEM)
    ex.submit(_task(1))
    effects = ex.step(FsmEvent.action_complete())
    assert ex.state is FsmState.NAVIGATING_TO_PICKUP
    assert ex.active_task.command_id == "cmd-0001"
    assert SetGoal(_task(1).pickup) in effects


def test_ignored_pair_warns_and_keeps_state(caplog):
    ex = TaskExecutor()
    with caplog.at_level("WARNING"):
        effects = ex.step(FsmEvent.arrived_at_goal())
    assert ex.state is FsmState.IDLE
    assert effects == []
    assert any("ignoring event" in r.message for r in caplog.records)


@pytest.mark.parametrize("state", list(FsmState))
def test_abort_goes_idle_and_keeps_queue(state):
    ex = _executor_in(state)
    ex.queue.append(_task(7))
    ex.step(FsmEvent.abort())
    assert ex.state is FsmState.IDLE
    assert ex.carried_item is None
    assert ex.active_task is None
    assert [t.command_id for t in ex.queue] == ["cmd-0007"]


def test_queue_survives_abort_and_resumes_in_order():
    ex = _executor_in(FsmState.NAVIGATING_TO_PICKUP)
    ex.submit(_task(1))
    ex.step(FsmEvent.abort())
    # next submission resumes from the queue front, not the new task
    ex.submit(_task(2))
    assert ex.active_task.command_id == "cmd-0001"
    assert [t.command_id for t in ex.queue] == ["cmd-0002"]


def test_navigation_failed_marks_task_failed():
    ex = _executor_in(FsmState.NAVIGATING_TO_PICKUP)
    effects = ex.step(FsmEvent.navigation_failed("NoPath"))
    assert ex.state is FsmState.IDLE
    assert effects == [TaskFailed(_task(), "NoPath")]


def test_goal_of_by_state():
    assert _executor_in(FsmState.IDLE).goal_of() is None
    assert _executor_in(FsmState.NAVIGATING_TO_PICKUP).goal_of() == (0.0, 0.0)
    assert _executor_in(FsmState.PICKING_UP_ITEM).goal_of() is None
    assert _executor_in(FsmState.NAVIGATING_TO_DELIVERY).goal_of() == (3.0, 4.0)
    assert _executor_in(FsmState.DELIVERING_ITEM).goal_of() is None


def _event_of(kind):
    if kind is EventKind.NEW_TASK:
        return FsmEvent.new_task(_task(50))
    if kind is EventKind.NAVIGATION_FAILED:
        return FsmEvent.navigation_failed("test")
    return FsmEvent(kind)


def test_exhaustive_closure():
    for state, kind in itertools.product(FsmState, EventKind):
        ex = _executor_in(state)
        ex.step(_event_of(kind))
        assert ex.state in set(FsmState)


def test_five_step_sequence_returns_to_idle():
    ex = TaskExecutor()
    ex.step(FsmEvent.new_task(_task()))
    for event in [FsmEvent.arrived_at_goal(), FsmEvent.action_complete(),
                  FsmEvent.arrived_at_goal(), FsmEvent.action_complete()]:
        ex.step(event)
    assert ex.state is FsmState.IDLE
    assert ex.carried_item is None
    assert ex.active_task is None


def test_history_records_transitions():
    ex = TaskExecutor()
    ex.submit(_task(), now=1.5)
    assert ex.history[-1] == (1.5, "NavigatingToPickup", "NewTask(cmd-0000)")


@settings(max_examples=200)
@given(st.lists(st.sampled_from(["submit", "arrive", "complete", "abort", "fail"]), max_size=40))
def test_queue_conservation_under_random_interleavings(script):
    ex = TaskExecutor()
    submitted = []
    completed = []
    n = 0
    for op in script:
        if op == "submit":
            if len(ex.queue) >= MAX_QUEUE:
                continue
            task = _task(n)
            submitted.append(task.command_id)
            ex.submit(task)
            n += 1
            continue
        event = {
            "arrive": FsmEvent.arrived_at_goal(),
            "complete": FsmEvent.action_complete(),
            "abort": FsmEvent.abort(),
            "fail": FsmEvent.navigation_failed("x"),
        }[op]
        for eff in ex.step(event):
            if isinstance(eff, TaskCompleted):
                completed.append(eff.task.command_id)
    # drive everything remaining to completion
    guard = 0
    while ex.state is not FsmState.IDLE or ex.queue:
        if ex.state is FsmState.IDLE and ex.queue:
            ex.submit(_task(n))  # a fresh submission resumes the queue front
            submitted.append(f"cmd-{n:04d}")
            n += 1
        for event in [FsmEvent.arrived_at_goal(), FsmEvent.action_complete(),
                      FsmEvent.arrived_at_goal(), FsmEvent.action_complete()]:
            for eff in ex.step(event):
                if isinstance(eff, TaskCompleted):
                    completed.append(eff.task.command_id)
        guard += 1
        assert guard < 200
    assert len(completed) == len(set(completed))  # nothing runs twice
    # completed tasks appear in submission order (aborted/failed ones drop out)
    order = {cid: i for i, cid in enumerate(submitted)}
    indices = [order[c] for c in completed]
    assert indices == sorted(indices)
