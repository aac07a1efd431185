"""HTTP deployment surface: command submission, state queries, and a 10 Hz
server-sent-event telemetry stream over a background real-time sim loop.

Request handlers never touch simulation state directly: commands cross into
the tick thread through a serialized queue, and reads see only the snapshot
published at the end of each tick.
"""

from __future__ import annotations

import asyncio
import logging
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path as FilePath

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import sim as simmod
from .fsm import MAX_QUEUE
from .nlu import (
    CommandText,
    NluError,
    Source,
    TaskSpec,
    TranslatorConfig,
    TranslatorError,
    interpret,
)
from .world import AmbiguousLocation, LandmarkFormatError, MapFormatError, UnknownLocation

log = logging.getLogger(__name__)

STREAM_PERIOD = 0.1  # seconds between SSE frames (10 Hz)


class CommandRequest(BaseModel):
    text: str
    client_tag: str | None = None


class ResetRequest(BaseModel):
    scenario: str


class SimSession:
    """Owns the simulation, its real-time tick thread, and the published
    snapshot. ``reset`` swaps in a fresh world loaded from a sibling scenario
    file of the one originally served."""

    def __init__(self, scenario_path: str | FilePath, translator: TranslatorConfig | None = None):
        self.scenario_path = FilePath(scenario_path)
        self.translator = translator or TranslatorConfig()
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._load(self.scenario_path)

    def _load(self, path: FilePath) -> None:
        bundle = simmod.load_scenario_bundle(path)
        with self._lock:
            self.bundle = bundle
            self.sim = simmod.build_simulation(bundle)
            self._latest_json = simmod.serialize_snapshot(self.sim.snapshot())

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, name="sim-tick", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None

    def _run(self) -> None:
        next_deadline = time.monotonic()
        while not self._stop.is_set():
            with self._lock:
                dt = self.sim.config.dt
                self.sim.tick()
                self._latest_json = simmod.serialize_snapshot(self.sim.snapshot())
            next_deadline += dt
            delay = next_deadline - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                next_deadline = time.monotonic()  # fell behind; don't burst

    # -- API used by the route handlers --------------------------------------

    def latest_json(self) -> str:
        with self._lock:
            return self._latest_json

    def submit_command(self, text: str) -> TaskSpec:
        """Interpret in the calling thread (it may block on the translator,
        never stalling the tick loop), then hand the task to the simulation."""
        with self._lock:
            dictionary = self.sim.landmarks
            issued_at = self.sim.sim_time
        task = interpret(
            CommandText(text, Source.API), self.translator, dictionary, issued_at=issued_at
        )
        with self._lock:
            if self.sim.pending_task_count() >= MAX_QUEUE:
                raise simmod.QueueFull("task queue is full")
            self.sim.enqueue_task(task)
        return task

    def reset(self, name: str) -> None:
        candidate = self.scenario_path.parent / f"{name}.scenario"
        if not candidate.is_file():
            raise FileNotFoundError(name)
        self._load(candidate)

    def landmarks_payload(self) -> dict:
        with self._lock:
            grid = self.sim.grid
            landmarks = self.sim.landmarks
        rows = [
            "".join("#" if grid.cells[r, c] else "." for c in range(grid.width))
            for r in range(grid.height - 1, -1, -1)
        ]
        return {
            "landmarks": [
                {
                    "name": lm.name,
                    "aliases": list(lm.aliases),
                    "position": {"x": lm.position[0], "y": lm.position[1]},
                }
                for lm in landmarks
            ],
            "map": {
                "resolution": grid.resolution,
                "origin": {"x": grid.origin[0], "y": grid.origin[1]},
                "width": grid.width,
                "height": grid.height,
                "rows": rows,
            },
        }


def _error_response(status: int, exc: Exception) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


def create_app(session: SimSession, console_dir: str | FilePath | None = None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        session.start()
        yield
        session.stop()

    app = FastAPI(title="errandbot", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/api/commands", status_code=202)
    def post_command(req: CommandRequest):
        try:
            task = session.submit_command(req.text)
        except TranslatorError as exc:
            return _error_response(503, exc)
        except (NluError, UnknownLocation, AmbiguousLocation, simmod.QueueFull) as exc:
            return _error_response(422, exc)
        return {"command_id": task.command_id, "task": task.to_dict()}

    @app.get("/api/state")
    def get_state():
        return Response(content=session.latest_json(), media_type="application/json")

    @app.get("/api/stream")
    async def get_stream():
        # Async generator: the server cancels the task on client disconnect.
        async def frames():
            while True:
                yield f"data: {session.latest_json()}\n\n"
                await asyncio.sleep(STREAM_PERIOD)

        return StreamingResponse(frames(), media_type="text/event-stream")

    @app.get("/api/landmarks")
    def get_landmarks():
        return session.landmarks_payload()

    @app.post("/api/reset")
    def post_reset(req: ResetRequest):
        try:
            session.reset(req.scenario)
        except FileNotFoundError as exc:
            return _error_response(404, exc)
        except (simmod.ScenarioFormatError, MapFormatError, LandmarkFormatError) as exc:
            return _error_response(422, exc)
        return {"status": "ok", "scenario": req.scenario}

    if console_dir is not None and FilePath(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(console_dir), html=True), name="console")

    return app
