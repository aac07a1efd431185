"""Command-line entry points: serve, parse, eval, run."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import CorpusFormatError, evaluate_corpus, load_corpus
from .nlu import CommandText, NluError, Source, TranslatorConfig, interpret
from .sim import ScenarioFormatError, run_scripted
from .world import (
    AmbiguousLocation,
    LandmarkFormatError,
    MapFormatError,
    UnknownLocation,
    load_landmarks,
)


def data_path(name: str) -> Path:
    """Path of a bundled data file (maps, landmark files, scenarios, corpus)."""
    return Path(__file__).parent / "data" / name


def _translator_config(backend: str) -> TranslatorConfig:
    return TranslatorConfig(backend=backend)


def _cmd_parse(args: argparse.Namespace) -> int:
    try:
        dictionary = load_landmarks(Path(args.landmarks).read_text())
    except (OSError, LandmarkFormatError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        return 1
    try:
        task = interpret(
            CommandText(args.text, Source.CLI), _translator_config(args.llm), dictionary
        )
    except (NluError, UnknownLocation, AmbiguousLocation) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        return 1
    print(json.dumps(task.to_dict(), sort_keys=True))
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    try:
        entries = load_corpus(Path(args.corpus).read_text())
        dictionary = load_landmarks(Path(args.landmarks).read_text())
        results, accuracy = evaluate_corpus(entries, dictionary, _translator_config(args.llm))
    except (OSError, CorpusFormatError, LandmarkFormatError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        return 1
    for result in results:
        print(json.dumps(result, sort_keys=True))
    print(json.dumps({"entries": len(results), "accuracy": accuracy}, sort_keys=True))
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        kwargs = {}
        if args.ticks is not None:
            kwargs["max_ticks"] = args.ticks
        if args.seed is not None:
            kwargs["seed"] = args.seed
        report = run_scripted(args.scenario, **kwargs)
    except (OSError, ScenarioFormatError, MapFormatError, LandmarkFormatError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        return 1
    print(json.dumps(report.to_dict(), sort_keys=True))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import SimSession, create_app

    try:
        session = SimSession(args.scenario, _translator_config(args.llm))
    except (OSError, ScenarioFormatError, MapFormatError, LandmarkFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    console = args.console if args.console and Path(args.console).is_dir() else None
    app = create_app(session, console_dir=console)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="errandbot",
        description="Text-commanded pick-and-delivery robot simulator and service.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service and simulation loop")
    p_serve.add_argument("--scenario", required=True)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--llm", choices=["mock", "http"], default="mock")
    p_serve.add_argument("--console", help="directory with the built web console", default=None)
    p_serve.set_defaults(func=_cmd_serve)

    p_parse = sub.add_parser("parse", help="interpret one command and print the task as JSON")
    p_parse.add_argument("--text", required=True)
    p_parse.add_argument("--llm", choices=["mock", "http"], default="mock")
    p_parse.add_argument("--landmarks", default=str(data_path("office.landmarks")))
    p_parse.set_defaults(func=_cmd_parse)

    p_eval = sub.add_parser("eval", help="score a labelled command corpus")
    p_eval.add_argument("--corpus", default=str(data_path("commands.corpus")))
    p_eval.add_argument("--landmarks", default=str(data_path("office.landmarks")))
    p_eval.add_argument("--llm", choices=["mock", "http"], default="mock")
    p_eval.set_defaults(func=_cmd_eval)

    p_run = sub.add_parser("run", help="run a scenario headlessly and print metrics")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--ticks", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(func=_cmd_run)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
