"""Command corpus files and exact-match evaluation.

A corpus row is ``command,pickup,delivery,item`` with gold labels; accuracy is
the fraction of entries whose interpreted task matches all three gold fields
exactly, computed the same way for any translator backend.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .nlu import CommandText, NluError, Source, TranslatorConfig, interpret
from .world import AmbiguousLocation, LandmarkDictionary, UnknownLocation


class CorpusFormatError(Exception):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    command: str
    pickup: str
    delivery: str
    item: str


def load_corpus(text: str) -> list[CorpusEntry]:
    entries: list[CorpusEntry] = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = next(csv.reader(io.StringIO(raw_line)))
        except (csv.Error, StopIteration) as exc:
            raise CorpusFormatError(f"line {lineno}: {exc}") from None
        if len(row) != 4:
            raise CorpusFormatError(
                f"line {lineno}: expected 4 fields (command,pickup,delivery,item), got {len(row)}"
            )
        entries.append(CorpusEntry(row[0], row[1].strip(), row[2].strip(), row[3].strip()))
    if not entries:
        raise CorpusFormatError("corpus contains no entries")
    return entries


def serialize_corpus(entries: list[CorpusEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for e in entries:
        writer.writerow([e.command, e.pickup, e.delivery, e.item])
    return buf.getvalue()


def evaluate_corpus(
    entries: list[CorpusEntry],
    dictionary: LandmarkDictionary,
    translator: TranslatorConfig,
) -> tuple[list[dict], float]:
    """Run every corpus command through the interpreter and score it.

    Gold locations must exist in the dictionary (they are resolved to
    canonical names before comparison); a corpus that references unknown
    places is a corpus bug, not a parser miss.
    """
    results: list[dict] = []
    correct = 0
    for entry in entries:
        try:
            gold_pickup = dictionary.lookup(entry.pickup).name
            gold_delivery = dictionary.lookup(entry.delivery).name
        except (UnknownLocation, AmbiguousLocation) as exc:
            raise CorpusFormatError(
                f"gold location not in dictionary for command {entry.command!r}: {exc}"
            ) from None
        result: dict = {
            "command": entry.command,
            "gold": {"pickup": gold_pickup, "delivery": gold_delivery, "item": entry.item},
        }
        try:
            task = interpret(CommandText(entry.command, Source.CLI), translator, dictionary)
        except (NluError, UnknownLocation, AmbiguousLocation) as exc:
            result["error"] = type(exc).__name__
            result["ok"] = False
        else:
            result["parsed"] = {
                "pickup": task.pickup.name,
                "delivery": task.delivery.name,
                "item": task.item,
            }
            result["ok"] = (
                task.pickup.name == gold_pickup
                and task.delivery.name == gold_delivery
                and task.item == entry.item
            )
        if result["ok"]:
            correct += 1
        results.append(result)
    return results, correct / len(entries)
