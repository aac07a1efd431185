"""Command understanding: raw text to a validated task.

Pipeline: normalize -> build_prompt -> translate -> parse_directive -> landmark
resolution. The translator turns free-form phrasing into a fixed three-line
directive (PICKUP_LOCATION / DELIVERY_LOCATION / ITEM); everything after that
is plain regex extraction plus dictionary lookup, so a location that the
dictionary does not know is rejected instead of being invented.
"""

from __future__ import annotations

import os
import re
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum

import requests

from .world import LandmarkDictionary, LandmarkRef, UnknownLocation

SYSTEM_PROMPT = (
    "You convert an errand command into exactly three lines and nothing else:\n"
    "PICKUP_LOCATION: <place to collect from>\n"
    "DELIVERY_LOCATION: <place to deliver to>\n"
    "ITEM: <object to carry>\n"
    "Copy place and object names verbatim from the command. "
    "If a field is not stated, write UNKNOWN."
)

UNKNOWN_TOKEN = "UNKNOWN"
MAX_COMMAND_LENGTH = 2000

DEFAULT_MODEL = "llama3-8b-8192m"
ENDPOINT_ENV_VAR = "LLM_API_URL"
MODEL_ENV_VAR = "LLM_MODEL"
DEFAULT_API_KEY_ENV_VAR = "LLM_API_KEY"


class NluError(Exception):
    pass


class EmptyCommand(NluError):
    pass


class CommandTooLong(NluError):
    pass


class TranslatorError(NluError):
    pass


class TranslatorTimeout(TranslatorError):
    pass


class TranslatorHttpError(TranslatorError):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"translator http error (status {status}): {detail}")
        self.status = status


class MalformedCompletion(TranslatorError):
    pass


class ParseError(NluError):
    pass


class MissingField(ParseError):
    def __init__(self, name: str):
        super().__init__(f"directive is missing field {name!r}")
        self.name = name


class FieldIsUnknown(ParseError):
    def __init__(self, name: str):
        super().__init__(f"translator could not determine field {name!r}")
        self.name = name


class Source(str, Enum):
    API = "api"
    CLI = "cli"
    UI = "ui"


@dataclass(frozen=True)
class CommandText:
    """A user command. Must be non-blank and at most 2000 characters."""

    raw: str
    source: Source = Source.API

    def __post_init__(self):
        if not self.raw.strip():
            raise EmptyCommand("command is empty")
        if len(self.raw) > MAX_COMMAND_LENGTH:
            raise CommandTooLong(f"command exceeds {MAX_COMMAND_LENGTH} characters")


@dataclass(frozen=True)
class StructuredDirective:
    """The parsed three-line directive. Field values are lowercase with
    collapsed whitespace; the verbatim translator output rides along for
    debugging but does not take part in equality."""

    pickup_location: str
    delivery_location: str
    item: str
    raw_directive: str = field(compare=False, default="")


@dataclass(frozen=True)
class TaskSpec:
    """A fully resolved errand. Equality covers only the semantic fields so
    that identical commands interpret to equal tasks across runs; id and
    timestamp are bookkeeping."""

    pickup: LandmarkRef
    delivery: LandmarkRef
    item: str
    command_id: str = field(compare=False, default_factory=lambda: uuid.uuid4().hex[:12])
    issued_at: float = field(compare=False, default_factory=time.time)

    def to_dict(self) -> dict:
        return {
            "command_id": self.command_id,
            "issued_at": self.issued_at,
            "item": self.item,
            "pickup": {"name": self.pickup.name,
                       "position": {"x": self.pickup.position[0], "y": self.pickup.position[1]}},
            "delivery": {"name": self.delivery.name,
                         "position": {"x": self.delivery.position[0], "y": self.delivery.position[1]}},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskSpec":
        return cls(
            pickup=LandmarkRef(d["pickup"]["name"],
                               (d["pickup"]["position"]["x"], d["pickup"]["position"]["y"])),
            delivery=LandmarkRef(d["delivery"]["name"],
                                 (d["delivery"]["position"]["x"], d["delivery"]["position"]["y"])),
            item=d["item"],
            command_id=d["command_id"],
            issued_at=d["issued_at"],
        )


@dataclass(frozen=True)
class TranslatorConfig:
    backend: str = "mock"
    endpoint_url: str = ""
    model_name: str = DEFAULT_MODEL
    api_key_env_var: str = DEFAULT_API_KEY_ENV_VAR
    temperature: float = 0.0
    timeout_ms: int = 10000

    def __post_init__(self):
        if self.backend not in ("mock", "http"):
            raise ValueError(f"unknown translator backend {self.backend!r}")
        if self.temperature != 0.0:
            raise ValueError("temperature is pinned to 0.0")
        if not 500 <= self.timeout_ms <= 60000:
            raise ValueError("timeout_ms must be within [500, 60000]")


def normalize(text: CommandText) -> str:
    """Lowercase, drop sentence punctuation (. ! ?) and commas, collapse
    whitespace. Articles are deliberately left in place here; they are
    stripped per-field after directive parsing."""
    s = text.raw.lower()
    s = re.sub(r"[.!?,]", "", s)
    s = re.sub(r"\s+", " ", s).strip()
    if not s:
        raise EmptyCommand("command is empty after normalization")
    return s


def build_prompt(normalized: str) -> tuple[str, str]:
    """(system instruction, user message) for the chat-completion call. The
    system instruction is a constant, byte-identical across calls."""
    if not normalized:
        raise ValueError("normalized command must be non-empty")
    return (SYSTEM_PROMPT, normalized)


# ---------------------------------------------------------------------------
# Offline rule grammar: the deterministic stand-in for the hosted translator.
# Spans are maximal runs of non-keyword tokens; leading articles are stripped
# from every captured span.
# ---------------------------------------------------------------------------

_KW = r"(?:bring|take|deliver|carry|get|fetch|pick|grab|collect|go|from|to|and|it)"
_SPAN = rf"(?:(?!{_KW}\b)\S+(?:\s+(?!{_KW}\b)\S+)*)"
_VERB = r"(?:bring|take|deliver|carry|get|fetch|pick up)"

_RULE_VERB_FROM_TO = re.compile(
    rf"\b{_VERB}\s+(?P<item>{_SPAN})\s+from\s+(?P<pickup>{_SPAN})\s+to\s+(?P<delivery>{_SPAN})"
)
_RULE_FROM_FIRST = re.compile(
    rf"\bfrom\s+(?P<pickup>{_SPAN})(?:\s+\S+)*?\s+(?:bring|take|deliver)"
    rf"\s+(?P<item>{_SPAN})\s+to\s+(?P<delivery>{_SPAN})"
)
_RULE_GO_TO = re.compile(
    rf"\bgo\s+to\s+(?P<pickup>{_SPAN})\s+(?:pick up|grab|collect)\s+(?P<item>{_SPAN})"
    rf"\s+(?:and\s+)?(?:bring|take|deliver)\s+(?:it\s+)?to\s+(?P<delivery>{_SPAN})"
)
_RULES = (_RULE_VERB_FROM_TO, _RULE_FROM_FIRST, _RULE_GO_TO)

_ARTICLE = re.compile(r"^(?:the|a|an)\s+")


def _strip_article(span: str) -> str:
    return _ARTICLE.sub("", span.strip(), count=1)


def apply_rule_grammar(normalized: str) -> tuple[str, str, str] | None:
    """First matching rule wins; returns (pickup, delivery, item) or None."""
    for rule in _RULES:
        m = rule.search(normalized)
        if m:
            return (
                _strip_article(m.group("pickup")),
                _strip_article(m.group("delivery")),
                _strip_article(m.group("item")),
            )
    return None


def mock_completion(user_message: str) -> str:
    """Deterministic translator: rule grammar in, three-line directive out."""
    fields = apply_rule_grammar(user_message)
    if fields is None:
        return (
            f"PICKUP_LOCATION: {UNKNOWN_TOKEN}\n"
            f"DELIVERY_LOCATION: {UNKNOWN_TOKEN}\n"
            f"ITEM: {UNKNOWN_TOKEN}"
        )
    pickup, delivery, item = fields
    return f"PICKUP_LOCATION: {pickup}\nDELIVERY_LOCATION: {delivery}\nITEM: {item}"


def translate(prompt: tuple[str, str], config: TranslatorConfig) -> str:
    """Run the translator and return its raw completion text."""
    system, user = prompt
    if config.backend == "mock":
        return mock_completion(user)

    url = os.environ.get(ENDPOINT_ENV_VAR) or config.endpoint_url
    if not url:
        raise TranslatorHttpError(0, "no endpoint configured (set LLM_API_URL)")
    model = os.environ.get(MODEL_ENV_VAR) or config.model_name
    api_key = os.environ.get(config.api_key_env_var, "")
    body = {
        "model": model,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": system},
            {"role": "user", "content": user},
        ],
    }
    headers = {"Authorization": f"Bearer {api_key}"}
    try:
        resp = requests.post(url, json=body, headers=headers, timeout=config.timeout_ms / 1000.0)
    except requests.Timeout as exc:
        raise TranslatorTimeout(str(exc)) from exc
    except requests.RequestException as exc:
        raise TranslatorHttpError(0, str(exc)) from exc
    if not resp.ok:
        raise TranslatorHttpError(resp.status_code, resp.text[:200])
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise MalformedCompletion(f"unexpected completion payload: {exc}") from exc
    if not isinstance(content, str) or not content.strip():
        raise MalformedCompletion("empty completion")
    return content


_FIELD_PATTERNS = (
    ("pickup_location", re.compile(r"^\s*pickup[_ ]location\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)),
    ("delivery_location", re.compile(r"^\s*delivery[_ ]location\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)),
    ("item", re.compile(r"^\s*item\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)),
)


def _clean_field(value: str) -> str:
    v = value.strip().lower()
    if len(v) >= 2 and v[0] == v[-1] and v[0] in ("'", '"'):
        v = v[1:-1]
    v = _strip_article(v)
    return re.sub(r"\s+", " ", v).strip()


def parse_directive(raw: str) -> StructuredDirective:
    """Extract the three directive fields (first match of each line pattern
    wins, order-insensitive) and clean them: lowercase, surrounding quotes
    off, one leading article off, whitespace collapsed."""
    values: dict[str, str] = {}
    for name, pattern in _FIELD_PATTERNS:
        m = pattern.search(raw)
        if m is None:
            raise MissingField(name)
        cleaned = _clean_field(m.group(1))
        if not cleaned:
            raise MissingField(name)
        values[name] = cleaned
    for name, _ in _FIELD_PATTERNS:
        if values[name] == UNKNOWN_TOKEN.lower():
            raise FieldIsUnknown(name)
    return StructuredDirective(
        pickup_location=values["pickup_location"],
        delivery_location=values["delivery_location"],
        item=values["item"],
        raw_directive=raw,
    )


def render_directive(directive: StructuredDirective) -> str:
    """Re-emit the canonical three lines for a parsed directive."""
    return (
        f"PICKUP_LOCATION: {directive.pickup_location}\n"
        f"DELIVERY_LOCATION: {directive.delivery_location}\n"
        f"ITEM: {directive.item}"
    )


def _translate_with_retry(prompt: tuple[str, str], config: TranslatorConfig) -> str:
    try:
        return translate(prompt, config)
    except TranslatorTimeout:
        return translate(prompt, config)


def interpret(
    text: CommandText,
    config: TranslatorConfig,
    dictionary: LandmarkDictionary,
    *,
    command_id: str | None = None,
    issued_at: float | None = None,
) -> TaskSpec:
    """Full pipeline from raw command to resolved task.

    Translator timeouts get one retry; on timeout or HTTP failure the rule
    grammar runs directly on the normalized text as a fallback. If even the
    fallback cannot extract a directive, the original translator error is
    re-raised so callers can distinguish "backend down" from "bad command".
    Both locations must resolve in the dictionary; otherwise UnknownLocation
    carries the offending field and value.
    """
    if len(dictionary) == 0:
        raise ValueError("landmark dictionary is empty")
    normalized = normalize(text)
    prompt = build_prompt(normalized)
    try:
        raw = _translate_with_retry(prompt, config)
    except (TranslatorTimeout, TranslatorHttpError) as exc:
        raw = mock_completion(normalized)
        try:
            directive = parse_directive(raw)
        except ParseError:
            raise exc
    else:
        directive = parse_directive(raw)

    try:
        pickup = dictionary.lookup(directive.pickup_location)
    except UnknownLocation:
        raise UnknownLocation(directive.pickup_location, field="pickup") from None
    try:
        delivery = dictionary.lookup(directive.delivery_location)
    except UnknownLocation:
        raise UnknownLocation(directive.delivery_location, field="delivery") from None

    kwargs = {}
    if command_id is not None:
        kwargs["command_id"] = command_id
    if issued_at is not None:
        kwargs["issued_at"] = issued_at
    return TaskSpec(pickup=pickup, delivery=delivery, item=directive.item, **kwargs)
