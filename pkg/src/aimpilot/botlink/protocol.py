"""Newline-delimited text messages between a learner and the world server.

Grammar: ``KIND t=<int>( <key>=<value>)*`` with a fixed key order per kind. Floats are
written with six decimals, integers in decimal, symbols verbatim.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Literal

ValueType = Literal["int", "float", "symbol"]
Value = int | float | str

_INT_RE = re.compile(r"-?[0-9]+")
_FLOAT_RE = re.compile(r"-?[0-9]+(?:\.[0-9]+)?(?:[eE][-+]?[0-9]+)?")
_NON_FINITE = frozenset({"nan", "inf", "infinity"})


class MessageKind(StrEnum):
    OBS = "OBS"
    ACT = "ACT"
    EVT = "EVT"
    CFG = "CFG"
    END = "END"


class ProtocolParseError(ValueError):
    """Raised for a malformed line; names the offending token."""

    def __init__(self, reason: str, token: str) -> None:
        super().__init__(f"{reason} (at {token!r})")
        self.reason = reason
        self.token = token


@dataclass(frozen=True)
class KeySpec:
    name: str
    type: ValueType
    required: bool = True
    symbols: tuple[str, ...] = ()


SCHEMAS: dict[MessageKind, tuple[KeySpec, ...]] = {
    MessageKind.OBS: (
        KeySpec("vis", "int"),
        KeySpec("vf", "float"),
        KeySpec("vl", "float"),
        KeySpec("rot", "float"),
        KeySpec("dist", "float"),
    ),
    MessageKind.ACT: (
        KeySpec("shoot", "int"),
        KeySpec("aid", "int"),
    ),
    MessageKind.EVT: (
        KeySpec("kind", "symbol", symbols=("DMG", "KILL", "DEATH")),
        KeySpec("victim", "int"),
        KeySpec("fired", "int", required=False),
        KeySpec("dmg", "float", required=False),
    ),
    MessageKind.CFG: (
        KeySpec("delay", "int"),
        KeySpec("level", "int"),
        KeySpec("tick", "float"),
    ),
    MessageKind.END: (
        KeySpec("kills", "int"),
        KeySpec("deaths", "int"),
    ),
}


@dataclass(frozen=True)
class ProtocolMessage:
    kind: MessageKind
    tick: int
    payload: dict[str, Value] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Value:
        return self.payload[key]

    def get(self, key: str, default: Value | None = None) -> Value | None:
        return self.payload.get(key, default)


def make_message(
    kind: MessageKind | str, tick: int, /, **values: Value | None
) -> ProtocolMessage:
    """Build a message, coercing values to the schema so it survives a round trip."""
    kind = MessageKind(kind)
    schema = SCHEMAS[kind]
    known = {spec.name for spec in schema}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unexpected keys for {kind}: {sorted(unknown)}")
    payload: dict[str, Value] = {}
    for spec in schema:
        value = values.get(spec.name)
        if value is None:
            if spec.required:
                raise ValueError(f"{kind} requires `{spec.name}`")
            continue
        payload[spec.name] = _coerce(spec, value)
    return ProtocolMessage(kind, int(tick), payload)


def _coerce(spec: KeySpec, value: Value) -> Value:
    if spec.type == "int":
        return int(value)
    if spec.type == "float":
        return float(f"{float(value):.6f}")
    symbol = str(value)
    if symbol not in spec.symbols:
        raise ValueError(f"`{spec.name}` must be one of {spec.symbols}")
    return symbol


def _render(spec: KeySpec, value: Value) -> str:
    if spec.type == "float":
        return f"{float(value):.6f}"
    if spec.type == "int":
        return str(int(value))
    return str(value)


def serialize(msg: ProtocolMessage) -> str:
    parts = [msg.kind.value, f"t={msg.tick}"]
    for spec in SCHEMAS[msg.kind]:
        if spec.name in msg.payload:
            parts.append(f"{spec.name}={_render(spec, msg.payload[spec.name])}")
    return " ".join(parts) + "\n"


def parse(line: str) -> ProtocolMessage:
    tokens = line.strip().split()
    if not tokens:
        raise ProtocolParseError("empty line", line)

    try:
        kind = MessageKind(tokens[0])
    except ValueError:
        raise ProtocolParseError("unknown message kind", tokens[0]) from None

    if len(tokens) < 2 or not tokens[1].startswith("t="):
        raise ProtocolParseError("missing tick", tokens[1] if len(tokens) > 1 else tokens[0])
    tick_text = tokens[1][2:]
    if not tick_text:
        raise ProtocolParseError("missing tick value", tokens[1])
    tick = _parse_int(tick_text, tokens[1])

    schema = {spec.name: spec for spec in SCHEMAS[kind]}
    payload: dict[str, Value] = {}
    for token in tokens[2:]:
        key, sep, text = token.partition("=")
        if not sep or not key:
            raise ProtocolParseError("malformed key-value token", token)
        spec = schema.get(key)
        if spec is None:
            raise ProtocolParseError(f"unexpected key for {kind}", token)
        if key in payload:
            raise ProtocolParseError("duplicate key", token)
        if not text:
            raise ProtocolParseError("missing value", token)
        payload[key] = _parse_value(spec, text, token)

    for spec in SCHEMAS[kind]:
        if spec.required and spec.name not in payload:
            raise ProtocolParseError(f"missing key `{spec.name}`", line.strip())
    ordered = {spec.name: payload[spec.name] for spec in SCHEMAS[kind] if spec.name in payload}
    return ProtocolMessage(kind, tick, ordered)


def _parse_int(text: str, token: str) -> int:
    if not _INT_RE.fullmatch(text):
        raise ProtocolParseError("non-numeric value", token)
    return int(text)


def _parse_value(spec: KeySpec, text: str, token: str) -> Value:
    if spec.type == "int":
        return _parse_int(text, token)
    if spec.type == "float":
        if text.lstrip("+-").lower() in _NON_FINITE:
            raise ProtocolParseError("non-finite value", token)
        if not _FLOAT_RE.fullmatch(text):
            raise ProtocolParseError("non-numeric value", token)
        value = float(text)
        if not math.isfinite(value):
            raise ProtocolParseError("non-finite value", token)
        return value
    if text not in spec.symbols:
        raise ProtocolParseError(f"unknown symbol for `{spec.name}`", token)
    return text
