from aimpilot.botlink.protocol import (
    MessageKind,
    ProtocolMessage,
    ProtocolParseError,
    make_message,
    parse,
    serialize,
)
from aimpilot.botlink.session import SessionError, WorldSession
from aimpilot.botlink.transport import InProcessTransport, SocketTransport, Transport, WorldServer

__all__ = [
    "InProcessTransport",
    "MessageKind",
    "ProtocolMessage",
    "ProtocolParseError",
    "SessionError",
    "SocketTransport",
    "Transport",
    "WorldServer",
    "WorldSession",
    "make_message",
    "parse",
    "serialize",
]
