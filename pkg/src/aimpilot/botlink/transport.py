from __future__ import annotations

import logging
import socket
import socketserver
import threading
from typing import Callable, Protocol

from aimpilot.botlink.protocol import MessageKind, ProtocolMessage, parse, serialize
from aimpilot.botlink.session import SessionError, WorldSession
from aimpilot.sim.combat import World

logger = logging.getLogger(__name__)

WorldFactory = Callable[[], World]


class Transport(Protocol):
    """Learner-side view of a lock-step session."""

    def open(self) -> list[ProtocolMessage]:
        """Return the greeting: CFG followed by the first OBS."""
        ...

    def exchange(self, act: ProtocolMessage) -> list[ProtocolMessage]:
        """Send one ACT; return the tick's EVTs followed by the next OBS."""
        ...

    def close(self, end: ProtocolMessage) -> ProtocolMessage:
        """Send END with the client's tallies; return the server's END."""
        ...


def parse_address(address: str) -> tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"address must look like HOST:PORT, got {address!r}")
    return host or "127.0.0.1", int(port)


class InProcessTransport:
    """Drives a WorldSession directly, still going through the text codec."""

    def __init__(self, session: WorldSession) -> None:
        self.session = session

    def open(self) -> list[ProtocolMessage]:
        return [parse(line) for line in self.session.hello()]

    def exchange(self, act: ProtocolMessage) -> list[ProtocolMessage]:
        return [parse(line) for line in self.session.handle_line(serialize(act))]

    def close(self, end: ProtocolMessage) -> ProtocolMessage:
        return parse(self.session.handle_line(serialize(end))[0])


class SocketTransport:
    def __init__(self, address: tuple[str, int], timeout: float = 30.0) -> None:
        self._sock = socket.create_connection(address, timeout=timeout)
        self._reader = self._sock.makefile("r", encoding="ascii", newline="\n")
        self._writer = self._sock.makefile("w", encoding="ascii", newline="\n")

    def _read_message(self) -> ProtocolMessage:
        line = self._reader.readline()
        if not line:
            raise SessionError("server closed the connection")
        return parse(line)

    def _read_until(self, kind: MessageKind) -> list[ProtocolMessage]:
        messages = [self._read_message()]
        while messages[-1].kind is not kind:
            messages.append(self._read_message())
        return messages

    def _send(self, msg: ProtocolMessage) -> None:
        self._writer.write(serialize(msg))
        self._writer.flush()

    def open(self) -> list[ProtocolMessage]:
        return self._read_until(MessageKind.OBS)

    def exchange(self, act: ProtocolMessage) -> list[ProtocolMessage]:
        self._send(act)
        return self._read_until(MessageKind.OBS)

    def close(self, end: ProtocolMessage) -> ProtocolMessage:
        self._send(end)
        reply = self._read_until(MessageKind.END)[-1]
        self._reader.close()
        self._writer.close()
        self._sock.close()
        return reply


class _SessionHandler(socketserver.StreamRequestHandler):
    server: "WorldServer"

    def handle(self) -> None:
        session = WorldSession(self.server.world_factory())
        logger.info("Session opened for %s", self.client_address)
        self._write(session.hello())
        for raw in self.rfile:
            line = raw.decode("ascii", errors="replace")
            self._write(session.handle_line(line))
            if session.closed:
                break
        logger.info("Session closed for %s", self.client_address)

    def _write(self, lines: list[str]) -> None:
        self.wfile.write("".join(lines).encode("ascii"))
        self.wfile.flush()


class WorldServer(socketserver.ThreadingTCPServer):
    """One independent world per connection."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], world_factory: WorldFactory) -> None:
        self.world_factory = world_factory
        super().__init__(address, _SessionHandler)

    @property
    def address(self) -> tuple[str, int]:
        host, port = self.server_address[:2]
        return str(host), int(port)

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, name="botlink-server", daemon=True)
        thread.start()
        return thread
