from __future__ import annotations

import logging

from aimpilot.botlink.protocol import (
    MessageKind,
    ProtocolMessage,
    ProtocolParseError,
    make_message,
    parse,
    serialize,
)
from aimpilot.sim.combat import (
    LEARNER,
    Command,
    Observation,
    SimulationError,
    World,
    WorldEvent,
)

logger = logging.getLogger(__name__)


class SessionError(RuntimeError):
    """Raised when a session is used after it ended."""


def observation_message(observation: Observation) -> ProtocolMessage:
    rel = observation.relative
    if not observation.visible or rel is None:
        return make_message(MessageKind.OBS, observation.tick, vis=0, vf=0, vl=0, rot=0, dist=0)
    return make_message(
        MessageKind.OBS,
        observation.tick,
        vis=1,
        vf=rel.vel_forward,
        vl=rel.vel_lateral,
        rot=rel.facing_angle,
        dist=rel.distance,
    )


def event_message(event: WorldEvent) -> ProtocolMessage:
    return make_message(
        MessageKind.EVT,
        event.tick,
        kind=event.kind.value,
        victim=event.victim,
        fired=event.fired_tick,
        dmg=event.damage,
    )


class WorldSession:
    """Server side of one lock-step connection.

    Emits one OBS per tick and advances the world only when the matching ACT arrives.
    Malformed or out-of-step lines are logged and answered by re-sending the current OBS.
    """

    def __init__(self, world: World) -> None:
        self.world = world
        self.closed = False
        self.parse_errors = 0
        self._current = observation_message(world.observe())

    def hello(self) -> list[str]:
        cfg = make_message(
            MessageKind.CFG,
            self.world.tick_count,
            delay=self.world.weapon.registration_delay,
            level=self.world.level,
            tick=0.25,
        )
        return [serialize(cfg), serialize(self._current)]

    def handle_line(self, line: str) -> list[str]:
        if self.closed:
            raise SessionError("session already ended")
        try:
            msg = parse(line)
        except ProtocolParseError as exc:
            self.parse_errors += 1
            logger.warning("Dropped malformed line: %s", exc)
            return [serialize(self._current)]

        if msg.kind is MessageKind.END:
            self.closed = True
            board = self.world.scoreboard
            end = make_message(
                MessageKind.END,
                self.world.tick_count,
                kills=board.kills[LEARNER],
                deaths=board.deaths[LEARNER],
            )
            if (msg["kills"], msg["deaths"]) != (end["kills"], end["deaths"]):
                logger.warning(
                    "Client tallies %s/%s differ from server %s/%s",
                    msg["kills"],
                    msg["deaths"],
                    end["kills"],
                    end["deaths"],
                )
            return [serialize(end)]

        if msg.kind is not MessageKind.ACT or msg.tick != self.world.tick_count:
            logger.warning("Expected ACT for tick %d, got %s", self.world.tick_count, line.strip())
            return [serialize(self._current)]

        command = Command(shoot=bool(msg["shoot"]), action_id=int(msg["aid"]))
        try:
            result = self.world.tick(command)
        except SimulationError as exc:
            logger.warning("Rejected command: %s", exc)
            return [serialize(self._current)]
        self._current = observation_message(result.observation)
        lines = [serialize(event_message(event)) for event in result.events]
        lines.append(serialize(self._current))
        return lines
