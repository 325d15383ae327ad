"""Q-table snapshot files.

Layout (little-endian): magic ``QTAB``, format version u32, rows u32, columns u32, then
rows * columns float64 values in row-major order.
"""

from __future__ import annotations

import csv
import logging
import os
import struct
from pathlib import Path

import numpy as np

from aimpilot.learning.action_grid import ACTION_COUNT
from aimpilot.learning.rl_core import QTable
from aimpilot.learning.state_codec import STATE_COUNT

logger = logging.getLogger(__name__)

MAGIC = b"QTAB"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIII")


class SnapshotFormatError(RuntimeError):
    """Raised when a snapshot file is truncated or has the wrong shape."""


def encode_snapshot(q: QTable) -> bytes:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, STATE_COUNT, ACTION_COUNT)
    return header + q.values.astype("<f8", copy=False).tobytes(order="C")


def decode_snapshot(data: bytes) -> QTable:
    if len(data) < _HEADER.size:
        raise SnapshotFormatError("snapshot is shorter than its header")
    magic, version, rows, cols = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}")
    if (rows, cols) != (STATE_COUNT, ACTION_COUNT):
        raise SnapshotFormatError(
            f"snapshot is {rows}x{cols}, expected {STATE_COUNT}x{ACTION_COUNT}"
        )
    expected = _HEADER.size + rows * cols * 8
    if len(data) != expected:
        raise SnapshotFormatError(f"snapshot has {len(data)} bytes, expected {expected}")
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(rows, cols)
    return QTable(values.astype(np.float64))


def write_snapshot(q: QTable, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(encode_snapshot(q))
    os.replace(tmp, path)
    logger.debug("Wrote Q snapshot %s", path)
    return path


def load_snapshot(path: Path) -> QTable:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise SnapshotFormatError(f"cannot read snapshot {path}: {exc}") from exc
    return decode_snapshot(data)


def export_csv(q: QTable, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["state_index", "action_id", "q_value"])
        for state_index in range(STATE_COUNT):
            row = q.values[state_index]
            for action_id in range(ACTION_COUNT):
                writer.writerow([state_index, action_id, repr(float(row[action_id]))])
    return path
