"""Wire framing: length-prefixed binary header + canonical JSON payload.

Layout (big-endian):
    bytes 0..3   payload length (unsigned 32-bit)
    byte  4      message type id
    bytes 5..8   sequence number (unsigned 32-bit)
    bytes 9..    payload, UTF-8 canonical JSON

The decoder never reads past the declared length and never raises anything
but NeedMoreBytes / FrameError on arbitrary input.
"""

from __future__ import annotations

import json
import struct

from .. import canonjson
from .messages import MESSAGE_TYPES, Message, SchemaViolation

HEADER_LEN = 9
MAX_PAYLOAD = 1 << 24  # 16 MiB: far above any legitimate message

_HEADER = struct.Struct(">IBI")


class NeedMoreBytes(Exception):
    """Input ends before a complete frame; consumed = 0."""


class FrameError(Exception):
    """Malformed frame; carries the offending sequence number when known."""

    def __init__(self, why: str, seq: int | None = None):
        super().__init__(why if seq is None else f"frame seq={seq}: {why}")
        self.seq = seq


def encode_frame(msg: Message, seq: int = 0) -> bytes:
    """Bit-exact encoding: identical messages produce identical bytes."""
    if not (0 <= seq <= 0xFFFFFFFF):
        raise SchemaViolation("seq must fit in 32 bits")
    if msg.TYPE_ID not in MESSAGE_TYPES:
        raise SchemaViolation(f"unregistered message type {msg.TYPE_ID}")
    payload = canonjson.dumps(msg.to_payload()).encode("utf-8")
    if len(payload) > MAX_PAYLOAD:
        raise SchemaViolation("payload too large")
    return _HEADER.pack(len(payload), msg.TYPE_ID, seq) + payload


def decode_frame(buf: bytes | bytearray | memoryview) -> tuple[Message, int, int]:
    """Decode one frame from the head of `buf`.

    Returns (message, seq, consumed_bytes).  Raises NeedMoreBytes when the
    buffer holds less than one complete frame and FrameError for malformed
    content.
    """
    buf = bytes(buf)
    if len(buf) < HEADER_LEN:
        raise NeedMoreBytes(f"have {len(buf)} of {HEADER_LEN} header bytes")
    length, type_id, seq = _HEADER.unpack_from(buf, 0)
    if length > MAX_PAYLOAD:
        raise FrameError(f"declared payload length {length} exceeds cap", seq)
    if len(buf) < HEADER_LEN + length:
        raise NeedMoreBytes(f"have {len(buf)} of {HEADER_LEN + length} frame bytes")
    cls = MESSAGE_TYPES.get(type_id)
    if cls is None:
        raise FrameError(f"unknown message type 0x{type_id:02X}", seq)
    raw = buf[HEADER_LEN:HEADER_LEN + length]
    try:
        payload = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FrameError(f"payload is not valid JSON: {exc}", seq) from None
    if not isinstance(payload, dict):
        raise FrameError("payload must be a JSON object", seq)
    try:
        msg = cls.from_payload(payload)
    except SchemaViolation as exc:
        raise FrameError(str(exc), seq) from None
    except (TypeError, ValueError, KeyError, AttributeError) as exc:
        raise FrameError(f"payload rejected: {exc}", seq) from None
    return msg, seq, HEADER_LEN + length
