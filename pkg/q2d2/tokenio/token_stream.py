"""Binary token stream files.

Layout, all integers little-endian:

    magic            4 bytes, b"Q2D2"
    version          u16
    d                u16
    tilings          P bytes (0 rectangle, 1 hexagon, 2 rhombic)
    levels           d bytes
    tokens/second    u32 (0 when unknown)
    frame_count      u64
    config digest    32 bytes, sha256 of every header byte above
    payload          frame_count frames of P pair codes; pair j takes
                     ceil(log2(L_j) / 8) bytes

Only the canonical hexagon row offset can be written, since the header has
no field for it.
"""

from __future__ import annotations

import hashlib
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Tuple, Union

import numpy as np

from q2d2.codebook.codebook import CodebookLayout
from q2d2.common.errors import (
    ConfigMismatchError,
    InvalidCodeError,
    InvalidSpecError,
    StreamFormatError,
)
from q2d2.constants import (
    DIGEST_SIZE,
    HEX_ROW_OFFSET,
    MIN_LEVELS,
    STREAM_MAGIC,
    STREAM_VERSION,
    TilingKind,
)
from q2d2.quantizer.quantizer_config import QuantizerConfig

logger = logging.getLogger(__name__)

PREFIX = struct.Struct("<4sHH")
COUNTS = struct.Struct("<IQ")

Source = Union[str, Path, bytes, IO[bytes]]
Sink = Union[str, Path, IO[bytes]]


def code_width(pair_size: int) -> int:
    """Bytes needed for codes in [0, pair_size)."""
    return max(1, ((pair_size - 1).bit_length() + 7) // 8)


@dataclass(frozen=True)
class TokenStreamHeader:
    tilings: Tuple[TilingKind, ...]
    levels: Tuple[int, ...]
    tokens_per_second: int = 0
    frame_count: int = 0
    version: int = STREAM_VERSION
    config_digest: bytes = field(init=False, compare=False)

    def __post_init__(self):
        tilings = tuple(TilingKind.parse(t) for t in self.tilings)
        object.__setattr__(self, "tilings", tilings)
        object.__setattr__(self, "levels", tuple(int(l) for l in self.levels))
        digest = hashlib.sha256(self._fields()).digest()
        object.__setattr__(self, "config_digest", digest)

    @classmethod
    def from_config(
        cls, config: QuantizerConfig, tokens_per_second: int = 0, frame_count: int = 0
    ) -> TokenStreamHeader:
        if TilingKind.HEXAGON in config.tilings and config.hex_offset != HEX_ROW_OFFSET:
            raise InvalidSpecError(
                f"Token streams only carry the hexagon offset {HEX_ROW_OFFSET}, "
                f"got {config.hex_offset}"
            )
        return cls(config.tilings, config.levels, tokens_per_second, frame_count)

    @property
    def d(self) -> int:
        return len(self.levels)

    @property
    def n_pairs(self) -> int:
        return len(self.tilings)

    def config(self) -> QuantizerConfig:
        return QuantizerConfig(self.levels, self.tilings)

    def _fields(self) -> bytes:
        return b"".join(
            [
                PREFIX.pack(STREAM_MAGIC, self.version, self.d),
                bytes(kind.wire_id for kind in self.tilings),
                bytes(self.levels),
                COUNTS.pack(self.tokens_per_second, self.frame_count),
            ]
        )

    def to_bytes(self) -> bytes:
        return self._fields() + self.config_digest

    @property
    def size(self) -> int:
        return PREFIX.size + self.n_pairs + self.d + COUNTS.size + DIGEST_SIZE

    @classmethod
    def from_bytes(cls, data: bytes) -> TokenStreamHeader:
        """Parse and verify a header at the start of data."""
        _need(data, 0, PREFIX.size, "header prefix")
        magic, version, d = PREFIX.unpack_from(data, 0)
        if magic != STREAM_MAGIC:
            raise StreamFormatError(f"Bad magic {magic!r}", 0)
        if version != STREAM_VERSION:
            raise StreamFormatError(f"Unsupported version {version}", 4)
        if d < 2 or d % 2 != 0:
            raise StreamFormatError(
                f"Dimension must be even and at least 2, got {d}", 6
            )

        offset = PREFIX.size
        _need(data, offset, d // 2 + d + COUNTS.size + DIGEST_SIZE, "header")
        tilings = []
        for i, wire_id in enumerate(data[offset : offset + d // 2]):
            try:
                tilings.append(TilingKind.from_wire_id(wire_id))
            except ValueError:
                raise StreamFormatError(f"Unknown tiling id {wire_id}", offset + i)
        offset += d // 2
        levels = tuple(data[offset : offset + d])
        for i, level in enumerate(levels):
            if level < MIN_LEVELS:
                raise StreamFormatError(
                    f"Level count {level} below {MIN_LEVELS}", offset + i
                )
        for j, kind in enumerate(tilings):
            lx, ly = levels[2 * j], levels[2 * j + 1]
            if kind == TilingKind.HEXAGON and lx != ly:
                raise StreamFormatError(
                    f"Hexagon pair {j} needs equal levels, got {lx} and {ly}",
                    offset + 2 * j + 1,
                )
        offset += d
        tokens_per_second, frame_count = COUNTS.unpack_from(data, offset)
        offset += COUNTS.size

        header = cls(tuple(tilings), levels, tokens_per_second, frame_count, version)
        stored = bytes(data[offset : offset + DIGEST_SIZE])
        if stored != header.config_digest:
            raise StreamFormatError("Config digest mismatch", offset)
        return header


def _need(data: bytes, offset: int, length: int, what: str) -> None:
    if len(data) < offset + length:
        raise StreamFormatError(f"Truncated {what}", len(data))


def _pair_widths(header: TokenStreamHeader) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    layout = CodebookLayout.from_config(header.config())
    return layout.pair_sizes, tuple(code_width(size) for size in layout.pair_sizes)


def encode_payload(frames: np.ndarray, header: TokenStreamHeader) -> bytes:
    sizes, widths = _pair_widths(header)
    frames = np.asarray(frames, dtype=np.int64).reshape(-1, header.n_pairs)
    for j, size in enumerate(sizes):
        column = frames[:, j]
        bad = (column < 0) | (column >= size)
        if bad.any():
            frame = int(np.argmax(bad))
            raise InvalidCodeError(int(column[frame]), size, position=(frame, j))
    columns = [
        frames[:, j].astype("<u4").view(np.uint8).reshape(-1, 4)[:, :width]
        for j, width in enumerate(widths)
    ]
    return np.concatenate(columns, axis=1).tobytes() if len(frames) else b""


def decode_payload(
    payload: bytes, header: TokenStreamHeader, base_offset: int = 0
) -> np.ndarray:
    sizes, widths = _pair_widths(header)
    frame_bytes = sum(widths)
    expected = header.frame_count * frame_bytes
    if len(payload) < expected:
        complete = len(payload) // frame_bytes
        raise StreamFormatError(
            f"Truncated payload: {complete} of {header.frame_count} frames",
            base_offset + complete * frame_bytes,
        )
    if len(payload) > expected:
        raise StreamFormatError(
            "Trailing bytes after last frame", base_offset + expected
        )

    raw = np.frombuffer(payload, dtype=np.uint8)
    raw = raw.reshape(header.frame_count, frame_bytes)
    frames = np.empty((header.frame_count, header.n_pairs), dtype=np.int64)
    start = 0
    for j, (size, width) in enumerate(zip(sizes, widths)):
        padded = np.zeros((header.frame_count, 4), dtype=np.uint8)
        padded[:, :width] = raw[:, start : start + width]
        frames[:, j] = padded.view("<u4").reshape(-1)
        bad = frames[:, j] >= size
        if bad.any():
            frame = int(np.argmax(bad))
            raise StreamFormatError(
                f"Pair {j} code {frames[frame, j]} outside [0, {size})",
                base_offset + frame * frame_bytes + start,
            )
        start += width
    return frames


def write_stream(header: TokenStreamHeader, frames, sink: Sink) -> int:
    """Write header and frames, an (n, P) array of pair codes.

    Returns the number of bytes written.
    """
    frames = np.asarray(frames, dtype=np.int64).reshape(-1, header.n_pairs)
    if len(frames) != header.frame_count:
        raise ConfigMismatchError(header.frame_count, len(frames), what="frame count")
    data = header.to_bytes() + encode_payload(frames, header)
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as f:
            f.write(data)
    else:
        sink.write(data)
    logger.debug("Wrote %d frames, %d bytes", len(frames), len(data))
    return len(data)


def read_stream(source: Source) -> Tuple[TokenStreamHeader, np.ndarray]:
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
    else:
        data = source.read()
    header = TokenStreamHeader.from_bytes(data)
    return header, decode_payload(data[header.size :], header, base_offset=header.size)
