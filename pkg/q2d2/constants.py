"""Module contains all project wide constants."""
from enum import Enum


class TilingKind(Enum):
    RECTANGLE = "rectangle"
    HEXAGON = "hexagon"
    RHOMBIC = "rhombic"

    @property
    def wire_id(self) -> int:
        return TILING_WIRE_IDS[self]

    @classmethod
    def from_wire_id(cls, wire_id: int) -> "TilingKind":
        for kind, kind_id in TILING_WIRE_IDS.items():
            if kind_id == wire_id:
                return kind
        raise ValueError(f"Unknown tiling id {wire_id}")

    @classmethod
    def parse(cls, name: "str | TilingKind") -> "TilingKind":
        if isinstance(name, TilingKind):
            return name
        key = name.strip().lower()
        if key not in TILING_ALIASES:
            raise ValueError(
                f"Tiling {name} not supported, must be one of "
                f"{sorted(TILING_ALIASES)}"
            )
        return TILING_ALIASES[key]


TILING_WIRE_IDS = {
    TilingKind.RECTANGLE: 0,
    TilingKind.HEXAGON: 1,
    TilingKind.RHOMBIC: 2,
}

TILING_ALIASES = {
    "rect": TilingKind.RECTANGLE,
    "rectangle": TilingKind.RECTANGLE,
    "hex": TilingKind.HEXAGON,
    "hexagon": TilingKind.HEXAGON,
    "rhombic": TilingKind.RHOMBIC,
    "rhombus": TilingKind.RHOMBIC,
}


# ---------------- GRID CONSTANTS ----------------
MIN_LEVELS = 2
MAX_LEVELS = 255  # pair codes of every in-scope config fit in 3 bytes
HEX_ROW_OFFSET = 0.25  # fraction of dx; every other row shifts by +-dx/4

# Relative tolerance on latent range checks, [-1 - eps, 1 + eps]
LATENT_TOLERANCE = 1e-12

# ---------------- TOKEN FORMAT CONSTANTS ----------------
STREAM_MAGIC = b"Q2D2"
STREAM_VERSION = 1
DIGEST_SIZE = 32  # sha256

# ---------------- PRESETS ----------------
# name: (tiling, levels, tokens per second; 0 = not stated)
PRESETS = {
    "1kbps": (TilingKind.RHOMBIC, (7, 7, 7, 7, 7, 7), 75),
    "3.3kbps": (TilingKind.RHOMBIC, (9, 9, 7, 7, 7, 7), 166),
    "6.9kbps": (TilingKind.RHOMBIC, (9, 9, 9, 9, 7, 7), 333),
    "9.5kbps": (TilingKind.RHOMBIC, (9, 9, 9, 9, 9, 9), 0),
    "25kbps": (TilingKind.RHOMBIC, (11, 11, 11, 11, 11, 11), 0),
    "dim8-1kbps": (TilingKind.RHOMBIC, (5, 5, 5, 5, 5, 5, 3, 3), 75),
    "dim4-1kbps": (TilingKind.RHOMBIC, (19, 19, 19, 19), 75),
    "hex-1kbps": (TilingKind.HEXAGON, (7, 7, 7, 7, 7, 7), 75),
}
