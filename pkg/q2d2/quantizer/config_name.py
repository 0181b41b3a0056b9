from dataclasses import dataclass
import re
from typing import List

from q2d2.common.errors import InvalidSpecError
from q2d2.constants import HEX_ROW_OFFSET, TilingKind
from q2d2.quantizer.quantizer_config import QuantizerConfig

# "rhombic:7,7,7,7,7,7"
# "rect:7,7+hex:9,9+rhombic:7,7"
# [tiling]:[levels, one per dimension, two per pair](+[tiling]:[levels])*


@dataclass
class ConfigGroup:
    """A run of consecutive pairs sharing one tiling.

    THE ORDER MUST MATCH THE ORDER OF THE REGEX GROUPS.
    """

    tiling: str
    levels: str


CONFIG_SUBPATTERN = ConfigGroup(
    tiling=r"[A-Za-z]+",
    levels=r"\d+(?:\s*,\s*\d+)*",
)

CONFIG_GROUP_PATTERN = re.compile(
    f"^\\s*({CONFIG_SUBPATTERN.tiling})\\s*:\\s*({CONFIG_SUBPATTERN.levels})\\s*$"
)


def parse_config_groups(text: str) -> List[ConfigGroup]:
    groups = []
    for part in text.split("+"):
        parse_result = re.search(CONFIG_GROUP_PATTERN, part)
        if parse_result is None:
            raise InvalidSpecError(
                f"Config {text!r} does not conform to the tiling:levels pattern."
            )
        groups.append(ConfigGroup(*parse_result.groups()))
    return groups


def parse_config_string(
    text: str, hex_offset: float = HEX_ROW_OFFSET
) -> QuantizerConfig:
    levels: List[int] = []
    tilings: List[TilingKind] = []
    for group in parse_config_groups(text):
        kind = TilingKind.parse(group.tiling)
        group_levels = [int(l) for l in group.levels.split(",")]
        if len(group_levels) % 2 != 0:
            raise InvalidSpecError(
                f"Tiling group {group.tiling}:{group.levels} needs two levels per pair"
            )
        levels.extend(group_levels)
        tilings.extend([kind] * (len(group_levels) // 2))
    return QuantizerConfig(tuple(levels), tuple(tilings), hex_offset)
