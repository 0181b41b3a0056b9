"""Ablation sweeps over tilings and level schedules on synthetic latents."""

from __future__ import annotations

import logging
import warnings
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from q2d2.analytics.distortion import quantization_mse
from q2d2.analytics.utilization import measure_utilization
from q2d2.codebook.codebook import CodebookLayout, bits_per_token
from q2d2.constants import MAX_LEVELS, TilingKind
from q2d2.quantizer.quantizer import quantize
from q2d2.quantizer.quantizer_config import QuantizerConfig

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "tiling",
    "levels",
    "matched",
    "codebook_size",
    "bits_per_token",
    "mse_bounded",
    "mse_latent",
    "pair_utilization",
    "codebook_utilization",
]


def synthetic_latents(d: int, n_frames: int, seed: int) -> np.ndarray:
    """Independent uniform latents on [-1, 1]^d."""
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n_frames, d))


def parse_schedule(text: str, d: int) -> List[int]:
    """"7" repeats one level count d times; "9,9,7,7,7,7" is taken as is."""
    levels = [int(part) for part in text.split(",") if part.strip()]
    if len(levels) == 1:
        levels = levels * d
    return levels


def matched_rectangle(config: QuantizerConfig) -> Optional[QuantizerConfig]:
    """Rectangle config whose pair grids have the rhombic grids' realized counts.

    Each rhombic pair (lx, ly) has 2 lx ly points; the rectangle pair
    (2 lx, ly) has the same number.
    """
    levels = list(config.levels)
    for j, kind in enumerate(config.tilings):
        if kind == TilingKind.RHOMBIC:
            levels[2 * j] *= 2
    if max(levels) > MAX_LEVELS:
        warnings.warn(f"No matched rectangle for {config.to_string()}: levels {levels}")
        return None
    return QuantizerConfig.uniform(TilingKind.RECTANGLE, levels)


def sweep_row(
    config: QuantizerConfig, latents: np.ndarray, matched: bool = False
) -> dict:
    layout = CodebookLayout.from_config(config)
    q = quantize(latents, config, "fast")
    utilization = measure_utilization(q.pair_codes, layout)
    return {
        "tiling": "+".join(sorted({kind.value for kind in config.tilings})),
        "levels": ",".join(str(l) for l in config.levels),
        "matched": matched,
        "codebook_size": layout.total_size,
        "bits_per_token": bits_per_token(layout),
        "mse_bounded": quantization_mse(latents, config, "bounded", "fast").total,
        "mse_latent": quantization_mse(latents, config, "latent", "fast").total,
        "pair_utilization": utilization.pair_utilization,
        "codebook_utilization": utilization.codebook_utilization,
    }


def run_sweep(
    kinds: Iterable[str],
    schedules: Sequence[Sequence[int]],
    latents: np.ndarray,
    matched: bool = False,
    progress: bool = False,
) -> pd.DataFrame:
    """One row per (tiling, schedule), plus a matched rectangle row per rhombic row."""
    configs = [
        (QuantizerConfig.uniform(kind, levels), False)
        for levels in schedules
        for kind in kinds
    ]
    if matched:
        extra = []
        for config, _ in configs:
            if TilingKind.RHOMBIC in config.tilings:
                rectangle = matched_rectangle(config)
                if rectangle is not None:
                    extra.append((rectangle, True))
        configs.extend(extra)

    rows = []
    for config, is_matched in tqdm(configs, disable=not progress, desc="sweep"):
        logger.info("Sweeping %s", config.to_string())
        rows.append(sweep_row(config, latents, is_matched))
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
