"""Quantization throughput of the brute-force and accelerated paths."""

import time
from typing import Sequence

import pandas as pd

from q2d2.pipeline.sweep import synthetic_latents
from q2d2.quantizer.nearest_grid import METHODS
from q2d2.quantizer.quantizer import quantize
from q2d2.quantizer.quantizer_config import QuantizerConfig


def bench(
    config: QuantizerConfig,
    n_frames: int = 10_000,
    seed: int = 0,
    methods: Sequence[str] = METHODS,
) -> pd.DataFrame:
    if n_frames < 1:
        raise ValueError(f"n_frames must be at least 1, got {n_frames}")
    latents = synthetic_latents(config.d, n_frames, seed)
    rows = []
    for method in methods:
        start = time.perf_counter()
        quantize(latents, config, method)
        seconds = time.perf_counter() - start
        rows.append(
            {
                "method": method,
                "frames": n_frames,
                "seconds": seconds,
                "frames_per_second": (
                    n_frames / seconds if seconds > 0 else float("inf")
                ),
            }
        )
    return pd.DataFrame(rows)
