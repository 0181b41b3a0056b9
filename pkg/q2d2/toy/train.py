"""Plain minibatch SGD for the toy pipeline, with gradient checking."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from q2d2.analytics.utilization import UtilizationReport, measure_utilization
from q2d2.common.errors import DivergenceError
from q2d2.quantizer.quantizer_config import QuantizerConfig
from q2d2.toy.pipeline import ToyPipeline

logger = logging.getLogger(__name__)

HOLDOUT_FRACTION = 0.1
GRAD_CHECK_FRAMES = 8
EPSILON_RANGE = (1e-7, 1e-3)
# Held-out pair utilization a healthy run is expected to reach.
UTILIZATION_TARGET = 0.8


@dataclass(frozen=True)
class TrainReport:
    loss_curve: List[Tuple[int, float]]
    final_utilization: UtilizationReport
    grad_check: float
    steps: int
    learning_rate: float

    @property
    def initial_loss(self) -> float:
        return self.loss_curve[0][1]

    @property
    def final_loss(self) -> float:
        return self.loss_curve[-1][1]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.loss_curve, columns=["step", "loss"])

    def summary(self) -> dict:
        return {
            "steps": self.steps,
            "learning_rate": self.learning_rate,
            "initial_loss": self.initial_loss,
            "final_loss": self.final_loss,
            "pair_utilization": self.final_utilization.pair_utilization,
            "codebook_utilization": self.final_utilization.codebook_utilization,
            "grad_check": self.grad_check,
        }


def split_holdout(dataset: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Last tenth of the frames is held out; a single frame is used for both."""
    n_hold = int(len(dataset) * HOLDOUT_FRACTION)
    if n_hold == 0 or n_hold == len(dataset):
        return dataset, dataset
    return dataset[:-n_hold], dataset[-n_hold:]


def _batches(n: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    while True:
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            yield order[start : start + batch_size]


def grad_check(
    pipeline: ToyPipeline, x, target=None, epsilon: float = 1e-5
) -> float:
    """Max relative error of the analytic gradient against central differences.

    Differences are taken on the surrogate pipeline, where the snap is the
    identity in bounded space. Per parameter tensor the error is
    max|analytic - numeric| / max(max|analytic|, max|numeric|), and the
    largest over tensors is returned.
    """
    if not EPSILON_RANGE[0] <= epsilon <= EPSILON_RANGE[1]:
        raise ValueError(f"Epsilon must be in {list(EPSILON_RANGE)}, got {epsilon}")
    x = np.asarray(x, dtype=np.float64).reshape(-1, pipeline.input_dim)
    target = x if target is None else np.asarray(target, dtype=np.float64)
    _, analytic = pipeline.gradients(x, target, mode="surrogate")

    worst = 0.0
    for name, param in pipeline.parameters().items():
        numeric = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            saved = param[index]
            param[index] = saved + epsilon
            plus = pipeline.loss(x, target, mode="surrogate")
            param[index] = saved - epsilon
            minus = pipeline.loss(x, target, mode="surrogate")
            param[index] = saved
            numeric[index] = (plus - minus) / (2 * epsilon)
        scale = max(np.abs(analytic[name]).max(), np.abs(numeric).max(), 1e-12)
        error = float(np.abs(analytic[name] - numeric).max() / scale)
        logger.debug("grad check %s: %.3e", name, error)
        worst = max(worst, error)
    return worst


def train(
    pipeline: ToyPipeline,
    dataset,
    steps: int,
    learning_rate: float,
    batch_size: int = 32,
    seed: int = 0,
    eval_every: int = 0,
    progress: bool = False,
) -> TrainReport:
    """Train in place on an autoencoding objective (target = input).

    The loss curve holds the full training-split MSE at step 0, every
    eval_every steps (default steps // 100), and after the last step.
    """
    if steps < 1:
        raise ValueError(f"Steps must be at least 1, got {steps}")
    dataset = np.asarray(dataset, dtype=np.float64)
    train_split, held_out = split_holdout(dataset)
    eval_every = eval_every or max(1, steps // 100)
    batches = _batches(len(train_split), batch_size, np.random.default_rng(seed))

    loss_curve = [(0, pipeline.loss(train_split, train_split))]
    for step in tqdm(range(1, steps + 1), disable=not progress, desc="train"):
        batch = train_split[next(batches)]
        loss, grads = pipeline.gradients(batch, batch)
        if not np.isfinite(loss):
            raise DivergenceError(step, loss)
        pipeline.step(grads, learning_rate)
        if step % eval_every == 0 or step == steps:
            loss = pipeline.loss(train_split, train_split)
            if not np.isfinite(loss):
                raise DivergenceError(step, loss)
            loss_curve.append((step, loss))
    logger.info(
        "Trained %d steps: loss %.6g -> %.6g",
        steps,
        loss_curve[0][1],
        loss_curve[-1][1],
    )

    utilization = measure_utilization(pipeline.pair_codes(held_out), pipeline.layout)
    if utilization.pair_utilization < UTILIZATION_TARGET:
        warnings.warn(
            f"Held-out pair utilization {utilization.pair_utilization:.3f} "
            f"is below {UTILIZATION_TARGET}"
        )
    return TrainReport(
        loss_curve=loss_curve,
        final_utilization=utilization,
        grad_check=grad_check(pipeline, train_split[:GRAD_CHECK_FRAMES]),
        steps=steps,
        learning_rate=learning_rate,
    )


@dataclass(frozen=True)
class AblationReport:
    seeds: Tuple[int, ...]
    tanh_losses: Tuple[float, ...]
    clamp_losses: Tuple[float, ...]

    @property
    def tanh_not_worse(self) -> bool:
        return all(t <= c for t, c in zip(self.tanh_losses, self.clamp_losses))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"seed": self.seeds, "tanh": self.tanh_losses, "clamp": self.clamp_losses}
        )


def projection_ablation(
    config: QuantizerConfig,
    dataset,
    seeds: Sequence[int] = (0, 1, 2, 3, 4),
    steps: int = 1000,
    learning_rate: float = 1.0,
    batch_size: int = 32,
) -> AblationReport:
    """Train the tanh and clamp projections from identical weights per seed."""
    dataset = np.asarray(dataset, dtype=np.float64)
    losses: Dict[str, List[float]] = {"tanh": [], "clamp": []}
    for seed in seeds:
        for projection in losses:
            pipeline = ToyPipeline.initialize(
                config, dataset.shape[1], seed=seed, projection=projection
            )
            report = train(pipeline, dataset, steps, learning_rate, batch_size, seed)
            losses[projection].append(report.final_loss)
    ablation = AblationReport(
        tuple(seeds), tuple(losses["tanh"]), tuple(losses["clamp"])
    )
    if not ablation.tanh_not_worse:
        warnings.warn("tanh projection did not match or beat clamp on every seed")
    return ablation
