import numpy as np

HARMONICS = 3


def make_synthetic_dataset(seed: int, n_frames: int, input_dim: int) -> np.ndarray:
    """Frames of three random-phase sinusoids sampled at input_dim points.

    Harmonic k contributes a_k cos(2 pi k t / T) + b_k sin(2 pi k t / T) with
    a_k, b_k uniform in [-1, 1]. Each pair has amplitude at most sqrt(2), so
    dividing by 3 sqrt(2) keeps every sample inside [-1, 1].
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be at least 1, got {n_frames}")
    if input_dim < 1:
        raise ValueError(f"input_dim must be at least 1, got {input_dim}")
    rng = np.random.default_rng(seed)
    coefficients = rng.uniform(-1.0, 1.0, size=(n_frames, 2 * HARMONICS))
    t = np.arange(input_dim) / input_dim
    k = np.arange(1, HARMONICS + 1)[:, None]
    basis = np.concatenate(
        [np.cos(2 * np.pi * k * t), np.sin(2 * np.pi * k * t)], axis=0
    )
    frames = coefficients @ basis / (HARMONICS * np.sqrt(2))
    return np.clip(frames, -1.0, 1.0)
