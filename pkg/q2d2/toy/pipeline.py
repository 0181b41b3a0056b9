"""A small differentiable pipeline around the quantizer.

affine -> projection -> bound -> snap -> unbound -> affine

The snap step uses the straight-through gradient. The surrogate mode
replaces the snap with the identity in bounded space, which is the function
whose exact gradient the straight-through rule computes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from q2d2.codebook.codebook import CodebookLayout, TokenFrame
from q2d2.common.errors import ConfigMismatchError
from q2d2.quantizer.quantizer import (
    bound,
    bound_backward,
    quantize,
    snap_backward,
    unbound,
    QuantizedVector,
)
from q2d2.quantizer.quantizer_config import QuantizerConfig

PROJECTIONS = ("tanh", "clamp", "linear")
OUTPUT_PROJECTIONS = ("linear", "identity")
MODES = ("ste", "surrogate")


def _uniform_init(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    limit = 1 / np.sqrt(fan_in)
    return rng.uniform(-limit, limit, size=shape)


@dataclass
class ToyPipeline:
    quantizer: QuantizerConfig
    w_in: np.ndarray
    b_in: np.ndarray
    w_out: Optional[np.ndarray]
    b_out: Optional[np.ndarray]
    rng_seed: int
    projection: str = "tanh"
    output_projection: str = "linear"
    bypass_quantizer: bool = False
    method: str = "fast"
    layout: CodebookLayout = field(init=False, repr=False)

    def __post_init__(self):
        if self.projection not in PROJECTIONS:
            raise ValueError(
                f"Projection must be one of {PROJECTIONS}, got {self.projection}"
            )
        if self.output_projection not in OUTPUT_PROJECTIONS:
            raise ValueError(
                f"Output projection must be one of {OUTPUT_PROJECTIONS}, "
                f"got {self.output_projection}"
            )
        if self.projection == "linear" and not self.bypass_quantizer:
            raise ValueError(
                "A linear projection can leave [-1, 1]; bypass the quantizer"
            )
        if self.w_in.shape[1] != self.quantizer.d:
            raise ConfigMismatchError(self.quantizer.d, self.w_in.shape[1])
        if self.output_projection == "linear":
            if self.w_out is None or self.b_out is None:
                raise ValueError("A linear output projection needs w_out and b_out")
            if self.w_out.shape[0] != self.quantizer.d:
                raise ConfigMismatchError(self.quantizer.d, self.w_out.shape[0])
        elif self.w_out is not None or self.b_out is not None:
            raise ValueError("An identity output projection takes no w_out or b_out")
        self.layout = CodebookLayout.from_config(self.quantizer)

    @classmethod
    def initialize(
        cls,
        quantizer: QuantizerConfig,
        input_dim: int,
        output_dim: Optional[int] = None,
        seed: int = 0,
        projection: str = "tanh",
        output_projection: str = "linear",
        bypass_quantizer: bool = False,
    ) -> ToyPipeline:
        """Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], seeded."""
        output_dim = input_dim if output_dim is None else output_dim
        d = quantizer.d
        rng = np.random.default_rng(seed)
        w_in = _uniform_init(rng, input_dim, (input_dim, d))
        b_in = _uniform_init(rng, input_dim, (d,))
        if output_projection == "identity":
            if output_dim != d:
                raise ConfigMismatchError(d, output_dim, what="output dimension")
            w_out, b_out = None, None
        else:
            w_out = _uniform_init(rng, d, (d, output_dim))
            b_out = _uniform_init(rng, d, (output_dim,))
        return cls(
            quantizer=quantizer,
            w_in=w_in,
            b_in=b_in,
            w_out=w_out,
            b_out=b_out,
            rng_seed=seed,
            projection=projection,
            output_projection=output_projection,
            bypass_quantizer=bypass_quantizer,
        )

    @property
    def input_dim(self) -> int:
        return self.w_in.shape[0]

    @property
    def output_dim(self) -> int:
        return self.quantizer.d if self.w_out is None else self.w_out.shape[1]

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {"w_in": self.w_in, "b_in": self.b_in}
        if self.w_out is not None:
            params.update(w_out=self.w_out, b_out=self.b_out)
        return params

    def _inputs(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.input_dim:
            raise ConfigMismatchError(
                self.input_dim, x.shape[-1], what="input dimension"
            )
        return x

    def _project(self, h: np.ndarray) -> np.ndarray:
        if self.projection == "tanh":
            return np.tanh(h)
        elif self.projection == "clamp":
            return np.clip(h, -1.0, 1.0)
        return h

    def _project_backward(self, upstream: np.ndarray, h: np.ndarray, z: np.ndarray):
        if self.projection == "tanh":
            return upstream * (1 - z * z)
        elif self.projection == "clamp":
            return upstream * (np.abs(h) <= 1.0)
        return upstream

    def _run(self, x: np.ndarray, mode: str) -> Tuple[dict, Optional[QuantizedVector]]:
        if mode not in MODES:
            raise ValueError(f"Mode must be one of {MODES}, got {mode}")
        h = x @ self.w_in + self.b_in
        z = self._project(h)
        q = None
        if self.bypass_quantizer:
            u = z
        elif mode == "ste":
            q = quantize(z, self.quantizer, self.method)
            u = unbound(q, self.quantizer)
        else:
            u = bound(z, self.quantizer) * (2 / self.quantizer.level_array)
        recon = u if self.w_out is None else u @ self.w_out + self.b_out
        return {"x": x, "h": h, "z": z, "u": u, "recon": recon}, q

    def forward(self, x, mode: str = "ste"):
        """Reconstruction and tokens for one frame (input_dim,) or a batch.

        Returns (reconstruction, TokenFrame) for a single frame and
        (reconstructions, list of TokenFrame) for a batch. Tokens are None
        when the quantizer is bypassed or in surrogate mode.
        """
        x = self._inputs(x)
        cache, q = self._run(x, mode)
        if q is None:
            return cache["recon"], None
        if x.ndim == 1:
            return cache["recon"], TokenFrame.from_pair_codes(q.pair_codes, self.layout)
        return cache["recon"], [
            TokenFrame.from_pair_codes(codes, self.layout) for codes in q.pair_codes
        ]

    def pair_codes(self, x) -> np.ndarray:
        """Per-pair codes of a batch, shape (n, P)."""
        x = self._inputs(x).reshape(-1, self.input_dim)
        z = self._project(x @ self.w_in + self.b_in)
        return quantize(z, self.quantizer, self.method).pair_codes

    def quantizer_backward(self, upstream: np.ndarray) -> np.ndarray:
        """Gradient through bound -> snap -> unbound, shared by both modes.

        In surrogate mode the snap is the identity; in straight-through mode
        its gradient is defined to be the identity. The two Jacobians are
        the same product of scalings.
        """
        if self.bypass_quantizer:
            return upstream
        bounded = upstream * (2 / self.quantizer.level_array)
        return bound_backward(snap_backward(bounded), self.quantizer)

    def loss(self, x, target, mode: str = "ste") -> float:
        cache, _ = self._run(self._inputs(x), mode)
        return float(np.mean((cache["recon"] - np.asarray(target)) ** 2))

    def gradients(
        self, x, target, mode: str = "ste"
    ) -> Tuple[float, Dict[str, np.ndarray]]:
        """Element-mean squared error and its gradient for every parameter."""
        x = self._inputs(x).reshape(-1, self.input_dim)
        target = np.asarray(target, dtype=np.float64).reshape(len(x), -1)
        cache, _ = self._run(x, mode)
        error = cache["recon"] - target
        loss = float(np.mean(error**2))
        g_recon = 2 * error / error.size

        grads = {}
        if self.w_out is None:
            g_u = g_recon
        else:
            grads["w_out"] = cache["u"].T @ g_recon
            grads["b_out"] = g_recon.sum(axis=0)
            g_u = g_recon @ self.w_out.T
        g_z = self.quantizer_backward(g_u)
        g_h = self._project_backward(g_z, cache["h"], cache["z"])
        grads["w_in"] = x.T @ g_h
        grads["b_in"] = g_h.sum(axis=0)
        return loss, grads

    def step(self, grads: Dict[str, np.ndarray], learning_rate: float) -> None:
        for name, param in self.parameters().items():
            param -= learning_rate * grads[name]
