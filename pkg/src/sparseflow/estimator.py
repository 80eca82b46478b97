"""Iterative flow refinement over a sparse correlation volume.

The volume is correlated once; each iteration shifts its coordinates by the
newest residual, re-encodes, and asks an update operator for the next
residual. The operator is pluggable: a learned recurrent block would slot in
here (consuming the motion tensor, the running flow, and its own hidden
state); this package ships a non-learned soft-argmax operator instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .encoder import EncoderConfig, MotionTensor, encode
from .grid import FeatureMap, FlowField
from .update import accumulate_flow, shift_volume
from .volume import build_sparse


class UpdateOperator(Protocol):
    """Maps (motion tensor, current flow, iteration index) to a residual flow
    of the same dims."""

    def __call__(self, motion: MotionTensor, flow: FlowField, iteration: int) -> FlowField:
        ...


@dataclass(frozen=True)
class EstimatorConfig:
    iterations: int = 8
    k: int = 8
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    temperature: float = 1.0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")


def soft_argmax_update(
    motion: MotionTensor, level: int = 1, temperature: float = 1.0
) -> FlowField:
    """Residual flow as the softmax-weighted mean displacement of one level.

    Per pixel, the level's (2r+1)**2 channels are turned into weights
    softmax(temperature * value); the residual is the weighted sum of cell
    displacements, rescaled by the level divisor 2**(level-1). Its L-inf
    norm is therefore bounded by r * 2**(level-1).
    """
    if not 1 <= level <= motion.levels:
        raise ValueError(f"level {level} out of range [1, {motion.levels}]")
    r = motion.radius
    win = 2 * r + 1
    logits = motion.level_channels(level).astype(np.float64) * temperature
    logits -= logits.max(axis=2, keepdims=True)
    weights = np.exp(logits)
    weights /= weights.sum(axis=2, keepdims=True)
    cells = np.arange(win * win)
    cell_dx = (cells % win - r).astype(np.float64)
    cell_dy = (cells // win - r).astype(np.float64)
    divisor = float(2 ** (level - 1))
    u = (weights @ cell_dx) * divisor
    v = (weights @ cell_dy) * divisor
    return FlowField(np.stack([u, v], axis=-1).astype(np.float32))


@dataclass(frozen=True)
class SoftArgmaxOperator:
    """Non-learned update operator built on `soft_argmax_update`."""

    temperature: float = 1.0
    level: int = 1

    def __call__(self, motion: MotionTensor, flow: FlowField, iteration: int) -> FlowField:
        return soft_argmax_update(motion, level=self.level, temperature=self.temperature)


def estimate_flow(
    f1: FeatureMap,
    f2: FeatureMap,
    cfg: EstimatorConfig | None = None,
    op: UpdateOperator | None = None,
    scale: float = 1.0,
) -> list[FlowField]:
    """Run the fixed-length refinement loop; returns the flow after each of
    the N iterations, at feature resolution (caller upsamples).

    Inner products happen once, in the initial volume construction; the
    loop only shifts coordinates, encodes, and accumulates residuals.
    """
    if cfg is None:
        cfg = EstimatorConfig()
    if op is None:
        op = SoftArgmaxOperator(temperature=cfg.temperature)
    volume = build_sparse(f1, f2, cfg.k, scale=scale)
    flow = FlowField.zeros(f1.height, f1.width)
    flows: list[FlowField] = []
    for i in range(cfg.iterations):
        motion = encode(volume, cfg.encoder)
        delta = op(motion, flow, i)
        flow = accumulate_flow(flow, delta)
        volume = shift_volume(volume, delta)
        flows.append(flow)
    return flows
