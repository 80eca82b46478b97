"""Iterative displacement updates on the sparse volume.

Correlation values are computed once at construction; each refinement step
only moves the stored coordinates. Shifting by the residual flow keeps every
entry's absolute match position (source + displacement + accumulated flow)
unchanged.
"""

from __future__ import annotations

from .grid import FlowField
from .volume import SparseCorrelationVolume


def shift_volume(scv: SparseCorrelationVolume, delta: FlowField) -> SparseCorrelationVolume:
    """Move every entry at pixel x from d to d - delta(x); values unchanged.

    Shifted displacements are free to be fractional; arithmetic stays in
    float32 to match the volume's 4-byte storage.
    """
    if (delta.height, delta.width) != (scv.height, scv.width):
        raise ValueError(
            f"delta dims {(delta.height, delta.width)} != volume "
            f"{(scv.height, scv.width)}"
        )
    shifted = scv.displacements - delta.uv[:, :, None, :]
    return SparseCorrelationVolume(
        displacements=shifted,
        values=scv.values,
        resolution_divisor=scv.resolution_divisor,
    )


def accumulate_flow(flow: FlowField, delta: FlowField) -> FlowField:
    """Pixelwise sum of the running flow and a residual."""
    if flow.uv.shape != delta.uv.shape:
        raise ValueError(f"flow dims {flow.uv.shape} != delta dims {delta.uv.shape}")
    valid = None
    if flow.valid is not None and delta.valid is not None:
        valid = flow.valid & delta.valid
    elif flow.valid is not None:
        valid = flow.valid.copy()
    elif delta.valid is not None:
        valid = delta.valid.copy()
    return FlowField(flow.uv + delta.uv, valid)
