"""Snapshot containers and reshaping primitives.

Data layout conventions used across the package:

* A *snapshot matrix* is a float64 array of shape ``(J, K)`` whose column
  ``k`` is the flattened spatial state at time instant ``k``.
* A *snapshot tensor* is a float64 array of order 3 to 5 with axes
  ``(components, spatial..., time)``: the first axis indexes physical
  components, the middle axes are spatial coordinates and the last axis is
  time.  Arrays are row-major, so the time index varies fastest in memory
  and ``unfold`` is a plain reshape.
* Missing entries carry a quiet NaN sentinel; the boolean *gap mask*
  (True = missing) is the authoritative record of where gaps are.

All functions are pure: inputs are never mutated.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = [
    "unfold",
    "fold",
    "mode_unfold",
    "inject_gaps",
    "downsample",
    "downsample_positions",
    "spatial_axes",
    "gap_fraction",
]


def _as_float(data, min_order: int = 2) -> np.ndarray:
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim < min_order:
        raise ValueError(f"expected an array of order >= {min_order}, got order {arr.ndim}")
    return arr


def spatial_axes(order: int) -> tuple[int, ...]:
    """Axis indices of the spatial coordinates for an order-``order`` snapshot tensor."""
    if order < 3:
        raise ValueError("snapshot tensors need component, spatial and time axes (order >= 3)")
    return tuple(range(1, order - 1))


def unfold(tensor: np.ndarray) -> np.ndarray:
    """Flatten all non-time axes of a snapshot tensor into a single row index.

    The folding is component-major, then spatial axes in declaration order,
    so column ``k`` of the result is snapshot ``k`` laid out contiguously.
    The map is bijective; see :func:`fold` for the inverse.
    """
    t = _as_float(tensor)
    return t.reshape(-1, t.shape[-1])


def fold(matrix: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`: reshape a ``(J, K)`` matrix to tensor ``dims``.

    ``dims`` must satisfy ``prod(dims[:-1]) == J`` and ``dims[-1] == K``.
    """
    m = _as_float(matrix)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got order {m.ndim}")
    shape = tuple(int(d) for d in dims)
    if any(d < 1 for d in shape):
        raise ValueError(f"dims must be positive, got {shape}")
    j = int(np.prod(shape[:-1]))
    if j != m.shape[0] or shape[-1] != m.shape[1]:
        raise ValueError(
            f"dims {shape} do not match matrix shape {m.shape}: "
            f"need prod(dims[:-1]) == {m.shape[0]} and dims[-1] == {m.shape[1]}"
        )
    return m.reshape(shape)


def mode_unfold(tensor: np.ndarray, mode: int) -> np.ndarray:
    """Matricize a tensor along one axis (``mode`` is 1-based).

    Returns a ``(J_mode, prod(other dims))`` matrix whose columns are the
    mode-``mode`` fibers; the remaining indices enumerate in ascending axis
    order, row-major (last remaining index fastest).
    """
    t = _as_float(tensor)
    if not 1 <= mode <= t.ndim:
        raise ValueError(f"mode {mode} out of range for an order-{t.ndim} tensor")
    axis = mode - 1
    return np.moveaxis(t, axis, 0).reshape(t.shape[axis], -1)


def inject_gaps(tensor: np.ndarray, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Blank out a random subset of entries, marking them in a gap mask.

    Exactly ``round(fraction * size)`` entries, drawn uniformly without
    replacement, are replaced by NaN.  Deterministic for a fixed seed.
    Returns ``(gapped, mask)`` where ``mask`` is True at the removed entries.
    """
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"gap fraction must lie in [0, 1), got {fraction}")
    t = np.array(tensor, dtype=np.float64)
    mask = np.zeros(t.shape, dtype=bool)
    n_gaps = int(round(fraction * t.size))
    if n_gaps:
        rng = np.random.default_rng(seed)
        flat = rng.choice(t.size, size=n_gaps, replace=False)
        mask.flat[flat] = True
        t[mask] = np.nan
    return t, mask


def gap_fraction(mask: np.ndarray) -> float:
    """Fraction of entries marked missing by a gap mask."""
    m = np.asarray(mask, dtype=bool)
    if m.size == 0:
        raise ValueError("empty mask")
    return float(m.sum()) / m.size


def downsample(tensor: np.ndarray, factors: Sequence[int]) -> np.ndarray:
    """Keep every ``f``-th grid point along each spatial axis, anchored at index 0.

    ``factors`` gives one positive integer per spatial axis; component and
    time axes are untouched.  The kept source positions are
    ``{0, f, 2f, ...}`` per axis (see :func:`downsample_positions`), which is
    exactly where :func:`modalrepair.superres.place_on_target` re-places the
    values with matching strides.
    """
    t = _as_float(tensor, min_order=3)
    axes = spatial_axes(t.ndim)
    if len(factors) != len(axes):
        raise ValueError(f"need {len(axes)} spatial factors, got {len(factors)}")
    key: list[slice] = [slice(None)] * t.ndim
    for ax, f in zip(axes, factors):
        f = int(f)
        if f < 1 or f > t.shape[ax]:
            raise ValueError(f"factor {f} invalid for axis of length {t.shape[ax]}")
        key[ax] = slice(None, None, f)
    return t[tuple(key)].copy()


def downsample_positions(spatial_shape: Sequence[int], factors: Sequence[int]) -> tuple[np.ndarray, ...]:
    """Per-axis source indices that :func:`downsample` keeps."""
    if len(spatial_shape) != len(factors):
        raise ValueError("one factor per spatial axis required")
    return tuple(np.arange(0, int(n), int(f)) for n, f in zip(spatial_shape, factors))
