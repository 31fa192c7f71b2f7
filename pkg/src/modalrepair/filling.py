"""Scattered linear interpolation of missing entries on regular index grids.

Missing points inside the convex hull of observed points are filled by
piecewise-linear barycentric interpolation over a Delaunay triangulation of
the observed grid positions (plain 1-D linear interpolation for a single
spatial axis).  Points outside the hull, and every point when the observed
geometry is degenerate, fall back as documented per caller (snapshot mean
or per-axis interpolation).
"""
from __future__ import annotations

import warnings

import numpy as np
from scipy.spatial import Delaunay, QhullError

__all__ = ["LinearFillPattern", "DegenerateGeometryError", "fill_slice_linear"]


class DegenerateGeometryError(ValueError):
    """Observed points do not span the spatial dimensionality (e.g. collinear in 2-D)."""


class LinearFillPattern:
    """Reusable fill weights for one observed/missing pattern on a spatial grid.

    Building the triangulation is the expensive part; once built, ``apply``
    fills any number of value slices sharing the pattern.  Rows of
    ``values`` passed to :meth:`apply_many` are independent slices.
    """

    def __init__(self, spatial_shape: tuple[int, ...], observed_flat: np.ndarray):
        self.spatial_shape = tuple(int(n) for n in spatial_shape)
        self.ndim = len(self.spatial_shape)
        size = int(np.prod(self.spatial_shape))
        observed_flat = np.asarray(observed_flat)
        if observed_flat.dtype == bool:
            observed_flat = np.flatnonzero(observed_flat)
        self.observed = np.asarray(observed_flat, dtype=np.intp)
        if self.observed.size < 2:
            raise ValueError("linear interpolation needs at least 2 observed points per slice")
        all_idx = np.arange(size, dtype=np.intp)
        self.missing = np.setdiff1d(all_idx, self.observed, assume_unique=False)
        coords = np.column_stack(
            [a.astype(np.float64) for a in np.unravel_index(all_idx, self.spatial_shape)]
        )
        obs_pts = coords[self.observed]
        miss_pts = coords[self.missing]
        if self.ndim == 1:
            self._init_1d(obs_pts[:, 0], miss_pts[:, 0])
        else:
            self._init_nd(obs_pts, miss_pts)

    def _init_1d(self, obs_x: np.ndarray, miss_x: np.ndarray) -> None:
        order = np.argsort(obs_x, kind="stable")
        xs = obs_x[order]
        inside = (miss_x >= xs[0]) & (miss_x <= xs[-1])
        hi = np.clip(np.searchsorted(xs, miss_x[inside]), 1, xs.size - 1)
        lo = hi - 1
        span = xs[hi] - xs[lo]
        w_hi = (miss_x[inside] - xs[lo]) / span
        # vertex indices into the observed array, barycentric-style weights
        self._inside = inside
        self._vertices = np.column_stack([order[lo], order[hi]])
        self._weights = np.column_stack([1.0 - w_hi, w_hi])

    def _init_nd(self, obs_pts: np.ndarray, miss_pts: np.ndarray) -> None:
        try:
            tri = Delaunay(obs_pts)
        except QhullError as exc:
            raise DegenerateGeometryError(str(exc)) from exc
        simplex = tri.find_simplex(miss_pts)
        inside = simplex >= 0
        simp = simplex[inside]
        # barycentric coordinates from the triangulation's affine transforms
        trans = tri.transform[simp]
        delta = miss_pts[inside] - trans[:, self.ndim]
        bary = np.einsum("nij,nj->ni", trans[:, : self.ndim], delta)
        self._inside = inside
        self._vertices = tri.simplices[simp]
        self._weights = np.column_stack([bary, 1.0 - bary.sum(axis=1)])

    def apply_many(self, values: np.ndarray) -> np.ndarray:
        """Fill missing entries for a stack of flattened slices (rows)."""
        vals = np.array(values, dtype=np.float64)
        if vals.ndim == 1:
            return self.apply_many(vals[np.newaxis])[0]
        if vals.shape[1] != int(np.prod(self.spatial_shape)):
            raise ValueError("slice length does not match the spatial grid")
        obs = vals[:, self.observed]
        fallback = obs.mean(axis=1)
        fill = np.repeat(fallback[:, np.newaxis], self.missing.size, axis=1)
        if self._vertices.size:
            interped = np.einsum("smv,mv->sm", obs[:, self._vertices], self._weights)
            fill[:, self._inside] = interped
        vals[:, self.missing] = fill
        return vals


def _fill_per_axis(slice_nd: np.ndarray, missing_nd: np.ndarray) -> np.ndarray:
    """Axis-by-axis 1-D interpolation fallback for degenerate observed geometry.

    Walks the axes in order, interpolating along grid lines that hold >= 2
    observed points (interior gaps only); anything still missing afterwards
    gets the mean of the observed entries.
    """
    out = slice_nd.copy()
    still = missing_nd.copy()
    observed_vals = slice_nd[~missing_nd]
    for axis in range(out.ndim):
        work = np.ascontiguousarray(np.moveaxis(out, axis, -1))
        work_missing = np.ascontiguousarray(np.moveaxis(still, axis, -1))
        n = work.shape[-1]
        pos = np.arange(n, dtype=np.float64)
        flat = work.reshape(-1, n)
        flat_missing = work_missing.reshape(-1, n)
        for row in range(flat.shape[0]):
            miss = flat_missing[row]
            obs = ~miss
            if obs.sum() < 2 or not miss.any():
                continue
            xs = pos[obs]
            inner = miss & (pos >= xs[0]) & (pos <= xs[-1])
            if inner.any():
                flat[row, inner] = np.interp(pos[inner], xs, flat[row, obs])
                flat_missing[row, inner] = False
        out = np.moveaxis(work, -1, axis).copy()
        still = np.moveaxis(work_missing, -1, axis).copy()
    if still.any():
        out[still] = observed_vals.mean()
    return out


def fill_slice_linear(slice_nd: np.ndarray, missing_nd: np.ndarray, label: str = "slice") -> np.ndarray:
    """Fill one spatial slice: barycentric interpolation inside the hull of the
    observed points, observed-mean outside; per-axis fallback on degenerate
    geometry (with a warning)."""
    slice_nd = np.asarray(slice_nd, dtype=np.float64)
    missing_nd = np.asarray(missing_nd, dtype=bool)
    if not missing_nd.any():
        return slice_nd.copy()
    n_obs = int((~missing_nd).sum())
    if n_obs == 0:
        raise ValueError(f"{label}: no observed entries to interpolate from")
    if n_obs == 1:
        # a single observation cannot anchor any interpolation stencil
        out = slice_nd.copy()
        out[missing_nd] = slice_nd[~missing_nd][0]
        return out
    try:
        pattern = LinearFillPattern(slice_nd.shape, ~missing_nd.ravel())
    except DegenerateGeometryError:
        warnings.warn(
            f"{label}: observed points are degenerate; falling back to per-axis interpolation",
            stacklevel=2,
        )
        return _fill_per_axis(slice_nd, missing_nd)
    return pattern.apply_many(slice_nd.ravel()).reshape(slice_nd.shape)
