"""Reconstruction-error analysis: global RRMSE, per-component error fields,
max-normalized errors, worst-snapshot lookup and error probability densities.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "rrmse",
    "component_errors",
    "normalize_errors",
    "error_pdf",
    "worst_snapshot",
    "ReconstructionReport",
    "build_report",
    "write_error_map_pgm",
]


def rrmse(original: np.ndarray, approx: np.ndarray) -> float:
    """Relative root mean square error: ||original - approx||_F / ||original||_F.

    Summing squared snapshot norms over time is the same as the global
    Frobenius norm, so any matching shapes are accepted.  Reported as a
    fraction; multiply by 100 for the usual percent form.
    """
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(approx, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    denom = np.linalg.norm(a.ravel())
    if denom == 0.0:
        raise ZeroDivisionError("reference data is identically zero; relative error undefined")
    return float(np.linalg.norm((a - b).ravel()) / denom)


def component_errors(original: np.ndarray, recon: np.ndarray) -> list[np.ndarray]:
    """Signed reconstruction error per physical component.

    For an order-``d`` snapshot tensor the result is one order-``d-1`` array
    (spatial axes + time) per component; a plain matrix counts as a single
    component.
    """
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(recon, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    if diff.ndim == 2:
        return [diff]
    return [diff[c] for c in range(diff.shape[0])]


def normalize_errors(errors: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Scale each component error by its own max |error| (zero fields stay zero)."""
    out = []
    for err in errors:
        err = np.asarray(err, dtype=np.float64)
        peak = np.abs(err).max() if err.size else 0.0
        out.append(err / peak if peak > 0.0 else np.zeros_like(err))
    return out


def error_pdf(errors: np.ndarray, bins: int = 101, smooth: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Probability density of the error values over ``[min, max]``.

    Histogram-based (deterministic); the densities integrate to 1 over the
    uniform bins.  ``smooth=True`` applies Gaussian kernel smoothing with
    Silverman's bandwidth across bins and renormalizes.  A constant error
    field yields all mass in the single bin containing the value.
    """
    vals = np.asarray(errors, dtype=np.float64).ravel()
    if vals.size < 2:
        raise ValueError("need at least 2 samples for a density estimate")
    if bins < 2:
        raise ValueError("need at least 2 bins")
    lo, hi = float(vals.min()), float(vals.max())
    if (hi - lo) <= 1e-12 * max(abs(lo), abs(hi), 1.0):
        # (near-)constant field: unit-width support, all mass in the bin
        # holding the value (edges nudged so the value sits inside a bin)
        mid = 0.5 * (lo + hi)
        edges = np.linspace(mid - 0.5, mid + 0.5, bins + 1)
        if bins % 2 == 0:
            edges += 0.25 / bins
        densities, edges = np.histogram(vals, bins=edges, density=True)
    else:
        densities, edges = np.histogram(vals, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    if smooth:
        std = vals.std()
        if std > 0.0:
            bandwidth = 1.06 * std * vals.size ** (-1 / 5)
            width = edges[1] - edges[0]
            radius = max(1, int(np.ceil(3 * bandwidth / width)))
            x = np.arange(-radius, radius + 1) * width
            kernel = np.exp(-0.5 * (x / bandwidth) ** 2)
            kernel /= kernel.sum()
            densities = np.convolve(densities, kernel, mode="same")
            total = densities.sum() * width
            if total > 0.0:
                densities = densities / total
    return centers, densities


def worst_snapshot(errors: Sequence[np.ndarray]) -> list[tuple[int, int | None]]:
    """Per component: snapshot index with the largest |error|, ties to the lowest.

    For 3-D spatial data the second element is the worst plane (last spatial
    axis) inside that snapshot; otherwise it is None.
    """
    out: list[tuple[int, int | None]] = []
    for err in errors:
        err = np.abs(np.asarray(err, dtype=np.float64))
        if err.ndim < 2:
            raise ValueError("component errors must keep spatial and time axes")
        per_snap = err.reshape(-1, err.shape[-1]).max(axis=0)
        k = int(np.argmax(per_snap))
        plane: int | None = None
        if err.ndim == 4:  # (x, y, z, time): pick the worst z-plane of snapshot k
            plane = int(np.argmax(err[..., k].max(axis=(0, 1))))
        out.append((k, plane))
    return out


@dataclass(frozen=True)
class ReconstructionReport:
    """Bundle of reconstruction-quality diagnostics for one original/recon pair."""

    rrmse: float
    per_component_error: list[np.ndarray]
    normalized_error: list[np.ndarray]
    worst: list[tuple[int, int | None]]
    pdf: list[tuple[np.ndarray, np.ndarray]]
    trace: tuple[float, ...] = ()

    def summary_dict(self) -> dict:
        """JSON-ready scalar summary (field arrays are exported separately)."""
        return {
            "rrmse": self.rrmse,
            "rrmse_percent": 100.0 * self.rrmse,
            "worst_snapshot": [
                {"component": c, "snapshot": k, "plane": plane}
                for c, (k, plane) in enumerate(self.worst)
            ],
            "pdf": [
                {
                    "component": c,
                    "bin_centers": [float(x) for x in centers],
                    "densities": [float(y) for y in dens],
                }
                for c, (centers, dens) in enumerate(self.pdf)
            ],
            "iterations": len(self.trace),
            "trace": [float(t) for t in self.trace],
        }


def build_report(
    original: np.ndarray,
    recon: np.ndarray,
    bins: int = 101,
    smooth: bool = False,
    per_snapshot_pdf: bool = False,
    trace: Sequence[float] = (),
) -> ReconstructionReport:
    """Assemble the full error report for a reconstruction.

    PDFs aggregate over all entries of a component by default;
    ``per_snapshot_pdf=True`` instead estimates the density of the worst
    snapshot only.
    """
    errors = component_errors(original, recon)
    worst = worst_snapshot(errors)
    pdfs = []
    for err, (k, _) in zip(errors, worst):
        sample = err[..., k] if per_snapshot_pdf else err
        pdfs.append(error_pdf(sample, bins=bins, smooth=smooth))
    return ReconstructionReport(
        rrmse=rrmse(original, recon),
        per_component_error=errors,
        normalized_error=normalize_errors(errors),
        worst=worst,
        pdf=pdfs,
        trace=tuple(float(t) for t in trace),
    )


def write_error_map_pgm(path: str | Path, plane: np.ndarray) -> Path:
    """Write a 2-D |error| slice as a 16-bit binary PGM (P5) grayscale image.

    The linear gray mapping is stated in the header comment:
    ``value = vmin + gray * (vmax - vmin) / 65535``.
    """
    img = np.abs(np.asarray(plane, dtype=np.float64))
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D plane, got shape {img.shape}")
    vmin = float(img.min())
    vmax = float(img.max())
    span = vmax - vmin
    if span > 0.0:
        gray = np.round((img - vmin) / span * 65535.0).astype(">u2")
    else:
        gray = np.zeros(img.shape, dtype=">u2")
    header = (
        f"P5\n# linear map: value = {vmin!r} + gray * ({vmax!r} - {vmin!r}) / 65535\n"
        f"{img.shape[1]} {img.shape[0]}\n65535\n"
    )
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(gray.tobytes())
    return path
