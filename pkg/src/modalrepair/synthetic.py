"""Analytic spatio-temporal test fields with exactly known snapshot-matrix rank.

Two generators:

* standing waves -- sums of separable products
  ``A * sin(k*pi*x) * sin(l*pi*y) [* sin(q*pi*z)] * cos(w*t + phi)``;
  the noiseless snapshot matrix has rank equal to the number of modes
  (distinct wavenumber/frequency combinations).
* traveling wake -- a mean-flow offset plus Gaussian-envelope traveling
  waves ``A * exp(-((y-y0)/width)^2) * cos(k*x - w*t)``; each traveling
  mode contributes rank 2 (cos/sin quadrature pair), so the exact rank is
  ``(1 if mean_flow else 0) + 2 * n_modes``.

Optional i.i.d. Gaussian noise with standard deviation ``noise_sigma`` is
added on top, seeded and reproducible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

__all__ = [
    "WaveMode",
    "WaveSpec",
    "generate_standing_waves",
    "generate_cylinder_like",
    "generate",
    "expected_rank",
    "save_spec",
    "load_spec",
]


@dataclass(frozen=True)
class WaveMode:
    """One spatio-temporal mode: amplitude, per-axis wavenumbers, frequency, phase."""

    amplitude: float
    wavenumbers: tuple[float, ...]
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class WaveSpec:
    """Parameters for the synthetic generators.

    ``grid`` gives the spatial point counts; coordinates span ``extents``
    (default unit length per axis, endpoints included).  Snapshots are taken
    at ``t = k * dt`` for ``k = 0..n_snapshots-1``.  ``envelope_width``,
    ``envelope_center`` and ``mean_flow`` only affect the traveling-wake
    generator.
    """

    modes: tuple[WaveMode, ...]
    grid: tuple[int, ...]
    n_snapshots: int
    dt: float = 0.1
    extents: tuple[float, ...] | None = None
    noise_sigma: float = 0.0
    seed: int = 0
    envelope_width: float = 0.25
    envelope_center: float = 0.5
    mean_flow: float = 0.0

    def __post_init__(self):
        if not self.modes:
            raise ValueError("at least one mode is required")
        if len(self.grid) not in (1, 2, 3) or any(n < 2 for n in self.grid):
            raise ValueError(f"grid must have 1-3 axes of >= 2 points, got {self.grid}")
        if self.n_snapshots < 1:
            raise ValueError("n_snapshots must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        keys = [(m.wavenumbers, m.frequency) for m in self.modes]
        if len(set(keys)) != len(keys):
            raise ValueError("modes must have distinct (wavenumbers, frequency) combinations")
        for m in self.modes:
            if len(m.wavenumbers) != len(self.grid):
                raise ValueError(
                    f"mode wavenumbers {m.wavenumbers} do not match a {len(self.grid)}-D grid"
                )

    def axes(self) -> list[np.ndarray]:
        extents = self.extents or tuple(1.0 for _ in self.grid)
        if len(extents) != len(self.grid):
            raise ValueError("extents must match grid dimensionality")
        return [np.linspace(0.0, ext, n) for n, ext in zip(self.grid, extents)]

    def times(self) -> np.ndarray:
        return np.arange(self.n_snapshots) * self.dt


def _add_noise(field_: np.ndarray, spec: WaveSpec) -> np.ndarray:
    if spec.noise_sigma == 0.0:
        return field_
    rng = np.random.default_rng(spec.seed)
    return field_ + rng.normal(0.0, spec.noise_sigma, size=field_.shape)


def generate_standing_waves(spec: WaveSpec) -> np.ndarray:
    """Snapshot tensor ``(1, *grid, K)`` of superposed standing waves.

    Each mode is an exact outer product of spatial sine profiles and a
    temporal cosine, so the unfolded snapshot matrix of the noiseless field
    has rank ``len(spec.modes)``.
    """
    axes = spec.axes()
    t = spec.times()
    out = np.zeros(tuple(spec.grid) + (spec.n_snapshots,))
    for m in spec.modes:
        profile = np.ones(())
        for axis_vals, k in zip(axes, m.wavenumbers):
            profile = np.multiply.outer(profile, np.sin(k * np.pi * axis_vals))
        temporal = np.cos(m.frequency * t + m.phase)
        out += m.amplitude * np.multiply.outer(profile, temporal)
    return _add_noise(out[np.newaxis, ...], spec)


def generate_cylinder_like(spec: WaveSpec) -> np.ndarray:
    """Snapshot tensor ``(1, nx, ny, K)`` of a traveling-wave wake pattern.

    Field: ``mean_flow + sum_m A_m * exp(-((y-y0)/width)^2) * cos(k_m*x - w_m*t)``.
    Only 2-D grids are supported; the per-mode wavenumber acts along x.
    """
    if len(spec.grid) != 2:
        raise ValueError("the wake generator needs a 2-D (x, y) grid")
    x, y = spec.axes()
    t = spec.times()
    envelope = np.exp(-(((y - spec.envelope_center) / spec.envelope_width) ** 2))
    out = np.full(tuple(spec.grid) + (spec.n_snapshots,), float(spec.mean_flow))
    for m in spec.modes:
        k = m.wavenumbers[0]
        # cos(kx - wt + phi) split into a quadrature pair, each separable in
        # space and time: rank 2 per mode in the snapshot matrix.
        phase_x = np.multiply.outer(np.cos(k * x), envelope)
        quad_x = np.multiply.outer(np.sin(k * x), envelope)
        out += m.amplitude * (
            np.multiply.outer(phase_x, np.cos(m.frequency * t - m.phase))
            + np.multiply.outer(quad_x, np.sin(m.frequency * t - m.phase))
        )
    return _add_noise(out[np.newaxis, ...], spec)


_GENERATORS = {
    "standing-waves": generate_standing_waves,
    "traveling-wake": generate_cylinder_like,
}


def generate(kind: str, spec: WaveSpec) -> np.ndarray:
    """Dispatch on generator ``kind`` ('standing-waves' or 'traveling-wake')."""
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown generator kind {kind!r}; expected one of {sorted(_GENERATORS)}")
    return gen(spec)


def expected_rank(kind: str, spec: WaveSpec) -> int:
    """Exact snapshot-matrix rank of the noiseless field."""
    if kind == "standing-waves":
        return len(spec.modes)
    if kind == "traveling-wake":
        return (1 if spec.mean_flow != 0.0 else 0) + 2 * len(spec.modes)
    raise ValueError(f"unknown generator kind {kind!r}")


def save_spec(path: str | Path, kind: str, spec: WaveSpec) -> Path:
    """Serialize a generator spec (plus its kind) as JSON."""
    if kind not in _GENERATORS:
        raise ValueError(f"unknown generator kind {kind!r}")
    payload = {"kind": kind, **asdict(spec)}
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def load_spec(path: str | Path) -> tuple[str, WaveSpec]:
    """Inverse of :func:`save_spec`; raises ValueError on malformed input."""
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    try:
        kind = payload.pop("kind")
        modes = tuple(
            WaveMode(
                amplitude=float(m["amplitude"]),
                wavenumbers=tuple(float(w) for w in m["wavenumbers"]),
                frequency=float(m["frequency"]),
                phase=float(m.get("phase", 0.0)),
            )
            for m in payload.pop("modes")
        )
        extents = payload.pop("extents", None)
        spec = WaveSpec(
            modes=modes,
            grid=tuple(int(n) for n in payload.pop("grid")),
            n_snapshots=int(payload.pop("n_snapshots")),
            extents=tuple(float(e) for e in extents) if extents is not None else None,
            **payload,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed generator spec field: {exc}") from exc
    if kind not in _GENERATORS:
        raise ValueError(f"{path}: unknown generator kind {kind!r}")
    return kind, spec
