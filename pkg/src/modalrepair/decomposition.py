"""Truncated SVD and one-pass Tucker (HOSVD) factorization.

Rank selection is either a fixed count or a relative singular-value
threshold: the retained rank ``N`` is the smallest value with
``sigma[N] / sigma[0] <= threshold`` (1-indexed: sigma_{N+1}/sigma_1),
falling back to the full rank when the threshold is never met.  Singular
vectors follow a deterministic sign convention (the entry of largest
magnitude in each spatial mode is non-negative) so repeated runs produce
identical factors.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .tensors import mode_unfold

__all__ = [
    "RankRule",
    "select_rank",
    "numerical_rank",
    "TruncatedSVD",
    "svd_truncated",
    "svd_reconstruct",
    "TuckerDecomposition",
    "hosvd",
    "hosvd_reconstruct",
    "mode_product",
    "save_factorization",
    "load_factorization",
]

# Relative level below which singular values count as numerical zeros.
ZERO_SIGMA_RTOL = 1e-13


@dataclass(frozen=True)
class RankRule:
    """How many modes to retain: a fixed count or a relative threshold."""

    fixed: int | None = None
    threshold: float | None = None

    def __post_init__(self):
        if (self.fixed is None) == (self.threshold is None):
            raise ValueError("specify exactly one of fixed rank or threshold")
        if self.fixed is not None and self.fixed < 1:
            raise ValueError(f"fixed rank must be >= 1, got {self.fixed}")
        if self.threshold is not None and not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")

    @classmethod
    def fixed_rank(cls, n: int) -> "RankRule":
        return cls(fixed=n)

    @classmethod
    def relative(cls, eps: float) -> "RankRule":
        return cls(threshold=eps)


def select_rank(sigma: np.ndarray, rule: RankRule, warn_on_clamp: bool = True) -> int:
    """Number of singular values retained under ``rule`` (always >= 1)."""
    s = np.asarray(sigma, dtype=np.float64)
    n_max = s.size
    if n_max == 0:
        raise ValueError("empty singular value list")
    if rule.fixed is not None:
        n = rule.fixed
        if n > n_max:
            if warn_on_clamp:
                warnings.warn(f"requested rank {n} exceeds available {n_max}; clamping", stacklevel=2)
            n = n_max
        return max(1, n)
    if s[0] <= 0.0:
        return 1
    for n in range(1, n_max):
        if s[n] / s[0] <= rule.threshold:
            return n
    return n_max


def numerical_rank(sigma: np.ndarray, rtol: float = ZERO_SIGMA_RTOL) -> int:
    """Count of singular values above ``rtol * sigma[0]``."""
    s = np.asarray(sigma, dtype=np.float64)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def _check_finite(arr: np.ndarray) -> None:
    if not np.isfinite(arr).all():
        raise ValueError("input contains non-finite entries; fill gaps before factorizing")


def _fix_signs(w: np.ndarray, *coupled: np.ndarray) -> None:
    """Flip columns of ``w`` (and matching columns of ``coupled``) in place so the
    largest-magnitude entry of each column is non-negative."""
    if w.shape[1] == 0:
        return
    lead = w[np.abs(w).argmax(axis=0), np.arange(w.shape[1])]
    flip = np.where(lead < 0.0, -1.0, 1.0)
    w *= flip
    for other in coupled:
        other *= flip


@dataclass(frozen=True)
class TruncatedSVD:
    """Rank-``N`` factorization ``W @ diag(sigma) @ T.T`` of a snapshot matrix.

    ``W`` holds the spatial modes (``J x N``, orthonormal columns), ``sigma``
    the retained singular values (non-increasing) and ``T`` the temporal
    coefficients (``K x N``, orthonormal columns).
    """

    W: np.ndarray
    sigma: np.ndarray
    T: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.sigma.size)


def svd_truncated(matrix: np.ndarray, rule: RankRule) -> TruncatedSVD:
    """Best rank-``N`` approximation of a snapshot matrix, ``N`` chosen by ``rule``.

    Ties in the (non-increasing) singular values keep the earlier index.
    Raises on NaN input: gaps must be filled before factorizing.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got order {m.ndim}")
    _check_finite(m)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    n = select_rank(s, rule)
    w = u[:, :n].copy()
    t = vh[:n].T.copy()
    _fix_signs(w, t)
    return TruncatedSVD(W=w, sigma=s[:n].copy(), T=t)


def svd_reconstruct(f: TruncatedSVD) -> np.ndarray:
    """Snapshot matrix ``W @ diag(sigma) @ T.T`` from a truncated factorization."""
    return (f.W * f.sigma) @ f.T.T


@dataclass(frozen=True)
class TuckerDecomposition:
    """Tucker form: a core tensor plus one orthonormal factor matrix per mode.

    ``factors[l]`` has shape ``(J_l, P_l)``; the last factor carries the
    temporal modes.  ``sigmas[l]`` keeps the full (untruncated) singular value
    list of each mode unfolding for diagnostics.
    """

    core: np.ndarray
    factors: tuple[np.ndarray, ...]
    sigmas: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(f.shape[1] for f in self.factors)


def mode_product(tensor: np.ndarray, matrix: np.ndarray, mode: int) -> np.ndarray:
    """Contract ``matrix`` (``P x J_mode``) with the 1-based ``mode`` axis of ``tensor``."""
    t = np.asarray(tensor, dtype=np.float64)
    m = np.asarray(matrix, dtype=np.float64)
    if not 1 <= mode <= t.ndim:
        raise ValueError(f"mode {mode} out of range for an order-{t.ndim} tensor")
    if m.ndim != 2 or m.shape[1] != t.shape[mode - 1]:
        raise ValueError(f"matrix shape {m.shape} does not contract axis of length {t.shape[mode - 1]}")
    out = np.tensordot(m, t, axes=(1, mode - 1))
    return np.moveaxis(out, 0, mode - 1)


def _broadcast_rules(rules: RankRule | Sequence[RankRule], order: int) -> tuple[list[RankRule], bool]:
    """Returns per-mode rules plus whether they were given explicitly (a single
    rule broadcast to all modes clamps silently on short axes)."""
    if isinstance(rules, RankRule):
        return [rules] * order, False
    rules = list(rules)
    if len(rules) != order:
        raise ValueError(f"need one rank rule per mode ({order}), got {len(rules)}")
    return rules, True


def hosvd(tensor: np.ndarray, rules: RankRule | Sequence[RankRule]) -> TuckerDecomposition:
    """One-pass Tucker factorization by SVD of every mode unfolding.

    Factor ``l`` collects the leading left singular vectors of the mode-``l``
    unfolding, truncated per ``rules``; the core is the tensor contracted with
    every factor transpose.  No iterative refinement, so the result is
    deterministic.
    """
    t = np.asarray(tensor, dtype=np.float64)
    if t.ndim < 2:
        raise ValueError(f"expected a tensor of order >= 2, got order {t.ndim}")
    _check_finite(t)
    per_mode, explicit = _broadcast_rules(rules, t.ndim)
    factors: list[np.ndarray] = []
    sigmas: list[np.ndarray] = []
    for mode in range(1, t.ndim + 1):
        unf = mode_unfold(t, mode)
        u, s, _ = np.linalg.svd(unf, full_matrices=False)
        p = select_rank(s, per_mode[mode - 1], warn_on_clamp=explicit)
        w = u[:, :p].copy()
        _fix_signs(w)
        factors.append(w)
        sigmas.append(s)
    core = t
    for mode, w in enumerate(factors, start=1):
        core = mode_product(core, w.T, mode)
    return TuckerDecomposition(core=core, factors=tuple(factors), sigmas=tuple(sigmas))


def hosvd_reconstruct(dec: TuckerDecomposition) -> np.ndarray:
    """Expand a Tucker decomposition back to a full tensor."""
    t = dec.core
    for mode, w in enumerate(dec.factors, start=1):
        t = mode_product(t, w, mode)
    return t


def save_factorization(prefix: str | Path, f: "TruncatedSVD | TuckerDecomposition") -> Path:
    """Serialize a factorization: one MFT file per factor (and core) plus a
    JSON manifest carrying kind, ranks and the singular value lists.

    Returns the manifest path ``<prefix>.json``.
    """
    import json

    from .mft import write_mft

    prefix = Path(prefix)
    manifest: dict = {}
    if isinstance(f, TruncatedSVD):
        write_mft(prefix.with_name(prefix.name + "_spatial.mft"), f.W)
        write_mft(prefix.with_name(prefix.name + "_temporal.mft"), f.T)
        manifest = {
            "kind": "svd",
            "rank": f.rank,
            "sigma": [float(s) for s in f.sigma],
            "files": {"spatial": prefix.name + "_spatial.mft", "temporal": prefix.name + "_temporal.mft"},
        }
    elif isinstance(f, TuckerDecomposition):
        files = {}
        for mode, w in enumerate(f.factors, start=1):
            name = f"{prefix.name}_factor{mode}.mft"
            write_mft(prefix.with_name(name), w)
            files[f"factor{mode}"] = name
        core_name = prefix.name + "_core.mft"
        write_mft(prefix.with_name(core_name), f.core)
        files["core"] = core_name
        manifest = {
            "kind": "tucker",
            "ranks": list(f.ranks),
            "sigmas": [[float(s) for s in sig] for sig in f.sigmas],
            "files": files,
        }
    else:
        raise TypeError(f"cannot serialize {type(f).__name__}")
    manifest_path = prefix.with_name(prefix.name + ".json")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest_path


def load_factorization(manifest_path: str | Path) -> "TruncatedSVD | TuckerDecomposition":
    """Inverse of :func:`save_factorization`."""
    import json

    from .mft import read_mft

    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    base = manifest_path.parent
    files = manifest["files"]
    if manifest["kind"] == "svd":
        return TruncatedSVD(
            W=read_mft(base / files["spatial"]),
            sigma=np.asarray(manifest["sigma"], dtype=np.float64),
            T=read_mft(base / files["temporal"]),
        )
    if manifest["kind"] == "tucker":
        n_modes = len(manifest["ranks"])
        factors = tuple(read_mft(base / files[f"factor{mode}"]) for mode in range(1, n_modes + 1))
        sigmas = tuple(np.asarray(sig, dtype=np.float64) for sig in manifest["sigmas"])
        return TuckerDecomposition(core=read_mft(base / files["core"]), factors=factors, sigmas=sigmas)
    raise ValueError(f"{manifest_path}: unknown factorization kind {manifest['kind']!r}")
