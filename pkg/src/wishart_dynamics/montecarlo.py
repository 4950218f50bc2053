"""Stochastic oracle for the closed forms: correlated channel-pair sampling.

Draws pairs (H1, H2) with H2 = rho*H1 + sqrt(1-rho^2)*Xi, builds the two
Wishart matrices, and extracts extreme eigenvalues.  The generator is
counter-based (Philox) with a fixed per-pair consumption budget, so any
contiguous block of streams reproduces bit-identically whether sampled in
bulk or one stream at a time.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.random import Generator, Philox

from .eigendist import WishartEnsemble
from .errors import DomainError

_CHUNK_BYTES = 1 << 25


@dataclass(frozen=True)
class McConfig:
    """Sampling run configuration."""

    seed: int
    n_samples: int
    ensemble: WishartEnsemble
    rho_sq: float

    def __post_init__(self):
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise DomainError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 1 << 64:
            raise DomainError(f"seed must fit in 64 bits, got {self.seed}")
        if not isinstance(self.n_samples, int) or self.n_samples < 1:
            raise DomainError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if not 0.0 <= self.rho_sq <= 1.0:
            raise DomainError(f"rho_sq must be in [0, 1], got {self.rho_sq}")


@dataclass(frozen=True)
class EigenPairSample:
    """Extreme eigenvalues of one correlated Wishart pair."""

    lam_max: float
    lam_min: float
    phi_max: float
    phi_min: float

    def __post_init__(self):
        if not (self.lam_max >= self.lam_min >= 0.0):
            raise DomainError(
                f"need lam_max >= lam_min >= 0, got ({self.lam_max}, {self.lam_min})"
            )
        if not (self.phi_max >= self.phi_min >= 0.0):
            raise DomainError(
                f"need phi_max >= phi_min >= 0, got ({self.phi_max}, {self.phi_min})"
            )


class EigenPairBatch(NamedTuple):
    """Columnar batch of sampled extreme-eigenvalue pairs."""

    lam_max: np.ndarray
    lam_min: np.ndarray
    phi_max: np.ndarray
    phi_min: np.ndarray

    def pairs_largest(self) -> np.ndarray:
        """(n, 2) array of (largest of W1, largest of W2)."""
        return np.column_stack((self.lam_max, self.phi_max))

    def pairs_smallest(self) -> np.ndarray:
        """(n, 2) array of (smallest of W1, smallest of W2)."""
        return np.column_stack((self.lam_min, self.phi_min))


def _sample_block(cfg: McConfig, stream_start: int, count: int) -> EigenPairBatch:
    n_r = cfg.ensemble.dims.n_r
    n_t = cfg.ensemble.dims.n_t
    nrt = n_r * n_t
    # one pair consumes 4*nrt uniforms = one uniform per 64-bit word = nrt
    # Philox blocks, so stream k starts exactly at counter k*nrt
    bitgen = Philox(key=cfg.seed, counter=[stream_start * nrt, 0, 0, 0])
    rng = Generator(bitgen)
    uni = rng.random((count, 2 * nrt, 2))
    r = np.sqrt(-2.0 * np.log1p(-uni[:, :, 0]))
    ang = (2.0 * math.pi) * uni[:, :, 1]
    normals = np.empty((count, 2 * nrt, 2))
    normals[:, :, 0] = r * np.cos(ang)
    normals[:, :, 1] = r * np.sin(ang)
    normals = normals.reshape(count, 2, n_r, n_t, 2)
    scale = math.sqrt(cfg.ensemble.sigma_sq / 2.0)
    h1 = scale * (normals[:, 0, :, :, 0] + 1j * normals[:, 0, :, :, 1])
    xi = scale * (normals[:, 1, :, :, 0] + 1j * normals[:, 1, :, :, 1])
    rho = math.sqrt(cfg.rho_sq)
    h2 = rho * h1 + math.sqrt(1.0 - cfg.rho_sq) * xi

    def extremes(h):
        if n_r <= n_t:
            w = h @ h.conj().transpose(0, 2, 1)
        else:
            w = h.conj().transpose(0, 2, 1) @ h
        w = 0.5 * (w + w.conj().transpose(0, 2, 1))
        ev = np.linalg.eigvalsh(w)
        ev = np.maximum(ev, 0.0)
        return ev[:, -1], ev[:, 0]

    lam_max, lam_min = extremes(h1)
    phi_max, phi_min = extremes(h2)
    return EigenPairBatch(lam_max, lam_min, phi_max, phi_min)


def sample_pairs(cfg: McConfig, stream_start: int = 0,
                 count: Optional[int] = None) -> EigenPairBatch:
    """Sample ``count`` consecutive streams starting at ``stream_start``.

    Deterministic in (seed, stream index) per pair; chunked to bound memory.
    """
    if not isinstance(stream_start, int) or stream_start < 0:
        raise DomainError(f"stream_start must be a non-negative integer, got {stream_start!r}")
    if count is None:
        count = cfg.n_samples
    if not isinstance(count, int) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    per_pair = 32 * cfg.ensemble.dims.n_r * cfg.ensemble.dims.n_t
    chunk = min(65536, max(256, _CHUNK_BYTES // per_pair))
    parts = []
    done = 0
    while done < count:
        take = min(chunk, count - done)
        parts.append(_sample_block(cfg, stream_start + done, take))
        done += take
    if len(parts) == 1:
        return parts[0]
    return EigenPairBatch(*(np.concatenate(cols) for cols in zip(*parts)))


def sample_pair(cfg: McConfig, stream_index: int) -> EigenPairSample:
    """One correlated extreme-eigenvalue pair, deterministic in (seed, stream)."""
    batch = sample_pairs(cfg, stream_start=stream_index, count=1)
    return EigenPairSample(
        lam_max=float(batch.lam_max[0]),
        lam_min=float(batch.lam_min[0]),
        phi_max=float(batch.phi_max[0]),
        phi_min=float(batch.phi_min[0]),
    )


def hermitian_eigenvalues(matrix) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending.

    The input must be Hermitian to 1e-10 relative to its largest entry.
    """
    w = np.asarray(matrix, dtype=complex)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DomainError(f"matrix must be square, got shape {w.shape}")
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    dev = float(np.max(np.abs(w - w.conj().T))) if w.size else 0.0
    if dev > 1e-10 * max(scale, 1e-300):
        raise DomainError(
            f"matrix is not Hermitian: max asymmetry {dev:.3e} vs scale {scale:.3e}"
        )
    ev = np.linalg.eigvalsh(w)
    return ev[::-1].copy()


def _as_sample_array(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError(f"samples must have shape (n, 2), got {arr.shape}")
    return arr


def empirical_joint_cdf(samples: Sequence, point: Tuple[float, float]) -> Tuple[float, float]:
    """Empirical Pr{x <= lam, y <= phi} with its binomial standard error."""
    arr = _as_sample_array(samples)
    n = arr.shape[0]
    if n < 1:
        raise DomainError("need at least one sample")
    lam, phi = float(point[0]), float(point[1])
    p = float(np.mean((arr[:, 0] <= lam) & (arr[:, 1] <= phi)))
    return p, math.sqrt(p * (1.0 - p) / n)


def empirical_joint_ccdf(samples: Sequence, point: Tuple[float, float]) -> Tuple[float, float]:
    """Empirical Pr{x > lam, y > phi} with its binomial standard error."""
    arr = _as_sample_array(samples)
    n = arr.shape[0]
    if n < 1:
        raise DomainError("need at least one sample")
    lam, phi = float(point[0]), float(point[1])
    p = float(np.mean((arr[:, 0] > lam) & (arr[:, 1] > phi)))
    return p, math.sqrt(p * (1.0 - p) / n)


def estimate_corrcoef(samples: Sequence) -> float:
    """Sample Pearson correlation of the paired values."""
    arr = _as_sample_array(samples)
    if arr.shape[0] < 2:
        raise DomainError("need at least two samples for a correlation estimate")
    x = arr[:, 0] - arr[:, 0].mean()
    y = arr[:, 1] - arr[:, 1].mean()
    vx = float(x @ x)
    vy = float(y @ y)
    if vx == 0.0 or vy == 0.0:
        raise DomainError("zero variance: correlation undefined")
    r = float(x @ y) / math.sqrt(vx * vy)
    return min(1.0, max(-1.0, r))


def estimate_mean_extremes(ensemble: WishartEnsemble, seed: int,
                           n_samples: int = 100_000) -> Tuple[float, float]:
    """Seeded Monte Carlo means of the largest and smallest eigenvalues."""
    cfg = McConfig(seed=seed, n_samples=n_samples, ensemble=ensemble, rho_sq=0.0)
    batch = sample_pairs(cfg)
    return float(batch.lam_max.mean()), float(batch.lam_min.mean())
