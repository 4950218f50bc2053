"""Marginal distributions of the extreme eigenvalues of a complex Wishart
matrix.

The CDF of the largest eigenvalue and the CCDF of the smallest are exact
determinant ratios whose entries are regularized incomplete gamma values.
Rows are rescaled by log-gamma factors so the determinants stay inside
float range across the supported antenna envelope.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .errors import CapabilityError, DomainError, PrecisionWarning

# validated problem-size envelope
_S_CAP = 8
_T_CAP = 32

# raw determinant ratios may exceed [0,1] by rounding; warn past this excess
_CLAMP_TOL = 1e-8


@dataclass(frozen=True)
class ChannelDims:
    """Antenna counts of the channel matrix; s and t are the min and max."""

    n_t: int
    n_r: int

    def __post_init__(self):
        for name in ("n_t", "n_r"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def s(self) -> int:
        return min(self.n_t, self.n_r)

    @property
    def t(self) -> int:
        return max(self.n_t, self.n_r)


@dataclass(frozen=True)
class WishartEnsemble:
    """Channel dimensions plus the per-entry complex variance sigma_sq."""

    dims: ChannelDims
    sigma_sq: float = 1.0

    def __post_init__(self):
        v = float(self.sigma_sq)
        if not math.isfinite(v) or v <= 0:
            raise DomainError(f"sigma_sq must be finite and > 0, got {self.sigma_sq!r}")
        object.__setattr__(self, "sigma_sq", v)


@dataclass(frozen=True)
class SignedLogDet:
    """Determinant split into sign (-1, 0, +1) and log of the magnitude."""

    sign: int
    log_magnitude: float


def _lu_diag(matrix: np.ndarray):
    """LU factorization diagnostics: (U diagonal, permutation sign)."""
    with warnings.catch_warnings():
        # exact singularity is a legal input here, reported as sign 0
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(matrix, check_finite=False)
    d = np.diag(lu)
    perm_sign = 1
    for i, p in enumerate(piv):
        if p != i:
            perm_sign = -perm_sign
    return d, perm_sign


def signed_log_det(matrix) -> SignedLogDet:
    """Sign and log-magnitude of det(matrix) via LU with partial pivoting."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DomainError(f"matrix must be square and 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix entries must be finite")
    if arr.shape[0] == 1:
        v = arr[0, 0]
        if v == 0.0:
            return SignedLogDet(0, -math.inf)
        return SignedLogDet(1 if v > 0 else -1, math.log(abs(v)))
    d, perm_sign = _lu_diag(arr)
    if np.any(d == 0.0):
        return SignedLogDet(0, -math.inf)
    sign = perm_sign * int(np.prod(np.sign(d)))
    return SignedLogDet(sign, float(np.sum(np.log(np.abs(d)))))


def _check_envelope(dims: ChannelDims):
    if dims.s > _S_CAP or dims.t > _T_CAP:
        raise CapabilityError(
            f"supported envelope is min dim <= {_S_CAP}, max dim <= {_T_CAP}; "
            f"got s={dims.s}, t={dims.t}"
        )


def _clamp_unit(value: float, label: str) -> float:
    if value < 0.0 or value > 1.0:
        if value < -_CLAMP_TOL or value > 1.0 + _CLAMP_TOL:
            warnings.warn(
                f"{label} = {value!r} clamped to [0, 1] beyond tolerance",
                PrecisionWarning,
            )
        value = min(max(value, 0.0), 1.0)
    return value


def _extreme_eig_cdf(s: int, t: int, x: float, upper_tail: bool) -> float:
    """Determinant-ratio distribution value at x = lam / sigma_sq.

    upper_tail=False gives the CDF of the largest eigenvalue,
    upper_tail=True the CCDF of the smallest.
    """
    reg = special.gammaincc if upper_tail else special.gammainc
    num = np.empty((s, s))
    den = np.empty((s, s))
    for i in range(1, s + 1):
        r = t - s + 2 * i - 1
        lgr = math.lgamma(r)
        for j in range(1, s + 1):
            n = t - s + i + j - 1
            scale = math.exp(math.lgamma(n) - lgr)
            num[i - 1, j - 1] = float(reg(n, x)) * scale
            den[i - 1, j - 1] = scale
    dn = signed_log_det(num)
    dd = signed_log_det(den)
    if dn.sign == 0:
        return 0.0
    return dn.sign * dd.sign * math.exp(dn.log_magnitude - dd.log_magnitude)


def cdf_largest(ensemble: WishartEnsemble, lam: float) -> float:
    """CDF of the largest eigenvalue, P(lambda_max <= lam)."""
    _check_envelope(ensemble.dims)
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0:
        raise DomainError(f"lam must be finite and >= 0, got {lam!r}")
    if lam == 0.0:
        return 0.0
    s, t = ensemble.dims.s, ensemble.dims.t
    raw = _extreme_eig_cdf(s, t, lam / ensemble.sigma_sq, upper_tail=False)
    return _clamp_unit(raw, "cdf_largest")


def ccdf_smallest(ensemble: WishartEnsemble, lam: float) -> float:
    """CCDF of the smallest eigenvalue, P(lambda_min > lam)."""
    _check_envelope(ensemble.dims)
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0:
        raise DomainError(f"lam must be finite and >= 0, got {lam!r}")
    if lam == 0.0:
        return 1.0
    s, t = ensemble.dims.s, ensemble.dims.t
    raw = _extreme_eig_cdf(s, t, lam / ensemble.sigma_sq, upper_tail=True)
    return _clamp_unit(raw, "ccdf_smallest")
