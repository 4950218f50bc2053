"""Channel-dynamics metrics built on the joint extreme-eigenvalue CDFs.

Covers the double-outage probability of one eigenchannel observed at two
correlated instants, the normalized mutual information of the two binary
outage indicators, sampled level-crossing rate and average fade duration
across OFDM subcarriers, the two correlation profiles that map physical
channel parameters to rho^2, and outage-threshold inversion.

Thresholds are in eigenvalue units throughout (the SNR proportionality
constant is fixed to one); dB conversion happens at the CLI layer only.
"""

import math
from dataclasses import dataclass
from typing import Optional

from scipy import optimize

from .bivariate import CorrelationState, JointPoint, joint_cdf_largest, joint_cdf_smallest
from .eigendist import WishartEnsemble, ccdf_smallest, cdf_largest
from .errors import AfdUndefinedError, DomainError, NumericalConsistencyError
from .specfun import bessel_j0

_CELL_TOL = 1e-12
_SUM_TOL = 1e-9

WHICH_LARGEST = "largest"
WHICH_SMALLEST = "smallest"


def _check_which(which: str) -> str:
    if which not in (WHICH_LARGEST, WHICH_SMALLEST):
        raise DomainError(f"which must be 'largest' or 'smallest', got {which!r}")
    return which


def marginal_outage(which: str, ensemble: WishartEnsemble, gamma_th: float) -> float:
    """Pr{selected extreme eigenvalue <= gamma_th}."""
    _check_which(which)
    if gamma_th < 0:
        raise DomainError(f"gamma_th must be >= 0, got {gamma_th}")
    if which == WHICH_LARGEST:
        return cdf_largest(ensemble, gamma_th)
    return 1.0 - ccdf_smallest(ensemble, gamma_th)


def _joint_outage(which: str, ensemble: WishartEnsemble, rho_sq: float,
                  lam: float, phi: float) -> float:
    corr = CorrelationState(rho_sq=rho_sq, sigma_sq=ensemble.sigma_sq)
    point = JointPoint(lam=lam, phi=phi)
    if which == WHICH_LARGEST:
        return joint_cdf_largest(ensemble, corr, point)
    return joint_cdf_smallest(ensemble, corr, point)


@dataclass(frozen=True)
class ProbTable2x2:
    """Joint law of the two binary outage indicators (1 = outage).

    ``structure`` records what the producer knows analytically about the law:
    ``"independent"`` (exact product law) or ``"identical"`` (both indicators
    equal almost surely).  The cells themselves are rounded, so downstream
    consumers use the tag where the exact limit matters.
    """

    p11: float
    p10: float
    p01: float
    p00: float
    structure: Optional[str] = None

    def __post_init__(self):
        for name in ("p11", "p10", "p01", "p00"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must be in [0, 1], got {v}")
        total = self.p11 + self.p10 + self.p01 + self.p00
        if abs(total - 1.0) > _SUM_TOL:
            raise NumericalConsistencyError(f"cells sum to {total}, expected 1")
        if abs(self.p10 - self.p01) > _CELL_TOL:
            raise NumericalConsistencyError(
                f"stationarity requires p10 == p01, got {self.p10} vs {self.p01}"
            )
        if self.structure not in (None, "independent", "identical"):
            raise DomainError(f"unknown table structure {self.structure!r}")

    @property
    def p_first(self) -> float:
        """Marginal outage probability of the first observation."""
        return self.p11 + self.p10

    @property
    def p_second(self) -> float:
        """Marginal outage probability of the second observation."""
        return self.p11 + self.p01


@dataclass(frozen=True)
class CorrelationProfile:
    """Physical correlation model mapping channel parameters to rho^2.

    ``clarke``: temporal correlation under isotropic scattering with maximum
    Doppler shift ``f_d`` and lag ``tau``.  ``ofdm_exponential``: frequency
    correlation between subcarriers ``k_sep`` apart at spacing ``delta_f``
    under an exponential multipath profile with rms delay spread ``tau``.
    """

    kind: str
    tau: float
    f_d: Optional[float] = None
    delta_f: Optional[float] = None
    k_sep: int = 1

    def __post_init__(self):
        if self.kind not in ("clarke", "ofdm_exponential"):
            raise DomainError(f"kind must be 'clarke' or 'ofdm_exponential', got {self.kind!r}")
        if self.tau < 0:
            raise DomainError(f"tau must be >= 0, got {self.tau}")
        if self.kind == "clarke":
            if self.f_d is None or self.f_d < 0:
                raise DomainError("clarke profile needs f_d >= 0")
        else:
            if self.delta_f is None or self.delta_f <= 0:
                raise DomainError("ofdm_exponential profile needs delta_f > 0")
            if not isinstance(self.k_sep, int):
                raise DomainError(f"k_sep must be an integer, got {self.k_sep!r}")

    @property
    def rho_sq(self) -> float:
        if self.kind == "clarke":
            return clarke_rho_sq(self.f_d, self.tau)
        return ofdm_rho_sq(self.tau, self.delta_f, self.k_sep)


@dataclass(frozen=True)
class LevelCrossingResult:
    """Sampled level-crossing rate (per Hz) and average fade duration (Hz)."""

    lcr: float
    afd: float


def clarke_rho_sq(f_d: float, tau: float) -> float:
    """rho^2 = J0(2 pi f_d tau)^2 for isotropic scattering."""
    if f_d < 0 or tau < 0:
        raise DomainError(f"f_d and tau must be >= 0, got {f_d}, {tau}")
    r = bessel_j0(2.0 * math.pi * f_d * tau)
    return r * r


def ofdm_rho_sq(tau: float, delta_f: float, k_sep: int) -> float:
    """rho^2 = 1 / (1 + (2 pi tau delta_f k)^2) for an exponential profile."""
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if delta_f <= 0:
        raise DomainError(f"delta_f must be > 0, got {delta_f}")
    if not isinstance(k_sep, int) or isinstance(k_sep, bool):
        raise DomainError(f"k_sep must be an integer, got {k_sep!r}")
    x = 2.0 * math.pi * tau * delta_f * abs(k_sep)
    return 1.0 / (1.0 + x * x)


def double_outage(which: str, ensemble: WishartEnsemble, rho_sq: float,
                  gamma_th: float) -> float:
    """Probability that the eigenchannel is in outage at both observations."""
    _check_which(which)
    if gamma_th < 0:
        raise DomainError(f"gamma_th must be >= 0, got {gamma_th}")
    return _joint_outage(which, ensemble, rho_sq, gamma_th, gamma_th)


def outage_table(which: str, ensemble: WishartEnsemble, rho_sq: float,
                 gamma_th: float) -> ProbTable2x2:
    """Full 2x2 law of the outage indicators at the two observations."""
    p1 = marginal_outage(which, ensemble, gamma_th)
    p11 = double_outage(which, ensemble, rho_sq, gamma_th)
    off = p1 - p11
    p00 = 1.0 - 2.0 * p1 + p11

    def clamp(v, name):
        if v < -_CELL_TOL:
            raise NumericalConsistencyError(
                f"{name} = {v} is negative beyond the {-_CELL_TOL} tolerance"
            )
        return max(v, 0.0)

    if rho_sq == 0.0:
        structure = "independent"
    elif rho_sq == 1.0:
        structure = "identical"
    else:
        structure = None
    return ProbTable2x2(p11=clamp(p11, "p11"), p10=clamp(off, "p10"),
                        p01=clamp(off, "p01"), p00=clamp(p00, "p00"),
                        structure=structure)


def _entropy_bits(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def normalized_mi(table: ProbTable2x2) -> float:
    """Mutual information of the outage indicators over the geometric mean
    of their entropies; 1 at full correlation, 0 under independence."""
    px = table.p_first
    py = table.p_second
    if px <= 0.0 or px >= 1.0 or py <= 0.0 or py >= 1.0:
        raise DomainError(
            f"degenerate marginal (px={px}, py={py}): entropy is zero, ratio undefined"
        )
    # rounded cells cannot hit the limits exactly; the structure tag can
    if table.structure == "identical":
        return 1.0
    if table.structure == "independent":
        return 0.0
    cells = (
        (table.p11, px, py),
        (table.p10, px, 1.0 - py),
        (table.p01, 1.0 - px, py),
        (table.p00, 1.0 - px, 1.0 - py),
    )
    info = 0.0
    for p, mx, my in cells:
        if p > 0.0:
            info += p * math.log2(p / (mx * my))
    if info < -1e-12:
        raise NumericalConsistencyError(f"mutual information came out {info} < 0")
    info = max(info, 0.0)
    ratio = info / math.sqrt(_entropy_bits(px) * _entropy_bits(py))
    return min(1.0, max(0.0, ratio))


def lcr(which: str, ensemble: WishartEnsemble, rho_adjacent_sq: float,
        u: float, delta_f: float) -> float:
    """Level crossings of threshold u per Hz across the subcarrier grid."""
    _check_which(which)
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    if delta_f <= 0:
        raise DomainError(f"delta_f must be > 0, got {delta_f}")
    f = marginal_outage(which, ensemble, u)
    fj = _joint_outage(which, ensemble, rho_adjacent_sq, u, u)
    return max(f - fj, 0.0) / delta_f


def afd(which: str, ensemble: WishartEnsemble, rho_adjacent_sq: float,
        u: float, delta_f: float) -> float:
    """Average fade extent in Hz: fade probability over crossing rate."""
    f = marginal_outage(which, ensemble, u)
    n_f = lcr(which, ensemble, rho_adjacent_sq, u, delta_f)
    if n_f == 0.0:
        raise AfdUndefinedError(
            f"crossing rate is zero at u={u}: average fade duration undefined"
        )
    return f / n_f


def level_crossing(which: str, ensemble: WishartEnsemble, rho_adjacent_sq: float,
                   u: float, delta_f: float) -> LevelCrossingResult:
    """Crossing rate and fade duration sharing one pair of CDF evaluations."""
    _check_which(which)
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    if delta_f <= 0:
        raise DomainError(f"delta_f must be > 0, got {delta_f}")
    f = marginal_outage(which, ensemble, u)
    fj = _joint_outage(which, ensemble, rho_adjacent_sq, u, u)
    n_f = max(f - fj, 0.0) / delta_f
    if n_f == 0.0:
        raise AfdUndefinedError(
            f"crossing rate is zero at u={u}: average fade duration undefined"
        )
    return LevelCrossingResult(lcr=n_f, afd=f / n_f)


def invert_outage(which: str, ensemble: WishartEnsemble, target_pout: float) -> float:
    """Threshold gamma with Pr{eigenvalue <= gamma} = target, to 1e-10."""
    _check_which(which)
    if not 0.0 < target_pout < 1.0:
        raise DomainError(f"target_pout must be in (0, 1), got {target_pout}")

    def g(x):
        return marginal_outage(which, ensemble, x) - target_pout

    hi = ensemble.sigma_sq * ensemble.dims.t
    for _ in range(200):
        if g(hi) > 0.0:
            break
        hi *= 2.0
        if not math.isfinite(hi):
            raise DomainError(f"could not bracket target {target_pout}")
    else:
        raise DomainError(f"could not bracket target {target_pout}")
    gamma = optimize.brentq(g, 0.0, hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
    resid = abs(g(gamma))
    if resid > 1e-10:
        raise NumericalConsistencyError(
            f"inversion residual {resid} exceeds 1e-10 at gamma={gamma}"
        )
    return float(gamma)
