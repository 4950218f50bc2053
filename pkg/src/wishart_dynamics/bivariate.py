"""Joint distributions of extreme eigenvalues of two correlated complex
Wishart matrices.

The joint CDF of the largest eigenvalues and the joint CCDF of the smallest
are exact s x s determinants whose entries are values of one incomplete
noncentral quadratic integral (``iinq``).  That integral has a closed form
built from Nuttall Q functions and a nested radial integral (``integral_K``)
whose series terms (``integral_I``) combine Marcum Q values with the
regularized two-variable confluent hypergeometric function.

Everything is assembled per-term in log space: each closed form is a sum of
same-sign or mildly cancelling terms whose raw factors can overflow long
before the result does.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, PrecisionWarning
from .eigendist import (
    WishartEnsemble,
    _check_envelope,
    _clamp_unit,
    _lu_diag,
    cdf_largest,
    ccdf_smallest,
    signed_log_det,
)
from .specfun import (
    _check_int,
    _check_nonneg,
    _phi3_tilde_scaled,
    _reg_upper_gamma_int,
    marcum_q,
    nuttall_coeffs,
    nuttall_q,
)

# below this the correlated closed form is numerically indistinguishable
# from independence and its normalizing constant degenerates
RHO_SQ_INDEP = 1e-14
# above this the joint distribution is treated as perfectly correlated
RHO_SQ_MAX = 1.0 - 1e-6

# warn when the determinant's pivot spread leaves fewer digits than this
_MIN_TRUSTED_DIGITS = 6.0


@dataclass(frozen=True)
class CorrelationState:
    """Correlation rho_sq between the two channel draws, with the noise
    scale they share.  kappa and eps are the derived exponential-family
    parameters; they are defined only for rho_sq < 1."""

    rho_sq: float
    sigma_sq: float = 1.0

    def __post_init__(self):
        r = float(self.rho_sq)
        if not math.isfinite(r) or r < 0.0 or r > 1.0:
            raise DomainError(f"rho_sq must lie in [0, 1], got {self.rho_sq!r}")
        s = float(self.sigma_sq)
        if not math.isfinite(s) or s <= 0.0:
            raise DomainError(f"sigma_sq must be finite and > 0, got {self.sigma_sq!r}")
        object.__setattr__(self, "rho_sq", r)
        object.__setattr__(self, "sigma_sq", s)

    @property
    def kappa(self) -> float:
        if self.rho_sq == 1.0:
            raise DomainError("kappa is undefined at rho_sq = 1")
        return 1.0 / ((1.0 - self.rho_sq) * self.sigma_sq)

    @property
    def eps(self) -> float:
        return self.kappa * self.rho_sq


@dataclass(frozen=True)
class IinqParams:
    """Index triple (k, c, j) and parameters (alpha, beta, gamma, u) of the
    incomplete noncentral quadratic integral."""

    k: int
    c: int
    j: int
    alpha: float
    beta: float
    gamma: float
    u: float

    def __post_init__(self):
        k = _check_int(self.k, "k")
        c = _check_int(self.c, "c")
        j = _check_int(self.j, "j")
        if k < 0 or c < 0:
            raise DomainError(f"k and c must be >= 0, got k={k}, c={c}")
        if j < 1:
            raise DomainError(f"j must be >= 1, got {j}")
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0:
            raise DomainError(f"alpha must be finite and > 0, got {self.alpha!r}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", _check_nonneg(self.beta, "beta"))
        object.__setattr__(self, "gamma", _check_nonneg(self.gamma, "gamma"))
        object.__setattr__(self, "u", _check_nonneg(self.u, "u"))

    @property
    def delta(self) -> float:
        return self.alpha + self.gamma * self.gamma / 2.0

    @property
    def theta(self) -> float:
        g2 = self.gamma * self.gamma
        return g2 / (g2 + 2.0 * self.alpha)


@dataclass(frozen=True)
class JointPoint:
    """Evaluation point (lam for matrix one, phi for matrix two)."""

    lam: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_nonneg(self.lam, "lam"))
        object.__setattr__(self, "phi", _check_nonneg(self.phi, "phi"))


class QuadratureResult(NamedTuple):
    value: float
    error: float


def _signed_logsumexp(terms) -> float:
    """log of a signed sum of exp(log)-terms; the sum is analytically >= 0,
    small negatives from cancellation clamp to zero."""
    terms = [(s, l) for s, l in terms if l > -math.inf]
    if not terms:
        return -math.inf
    top = max(l for _, l in terms)
    acc = 0.0
    for s, l in terms:
        acc += s * math.exp(l - top)
    if acc <= 0.0:
        if acc < -1e-8:
            warnings.warn(
                "cancellation exceeded tolerance in a positive series; "
                "clamping to zero",
                PrecisionWarning,
            )
        return -math.inf
    return top + math.log(acc)


def _t3_limit_poly(l: int, cl: int, x: float) -> float:
    """lim_{w->0} w^{cl-1} Phi3~(l, cl; w, x*w) for cl <= 0: the finite
    anti-diagonal sum_{p+q=1-cl} (l)_p x^q / (p! q!)."""
    tot = 0.0
    d = 1 - cl
    for p in range(d + 1):
        q = d - p
        poch = 1.0
        for r in range(p):
            poch *= l + r
        tot += poch * x**q / (math.factorial(p) * math.factorial(q))
    return tot


def _integral_i_log(m: int, n: int, k: int, beta: float, delta: float,
                    theta: float, u: float) -> float:
    """log of e^{-beta^2/2 - delta u^2} * I, where I is the three-part
    series coefficient; the scaled value is a bounded probability-like
    quantity.

    The first two parts of the closed form are an exponential minus a
    single-index hypergeometric term; written that way they cancel
    catastrophically at large beta.  Their difference is exactly
    (1-theta)^{k-n} e^{-delta u^2 (1-theta)} Q_{k+m-n}(u sqrt(2 delta theta), beta)
    by the order-reflection property, so the whole coefficient is a sum of
    nonnegative terms.
    """
    omt = 1.0 - theta
    lomt = math.log(omt)
    b2 = beta * beta / 2.0
    z = delta * theta * u * u * b2
    terms = []
    q = marcum_q(k + m - n, u * math.sqrt(2.0 * delta * theta), beta)
    if q > 0.0:
        terms.append((1.0, (k - n) * lomt - delta * u * u * omt + math.log(q)))
    if beta > 0.0:
        lb2 = math.log(b2)
        base3 = -omt * b2
        for l in range(1, n - k + 1):
            cl = k + m - n + l
            w2 = theta * b2
            if w2 == 0.0:
                # theta = 0 collapses both variables, but the scaling
                # e^{-z/w} survives with z/w = delta u^2 along this path
                if cl < 1:
                    continue
                phi3 = math.exp(-delta * u * u) / math.gamma(cl)
            else:
                phi3 = _phi3_tilde_scaled(l, cl, w2, z)
            if phi3 > 0.0:
                terms.append(
                    (1.0, (k + l - n - 1) * lomt + base3
                     + (k + m - n + l - 1) * lb2 + math.log(phi3))
                )
    else:
        # beta -> 0: each third-part summand has a finite polynomial limit
        for l in range(1, n - k + 1):
            cl = k + m - n + l
            if cl > 1:
                continue
            if cl == 1:
                g = 1.0
            else:
                g = theta ** (1 - cl) * _t3_limit_poly(l, cl, delta * u * u)
            if g > 0.0:
                terms.append(
                    (1.0, (k + l - n - 1) * lomt - delta * u * u + math.log(g))
                )
    return _signed_logsumexp(terms)


def integral_I(m: int, n: int, k: int, beta: float, delta: float,
               theta: float, u: float) -> float:
    """Series coefficient I of the nested radial integral.

    Three-part closed form in the regularized two-variable confluent
    hypergeometric function; requires m >= 1, 0 <= k <= n-1, delta > 0 and
    0 <= theta < 1.
    """
    m = _check_int(m, "m")
    n = _check_int(n, "n")
    k = _check_int(k, "k")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if n < 1 or k < 0 or k > n - 1:
        raise DomainError(f"require n >= 1 and 0 <= k <= n-1, got n={n}, k={k}")
    beta = _check_nonneg(beta, "beta")
    delta = float(delta)
    if not math.isfinite(delta) or delta <= 0:
        raise DomainError(f"delta must be finite and > 0, got {delta!r}")
    theta = float(theta)
    if not (0.0 <= theta < 1.0):
        raise DomainError(f"theta must lie in [0, 1), got {theta!r}")
    u = _check_nonneg(u, "u")
    lv = _integral_i_log(m, n, k, beta, delta, theta, u)
    if lv == -math.inf:
        return 0.0
    return math.exp(lv + beta * beta / 2.0 + delta * u * u)


def _integral_k_log(m: int, n: int, alpha: float, beta: float, gamma: float,
                    u: float) -> float:
    """log of the radial integral K over (u, inf)."""
    if beta == 0.0:
        # the Marcum factor in the integrand is one
        q = _reg_upper_gamma_int(n, alpha * u * u)
        if q == 0.0:
            return -math.inf
        return math.lgamma(n) + math.log(q) - math.log(2.0) - n * math.log(alpha)
    if gamma == 0.0:
        mq = marcum_q(m, 0.0, beta)
        q = _reg_upper_gamma_int(n, alpha * u * u)
        if mq == 0.0 or q == 0.0:
            return -math.inf
        return (
            math.log(mq) + math.lgamma(n) + math.log(q)
            - math.log(2.0) - n * math.log(alpha)
        )
    delta = alpha + gamma * gamma / 2.0
    theta = gamma * gamma / (gamma * gamma + 2.0 * alpha)
    du2 = delta * u * u
    ldu2 = math.log(du2) if du2 > 0 else -math.inf
    logs = []
    for kk in range(n):
        li = _integral_i_log(m, n, kk, beta, delta, theta, u)
        if li == -math.inf:
            continue
        if kk == 0:
            logs.append(li)
        elif du2 > 0.0:
            logs.append(kk * ldu2 - math.lgamma(kk + 1) + li)
    if not logs:
        return -math.inf
    top = max(logs)
    acc = sum(math.exp(l - top) for l in logs)
    return -math.log(2.0) - n * math.log(delta) + math.lgamma(n) + top + math.log(acc)


def integral_K(m: int, n: int, alpha: float, beta: float, gamma: float,
               u: float) -> float:
    """Radial integral int_u^inf z^{2n-1} e^{-alpha z^2} Q_m(gamma z, beta) dz.

    beta = 0 reduces to an incomplete gamma tail; gamma = 0 factors the
    constant Marcum value out of the same tail.
    """
    m = _check_int(m, "m")
    n = _check_int(n, "n")
    if m < 1 or n < 1:
        raise DomainError(f"require m >= 1 and n >= 1, got m={m}, n={n}")
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0:
        raise DomainError(f"alpha must be finite and > 0, got {alpha!r}")
    beta = _check_nonneg(beta, "beta")
    gamma = _check_nonneg(gamma, "gamma")
    u = _check_nonneg(u, "u")
    lv = _integral_k_log(m, n, alpha, beta, gamma, u)
    return 0.0 if lv == -math.inf else math.exp(lv)


def iinq(params: IinqParams) -> float:
    """Incomplete noncentral quadratic integral in closed form.

    J(u) = int_u^inf z^{2j+k-1} e^{-alpha z^2} Q_{2c+k+1,k}(gamma z, beta) dz,
    expressed as a weighted sum of Nuttall Q values plus radial integrals.
    """
    k, c, j = params.k, params.c, params.j
    alpha, beta, gamma, u = params.alpha, params.beta, params.gamma, params.u
    delta = params.delta
    theta = params.theta
    sq2d = math.sqrt(2.0 * delta)
    omega, pcoef = nuttall_coeffs(c, k, beta * beta)
    s1_logs = []
    if beta > 0.0 and c > 0:
        lbeta = math.log(beta)
        a_nut = gamma * beta / sq2d
        b_nut = u * sq2d
        for l in range(1, c + 1):
            # the gamma^{l-1} weight kills every l > 1 term at gamma = 0
            if pcoef[l - 1] == 0.0 or (gamma == 0.0 and l > 1):
                continue
            nv = nuttall_q(2 * (j - 1) + (k + l - 1) + 1, k + l - 1, a_nut, b_nut)
            if nv <= 0.0:
                continue
            s1_logs.append(
                math.log(pcoef[l - 1])
                + (l - 1) * (math.log(gamma) if l > 1 else 0.0)
                + (k + l + 1) * lbeta
                - (2 * j + k + l - 1) * math.log(sq2d)
                + math.log(nv)
            )
    s1 = 0.0
    if s1_logs:
        top = max(s1_logs)
        acc = sum(math.exp(l - top) for l in s1_logs)
        # prefactor e^{-(beta^2/2)(1 - theta)} folds in here
        s1 = math.exp(top + math.log(acc) - (beta * beta / 2.0) * (1.0 - theta))
    s2 = 0.0
    for l in range(1, c + 2):
        e = k + 2 * (l - 1)
        lk = _integral_k_log(k + l, j + k + l - 1, alpha, beta, gamma, u)
        if lk == -math.inf:
            continue
        if gamma == 0.0:
            if e == 0:
                s2 += omega[l - 1] * math.exp(lk)
            continue
        s2 += omega[l - 1] * math.exp(e * math.log(gamma) + lk)
    return s1 + s2


def iinq_quadrature(params: IinqParams, tol: float = 1e-10) -> QuadratureResult:
    """Adaptive quadrature of the defining integral of ``iinq``.

    Independent of the closed-form assembly: the integrand uses the Nuttall
    Q function directly and the radial integral is carried out numerically.
    Returns the value together with the integrator's error estimate.
    """
    if tol <= 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    k, c, j = params.k, params.c, params.j
    alpha, beta, gamma, u = params.alpha, params.beta, params.gamma, params.u
    M = 2 * c + k + 1

    def f(z):
        envelope = (2 * j + k - 1) * math.log(z) - alpha * z * z if z > 0 else -math.inf
        if envelope < -745.0:
            return 0.0
        return math.exp(envelope) * nuttall_q(M, k, gamma * z, beta)

    # split at the Gaussian-envelope scale so the tail transform behaves; at
    # large beta the integrand peaks near gamma*beta/(2*alpha+gamma^2), which
    # must sit inside the finite panel or the adaptive rule misses the mass
    xpk = gamma * beta / (2.0 * alpha + gamma * gamma)
    mid = max(u, math.sqrt((2 * j + k) / alpha), xpk) * 2.0 + 1.0
    inner = [xpk] if u < xpk < mid else None
    v1, e1 = integrate.quad(f, u, mid, epsabs=tol * 0.1, epsrel=tol * 0.1,
                            limit=400, points=inner)
    v2, e2 = integrate.quad(f, mid, np.inf, epsabs=tol * 0.1, epsrel=tol * 0.1, limit=400)
    value = v1 + v2
    error = e1 + e2
    if not math.isfinite(value) or error > max(tol, tol * abs(value)) * 100.0:
        raise ConvergenceError(
            f"quadrature failed to reach tolerance: value={value!r}, error={error!r}"
        )
    return QuadratureResult(float(value), float(error))


def _corr_params(corr: CorrelationState, phi: float):
    kappa = corr.kappa
    eps = corr.eps
    gamma = math.sqrt(2.0 * eps)
    beta = math.sqrt(2.0 * kappa * phi)
    return gamma, beta


def _det_from_entries(mat: np.ndarray, log_row_scale: float, sign_pref: int,
                      label: str) -> float:
    """Signed determinant combined with the row-scale prefactor, with a
    pivot-spread precision warning."""
    if mat.shape[0] > 1:
        d, _ = _lu_diag(mat)
        ad = np.abs(d)
        if np.all(ad > 0.0):
            spread = math.log10(float(ad.max())) - math.log10(float(ad.min()))
            if 15.95 - spread < _MIN_TRUSTED_DIGITS:
                warnings.warn(
                    f"{label}: determinant pivot spread leaves fewer than "
                    f"{_MIN_TRUSTED_DIGITS:.0f} trusted digits",
                    PrecisionWarning,
                )
    sld = signed_log_det(mat)
    if sld.sign == 0:
        return 0.0
    return sign_pref * sld.sign * math.exp(log_row_scale + sld.log_magnitude)


def _theorem_const(s: int, t: int, sigma_sq: float, eps: float):
    """log magnitude and sign of the joint-determinant normalizing constant."""
    logc = s * math.log(2.0) - t * s * math.log(sigma_sq)
    logc += (s * (s - t) / 2.0) * math.log(eps)
    for i in range(1, s + 1):
        logc += (1 - i) * math.log(eps)
        logc -= math.lgamma(s - i + 1) + math.lgamma(t - i + 1)
    sign = 1 if (s * (s - 1) // 2) % 2 == 0 else -1
    return logc, sign


def _joint_cdf_largest_core(ensemble: WishartEnsemble, corr: CorrelationState,
                            lam: float, phi: float) -> float:
    s, t = ensemble.dims.s, ensemble.dims.t
    sigma_sq = ensemble.sigma_sq
    k = t - s
    alpha = 1.0 / sigma_sq
    gamma, beta = _corr_params(corr, phi)
    su = math.sqrt(lam)
    mat = np.empty((s, s))
    for i in range(1, s + 1):
        c = s - i
        rowf = 2.0 ** ((2 * i - s - t) / 2.0)
        for j in range(1, s + 1):
            j00 = iinq(IinqParams(k, c, j, alpha, 0.0, gamma, 0.0))
            j0b = iinq(IinqParams(k, c, j, alpha, beta, gamma, 0.0))
            ju0 = iinq(IinqParams(k, c, j, alpha, 0.0, gamma, su))
            jub = iinq(IinqParams(k, c, j, alpha, beta, gamma, su))
            mat[i - 1, j - 1] = rowf * ((j00 - j0b) - (ju0 - jub))
    logc, sign = _theorem_const(s, t, sigma_sq, corr.eps)
    return _det_from_entries(mat, logc, sign, "joint_cdf_largest")


def _joint_ccdf_smallest_core(ensemble: WishartEnsemble, corr: CorrelationState,
                              lam: float, phi: float) -> float:
    s, t = ensemble.dims.s, ensemble.dims.t
    sigma_sq = ensemble.sigma_sq
    k = t - s
    alpha = 1.0 / sigma_sq
    gamma, beta = _corr_params(corr, phi)
    su = math.sqrt(lam)
    mat = np.empty((s, s))
    for i in range(1, s + 1):
        c = s - i
        rowf = 2.0 ** ((2 * i - s - t) / 2.0)
        for j in range(1, s + 1):
            mat[i - 1, j - 1] = rowf * iinq(IinqParams(k, c, j, alpha, beta, gamma, su))
    logc, sign = _theorem_const(s, t, sigma_sq, corr.eps)
    return _det_from_entries(mat, logc, sign, "joint_ccdf_smallest")


def _check_corr(ensemble: WishartEnsemble, corr: CorrelationState):
    if corr.sigma_sq != ensemble.sigma_sq:
        raise DomainError(
            "correlation state and ensemble disagree on sigma_sq: "
            f"{corr.sigma_sq!r} vs {ensemble.sigma_sq!r}"
        )


def joint_cdf_largest(ensemble: WishartEnsemble, corr: CorrelationState,
                      point: JointPoint) -> float:
    """P(lambda_max,1 <= lam, lambda_max,2 <= phi) for correlated draws.

    rho_sq at or below the independence threshold multiplies the marginals;
    rho_sq >= 1 - 1e-6 returns the marginal at min(lam, phi) with a
    precision warning.
    """
    _check_envelope(ensemble.dims)
    _check_corr(ensemble, corr)
    lam, phi = point.lam, point.phi
    if corr.rho_sq <= RHO_SQ_INDEP:
        return cdf_largest(ensemble, lam) * cdf_largest(ensemble, phi)
    if corr.rho_sq >= RHO_SQ_MAX:
        warnings.warn(
            "rho_sq at or beyond the perfect-correlation threshold; "
            "returning the fully correlated limit",
            PrecisionWarning,
        )
        return cdf_largest(ensemble, min(lam, phi))
    if lam == 0.0 or phi == 0.0:
        return 0.0
    raw = _joint_cdf_largest_core(ensemble, corr, lam, phi)
    return _clamp_unit(raw, "joint_cdf_largest")


def joint_ccdf_smallest(ensemble: WishartEnsemble, corr: CorrelationState,
                        point: JointPoint) -> float:
    """P(lambda_min,1 > lam, lambda_min,2 > phi) for correlated draws."""
    _check_envelope(ensemble.dims)
    _check_corr(ensemble, corr)
    lam, phi = point.lam, point.phi
    if corr.rho_sq <= RHO_SQ_INDEP:
        return ccdf_smallest(ensemble, lam) * ccdf_smallest(ensemble, phi)
    if corr.rho_sq >= RHO_SQ_MAX:
        warnings.warn(
            "rho_sq at or beyond the perfect-correlation threshold; "
            "returning the fully correlated limit",
            PrecisionWarning,
        )
        return ccdf_smallest(ensemble, max(lam, phi))
    # the smallest eigenvalue is almost surely positive, so a zero threshold
    # drops out of the joint event exactly
    if lam == 0.0 and phi == 0.0:
        return 1.0
    if lam == 0.0:
        return ccdf_smallest(ensemble, phi)
    if phi == 0.0:
        return ccdf_smallest(ensemble, lam)
    raw = _joint_ccdf_smallest_core(ensemble, corr, lam, phi)
    return _clamp_unit(raw, "joint_ccdf_smallest")


def joint_cdf_smallest(ensemble: WishartEnsemble, corr: CorrelationState,
                       point: JointPoint) -> float:
    """P(lambda_min,1 <= lam, lambda_min,2 <= phi), by inclusion-exclusion
    from the joint CCDF and the marginals."""
    _check_envelope(ensemble.dims)
    _check_corr(ensemble, corr)
    lam, phi = point.lam, point.phi
    if corr.rho_sq >= RHO_SQ_MAX:
        warnings.warn(
            "rho_sq at or beyond the perfect-correlation threshold; "
            "returning the fully correlated limit",
            PrecisionWarning,
        )
        return 1.0 - ccdf_smallest(ensemble, min(lam, phi))
    cc = joint_ccdf_smallest(ensemble, corr, point)
    raw = cc + (1.0 - ccdf_smallest(ensemble, lam)) + (1.0 - ccdf_smallest(ensemble, phi)) - 1.0
    return _clamp_unit(raw, "joint_cdf_smallest")
