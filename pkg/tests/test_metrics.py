"""Dynamics metrics: outage tables, MI ratio, crossing rates, inversions."""

import math

import numpy as np
import pytest
from scipy import signal, special

from wishart_dynamics import (
    AfdUndefinedError,
    ChannelDims,
    CorrelationProfile,
    DomainError,
    NumericalConsistencyError,
    PrecisionWarning,
    ProbTable2x2,
    WishartEnsemble,
    afd,
    clarke_rho_sq,
    double_outage,
    invert_outage,
    lcr,
    level_crossing,
    normalized_mi,
    ofdm_rho_sq,
    outage_table,
)
from wishart_dynamics.metrics import marginal_outage

J0_FIRST_ZERO = 2.404825557695772768622


def test_clarke_profile():
    assert clarke_rho_sq(0.1, 0.0) == 1.0
    assert clarke_rho_sq(0.0, 2.0) == 1.0
    # first Bessel zero kills the correlation outright
    assert clarke_rho_sq(J0_FIRST_ZERO / (2.0 * math.pi), 1.0) < 1e-18
    assert clarke_rho_sq(0.1, 1.0) == pytest.approx(
        special.j0(0.2 * math.pi) ** 2, rel=1e-14)
    with pytest.raises(DomainError):
        clarke_rho_sq(-0.1, 1.0)
    with pytest.raises(DomainError):
        clarke_rho_sq(0.1, -1.0)


def test_ofdm_profile():
    assert ofdm_rho_sq(0.5, 1.0, 0) == 1.0
    assert ofdm_rho_sq(1.0 / (2.0 * math.pi), 1.0, 1) == pytest.approx(0.5, rel=1e-14)
    assert ofdm_rho_sq(0.1, 1.0, 1) == pytest.approx(
        1.0 / (1.0 + 0.04 * math.pi ** 2), rel=1e-15)
    assert ofdm_rho_sq(0.1, 1.0, -2) == ofdm_rho_sq(0.1, 1.0, 2)
    with pytest.raises(DomainError):
        ofdm_rho_sq(-0.1, 1.0, 1)
    with pytest.raises(DomainError):
        ofdm_rho_sq(0.1, 0.0, 1)
    with pytest.raises(DomainError):
        ofdm_rho_sq(0.1, 1.0, True)


def test_correlation_profile_dataclass():
    p = CorrelationProfile(kind="clarke", tau=0.5, f_d=0.2)
    assert p.rho_sq == clarke_rho_sq(0.2, 0.5)
    q = CorrelationProfile(kind="ofdm_exponential", tau=0.1, delta_f=2.0, k_sep=3)
    assert q.rho_sq == ofdm_rho_sq(0.1, 2.0, 3)
    with pytest.raises(DomainError):
        CorrelationProfile(kind="jakes", tau=0.1, f_d=0.1)
    with pytest.raises(DomainError):
        CorrelationProfile(kind="clarke", tau=0.1)
    with pytest.raises(DomainError):
        CorrelationProfile(kind="ofdm_exponential", tau=0.1)
    with pytest.raises(DomainError):
        CorrelationProfile(kind="clarke", tau=-1.0, f_d=0.1)


def test_double_outage_independent_product():
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    for which, gamma in (("largest", 4.0), ("smallest", 0.5)):
        p1 = marginal_outage(which, ens, gamma)
        assert double_outage(which, ens, 0.0, gamma) == pytest.approx(
            p1 * p1, rel=1e-12)


def test_double_outage_full_correlation():
    ens = WishartEnsemble(ChannelDims(2, 2), 1.0)
    for which, gamma in (("largest", 2.0), ("smallest", 0.3)):
        p1 = marginal_outage(which, ens, gamma)
        with pytest.warns(PrecisionWarning):
            pd = double_outage(which, ens, 1.0, gamma)
        assert pd == pytest.approx(p1, rel=1e-12)


def test_double_outage_bounds():
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    cases = (("largest", (2.0, 4.0, 7.0)), ("smallest", (0.2, 0.6, 1.5)))
    for which, grid in cases:
        for rho_sq in (0.2, 0.7):
            for gamma in grid:
                p1 = marginal_outage(which, ens, gamma)
                pd = double_outage(which, ens, rho_sq, gamma)
                assert p1 * p1 - 1e-12 <= pd <= p1 + 1e-12


def test_outage_table_consistency():
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    t = outage_table("largest", ens, 0.5, 4.0)
    assert t.p11 + t.p10 + t.p01 + t.p00 == pytest.approx(1.0, abs=1e-9)
    assert t.p10 == t.p01
    assert t.p_first == pytest.approx(marginal_outage("largest", ens, 4.0), rel=1e-10)
    assert t.p_first == t.p_second
    t0 = outage_table("smallest", ens, 0.0, 0.5)
    assert t0.p11 == pytest.approx(t0.p_first ** 2, rel=1e-10)
    with pytest.warns(PrecisionWarning):
        t1 = outage_table("largest", ens, 1.0, 4.0)
    assert t1.p10 == pytest.approx(0.0, abs=1e-12)
    assert t1.p01 == pytest.approx(0.0, abs=1e-12)


def test_prob_table_validation():
    with pytest.raises(DomainError):
        ProbTable2x2(p11=1.2, p10=0.0, p01=0.0, p00=-0.2)
    with pytest.raises(NumericalConsistencyError):
        ProbTable2x2(p11=0.2, p10=0.2, p01=0.2, p00=0.2)
    with pytest.raises(NumericalConsistencyError):
        ProbTable2x2(p11=0.1, p10=0.3, p01=0.2, p00=0.4)


def test_normalized_mi_hand_value():
    t = ProbTable2x2(p11=0.009, p10=0.001, p01=0.001, p00=0.989)
    assert normalized_mi(t) == pytest.approx(0.80093349968300409, rel=1e-12)


def test_normalized_mi_endpoints():
    p1 = 0.05
    indep = ProbTable2x2(p11=p1 * p1, p10=p1 * (1.0 - p1),
                         p01=p1 * (1.0 - p1), p00=(1.0 - p1) ** 2)
    assert normalized_mi(indep) < 1e-12
    full = ProbTable2x2(p11=p1, p10=0.0, p01=0.0, p00=1.0 - p1)
    assert normalized_mi(full) > 1.0 - 1e-12
    with pytest.raises(DomainError):
        normalized_mi(ProbTable2x2(p11=0.0, p10=0.0, p01=0.0, p00=1.0))
    with pytest.raises(DomainError):
        ProbTable2x2(p11=p1, p10=0.0, p01=0.0, p00=1.0 - p1, structure="other")


def test_normalized_mi_exact_at_correlation_endpoints():
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    assert normalized_mi(outage_table("largest", ens, 0.0, 4.0)) == 0.0
    assert normalized_mi(outage_table("smallest", ens, 0.0, 0.5)) == 0.0
    with pytest.warns(PrecisionWarning):
        t1 = outage_table("largest", ens, 1.0, 4.0)
    assert normalized_mi(t1) == 1.0
    with pytest.warns(PrecisionWarning):
        t2 = outage_table("smallest", ens, 1.0, 0.5)
    assert normalized_mi(t2) == 1.0


def test_invert_outage_scalar():
    ens = WishartEnsemble(ChannelDims(1, 1), 1.0)
    gamma = invert_outage("largest", ens, 0.01)
    assert gamma == pytest.approx(-math.log(0.99), abs=1e-10)
    with pytest.raises(DomainError):
        invert_outage("largest", ens, 0.0)
    with pytest.raises(DomainError):
        invert_outage("largest", ens, 1.0)


def test_invert_outage_round_trip():
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    for which in ("largest", "smallest"):
        gammas = []
        for target in (1e-3, 1e-2, 1e-1):
            g = invert_outage(which, ens, target)
            assert marginal_outage(which, ens, g) == pytest.approx(target, abs=1e-10)
            gammas.append(g)
        assert gammas[0] < gammas[1] < gammas[2]


def test_lcr_afd_identities():
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    cases = (("largest", 4.0), ("largest", 6.0), ("smallest", 0.5))
    for which, u in cases:
        f = marginal_outage(which, ens, u)
        n = lcr(which, ens, 0.6, u, 0.25)
        a = afd(which, ens, 0.6, u, 0.25)
        assert a * n == pytest.approx(f, rel=1e-12)
        assert a >= 0.25
        both = level_crossing(which, ens, 0.6, u, 0.25)
        assert both.lcr == n and both.afd == a
    assert lcr("largest", ens, 0.6, 0.0, 1.0) == 0.0
    with pytest.raises(AfdUndefinedError):
        afd("largest", ens, 0.6, 0.0, 1.0)
    with pytest.raises(AfdUndefinedError):
        level_crossing("largest", ens, 0.6, 0.0, 1.0)


def test_afd_small_threshold_limit():
    # rare fades end after one subcarrier, so the duration tends to delta_f
    ens = WishartEnsemble(ChannelDims(2, 2), 1.0)
    durations = [afd("largest", ens, 0.6, u, 1.0) for u in (0.3, 0.2, 0.1)]
    assert durations[0] > durations[1] > durations[2] > 1.0
    assert durations[1] - 1.0 < 0.01


def _chain_extremes(n_r, n_t, rho_sq, n_steps, seed, burn=2000):
    """Stationary AR(1) channel sequence sharing the pairwise law of the
    closed forms; returns per-step extreme eigenvalues."""
    rng = np.random.default_rng(seed)
    total = n_steps + burn
    xi = (rng.standard_normal((total, n_r, n_t))
          + 1j * rng.standard_normal((total, n_r, n_t))) / math.sqrt(2.0)
    rho = math.sqrt(rho_sq)
    h = signal.lfilter([math.sqrt(1.0 - rho_sq)], [1.0, -rho], xi, axis=0)
    h = h[burn:]
    if n_r <= n_t:
        w = np.einsum("nij,nkj->nik", h, h.conj())
    else:
        w = np.einsum("nji,njk->nik", h.conj(), h)
    w = 0.5 * (w + np.conj(np.transpose(w, (0, 2, 1))))
    ev = np.linalg.eigvalsh(w)
    return ev[:, -1], ev[:, 0]


def _sim_lcr(series, u, delta_f):
    faded = series <= u
    ups = np.count_nonzero(faded[:-1] & ~faded[1:])
    return ups / (len(series) - 1) / delta_f


def _sim_afd(series, u, delta_f):
    faded = series <= u
    d = np.diff(faded.astype(np.int8))
    starts = np.flatnonzero(d == 1) + 1
    ends = np.flatnonzero(d == -1) + 1
    if faded[0]:
        starts = np.concatenate(([0], starts))
    if faded[-1]:
        ends = np.concatenate((ends, [len(series)]))
    lengths = ends - starts
    # boundary-truncated runs would bias the mean low
    if faded[0]:
        lengths = lengths[1:]
    if faded[-1] and len(lengths):
        lengths = lengths[:-1]
    return float(lengths.mean()) * delta_f


def test_lcr_against_sequence_simulation():
    rho_adj = ofdm_rho_sq(0.2, 1.0, 1)
    lam_max, _ = _chain_extremes(2, 4, rho_adj, 200_000, seed=2718)
    ens = WishartEnsemble(ChannelDims(4, 2), 1.0)
    ref = lcr("largest", ens, rho_adj, 4.0, 1.0)
    sim = _sim_lcr(lam_max, 4.0, 1.0)
    assert sim == pytest.approx(ref, rel=0.05)


def test_afd_against_sequence_simulation():
    rho_adj = ofdm_rho_sq(0.1, 1.0, 1)
    _, lam_min = _chain_extremes(4, 4, rho_adj, 200_000, seed=3141)
    ens = WishartEnsemble(ChannelDims(4, 4), 1.0)
    ref = afd("smallest", ens, rho_adj, 0.09, 1.0)
    sim = _sim_afd(lam_min, 0.09, 1.0)
    assert sim == pytest.approx(ref, rel=0.05)
