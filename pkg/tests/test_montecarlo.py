"""Sampling oracle: reproducibility, statistical sanity, estimator plumbing."""

import math

import numpy as np
import pytest

from wishart_dynamics import (
    ChannelDims,
    DomainError,
    EigenPairSample,
    McConfig,
    WishartEnsemble,
    ccdf_smallest,
    cdf_largest,
    empirical_joint_ccdf,
    empirical_joint_cdf,
    estimate_corrcoef,
    estimate_mean_extremes,
    hermitian_eigenvalues,
    sample_pair,
    sample_pairs,
)
from wishart_dynamics import montecarlo


def _cfg(n_t=2, n_r=3, seed=2024, n=2000, rho_sq=0.6):
    ens = WishartEnsemble(ChannelDims(n_t=n_t, n_r=n_r), 1.0)
    return McConfig(seed=seed, n_samples=n, ensemble=ens, rho_sq=rho_sq)


def test_config_validation():
    ens = WishartEnsemble(ChannelDims(2, 2), 1.0)
    with pytest.raises(DomainError):
        McConfig(seed=-1, n_samples=10, ensemble=ens, rho_sq=0.5)
    with pytest.raises(DomainError):
        McConfig(seed=True, n_samples=10, ensemble=ens, rho_sq=0.5)
    with pytest.raises(DomainError):
        McConfig(seed=1 << 64, n_samples=10, ensemble=ens, rho_sq=0.5)
    with pytest.raises(DomainError):
        McConfig(seed=1, n_samples=0, ensemble=ens, rho_sq=0.5)
    with pytest.raises(DomainError):
        McConfig(seed=1, n_samples=10, ensemble=ens, rho_sq=1.5)
    with pytest.raises(DomainError):
        sample_pairs(_cfg(), stream_start=-1)
    with pytest.raises(DomainError):
        sample_pairs(_cfg(), count=0)
    with pytest.raises(DomainError):
        EigenPairSample(lam_max=1.0, lam_min=2.0, phi_max=1.0, phi_min=0.5)


def test_single_stream_matches_bulk_bitwise():
    cfg = _cfg()
    bulk = sample_pairs(cfg)
    for idx in (0, 17, 999, 1999):
        one = sample_pair(cfg, idx)
        assert one.lam_max == bulk.lam_max[idx]
        assert one.lam_min == bulk.lam_min[idx]
        assert one.phi_max == bulk.phi_max[idx]
        assert one.phi_min == bulk.phi_min[idx]


def test_offset_slice_matches_bulk_bitwise():
    cfg = _cfg()
    bulk = sample_pairs(cfg)
    part = sample_pairs(cfg, stream_start=500, count=100)
    assert np.array_equal(part.lam_max, bulk.lam_max[500:600])
    assert np.array_equal(part.lam_min, bulk.lam_min[500:600])
    assert np.array_equal(part.phi_max, bulk.phi_max[500:600])
    assert np.array_equal(part.phi_min, bulk.phi_min[500:600])


def test_chunking_does_not_change_output(monkeypatch):
    cfg = _cfg(n=1500)
    whole = sample_pairs(cfg)
    # force many small blocks; the counter layout must make them seamless
    monkeypatch.setattr(montecarlo, "_CHUNK_BYTES", 1)
    pieces = sample_pairs(cfg)
    for a, b in zip(whole, pieces):
        assert np.array_equal(a, b)


def test_perfect_correlation_duplicates_the_channel():
    cfg = _cfg(rho_sq=1.0, n=500)
    batch = sample_pairs(cfg)
    assert np.array_equal(batch.lam_max, batch.phi_max)
    assert np.array_equal(batch.lam_min, batch.phi_min)


def test_scalar_ensemble_is_unit_exponential():
    cfg = _cfg(n_t=1, n_r=1, seed=321, n=1_000_000, rho_sq=0.0)
    batch = sample_pairs(cfg)
    assert np.array_equal(batch.lam_max, batch.lam_min)
    # Exp(1): mean 1, variance 1, so the sample mean carries se ~ 1e-3
    assert abs(batch.lam_max.mean() - 1.0) < 5e-3
    assert abs(batch.phi_max.mean() - 1.0) < 5e-3


def test_marginals_match_closed_forms():
    cfg = _cfg(n_t=4, n_r=2, seed=777, n=1_000_000, rho_sq=0.35)
    ens = cfg.ensemble
    batch = sample_pairs(cfg)
    n = cfg.n_samples
    for lam in (2.0, 4.0, 6.0, 9.0, 13.0):
        ref = cdf_largest(ens, lam)
        for col in (batch.lam_max, batch.phi_max):
            p = float(np.mean(col <= lam))
            se = math.sqrt(max(ref * (1.0 - ref), 1e-12) / n)
            assert abs(p - ref) < 4.0 * se
    for lam in (0.05, 0.2, 0.5, 1.0, 2.0):
        ref = ccdf_smallest(ens, lam)
        for col in (batch.lam_min, batch.phi_min):
            p = float(np.mean(col > lam))
            se = math.sqrt(max(ref * (1.0 - ref), 1e-12) / n)
            assert abs(p - ref) < 4.0 * se


def test_independence_factorizes():
    cfg = _cfg(n_t=2, n_r=2, seed=4242, n=400_000, rho_sq=0.0)
    ens = cfg.ensemble
    batch = sample_pairs(cfg)
    lam = 3.5
    joint, se = empirical_joint_cdf(batch.pairs_largest(), (lam, lam))
    prod = cdf_largest(ens, lam) ** 2
    assert abs(joint - prod) < 4.0 * max(se, 1e-4)
    r = estimate_corrcoef(batch.pairs_largest())
    assert abs(r) < 4.0 / math.sqrt(cfg.n_samples)


def test_correlation_raises_joint_mass():
    lam = 3.5
    low = sample_pairs(_cfg(n_t=2, n_r=2, seed=9, n=200_000, rho_sq=0.1))
    high = sample_pairs(_cfg(n_t=2, n_r=2, seed=9, n=200_000, rho_sq=0.9))
    p_low, _ = empirical_joint_cdf(low.pairs_largest(), (lam, lam))
    p_high, _ = empirical_joint_cdf(high.pairs_largest(), (lam, lam))
    assert p_high > p_low
    assert estimate_corrcoef(high.pairs_largest()) > estimate_corrcoef(
        low.pairs_largest())


def test_hermitian_eigenvalues_descending():
    ev = hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(ev, [3.0, 2.0, 1.0], atol=1e-14)
    ev = hermitian_eigenvalues(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(ev, [3.0, 1.0], atol=1e-12)
    rng = np.random.default_rng(12)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    ev = hermitian_eigenvalues(h)
    assert np.all(np.diff(ev) <= 0)
    assert abs(ev.sum() - np.trace(h).real) < 1e-10
    with pytest.raises(DomainError):
        hermitian_eigenvalues(a)
    with pytest.raises(DomainError):
        hermitian_eigenvalues(np.ones((2, 3)))


def test_empirical_estimators():
    pts = np.array([[0.1, 0.2], [0.3, 0.1], [0.2, 0.4]])
    p, se = empirical_joint_cdf(pts, (1.0, 1.0))
    assert (p, se) == (1.0, 0.0)
    p, se = empirical_joint_ccdf(pts, (1.0, 1.0))
    assert (p, se) == (0.0, 0.0)
    p, _ = empirical_joint_cdf(pts, (0.2, 0.2))
    assert p == pytest.approx(1.0 / 3.0, abs=1e-15)
    rng = np.random.default_rng(5)
    u = rng.random((200_000, 2))
    p, se = empirical_joint_cdf(u, (0.5, 0.5))
    assert abs(p - 0.25) < 4.0 * se
    q, _ = empirical_joint_ccdf(u, (0.5, 0.5))
    assert abs(q - 0.25) < 4.0 * max(se, 1e-4)
    with pytest.raises(DomainError):
        empirical_joint_cdf(np.empty((0, 2)), (0.5, 0.5))
    with pytest.raises(DomainError):
        empirical_joint_cdf(np.ones((3, 3)), (0.5, 0.5))


def test_corrcoef_edge_cases():
    x = np.linspace(0.0, 1.0, 50)
    assert estimate_corrcoef(np.column_stack((x, 2.0 * x))) == pytest.approx(
        1.0, abs=1e-12)
    assert estimate_corrcoef(np.column_stack((x, -3.0 * x))) == pytest.approx(
        -1.0, abs=1e-12)
    with pytest.raises(DomainError):
        estimate_corrcoef(np.column_stack((x, np.ones_like(x))))
    with pytest.raises(DomainError):
        estimate_corrcoef(np.array([[1.0, 2.0]]))


def test_mean_extremes_deterministic():
    ens = WishartEnsemble(ChannelDims(2, 2), 1.0)
    a = estimate_mean_extremes(ens, seed=12345, n_samples=20_000)
    b = estimate_mean_extremes(ens, seed=12345, n_samples=20_000)
    assert a == b
    assert a[0] > a[1] > 0.0
    c = estimate_mean_extremes(ens, seed=12346, n_samples=20_000)
    assert c != a
