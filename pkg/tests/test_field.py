import numpy as np
import pytest

from gyrodiff.correlation import PowerLaw
from gyrodiff.field import (FieldSpec, empirical_correlation,
                            gaussian_bump_spec, synthesize)


def test_spec_rejects_power_law_spatial():
    with pytest.raises(ValueError):
        FieldSpec(spatial=PowerLaw(alpha=1.0))


def test_spec_carries_induced_correlation(unit_spec):
    # the model the synthesizer realizes is attached to the spec itself
    m = unit_spec.correlation
    assert m.is_separable
    assert m.t_support == unit_spec.block_length
    assert abs(m.envelope(0.0) - 1.0) < 1e-14


def test_realization_reproducible(unit_spec):
    tau = np.linspace(0.0, 3.0, 7)
    x = np.linspace(-1.0, 1.0, 14).reshape(7, 2)
    a = synthesize(unit_spec, 5).potential(tau, x)
    b = synthesize(unit_spec, 5).potential(tau, x)
    assert np.array_equal(a, b)
    c = synthesize(unit_spec, 6).potential(tau, x)
    assert not np.array_equal(a, c)


def test_evaluation_order_independence(unit_spec):
    # lazy per-block tables must not depend on which block is hit first
    tau = np.array([0.2, 5.7, 2.3])
    x = np.tile(np.array([0.3, -0.4]), (3, 1))
    fwd = synthesize(unit_spec, 0)
    vals_fwd = [fwd.potential(t, np.array([0.3, -0.4])) for t in tau]
    bwd = synthesize(unit_spec, 0)
    vals_bwd = [bwd.potential(t, np.array([0.3, -0.4])) for t in tau[::-1]]
    assert np.allclose(vals_fwd, vals_bwd[::-1], rtol=0, atol=0)
    assert np.allclose(fwd.potential(tau, x), vals_fwd, rtol=0, atol=0)


def test_scalar_tau_broadcasts_over_positions(unit_spec):
    real = synthesize(unit_spec, 1)
    x = np.random.default_rng(0).normal(size=(5, 2))
    vals = real.potential(0.4, x)
    assert np.shape(vals) == (5,)
    grads = real.gradient(0.4, x)
    assert grads.shape == (5, 2)
    for i in range(5):
        assert abs(vals[i] - real.potential(0.4, x[i])) < 1e-15


def test_gradient_matches_finite_differences(unit_spec):
    real = synthesize(unit_spec, 3)
    x = np.array([0.37, -0.81])
    tau = 1.234
    g = real.gradient(tau, x)[0]
    h = 1e-6
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        fd = (real.potential(tau, x + e) - real.potential(tau, x - e)) / (2 * h)
        assert abs(g[k] - fd) < 1e-6


def test_window_vanishes_at_block_edges(unit_spec):
    real = synthesize(unit_spec, 2)
    # at tau = delta + j*b the window is exactly zero: V = 0 everywhere
    for j in (0, 3):
        tau = real.delta + j * unit_spec.block_length
        x = np.random.default_rng(j).normal(size=(4, 2))
        assert np.max(np.abs(real.potential(tau, x))) == 0.0


def test_empirical_correlation_matches_target(unit_spec):
    lags = [(0.0, (0.0, 0.0)), (0.3, (0.5, 0.0)), (0.7, (0.0, 1.0)),
            (1.2, (0.3, 0.3))]
    out = empirical_correlation(unit_spec, lags, n_realizations=150,
                                points_per_realization=48)
    for r in out:
        assert abs(r.estimate - r.target) <= 4.0 * r.stderr, (r.tau, r.x)
    # decorrelation beyond the block length: target is exactly zero
    assert out[-1].target == 0.0


def test_empirical_correlation_realization_floor(unit_spec):
    with pytest.raises(ValueError):
        empirical_correlation(unit_spec, [(0.0, (0.0, 0.0))],
                              n_realizations=10)
