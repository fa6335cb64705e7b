import math

import numpy as np
import pytest

from gyrodiff.field import synthesize
from gyrodiff.kinetics import (DeltaInit, ParticleEnsemble, PushConfig,
                               SmoothBumpInit, free_flow,
                               gyro_average_histogram, simulate_ensemble,
                               strang_step)
from gyrodiff.she import EnergyGrid


def test_free_flow_conserves_speed():
    x = np.array([[0.2, 0.3]])
    v = np.array([[1.0, -0.5]])
    xp, vp = free_flow(x, v, 0.37, 0.05)
    assert abs(np.linalg.norm(vp) - np.linalg.norm(v)) < 1e-14


def test_free_flow_gyro_period_returns_state():
    eps = 0.03
    x = np.array([[0.1, 0.9]])
    v = np.array([[0.7, 0.4]])
    xp, vp = free_flow(x, v, 2.0 * math.pi * eps, eps)
    assert np.max(np.abs(xp - x)) < 1e-13
    assert np.max(np.abs(vp - v)) < 1e-13


def test_free_flow_matches_rk4():
    # dv/dt = vperp/eps, dx/dt = v integrated with a fine RK4
    eps, t_end = 0.1, 0.21
    y = np.array([0.0, 0.0, 1.0, 0.3])

    def rhs(y):
        x1, x2, v1, v2 = y
        return np.array([v1, v2, -v2 / eps, v1 / eps])

    m = 20000
    h = t_end / m
    for _ in range(m):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    xp, vp = free_flow(np.zeros(2), np.array([1.0, 0.3]), t_end, eps)
    assert np.max(np.abs(np.concatenate([xp, vp]) - y)) < 1e-9


def test_field_free_strang_energy_exact():
    ens = ParticleEnsemble(x=[[0.5, 0.5]], v=[[0.8, -0.2]], eps=0.05)
    e0 = ens.energies.copy()
    for _ in range(1000):
        ens = strang_step(ens, None, 0.01 * ens.eps)
    assert np.max(np.abs(ens.energies - e0)) < 1e-12 * e0


def test_strang_reversibility(unit_spec):
    real = synthesize(unit_spec, 0)
    ens = ParticleEnsemble(x=[[0.45, 0.55]], v=[[0.4, 0.1]], eps=0.05)
    dt = 2.0 * math.pi * ens.eps / 64
    fwd = ens
    for _ in range(200):
        fwd = strang_step(fwd, real, dt)
    back = fwd
    for _ in range(200):
        back = strang_step(back, real, -dt)
    assert np.max(np.abs(back.x - ens.x)) < 1e-9
    assert np.max(np.abs(back.v - ens.v)) < 1e-9


def test_strang_second_order(unit_spec):
    # interior orbit (no box-edge crossing): step-halving convergence study
    real = synthesize(unit_spec, 1)
    eps = 0.05

    def final_state(steps):
        ens = ParticleEnsemble(x=[[0.5, 0.5]], v=[[0.35, 0.0]], eps=eps)
        dt = 2.0 * math.pi * eps / steps
        for _ in range(steps):
            ens = strang_step(ens, real, dt)
        return np.concatenate([ens.x[0], ens.v[0]])

    ref = final_state(4096)
    errs = [np.max(np.abs(final_state(s) - ref)) for s in (64, 128, 256)]
    orders = np.diff(np.log(errs)) / math.log(0.5)
    assert np.all(orders >= 1.9) and np.all(orders <= 2.2), orders


def test_push_config_floor():
    with pytest.raises(ValueError):
        PushConfig(steps_per_gyro=8).dt(0.1)
    assert abs(PushConfig(steps_per_gyro=64).dt(0.1)
               - 2.0 * math.pi * 0.1 / 64) < 1e-15


def test_simulate_deterministic(unit_spec):
    cfg = PushConfig(t_end=0.02, output_times=(0.02,))
    a = simulate_ensemble(DeltaInit(1.0), unit_spec, 0.02, 1, cfg, 50, 9, 0)
    b = simulate_ensemble(DeltaInit(1.0), unit_spec, 0.02, 1, cfg, 50, 9, 0)
    assert np.array_equal(a[0][1], b[0][1])
    c = simulate_ensemble(DeltaInit(1.0), unit_spec, 0.02, 1, cfg, 50, 9, 1)
    assert not np.array_equal(a[0][1], c[0][1])


def test_smooth_bump_init_nonnegative():
    e = SmoothBumpInit(e0=0.3, width=0.5).draw_energies(
        np.random.default_rng(0), 500)
    assert e.shape == (500,)
    assert np.all(e >= 0.0)


def test_histogram_is_density_and_counts_outliers():
    g = EnergyGrid(2.0, 16)
    samples = np.array([0.1, 0.5, 0.5, 1.9, 5.0])  # one out of range
    p, n_out = gyro_average_histogram(samples, g)
    assert n_out == 1
    assert abs(p.mass - 1.0) < 1e-12


def test_histogram_recovers_known_density(rng):
    # sample from a triangular density on [0, 2] and compare
    g = EnergyGrid(2.0, 32)
    u = rng.uniform(size=200000)
    samples = 2.0 * np.sqrt(u)  # density e/2 on [0, 2]
    p, _ = gyro_average_histogram(samples, g)
    target = g.centers / 2.0
    l1 = float(np.sum(np.abs(p.density - target)) * g.de)
    assert l1 < 0.02
