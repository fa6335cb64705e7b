"""Acceptance suite: one test per headline criterion, stated tolerances.

Each test is self-contained and ends in a single assert carrying the
pass/fail statement.  The heavier statistical criteria (4, 7, 8) use
fixed seeds, so they are deterministic; their tolerances are the
criterion's own (3 stderr, 10% relative, strict monotone decrease beyond
stderr, absolute caps), not tuned to the draw.
"""

import math

import numpy as np
import pytest

from gyrodiff.correlation import (GaussianBump, PowerLaw,
                                  raised_cosine_envelope, separable,
                                  window_autocorrelation_envelope)
from gyrodiff.dcoeff import (DiffusionCoefficientTable, diffusion_coefficient,
                             mc_work_oracle, richardson_coefficient)
from gyrodiff.field import empirical_correlation, gaussian_bump_spec, \
    synthesize
from gyrodiff.harness import ExperimentConfig, run_convergence_study
from gyrodiff.kinetics import DeltaInit, ParticleEnsemble, PushConfig, \
    free_flow, strang_step
from gyrodiff.she import (EnergyGrid, EnergyProfile, SheState,
                          gaussian_profile, self_similar_fit, solve,
                          step_implicit)


def test_1_closed_form_reproduction():
    # quadrature of the defining integral vs K e^{alpha/2}, rel err <= 1e-6
    worst = 0.0
    for n in (1, 2):
        env = raised_cosine_envelope(power=2, support=2.0 * math.pi * n)
        for alpha in (1.0, 4.0 / 3.0, 2.0):
            model = separable(env, PowerLaw(alpha=alpha))
            K = richardson_coefficient(env, alpha, n=n)
            for e in (0.25, 1.0, 4.0):
                a = diffusion_coefficient(model, e, n=n)
                rel = abs(a - K * e ** (alpha / 2)) / abs(a)
                worst = max(worst, rel)
    assert worst <= 1e-6, \
        f"closed-form reproduction: worst relative error {worst:.2e} > 1e-6"


def test_2_anomalous_scaling_exponent():
    # solver with a = e^{alpha/2} must recover beta = 2/(4-alpha) within 5%
    for alpha, beta_true in ((4.0 / 3.0, 0.75), (1.0, 2.0 / 3.0)):
        grid = EnergyGrid(60.0, 600)
        e = np.linspace(0.0, 60.0, 601)
        tab = DiffusionCoefficientTable(e_values=e,
                                        a_values=e ** (alpha / 2.0),
                                        method="analytic", n=1)
        sol = solve(gaussian_profile(grid, 0.0), tab, 10.0, 0.005,
                    output_times=list(np.linspace(1.0, 10.0, 10)))
        beta_hat, _ = self_similar_fit(sol, (1.0, 10.0))
        rel = abs(beta_hat - beta_true) / beta_true
        assert rel <= 0.05, \
            f"alpha={alpha}: beta_hat={beta_hat:.4f} deviates " \
            f"{rel:.1%} from {beta_true:.4f} (cap 5%)"


def _random_admissible_model(rng):
    # envelope = autocorrelation of a random 4-mode sine window (always a
    # positive-definite temporal factor), spatial factor a Gaussian bump
    T = rng.uniform(0.5, 3.0)
    b = rng.normal(size=4)

    def series(u, deriv):
        u = np.asarray(u, dtype=float)
        acc = np.zeros_like(u)
        for m, bm in enumerate(b, start=1):
            w = m * np.pi / T
            if deriv == 0:
                acc += bm * np.sin(w * u)
            elif deriv == 1:
                acc += bm * w * np.cos(w * u)
            else:
                acc -= bm * w**2 * np.sin(w * u)
        return acc

    env = window_autocorrelation_envelope(
        lambda u: series(u, 0), T, lambda u: series(u, 1),
        lambda u: series(u, 2))
    spatial = GaussianBump(sigma2=rng.uniform(0.2, 3.0),
                           ell=rng.uniform(0.3, 2.0))
    return separable(env, spatial)


def test_3_positivity_over_randomized_admissible_family():
    # 200 random admissible separable correlations: a(e) >= -1e-10 |a(1)|
    rng = np.random.default_rng(2024)
    for i in range(200):
        model = _random_admissible_model(rng)
        a1 = diffusion_coefficient(model, 1.0)
        floor = -1e-10 * abs(a1)
        for e in (0.25, 1.0, 4.0):
            a = a1 if e == 1.0 else diffusion_coefficient(model, e)
            assert a >= floor, \
                f"positivity violated: model {i}, a({e}) = {a:.3e} " \
                f"< {floor:.3e}"


def test_4_mc_oracle_cross_validation():
    # work-integral oracle vs quadrature: <= 3 stderr and <= 10% relative
    spec = gaussian_bump_spec(master_seed=77)
    for e in (0.5, 1.0, 2.0):
        truth = diffusion_coefficient(spec.correlation, e)
        est, se = mc_work_oracle(spec, e, N=8, n_samples=1200, seed=1)
        z = abs(est - truth) / se
        rel = abs(est - truth) / truth
        assert z <= 3.0 and rel <= 0.10, \
            f"MC oracle at e={e}: z={z:.2f} (cap 3), rel={rel:.1%} (cap 10%)"
    # window-drift check: the product estimator is bias-free in N, so
    # estimates at N in {4, 8, 16} must agree within statistical scatter
    # (2x the combined stderr of each pair)
    ests = {N: mc_work_oracle(spec, 1.0, N=N, n_samples=1000, seed=2)
            for N in (4, 8, 16)}
    for i in (4, 8):
        for j in (8, 16):
            if i >= j:
                continue
            drift = abs(ests[i][0] - ests[j][0])
            budget = 2.0 * math.hypot(ests[i][1], ests[j][1])
            assert drift <= budget, \
                f"window drift N={i}->N={j}: {drift:.4f} > {budget:.4f}"


def test_5_exact_gyro_flow():
    eps = 0.04
    ens = ParticleEnsemble(x=[[0.3, 0.6]], v=[[0.9, -0.4]], eps=eps)
    e0 = float(ens.energies[0])
    state = ens
    dt = 2.0 * math.pi * eps / 64
    for _ in range(10**4):
        state = strang_step(state, None, dt)
    drift = abs(float(state.energies[0]) - e0) / e0
    assert drift <= 1e-12, f"field-free energy drift {drift:.2e} > 1e-12"

    xp, vp = free_flow(np.array([0.3, 0.6]), np.array([0.9, -0.4]),
                       2.0 * math.pi * eps, eps)
    err = max(np.max(np.abs(xp - [0.3, 0.6])), np.max(np.abs(vp - [0.9, -0.4])))
    assert err <= 1e-12, f"gyro-period return error {err:.2e} > 1e-12"

    # closed form vs fine RK4 reference for dx/dt = v, dv/dt = vperp/eps
    y = np.array([0.0, 0.0, 1.0, 0.3])
    t_end = 0.21

    def rhs(y):
        return np.array([y[2], y[3], -y[3] / eps, y[2] / eps])

    m = 40000
    h = t_end / m
    for _ in range(m):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    xp, vp = free_flow(np.zeros(2), np.array([1.0, 0.3]), t_end, eps)
    err = np.max(np.abs(np.concatenate([xp, vp]) - y))
    assert err <= 1e-9, f"closed form vs RK4 reference: {err:.2e} > 1e-9"


def test_6_solver_invariants():
    # mass conservation over 10^4 implicit steps + image-method reference
    a, t_end, e0 = 0.4, 0.1, 3.0
    grid = EnergyGrid(6.0, 256)
    init = gaussian_profile(grid, e0, width=0.15)
    tab = DiffusionCoefficientTable(e_values=np.array([0.0, 6.0]),
                                    a_values=np.array([a, a]),
                                    method="analytic", n=1)
    (t, out), = solve(init, tab, t_end, 1e-5)  # 10^4 steps
    mass_err = abs(out.mass - init.mass) / init.mass
    assert mass_err <= 1e-12, f"mass drift {mass_err:.2e} > 1e-12"

    var = 0.15**2 + 2.0 * a * t_end
    e = grid.centers
    exact = np.zeros_like(e)
    for img in range(-4, 5):
        for c in (e0 + 12.0 * img, -e0 + 12.0 * img):
            exact += np.exp(-0.5 * (e - c) ** 2 / var)
    exact /= np.sum(exact) * grid.de
    l1 = float(np.sum(np.abs(out.density - exact)) * grid.de)
    assert l1 <= 1e-3, f"image-method reference: L1 = {l1:.2e} > 1e-3"

    # non-negativity and discrete maximum principle, 100 randomized cases
    rng = np.random.default_rng(17)
    g = EnergyGrid(3.0, 32)
    for _ in range(100):
        a_faces = rng.uniform(0.0, 3.0, g.n_cells + 1)
        density = rng.uniform(0.0, 5.0, g.n_cells)
        new = step_implicit(SheState(EnergyProfile(g, density), 0.0, a_faces),
                            rng.uniform(0.01, 1.0))
        d = new.profile.density
        assert np.all(d >= 0.0), "non-negativity violated"
        assert d.max() <= density.max() + 1e-12 \
            and d.min() >= density.min() - 1e-12, \
            "discrete maximum principle violated"


def test_7_limit_theorem_signature():
    # headline run: eps in {0.1, 0.05, 0.025}, 2e3 particles x 50
    # realizations; L1 to the limit solution strictly decreasing beyond
    # stderr, and <= 0.1 at eps = 0.025
    cfg = ExperimentConfig(
        epsilons=(0.1, 0.05, 0.025),
        field_spec=gaussian_bump_spec(master_seed=7),
        init=DeltaInit(1.0),
        n_particles=2000,
        n_realizations=50,
        grid=EnergyGrid(6.0, 48),
        t_end=1.0,
        output_times=(0.25, 0.5, 0.75, 1.0),
        steps_per_gyro=64,
        she_dt=1e-3,
        master_seed=7,
    )
    report = run_convergence_study(cfg)
    rows = report.rows
    msg = "; ".join(f"eps={r.eps}: L1={r.l1:.4f} (se {r.stderr_l1:.4f})"
                    for r in rows)
    for lo, hi in zip(rows[1:], rows[:-1]):
        assert hi.l1 - lo.l1 > max(hi.stderr_l1, lo.stderr_l1), \
            f"L1 not strictly decreasing beyond stderr: {msg}"
    assert report.monotone, f"monotonicity verdict false: {msg}"
    assert rows[-1].l1 <= 0.1, \
        f"final L1 {rows[-1].l1:.4f} > 0.1 at eps=0.025 ({msg})"


def test_8_field_synthesis_hypotheses():
    spec = gaussian_bump_spec(master_seed=2024)

    # mean zero within 4 stderr
    pts = np.random.default_rng(1).uniform(-3, 3, (64, 2))
    taus = np.random.default_rng(2).uniform(0, 8, 64)
    means = np.array([np.mean(synthesize(spec, i).potential(taus, pts))
                      for i in range(300)])
    m, se = means.mean(), means.std(ddof=1) / math.sqrt(means.size)
    assert abs(m) <= 4.0 * se, f"mean V = {m:.4f} exceeds 4 stderr ({se:.4f})"

    # empirical correlation on a 5x5 lag grid within 3 stderr of the target,
    # including exact decorrelation at |tau| >= block_length
    lags = [(t, (x, 0.0)) for t in np.linspace(0.0, 1.25, 5)
            for x in np.linspace(0.0, 2.0, 5)]
    out = empirical_correlation(spec, lags, n_realizations=300)
    for r in out:
        z = abs(r.estimate - r.target) / max(r.stderr, 1e-300)
        assert z <= 3.0, \
            f"correlation at lag ({r.tau}, {r.x}): z = {z:.2f} > 3"
        if r.tau >= spec.block_length:
            assert r.target == 0.0
            assert abs(r.estimate) <= 3.0 * r.stderr, \
                f"decorrelation at tau={r.tau}: estimate {r.estimate:.4f} " \
                f"not within 3 stderr of zero"
