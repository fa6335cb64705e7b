import math

import numpy as np
import pytest

from gyrodiff.correlation import (GaussianBump, PowerLaw,
                                  raised_cosine_envelope, separable)
from gyrodiff.dcoeff import (DiffusionCoefficientTable, QuadratureOptions,
                             coefficient_profile, diffusion_coefficient,
                             mc_work_oracle, richardson_coefficient,
                             scaling_exponent)
from gyrodiff.field import gaussian_bump_spec


@pytest.fixture(scope="module")
def bump_model():
    return gaussian_bump_spec().correlation


def test_quadrature_methods_agree(bump_model):
    opts_gl = QuadratureOptions(method="gauss-legendre", panels=96, order=12)
    a_as = diffusion_coefficient(bump_model, 1.0)
    a_gl = diffusion_coefficient(bump_model, 1.0, opts=opts_gl)
    assert abs(a_as - a_gl) < 1e-8 * abs(a_as)


def test_coefficient_at_zero_energy(bump_model):
    # radius argument collapses to 0: a(0) = -f''-integral * C(0) prefactor
    a0 = diffusion_coefficient(bump_model, 0.0)
    assert a0 > 0.0


def test_truncation_is_exact(bump_model):
    # extending the s-range beyond 2 pi n t_support changes nothing
    base = diffusion_coefficient(bump_model, 1.0)
    ext = diffusion_coefficient(
        bump_model, 1.0,
        opts=QuadratureOptions(s_max_override=4.0 * math.pi
                               * bump_model.t_support))
    assert abs(base - ext) < 1e-12 * abs(base)


def test_closed_form_matches_quadrature_single_case():
    alpha, n = 4.0 / 3.0, 1
    env = raised_cosine_envelope(power=2, support=2.0 * math.pi * n)
    model = separable(env, PowerLaw(alpha=alpha))
    K = richardson_coefficient(env, alpha, n=n)
    for e in (0.5, 2.0):
        a = diffusion_coefficient(model, e, n=n)
        assert abs(a - K * e ** (alpha / 2)) < 1e-8 * abs(a)


def test_invalid_arguments(bump_model):
    with pytest.raises(ValueError):
        diffusion_coefficient(bump_model, -1.0)
    with pytest.raises(ValueError):
        diffusion_coefficient(bump_model, 1.0, n=0)
    with pytest.raises(ValueError):
        richardson_coefficient(raised_cosine_envelope(), alpha=3.0)
    with pytest.raises(ValueError):
        QuadratureOptions(method="trapezoid")


def test_scaling_exponent_values():
    assert abs(scaling_exponent(4.0 / 3.0) - 0.75) < 1e-15
    assert abs(scaling_exponent(1.0) - 2.0 / 3.0) < 1e-15
    assert abs(scaling_exponent(2.0) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        scaling_exponent(4.0)


def test_table_validation():
    with pytest.raises(ValueError):
        DiffusionCoefficientTable(e_values=np.array([0.0, 1.0]),
                                  a_values=np.array([1.0]), method="x", n=1)
    with pytest.raises(ValueError):
        DiffusionCoefficientTable(e_values=np.array([1.0, 0.5]),
                                  a_values=np.array([1.0, 1.0]),
                                  method="x", n=1)
    with pytest.raises(ValueError):
        DiffusionCoefficientTable(e_values=np.array([0.0, 1.0]),
                                  a_values=np.array([1.0, -0.5]),
                                  method="x", n=1)


def test_coefficient_profile_monotone_grid(bump_model):
    tab = coefficient_profile(bump_model, np.linspace(0.0, 4.0, 9))
    assert tab.e_values.size == 9
    assert np.all(tab.a_values >= 0.0)
    with pytest.raises(ValueError):
        coefficient_profile(bump_model, np.array([1.0, 1.0, 2.0]))


def test_mc_oracle_zero_energy(unit_spec):
    assert mc_work_oracle(unit_spec, 0.0) == (0.0, 0.0)


def test_mc_oracle_smoke(unit_spec, bump_model):
    # cheap statistical check; the tight 3-sigma criterion lives in the
    # acceptance suite
    est, se = mc_work_oracle(unit_spec, 1.0, N=4, n_samples=200, seed=3)
    truth = diffusion_coefficient(bump_model, 1.0)
    assert se > 0
    assert abs(est - truth) < 4.0 * se


def test_mc_oracle_argument_floors(unit_spec):
    with pytest.raises(ValueError):
        mc_work_oracle(unit_spec, 1.0, N=1)
    with pytest.raises(ValueError):
        mc_work_oracle(unit_spec, 1.0, n_samples=5)
    with pytest.raises(ValueError):
        mc_work_oracle(unit_spec, -1.0)
