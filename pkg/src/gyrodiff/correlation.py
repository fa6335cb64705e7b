"""Space-time correlation models for the turbulent potential.

A correlation model represents the two-point function A(t, x) of a
statistically homogeneous potential: E[V(t0+t, x0+x) V(t0, x0)] = A(t, x)
with t a time lag and x a 2-vector spatial lag.  The model carries the
structural facts downstream computations lean on: evenness in t and x,
compact temporal support, and vanishing first derivatives at the origin.

The separable family A(t, x) = f(t) g(|x|) covers both the closed-form
power-law ("Richardson-like") case and the Gaussian-bump case used for
field synthesis.  Arbitrary callables are accepted through the General
kind, in which case the angular average is done by trapezoid quadrature
over the rotation angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "TemporalEnvelope",
    "PowerLaw",
    "GaussianBump",
    "CustomRadial",
    "CorrelationModel",
    "ValidationCheck",
    "ValidationReport",
    "raised_cosine_envelope",
    "block_induced_envelope",
    "window_autocorrelation_envelope",
    "separable",
    "general",
    "angular_average",
    "d2tt_tilde",
    "validate",
]


# ---------------------------------------------------------------------------
# temporal envelopes


@dataclass(frozen=True)
class TemporalEnvelope:
    """Even, compactly supported temporal factor f(t) with f'(0) = 0.

    ``d2`` is the analytic second derivative when available; finite
    differences with one Richardson level are used otherwise.
    """

    f: Callable[[np.ndarray], np.ndarray]
    support: float
    d2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: Optional[float] = None

    def __post_init__(self):
        if self.support <= 0:
            raise ValueError("envelope support must be positive")

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.d2 is not None:
            return self.d2(t)
        h = self.fd_step if self.fd_step is not None else 1e-4 * self.support
        return _fd2_richardson(self.f, t, h)


def _fd2_richardson(func, t, h):
    """Central second difference with one Richardson extrapolation level."""
    d_h = (func(t + h) - 2.0 * func(t) + func(t - h)) / h**2
    h2 = 0.5 * h
    d_h2 = (func(t + h2) - 2.0 * func(t) + func(t - h2)) / h2**2
    return (4.0 * d_h2 - d_h) / 3.0


def raised_cosine_envelope(power: int = 2, support: float = 1.0,
                           amplitude: float = 1.0) -> TemporalEnvelope:
    """f(t) = amplitude * cos^{2p}(pi t / (2 T)) on |t| <= T, zero outside.

    Smooth inside the support, f'(0) = 0, vanishes to order 2p at the
    boundary.  p = 2 with T = 2*pi*n reproduces the classical quartic
    cosine example cos^4(t/(4n)).
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    p, T, a = int(power), float(support), float(amplitude)
    w = math.pi / (2.0 * T)

    def f(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) < T
        c = np.cos(w * t)
        return np.where(inside, a * c ** (2 * p), 0.0)

    def d2(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) < T
        c, s = np.cos(w * t), np.sin(w * t)
        val = 2 * p * w**2 * c ** (2 * p - 2) * ((2 * p - 1) * s**2 - c**2)
        return np.where(inside, a * val, 0.0)

    return TemporalEnvelope(f=f, support=T, d2=d2)


def block_induced_envelope(block_length: float = 1.0,
                           amplitude: float = 1.0) -> TemporalEnvelope:
    """Autocorrelation of the block window c(u) ~ sin^2(pi u / b) on [0, b].

    This is the temporal factor the block-renewal synthesizer realizes
    exactly, normalized so f(0) = amplitude.  Closed form on |t| <= b:

        f(t) = a * (2/3) [ (1-u)(1 + cos(2 pi u)/2) + 3 sin(2 pi u)/(4 pi) ]

    with u = |t|/b.
    """
    b, a = float(block_length), float(amplitude)
    if b <= 0:
        raise ValueError("block_length must be positive")

    def f(t):
        u = np.abs(np.asarray(t, dtype=float)) / b
        inside = u < 1.0
        uc = np.where(inside, u, 0.0)
        val = (2.0 / 3.0) * ((1.0 - uc) * (1.0 + 0.5 * np.cos(2 * np.pi * uc))
                             + 3.0 / (4.0 * np.pi) * np.sin(2 * np.pi * uc))
        return np.where(inside, a * val, 0.0)

    def d2(t):
        u = np.abs(np.asarray(t, dtype=float)) / b
        inside = u < 1.0
        uc = np.where(inside, u, 0.0)
        val = (2.0 / 3.0) * (-np.pi * np.sin(2 * np.pi * uc)
                             - 2 * np.pi**2 * (1.0 - uc) * np.cos(2 * np.pi * uc))
        return np.where(inside, a * val / b**2, 0.0)

    return TemporalEnvelope(f=f, support=b, d2=d2)


def window_autocorrelation_envelope(c: Callable, support: float,
                                    c1: Optional[Callable] = None,
                                    c2: Optional[Callable] = None,
                                    amplitude: float = 1.0,
                                    gl_order: int = 96) -> TemporalEnvelope:
    """Envelope f(t) proportional to the autocorrelation of a window c.

    c lives on [0, support] (zero outside, c(0) = c(support) = 0).  Any
    such autocorrelation is a positive-definite function with compact
    support [-support, support], even, with f'(0) = 0 -- i.e. a certified
    admissible temporal factor.  f is normalized so f(0) = amplitude.

    If the window derivatives c1, c2 are supplied the second derivative of
    f is assembled analytically:

        rho''(tau) = -c(T - tau) c'(T) + int_0^{T-tau} c(u) c''(u+tau) du.

    Integrals use a fixed Gauss-Legendre rule (smooth integrands).
    """
    T = float(support)
    nodes, weights = np.polynomial.legendre.leggauss(gl_order)

    def _acf(tau):
        tau = np.abs(np.atleast_1d(np.asarray(tau, dtype=float)))
        out = np.zeros_like(tau)
        inside = tau < T
        for i in np.flatnonzero(inside):
            half = 0.5 * (T - tau[i])
            u = half * (nodes + 1.0)
            out[i] = half * np.dot(weights, c(u) * c(u + tau[i]))
        return out

    rho0 = float(_acf(0.0)[0])
    if rho0 <= 0:
        raise ValueError("window has no energy")
    scale = amplitude / rho0

    def f(t):
        t = np.asarray(t, dtype=float)
        return (scale * _acf(t)).reshape(t.shape)

    d2 = None
    if c1 is not None and c2 is not None:
        cp_T = float(c1(np.array([T]))[0] if np.ndim(c1(T)) else c1(T))

        def d2(t):
            t = np.asarray(t, dtype=float)
            tau = np.abs(np.atleast_1d(t))
            out = np.zeros_like(tau)
            inside = tau < T
            for i in np.flatnonzero(inside):
                half = 0.5 * (T - tau[i])
                u = half * (nodes + 1.0)
                integral = half * np.dot(weights, c(u) * c2(u + tau[i]))
                out[i] = -float(c(T - tau[i])) * cp_T + integral
            return (scale * out).reshape(t.shape)

    return TemporalEnvelope(f=f, support=T, d2=d2)


# ---------------------------------------------------------------------------
# spatial profiles (all radially symmetric by construction)


@dataclass(frozen=True)
class PowerLaw:
    """g(r) = r^alpha.  Not a valid covariance globally; admitted for
    quadrature and closed-form work only.  The field synthesizer rejects it.
    """

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError("PowerLaw alpha must lie in (0, 2]")

    def __call__(self, r):
        return np.asarray(r, dtype=float) ** self.alpha


@dataclass(frozen=True)
class GaussianBump:
    """g(r) = sigma2 * exp(-r^2 / (2 ell^2))."""

    sigma2: float = 1.0
    ell: float = 1.0

    def __post_init__(self):
        if self.sigma2 < 0 or self.ell <= 0:
            raise ValueError("need sigma2 >= 0 and ell > 0")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.sigma2 * np.exp(-0.5 * (r / self.ell) ** 2)


@dataclass(frozen=True)
class CustomRadial:
    """g(r) given by an arbitrary radial callable."""

    g: Callable[[np.ndarray], np.ndarray]

    def __call__(self, r):
        return self.g(np.asarray(r, dtype=float))


# ---------------------------------------------------------------------------
# the model itself


@dataclass(frozen=True)
class CorrelationModel:
    """Correlation A(t, x); ``separable`` / ``general`` build instances.

    t_support is the smallest T with A(t, .) = 0 for |t| >= T.  Downstream
    truncations (the s-integral of the diffusion coefficient, the work
    integral window padding) are computed from it, never hard-coded.
    """

    t_support: float
    envelope: Optional[TemporalEnvelope] = None
    spatial: Optional[Callable] = None
    A: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    d2tt: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    fd_step: Optional[float] = field(default=None)

    def __post_init__(self):
        if self.t_support <= 0:
            raise ValueError("t_support must be positive")
        if self.is_separable:
            if self.spatial is None:
                raise ValueError("separable model needs a spatial profile")
        elif self.A is None:
            raise ValueError("general model needs a callable A(t, x)")
        step = self.fd_step
        if step is None:
            object.__setattr__(self, "fd_step", 1e-4 * self.t_support)
        elif step <= 0:
            raise ValueError("fd_step must be positive")

    @property
    def is_separable(self) -> bool:
        return self.envelope is not None

    def evaluate(self, t, x):
        """A(t, x) with x a 2-vector (or (..., 2) array)."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.is_separable:
            r = np.linalg.norm(x, axis=-1)
            return self.envelope(t) * self.spatial(r)
        return self.A(t, x)


def separable(envelope: TemporalEnvelope, spatial,
              t_support: Optional[float] = None) -> CorrelationModel:
    if t_support is None:
        t_support = envelope.support
    return CorrelationModel(t_support=t_support, envelope=envelope,
                            spatial=spatial)


def general(A: Callable, t_support: float, d2tt: Optional[Callable] = None,
            fd_step: Optional[float] = None) -> CorrelationModel:
    return CorrelationModel(t_support=t_support, A=A, d2tt=d2tt,
                            fd_step=fd_step)


# ---------------------------------------------------------------------------
# operations


def _rotated_points(r, n_theta):
    theta = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    return r * np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def angular_average(model: CorrelationModel, t, r, n_theta: int = 64):
    """Average of A(t, R_theta (r, 0)) over the rotation angle theta.

    For separable (hence radial) models this is exactly A(t, (r, 0)).
    Otherwise a trapezoid rule on the periodic interval [0, 2 pi) is used,
    which is spectrally accurate for smooth A.
    """
    if n_theta < 4:
        raise ValueError("n_theta must be >= 4")
    if np.any(np.asarray(r) < 0):
        raise ValueError("radius must be >= 0")
    t = np.asarray(t, dtype=float)
    if model.is_separable:
        return model.envelope(t) * model.spatial(np.asarray(r, dtype=float))
    pts = _rotated_points(np.asarray(r, dtype=float)[..., None, None], n_theta)
    vals = model.A(t[..., None], pts)
    return np.mean(vals, axis=-1)


def d2tt_tilde(model: CorrelationModel, t, r, n_theta: int = 64):
    """Second time derivative of the angular average, d2/dt2 Atilde(t, r).

    Analytic when the model provides one; otherwise a central finite
    difference with one Richardson extrapolation level, step model.fd_step.
    """
    t = np.asarray(t, dtype=float)
    if model.is_separable:
        return (model.envelope.second_derivative(t)
                * model.spatial(np.asarray(r, dtype=float)))
    if model.d2tt is not None:
        pts = _rotated_points(np.asarray(r, dtype=float)[..., None, None],
                              n_theta)
        return np.mean(model.d2tt(t[..., None], pts), axis=-1)
    return _fd2_richardson(lambda tt: angular_average(model, tt, r, n_theta),
                           t, model.fd_step)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    residual: float
    tolerance: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> ValidationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(model: CorrelationModel, sample_count: int = 256,
             rng_seed: int = 0) -> ValidationReport:
    """Check the structural invariants at randomized sample points.

    Checks: evenness in t, evenness in x, compact temporal support,
    vanishing time derivative and spatial gradient at the origin.
    Failures are reported, never raised.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(rng_seed)
    T = model.t_support
    t = rng.uniform(-T, T, sample_count)
    x = rng.normal(scale=1.0, size=(sample_count, 2))

    scale = max(abs(float(model.evaluate(0.0, np.zeros(2)))), 1.0)
    tol = 1e-12 * scale

    res_t = float(np.max(np.abs(model.evaluate(t, x) - model.evaluate(-t, x))))
    res_x = float(np.max(np.abs(model.evaluate(t, x) - model.evaluate(t, -x))))

    t_out = np.concatenate([rng.uniform(T, 3 * T, sample_count),
                            -rng.uniform(T, 3 * T, sample_count)])
    x_out = rng.normal(scale=1.0, size=(2 * sample_count, 2))
    res_supp = float(np.max(np.abs(model.evaluate(t_out, x_out))))

    # derivative checks at the origin by central differences
    h = model.fd_step
    origin = np.zeros(2)
    dA_dt = (float(model.evaluate(h, origin)) - float(model.evaluate(-h, origin))) / (2 * h)
    e1, e2 = np.array([h, 0.0]), np.array([0.0, h])
    gx = (float(model.evaluate(0.0, e1)) - float(model.evaluate(0.0, -e1))) / (2 * h)
    gy = (float(model.evaluate(0.0, e2)) - float(model.evaluate(0.0, -e2))) / (2 * h)
    res_grad = max(abs(gx), abs(gy))
    # FD derivative residual tolerance: O(h^2) truncation on an O(scale) function
    dtol = 10.0 * scale * h

    checks = (
        ValidationCheck("evenness_in_time", res_t <= tol, res_t, tol),
        ValidationCheck("evenness_in_space", res_x <= tol, res_x, tol),
        ValidationCheck("compact_temporal_support", res_supp == 0.0, res_supp, 0.0),
        ValidationCheck("dt_at_origin", abs(dA_dt) <= dtol, abs(dA_dt), dtol),
        ValidationCheck("grad_at_origin", res_grad <= dtol, res_grad, dtol),
    )
    return ValidationReport(checks=checks)
