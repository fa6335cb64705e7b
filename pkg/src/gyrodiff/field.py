"""Block-renewal synthesis of the stationary random potential.

The potential is built as V(tau, x) = sum_j c(tau - j b - delta) U_j(x):
independent random-Fourier spatial fields U_j modulated by a compactly
supported window c on [0, b], shifted by a uniform random delta.  This
gives, exactly in expectation and for any mode count,

    E[V(tau, x) V(sigma, y)] = f(tau - sigma) * C(x - y),

with f the (normalized) autocorrelation of c and C the spatial covariance,
and gives *exact* independence of V(tau, .) and V(sigma, .) whenever
|tau - sigma| >= b.  A spectral-in-time synthesis would only approximate
that finite decorrelation range, which is the property the limit theorem
leans on hardest.

Each U_j is sum of M cosine modes with wave-vectors drawn from the
normalized spectral density of C and uniform phases.  The field is
non-Gaussian for small M; only second-order structure is required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from ._seeding import derive_rng
from .correlation import (CorrelationModel, GaussianBump,
                          block_induced_envelope, separable)

__all__ = ["FieldSpec", "FieldRealization", "gaussian_bump_spec",
           "synthesize", "empirical_correlation", "CorrelationEstimate"]

DEFAULT_MODE_COUNT = 64


@dataclass(frozen=True)
class FieldSpec:
    """Everything needed to draw reproducible realizations of V.

    ``correlation`` is the separable model the synthesis realizes: the
    block-induced temporal envelope times the spatial covariance.  The
    quadrature side always consumes this same model, so both sides of any
    comparison share one A.
    """

    spatial: GaussianBump
    mode_count: int = DEFAULT_MODE_COUNT
    block_length: float = 1.0
    master_seed: int = 0
    sample_wavevectors: Optional[Callable] = None
    correlation: CorrelationModel = dc_field(init=False, default=None)

    def __post_init__(self):
        if not isinstance(self.spatial, GaussianBump):
            raise ValueError(
                "field synthesis needs a samplable spectral density; "
                "only GaussianBump spatial profiles are supported "
                "(power-law profiles are not valid covariances)")
        if self.mode_count < 1:
            raise ValueError("mode_count must be >= 1")
        if self.block_length <= 0:
            raise ValueError("block_length must be positive")
        env = block_induced_envelope(self.block_length)
        object.__setattr__(self, "correlation", separable(env, self.spatial))

    def temporal_factor(self, t):
        return self.correlation.envelope(t)

    def _draw_wavevectors(self, rng, m):
        if self.sample_wavevectors is not None:
            return np.asarray(self.sample_wavevectors(rng, m), dtype=float)
        # spectral density of sigma2*exp(-r^2/(2 ell^2)) is Gaussian, std 1/ell
        return rng.normal(scale=1.0 / self.spatial.ell, size=(m, 2))


def gaussian_bump_spec(sigma2: float = 1.0, ell: float = 1.0,
                       mode_count: int = DEFAULT_MODE_COUNT,
                       block_length: float = 1.0,
                       master_seed: int = 0) -> FieldSpec:
    return FieldSpec(spatial=GaussianBump(sigma2=sigma2, ell=ell),
                     mode_count=mode_count, block_length=block_length,
                     master_seed=master_seed)


class FieldRealization:
    """One seeded sample of V; immutable after construction, safe to share.

    Mode tables are generated lazily per temporal block, each block from
    its own (master_seed, realization_index, block) stream, so evaluation
    order never changes the field.
    """

    def __init__(self, spec: FieldSpec, realization_index: int):
        self.spec = spec
        self.index = int(realization_index)
        rng = derive_rng(spec.master_seed, "field-shift", self.index)
        self.delta = float(rng.uniform(0.0, spec.block_length))
        self._blocks = {}
        self._amp = math.sqrt(2.0 * spec.spatial.sigma2 / spec.mode_count)

    def _block(self, j: int):
        tab = self._blocks.get(j)
        if tab is None:
            rng = derive_rng(self.spec.master_seed, "field-block",
                             self.index, 2 * j if j >= 0 else -2 * j - 1)
            k = self.spec._draw_wavevectors(rng, self.spec.mode_count)
            phases = rng.uniform(0.0, 2.0 * np.pi, self.spec.mode_count)
            tab = (k, phases)
            self._blocks[j] = tab
        return tab

    def _window(self, u):
        # c(u) = sqrt(8/3) * sin^2(pi u / b); with the uniform shift this
        # induces a temporal factor with f(0) = 1 for any block length
        b = self.spec.block_length
        return math.sqrt(8.0 / 3.0) * np.sin(np.pi * u / b) ** 2

    def _split_blocks(self, tau, x):
        b = self.spec.block_length
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = np.broadcast_to(x, (tau.size, 2))
        elif tau.size == 1 and x.shape[0] != 1:
            tau = np.broadcast_to(tau, (x.shape[0],))
        j = np.floor((tau - self.delta) / b).astype(int)
        u = tau - j * b - self.delta
        return j, u, x

    def potential(self, tau, x):
        """V(tau, x); tau scalar or (P,), x 2-vector or (P, 2)."""
        j, u, x = self._split_blocks(tau, x)
        out = np.zeros(j.shape)
        for jv in np.unique(j):
            sel = j == jv
            k, phases = self._block(int(jv))
            phase = x[sel] @ k.T + phases[None, :]
            out[sel] = (self._window(u[sel]) * self._amp
                        * np.sum(np.cos(phase), axis=1))
        return out if out.size > 1 else float(out[0])

    def gradient(self, tau, x):
        """Analytic gradient of V in its spatial argument; shape (P, 2)."""
        j, u, x = self._split_blocks(tau, x)
        out = np.zeros_like(x)
        for jv in np.unique(j):
            sel = j == jv
            k, phases = self._block(int(jv))
            phase = x[sel] @ k.T + phases[None, :]
            out[sel] = (-self._window(u[sel])[:, None] * self._amp
                        * (np.sin(phase) @ k))
        return out


def synthesize(spec: FieldSpec, realization_index: int) -> FieldRealization:
    return FieldRealization(spec, realization_index)


@dataclass(frozen=True)
class CorrelationEstimate:
    tau: float
    x: tuple
    target: float
    estimate: float
    stderr: float


def empirical_correlation(spec: FieldSpec, lags, n_realizations: int = 200,
                          points_per_realization: int = 64,
                          seed_tag: str = "corr-check"):
    """Monte Carlo check that the synthesis reproduces f(tau) C(x).

    For each lag (tau, x) the product V(tau0+tau, x0+x) V(tau0, x0) is
    averaged over random base points and independent realizations.  Lags
    with |tau| >= block_length must come out statistically zero.
    """
    if n_realizations < 100:
        raise ValueError("n_realizations must be >= 100")
    lags = [(float(t), np.asarray(x, dtype=float)) for t, x in lags]
    sums = np.zeros(len(lags))
    sq = np.zeros(len(lags))
    for i in range(n_realizations):
        real = synthesize(spec, i)
        rng = derive_rng(spec.master_seed, seed_tag, i)
        tau0 = rng.uniform(0.0, 10.0 * spec.block_length,
                           points_per_realization)
        x0 = rng.uniform(-5.0, 5.0, (points_per_realization, 2))
        for idx, (t, x) in enumerate(lags):
            prod = (real.potential(tau0 + t, x0 + x[None, :])
                    * real.potential(tau0, x0))
            m = float(np.mean(prod))
            sums[idx] += m
            sq[idx] += m * m
    mean = sums / n_realizations
    var = np.maximum(sq / n_realizations - mean**2, 0.0)
    stderr = np.sqrt(var / n_realizations)
    out = []
    for idx, (t, x) in enumerate(lags):
        target = float(spec.temporal_factor(t)
                       * spec.spatial(np.linalg.norm(x)))
        out.append(CorrelationEstimate(tau=t, x=tuple(x), target=target,
                                       estimate=float(mean[idx]),
                                       stderr=float(stderr[idx])))
    return out
