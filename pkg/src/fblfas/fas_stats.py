"""Analytic distribution of the selected-port gain max_k |g_k|^2.

Under the block model the N ports split into B independent groups. Within a
group every port gain shares one latent exponential draw u with weight mu^2,
and conditioned on u the per-port gains are i.i.d. scaled noncentral
chi-square with 2 degrees of freedom and noncentrality 2 mu^2 u / (1 - mu^2).
The maximum over a group of size L therefore has the conditional CDF
F2(x; lam(u))^L, and integrating the latent draw out with its e^(-u) weight
gives one Gauss-Laguerre sum per group:

    G_L(x) = sum_i w_i F2(x; lam(u_i))^L,    lam(u) = 2 mu^2 u / (1 - mu^2).

The full CDF is the product of the group factors, and the density
differentiates that product term by term. Everything is evaluated on the
chi-square abscissa x = 2t / (sigma^2 (1 - mu^2)); the same factor is the
Jacobian that rescales densities back to the gain variable t.

The noncentral chi-square values at all quadrature nodes come from one
shared Ncx2Family, so a sweep over t costs two matrix-vector products per
point instead of a fresh Marcum evaluation per node.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NumericError
from .quadrature import QuadratureRule, gauss_laguerre, integrate_adaptive, integrate_exp_weight
from .specfun import Ncx2Family, ncx2_cdf
from .channel import BlockModel


@dataclass(frozen=True)
class GainDistribution:
    """Distribution of the selected-port gain for one block model.

    Immutable and safe to share across threads; the per-node chi-square
    family is built lazily on first evaluation and then reused, so sweeps
    over t should go through a single instance.

    The reference scale is channel_variance = 2: evaluations at a general
    sigma^2 map the argument through t' = 2 t / sigma^2 (and densities pick
    up the matching 2 / sigma^2 factor).
    """

    model: BlockModel
    channel_variance: float = 2.0
    rule: QuadratureRule = field(default_factory=lambda: gauss_laguerre(32))

    def __post_init__(self):
        if not (self.channel_variance > 0.0 and math.isfinite(self.channel_variance)):
            raise ValueError("channel_variance must be positive and finite")
        if not isinstance(self.rule, QuadratureRule):
            raise ValueError("rule must be a QuadratureRule")

    @cached_property
    def _xscale(self) -> float:
        # d(chi-square abscissa)/dt, also used as the density Jacobian.
        return 2.0 / (self.channel_variance * (1.0 - self.model.mu2))

    @cached_property
    def _family(self) -> Ncx2Family:
        mu2 = self.model.mu2
        lams = 2.0 * mu2 / (1.0 - mu2) * self.rule.nodes
        return Ncx2Family(lams)

    @cached_property
    def _size_counts(self) -> tuple:
        # Distinct block sizes with multiplicities; each distinct size needs
        # its quadrature sums only once per abscissa.
        return tuple(sorted(Counter(self.model.block_sizes).items()))


def _checked_t(t, allow_zero: bool):
    t = float(t)
    if math.isnan(t) or t < 0.0 or (t == 0.0 and not allow_zero):
        kind = "t >= 0" if allow_zero else "t > 0"
        raise ValueError(f"gain argument must satisfy {kind}")
    return t


def cdf_gfas(dist: GainDistribution, t) -> float:
    """P(max-port gain <= t) under the block model."""
    t = _checked_t(t, allow_zero=True)
    if t == 0.0:
        return 0.0
    if math.isinf(t):
        return 1.0
    cdfs, _ = dist._family.tails(t * dist._xscale)
    w = dist.rule.weights
    out = 1.0
    for size, count in dist._size_counts:
        factor = min(float(np.dot(w, cdfs ** size)), 1.0)
        out *= factor ** count
    return min(max(out, 0.0), 1.0)


def pdf_gfas(dist: GainDistribution, t) -> float:
    """Density of the max-port gain at t > 0 (the support is open at 0)."""
    t = _checked_t(t, allow_zero=False)
    if math.isinf(t):
        raise ValueError("gain argument must be finite")
    x = t * dist._xscale
    cdfs, _ = dist._family.tails(x)
    dens = dist._family.pdf(x)
    w = dist.rule.weights

    sizes = dist._size_counts
    G = []
    D = []
    for size, _count in sizes:
        powm1 = cdfs ** (size - 1)
        G.append(min(float(np.dot(w, powm1 * cdfs)), 1.0))
        D.append(size * float(np.dot(w, powm1 * dens)))

    total = 0.0
    for i, (_size, count) in enumerate(sizes):
        term = count * D[i] * G[i] ** (count - 1)
        for j, (_s, cj) in enumerate(sizes):
            if j != i:
                term *= G[j] ** cj
        total += term
    return max(total * dist._xscale, 0.0)


def quantile(dist: GainDistribution, p) -> float:
    """Smallest t with cdf_gfas(dist, t) >= p, by bracketed bisection."""
    p = float(p)
    if math.isnan(p) or p < 0.0 or p >= 1.0:
        raise ValueError("quantile requires 0 <= p < 1")
    if p == 0.0:
        return 0.0
    hi = max(dist.channel_variance, 1.0)
    for _ in range(1100):
        if cdf_gfas(dist, hi) >= p:
            break
        hi *= 2.0
    else:
        raise NumericError("quantile bracket did not close; distribution mass lies beyond 1e300")
    lo = 0.0
    while hi - lo > 1e-12 * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if cdf_gfas(dist, mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------------
# Single-block factors, exposed for quadrature diagnostics
# ----------------------------------------------------------------------------
#
# Both routes evaluate the same latent-draw integral for one group of `size`
# ports at the reference scale sigma^2 = 2. The first uses the fixed
# Gauss-Laguerre rule, the second an adaptive subdivision with the e^(-u)
# weight written out; their disagreement measures pure quadrature error.


def _block_args(mu2, size, t):
    mu2 = float(mu2)
    if not (0.0 < mu2 < 1.0):
        raise ValueError("mu2 must lie strictly inside (0, 1)")
    if not isinstance(size, (int, np.integer)) or size < 1:
        raise ValueError("block size must be a positive integer")
    t = _checked_t(t, allow_zero=True)
    if math.isinf(t):
        raise ValueError("gain argument must be finite")
    x = t / (1.0 - mu2)
    lam_rate = 2.0 * mu2 / (1.0 - mu2)
    return x, lam_rate, int(size)


def block_cdf_factor(mu2, size, t, rule: QuadratureRule | None = None) -> float:
    """One group's CDF factor at gain level t, by Gauss-Laguerre quadrature."""
    x, lam_rate, size = _block_args(mu2, size, t)
    if rule is None:
        rule = gauss_laguerre(32)

    def bracket(u):
        return ncx2_cdf(x, lam_rate * u) ** size

    return integrate_exp_weight(bracket, rule)


def block_cdf_factor_adaptive(mu2, size, t, tol: float = 1e-10) -> float:
    """Adaptive-quadrature oracle for block_cdf_factor."""
    x, lam_rate, size = _block_args(mu2, size, t)

    def integrand(u):
        if u > 745.0:
            return 0.0
        return math.exp(-u) * ncx2_cdf(x, lam_rate * u) ** size

    res = integrate_adaptive(integrand, 0.0, math.inf, tol=tol)
    if not res.converged:
        raise NumericError(
            f"adaptive block factor did not converge (error estimate {res.error_estimate:.3e})"
        )
    return res.value
