"""von Mises-Fisher distribution on the unit sphere in R^p.

Density ``f(x; mu, kappa) = c_p(kappa) exp(kappa mu^T x)``. All Bessel work is
done on exponentially scaled functions or in ratio/log space, so ``I_r(kappa)``
itself is never materialized.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from src.core.exceptions import ZeroResultant

logger = logging.getLogger(__name__)

KAPPA_MAX = 1e5
NEWTON_TOLERANCE = 1e-10
NEWTON_MAX_ITERATIONS = 50
_TINY = 1e-300


@dataclass(frozen=True)
class VmfDistribution:
    """Mean direction ``mu`` (unit vector) and concentration ``kappa``."""

    mu: np.ndarray
    kappa: float

    @property
    def p(self) -> int:
        return int(self.mu.shape[0])


def _ratio_continued_fraction(nu: float, kappa: float, max_terms: int = 100000) -> float:
    """``I_nu(kappa) / I_{nu-1}(kappa)`` by modified Lentz on the Gauss fraction.

    ``r = 1 / (2 nu / k + 1 / (2 (nu + 1) / k + ...))``; converges fast when
    ``nu`` is large relative to ``kappa``.
    """
    f = _TINY
    c = f
    d = 0.0
    for k in range(max_terms):
        b = 2.0 * (nu + k) / kappa
        d = b + d
        d = _TINY if d == 0.0 else d
        c = b + 1.0 / c
        c = _TINY if c == 0.0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return f


def bessel_ratio(p: int, kappa: float) -> float:
    """Compute ``A_p(kappa) = I_{p/2}(kappa) / I_{p/2-1}(kappa)``.

    Args:
        p: Dimension, at least 2.
        kappa: Concentration, non-negative.

    Returns:
        Value in ``[0, 1)``; ``A_p(0) = 0``.
    """
    if p < 2 or kappa < 0:
        raise ValueError(f"bessel_ratio needs p >= 2 and kappa >= 0, got p={p}, kappa={kappa}")
    if kappa == 0:
        return 0.0
    nu = p / 2.0
    lower = special.ive(nu - 1.0, kappa)
    if np.isfinite(lower) and lower > 1e-280:
        ratio = special.ive(nu, kappa) / lower
        if np.isfinite(ratio) and ratio > 0.0:
            return float(ratio)
    return _ratio_continued_fraction(nu, kappa)


def log_bessel_iv(nu: float, kappa: float) -> float:
    """``ln I_nu(kappa)`` from the scaled Bessel function.

    Falls back to the uniform large-order asymptotic expansion when the scaled
    value underflows.
    """
    if kappa == 0:
        return 0.0 if nu == 0 else -np.inf
    scaled = special.ive(nu, kappa)
    if np.isfinite(scaled) and scaled > 0.0:
        return float(np.log(scaled) + kappa)
    z = kappa / nu
    root = np.sqrt(1.0 + z * z)
    eta = root + np.log(z / (1.0 + root))
    return float(-0.5 * np.log(2.0 * np.pi * nu) + nu * eta - 0.5 * np.log(root))


def log_normalizer(p: int, kappa: float) -> float:
    """``ln c_p(kappa)``; at ``kappa=0`` minus the log surface area of S^{p-1}."""
    if kappa == 0:
        return float(special.gammaln(p / 2.0) - np.log(2.0) - (p / 2.0) * np.log(np.pi))
    nu = p / 2.0 - 1.0
    return float(
        nu * np.log(kappa) - (p / 2.0) * np.log(2.0 * np.pi) - log_bessel_iv(nu, kappa)
    )


def log_density(dist: VmfDistribution, x: np.ndarray) -> float:
    """Log density of a unit vector under the distribution."""
    return log_normalizer(dist.p, dist.kappa) + dist.kappa * float(np.dot(dist.mu, x))


def estimate(X: np.ndarray, p: Optional[int] = None) -> VmfDistribution:
    """Maximum-likelihood fit of a vMF distribution to unit vectors.

    ``kappa`` starts from ``R(p - R^2) / (1 - R^2)`` and is refined by Newton
    iterations on ``A_p(kappa) - R``, clamped to ``[0, KAPPA_MAX]`` each step.

    Args:
        X: ``t x p`` array of unit vectors, ``t >= 1``.
        p: Dimension; defaults to ``X.shape[1]``.

    Returns:
        Fitted distribution.

    Raises:
        ZeroResultant: If the vectors cancel out.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    t = X.shape[0]
    p = p or X.shape[1]

    resultant = X.sum(axis=0)
    length = float(np.linalg.norm(resultant))
    if length < 1e-12:
        raise ZeroResultant(f"Resultant of {t} vectors vanishes; mean direction undefined")
    mu = resultant / length
    r_bar = min(length / t, 1.0)

    if r_bar >= 1.0 - 1e-12:
        return VmfDistribution(mu=mu, kappa=KAPPA_MAX)

    kappa = float(np.clip(r_bar * (p - r_bar**2) / (1.0 - r_bar**2), 0.0, KAPPA_MAX))
    for _ in range(NEWTON_MAX_ITERATIONS):
        a = bessel_ratio(p, kappa)
        g = a - r_bar
        if abs(g) < NEWTON_TOLERANCE:
            break
        slope = 1.0 - a * a - (p - 1.0) / kappa * a if kappa > 0 else 1.0 / p
        if slope <= 0:
            break
        kappa = float(np.clip(kappa - g / slope, 0.0, KAPPA_MAX))
    logger.debug(f"Fitted vMF: t={t}, p={p}, r_bar={r_bar:.6f}, kappa={kappa:.4f}")
    return VmfDistribution(mu=mu, kappa=kappa)


def _sample_cosines(kappa: float, p: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Wood's rejection sampler for ``w = mu^T x``."""
    dim = p - 1
    # equals (-2k + sqrt(4k^2 + dim^2)) / dim without the cancellation
    b = dim / (np.sqrt(4.0 * kappa**2 + dim**2) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + dim * np.log(1.0 - x0**2)

    accepted = []
    remaining = n
    while remaining > 0:
        size = max(remaining, 16)
        z = rng.beta(dim / 2.0, dim / 2.0, size=size)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.uniform(size=size)
        keep = kappa * w + dim * np.log(1.0 - x0 * w) - c >= np.log(u)
        batch = w[keep][:remaining]
        accepted.append(batch)
        remaining -= batch.shape[0]
    return np.concatenate(accepted)


def _reflect_to(samples: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Householder reflection mapping e1 onto ``mu``, applied row-wise."""
    u = -mu.copy()
    u[0] += 1.0
    norm = np.linalg.norm(u)
    if norm < 1e-12:
        return samples
    u /= norm
    return samples - 2.0 * np.outer(samples @ u, u)


def sample(dist: VmfDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. unit vectors from the distribution.

    Args:
        dist: Distribution to sample.
        n: Number of samples, at least 1.
        rng: Caller-owned random generator.

    Returns:
        ``n x p`` array of unit vectors.
    """
    p = dist.p
    if dist.kappa == 0:
        draws = rng.standard_normal((n, p))
        return draws / np.linalg.norm(draws, axis=1, keepdims=True)

    w = _sample_cosines(dist.kappa, p, n, rng)
    tangent = rng.standard_normal((n, p - 1))
    tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
    radial = np.sqrt(np.clip(1.0 - w**2, 0.0, None))
    local = np.concatenate([w[:, None], radial[:, None] * tangent], axis=1)
    return _reflect_to(local, dist.mu)
