"""Channel models: power-law pathloss and composite shadow fading.

The composite channel multiplies Nakagami-m small-scale power fading
(Gamma-distributed with unit mean) by log-normal shadowing.  Throughout
the analytic pipeline that product is approximated by a single log-normal
whose ln-gain mean and variance are matched to the composite's; the exact
sampler is kept alongside so the quality of that approximation is
testable at moment level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

#: Truncated Euler-Mascheroni constant used by the ln-gain mean formula.
#: Kept at four decimals deliberately so closed-form outputs match the
#: published constant; the induced relative error is below 1e-4.
EULER_GAMMA_4DP = 0.5772

#: Conversion factor from a dB-valued shadowing std to natural-log units.
DB_TO_NAT = math.log(10.0) / 10.0


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class PathlossModel:
    """Power-law decay of channel gain with distance, ``g(r) = r**-beta``.

    Attributes:
        beta: Pathloss exponent, required > 2 so the aggregate
            interference mean is finite.
    """

    beta: float

    def __post_init__(self):
        if not self.beta > 2.0:
            raise ConfigurationError(
                f"pathloss exponent must exceed 2 for a finite mean, got {self.beta}"
            )

    def gain(self, r):
        return pathloss_gain(r, self.beta)

    def gain_inverse(self, t):
        return pathloss_gain_inverse(t, self.beta)


def pathloss_gain(r, beta: float):
    """Pathloss power gain ``r**-beta`` at distance(s) ``r > 0`` (meters)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("pathloss gain requires strictly positive distance")
    return r ** (-beta)


def pathloss_gain_inverse(t, beta: float):
    """Distance at which the pathloss gain equals ``t``: ``t**(-1/beta)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise DomainError("gain must be strictly positive")
    return t ** (-1.0 / beta)


@dataclass(frozen=True)
class CompositeChannelParams:
    """Nakagami-m fading times log-normal shadowing.

    Attributes:
        nakagami_m: Integer fading shape >= 1, or ``math.inf`` for no
            small-scale fading (pure shadowing).  Non-integer finite
            shapes are rejected: the partial-sum form of the ln-gain mean
            is only valid for integer m.
        mu_omega: Mean of the shadowing ln-gain (natural log).
        sigma_omega: Std of the shadowing ln-gain (natural log).  Use
            :meth:`from_db` for the conventional dB parameterization.
    """

    nakagami_m: float
    mu_omega: float = 0.0
    sigma_omega: float = 0.0

    def __post_init__(self):
        m = self.nakagami_m
        if m != math.inf:
            if not float(m).is_integer() or m < 1:
                raise ConfigurationError(
                    f"Nakagami shape must be a positive integer (or inf for "
                    f"no fading), got {m!r}"
                )
        if self.sigma_omega < 0.0:
            raise ConfigurationError(
                f"shadowing std must be >= 0, got {self.sigma_omega}"
            )

    @classmethod
    def from_db(cls, nakagami_m, mu_omega: float = 0.0, sigma_omega_db: float = 0.0):
        """Build params with the shadowing std given in dB."""
        return cls(nakagami_m, mu_omega, sigma_omega_db * DB_TO_NAT)


def composite_lognormal_moments(params: CompositeChannelParams) -> tuple[float, float]:
    """Matched log-normal (mu, sigma**2) for the composite channel's ln-gain.

    The mean is the exact expectation of ln of a unit-mean Gamma(m) power
    gain plus the shadowing mean:

        mu = sum_{k=1}^{m-1} 1/k - ln(m) - 0.5772 + mu_omega

    and the variance adds the Gamma ln-variance (trigamma of m, summed as
    the series sum_{k>=0} (m+k)**-2) to the shadowing variance.  The series
    is accumulated directly with a midpoint tail correction until the
    correction's error bound drops below 1e-10 of the partial sum.
    """
    m = params.nakagami_m
    if m == math.inf:
        return params.mu_omega, params.sigma_omega**2

    m = int(m)
    harmonic = float(np.sum(1.0 / np.arange(1, m)))  # empty for m = 1
    mu = harmonic - math.log(m) - EULER_GAMMA_4DP + params.mu_omega

    total = 0.0
    k = 0
    block = 256
    while True:
        idx = m + np.arange(k, k + block, dtype=float)
        total += float(np.sum(idx**-2.0))
        k += block
        edge = m + k
        correction = 1.0 / (edge - 0.5)
        if 1.0 / (12.0 * edge**3) <= 1e-10 * (total + correction):
            total += correction
            break
    return mu, total + params.sigma_omega**2


def sample_gain(
    params: CompositeChannelParams,
    mode: str,
    seed,
    size: int | tuple = 1,
) -> np.ndarray:
    """Draw channel power gains.

    Args:
        params: Composite channel description.
        mode: ``"approx_lognormal"`` draws from the matched log-normal;
            ``"exact_composite"`` draws Gamma(m, 1/m) fading times
            log-normal shadowing.
        seed: Integer seed or a ``numpy.random.Generator``.
        size: Output shape.

    Returns:
        Strictly positive gain array of the requested shape.
    """
    rng = _as_rng(seed)
    if mode == "approx_lognormal":
        mu, sigma2 = composite_lognormal_moments(params)
        return np.exp(rng.normal(mu, math.sqrt(sigma2), size))
    if mode == "exact_composite":
        shadow = np.exp(rng.normal(params.mu_omega, params.sigma_omega, size))
        m = params.nakagami_m
        if m == math.inf:
            return shadow
        fading = rng.gamma(shape=m, scale=1.0 / m, size=size)
        return fading * shadow
    raise ConfigurationError(
        f"unknown gain mode {mode!r}; expected 'approx_lognormal' or 'exact_composite'"
    )


def lognormal_pdf(x, mu: float, sigma: float) -> np.ndarray:
    """Log-normal density with ln-mean ``mu`` and ln-std ``sigma``.

    Vectorized over ``x``; nonpositive arguments return density 0 by
    convention (the distribution has no mass there).
    """
    if sigma <= 0.0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    dens = np.exp(-((np.log(safe) - mu) ** 2) / (2.0 * sigma**2)) / (
        math.sqrt(2.0 * math.pi) * sigma * safe
    )
    return np.where(x > 0.0, dens, 0.0)
