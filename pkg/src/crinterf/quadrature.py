"""Quadrature building blocks for the analytic interference pipeline.

The central primitive is :func:`osc_singular_integral`, which evaluates

    I(a; G, c) = integral_0^G  t^(a-1) * exp(i*c*t) dt,      0 < a <= 1,

the oscillatory integral with an algebraic endpoint singularity at t = 0
that appears inside every characteristic-function kernel in this package
(there with a = 1 - 2/beta or a = 1 - 1/beta and G a pathloss gain).  The
integral has no elementary closed form, oscillates arbitrarily fast for
large |c|, and is singular (but integrable) at the origin, so neither a
naive panel rule nor a single Gauss rule works across the whole (c, G)
range.  Two complementary schemes are used:

* **Small phase** (|c|*G below a crossover): substitute t = G * v**(2/a).
  The Jacobian turns the t**(a-1) singularity into a plain factor of v,
  leaving (2/a) * G**a * integral_0^1 v * exp(i*c*G * v**(2/a)) dv whose
  integrand is smooth enough for Gauss-Legendre to converge rapidly as
  long as the node count comfortably exceeds the accumulated phase
  |c|*G.  (The milder 1/a grading leaves an unbounded second derivative
  at v = 0 for a > 1/2 and stalls near 1e-8 relative error; the 2/a
  grading reaches ~1e-12 at the same node count.)

* **Large phase**: split integral_0^G = integral_0^inf - integral_G^inf.
  The half-line piece is the tabulated Gamma(a) * |c|**(-a) *
  exp(i*pi*a/2) (for c > 0).  For the remainder the contour is rotated
  from the endpoint, t = G + i*s/c, turning the oscillation into
  exponential decay; Gauss-Laguerre handles the resulting smooth,
  e**(-s)-weighted integrand.  The integrand varies on the scale
  s ~ |c|*G, so the rule is accurate precisely where the small-phase
  scheme gives out.

Negative frequencies follow from conjugation symmetry.  Both branches are
vectorized over broadcast (c, G) arrays; evaluation is chunked to bound
peak memory.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import gamma as _gamma_fn
from scipy.special import roots_hermitenorm

from .errors import DomainError

#: Phase |c|*G at which evaluation switches from the substituted
#: Gauss-Legendre rule to the rotated-contour Gauss-Laguerre rule.  The
#: Legendre rule below carries ~3 nodes per radian at this point and the
#: Laguerre integrand is already slowly varying, so both sides are
#: comfortably inside their convergent regimes (see tests for a sweep of
#: the crossover neighbourhood against high-precision references).
PHASE_SPLIT = 40.0

_CHUNK = 8192


@lru_cache(maxsize=32)
def gauss_legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights shifted to the interval [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=32)
def gauss_laguerre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Laguerre nodes and weights (weight function e**-s on [0, inf))."""
    return np.polynomial.laguerre.laggauss(n)


@lru_cache(maxsize=64)
def lognormal_nodes(mu: float, sigma: float, n: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes for expectations against a log-normal density.

    Returns gains ``h_k`` and weights ``w_k`` (summing to 1) such that
    ``sum(w_k * f(h_k))`` approximates ``E[f(h)]`` for
    ``ln h ~ Normal(mu, sigma**2)``.  Uses Gauss-Hermite quadrature in the
    ln-gain variable, where the integrand of a shadowing expectation is
    smooth.  ``sigma = 0`` collapses to the single deterministic gain.
    """
    if sigma < 0.0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return np.array([np.exp(mu)]), np.array([1.0])
    x, w = roots_hermitenorm(n)
    # roots_hermitenorm: weight exp(-x^2/2), total mass sqrt(2*pi).
    return np.exp(mu + sigma * x), w / np.sqrt(2.0 * np.pi)


@lru_cache(maxsize=64)
def exp_decay_nodes(upper: float, n: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Nodes for ``integral_0^upper e**(-v) F(v) dv``.

    Gauss-Legendre under the substitution v = upper * u**2, with the
    exponential weight and Jacobian folded into the returned weights, so
    callers evaluate ``sum(w * F(v))`` directly.  The square grading keeps
    the rule accurate for integrands carrying half-integer powers of v
    (which arise from odd power-law exponents), not just smooth ones.
    """
    if upper < 0.0:
        raise DomainError(f"upper must be >= 0, got {upper}")
    u, w = gauss_legendre_01(n)
    v = upper * u**2
    return v, 2.0 * upper * u * w * np.exp(-v)


def osc_singular_integral(
    a: float,
    bound,
    freq,
    *,
    nodes_small: int = 128,
    nodes_tail: int = 64,
    phase_split: float = PHASE_SPLIT,
) -> np.ndarray:
    """Evaluate ``integral_0^bound t**(a-1) * exp(1j*freq*t) dt``.

    Args:
        a: Singularity exponent, ``0 < a <= 1``.
        bound: Upper limit(s) ``G >= 0``; broadcast against ``freq``.
        freq: Real frequency value(s) ``c``; broadcast against ``bound``.
        nodes_small: Gauss-Legendre count for the small-phase branch.
        nodes_tail: Gauss-Laguerre count for the large-phase branch.
        phase_split: Crossover value of ``|c|*G`` between the branches.

    Returns:
        Complex array of the broadcast shape (0-d inputs give a scalar
        array).  ``bound == 0`` contributes exactly 0.

    Raises:
        DomainError: if ``a`` is outside (0, 1] or any bound is negative.
    """
    if not 0.0 < a <= 1.0:
        raise DomainError(f"singularity exponent must be in (0, 1], got {a}")
    bound_b, freq_b = np.broadcast_arrays(
        np.asarray(bound, dtype=float), np.asarray(freq, dtype=float)
    )
    if np.any(bound_b < 0.0):
        raise DomainError("integration bound must be >= 0")
    shape = bound_b.shape
    G = bound_b.reshape(-1)
    c = freq_b.reshape(-1)

    out = np.empty(G.size, dtype=complex)
    v, w_leg = gauss_legendre_01(nodes_small)
    grade = 2.0 / a
    u = v**grade  # substituted abscissae; phase = z * u
    w_sub = grade * v * w_leg  # Jacobian-folded weights
    s, w_lag = gauss_laguerre(nodes_tail)
    gamma_a = _gamma_fn(a)
    halfline = gamma_a * np.exp(1j * np.pi * a / 2.0)

    for lo in range(0, G.size, _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, G.size))
        Gc = G[sl]
        cc = np.abs(c[sl])
        z = cc * Gc
        res = np.empty(Gc.size, dtype=complex)

        small = z <= phase_split
        if np.any(small):
            zs = z[small]
            phases = np.exp(1j * zs[:, None] * u[None, :])
            res[small] = Gc[small] ** a * (phases @ w_sub)
        large = ~small
        if np.any(large):
            Gl = Gc[large]
            cl = cc[large]
            # (G + i*s/c)**(a-1), principal branch (real part G > 0).
            base = Gl[:, None] + 1j * (s[None, :] / cl[:, None])
            tail = np.exp((a - 1.0) * np.log(base)) @ w_lag
            res[large] = halfline * cl ** (-a) - np.exp(1j * cl * Gl) * (1j / cl) * tail

        neg = c[sl] < 0.0
        res[neg] = np.conj(res[neg])
        res[Gc == 0.0] = 0.0
        out[sl] = res

    return out.reshape(shape)
