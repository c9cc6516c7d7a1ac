"""Interference-management schemes: power control, contention control,
and the hybrid of the two.

Power control scales a transmitter's power by (r/r_pwc)**alpha of its
nearest-neighbor distance r, capped at P_max.  Contention control keeps
power fixed but enforces a hard-core minimum spacing d_min.  The hybrid
scheme thins first, then applies an uncapped-until-r_hyb power law
anchored at d_min.  With alpha equal to the pathloss exponent, both power
laws make the interference a transmitter delivers at its nearest neighbor
constant — the schemes' defining property, asserted in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ComparisonSetupError,
    ConfigurationError,
    DomainError,
    InvariantViolationError,
)

#: Relative slack when validating hard-core distances against d_min, so
#: floating-point roundoff in upstream distance computations cannot
#: spuriously trip the invariant check.
_HARDCORE_RTOL = 1e-9


@dataclass(frozen=True)
class PowerControlConfig:
    """Distance-proportional power control.

    Attributes:
        p_max: Power cap in watts.
        r_pwc: Range of the power-control law in meters; at nearest-
            neighbor distances beyond it the transmitter uses ``p_max``.
        alpha: Power-control exponent (normally equal to the pathloss
            exponent; see ``scenario`` for the defaulting rule).
    """

    p_max: float
    r_pwc: float
    alpha: float

    def __post_init__(self):
        if self.p_max <= 0.0:
            raise ConfigurationError(f"p_max must be > 0, got {self.p_max}")
        if self.r_pwc <= 0.0:
            raise ConfigurationError(f"r_pwc must be > 0, got {self.r_pwc}")
        if not self.alpha > 2.0:
            raise ConfigurationError(f"alpha must exceed 2, got {self.alpha}")


@dataclass(frozen=True)
class ContentionConfig:
    """Hard-core contention control: fixed power, minimum spacing."""

    p: float
    d_min: float

    def __post_init__(self):
        if self.p <= 0.0:
            raise ConfigurationError(f"p must be > 0, got {self.p}")
        if self.d_min <= 0.0:
            raise ConfigurationError(f"d_min must be > 0, got {self.d_min}")


@dataclass(frozen=True)
class HybridConfig:
    """Contention spacing plus a power law anchored at the spacing."""

    p: float
    d_min: float
    r_hyb: float
    alpha: float

    def __post_init__(self):
        if self.p <= 0.0:
            raise ConfigurationError(f"p must be > 0, got {self.p}")
        if self.d_min <= 0.0:
            raise ConfigurationError(f"d_min must be > 0, got {self.d_min}")
        if self.r_hyb < self.d_min:
            raise ConfigurationError(
                f"r_hyb ({self.r_hyb}) must be >= d_min ({self.d_min})"
            )
        if not self.alpha > 2.0:
            raise ConfigurationError(f"alpha must exceed 2, got {self.alpha}")


def power_pwc(r_cc, cfg: PowerControlConfig):
    """Transmit power for nearest-neighbor distance(s) ``r_cc`` under
    power control: ``(r_cc/r_pwc)**alpha * p_max``, saturating at
    ``p_max`` for ``r_cc >= r_pwc``.
    """
    r_cc = np.asarray(r_cc, dtype=float)
    if np.any(r_cc <= 0.0):
        raise DomainError("nearest-neighbor distance must be > 0")
    scaled = (np.minimum(r_cc, cfg.r_pwc) / cfg.r_pwc) ** cfg.alpha * cfg.p_max
    if scaled.ndim == 0:
        return float(scaled)
    return scaled


def power_hybrid(r, cfg: HybridConfig):
    """Transmit power under the hybrid scheme.

    ``(r/d_min)**alpha * p`` on [d_min, r_hyb], capped at
    ``(r_hyb/d_min)**alpha * p`` beyond.  Distances below ``d_min``
    (beyond floating-point slack) violate the hard-core guarantee of the
    thinning stage and raise.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < cfg.d_min * (1.0 - _HARDCORE_RTOL)):
        raise InvariantViolationError(
            f"distance below the hard-core minimum {cfg.d_min} m reached the "
            "hybrid power law; the input set was not properly thinned"
        )
    r_eff = np.clip(r, cfg.d_min, cfg.r_hyb)
    out = (r_eff / cfg.d_min) ** cfg.alpha * cfg.p
    if out.ndim == 0:
        return float(out)
    return out


def coverage_radius(cfg, nn_distance):
    """Coverage-disk radius of a transmitter given its nearest-neighbor
    distance, under the scheme described by ``cfg``.

    Power control covers out to half the power-law range or half the
    neighbor distance, whichever is smaller; contention always covers
    d_min/2; hybrid caps at r_hyb/2.
    """
    r = np.asarray(nn_distance, dtype=float)
    if isinstance(cfg, PowerControlConfig):
        out = np.minimum(r / 2.0, cfg.r_pwc / 2.0)
    elif isinstance(cfg, ContentionConfig):
        out = np.full(r.shape, cfg.d_min / 2.0)
    elif isinstance(cfg, HybridConfig):
        out = np.minimum(r / 2.0, cfg.r_hyb / 2.0)
    else:
        raise ConfigurationError(f"unknown scheme config {type(cfg).__name__}")
    if out.ndim == 0:
        return float(out)
    return out


def edge_power_check(
    power: PowerControlConfig,
    contention: ContentionConfig,
    beta: float,
    hybrid: HybridConfig | None = None,
) -> float:
    """Validate that scheme configs deliver equal cell-edge signal power.

    Coverage comparisons are only meaningful when every scheme delivers
    the same received power at its cell edge (half the relevant range),
    which requires ``p_max == p`` and ``r_pwc == d_min``.  Returns that
    common edge power, ``2**beta * p_max / r_pwc**beta``.

    Raises:
        ComparisonSetupError: if the configs are not edge-power matched.
    """
    if power.p_max != contention.p:
        raise ComparisonSetupError(
            f"edge powers differ: p_max={power.p_max} W vs p={contention.p} W"
        )
    if power.r_pwc != contention.d_min:
        raise ComparisonSetupError(
            f"edge ranges differ: r_pwc={power.r_pwc} m vs d_min={contention.d_min} m"
        )
    if hybrid is not None:
        if hybrid.p != contention.p or hybrid.d_min != contention.d_min:
            raise ComparisonSetupError(
                "hybrid config is not edge-power matched to the contention config"
            )
    return 2.0**beta * power.p_max / power.r_pwc**beta
