"""Scenario description shared by the analytic and Monte Carlo pipelines.

A scenario bundles the field geometry (protected inner radius, outer
truncation), the transmitter density, the pathloss/shadowing channel, and
exactly one interference-management scheme.  Instances are frozen; both
pipelines treat them as pure inputs, and a stable content hash ties
output files back to the scenario that produced them.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field, replace

from .channel import CompositeChannelParams, composite_lognormal_moments
from .control import ContentionConfig, HybridConfig, PowerControlConfig
from .errors import ConfigurationError
from .pointproc import AnnulusRegion, retaining_probability

SCHEMES = ("power", "contention", "hybrid", "none")

#: Default cap on the fraction of the mean interference allowed to come
#: from beyond the simulated outer radius (sets l_eff for "auto").
DEFAULT_TAIL_FRACTION = 1e-4


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one interference scenario.

    Attributes:
        scheme: One of ``power``, ``contention``, ``hybrid``, or ``none``
            (no control: every transmitter at ``fixed_power``).
        density: Transmitter intensity in points per square meter.
        inner_radius: Protected radius R in meters (no transmitters
            closer to its center).
        beta: Pathloss exponent, > 2.
        outer_radius: Field truncation radius in meters, or ``"auto"`` to
            derive it from ``mc_tail_fraction``.
        hidden: If true, the receiver sits ``receiver_offset`` meters from
            the protected zone's center rather than at it.
        receiver_offset: Transmitter-receiver separation r_p (hidden mode).
        pathloss_only: Disable shadowing/fading (unit channel gain).
        channel: Composite channel parameters (required unless
            ``pathloss_only``).
        power / contention / hybrid: Scheme config matching ``scheme``.
        fixed_power: Transmit power in watts for the ``none`` scheme.
        trials: Default Monte Carlo trial count.
        seed: Master RNG seed.
        mc_tail_fraction: Mean-interference fraction sacrificed to outer
            truncation when ``outer_radius`` is ``"auto"``.
    """

    scheme: str
    density: float
    inner_radius: float
    beta: float
    outer_radius: float | str = "auto"
    hidden: bool = False
    receiver_offset: float = 0.0
    pathloss_only: bool = False
    channel: CompositeChannelParams | None = None
    power: PowerControlConfig | None = None
    contention: ContentionConfig | None = None
    hybrid: HybridConfig | None = None
    fixed_power: float | None = None
    trials: int = 100_000
    seed: int = 0
    mc_tail_fraction: float = DEFAULT_TAIL_FRACTION

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(
                f"scheme must be one of {SCHEMES}, got {self.scheme!r}"
            )
        if self.density < 0.0:
            raise ConfigurationError(f"density must be >= 0, got {self.density}")
        if self.inner_radius < 0.0:
            raise ConfigurationError(
                f"inner radius must be >= 0, got {self.inner_radius}"
            )
        if not self.beta > 2.0:
            raise ConfigurationError(f"beta must exceed 2, got {self.beta}")
        if self.outer_radius != "auto":
            if not float(self.outer_radius) > self.inner_radius:
                raise ConfigurationError(
                    "outer radius must exceed the inner radius (or be 'auto')"
                )
        if not 0.0 < self.mc_tail_fraction < 1.0:
            raise ConfigurationError("mc_tail_fraction must lie in (0, 1)")
        if self.trials < 0:
            raise ConfigurationError("trials must be >= 0")

        if self.pathloss_only and self.channel is not None:
            raise ConfigurationError(
                "pathloss_only scenarios must not also carry channel params"
            )
        if not self.pathloss_only and self.channel is None:
            raise ConfigurationError(
                "specify composite channel params or set pathloss_only"
            )

        needed = {
            "power": self.power,
            "contention": self.contention,
            "hybrid": self.hybrid,
            "none": self.fixed_power,
        }[self.scheme]
        if needed is None:
            raise ConfigurationError(
                f"scheme {self.scheme!r} requires its matching config"
            )
        if self.scheme == "none" and not self.fixed_power > 0.0:
            raise ConfigurationError("fixed_power must be > 0")

        if self.hidden:
            if not 0.0 < self.receiver_offset < self.inner_radius:
                raise ConfigurationError(
                    f"hidden mode needs 0 < receiver_offset < inner radius, got "
                    f"r_p={self.receiver_offset}, R={self.inner_radius}"
                )
        alpha = getattr(self.active_config, "alpha", None)
        if alpha is not None and alpha != self.beta:
            warnings.warn(
                f"power-law exponent alpha={alpha} differs from pathloss "
                f"beta={self.beta}; the capped-interference property no longer holds",
                stacklevel=2,
            )

    # -- derived views -------------------------------------------------

    @property
    def active_config(self):
        """The scheme config object selected by ``scheme``."""
        return {
            "power": self.power,
            "contention": self.contention,
            "hybrid": self.hybrid,
            "none": self.fixed_power,
        }[self.scheme]

    @property
    def q_mh(self) -> float:
        """Hard-core retaining probability (contention/hybrid schemes)."""
        cfg = self.active_config
        if not isinstance(cfg, (ContentionConfig, HybridConfig)):
            raise ConfigurationError(
                f"retaining probability is undefined for scheme {self.scheme!r}"
            )
        return retaining_probability(self.density, cfg.d_min)

    def effective_lognormal(self) -> tuple[float, float]:
        """Matched (mu, sigma) of the ln channel gain; (0, 0) means h = 1."""
        if self.pathloss_only:
            return 0.0, 0.0
        mu, sigma2 = composite_lognormal_moments(self.channel)
        return mu, math.sqrt(sigma2)

    def resolve_outer_radius(self, tail_fraction: float | None = None) -> float:
        """Concrete outer radius, materializing the ``"auto"`` rule.

        The interference mean contributed beyond radius l falls off as
        (R/l)**(beta-2), so truncating at
        ``l = R * tail_fraction**(-1/(beta-2))`` discards at most
        ``tail_fraction`` of it.
        """
        if self.outer_radius != "auto":
            return float(self.outer_radius)
        tf = self.mc_tail_fraction if tail_fraction is None else tail_fraction
        if self.inner_radius == 0.0:
            raise ConfigurationError(
                "outer_radius='auto' needs a positive inner radius; give an "
                "explicit outer radius instead"
            )
        return self.inner_radius * tf ** (-1.0 / (self.beta - 2.0))

    def region(self, tail_fraction: float | None = None) -> AnnulusRegion:
        return AnnulusRegion(self.inner_radius, self.resolve_outer_radius(tail_fraction))

    def with_updates(self, **changes) -> "ScenarioConfig":
        """Functional update (thin wrapper over dataclasses.replace)."""
        return replace(self, **changes)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "scheme": self.scheme,
            "density": self.density,
            "inner_radius": self.inner_radius,
            "beta": self.beta,
            "outer_radius": self.outer_radius,
            "hidden": self.hidden,
            "receiver_offset": self.receiver_offset,
            "pathloss_only": self.pathloss_only,
            "trials": self.trials,
            "seed": self.seed,
            "mc_tail_fraction": self.mc_tail_fraction,
        }
        if self.channel is not None:
            d["channel"] = {
                "nakagami_m": "inf"
                if self.channel.nakagami_m == math.inf
                else self.channel.nakagami_m,
                "mu_omega": self.channel.mu_omega,
                "sigma_omega": self.channel.sigma_omega,
            }
        if self.power is not None:
            d["power"] = {
                "p_max": self.power.p_max,
                "r_pwc": self.power.r_pwc,
                "alpha": self.power.alpha,
            }
        if self.contention is not None:
            d["contention"] = {"p": self.contention.p, "d_min": self.contention.d_min}
        if self.hybrid is not None:
            d["hybrid"] = {
                "p": self.hybrid.p,
                "d_min": self.hybrid.d_min,
                "r_hyb": self.hybrid.r_hyb,
                "alpha": self.hybrid.alpha,
            }
        if self.fixed_power is not None:
            d["fixed_power"] = self.fixed_power
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        """Build a scenario from nested plain data (parsed config file).

        Power-law exponents (``alpha``) default to the pathloss ``beta``
        when omitted.  The shadowing std may be given either as
        ``sigma_omega`` (natural log) or ``sigma_omega_db``.
        """
        if not isinstance(raw, dict):
            raise ConfigurationError("scenario config must be a mapping")
        data = dict(raw)
        try:
            beta = float(data["beta"])
        except KeyError as exc:
            raise ConfigurationError("scenario config missing 'beta'") from exc

        channel = None
        if "channel" in data and data["channel"] is not None:
            ch = dict(data.pop("channel"))
            m = ch.pop("nakagami_m", math.inf)
            if isinstance(m, str):
                if m.lower() not in ("inf", "infinity"):
                    raise ConfigurationError(f"bad nakagami_m value {m!r}")
                m = math.inf
            if "sigma_omega_db" in ch:
                channel = CompositeChannelParams.from_db(
                    m, ch.pop("mu_omega", 0.0), ch.pop("sigma_omega_db")
                )
            else:
                channel = CompositeChannelParams(
                    m, ch.pop("mu_omega", 0.0), ch.pop("sigma_omega", 0.0)
                )
            if ch:
                raise ConfigurationError(f"unknown channel keys: {sorted(ch)}")
        data["channel"] = channel

        if "power" in data and data["power"] is not None:
            pw = dict(data["power"])
            pw.setdefault("alpha", beta)
            data["power"] = PowerControlConfig(**pw)
        if "contention" in data and data["contention"] is not None:
            data["contention"] = ContentionConfig(**data["contention"])
        if "hybrid" in data and data["hybrid"] is not None:
            hy = dict(data["hybrid"])
            hy.setdefault("alpha", beta)
            data["hybrid"] = HybridConfig(**hy)
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(f"bad scenario config: {exc}") from exc

    def config_hash(self) -> str:
        """Short stable digest of the full scenario content."""
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]
