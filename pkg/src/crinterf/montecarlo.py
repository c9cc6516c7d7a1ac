"""Monte Carlo pipeline: sampled transmitter fields, scheme application,
and empirical interference distributions.

Each trial draws a Poisson field in the truncated annulus, applies the
configured scheme (thinning and/or distance-indexed powers), draws channel
gains, and accumulates the received power at the receiver.  Trials use
counter-based RNG substreams -- trial t runs on ``Philox(key=seed,
counter=t << 128)`` -- so the sample vector is bit-reproducible for a
given (scenario, seed) no matter how trials are scheduled or batched.

Within a trial the draw order is fixed and documented: point count,
squared radii, angles, thinning marks (contention/hybrid), scheme
application (independent-mode retention/distance draws happen here),
acceptance variables (measure-matched hidden sampler only), then channel
gains.

Scheme application comes in two flavors.  ``scheme_sampling="field"``
computes thinning and nearest-neighbor distances on the realized point
pattern -- the physical process.  ``scheme_sampling="independent"`` draws
each point's retention (Bernoulli q_mh) or nearest-neighbor distance
(the Poisson NN law) independently of the other points, which is exactly
the assumption the closed-form cumulants and characteristic functions
make.  The two differ measurably: at d_min (or r_pwc) = 20 m and
lambda = 3e-4 the field-mode variance sits 15-25% below the independent
model because nearby points are never retained (or never both at high
power) together, while the mean gains ~1% from relaxed competition along
the quiet-zone rim.  Model validation should therefore compare against
"independent"; predictions about the physical process use "field".

The hard-core thinning and capped nearest-neighbor searches are the inner
loop; both run on cell lists compiled with numba.  The cKDTree versions
in :mod:`.pointproc` serve as their oracle in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from numpy.random import Generator, Philox
from scipy import stats

from .channel import sample_gain
from .control import (
    ContentionConfig,
    HybridConfig,
    PowerControlConfig,
    coverage_radius,
    edge_power_check,
    power_hybrid,
    power_pwc,
)
from .errors import (
    ApplicabilityError,
    ComparisonError,
    ComparisonSetupError,
    ConfigurationError,
    InsufficientDataError,
)
from .inversion import DistributionEstimate
from .pointproc import AnnulusRegion
from .scenario import ScenarioConfig

__all__ = [
    "EmpiricalDistribution",
    "CoverageRatios",
    "simulate_aggregate",
    "simulate_hidden",
    "coverage_experiment",
    "compare_distributions",
]

_KEY_MASK = (1 << 128) - 1


def trial_rng(seed: int, trial: int) -> Generator:
    """Substream generator for one trial.

    The 256-bit Philox counter is partitioned as trial << 128, giving
    every trial 2**128 blocks of headroom; streams are disjoint and
    independent of execution order.
    """
    return Generator(Philox(key=int(seed) & _KEY_MASK, counter=int(trial) << 128))


# ---------------------------------------------------------------------------
# cell-list kernels
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _bin_points(x, y, half_extent, cell):
    n = x.shape[0]
    n_side = int(2.0 * half_extent / cell) + 1
    head = np.full(n_side * n_side, -1, np.int64)
    nxt = np.empty(n, np.int64)
    ca = np.empty(n, np.int64)
    cb = np.empty(n, np.int64)
    inv = 1.0 / cell
    for i in range(n):
        a = int((x[i] + half_extent) * inv)
        b = int((y[i] + half_extent) * inv)
        if a < 0:
            a = 0
        elif a >= n_side:
            a = n_side - 1
        if b < 0:
            b = 0
        elif b >= n_side:
            b = n_side - 1
        c = a * n_side + b
        nxt[i] = head[c]
        head[c] = i
        ca[i] = a
        cb[i] = b
    return head, nxt, ca, cb, n_side


@numba.njit(cache=True)
def _hardcore_survivors(x, y, marks, d_min, half_extent):
    """Mark-competition thinning on a cell list.

    Point i loses to any j within d_min whose mark is smaller (ties break
    toward the lower index, matching the pair ordering of the cKDTree
    implementation).  Cell edge = d_min, so competitors always lie in the
    3x3 neighborhood.
    """
    n = x.shape[0]
    keep = np.ones(n, np.bool_)
    if n < 2 or d_min <= 0.0:
        return keep
    head, nxt, ca, cb, n_side = _bin_points(x, y, half_extent, d_min)
    d2 = d_min * d_min
    for i in range(n):
        mi = marks[i]
        lost = False
        for a in range(max(0, ca[i] - 1), min(n_side, ca[i] + 2)):
            for b in range(max(0, cb[i] - 1), min(n_side, cb[i] + 2)):
                j = head[a * n_side + b]
                while j >= 0:
                    if j != i:
                        dx = x[i] - x[j]
                        dy = y[i] - y[j]
                        if dx * dx + dy * dy <= d2:
                            mj = marks[j]
                            if mj < mi or (mj == mi and j < i):
                                lost = True
                                break
                    j = nxt[j]
                if lost:
                    break
            if lost:
                break
        keep[i] = not lost
    return keep


@numba.njit(cache=True)
def _capped_nn(x, y, cap, half_extent):
    """Nearest-neighbor distances, saturated at ``cap``.

    All scheme power laws are constant beyond their range, so distances
    past ``cap`` never matter and the search can stop at the 3x3 cell
    neighborhood (cell edge = cap).  Isolated points get exactly ``cap``.
    """
    n = x.shape[0]
    out = np.full(n, cap, np.float64)
    if n < 2 or cap <= 0.0:
        return out
    head, nxt, ca, cb, n_side = _bin_points(x, y, half_extent, cap)
    cap2 = cap * cap
    for i in range(n):
        best = cap2
        for a in range(max(0, ca[i] - 1), min(n_side, ca[i] + 2)):
            for b in range(max(0, cb[i] - 1), min(n_side, cb[i] + 2)):
                j = head[a * n_side + b]
                while j >= 0:
                    if j != i:
                        dx = x[i] - x[j]
                        dy = y[i] - y[j]
                        dd = dx * dx + dy * dy
                        if dd < best:
                            best = dd
                    j = nxt[j]
        out[i] = math.sqrt(best)
    return out


# ---------------------------------------------------------------------------
# empirical distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Histogram summary of per-trial aggregate interference.

    Binning is Freedman-Diaconis on log10 of the positive samples
    (interference spans decades, so linear FD bins would starve the
    body).  ``density`` is per linear watt; together with the exact-zero
    fraction the total mass is 1:

        zero_mass + sum(density * diff(bin_edges)) == 1

    Attributes:
        bin_edges: Bin boundaries in watts, increasing, len = n_bins + 1.
        density: Normalized density per bin, len = n_bins.
        kstats: Sample k-statistics (k1..k4): unbiased cumulant estimates.
        trials: Number of trials summarized.
        zero_mass: Fraction of trials with exactly zero interference.
        samples: The raw per-trial samples, or None if dropped.
        meta: Provenance (seed, scheme, truncation radius, ...).
    """

    bin_edges: np.ndarray
    density: np.ndarray
    kstats: tuple
    trials: int
    zero_mass: float = 0.0
    samples: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, samples, *, bins=None, keep_samples=True, meta=None):
        """Summarize a sample vector.

        Args:
            samples: Nonnegative per-trial interference values.
            bins: Bin-count override; None selects Freedman-Diaconis.
            keep_samples: Retain the raw vector on the instance.
            meta: Extra provenance merged into ``meta``.
        """
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n < 4:
            raise InsufficientDataError(
                f"need >= 4 trials for k-statistics, got {n}"
            )
        if np.any(samples < 0.0):
            raise ConfigurationError("interference samples must be >= 0")
        pos = samples[samples > 0.0]
        zero_mass = 1.0 - pos.size / n

        if pos.size >= 2 and pos.min() < pos.max():
            logs = np.log10(pos)
            lo, hi = logs.min(), logs.max()
            if bins is None:
                q25, q75 = np.percentile(logs, [25.0, 75.0])
                h = 2.0 * (q75 - q25) * pos.size ** (-1.0 / 3.0)
                if h > 0.0:
                    bins = int(np.clip(math.ceil((hi - lo) / h), 8, 512))
                else:
                    bins = int(np.clip(math.ceil(math.sqrt(pos.size)), 8, 512))
            counts, log_edges = np.histogram(logs, bins=int(bins), range=(lo, hi))
            edges = 10.0**log_edges
            density = counts / (n * np.diff(edges))
        elif pos.size:  # all positives identical: single degenerate bin
            v = pos[0]
            edges = np.array([v * (1.0 - 1e-9), v * (1.0 + 1e-9)])
            density = np.array([pos.size / (n * (edges[1] - edges[0]))])
        else:
            edges = np.empty(0)
            density = np.empty(0)

        kstats = tuple(float(stats.kstat(samples, k)) for k in (1, 2, 3, 4))
        return cls(
            bin_edges=edges,
            density=density,
            kstats=kstats,
            trials=n,
            zero_mass=float(zero_mass),
            samples=samples if keep_samples else None,
            meta=dict(meta or {}),
        )

    @property
    def mean(self) -> float:
        return self.kstats[0]

    @property
    def variance(self) -> float:
        return self.kstats[1]

    def standard_error(self, order: int = 1) -> float:
        """Standard error of k1 or k2 (normal-theory approximation)."""
        n = self.trials
        if order == 1:
            return math.sqrt(max(self.kstats[1], 0.0) / n)
        if order == 2:
            k2, k4 = self.kstats[1], self.kstats[3]
            var_k2 = 2.0 * k2**2 / (n - 1.0) + k4 / n
            return math.sqrt(max(var_k2, 0.0))
        raise ConfigurationError("standard error implemented for k1, k2 only")

    @property
    def binned_mass(self) -> float:
        if self.density.size == 0:
            return 0.0
        return float(np.sum(self.density * np.diff(self.bin_edges)))

    def as_estimate(self) -> DistributionEstimate:
        """Bin-center density view for comparison with analytic estimates."""
        if self.density.size == 0:
            raise InsufficientDataError(
                "distribution has no positive-sample histogram"
            )
        centers = np.sqrt(self.bin_edges[:-1] * self.bin_edges[1:])
        return DistributionEstimate(
            y=centers,
            density=self.density,
            kind="empirical",
            meta={"trials": self.trials, **self.meta},
        )

    def histogram_rows(self):
        """(bin_left, bin_right, density) triples for CSV emission."""
        return list(
            zip(self.bin_edges[:-1], self.bin_edges[1:], self.density)
        )

    def summary_dict(self) -> dict:
        return {
            "trials": self.trials,
            "k1": self.kstats[0],
            "k2": self.kstats[1],
            "k3": self.kstats[2],
            "k4": self.kstats[3],
            "zero_mass": self.zero_mass,
            **self.meta,
        }


# ---------------------------------------------------------------------------
# per-trial scheme machinery
# ---------------------------------------------------------------------------


def _sample_parents(scenario, region, rng, with_marks):
    n = rng.poisson(scenario.density * region.area)
    r = np.sqrt(rng.uniform(region.inner_radius**2, region.outer_radius**2, n))
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    x = r * np.cos(theta)
    y = r * np.sin(theta)
    marks = rng.uniform(0.0, 1.0, n) if with_marks else None
    return x, y, marks


def _iid_nn(scenario, n, rng):
    """Independent nearest-neighbor distances from the Poisson NN law."""
    v = rng.exponential(1.0, n)
    return np.sqrt(v / (scenario.density * np.pi))


def _active_and_powers(scenario, x, y, marks, half_extent, sampling, rng):
    """Apply the scheme: returns (x, y, transmit powers) of active nodes."""
    scheme = scenario.scheme
    independent = sampling == "independent"
    if scheme == "none":
        return x, y, np.full(x.size, scenario.fixed_power)
    if scheme == "power":
        cfg = scenario.power
        if independent:
            r_cc = _iid_nn(scenario, x.size, rng)
        else:
            r_cc = _capped_nn(x, y, cfg.r_pwc, half_extent)
        if x.size == 0:
            return x, y, np.empty(0)
        return x, y, power_pwc(r_cc, cfg)
    if scheme == "contention":
        cfg = scenario.contention
        if independent:
            keep = rng.uniform(0.0, 1.0, x.size) <= scenario.q_mh
        else:
            keep = _hardcore_survivors(x, y, marks, cfg.d_min, half_extent)
        return x[keep], y[keep], np.full(int(keep.sum()), cfg.p)
    # hybrid: thin first, then the anchored power law among survivors
    cfg = scenario.hybrid
    keep = _hardcore_survivors(x, y, marks, cfg.d_min, half_extent)
    xs, ys = x[keep], y[keep]
    r_nn = _capped_nn(xs, ys, cfg.r_hyb, half_extent)
    if xs.size == 0:
        return xs, ys, np.empty(0)
    return xs, ys, power_hybrid(r_nn, cfg)


def _gains(scenario, n, rng, gain_mode):
    if scenario.pathloss_only or n == 0:
        return 1.0
    return sample_gain(scenario.channel, gain_mode, rng, n)


def _simulate_trials(scenario, n_trials, seed, region, gain_mode, sampling):
    # marks are drawn in both sampling modes so the parent fields agree
    # between them for a given (scenario, seed)
    needs_marks = scenario.scheme in ("contention", "hybrid")
    rp = scenario.receiver_offset if scenario.hidden else 0.0
    beta = scenario.beta
    half_extent = region.outer_radius
    out = np.empty(n_trials)
    for t in range(n_trials):
        rng = trial_rng(seed, t)
        x, y, marks = _sample_parents(scenario, region, rng, needs_marks)
        xa, ya, powers = _active_and_powers(
            scenario, x, y, marks, half_extent, sampling, rng
        )
        h = _gains(scenario, xa.size, rng, gain_mode)
        s = np.hypot(xa - rp, ya)
        out[t] = float(np.sum(powers * h * s ** (-beta))) if xa.size else 0.0
    return out


def simulate_aggregate(
    scenario: ScenarioConfig,
    *,
    n_trials: int | None = None,
    seed: int | None = None,
    tail_fraction: float | None = None,
    gain_mode: str = "exact_composite",
    scheme_sampling: str = "field",
    bins=None,
    keep_samples: bool = True,
) -> EmpiricalDistribution:
    """Simulate the aggregate interference distribution.

    Draws ``n_trials`` independent field realizations (defaults from the
    scenario), applies the configured scheme, and accumulates received
    power at the receiver -- the region center, or the offset point for
    hidden scenarios (exact planar geometry).

    Args:
        scenario: Full scenario description.
        n_trials: Trial-count override.
        seed: Master-seed override.
        tail_fraction: Truncation override for ``outer_radius="auto"``.
        gain_mode: ``"exact_composite"`` (default) or
            ``"approx_lognormal"`` channel sampling.
        scheme_sampling: ``"field"`` applies thinning / nearest-neighbor
            power assignment on the realized pattern; ``"independent"``
            draws per-point retention or NN distance from the marginal
            law, matching the closed forms' independence assumption (see
            the module docstring; not defined for hybrid).
        bins: Histogram bin-count override (None: Freedman-Diaconis).
        keep_samples: Retain the raw sample vector on the result.
    """
    if scheme_sampling not in ("field", "independent"):
        raise ConfigurationError(
            f"scheme_sampling must be 'field' or 'independent', got "
            f"{scheme_sampling!r}"
        )
    if scheme_sampling == "independent" and scenario.scheme == "hybrid":
        raise ApplicabilityError(
            "the hybrid scheme has no closed-form independence model to "
            "match; use scheme_sampling='field'"
        )
    n_trials = scenario.trials if n_trials is None else int(n_trials)
    seed = scenario.seed if seed is None else int(seed)
    if n_trials < 4:
        raise InsufficientDataError(
            f"need >= 4 trials for k-statistics, got {n_trials}"
        )
    region = scenario.region(tail_fraction)
    samples = _simulate_trials(
        scenario, n_trials, seed, region, gain_mode, scheme_sampling
    )
    meta = {
        "seed": seed,
        "scheme": scenario.scheme,
        "hidden": scenario.hidden,
        "outer_radius": region.outer_radius,
        "gain_mode": gain_mode,
        "scheme_sampling": scheme_sampling,
        "config_hash": scenario.config_hash(),
    }
    return EmpiricalDistribution.from_samples(
        samples, bins=bins, keep_samples=keep_samples, meta=meta
    )


# ---------------------------------------------------------------------------
# hidden receiver
# ---------------------------------------------------------------------------


def _simulate_radial_measure(scenario, n_trials, seed, region, gain_mode):
    """Sampler matched to the radial-measure characteristic functions.

    Samples the inhomogeneous process with intensity
    lambda * (s - r_p cos(theta)) ds dtheta in receiver coordinates (the
    weight the closed-form derivation integrates), by thinning a
    dominating uniform field.  Scheme dependence is replaced by the same
    independence assumptions the closed forms make: Bernoulli(q_mh)
    retention for contention, i.i.d. nearest-neighbor law for the power
    scheme.  Exists so the analytic radial measure can be validated in
    isolation; physical predictions come from the planar mode.
    """
    rp = scenario.receiver_offset
    beta = scenario.beta
    lam = scenario.density
    # theta is measured at the receiver from the ray toward the field
    # center, so cos(theta) = -(x - rp)/s and the radial weight becomes
    # s + rp (x - rp)/s; its max over the annulus is 1 + rp/(R - rp)
    bound = 1.0 + rp / (region.inner_radius - rp)
    out = np.empty(n_trials)
    for t in range(n_trials):
        rng = trial_rng(seed, t)
        n = rng.poisson(lam * bound * region.area)
        r = np.sqrt(rng.uniform(region.inner_radius**2, region.outer_radius**2, n))
        theta = rng.uniform(0.0, 2.0 * np.pi, n)
        xc = r * np.cos(theta) - rp  # receiver at the origin of (xc, y)
        yc = r * np.sin(theta)
        s = np.hypot(xc, yc)
        accept = rng.uniform(0.0, 1.0, n) * bound <= 1.0 + (rp / s) * (xc / s)
        s = s[accept]
        if scenario.scheme == "contention":
            s = s[rng.uniform(0.0, 1.0, s.size) <= scenario.q_mh]
            powers = scenario.contention.p
        else:  # power: independent exp-law nearest-neighbor distances
            r_cc = _iid_nn(scenario, s.size, rng)
            powers = power_pwc(r_cc, scenario.power) if s.size else 1.0
        h = _gains(scenario, s.size, rng, gain_mode)
        out[t] = float(np.sum(powers * h * s ** (-beta))) if s.size else 0.0
    return out


def simulate_hidden(
    scenario: ScenarioConfig,
    *,
    mode: str = "planar",
    n_trials: int | None = None,
    seed: int | None = None,
    tail_fraction: float | None = None,
    gain_mode: str = "exact_composite",
    scheme_sampling: str = "field",
    bins=None,
    keep_samples: bool = True,
) -> EmpiricalDistribution:
    """Simulate interference at a receiver offset from the quiet zone.

    ``mode="planar"`` is the exact geometry: the same field and schemes
    as :func:`simulate_aggregate`, with distances measured to the offset
    point.  ``mode="radial_angle"`` instead samples the radial measure
    underlying the closed-form offset-receiver characteristic functions
    (power and contention schemes only, always with independent scheme
    sampling); the gap between the two modes is the measure discrepancy,
    reported by the CLI rather than hidden.
    """
    if not scenario.hidden:
        raise ConfigurationError(
            "simulate_hidden requires a scenario with the hidden flag set"
        )
    if mode == "planar":
        return simulate_aggregate(
            scenario,
            n_trials=n_trials,
            seed=seed,
            tail_fraction=tail_fraction,
            gain_mode=gain_mode,
            scheme_sampling=scheme_sampling,
            bins=bins,
            keep_samples=keep_samples,
        )
    if mode != "radial_angle":
        raise ConfigurationError(
            f"mode must be 'planar' or 'radial_angle', got {mode!r}"
        )
    if scenario.scheme not in ("power", "contention"):
        raise ApplicabilityError(
            "the radial-angle measure is defined only for the power and "
            "contention schemes (those with closed offset-receiver forms)"
        )
    n_trials = scenario.trials if n_trials is None else int(n_trials)
    seed = scenario.seed if seed is None else int(seed)
    if n_trials < 4:
        raise InsufficientDataError(
            f"need >= 4 trials for k-statistics, got {n_trials}"
        )
    region = scenario.region(tail_fraction)
    samples = _simulate_radial_measure(scenario, n_trials, seed, region, gain_mode)
    meta = {
        "seed": seed,
        "scheme": scenario.scheme,
        "hidden": True,
        "mode": "radial_angle",
        "outer_radius": region.outer_radius,
        "gain_mode": gain_mode,
        "config_hash": scenario.config_hash(),
    }
    return EmpiricalDistribution.from_samples(
        samples, bins=bins, keep_samples=keep_samples, meta=meta
    )


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageRatios:
    """Summed-disk coverage per unit area, normalized to contention."""

    power: float
    contention: float
    hybrid: float
    per_area: dict
    trials: int

    def as_dict(self) -> dict:
        return {
            "power": self.power,
            "contention": self.contention,
            "hybrid": self.hybrid,
            "per_area": dict(self.per_area),
            "trials": self.trials,
        }


def _interior(x, y, inner, outer, margin):
    r = np.hypot(x, y)
    return (r >= inner + margin) & (r <= outer - margin)


def _interior_area(inner, outer, margin):
    return math.pi * ((outer - margin) ** 2 - (inner + margin) ** 2)


def coverage_experiment(
    power_cfg: ScenarioConfig,
    contention_cfg: ScenarioConfig,
    hybrid_cfg: ScenarioConfig,
    *,
    n_trials: int = 2000,
    seed: int = 0,
    window_radius: float | None = None,
) -> CoverageRatios:
    """Compare scheme coverage: mean summed disk area per unit area.

    Every active transmitter covers a disk whose radius follows from its
    scheme and nearest-neighbor distance (half the relevant range).  The
    three scenarios share each trial's parent field, so scheme ratios are
    common-random-number comparisons.  Edge bias is removed by scoring
    only transmitters at least one search range away from the window
    boundaries (their neighborhoods are complete), normalized by the
    interior area.

    Requires matched edge power across the configs (same p/P_max and
    d_min/r_pwc) plus identical density, geometry, and pathloss.
    """
    cfgs = {
        "power": power_cfg,
        "contention": contention_cfg,
        "hybrid": hybrid_cfg,
    }
    for name, cfg in cfgs.items():
        if cfg.scheme != name:
            raise ComparisonSetupError(
                f"expected a {name!r} scenario in position {name}, got "
                f"{cfg.scheme!r}"
            )
    base = contention_cfg
    for cfg in (power_cfg, hybrid_cfg):
        if (cfg.density, cfg.inner_radius, cfg.beta) != (
            base.density,
            base.inner_radius,
            base.beta,
        ):
            raise ComparisonSetupError(
                "coverage comparison needs identical density, protected "
                "radius, and pathloss exponent across schemes"
            )
    edge_power_check(
        power_cfg.power, contention_cfg.contention, base.beta, hybrid_cfg.hybrid
    )
    if n_trials < 1:
        raise ConfigurationError("coverage experiment needs >= 1 trial")

    outer = (
        base.resolve_outer_radius() if window_radius is None else float(window_radius)
    )
    region = AnnulusRegion(base.inner_radius, outer)
    p_cfg = power_cfg.power
    c_cfg = contention_cfg.contention
    h_cfg = hybrid_cfg.hybrid
    margins = {
        "power": p_cfg.r_pwc,
        "contention": c_cfg.d_min,
        "hybrid": h_cfg.r_hyb,
    }
    areas = {
        k: _interior_area(region.inner_radius, region.outer_radius, m)
        for k, m in margins.items()
    }
    for k, a in areas.items():
        if a <= 0.0:
            raise ConfigurationError(
                f"window too small: no interior left for the {k} margin"
            )

    sums = {"power": 0.0, "contention": 0.0, "hybrid": 0.0}
    for t in range(n_trials):
        rng = trial_rng(seed, t)
        x, y, marks = _sample_parents(base, region, rng, with_marks=True)

        nn_all = _capped_nn(x, y, p_cfg.r_pwc, region.outer_radius)
        mask = _interior(x, y, region.inner_radius, outer, margins["power"])
        disks = coverage_radius(p_cfg, nn_all[mask])
        sums["power"] += math.pi * float(np.sum(np.square(disks)))

        keep = _hardcore_survivors(x, y, marks, c_cfg.d_min, region.outer_radius)
        xs, ys = x[keep], y[keep]
        mask = _interior(xs, ys, region.inner_radius, outer, margins["contention"])
        sums["contention"] += math.pi * (c_cfg.d_min / 2.0) ** 2 * int(mask.sum())

        # same d_min (enforced above), so the survivor set is shared
        nn_ret = _capped_nn(xs, ys, h_cfg.r_hyb, region.outer_radius)
        mask = _interior(xs, ys, region.inner_radius, outer, margins["hybrid"])
        disks = coverage_radius(h_cfg, nn_ret[mask])
        sums["hybrid"] += math.pi * float(np.sum(np.square(disks)))

    per_area = {k: sums[k] / (n_trials * areas[k]) for k in sums}
    ref = per_area["contention"]
    if ref <= 0.0:
        raise ComparisonSetupError(
            "contention coverage is zero (empty field?); ratios undefined"
        )
    return CoverageRatios(
        power=per_area["power"] / ref,
        contention=1.0,
        hybrid=per_area["hybrid"] / ref,
        per_area=per_area,
        trials=n_trials,
    )


# ---------------------------------------------------------------------------
# estimate comparison
# ---------------------------------------------------------------------------


def _as_estimate(obj) -> DistributionEstimate:
    if isinstance(obj, DistributionEstimate):
        return obj
    if isinstance(obj, EmpiricalDistribution):
        return obj.as_estimate()
    raise ConfigurationError(
        f"cannot compare object of type {type(obj).__name__}"
    )


def compare_distributions(a, b, *, grid_points: int = 2048) -> dict:
    """Distance metrics between two density estimates on a common grid.

    Accepts :class:`DistributionEstimate` or :class:`EmpiricalDistribution`
    arguments.  Densities are linearly interpolated onto a shared grid
    over the support overlap; the KS statistic uses the mass accumulated
    within that overlap, so it is exact only when both supports coincide.

    Returns:
        dict with ``sup_norm_of_peak`` (sup |f_a - f_b| over the larger
        peak), ``ks_statistic``, and ``cumulant_gaps`` (|mean difference|,
        |variance difference| of the overlap-restricted densities).

    Raises:
        ComparisonError: if the supports do not overlap.
    """
    ea, eb = _as_estimate(a), _as_estimate(b)
    lo = max(ea.y[0], eb.y[0])
    hi = min(ea.y[-1], eb.y[-1])
    if not hi > lo:
        raise ComparisonError(
            f"supports do not overlap: [{ea.y[0]:.3g}, {ea.y[-1]:.3g}] vs "
            f"[{eb.y[0]:.3g}, {eb.y[-1]:.3g}]"
        )
    grid = np.linspace(lo, hi, int(grid_points))
    fa = ea.interp(grid)
    fb = eb.interp(grid)
    peak = max(fa.max(), fb.max())
    if peak <= 0.0:
        raise ComparisonError("both densities vanish on the overlap")

    dy = grid[1] - grid[0]
    mids_a = 0.5 * (fa[1:] + fa[:-1]) * dy
    mids_b = 0.5 * (fb[1:] + fb[:-1]) * dy
    cdf_a = np.concatenate([[0.0], np.cumsum(mids_a)])
    cdf_b = np.concatenate([[0.0], np.cumsum(mids_b)])

    def _moments(f):
        mass = np.trapezoid(f, grid)
        if mass <= 0.0:
            return 0.0, 0.0
        m1 = np.trapezoid(grid * f, grid) / mass
        m2 = np.trapezoid(grid**2 * f, grid) / mass
        return m1, m2 - m1**2

    m1a, va = _moments(fa)
    m1b, vb = _moments(fb)
    return {
        "sup_norm_of_peak": float(np.max(np.abs(fa - fb)) / peak),
        "ks_statistic": float(np.max(np.abs(cdf_a - cdf_b))),
        "cumulant_gaps": (abs(m1a - m1b), abs(va - vb)),
    }
