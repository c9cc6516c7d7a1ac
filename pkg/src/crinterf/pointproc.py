"""Planar point fields: Poisson sampling, hard-core thinning, and
nearest-neighbor statistics.

Transmitter locations live in an annulus around the origin (the protected
zone of inner radius R is empty; the field extends to an outer radius l).
Thinning implements the mark-comparison hard-core rule: every point
carries a uniform(0,1) mark, and a point survives only if its mark is the
strict minimum among all parent points within the exclusion distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DomainError, InsufficientDataError


@dataclass(frozen=True)
class AnnulusRegion:
    """Annular sampling window centered on the origin.

    Attributes:
        inner_radius: Protected inner radius R >= 0 (meters).
        outer_radius: Outer truncation radius l > R (meters).
    """

    inner_radius: float
    outer_radius: float

    def __post_init__(self):
        if self.inner_radius < 0.0:
            raise ConfigurationError(
                f"inner radius must be >= 0, got {self.inner_radius}"
            )
        if not self.outer_radius > self.inner_radius:
            raise ConfigurationError(
                f"outer radius {self.outer_radius} must exceed inner radius "
                f"{self.inner_radius}"
            )
        if not np.isfinite(self.outer_radius):
            raise ConfigurationError(
                "outer radius must be finite; resolve 'auto' before sampling"
            )

    @property
    def area(self) -> float:
        return np.pi * (self.outer_radius**2 - self.inner_radius**2)


@dataclass(frozen=True)
class PointSet:
    """A finite planar point pattern, optionally marked.

    Attributes:
        xy: Array of shape (n, 2) with Cartesian coordinates in meters;
            (0, 0) is the region center.
        marks: Optional uniform(0,1) marks, shape (n,).
    """

    xy: np.ndarray
    marks: np.ndarray | None = None

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ConfigurationError(f"xy must have shape (n, 2), got {xy.shape}")
        object.__setattr__(self, "xy", xy)
        if self.marks is not None:
            marks = np.asarray(self.marks, dtype=float)
            if marks.shape != (xy.shape[0],):
                raise ConfigurationError("marks must have one entry per point")
            object.__setattr__(self, "marks", marks)

    @property
    def count(self) -> int:
        return self.xy.shape[0]

    @property
    def radii(self) -> np.ndarray:
        """Distances of all points from the origin."""
        return np.hypot(self.xy[:, 0], self.xy[:, 1])


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_poisson_annulus(
    density: float,
    region: AnnulusRegion,
    seed,
    with_marks: bool = False,
) -> PointSet:
    """Draw a homogeneous Poisson field restricted to an annulus.

    The count is Poisson(density * area) and, given the count, radii have
    density 2x / (l**2 - R**2) on [R, l] (uniform in area) with uniform
    angles.

    Args:
        density: Intensity in points per square meter, >= 0.
        region: Sampling annulus.
        seed: Integer seed or ``numpy.random.Generator``.
        with_marks: Attach i.i.d. uniform(0,1) marks (needed for thinning).
    """
    if density < 0.0:
        raise DomainError(f"density must be >= 0, got {density}")
    rng = _as_rng(seed)
    n = rng.poisson(density * region.area)
    r2 = rng.uniform(region.inner_radius**2, region.outer_radius**2, n)
    r = np.sqrt(r2)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    xy = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    marks = rng.uniform(0.0, 1.0, n) if with_marks else None
    return PointSet(xy, marks)


def matern_hardcore_thin(points: PointSet, d_min: float, seed=None) -> PointSet:
    """Dependent thinning enforcing a minimum pairwise distance.

    A point is retained iff its mark is strictly smaller than the mark of
    every other parent point within ``d_min`` — competition is against all
    parents, not just survivors.  Mark ties (possible only in finite
    precision) retain the lower-index point.  If ``points`` carries no
    marks they are drawn here from ``seed``.

    Returns the retained sub-pattern with its marks.
    """
    if d_min < 0.0:
        raise DomainError(f"d_min must be >= 0, got {d_min}")
    n = points.count
    if n == 0:
        return PointSet(np.empty((0, 2)), np.empty(0))
    marks = points.marks
    if marks is None:
        marks = _as_rng(seed).uniform(0.0, 1.0, n)
    if d_min == 0.0:
        return PointSet(points.xy, marks)

    retained = np.ones(n, dtype=bool)
    pairs = cKDTree(points.xy).query_pairs(d_min, output_type="ndarray")
    if pairs.size:
        mi = marks[pairs[:, 0]]
        mj = marks[pairs[:, 1]]
        # pairs come ordered i < j, so ties eliminate the later index
        losers = np.where(mi <= mj, pairs[:, 1], pairs[:, 0])
        retained[losers] = False
    return PointSet(points.xy[retained], marks[retained])


def nearest_neighbor_distances(points: PointSet) -> np.ndarray:
    """Distance from each point to its closest other point."""
    if points.count < 2:
        raise InsufficientDataError(
            f"nearest-neighbor distances need >= 2 points, got {points.count}"
        )
    dists, _ = cKDTree(points.xy).query(points.xy, k=2)
    return dists[:, 1]


def retaining_probability(density: float, d_min: float) -> float:
    """Expected surviving fraction of hard-core thinning.

    Equals (1 - exp(-x)) / x with x = density * pi * d_min**2, continued
    to 1 at x = 0.
    """
    if density < 0.0 or d_min < 0.0:
        raise DomainError("density and d_min must be >= 0")
    x = density * np.pi * d_min**2
    if x == 0.0:
        return 1.0
    return float(-np.expm1(-x) / x)


def interior_mask(points: PointSet, region: AnnulusRegion, margin: float) -> np.ndarray:
    """Boolean mask of points at least ``margin`` away from both region
    boundaries.

    Edge statistics (retention fractions, nearest-neighbor laws) are
    biased for points whose ``margin``-neighborhood leaves the window;
    evaluating them on this interior subset removes the bias while still
    letting the full pattern supply the competition/neighbors.
    """
    r = points.radii
    return (r >= region.inner_radius + margin) & (r <= region.outer_radius - margin)
