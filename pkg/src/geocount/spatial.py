"""Spatial weights from point centroids and Getis-Ord hot-spot z-scores.

Distances are great-circle (haversine) kilometres on a sphere of radius
6371.0088 km.  The local statistic for unit i over values x and weights w is

    z_i = [ sum_j w_ij x_j - xbar sum_j w_ij ]
          / ( S * sqrt( [ n sum_j w_ij^2 - (sum_j w_ij)^2 ] / (n - 1) ) )

with xbar the mean of the values and S = sqrt( sum_j x_j^2 / n - xbar^2 ),
the population standard deviation.  The population form of S next to the
(n - 1) denominator term is kept exactly as printed in the source formula.
Large positive z marks clustering of high values (hot spot), large negative
z clustering of low values (cold spot); a unit with no usable neighborhood
variance scores z = 0 by convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse

from .exceptions import DegenerateGeometry, DimensionMismatch, KTooLarge

EARTH_RADIUS_KM = 6371.0088

HOT_99 = 2.576
HOT_95 = 1.96


@dataclass(frozen=True)
class DistanceBand:
    """Binary weights: w_ij = 1 iff the great-circle distance <= d_km."""

    d_km: float

    def __post_init__(self):
        if self.d_km <= 0:
            raise ValueError("distance band must be positive")


@dataclass(frozen=True)
class KNearest:
    """Binary weights linking each unit to its k nearest neighbors."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")


class HotspotClass(str, Enum):
    HOT_99 = "Hot99"
    HOT_95 = "Hot95"
    NOT_SIGNIFICANT = "NotSignificant"
    COLD_95 = "Cold95"
    COLD_99 = "Cold99"


@dataclass(frozen=True)
class SpatialWeightsMatrix:
    """Sparse nonnegative n-by-n interaction weights.

    w_ii = 1 for every unit when ``include_self`` (the usual convention for
    the focal statistic), 0 otherwise.
    """

    n: int
    entries: scipy.sparse.csr_matrix
    scheme: DistanceBand | KNearest
    include_self: bool

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.entries.sum(axis=1)).ravel()

    def row_square_sums(self) -> np.ndarray:
        squared = self.entries.multiply(self.entries)
        return np.asarray(squared.sum(axis=1)).ravel()


@dataclass(frozen=True)
class HotspotResult:
    """Per-unit z-scores with hot/cold classification."""

    z: np.ndarray
    classes: tuple[HotspotClass, ...]
    mean: float
    scale: float


def haversine_km(lat1, lon1, lat2, lon2):
    """Great-circle distance in km between (lat, lon) points in degrees."""
    lat1, lon1, lat2, lon2 = map(np.radians, (lat1, lon1, lat2, lon2))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def pairwise_distances_km(centroids) -> np.ndarray:
    """Dense n-by-n matrix of great-circle distances."""
    pts = np.asarray(centroids, dtype=np.float64)
    lat = pts[:, 0][:, None]
    lon = pts[:, 1][:, None]
    return haversine_km(lat, lon, lat.T, lon.T)


def build_weights(centroids, scheme, include_self: bool = True) -> SpatialWeightsMatrix:
    """Construct binary spatial weights from point centroids.

    DistanceBand links pairs within d_km; KNearest links each unit to its k
    nearest neighbors with ties broken by smaller index.  Neighbor relations
    exclude the unit itself; the diagonal is set afterwards according to
    ``include_self``.
    """
    pts = np.asarray(centroids, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise DegenerateGeometry("need at least 2 (lat, lon) centroids")
    n = pts.shape[0]
    dist = pairwise_distances_km(pts)
    off_diag = ~np.eye(n, dtype=bool)
    if not np.any(dist[off_diag] > 0.0):
        raise DegenerateGeometry("all centroids are coincident")

    if isinstance(scheme, DistanceBand):
        adj = (dist <= scheme.d_km) & off_diag
    elif isinstance(scheme, KNearest):
        if scheme.k >= n:
            raise KTooLarge(scheme.k, n)
        adj = np.zeros((n, n), dtype=bool)
        for i in range(n):
            row = dist[i].copy()
            row[i] = np.inf
            # stable sort: equal distances resolve to the smaller index
            order = np.argsort(row, kind="stable")
            adj[i, order[: scheme.k]] = True
    else:
        raise TypeError(f"unknown weights scheme: {scheme!r}")

    w = adj.astype(np.float64)
    if include_self:
        np.fill_diagonal(w, 1.0)
    entries = scipy.sparse.csr_matrix(w)
    return SpatialWeightsMatrix(n=n, entries=entries, scheme=scheme, include_self=include_self)


def classify(z: float) -> HotspotClass:
    """Map a z-score to its hot/cold class at the 95% and 99% thresholds."""
    if z >= HOT_99:
        return HotspotClass.HOT_99
    if z >= HOT_95:
        return HotspotClass.HOT_95
    if z <= -HOT_99:
        return HotspotClass.COLD_99
    if z <= -HOT_95:
        return HotspotClass.COLD_95
    return HotspotClass.NOT_SIGNIFICANT


def getis_ord_gstar(values, W: SpatialWeightsMatrix) -> HotspotResult:
    """Local hot-spot z-scores for each unit under the given weights.

    Units whose denominator degenerates (S = 0, or a weights row with zero
    bracketed variance term) score z = 0: total absence of neighborhood
    information is treated as no evidence of clustering.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != W.n:
        raise DimensionMismatch(f"expected {W.n} values, got shape {x.shape}")
    n = W.n
    xbar = float(np.mean(x))
    S = float(np.sqrt(max(np.sum(x * x) / n - xbar * xbar, 0.0)))

    wx = W.entries @ x
    w_sum = W.row_sums()
    w_sq = W.row_square_sums()
    numerator = wx - xbar * w_sum
    bracket = (n * w_sq - w_sum**2) / (n - 1)

    z = np.zeros(n)
    if S > 0.0:
        valid = bracket > 0.0
        z[valid] = numerator[valid] / (S * np.sqrt(bracket[valid]))
    classes = tuple(classify(float(zi)) for zi in z)
    return HotspotResult(z=z, classes=classes, mean=xbar, scale=S)
