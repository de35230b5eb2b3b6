"""Core domain types: county observations, datasets, and design matrices.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    ConstantColumn,
    DuplicateCovariate,
    DuplicateId,
    EmptySelection,
    UnknownCovariate,
)

#: A column is treated as constant when max - min falls below this value.
CONSTANT_COLUMN_TOL = 1e-12


@dataclass(frozen=True)
class CountyObservation:
    """One spatial unit: identifier, centroid, count outcome, covariates.

    Parameters
    ----------
    id : str
        Unique unit identifier (e.g. a FIPS code).
    centroid : tuple of float
        (latitude, longitude) in degrees.
    count : int
        Nonnegative integer outcome (number of institutions in the unit).
    covariates : tuple of float
        Ordered covariate values matching the owning dataset's schema.
    """

    id: str
    centroid: tuple[float, float]
    count: int
    covariates: tuple[float, ...] = ()

    def __post_init__(self):
        lat, lon = self.centroid
        if not (-90.0 <= lat <= 90.0):
            raise ValueError(f"latitude {lat} outside [-90, 90]")
        if not (-180.0 <= lon <= 180.0):
            raise ValueError(f"longitude {lon} outside [-180, 180]")
        if isinstance(self.count, bool) or int(self.count) != self.count or self.count < 0:
            raise ValueError(f"count must be a nonnegative integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))
        vals = tuple(float(v) for v in self.covariates)
        if not all(map(math.isfinite, vals)):
            raise ValueError(f"observation {self.id!r} has non-finite covariates")
        object.__setattr__(self, "covariates", vals)


@dataclass(frozen=True)
class Dataset:
    """A validated collection of observations plus the covariate schema.

    ``standardization`` records the (mean, stddev) applied to each covariate
    when the dataset was standardized at ingestion; empty otherwise.
    """

    schema: tuple[str, ...]
    observations: tuple[CountyObservation, ...]
    standardization: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "observations", tuple(self.observations))
        names = set()
        for name in self.schema:
            if name in names:
                raise DuplicateCovariate(name)
            names.add(name)
        seen = set()
        k = len(self.schema)
        for obs in self.observations:
            if obs.id in seen:
                raise DuplicateId(obs.id)
            seen.add(obs.id)
            if len(obs.covariates) != k:
                raise ValueError(
                    f"observation {obs.id!r} has {len(obs.covariates)} covariates, "
                    f"schema has {k}"
                )

    def __len__(self):
        return len(self.observations)

    def counts(self) -> np.ndarray:
        """Count outcomes in observation order."""
        return np.array([obs.count for obs in self.observations], dtype=np.int64)

    def centroids(self) -> np.ndarray:
        """(n, 2) array of (latitude, longitude) in observation order."""
        return np.array([obs.centroid for obs in self.observations], dtype=np.float64)

    def covariate_values(self, name: str) -> np.ndarray:
        """Values of a single named covariate in observation order."""
        if name not in self.schema:
            raise UnknownCovariate(name)
        j = self.schema.index(name)
        return np.array([obs.covariates[j] for obs in self.observations], dtype=np.float64)


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric realization of a covariate selection.

    The intercept, when present, is column 0 of ones.  No non-intercept
    column may be constant.
    """

    values: np.ndarray
    column_names: tuple[str, ...]
    has_intercept: bool

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("design matrix must be two-dimensional")
        if vals.shape[1] != len(self.column_names):
            raise ValueError("column_names length does not match matrix width")
        start = 1 if self.has_intercept else 0
        for j in range(start, vals.shape[1]):
            col = vals[:, j]
            if col.size and col.max() - col.min() < CONSTANT_COLUMN_TOL:
                raise ConstantColumn(self.column_names[j])
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


def build_design(dataset: Dataset, covariate_names, add_intercept: bool) -> DesignMatrix:
    """Assemble a design matrix from named dataset covariates.

    Columns are ordered intercept first (if requested) followed by
    ``covariate_names`` in the given order; values are copied in dataset
    observation order.  Duplicate selections are rejected outright to keep
    rank-deficient designs from forming silently.
    """
    covariate_names = list(covariate_names)
    seen = set()
    for name in covariate_names:
        if name in seen:
            raise DuplicateCovariate(name)
        seen.add(name)
    for name in covariate_names:
        if name not in dataset.schema:
            raise UnknownCovariate(name)
    if not covariate_names and not add_intercept:
        raise EmptySelection()

    n = len(dataset.observations)
    idx = [dataset.schema.index(name) for name in covariate_names]
    cols = []
    names = []
    if add_intercept:
        cols.append(np.ones(n))
        names.append("Intercept")
    for name, j in zip(covariate_names, idx):
        cols.append(np.array([obs.covariates[j] for obs in dataset.observations]))
        names.append(name)
    values = np.column_stack(cols) if cols else np.empty((n, 0))
    return DesignMatrix(values=values, column_names=tuple(names), has_intercept=add_intercept)


def binarize_counts(dataset: Dataset) -> np.ndarray:
    """0/1 vector: element i is 1 exactly when observation i has count > 0."""
    return (dataset.counts() > 0).astype(np.int64)
