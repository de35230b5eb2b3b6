"""Tests for the core domain types and design-matrix construction."""

import numpy as np
import pytest

from geocount import (
    CountyObservation,
    Dataset,
    DesignMatrix,
    binarize_counts,
    build_design,
)
from geocount.exceptions import (
    ConstantColumn,
    DuplicateCovariate,
    DuplicateId,
    EmptySelection,
    UnknownCovariate,
)


def make_dataset(counts, covariates=None, schema=()):
    """Dataset with synthetic ids and centroids around a fixed point."""
    covariates = covariates or [()] * len(counts)
    obs = tuple(
        CountyObservation(
            id=f"c{i}",
            centroid=(40.0 + 0.01 * i, -90.0 + 0.01 * i),
            count=c,
            covariates=tuple(v),
        )
        for i, (c, v) in enumerate(zip(counts, covariates))
    )
    return Dataset(schema=tuple(schema), observations=obs)


class TestCountyObservation:
    def test_valid(self):
        obs = CountyObservation(id="55025", centroid=(43.0, -89.4), count=12, covariates=(1.0,))
        assert obs.count == 12
        assert obs.covariates == (1.0,)

    @pytest.mark.parametrize("count", [-1, 2.5, True])
    def test_bad_count(self, count):
        with pytest.raises(ValueError):
            CountyObservation(id="x", centroid=(0.0, 0.0), count=count)

    @pytest.mark.parametrize("centroid", [(91.0, 0.0), (-91.0, 0.0), (0.0, 181.0), (0.0, -181.0)])
    def test_bad_centroid(self, centroid):
        with pytest.raises(ValueError):
            CountyObservation(id="x", centroid=centroid, count=0)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_nonfinite_covariate(self, bad):
        with pytest.raises(ValueError):
            CountyObservation(id="x", centroid=(0.0, 0.0), count=0, covariates=(bad,))


class TestDataset:
    def test_duplicate_id(self):
        obs = (
            CountyObservation(id="a", centroid=(0.0, 0.0), count=0),
            CountyObservation(id="a", centroid=(1.0, 1.0), count=1),
        )
        with pytest.raises(DuplicateId):
            Dataset(schema=(), observations=obs)

    def test_schema_conformity(self):
        obs = (CountyObservation(id="a", centroid=(0.0, 0.0), count=0, covariates=(1.0,)),)
        with pytest.raises(ValueError):
            Dataset(schema=("x", "y"), observations=obs)

    def test_accessors(self):
        ds = make_dataset([0, 3, 1], covariates=[(1.0,), (2.0,), (3.0,)], schema=("a",))
        np.testing.assert_array_equal(ds.counts(), [0, 3, 1])
        np.testing.assert_array_equal(ds.covariate_values("a"), [1.0, 2.0, 3.0])
        assert ds.centroids().shape == (3, 2)


class TestBuildDesign:
    def test_intercept_plus_column(self):
        ds = make_dataset(
            [1, 0, 2],
            covariates=[(1.0, 9.0), (2.0, 9.0), (3.0, 9.0)],
            schema=("a", "b"),
        )
        dm = build_design(ds, ["a"], add_intercept=True)
        assert dm.values.shape == (3, 2)
        np.testing.assert_array_equal(dm.values[:, 0], [1.0, 1.0, 1.0])
        np.testing.assert_array_equal(dm.values[:, 1], [1.0, 2.0, 3.0])
        assert dm.column_names == ("Intercept", "a")

    def test_duplicate_selection_beats_unknown(self):
        ds = make_dataset([1, 0], covariates=[(1.0,), (2.0,)], schema=("a",))
        with pytest.raises(DuplicateCovariate):
            build_design(ds, ["a", "a"], add_intercept=False)

    def test_unknown_covariate(self):
        ds = make_dataset([1, 0], covariates=[(1.0,), (2.0,)], schema=("a",))
        with pytest.raises(UnknownCovariate):
            build_design(ds, ["zzz"], add_intercept=True)

    def test_constant_column_rejected(self):
        ds = make_dataset(
            [1, 0, 2],
            covariates=[(1.0, 5.0), (2.0, 5.0), (3.0, 5.0)],
            schema=("a", "b"),
        )
        with pytest.raises(ConstantColumn) as err:
            build_design(ds, ["b"], add_intercept=True)
        assert err.value.name == "b"

    def test_empty_selection(self):
        ds = make_dataset([1, 0])
        with pytest.raises(EmptySelection):
            build_design(ds, [], add_intercept=False)

    def test_intercept_only_is_allowed(self):
        ds = make_dataset([1, 0])
        dm = build_design(ds, [], add_intercept=True)
        assert dm.values.shape == (2, 1)

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        vals = rng.normal(size=(20, 3))
        ds = make_dataset(
            list(rng.integers(0, 5, size=20)),
            covariates=[tuple(row) for row in vals],
            schema=("a", "b", "c"),
        )
        d1 = build_design(ds, ["c", "a"], add_intercept=True)
        d2 = build_design(ds, ["c", "a"], add_intercept=True)
        assert d1.values.tobytes() == d2.values.tobytes()

    def test_values_immutable(self):
        ds = make_dataset([1, 0], covariates=[(1.0,), (2.0,)], schema=("a",))
        dm = build_design(ds, ["a"], add_intercept=True)
        with pytest.raises(ValueError):
            dm.values[0, 0] = 5.0


class TestDesignMatrixType:
    def test_intercept_column_exempt_from_constant_check(self):
        DesignMatrix(
            values=np.column_stack([np.ones(3), [1.0, 2.0, 3.0]]),
            column_names=("Intercept", "a"),
            has_intercept=True,
        )

    def test_near_constant_rejected(self):
        with pytest.raises(ConstantColumn):
            DesignMatrix(
                values=np.array([[1.0], [1.0 + 1e-13], [1.0]]),
                column_names=("a",),
                has_intercept=False,
            )


class TestBinarizeCounts:
    @pytest.mark.parametrize(
        "counts,expected",
        [
            ([0, 3, 1, 0], [0, 1, 1, 0]),
            ([0, 0, 0], [0, 0, 0]),
            ([7], [1]),
        ],
    )
    def test_examples(self, counts, expected):
        ds = make_dataset(counts)
        np.testing.assert_array_equal(binarize_counts(ds), expected)

    def test_sum_matches_nonzero_count(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            counts = rng.integers(0, 4, size=rng.integers(1, 30)).tolist()
            ds = make_dataset(counts)
            b = binarize_counts(ds)
            assert b.sum() == sum(1 for c in counts if c > 0)
            assert all((bi == 0) == (ci == 0) for bi, ci in zip(b, counts))
