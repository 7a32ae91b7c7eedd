import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsemlab.data import (
    MTSDataset,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
    load_dataset,
    load_uea_text,
    save_csv,
    split,
    write_uea_text,
    z_normalize,
)
from tsemlab.errors import ConfigError, DataError, ParseError

FIXTURE = """# two-instance fixture
@problemName Tiny
@timeStamps false
@missing false
@univariate false
@dimensions 2
@equalLength true
@seriesLength 4
@classLabel true a b
@data
1.0,2.0,3.0,4.0:0.5,0.25,-1,2e1:b
-1,-2,-3,-4:0,0,0,1.5:a
"""


def write(tmp_path, text, name="tiny.ts"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestUeaText:
    def test_fixture_exact(self, tmp_path):
        ds = load_uea_text(write(tmp_path, FIXTURE))
        assert ds.X.shape == (2, 2, 4)
        np.testing.assert_array_equal(ds.X[0], [[1, 2, 3, 4], [0.5, 0.25, -1, 20]])
        np.testing.assert_array_equal(ds.X[1], [[-1, -2, -3, -4], [0, 0, 0, 1.5]])
        assert ds.class_names == ("a", "b")
        np.testing.assert_array_equal(ds.y, [1, 0])

    def test_dimension_mismatch_reports_line(self, tmp_path):
        text = FIXTURE.replace("-1,-2,-3,-4:0,0,0,1.5:a", "-1,-2,-3,-4:a")
        with pytest.raises(ParseError) as err:
            load_uea_text(write(tmp_path, text))
        assert err.value.line == 12

    def test_ragged_lengths(self, tmp_path):
        text = FIXTURE.replace("-1,-2,-3,-4:0,0,0,1.5", "-1,-2,-3:0,0,0,1.5")
        with pytest.raises(ParseError, match="ragged") as err:
            load_uea_text(write(tmp_path, text))
        assert err.value.line == 12

    def test_unknown_label(self, tmp_path):
        with pytest.raises(ParseError, match="unknown class") as err:
            load_uea_text(write(tmp_path, FIXTURE.replace(":b\n", ":c\n")))
        assert err.value.line == 11

    @pytest.mark.parametrize("token", ["NaN", "?", "inf"])
    def test_missing_and_non_finite_tokens(self, tmp_path, token):
        with pytest.raises(ParseError) as err:
            load_uea_text(write(tmp_path, FIXTURE.replace("0.25", token)))
        assert err.value.line == 11

    def test_no_data_section(self, tmp_path):
        with pytest.raises(ParseError):
            load_uea_text(write(tmp_path, "@problemName x\n@classLabel true 1 2\n"))

    def test_round_trip_bit_exact(self, tmp_path):
        ds = generate_synthetic(SyntheticSpec(n_per_class=3, seed=4))
        write_uea_text(ds, tmp_path / "s.ts")
        back = load_uea_text(tmp_path / "s.ts")
        assert np.array_equal(back.X, ds.X)
        assert np.array_equal(back.y, ds.y)


UWAVE_DIR = os.environ.get("TSEMLAB_UWAVE_DIR")


@pytest.mark.skipif(not UWAVE_DIR, reason="UWaveGestureLibrary archive not supplied (set TSEMLAB_UWAVE_DIR)")
def test_uwave_train_file_shape():
    ds = load_dataset(Path(UWAVE_DIR), "train")
    assert (len(ds), ds.n_features, ds.seq_length, ds.n_classes) == (120, 3, 315, 8)


class TestCsv:
    def test_fixture_round_trip(self, tmp_path):
        d = tmp_path / "fx"
        d.mkdir()
        (d / "labels.csv").write_text("instance_id,label\nfirst,1\nsecond,0\n")
        (d / "first.csv").write_text("1,2,3\n4,5,6\n")
        (d / "second.csv").write_text("0,0,0\n-1,-1,-1\n")
        ds = load_csv(d)
        np.testing.assert_array_equal(ds.X[0], [[1, 2, 3], [4, 5, 6]])
        np.testing.assert_array_equal(ds.y, [1, 0])

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DataError, match="manifest"):
            load_csv(tmp_path)

    def test_save_load_identity(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = MTSDataset(rng.standard_normal((7, 3, 11)) * 1e3, rng.integers(0, 3, 7), ("0", "1", "2"))
        save_csv(ds, tmp_path / "out")
        back = load_csv(tmp_path / "out")
        assert np.array_equal(back.X, ds.X)
        assert np.array_equal(back.y, ds.y)


class TestNormalization:
    def test_constant_channel_becomes_zero(self):
        X = np.random.default_rng(0).standard_normal((5, 2, 6))
        X[:, 0] = 3.0
        out = z_normalize(MTSDataset(X, np.zeros(5), ("a",)))
        np.testing.assert_array_equal(out.X[:, 0], 0.0)

    def test_random_data_channel_means(self):
        X = np.random.default_rng(1).standard_normal((20, 3, 9)) * 4 + 7
        out = z_normalize(MTSDataset(X, np.zeros(20), ("a",)))
        assert np.all(np.abs(out.X.mean(axis=(0, 2))) < 1e-9)
        np.testing.assert_allclose(out.X.std(axis=(0, 2)), 1.0, atol=1e-9)

    def test_already_normalized_and_idempotent(self):
        X = np.random.default_rng(2).standard_normal((30, 2, 10))
        once = z_normalize(MTSDataset(X, np.zeros(30), ("a",)))
        twice = z_normalize(once)
        np.testing.assert_allclose(twice.X, once.X, atol=1e-6)

    def test_train_stats_reapplied_to_test(self):
        rng = np.random.default_rng(3)
        train = MTSDataset(rng.standard_normal((10, 2, 5)) + 2, np.zeros(10), ("a",))
        test = MTSDataset(rng.standard_normal((4, 2, 5)), np.zeros(4), ("a",))
        ntrain, ntest = z_normalize(train, test)
        mu, sd = train.X.mean(axis=(0, 2)), train.X.std(axis=(0, 2))
        np.testing.assert_allclose(ntest.X, (test.X - mu[None, :, None]) / sd[None, :, None], atol=1e-12)
        np.testing.assert_array_equal(ntest.channel_mean, mu)


class TestSynthetic:
    def test_noise_free_argmax_inside_bump(self):
        spec = SyntheticSpec(noise=0.0, n_per_class=2)
        ds = generate_synthetic(spec)
        for x, k in zip(ds.X, ds.y):
            idx = np.unravel_index(np.argmax(x), x.shape)
            assert spec.region_mask(k)[idx]

    def test_monte_carlo_class_mean_peaks_at_centre(self):
        spec = SyntheticSpec(n_per_class=1000, seed=9)
        ds = generate_synthetic(spec)
        for k in range(spec.n_classes):
            mean = ds.X[ds.y == k, spec.channel(k)].mean(axis=0)
            assert abs(int(np.argmax(mean)) - spec.center(k)) <= 1

    def test_seed_determinism(self):
        a = generate_synthetic(SyntheticSpec(seed=5, n_per_class=4))
        b = generate_synthetic(SyntheticSpec(seed=5, n_per_class=4))
        assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)

    def test_balanced(self):
        ds = generate_synthetic(SyntheticSpec(n_per_class=7))
        np.testing.assert_array_equal(ds.class_counts(), 7)

    def test_default_region_fraction(self):
        spec = SyntheticSpec()
        frac = spec.region_mask(0).mean()
        assert 0.05 < frac < 0.12

    def test_bump_outside_series_rejected(self):
        with pytest.raises(ConfigError, match="outside"):
            generate_synthetic(SyntheticSpec(seq_length=16, bump_width=3.0))

    def test_noise_free_nearest_centroid_is_perfect(self):
        ds = generate_synthetic(SyntheticSpec(noise=0.0, n_per_class=5))
        cents = np.stack([ds.X[ds.y == k].mean(axis=0) for k in range(ds.n_classes)])
        dists = ((ds.X[:, None] - cents[None]) ** 2).sum(axis=(2, 3))
        assert np.all(dists.argmin(axis=1) == ds.y)


class TestSplit:
    def test_ratio_one_gives_empty_test(self):
        ds = generate_synthetic(SyntheticSpec(n_per_class=5))
        train, test = split(ds, 1.0)
        assert len(train) == len(ds) and len(test) == 0

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.0, 1.0), st.integers(0, 1000))
    def test_partition_and_stratification(self, ratio, seed):
        ds = generate_synthetic(SyntheticSpec(n_per_class=9, seed=1))
        train, test = split(ds, ratio, seed)
        assert len(train) + len(test) == len(ds)
        rows = {x.tobytes() for x in train.X} | {x.tobytes() for x in test.X}
        assert rows == {x.tobytes() for x in ds.X}
        expected = ratio * ds.class_counts()
        assert np.all(np.abs(train.class_counts() - expected) <= 1)

    def test_deterministic(self):
        ds = generate_synthetic(SyntheticSpec(n_per_class=6))
        a, _ = split(ds, 0.5, seed=3)
        b, _ = split(ds, 0.5, seed=3)
        assert np.array_equal(a.X, b.X)


def test_load_dataset_layouts(tmp_path):
    ds = generate_synthetic(SyntheticSpec(n_per_class=2))
    save_csv(ds, tmp_path / "d" / "train")
    save_csv(ds, tmp_path / "d" / "test")
    assert len(load_dataset(tmp_path / "d", "test")) == len(ds)
    write_uea_text(ds, tmp_path / "u_TRAIN.ts")
    assert len(load_dataset(tmp_path, "train")) == len(ds)
    with pytest.raises(DataError):
        load_dataset(tmp_path / "nope")
