import os

import numpy as np
import pytest

from vowelkit.dataset import (LabeledFeature, SplitSpec, filter_outliers,
                              load_manifest, read_feature_cache, split,
                              splitmix64, write_feature_cache)
from vowelkit.errors import ManifestError

HEADER = "path,phoneme,duration,amplitude,intonation\n"


def write_manifest(tmp_path, rows, name="manifest.csv", header=HEADER):
    path = os.path.join(tmp_path, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        fh.writelines(rows)
    return path


def test_load_conforming_rows(tmp_path):
    rows = [f"f{i:04d}.wav,{p},short,normal,level\n"
            for i in range(196) for p in ("aa", "ae", "ah", "ax")]
    assert len(rows) == 784
    manifest = load_manifest(write_manifest(tmp_path, rows))
    assert len(manifest) == 784
    assert manifest.n_excluded == 0


def test_selection_rules_exclude(tmp_path):
    rows = ["a.wav,aa,short,normal,level\n",
            "b.wav,aa,short,normal,rising\n",     # intonation not level
            "c.wav,ae,nudge,normal,level\n",      # nudge duration
            "d.wav,ah,long,quiet to loud,level\n",  # amplitude sweep
            "e.wav,ax,long,loud,level\n"]
    manifest = load_manifest(write_manifest(tmp_path, rows))
    assert len(manifest) == 2
    assert manifest.n_excluded == 3
    assert [e.phoneme for e in manifest] == ["aa", "ax"]


def test_order_preserved_and_paths_resolved(tmp_path):
    rows = ["y.wav,ae,short,loud,level\n", "x.wav,aa,long,quiet,level\n"]
    manifest = load_manifest(write_manifest(tmp_path, rows))
    assert [os.path.basename(e.path) for e in manifest] == ["y.wav", "x.wav"]
    assert all(os.path.isabs(e.path) for e in manifest)
    assert os.path.dirname(manifest.entries[0].path) == str(tmp_path)


def test_empty_manifest_errors(tmp_path):
    path = os.path.join(tmp_path, "empty.csv")
    open(path, "w").close()
    with pytest.raises(ManifestError, match="empty manifest"):
        load_manifest(path)
    with pytest.raises(ManifestError, match="empty manifest"):
        load_manifest(write_manifest(tmp_path, [], name="headeronly.csv"))


def test_missing_columns_errors(tmp_path):
    path = write_manifest(tmp_path, ["a.wav,aa,short\n"],
                          header="path,phoneme,duration\n")
    with pytest.raises(ManifestError, match="missing columns"):
        load_manifest(path)


def test_unknown_phoneme_errors(tmp_path):
    path = write_manifest(tmp_path, ["a.wav,zz,short,normal,level\n"])
    with pytest.raises(ManifestError, match="unknown phoneme"):
        load_manifest(path)


def lf(f1, f2, label, path=None):
    return LabeledFeature(features=[f1, f2], label=label, path=path)


def test_filter_boundary_exact():
    # F1 takes five samples at the mean and two +/-3 pairs, so mu=600 and
    # sigma=2 exactly; deviation 3 == 1.5 sigma must be discarded (strict),
    # while F2 has zero variance and keeps its exact-mean samples
    data = ([lf(600.0, 1200.0, "aa")] * 5
            + [lf(603.0, 1200.0, "aa"), lf(597.0, 1200.0, "aa")] * 2)
    result = filter_outliers(data)
    assert result.stats["aa"]["mean"] == [600.0, 1200.0]
    assert result.stats["aa"]["std"] == [2.0, 0.0]
    assert len(result.kept) == 5
    assert all(s.features[0] == 600.0 for s in result.kept)
    assert len(result.discarded) == 4


def test_filter_partitions_input():
    rng = np.random.default_rng(4)
    data = [lf(rng.normal(600, 50), rng.normal(1200, 80), lab, path=f"p{i}")
            for i, lab in enumerate(["aa", "ae"] * 50)]
    result = filter_outliers(data)
    assert len(result.kept) + len(result.discarded) == len(data)
    kept_paths = {s.path for s in result.kept}
    disc_paths = {s.path for s in result.discarded}
    assert kept_paths.isdisjoint(disc_paths)
    assert kept_paths | disc_paths == {s.path for s in data}


def test_filter_stats_match_brute_force():
    rng = np.random.default_rng(9)
    data = [lf(rng.normal(650, 40), rng.normal(1100, 60), "ah") for _ in range(37)]
    result = filter_outliers(data)
    block = np.array([[s.features[0], s.features[1]] for s in data])
    assert result.stats["ah"]["mean"] == block.mean(axis=0).tolist()
    assert result.stats["ah"]["std"] == block.std(axis=0).tolist()
    for s in data:
        dev = np.abs(np.array(s.features) - block.mean(axis=0))
        expect_keep = bool(np.all((dev < 1.5 * block.std(axis=0)) | (dev == 0)))
        assert (s in result.kept) == expect_keep


def test_filter_gaussian_kept_fraction_matches_monte_carlo():
    rng = np.random.default_rng(42)
    data = []
    for lab in ("aa", "ae", "ah", "ax"):
        mu = rng.uniform(400, 800), rng.uniform(900, 1700)
        for _ in range(200):
            data.append(lf(mu[0] + 50 * rng.standard_normal(),
                           mu[1] + 70 * rng.standard_normal(), lab))
    kept_fraction = len(filter_outliers(data).kept) / len(data)
    mc = np.random.default_rng(123).standard_normal((200000, 2))
    oracle = np.mean(np.all(np.abs(mc) < 1.5, axis=1))
    assert abs(kept_fraction - oracle) <= 0.03


def test_filter_needs_two_samples_per_label():
    with pytest.raises(ValueError):
        filter_outliers([lf(600, 1200, "aa")])


def test_splitmix64_reference_vector():
    stream = splitmix64(0)
    assert [next(stream) for _ in range(3)] == [0xE220A8397B1DCDAF,
                                                0x6E789E6AA1B965F4,
                                                0x06C45D188009454F]


def balanced(n_labels, per_label):
    return [lf(float(i), float(i % 7), f"l{j}")
            for j in range(n_labels) for i in range(per_label)]


def test_split_two_thirds_counts():
    train, test = split(balanced(2, 321), SplitSpec(seed=42))
    assert (len(train), len(test)) == (428, 214)

    train, test = split(balanced(6, 107), SplitSpec(seed=42))
    assert (len(train), len(test)) == (426, 216)
    # floor rounding costs at most one sample per label against 2/3 of 642
    assert abs(len(train) - 428) <= 6


def test_split_partition_properties():
    data = balanced(3, 40)
    train, test = split(data, SplitSpec(seed=1))
    assert len(train) + len(test) == len(data)
    ids = lambda items: sorted(id(s) for s in items)
    assert set(ids(train)).isdisjoint(ids(test))
    assert sorted(ids(train) + ids(test)) == ids(data)
    for label in ("l0", "l1", "l2"):
        n_train = sum(1 for s in train if s.label == label)
        assert n_train == int(40 * 2 / 3)


def test_split_deterministic_and_seed_sensitive():
    data = balanced(4, 30)
    a_train, a_test = split(data, SplitSpec(seed=42))
    b_train, b_test = split(data, SplitSpec(seed=42))
    assert [id(s) for s in a_train] == [id(s) for s in b_train]
    assert [id(s) for s in a_test] == [id(s) for s in b_test]

    c_train, _ = split(data, SplitSpec(seed=43))
    assert [id(s) for s in a_train] != [id(s) for s in c_train]
    for label in ("l0", "l1", "l2", "l3"):
        assert (sum(1 for s in a_train if s.label == label)
                == sum(1 for s in c_train if s.label == label))


def test_split_unstratified_mode():
    data = balanced(2, 30)
    train, test = split(data, SplitSpec(seed=7, stratified=False))
    assert (len(train), len(test)) == (40, 20)


def test_split_too_small_label_errors():
    data = balanced(2, 30) + [lf(0.0, 0.0, "tiny")]
    with pytest.raises(ValueError, match="tiny"):
        split(data, SplitSpec(seed=1))


def test_split_spec_validates_fraction():
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=1.0)


def test_feature_cache_round_trip(tmp_path):
    records = [{"path": "a.wav", "label": "aa", "kind": "formants",
                "values": [631.0, 1049.0]},
               {"path": "a.wav", "label": "aa", "kind": "mfcc",
                "values": [0.1] * 13}]
    path = os.path.join(tmp_path, "features.jsonl")
    write_feature_cache(path, records)
    assert read_feature_cache(path) == records
    with open(path) as fh:
        assert len(fh.readlines()) == 2
