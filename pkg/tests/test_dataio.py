import struct

import numpy as np
import pytest

from complexae import (BadMagicError, CountMismatchError, DataError, RunLog,
                       TruncatedFileError, fixture_dataset, load_dataset,
                       load_idx_images, load_idx_labels, read_run_csv,
                       sample_per_class, synthesize_dataset, write_run_csv)
from complexae.dataio import write_idx_images, write_idx_labels


def test_idx_round_trip(tmp_path):
    rng = np.random.Generator(np.random.PCG64(71))
    raw = rng.integers(0, 256, (6, 28, 28), dtype=np.uint8)
    labels = np.array([0, 1, 2, 7, 8, 9], dtype=np.uint8)
    ip, lp = tmp_path / "imgs", tmp_path / "labs"
    write_idx_images(ip, raw)
    write_idx_labels(lp, labels)
    images, got_labels = load_dataset(ip, lp)
    assert np.array_equal(images, raw / 255.0)
    assert np.array_equal(got_labels, labels)


def test_bad_magic_reports_offset(tmp_path):
    path = tmp_path / "bad"
    path.write_bytes(struct.pack(">iiii", 0x12345678, 1, 28, 28) + b"\x00" * 784)
    with pytest.raises(BadMagicError) as exc:
        load_idx_images(path)
    assert exc.value.offset == 0
    with pytest.raises(BadMagicError):
        load_idx_labels(path)


def test_truncated_files_report_offset(tmp_path):
    header_only = tmp_path / "h"
    header_only.write_bytes(struct.pack(">ii", 0x803, 5))
    with pytest.raises(TruncatedFileError) as exc:
        load_idx_images(header_only)
    assert exc.value.offset == 8

    short_payload = tmp_path / "s"
    short_payload.write_bytes(struct.pack(">iiii", 0x803, 2, 28, 28) + b"\x00" * 100)
    with pytest.raises(TruncatedFileError) as exc:
        load_idx_images(short_payload)
    assert exc.value.offset == 16 + 100

    short_labels = tmp_path / "l"
    short_labels.write_bytes(struct.pack(">ii", 0x801, 10) + b"\x00" * 3)
    with pytest.raises(TruncatedFileError):
        load_idx_labels(short_labels)


def test_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "t"
    path.write_bytes(struct.pack(">iiii", 0x803, 1, 2, 2) + b"\x00" * 4 + b"junk")
    with pytest.raises(DataError):
        load_idx_images(path)


def test_image_label_count_mismatch(tmp_path):
    ip, lp = tmp_path / "i", tmp_path / "l"
    write_idx_images(ip, np.zeros((3, 28, 28), dtype=np.uint8))
    write_idx_labels(lp, np.zeros(4, dtype=np.uint8))
    with pytest.raises(CountMismatchError):
        load_dataset(ip, lp)


def test_non_digit_shape_rejected(tmp_path):
    ip, lp = tmp_path / "i", tmp_path / "l"
    write_idx_images(ip, np.zeros((2, 14, 14), dtype=np.uint8))
    write_idx_labels(lp, np.zeros(2, dtype=np.uint8))
    with pytest.raises(DataError):
        load_dataset(ip, lp)


def test_synthetic_dataset_shape_range_and_determinism():
    images, labels = synthesize_dataset(per_class=3, seed=9)
    assert images.shape == (30, 28, 28)
    assert labels.shape == (30,)
    assert images.min() >= 0.0 and images.max() <= 1.0
    assert np.array_equal(np.sort(np.unique(labels)), np.arange(10))
    again, _ = synthesize_dataset(per_class=3, seed=9)
    assert np.array_equal(images, again)
    other, _ = synthesize_dataset(per_class=3, seed=10)
    assert not np.array_equal(images, other)


def test_synthetic_classes_grow_by_prefix():
    small, small_labels = synthesize_dataset(per_class=2, seed=1)
    big, big_labels = synthesize_dataset(per_class=5, seed=1)
    for digit in range(10):
        s = small[small_labels == digit]
        b = big[big_labels == digit]
        assert np.array_equal(s, b[:2])


def test_synthetic_classes_are_distinct():
    images, labels = synthesize_dataset(per_class=1, seed=0)
    for i in range(10):
        for j in range(i + 1, 10):
            assert np.mean(np.abs(images[i] - images[j])) > 0.01


def test_sample_per_class_takes_prefix_and_validates():
    images, labels = synthesize_dataset(per_class=4, seed=2)
    sub_images, sub_labels = sample_per_class(images, labels, 2)
    assert sub_images.shape == (20, 28, 28)
    assert np.all(np.bincount(sub_labels, minlength=10) == 2)
    for digit in range(10):
        src = images[labels == digit][:2]
        assert np.array_equal(sub_images[sub_labels == digit], src)
    with pytest.raises(DataError):
        sample_per_class(images, labels, 5)


def test_fixture_dataset_loads():
    images, labels = fixture_dataset()
    assert images.shape == (64, 28, 28)
    assert labels.shape == (64,)
    assert images.min() >= 0.0 and images.max() <= 1.0
    assert set(np.unique(labels)) <= set(range(10))


def test_run_csv_round_trip_and_byte_determinism(tmp_path):
    log = RunLog(meta={"codec": "half-spectrum", "lr": "0.003"})
    log.append(0, 0.5719842695281672, 3.1401273894716)
    log.append(10, 1 / 3, float("inf"))
    log.append(20, 1e-17, -2.5)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_run_csv(a, log)
    write_run_csv(b, log)
    assert a.read_bytes() == b.read_bytes()
    back = read_run_csv(a)
    assert back.epochs == log.epochs
    assert back.costs == log.costs
    assert back.psnrs == log.psnrs
    assert back.meta == log.meta
    assert back.diverged_at is None


def test_run_csv_meta_lines_are_sorted(tmp_path):
    log = RunLog(meta={"zeta": "1", "alpha": "2"})
    log.append(0, 1.0, 2.0)
    path = tmp_path / "m.csv"
    write_run_csv(path, log)
    lines = path.read_text().splitlines()
    assert lines[0] == "# alpha=2"
    assert lines[1] == "# zeta=1"
    assert lines[2] == "epoch,cost,psnr"


def test_run_csv_records_divergence(tmp_path):
    log = RunLog(diverged_at=37)
    log.append(0, 1.0, 5.0)
    log.append(50, 1.0, 5.0)
    path = tmp_path / "d.csv"
    write_run_csv(path, log)
    back = read_run_csv(path)
    assert back.diverged_at == 37
    assert "diverged_at" not in back.meta


def test_run_csv_rejects_foreign_files(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("time,loss\n0,1\n")
    with pytest.raises(DataError):
        read_run_csv(path)
