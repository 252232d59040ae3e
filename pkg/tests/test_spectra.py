import numpy as np
import pytest

from complexae import (HalfSpectrumCodec, PixelPairCodec, ShapeError,
                       phase_swap, psnr, synthesize_dataset, write_pgm)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def test_pixel_pair_encoding_matches_manual_pairing():
    rng = _rng(61)
    img = rng.uniform(0, 1, (28, 28))
    codec = PixelPairCodec()
    vec = codec.encode(img)
    assert vec.shape == (codec.width,) == (392,)
    flat = img.reshape(-1)
    for k in range(392):
        assert vec[k] == complex(flat[2 * k], flat[2 * k + 1])


def test_pixel_pair_round_trip_is_exact():
    rng = _rng(62)
    imgs = rng.uniform(0, 1, (5, 28, 28))
    codec = PixelPairCodec()
    assert np.array_equal(codec.decode(codec.encode(imgs)), imgs)


def test_half_spectrum_round_trip_on_random_images():
    rng = _rng(63)
    imgs = rng.uniform(0, 1, (5, 28, 28))
    codec = HalfSpectrumCodec()
    out = codec.decode(codec.encode(imgs))
    assert np.max(np.abs(out - imgs)) < 1e-13


def test_half_spectrum_round_trip_on_digits():
    imgs, _ = synthesize_dataset(per_class=2, seed=4)
    codec = HalfSpectrumCodec()
    out = codec.decode(codec.encode(imgs))
    assert np.max(np.abs(out - imgs)) < 1e-13


def test_half_spectrum_keeps_the_redundant_free_half():
    rng = _rng(64)
    img = rng.uniform(0, 1, (28, 28))
    codec = HalfSpectrumCodec()
    assert codec.width == 28 * 15 == 420
    vec = codec.encode(img)
    full = np.fft.fft2(img, norm="ortho")
    assert np.allclose(vec.reshape(28, 15), full[:, :15], atol=1e-14, rtol=0)


def test_scale_multiplies_coefficients_and_cancels_on_decode():
    rng = _rng(65)
    img = rng.uniform(0, 1, (28, 28))
    for codec_cls in (PixelPairCodec, HalfSpectrumCodec):
        plain = codec_cls()
        scaled = codec_cls(scale=2.5)
        assert np.allclose(scaled.encode(img), 2.5 * plain.encode(img),
                           atol=1e-14, rtol=0)
        assert np.max(np.abs(scaled.decode(scaled.encode(img)) - img)) < 1e-13


def test_half_spectrum_decode_projects_arbitrary_vectors():
    """Decoding forces a real image, so encode(decode(v)) is idempotent."""
    rng = _rng(66)
    codec = HalfSpectrumCodec()
    v = rng.normal(size=420) + 1j * rng.normal(size=420)
    once = codec.encode(codec.decode(v))
    twice = codec.encode(codec.decode(once))
    assert np.max(np.abs(twice - once)) < 1e-12
    assert np.all(np.isreal(codec.decode(v)))


def test_phase_swap_with_itself_is_identity():
    imgs, _ = synthesize_dataset(per_class=1, seed=5)
    for img in imgs[:4]:
        assert np.max(np.abs(phase_swap(img, img) - img)) < 1e-10


def test_phase_swap_preserves_magnitudes_and_takes_donor_phases():
    imgs, _ = synthesize_dataset(per_class=1, seed=6)
    a, b = imgs[3], imgs[7]
    swapped = phase_swap(a, b)
    fs = np.fft.fft2(swapped, norm="ortho")
    fa = np.fft.fft2(a, norm="ortho")
    fb = np.fft.fft2(b, norm="ortho")
    assert np.max(np.abs(np.abs(fs) - np.abs(fa))) < 1e-10
    significant = np.abs(fs) > 1e-8
    delta = np.angle(fs[significant]) - np.angle(fb[significant])
    delta = (delta + np.pi) % (2 * np.pi) - np.pi
    assert np.max(np.abs(delta)) < 1e-8


def test_psnr_reference_values():
    zeros = np.zeros((4, 4))
    assert psnr(zeros, zeros) == np.inf
    half = np.full((4, 4), 0.5)
    assert psnr(zeros, half) == pytest.approx(10 * np.log10(1 / 0.25), rel=1e-12)
    # pooling a batch equals scoring the stacked pixels at once
    rng = _rng(67)
    ref = rng.uniform(0, 1, (3, 4, 4))
    test = rng.uniform(0, 1, (3, 4, 4))
    assert psnr(ref, test) == pytest.approx(
        psnr(ref.reshape(-1), test.reshape(-1)), rel=1e-14)


def test_write_pgm_layout(tmp_path):
    img = np.array([[0.0, 0.5, 1.0], [2.0, -1.0, 0.25]])
    path = tmp_path / "out.pgm"
    write_pgm(path, img)
    blob = path.read_bytes()
    assert blob.startswith(b"P5\n3 2\n255\n")
    payload = blob[len(b"P5\n3 2\n255\n"):]
    assert payload == bytes([0, 128, 255, 255, 0, 64])


def test_shape_validation():
    codec = PixelPairCodec()
    with pytest.raises(ShapeError):
        codec.encode(np.zeros((27, 28)))
    with pytest.raises(ShapeError):
        codec.decode(np.zeros(100, dtype=np.complex128))
    with pytest.raises(ShapeError):
        PixelPairCodec(shape=(3, 3))
    with pytest.raises(ShapeError):
        HalfSpectrumCodec().decode(np.zeros(100, dtype=np.complex128))
    with pytest.raises(ShapeError):
        phase_swap(np.zeros((4, 4)), np.zeros((5, 5)))
    with pytest.raises(ShapeError):
        psnr(np.zeros(3), np.zeros(4))
    with pytest.raises(ShapeError):
        write_pgm("x.pgm", np.zeros(9))
