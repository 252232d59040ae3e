"""Codecs between images and complex vectors, plus phase swapping and PSNR.

Two ways to present a real image to a complex network:

* :class:`PixelPairCodec` packs adjacent row-major pixel pairs into
  complex numbers (even pixel real, odd pixel imaginary), which uses
  the complex plane as plain storage.
* :class:`HalfSpectrumCodec` takes the unitary 2-D DFT and keeps the
  left half of the columns; the rest is redundant for real images
  because their spectra satisfy ``F(h, w) = conj(F(-h, -w))`` with
  indices mod the image size.  Here magnitude and phase carry the
  physically meaningful structure.

Both codecs round-trip real images exactly up to floating point.  A
``scale`` factor multiplies encoded vectors (and divides on decode) so
the coefficient range can be matched to an activation's useful range.

:func:`phase_swap` crosses the magnitudes of one image with the phases
of another, the classic demonstration that phase carries most of the
perceptual content.  :func:`psnr` scores reconstructions against a
peak value of 1.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


def _as_batch(images: np.ndarray, shape: tuple[int, int]) -> tuple[np.ndarray, bool]:
    images = np.asarray(images, dtype=np.float64)
    squeezed = images.ndim == 2
    if squeezed:
        images = images[None]
    if images.ndim != 3 or images.shape[1:] != shape:
        raise ShapeError(f"expected images of shape {shape}, got {images.shape}")
    return images, squeezed


def _as_vec_batch(vectors: np.ndarray, width: int) -> tuple[np.ndarray, bool]:
    vectors = np.asarray(vectors, dtype=np.complex128)
    squeezed = vectors.ndim == 1
    if squeezed:
        vectors = vectors[None]
    if vectors.ndim != 2 or vectors.shape[1] != width:
        raise ShapeError(f"expected vectors of width {width}, got {vectors.shape}")
    return vectors, squeezed


@dataclass(frozen=True)
class PixelPairCodec:
    """Adjacent row-major pixel pairs as real/imaginary parts."""

    shape: tuple[int, int] = (28, 28)
    scale: float = 1.0

    def __post_init__(self):
        h, w = self.shape
        if (h * w) % 2:
            raise ShapeError(f"pixel pairing needs an even pixel count, got {h}x{w}")

    @property
    def width(self) -> int:
        return self.shape[0] * self.shape[1] // 2

    def encode(self, images: np.ndarray) -> np.ndarray:
        images, squeezed = _as_batch(images, self.shape)
        flat = images.reshape(images.shape[0], -1)
        vec = (flat[:, 0::2] + 1j * flat[:, 1::2]) * self.scale
        return vec[0] if squeezed else vec

    def decode(self, vectors: np.ndarray) -> np.ndarray:
        vectors, squeezed = _as_vec_batch(vectors, self.width)
        vec = vectors / self.scale
        flat = np.empty((vec.shape[0], 2 * self.width), dtype=np.float64)
        flat[:, 0::2] = vec.real
        flat[:, 1::2] = vec.imag
        out = flat.reshape(vec.shape[0], *self.shape)
        return out[0] if squeezed else out


@dataclass(frozen=True)
class HalfSpectrumCodec:
    """Left half of the unitary 2-D DFT of a real image."""

    shape: tuple[int, int] = (28, 28)
    scale: float = 1.0

    @property
    def kept_cols(self) -> int:
        return self.shape[1] // 2 + 1

    @property
    def width(self) -> int:
        return self.shape[0] * self.kept_cols

    def encode(self, images: np.ndarray) -> np.ndarray:
        images, squeezed = _as_batch(images, self.shape)
        spec = np.fft.fft2(images, norm="ortho")
        vec = spec[:, :, :self.kept_cols].reshape(images.shape[0], -1) * self.scale
        return vec[0] if squeezed else vec

    def decode(self, vectors: np.ndarray) -> np.ndarray:
        vectors, squeezed = _as_vec_batch(vectors, self.width)
        h, w = self.shape
        kept = vectors.reshape(-1, h, self.kept_cols) / self.scale
        spec = np.zeros((kept.shape[0], h, w), dtype=np.complex128)
        spec[:, :, :self.kept_cols] = kept
        rows = (h - np.arange(h)) % h
        for col in range(self.kept_cols, w):
            spec[:, :, col] = np.conj(spec[:, rows, (w - col) % w])
        out = np.fft.ifft2(spec, norm="ortho").real
        return out[0] if squeezed else out


def phase_swap(magnitude_of: np.ndarray, phase_of: np.ndarray) -> np.ndarray:
    """Image with the first argument's spectral magnitudes and the second's phases.

    The swapped spectrum inherits conjugate symmetry (even magnitudes,
    odd phases), so the inverse transform is real up to rounding; the
    result is returned without clipping.
    """
    a = np.asarray(magnitude_of, dtype=np.float64)
    b = np.asarray(phase_of, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ShapeError(f"need two images of one shape, got {a.shape} and {b.shape}")
    fa = np.fft.fft2(a, norm="ortho")
    fb = np.fft.fft2(b, norm="ortho")
    swapped = np.abs(fa) * np.exp(1j * np.angle(fb))
    return np.fft.ifft2(swapped, norm="ortho").real


def psnr(reference: np.ndarray, test: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for an exact match.

    Pooled over everything passed in, so handing it image batches gives
    the batch-level score directly.
    """
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise ShapeError(f"shape mismatch: {reference.shape} vs {test.shape}")
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


def write_pgm(path, image: np.ndarray) -> None:
    """Write a [0, 1] grayscale image as binary PGM (clipped, 8-bit)."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ShapeError(f"expected a 2-D image, got {image.shape}")
    q = np.clip(np.rint(np.clip(image, 0.0, 1.0) * 255.0), 0, 255).astype(np.uint8)
    h, w = image.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(q.tobytes())
