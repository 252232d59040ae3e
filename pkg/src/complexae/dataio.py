"""Digit datasets (real or synthesized) and training run logs.

IDX files (the MNIST container format) are parsed strictly: big-endian
magic and counts, exact payload length, with parse errors that carry
the byte offset of the problem.  When no real dataset is on disk the
synthetic generator draws procedural digit images from per-class stroke
skeletons with jittered geometry; they are not MNIST, but they give
each class a stable spectral signature at the same 28 x 28 size, which
is what the reconstruction experiments need to run self-contained.

Training histories are kept in :class:`RunLog` and serialized as CSV
with ``%.17g`` floats, so a rerun with the same configuration produces
byte-identical files and a diff catches any drift.
"""

import os
import struct
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import (BadMagicError, CountMismatchError, DataError,
                     TruncatedFileError)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

DATA_DIR_ENV = "COMPLEXAE_DATA_DIR"
IMAGES_BASENAME = "train-images-idx3-ubyte"
LABELS_BASENAME = "train-labels-idx1-ubyte"


# ---------------------------------------------------------------------------
# IDX parsing and writing
# ---------------------------------------------------------------------------

def _read_i32(buf: bytes, offset: int, what: str) -> int:
    if offset + 4 > len(buf):
        raise TruncatedFileError(f"file ends inside {what}", offset)
    return struct.unpack_from(">i", buf, offset)[0]


def load_idx_images(path) -> np.ndarray:
    """Images from an IDX3 file as float64 in [0, 1], shape (N, H, W)."""
    with open(path, "rb") as f:
        buf = f.read()
    magic = _read_i32(buf, 0, "magic")
    if magic != IMAGE_MAGIC:
        raise BadMagicError(f"expected image magic {IMAGE_MAGIC:#010x}, got {magic:#010x}", 0)
    n = _read_i32(buf, 4, "image count")
    h = _read_i32(buf, 8, "row count")
    w = _read_i32(buf, 12, "column count")
    if n < 0 or h <= 0 or w <= 0:
        raise DataError(f"nonsensical IDX dimensions n={n}, h={h}, w={w}")
    need = 16 + n * h * w
    if len(buf) < need:
        raise TruncatedFileError(
            f"payload needs {need} bytes, file has {len(buf)}", len(buf))
    if len(buf) > need:
        raise DataError(f"{len(buf) - need} trailing bytes after image payload")
    raw = np.frombuffer(buf, dtype=np.uint8, count=n * h * w, offset=16)
    return raw.reshape(n, h, w).astype(np.float64) / 255.0


def load_idx_labels(path) -> np.ndarray:
    """Labels from an IDX1 file as int64, shape (N,)."""
    with open(path, "rb") as f:
        buf = f.read()
    magic = _read_i32(buf, 0, "magic")
    if magic != LABEL_MAGIC:
        raise BadMagicError(f"expected label magic {LABEL_MAGIC:#010x}, got {magic:#010x}", 0)
    n = _read_i32(buf, 4, "label count")
    if n < 0:
        raise DataError(f"negative label count {n}")
    if len(buf) < 8 + n:
        raise TruncatedFileError(f"payload needs {8 + n} bytes, file has {len(buf)}", len(buf))
    if len(buf) > 8 + n:
        raise DataError(f"{len(buf) - 8 - n} trailing bytes after label payload")
    return np.frombuffer(buf, dtype=np.uint8, count=n, offset=8).astype(np.int64)


def load_dataset(images_path, labels_path) -> tuple[np.ndarray, np.ndarray]:
    """Load and cross-check an image/label IDX pair of 28 x 28 digits."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise CountMismatchError(
            f"{images.shape[0]} images but {labels.shape[0]} labels", 4)
    if images.shape[1:] != (28, 28):
        raise DataError(f"expected 28 x 28 digits, got {images.shape[1:]}")
    return images, labels


def write_idx_images(path, images: np.ndarray) -> None:
    """Write uint8 images, shape (N, H, W), as an IDX3 file."""
    images = np.ascontiguousarray(images, dtype=np.uint8)
    n, h, w = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", IMAGE_MAGIC, n, h, w))
        f.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    """Write labels, shape (N,), as an IDX1 file."""
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">ii", LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes())


# ---------------------------------------------------------------------------
# synthetic digits
# ---------------------------------------------------------------------------

# Per-class stroke skeletons as polylines in the unit square (x right,
# y down).  Rendering jitters these, so no two instances are identical.
_SKELETONS: dict[int, list[list[tuple[float, float]]]] = {
    0: [[(0.50, 0.18), (0.70, 0.26), (0.74, 0.50), (0.70, 0.74),
         (0.50, 0.82), (0.30, 0.74), (0.26, 0.50), (0.30, 0.26), (0.50, 0.18)]],
    1: [[(0.38, 0.30), (0.54, 0.18), (0.54, 0.82)], [(0.38, 0.82), (0.68, 0.82)]],
    2: [[(0.30, 0.32), (0.42, 0.20), (0.62, 0.20), (0.70, 0.34),
         (0.62, 0.50), (0.32, 0.80), (0.72, 0.80)]],
    3: [[(0.32, 0.22), (0.62, 0.20), (0.70, 0.34), (0.58, 0.48),
         (0.70, 0.64), (0.60, 0.80), (0.30, 0.78)], [(0.44, 0.48), (0.58, 0.48)]],
    4: [[(0.62, 0.82), (0.62, 0.18), (0.28, 0.62), (0.76, 0.62)]],
    5: [[(0.68, 0.20), (0.34, 0.20), (0.32, 0.48), (0.58, 0.44),
         (0.70, 0.58), (0.62, 0.78), (0.30, 0.78)]],
    6: [[(0.64, 0.20), (0.40, 0.36), (0.30, 0.58), (0.38, 0.78),
         (0.62, 0.78), (0.68, 0.58), (0.54, 0.48), (0.34, 0.54)]],
    7: [[(0.28, 0.20), (0.72, 0.20), (0.46, 0.82)], [(0.38, 0.52), (0.62, 0.52)]],
    8: [[(0.50, 0.20), (0.66, 0.28), (0.62, 0.44), (0.50, 0.50),
         (0.38, 0.44), (0.34, 0.28), (0.50, 0.20)],
        [(0.50, 0.50), (0.68, 0.58), (0.66, 0.76), (0.50, 0.82),
         (0.34, 0.76), (0.32, 0.58), (0.50, 0.50)]],
    9: [[(0.66, 0.46), (0.46, 0.52), (0.32, 0.40), (0.38, 0.22),
         (0.60, 0.18), (0.68, 0.34), (0.66, 0.46), (0.58, 0.82)]],
}


def _render_strokes(points_list, thickness: float) -> np.ndarray:
    n = 28
    c = (np.arange(n) + 0.5) / n
    px, py = np.meshgrid(c, c)
    img = np.zeros((n, n))
    for pts in points_list:
        pts = np.asarray(pts)
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            dx, dy = x1 - x0, y1 - y0
            seg2 = dx * dx + dy * dy
            if seg2 == 0.0:
                d2 = (px - x0) ** 2 + (py - y0) ** 2
            else:
                t = np.clip(((px - x0) * dx + (py - y0) * dy) / seg2, 0.0, 1.0)
                d2 = (px - x0 - t * dx) ** 2 + (py - y0 - t * dy) ** 2
            np.maximum(img, np.exp(-d2 / (2.0 * thickness * thickness)), out=img)
    return img


def synthesize_digit(digit: int, rng: np.random.Generator) -> np.ndarray:
    """One jittered 28 x 28 uint8 instance of the given digit class."""
    if digit not in _SKELETONS:
        raise DataError(f"no skeleton for digit {digit}")
    theta = rng.normal(0.0, 0.07)
    scale = 1.0 + rng.normal(0.0, 0.05)
    shift = rng.normal(0.0, 0.035, size=2)
    thickness = max(0.028, 0.045 + rng.normal(0.0, 0.004))
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    warped = []
    for pts in _SKELETONS[digit]:
        p = np.asarray(pts) - 0.5
        warped.append((scale * (p @ rot.T)) + 0.5 + shift)
    img = _render_strokes(warped, thickness)
    return np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)


def synthesize_dataset(per_class: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Per-class jittered digits as ([0, 1] floats, labels), class-major.

    Each class draws from its own seeded substream, so the first k
    instances of a class are the same for any requested size.
    """
    images = np.empty((10 * per_class, 28, 28), dtype=np.float64)
    labels = np.empty(10 * per_class, dtype=np.int64)
    for digit in range(10):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, digit))))
        for i in range(per_class):
            images[digit * per_class + i] = synthesize_digit(digit, rng) / 255.0
        labels[digit * per_class: (digit + 1) * per_class] = digit
    return images, labels


def sample_per_class(images: np.ndarray, labels: np.ndarray, per_class: int,
                     rng: np.random.Generator | None = None) -> tuple[np.ndarray, np.ndarray]:
    """First (or randomly chosen) ``per_class`` examples of each digit."""
    picked = []
    for digit in range(10):
        idx = np.flatnonzero(labels == digit)
        if idx.size < per_class:
            raise DataError(f"class {digit} has {idx.size} examples, need {per_class}")
        if rng is None:
            picked.append(idx[:per_class])
        else:
            picked.append(rng.choice(idx, size=per_class, replace=False))
    sel = np.concatenate(picked)
    return images[sel], labels[sel]


def fixture_dataset() -> tuple[np.ndarray, np.ndarray]:
    """The small digit set shipped with the package (64 images)."""
    root = resources.files("complexae") / "fixtures"
    with resources.as_file(root / IMAGES_BASENAME) as ip, \
            resources.as_file(root / LABELS_BASENAME) as lp:
        return load_dataset(ip, lp)


def resolve_dataset(data_dir: str | None = None, per_class: int = 250,
                    seed: int = 0) -> tuple[np.ndarray, np.ndarray, str]:
    """Dataset for experiments: IDX files if present, else synthetic.

    Looks for ``train-images-idx3-ubyte`` and ``train-labels-idx1-ubyte``
    in ``data_dir`` (default: the ``COMPLEXAE_DATA_DIR`` env var).
    Returns (images, labels, source) where source is the directory used
    or ``"synthetic"``.
    """
    data_dir = data_dir or os.environ.get(DATA_DIR_ENV)
    if data_dir:
        ip = os.path.join(data_dir, IMAGES_BASENAME)
        lp = os.path.join(data_dir, LABELS_BASENAME)
        if os.path.exists(ip) and os.path.exists(lp):
            images, labels = load_dataset(ip, lp)
            return images, labels, data_dir
    images, labels = synthesize_dataset(per_class=per_class, seed=seed)
    return images, labels, "synthetic"


# ---------------------------------------------------------------------------
# run logs
# ---------------------------------------------------------------------------

@dataclass
class RunLog:
    """Per-epoch training history, one row per logged epoch."""

    epochs: list[int] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    psnrs: list[float] = field(default_factory=list)
    diverged_at: int | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def append(self, epoch: int, cost: float, psnr: float) -> None:
        self.epochs.append(int(epoch))
        self.costs.append(float(cost))
        self.psnrs.append(float(psnr))

    @property
    def final_cost(self) -> float:
        return self.costs[-1]

    @property
    def final_psnr(self) -> float:
        return self.psnrs[-1]


def write_run_csv(path, log: RunLog) -> None:
    """Serialize a run log; identical runs produce identical bytes.

    Floats are printed with ``%.17g`` so values survive the round trip
    exactly.  Metadata goes into sorted ``# key=value`` header lines.
    """
    meta = dict(log.meta)
    if log.diverged_at is not None:
        meta["diverged_at"] = str(log.diverged_at)
    lines = [f"# {k}={meta[k]}" for k in sorted(meta)]
    lines.append("epoch,cost,psnr")
    for e, c, p in zip(log.epochs, log.costs, log.psnrs):
        lines.append(f"{e},{c:.17g},{p:.17g}")
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_run_csv(path) -> RunLog:
    log = RunLog()
    with open(path, "r", encoding="ascii") as f:
        rows = [line.rstrip("\n") for line in f]
    body = []
    for line in rows:
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            log.meta[key] = value
        elif line:
            body.append(line)
    if not body or body[0] != "epoch,cost,psnr":
        raise DataError(f"unrecognized run log header in {path}")
    for line in body[1:]:
        e, c, p = line.split(",")
        log.append(int(e), float(c), float(p))
    if "diverged_at" in log.meta:
        log.diverged_at = int(log.meta.pop("diverged_at"))
    return log
