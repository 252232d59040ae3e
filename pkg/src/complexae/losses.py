"""Reconstruction costs and their conjugate gradients.

Three real-valued costs over complex reconstructions ``y`` against
targets ``x``:

* ``mse``: mean squared modulus of the error, ``mean_k |y_k - x_k|^2``.
* ``normalized-mse``: the same with each entry divided by
  ``max(|x_k|^2, beta)``, so small-magnitude targets are not drowned
  out by large ones.
* ``phase-amplitude``: splits each entry's squared error into an
  amplitude part ``(|y|-|x|)^2`` and a phase part
  ``2|y||x|(1 - cos(angle(y)-angle(x)))``, then applies weight
  ``alpha`` to the phase part under the same per-entry normalization
  as ``normalized-mse``.  ``alpha = 1`` recovers ``normalized-mse``
  exactly.

Each cost returns its value together with the pair of CR gradients with
respect to the reconstruction.  The conjugate gradient ``d_astar`` is
the steepest-descent direction; since the costs are real,
``d_a = conj(d_astar)``.

For a batch (2-D input) the value is the mean per-sample cost and the
gradient rows are scaled by the batch size, so summing them downstream
differentiates exactly the reported mean.  Stability of a gradient
descent step is then independent of how many samples share a batch.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, ShapeError

_PHASE_EPS = 1e-12

_TAGS = ("mse", "normalized-mse", "phase-amplitude")


@dataclass(frozen=True)
class CostKind:
    """Cost selector: a tag plus the parameters the tagged cost uses."""

    tag: str
    alpha: float = 1.0
    beta: float = 0.1

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ConfigError(f"unknown cost tag {self.tag!r}, expected one of {_TAGS}")
        if self.tag != "mse" and not self.beta > 0.0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.tag == "phase-amplitude" and self.alpha < 0.0:
            raise ConfigError(f"alpha must be non-negative, got {self.alpha}")

    @property
    def label(self) -> str:
        if self.tag == "mse":
            return "mse"
        if self.tag == "normalized-mse":
            return f"normalized-mse(beta={self.beta:g})"
        return f"phase-amplitude(alpha={self.alpha:g},beta={self.beta:g})"


@dataclass(frozen=True)
class CostResult:
    value: float
    d_a: np.ndarray
    d_astar: np.ndarray


def _prep(y: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, bool]:
    y = np.ascontiguousarray(np.asarray(y, dtype=np.complex128))
    x = np.ascontiguousarray(np.asarray(x, dtype=np.complex128))
    if y.shape != x.shape:
        raise ShapeError(f"reconstruction and target disagree: {y.shape} vs {x.shape}")
    if y.ndim == 1:
        return y[None, :], x[None, :], True
    if y.ndim == 2:
        return y, x, False
    raise ShapeError(f"expected 1-D or 2-D arrays, got {y.ndim}-D")


def _pack(vals: np.ndarray, das: np.ndarray, squeeze: bool) -> CostResult:
    das = das / das.shape[0]
    if squeeze:
        das = das[0]
    return CostResult(value=float(np.mean(vals)), d_a=np.conj(das), d_astar=das)


def mse(y: np.ndarray, x: np.ndarray) -> CostResult:
    y, x, squeeze = _prep(y, x)
    vals, das = kernels.active.mse_terms(y, x)
    return _pack(vals, das, squeeze)


def normalized_mse(y: np.ndarray, x: np.ndarray, beta: float = 0.1) -> CostResult:
    if not beta > 0.0:
        raise ConfigError(f"beta must be positive, got {beta}")
    y, x, squeeze = _prep(y, x)
    vals, das = kernels.active.nmse_terms(y, x, beta)
    return _pack(vals, das, squeeze)


def phase_amplitude(y: np.ndarray, x: np.ndarray, alpha: float = 1.0,
                    beta: float = 0.1) -> CostResult:
    if not beta > 0.0:
        raise ConfigError(f"beta must be positive, got {beta}")
    if alpha < 0.0:
        raise ConfigError(f"alpha must be non-negative, got {alpha}")
    y, x, squeeze = _prep(y, x)
    vals, das = kernels.active.pa_terms(y, x, alpha, beta, _PHASE_EPS)
    return _pack(vals, das, squeeze)


def evaluate(kind: CostKind, y: np.ndarray, x: np.ndarray) -> CostResult:
    """Evaluate the cost selected by ``kind``."""
    if kind.tag == "mse":
        return mse(y, x)
    if kind.tag == "normalized-mse":
        return normalized_mse(y, x, beta=kind.beta)
    return phase_amplitude(y, x, alpha=kind.alpha, beta=kind.beta)


def factorize_mse(y: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``|y - x|^2`` into amplitude and phase parts, elementwise.

    Returns ``(amp, phase)`` with ``amp = (|y| - |x|)^2`` and
    ``phase = 2 |y| |x| (1 - cos(angle(y) - angle(x)))``; their sum
    equals the squared error exactly.  The phase part is computed as
    ``2 (|y||x| - Re(y conj(x)))``, which avoids evaluating any angles
    and is exact at zeros of either factor.
    """
    y = np.asarray(y, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if y.shape != x.shape:
        raise ShapeError(f"reconstruction and target disagree: {y.shape} vs {x.shape}")
    ay = np.abs(y)
    ax = np.abs(x)
    amp = (ay - ax) ** 2
    phase = 2.0 * (ay * ax - (y * np.conj(x)).real)
    return amp, phase
