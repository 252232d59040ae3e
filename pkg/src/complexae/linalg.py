"""Strictly and widely linear transforms and their real equivalents.

A strictly linear layer computes ``W a + b`` and commutes with complex
scaling.  A widely linear layer adds a conjugate branch,
``W1 a + W2 conj(a) + b``, which is the most general transform that is
linear over the reals.  Two equivalent views of the same map are
provided for analysis and testing: the augmented block matrix acting on
``[a; conj(a)]``, and the real composite matrix acting on
``[Re(a); Im(a)]``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


def _check_pair(w1: np.ndarray, w2: np.ndarray) -> None:
    if w1.ndim != 2 or w2.ndim != 2:
        raise ShapeError(f"weight matrices must be 2-D, got {w1.ndim}-D and {w2.ndim}-D")
    if w1.shape != w2.shape:
        raise ShapeError(f"direct and conjugate weights disagree: {w1.shape} vs {w2.shape}")


def strictly_linear(w: np.ndarray, b: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``w @ a + b`` for a single vector or a (B, n_in) batch."""
    if a.ndim == 1:
        return w @ a + b
    return a @ w.T + b


def widely_linear(w1: np.ndarray, w2: np.ndarray, b: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``w1 @ a + w2 @ conj(a) + b`` for a single vector or a (B, n_in) batch."""
    _check_pair(w1, w2)
    if a.ndim == 1:
        return w1 @ a + w2 @ np.conj(a) + b
    return a @ w1.T + np.conj(a) @ w2.T + b


@dataclass(frozen=True)
class AugmentedMatrix:
    """Block view ``[[w1, w2], [conj(w2), conj(w1)]]`` of a widely linear map.

    Acting on the augmented vector ``[a; conj(a)]`` it reproduces the
    transform and its conjugate in one matrix product, which is the
    standard trick for porting strictly-linear algebra to the widely
    linear case.
    """

    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self):
        _check_pair(self.w1, self.w2)

    @property
    def shape(self) -> tuple[int, int]:
        m, n = self.w1.shape
        return 2 * m, 2 * n

    def as_matrix(self) -> np.ndarray:
        top = np.hstack([self.w1, self.w2])
        bottom = np.hstack([np.conj(self.w2), np.conj(self.w1)])
        return np.vstack([top, bottom])

    def augment(self, a: np.ndarray) -> np.ndarray:
        if a.ndim != 1 or a.shape[0] != self.w1.shape[1]:
            raise ShapeError(f"expected a vector of length {self.w1.shape[1]}, got {a.shape}")
        return np.concatenate([a, np.conj(a)])

    def apply(self, a: np.ndarray) -> np.ndarray:
        """Top half of the augmented product: the transform output itself."""
        return (self.as_matrix() @ self.augment(a))[: self.w1.shape[0]]


@dataclass(frozen=True)
class RealCompositeTransform:
    """Real 2m x 2n matrix equivalent to a widely linear complex map.

    With ``a = x + jy``, ``w1 = p + jq`` and ``w2 = r + js`` the output
    ``z = w1 a + w2 conj(a)`` separates into

        Re(z) = (p + r) x + (s - q) y
        Im(z) = (q + s) x + (p - r) y

    so the blocks below applied to ``[x; y]`` give ``[Re(z); Im(z)]``.
    Every real linear map of this doubled shape corresponds to exactly
    one (w1, w2) pair, which is what makes the widely linear transform
    the complex form of an unconstrained real layer.
    """

    m11: np.ndarray
    m12: np.ndarray
    m21: np.ndarray
    m22: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.vstack([
            np.hstack([self.m11, self.m12]),
            np.hstack([self.m21, self.m22]),
        ])

    def apply(self, a: np.ndarray) -> np.ndarray:
        """Apply to a complex vector, returning the complex result."""
        if a.ndim != 1 or a.shape[0] != self.m11.shape[1]:
            raise ShapeError(f"expected a vector of length {self.m11.shape[1]}, got {a.shape}")
        u = np.concatenate([a.real, a.imag])
        v = self.as_matrix() @ u
        m = self.m11.shape[0]
        return v[:m] + 1j * v[m:]


def to_real_composite(w1: np.ndarray, w2: np.ndarray) -> RealCompositeTransform:
    """Real composite blocks of the widely linear pair (w1, w2)."""
    _check_pair(w1, w2)
    return RealCompositeTransform(
        m11=(w1 + w2).real.copy(),
        m12=(w2 - w1).imag.copy(),
        m21=(w1 + w2).imag.copy(),
        m22=(w1 - w2).real.copy(),
    )


def from_real_composite(t: RealCompositeTransform) -> tuple[np.ndarray, np.ndarray]:
    """Invert :func:`to_real_composite`; the round trip is exact."""
    w1 = 0.5 * ((t.m11 + t.m22) + 1j * (t.m21 - t.m12))
    w2 = 0.5 * ((t.m11 - t.m22) + 1j * (t.m21 + t.m12))
    return w1, w2
