"""Hot elementwise kernels, in numba and pure-numpy flavors.

Everything here operates on 2-D complex128 batches of shape (B, N): the
arctan activations with their CR derivatives, the per-entry cost kernels
with their conjugate seed gradients, plus the elementwise chain-rule
combine of the backward pass.  These dominate the non-BLAS part of a
training epoch, so they carry ``@njit`` twins; the pure-numpy versions
are the fallback and the reference the backend equivalence tests compare
against.  Pick the backend with the ``COMPLEXAE_BACKEND`` env var (see
:mod:`complexae.backend`).

Matrix products deliberately stay out of this module: both backends run
them through numpy's BLAS.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backend import USE_NUMBA


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _atan_forward_np(z):
    return np.arctan(z)


def _atan_val_deriv_np(z):
    return np.arctan(z), 1.0 / (1.0 + z * z)


def _split_atan_forward_np(z):
    return np.arctan(z.real) + 1j * np.arctan(z.imag)


def _split_atan_val_deriv_np(z):
    gx = 1.0 / (1.0 + z.real * z.real)
    gy = 1.0 / (1.0 + z.imag * z.imag)
    a = np.arctan(z.real) + 1j * np.arctan(z.imag)
    fz = (0.5 * (gx + gy)).astype(np.complex128)
    fzs = (0.5 * (gx - gy)).astype(np.complex128)
    return a, fz, fzs


def _chain_full_np(da, das, fz, fzs):
    dz = da * fz + das * np.conj(fzs)
    dzs = da * fzs + das * np.conj(fz)
    return dz, dzs


def _chain_holo_np(da, das, fz):
    return da * fz, das * np.conj(fz)


def _mse_terms_np(y, x):
    n = y.shape[1]
    r = y - x
    vals = np.mean(r.real * r.real + r.imag * r.imag, axis=1)
    return vals, r / n


def _nmse_terms_np(y, x, beta):
    n = y.shape[1]
    r = y - x
    denom = np.maximum(x.real * x.real + x.imag * x.imag, beta)
    vals = np.mean((r.real * r.real + r.imag * r.imag) / denom, axis=1)
    return vals, r / denom / n


def _pa_terms_np(y, x, alpha, beta, eps):
    n = y.shape[1]
    ay = np.abs(y)
    ax = np.abs(x)
    denom = np.maximum(ax * ax, beta)
    cross = 2.0 * (ay * ax - (x * np.conj(y)).real)
    vals = np.mean(((ay - ax) ** 2 + alpha * cross) / denom, axis=1)
    # subgradient convention: the |x|/|y| factor contributes 0 at |y| <= eps
    ratio = np.where(ay > eps, ax / np.where(ay > eps, ay, 1.0), 0.0)
    das = ((1.0 - (1.0 - alpha) * ratio) * y - alpha * x) / denom / n
    return vals, das


# ---------------------------------------------------------------------------
# loop implementations (numba-compiled when the numba backend is active)
# ---------------------------------------------------------------------------

def _atan_forward_loop(z):
    out = np.empty_like(z)
    for i in range(z.shape[0]):
        for k in range(z.shape[1]):
            out[i, k] = cmath.atan(z[i, k])
    return out


def _atan_val_deriv_loop(z):
    a = np.empty_like(z)
    fz = np.empty_like(z)
    for i in range(z.shape[0]):
        for k in range(z.shape[1]):
            v = z[i, k]
            a[i, k] = cmath.atan(v)
            fz[i, k] = 1.0 / (1.0 + v * v)
    return a, fz


def _split_atan_forward_loop(z):
    out = np.empty_like(z)
    for i in range(z.shape[0]):
        for k in range(z.shape[1]):
            v = z[i, k]
            out[i, k] = complex(math.atan(v.real), math.atan(v.imag))
    return out


def _split_atan_val_deriv_loop(z):
    a = np.empty_like(z)
    fz = np.empty_like(z)
    fzs = np.empty_like(z)
    for i in range(z.shape[0]):
        for k in range(z.shape[1]):
            v = z[i, k]
            gx = 1.0 / (1.0 + v.real * v.real)
            gy = 1.0 / (1.0 + v.imag * v.imag)
            a[i, k] = complex(math.atan(v.real), math.atan(v.imag))
            fz[i, k] = complex(0.5 * (gx + gy), 0.0)
            fzs[i, k] = complex(0.5 * (gx - gy), 0.0)
    return a, fz, fzs


def _chain_full_loop(da, das, fz, fzs):
    dz = np.empty_like(da)
    dzs = np.empty_like(da)
    for i in range(da.shape[0]):
        for k in range(da.shape[1]):
            dz[i, k] = da[i, k] * fz[i, k] + das[i, k] * np.conj(fzs[i, k])
            dzs[i, k] = da[i, k] * fzs[i, k] + das[i, k] * np.conj(fz[i, k])
    return dz, dzs


def _chain_holo_loop(da, das, fz):
    dz = np.empty_like(da)
    dzs = np.empty_like(da)
    for i in range(da.shape[0]):
        for k in range(da.shape[1]):
            dz[i, k] = da[i, k] * fz[i, k]
            dzs[i, k] = das[i, k] * np.conj(fz[i, k])
    return dz, dzs


def _mse_terms_loop(y, x):
    b, n = y.shape
    vals = np.zeros(b)
    das = np.empty_like(y)
    for i in range(b):
        acc = 0.0
        for k in range(n):
            r = y[i, k] - x[i, k]
            acc += r.real * r.real + r.imag * r.imag
            das[i, k] = r / n
        vals[i] = acc / n
    return vals, das


def _nmse_terms_loop(y, x, beta):
    b, n = y.shape
    vals = np.zeros(b)
    das = np.empty_like(y)
    for i in range(b):
        acc = 0.0
        for k in range(n):
            xv = x[i, k]
            d = xv.real * xv.real + xv.imag * xv.imag
            if d < beta:
                d = beta
            r = y[i, k] - x[i, k]
            acc += (r.real * r.real + r.imag * r.imag) / d
            das[i, k] = r / d / n
        vals[i] = acc / n
    return vals, das


def _pa_terms_loop(y, x, alpha, beta, eps):
    b, n = y.shape
    vals = np.zeros(b)
    das = np.empty_like(y)
    for i in range(b):
        acc = 0.0
        for k in range(n):
            yv = y[i, k]
            xv = x[i, k]
            ay = abs(yv)
            ax = abs(xv)
            d = ax * ax
            if d < beta:
                d = beta
            cross = 2.0 * (ay * ax - (xv * np.conj(yv)).real)
            acc += ((ay - ax) ** 2 + alpha * cross) / d
            ratio = ax / ay if ay > eps else 0.0
            das[i, k] = ((1.0 - (1.0 - alpha) * ratio) * yv - alpha * xv) / d / n
        vals[i] = acc / n
    return vals, das


# ---------------------------------------------------------------------------
# backend assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Kernels:
    name: str
    atan_forward: Callable
    atan_val_deriv: Callable
    split_atan_forward: Callable
    split_atan_val_deriv: Callable
    chain_full: Callable
    chain_holo: Callable
    mse_terms: Callable
    nmse_terms: Callable
    pa_terms: Callable


_NUMPY_KERNELS = Kernels(
    name="numpy",
    atan_forward=_atan_forward_np,
    atan_val_deriv=_atan_val_deriv_np,
    split_atan_forward=_split_atan_forward_np,
    split_atan_val_deriv=_split_atan_val_deriv_np,
    chain_full=_chain_full_np,
    chain_holo=_chain_holo_np,
    mse_terms=_mse_terms_np,
    nmse_terms=_nmse_terms_np,
    pa_terms=_pa_terms_np,
)

_numba_kernels = None


def _build_numba() -> Kernels:
    global _numba_kernels
    if _numba_kernels is None:
        from numba import njit

        jit = njit(cache=True)
        _numba_kernels = Kernels(
            name="numba",
            atan_forward=jit(_atan_forward_loop),
            atan_val_deriv=jit(_atan_val_deriv_loop),
            split_atan_forward=jit(_split_atan_forward_loop),
            split_atan_val_deriv=jit(_split_atan_val_deriv_loop),
            chain_full=jit(_chain_full_loop),
            chain_holo=jit(_chain_holo_loop),
            mse_terms=jit(_mse_terms_loop),
            nmse_terms=jit(_nmse_terms_loop),
            pa_terms=jit(_pa_terms_loop),
        )
    return _numba_kernels


def get_kernels(use_numba: bool) -> Kernels:
    """Kernel set for an explicit backend (used by tests and the benchmark)."""
    return _build_numba() if use_numba else _NUMPY_KERNELS


def warmup(kernels: Kernels | None = None) -> None:
    """Trigger jit compilation on tiny inputs so timed paths run hot."""
    ks = active if kernels is None else kernels
    z = np.array([[0.3 + 0.1j, -0.2 + 0.4j]])
    x = np.array([[0.5 - 0.2j, 0.1 + 0.1j]])
    ks.atan_forward(z)
    a, fz = ks.atan_val_deriv(z)
    ks.split_atan_forward(z)
    _, sfz, sfzs = ks.split_atan_val_deriv(z)
    ks.chain_full(z, np.conj(z), fz, sfzs)
    ks.chain_holo(z, np.conj(z), fz)
    ks.mse_terms(z, x)
    ks.nmse_terms(z, x, 0.1)
    ks.pa_terms(z, x, 1.0, 0.1, 1e-12)


active = get_kernels(USE_NUMBA)
