"""Fully connected complex autoencoder with conjugate-gradient backprop.

Layers compute ``z = w1 a + w2 conj(a) + b`` followed by an elementwise
activation.  In ``widely`` mode both weight matrices train; in
``strictly`` mode ``w2`` is pinned to zero and only ``w1`` and ``b``
train, but the forward and backward code paths are identical, so a
strictly linear network is reproduced bit for bit by a widely linear
one whose conjugate weights are zero.

Backpropagation tracks the two CR gradients of the real cost with
respect to every activation and pre-activation.  Writing ``d_a`` for
the gradient with respect to a value and ``d_astar`` for the gradient
with respect to its conjugate, one layer's recursion is

    d_z      = d_a * f_z     + d_astar * conj(f_zstar)
    d_zstar  = d_a * f_zstar + d_astar * conj(f_z)
    d_a_prev     = d_z @ w1 + d_zstar @ conj(w2)
    d_astar_prev = d_z @ w2 + d_zstar @ conj(w1)

and the steepest-descent parameter gradients are

    g_w1 = d_zstar^T @ conj(a_prev)
    g_w2 = d_zstar^T @ a_prev
    g_b  = sum over the batch of d_zstar.

Gradients over a batch are sums of the per-sample gradients.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (ConfigError, DataError, DivergenceError, ShapeError,
                     SingularityError)

ACTIVATIONS = ("arctan", "split-arctan", "identity")
MODES = ("widely", "strictly")

_MAGIC = b"CXAE"
_VERSION = 1


@dataclass
class LayerParams:
    """One layer's direct and conjugate matrices and its bias."""

    w1: np.ndarray
    w2: np.ndarray
    b: np.ndarray

    @property
    def n_out(self) -> int:
        return self.w1.shape[0]

    @property
    def n_in(self) -> int:
        return self.w1.shape[1]


@dataclass
class ForwardTape:
    """Everything the backward pass needs from one forward pass."""

    a0: np.ndarray
    z: list[np.ndarray]
    a: list[np.ndarray]
    squeezed: bool


@dataclass
class Gradients:
    """Conjugate parameter gradients plus the deltas at the input."""

    w1: list[np.ndarray]
    w2: list[np.ndarray]
    b: list[np.ndarray]
    d_input: np.ndarray = field(default=None, repr=False)
    d_input_star: np.ndarray = field(default=None, repr=False)


def _act_val_deriv(kind: str, z: np.ndarray):
    """Activation value and its CR derivative pair.

    Returns ``(a, f_z, f_zstar)``; ``f_zstar`` is None for holomorphic
    activations and both derivatives are None for the identity.
    """
    if kind == "identity":
        return z, None, None
    if kind == "arctan":
        if np.any(z == 1j) or np.any(z == -1j):
            raise SingularityError("arctan pre-activation hit a pole at +/-1j")
        a, fz = kernels.active.atan_val_deriv(z)
        return a, fz, None
    a, fz, fzs = kernels.active.split_atan_val_deriv(z)
    return a, fz, fzs


def _act_forward(kind: str, z: np.ndarray) -> np.ndarray:
    if kind == "identity":
        return z
    if kind == "arctan":
        if np.any(z == 1j) or np.any(z == -1j):
            raise SingularityError("arctan pre-activation hit a pole at +/-1j")
        return kernels.active.atan_forward(z)
    return kernels.active.split_atan_forward(z)


@dataclass
class Network:
    layers: list[LayerParams]
    activations: list[str]
    mode: str = "widely"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if len(self.activations) != len(self.layers):
            raise ConfigError(
                f"{len(self.layers)} layers but {len(self.activations)} activations")
        for act in self.activations:
            if act not in ACTIVATIONS:
                raise ConfigError(f"unknown activation {act!r}, expected one of {ACTIVATIONS}")
        for i, lp in enumerate(self.layers):
            if lp.w1.shape != lp.w2.shape:
                raise ShapeError(f"layer {i}: w1 {lp.w1.shape} vs w2 {lp.w2.shape}")
            if lp.b.shape != (lp.n_out,):
                raise ShapeError(f"layer {i}: bias {lp.b.shape}, expected ({lp.n_out},)")
            if i > 0 and lp.n_in != self.layers[i - 1].n_out:
                raise ShapeError(
                    f"layer {i} expects {lp.n_in} inputs but layer {i - 1} emits "
                    f"{self.layers[i - 1].n_out}")
        if self.mode == "strictly":
            for i, lp in enumerate(self.layers):
                if np.any(lp.w2 != 0):
                    raise ConfigError(f"strictly linear network has nonzero w2 in layer {i}")

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.layers[0].n_in,) + tuple(lp.n_out for lp in self.layers)

    def _prep_input(self, a: np.ndarray) -> tuple[np.ndarray, bool]:
        a = np.ascontiguousarray(np.asarray(a, dtype=np.complex128))
        squeezed = a.ndim == 1
        if squeezed:
            a = a[None, :]
        if a.ndim != 2 or a.shape[1] != self.dims[0]:
            raise ShapeError(f"expected input width {self.dims[0]}, got shape {a.shape}")
        return a, squeezed

    def forward(self, a: np.ndarray) -> np.ndarray:
        """Network output for a vector or a (B, n_in) batch."""
        a, squeezed = self._prep_input(a)
        for lp, act in zip(self.layers, self.activations):
            # overflow here is the divergence we are about to report, not a bug
            with np.errstate(over="ignore", invalid="ignore"):
                z = a @ lp.w1.T + np.conj(a) @ lp.w2.T + lp.b
            if not np.all(np.isfinite(z)):
                raise DivergenceError("non-finite pre-activation; training has diverged")
            a = np.ascontiguousarray(_act_forward(act, z))
        return a[0] if squeezed else a

    def forward_tape(self, a: np.ndarray) -> tuple[np.ndarray, ForwardTape]:
        """Forward pass that also records per-layer values for backward."""
        a, squeezed = self._prep_input(a)
        tape = ForwardTape(a0=a, z=[], a=[], squeezed=squeezed)
        for lp, act in zip(self.layers, self.activations):
            with np.errstate(over="ignore", invalid="ignore"):
                z = np.ascontiguousarray(a @ lp.w1.T + np.conj(a) @ lp.w2.T + lp.b)
            if not np.all(np.isfinite(z)):
                raise DivergenceError("non-finite pre-activation; training has diverged")
            a = np.ascontiguousarray(_act_forward(act, z))
            tape.z.append(z)
            tape.a.append(a)
        y = a[0] if squeezed else a
        return y, tape

    def backward(self, tape: ForwardTape, d_a: np.ndarray, d_astar: np.ndarray) -> Gradients:
        """Backpropagate cost gradients seeded at the output activation."""
        d_a = np.ascontiguousarray(np.asarray(d_a, dtype=np.complex128))
        d_astar = np.ascontiguousarray(np.asarray(d_astar, dtype=np.complex128))
        if tape.squeezed:
            d_a = d_a[None, :]
            d_astar = d_astar[None, :]
        if d_a.shape != tape.a[-1].shape or d_astar.shape != tape.a[-1].shape:
            raise ShapeError(
                f"gradient seeds {d_a.shape} do not match output {tape.a[-1].shape}")
        g = Gradients(w1=[None] * len(self.layers), w2=[None] * len(self.layers),
                      b=[None] * len(self.layers))
        for i in range(len(self.layers) - 1, -1, -1):
            lp = self.layers[i]
            _, fz, fzs = _act_val_deriv(self.activations[i], tape.z[i])
            if fz is None:
                dz, dzs = d_a, d_astar
            elif fzs is None:
                dz, dzs = kernels.active.chain_holo(d_a, d_astar, fz)
            else:
                dz, dzs = kernels.active.chain_full(d_a, d_astar, fz, fzs)
            a_prev = tape.a[i - 1] if i > 0 else tape.a0
            g.w1[i] = dzs.T @ np.conj(a_prev)
            g.w2[i] = dzs.T @ a_prev
            g.b[i] = dzs.sum(axis=0)
            d_a = dz @ lp.w1 + dzs @ np.conj(lp.w2)
            d_astar = dz @ lp.w2 + dzs @ np.conj(lp.w1)
        g.d_input = d_a[0] if tape.squeezed else d_a
        g.d_input_star = d_astar[0] if tape.squeezed else d_astar
        return g

    def sgd_update(self, grads: Gradients, lr: float) -> None:
        """One steepest-descent step; conjugate weights stay frozen in strictly mode."""
        for lp, gw1, gw2, gb in zip(self.layers, grads.w1, grads.w2, grads.b):
            lp.w1 -= lr * gw1
            if self.mode == "widely":
                lp.w2 -= lr * gw2
            lp.b -= lr * gb

    def count_real_parameters(self) -> int:
        """Trainable real degrees of freedom (a complex entry counts twice)."""
        total = 0
        for lp in self.layers:
            total += 2 * lp.w1.size + 2 * lp.b.size
            if self.mode == "widely":
                total += 2 * lp.w2.size
        return total

    def copy(self) -> "Network":
        return Network(
            layers=[LayerParams(lp.w1.copy(), lp.w2.copy(), lp.b.copy())
                    for lp in self.layers],
            activations=list(self.activations),
            mode=self.mode,
        )


def init_xavier(dims, activations="arctan", mode: str = "widely",
                seed: int = 0) -> Network:
    """Network with Glorot-uniform weights drawn from one seeded stream.

    Real and imaginary parts are drawn uniformly from
    ``+/- sqrt(6 / (n_in + n_out))``.  Per layer the draw order is the
    direct matrix then the conjugate matrix, each real part before
    imaginary part.  Strictly linear mode zeroes the conjugate draw
    instead of skipping it, so both modes consume the stream identically
    and share their direct weights at every layer for the same seed.
    Biases start at zero.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ConfigError(f"need at least two positive layer widths, got {dims}")
    if isinstance(activations, str):
        activations = [activations] * (len(dims) - 1)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    layers = []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (n_in + n_out))
        w1 = (rng.uniform(-limit, limit, (n_out, n_in))
              + 1j * rng.uniform(-limit, limit, (n_out, n_in)))
        w2 = (rng.uniform(-limit, limit, (n_out, n_in))
              + 1j * rng.uniform(-limit, limit, (n_out, n_in)))
        if mode != "widely":
            w2 = np.zeros_like(w2)
        layers.append(LayerParams(w1=w1, w2=w2, b=np.zeros(n_out, dtype=np.complex128)))
    return Network(layers=layers, activations=list(activations), mode=mode)


def save_checkpoint(net: Network, path) -> None:
    """Write a network to ``path``.

    Layout: magic ``CXAE``, little-endian u32 version and u32 header
    length, a JSON header (dims, mode, activations), then each layer's
    w1, w2, b as row-major little-endian complex128.
    """
    header = json.dumps({
        "dims": list(net.dims),
        "mode": net.mode,
        "activations": list(net.activations),
    }).encode("utf-8")
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _VERSION, len(header)))
        f.write(header)
        for lp in net.layers:
            for arr in (lp.w1, lp.w2, lp.b):
                f.write(np.ascontiguousarray(arr, dtype=np.complex128).astype("<c16").tobytes())


def load_checkpoint(path) -> Network:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != _MAGIC:
        raise DataError(f"not a checkpoint: bad magic {blob[:4]!r}")
    if len(blob) < 12:
        raise DataError("truncated checkpoint header")
    version, hlen = struct.unpack_from("<II", blob, 4)
    if version != _VERSION:
        raise DataError(f"unsupported checkpoint version {version}")
    if len(blob) < 12 + hlen:
        raise DataError("truncated checkpoint header")
    try:
        meta = json.loads(blob[12:12 + hlen].decode("utf-8"))
        dims = [int(d) for d in meta["dims"]]
        mode = meta["mode"]
        activations = list(meta["activations"])
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"malformed checkpoint header: {exc}") from exc
    offset = 12 + hlen
    layers = []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        arrs = []
        for shape in ((n_out, n_in), (n_out, n_in), (n_out,)):
            nbytes = int(np.prod(shape)) * 16
            if offset + nbytes > len(blob):
                raise DataError("truncated checkpoint payload")
            arrs.append(np.frombuffer(blob, dtype="<c16", count=int(np.prod(shape)),
                                      offset=offset).reshape(shape).astype(np.complex128))
            offset += nbytes
        layers.append(LayerParams(w1=arrs[0], w2=arrs[1], b=arrs[2]))
    if offset != len(blob):
        raise DataError(f"checkpoint has {len(blob) - offset} trailing bytes")
    return Network(layers=layers, activations=activations, mode=mode)
