"""Numeric verification of CR gradients by central differences.

For a function ``f`` of a complex variable ``z = x + jy`` the two CR
derivatives follow from the partials in ``x`` and ``y``:

    df/dz     = (df/dx - j df/dy) / 2
    df/dzstar = (df/dx + j df/dy) / 2

Both partials are estimated with central differences of step ``h``, so
for smooth ``f`` the truncation error is O(h^2).  For a real-valued
cost the conjugate derivative estimated this way is the quantity the
analytic backward pass must reproduce.

The network check perturbs every real degree of freedom of every
trainable tensor; the numeric reference differentiates the reported
batch-mean cost, which is exactly what the analytic gradients
correspond to.  Points too close to a kink (a normalization floor, a zero modulus in a
phase term, an activation pole) make one-sided curvature leak into the
central difference; the check flags such configurations in the report
instead of silently comparing garbage there.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .losses import CostKind, evaluate
from .network import Network


def numeric_cr_pair(f: Callable, z0: complex, h: float = 1e-6) -> tuple[complex, complex]:
    """Central-difference estimate of ``(df/dz, df/dzstar)`` at ``z0``.

    ``f`` may be complex-valued; it is evaluated four times.
    """
    dfdx = (f(z0 + h) - f(z0 - h)) / (2.0 * h)
    dfdy = (f(z0 + 1j * h) - f(z0 - 1j * h)) / (2.0 * h)
    return 0.5 * (dfdx - 1j * dfdy), 0.5 * (dfdx + 1j * dfdy)


def numeric_cost_gradients(f: Callable, arr: np.ndarray,
                           h: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Numeric ``(d_a, d_astar)`` of a real scalar function of a complex array.

    ``f`` takes an array of ``arr``'s shape and returns a float.  Each
    entry is perturbed along its real and imaginary axes; four
    evaluations per entry.
    """
    arr = np.asarray(arr, dtype=np.complex128)
    das = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    work = arr.copy()
    for _ in it:
        idx = it.multi_index
        orig = work[idx]
        work[idx] = orig + h
        jp = f(work)
        work[idx] = orig - h
        jm = f(work)
        djdx = (jp - jm) / (2.0 * h)
        work[idx] = orig + 1j * h
        jp = f(work)
        work[idx] = orig - 1j * h
        jm = f(work)
        djdy = (jp - jm) / (2.0 * h)
        work[idx] = orig
        das[idx] = 0.5 * (djdx + 1j * djdy)
    return np.conj(das), das


@dataclass(frozen=True)
class TensorCheck:
    layer: int
    name: str
    max_abs_err: float
    rel_err: float


@dataclass(frozen=True)
class GradCheckReport:
    checks: list[TensorCheck]
    kink_notes: list[str]

    @property
    def worst_rel_err(self) -> float:
        return max(c.rel_err for c in self.checks)

    def ok(self, tol: float = 1e-6) -> bool:
        return self.worst_rel_err <= tol

    def summary(self) -> str:
        lines = [f"layer {c.layer:>2} {c.name:<6} rel_err {c.rel_err:.3e}"
                 for c in self.checks]
        for note in self.kink_notes:
            lines.append(f"note: {note}")
        lines.append(f"worst rel_err {self.worst_rel_err:.3e}")
        return "\n".join(lines)


def _rel_err(num: np.ndarray, ana: np.ndarray) -> tuple[float, float]:
    max_abs = float(np.max(np.abs(num - ana))) if num.size else 0.0
    scale = max(float(np.max(np.abs(num))) if num.size else 0.0,
                float(np.max(np.abs(ana))) if ana.size else 0.0,
                1e-300)
    return max_abs, max_abs / scale


def _kink_notes(net: Network, kind: CostKind, x: np.ndarray, target: np.ndarray,
                h: float) -> list[str]:
    notes = []
    y, tape = net.forward_tape(x)
    for i, act in enumerate(net.activations):
        if act == "arctan":
            closest = float(np.min(np.abs(1.0 + tape.z[i] * tape.z[i])))
            if closest < 1e3 * h:
                notes.append(f"layer {i}: arctan pole within {closest:.1e} of a "
                             "pre-activation; numeric estimates unreliable there")
    if kind.tag in ("normalized-mse", "phase-amplitude"):
        gap = float(np.min(np.abs(np.abs(target) ** 2 - kind.beta)))
        if gap < 10.0 * h:
            notes.append(f"a target modulus sits {gap:.1e} from the beta floor; "
                         "the normalization branch may flip under perturbation")
    if kind.tag == "phase-amplitude":
        y2 = np.atleast_2d(y)
        smallest = float(np.min(np.abs(y2)))
        if smallest < 1e3 * h:
            notes.append(f"a reconstruction modulus is {smallest:.1e}; the phase "
                         "term is non-differentiable at zero")
    return notes


def check_network_gradients(net: Network, kind: CostKind, x: np.ndarray,
                            target: np.ndarray | None = None,
                            h: float = 1e-6) -> GradCheckReport:
    """Compare analytic parameter gradients against central differences.

    ``x`` is a single input or a (B, n_in) batch; ``target`` defaults to
    ``x`` (autoencoder convention).  Every trainable tensor is checked,
    plus the gradient with respect to the input itself.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.complex128))
    target = x if target is None else np.atleast_2d(np.asarray(target, dtype=np.complex128))

    y, tape = net.forward_tape(x)
    res = evaluate(kind, y, target)
    grads = net.backward(tape, res.d_a, res.d_astar)

    def total_cost() -> float:
        return evaluate(kind, net.forward(x), target).value

    checks = []
    for i, lp in enumerate(net.layers):
        tensors = [("w1", lp.w1, grads.w1[i]), ("b", lp.b, grads.b[i])]
        if net.mode == "widely":
            tensors.insert(1, ("w2", lp.w2, grads.w2[i]))
        for name, arr, ana in tensors:
            def f(perturbed, _arr=arr):
                _arr[...] = perturbed
                return total_cost()
            saved = arr.copy()
            try:
                _, num = numeric_cost_gradients(f, saved, h=h)
            finally:
                arr[...] = saved
            max_abs, rel = _rel_err(num, ana)
            checks.append(TensorCheck(layer=i, name=name, max_abs_err=max_abs, rel_err=rel))

    def f_input(perturbed):
        return evaluate(kind, net.forward(perturbed), target).value

    _, num_in = numeric_cost_gradients(f_input, x, h=h)
    max_abs, rel = _rel_err(num_in, np.atleast_2d(grads.d_input_star))
    checks.append(TensorCheck(layer=-1, name="input", max_abs_err=max_abs, rel_err=rel))

    return GradCheckReport(checks=checks, kink_notes=_kink_notes(net, kind, x, target, h))
