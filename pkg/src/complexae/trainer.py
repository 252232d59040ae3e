"""Experiment configuration and training, plus the comparison studies.

A run is described by an :class:`ExperimentConfig`, which round-trips
through plain ``key=value`` text so configurations can be stored next
to their logs.  Training is full-batch steepest descent on the encoded
digit set; every run logs cost and reconstruction PSNR on a fixed
cadence, and reruns of one configuration write byte-identical CSVs.

The ``hidden`` width is quoted in strictly linear terms: a widely
linear network gets ``hidden // 2`` units so that both modes train the
same number of real weight parameters (the doubled weight matrices make
up for the halved width; only the hidden bias count differs).

Two studies build on the single-run loop: a learning-rate ladder that
finds where strictly linear training destabilizes and checks whether
the widely linear twin survives the same rate, and a sweep over the
phase-weight ``alpha`` of the phase-amplitude cost.
"""

import math
import os
from dataclasses import dataclass, fields, replace

import numpy as np

from . import backend, network, spectra
from .dataio import RunLog, sample_per_class, synthesize_dataset, write_run_csv
from .errors import ConfigError, DivergenceError
from .losses import CostKind, evaluate
from .network import Network, init_xavier
from .spectra import HalfSpectrumCodec, PixelPairCodec

CODECS = ("pixel-pair", "half-spectrum")

STREAM_INIT = 0
STREAM_SAMPLING = 1
STREAM_HELDOUT = 2


def derive_seed(master: int, stream: int) -> int:
    """Independent child seed for one of a run's random streams."""
    return int(np.random.SeedSequence((master, stream)).generate_state(1, np.uint64)[0])


def match_parameter_counts(hidden_strict: int) -> int:
    """Widely linear hidden width with the strictly linear weight count.

    Doubling the weight matrices at half the width keeps the number of
    real weight parameters equal; an odd reference width has no
    matching integer, so it is rejected.
    """
    if hidden_strict < 2 or hidden_strict % 2:
        raise ConfigError(f"hidden width {hidden_strict} has no parameter-matched half")
    return hidden_strict // 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one training run depends on."""

    codec: str = "half-spectrum"
    scale: float = 1.0
    cost: str = "normalized-mse"
    alpha: float = 1.0
    beta: float = 0.1
    mode: str = "widely"
    activation: str = "arctan"
    hidden: int = 32
    lr: float = 0.003
    epochs: int = 1000
    per_class: int = 50
    seed: int = 0
    data_seed: int = 0
    log_every: int = 10

    def __post_init__(self):
        if self.codec not in CODECS:
            raise ConfigError(f"unknown codec {self.codec!r}, expected one of {CODECS}")
        if self.mode not in network.MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.activation not in network.ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if self.epochs < 1 or self.per_class < 1 or self.log_every < 1:
            raise ConfigError("epochs, per_class, and log_every must be positive")
        if not self.lr > 0.0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        self.cost_kind  # validates cost, alpha, beta
        self.hidden_width  # validates hidden against mode

    @property
    def cost_kind(self) -> CostKind:
        return CostKind(tag=self.cost, alpha=self.alpha, beta=self.beta)

    @property
    def hidden_width(self) -> int:
        """Actual hidden layer width; ``hidden`` is the strictly linear reference."""
        if self.mode == "strictly":
            if self.hidden < 1:
                raise ConfigError(f"hidden width must be positive, got {self.hidden}")
            return self.hidden
        return match_parameter_counts(self.hidden)

    def build_codec(self):
        if self.codec == "pixel-pair":
            return PixelPairCodec(scale=self.scale)
        return HalfSpectrumCodec(scale=self.scale)

    def to_text(self) -> str:
        parts = []
        for f in fields(self):
            v = getattr(self, f.name)
            parts.append(f"{f.name}={v!r}" if f.type is float else f"{f.name}={v}")
        return "\n".join(parts) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in types:
                raise ConfigError(f"line {lineno}: unrecognized entry {line!r}")
            try:
                kwargs[key] = types[key](value.strip())
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from exc
        return cls(**kwargs)


def _log_meta(config: ExperimentConfig) -> dict[str, str]:
    meta = {}
    for f in fields(config):
        v = getattr(config, f.name)
        meta[f.name] = repr(v) if f.type is float else str(v)
    meta["backend"] = backend.backend_name()
    return meta


def train(config: ExperimentConfig, images: np.ndarray | None = None,
          labels: np.ndarray | None = None) -> tuple[Network, RunLog]:
    """Train one autoencoder per ``config``; returns the net and its log.

    With no dataset given, a synthetic one with ``per_class`` examples
    per digit is generated from ``data_seed``.  A supplied dataset is
    reduced to the first ``per_class`` examples of each class.  The
    logged cost is the batch-mean cost of the current parameters and
    the PSNR scores decoded reconstructions against the raw images.
    If training diverges, remaining log rows repeat the last finite
    values and the divergence epoch is recorded.
    """
    if images is None:
        images, labels = synthesize_dataset(per_class=config.per_class,
                                            seed=config.data_seed)
    images, labels = sample_per_class(images, labels, config.per_class)
    codec = config.build_codec()
    x = codec.encode(images)
    kind = config.cost_kind

    net = init_xavier(
        dims=[codec.width, config.hidden_width, codec.width],
        activations=config.activation,
        mode=config.mode,
        seed=derive_seed(config.seed, STREAM_INIT),
    )

    log = RunLog(meta=_log_meta(config))

    def measure(y: np.ndarray, value: float) -> tuple[float, float]:
        recon = codec.decode(y)
        return value, spectra.psnr(images, recon)

    def due(epoch: int) -> bool:
        return epoch % config.log_every == 0 or epoch == config.epochs

    y, tape = net.forward_tape(x)
    res = evaluate(kind, y, x)
    cost0, psnr0 = measure(y, res.value)
    log.append(0, cost0, psnr0)
    last = (cost0, psnr0)

    for epoch in range(1, config.epochs + 1):
        try:
            grads = net.backward(tape, res.d_a, res.d_astar)
            net.sgd_update(grads, config.lr)
            y, tape = net.forward_tape(x)
            res = evaluate(kind, y, x)
            if not math.isfinite(res.value):
                raise DivergenceError("cost is no longer finite")
        except DivergenceError:
            log.diverged_at = epoch
            for e in range(epoch, config.epochs + 1):
                if due(e):
                    log.append(e, *last)
            break
        if due(epoch):
            cost_e, psnr_e = measure(y, res.value)
            log.append(epoch, cost_e, psnr_e)
            last = (cost_e, psnr_e)

    return net, log


# ---------------------------------------------------------------------------
# learning-rate stability study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityRun:
    mode: str
    lr: float
    seed: int
    diverged: bool
    initial_cost: float
    final_cost: float

    @property
    def destabilized(self) -> bool:
        """Diverged outright, or ended above its starting cost."""
        return self.diverged or self.final_cost > self.initial_cost


@dataclass(frozen=True)
class StabilityReport:
    ladder: tuple[float, ...]
    seeds: tuple[int, ...]
    runs: list[StabilityRun]
    critical_lr: float | None
    wl_not_worse: int

    def summary(self) -> str:
        lines = []
        for r in self.runs:
            state = "destabilized" if r.destabilized else "stable"
            lines.append(f"{r.mode:<8} lr={r.lr:<7g} seed={r.seed} "
                         f"cost {r.initial_cost:.4g} -> {r.final_cost:.4g} ({state})")
        if self.critical_lr is None:
            lines.append("no learning rate on the ladder destabilized the "
                         "strictly linear runs")
        else:
            lines.append(f"largest destabilizing lr for strictly linear: "
                         f"{self.critical_lr:g}")
            lines.append(f"widely linear final cost <= strictly linear in "
                         f"{self.wl_not_worse}/{len(self.seeds)} seeds at that rate")
        return "\n".join(lines)


def _run_for_stability(config: ExperimentConfig, images, labels,
                       out_dir: str | None) -> StabilityRun:
    net, log = train(config, images, labels)
    final = math.inf if log.diverged_at is not None else log.final_cost
    if out_dir is not None:
        name = f"stability-{config.mode}-lr{config.lr:g}-seed{config.seed}.csv"
        write_run_csv(os.path.join(out_dir, name), log)
    return StabilityRun(mode=config.mode, lr=config.lr, seed=config.seed,
                        diverged=log.diverged_at is not None,
                        initial_cost=log.costs[0], final_cost=final)


def compare_stability(config: ExperimentConfig,
                      ladder: tuple[float, ...] = (0.003, 0.005, 0.006, 0.01),
                      seeds: tuple[int, ...] = (0, 1, 2),
                      images: np.ndarray | None = None,
                      labels: np.ndarray | None = None,
                      out_dir: str | None = None) -> StabilityReport:
    """Find where strictly linear training destabilizes, then race the twin.

    Walks the ladder from the largest rate down, training strictly
    linear runs over ``seeds``; the first rate that destabilizes a
    majority of them is the critical rate.  At that rate the widely
    linear twin (same ``hidden`` reference, so the same weight count)
    trains on the same seeds, and the report counts the seeds where its
    final cost is no worse.  If every rate is stable the report says so.
    """
    ladder = tuple(sorted(set(ladder)))
    runs: list[StabilityRun] = []
    critical = None
    for lr in reversed(ladder):
        sl = [_run_for_stability(replace(config, mode="strictly", lr=lr, seed=s),
                                 images, labels, out_dir)
              for s in seeds]
        runs.extend(sl)
        if sum(r.destabilized for r in sl) * 2 > len(seeds):
            critical = lr
            sl_at_critical = sl
            break
    wl_not_worse = 0
    if critical is not None:
        for s, sl_run in zip(seeds, sl_at_critical):
            wl_run = _run_for_stability(
                replace(config, mode="widely", lr=critical, seed=s),
                images, labels, out_dir)
            runs.append(wl_run)
            if wl_run.final_cost <= sl_run.final_cost:
                wl_not_worse += 1
    return StabilityReport(ladder=ladder, seeds=tuple(seeds), runs=runs,
                           critical_lr=critical, wl_not_worse=wl_not_worse)


# ---------------------------------------------------------------------------
# phase-weight sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaSweepReport:
    alphas: tuple[float, ...]
    seeds: tuple[int, ...]
    psnrs: list[list[float]]

    @property
    def mean_psnrs(self) -> list[float]:
        return [float(np.mean(row)) for row in self.psnrs]

    @property
    def best_alpha(self) -> float:
        means = self.mean_psnrs
        return self.alphas[int(np.argmax(means))]

    def summary(self) -> str:
        lines = []
        for alpha, mean, row in zip(self.alphas, self.mean_psnrs, self.psnrs):
            per_seed = ", ".join(f"{p:.2f}" for p in row)
            lines.append(f"alpha={alpha:<4g} mean psnr {mean:6.2f} dB  [{per_seed}]")
        lines.append(f"best alpha: {self.best_alpha:g}")
        return "\n".join(lines)


def sweep_alpha(config: ExperimentConfig,
                alphas: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0),
                seeds: tuple[int, ...] = (0, 1, 2),
                images: np.ndarray | None = None,
                labels: np.ndarray | None = None,
                out_dir: str | None = None) -> AlphaSweepReport:
    """Train the phase-amplitude cost across phase weights and seeds."""
    psnrs = []
    for alpha in alphas:
        row = []
        for s in seeds:
            cfg = replace(config, cost="phase-amplitude", alpha=alpha, seed=s)
            _, log = train(cfg, images, labels)
            if out_dir is not None:
                name = f"alpha{alpha:g}-seed{s}.csv"
                write_run_csv(os.path.join(out_dir, name), log)
            row.append(log.final_psnr)
        psnrs.append(row)
    return AlphaSweepReport(alphas=tuple(alphas), seeds=tuple(seeds), psnrs=psnrs)
