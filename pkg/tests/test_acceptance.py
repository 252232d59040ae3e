"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (visible under ``pytest -s`` or on
failure) and enforces its stated runtime budget where one applies.  The
heavy reconstruction studies run at desk scale: 50 digits per class,
parameter-matched hidden widths quoted as 32 strictly linear units,
1000 epochs of full-batch descent at the studied learning rates.
"""

import time
from dataclasses import replace

import numpy as np

import complexae as cx
from complexae import kernels


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _random_complex(rng, shape, scale=1.5):
    return (rng.uniform(-scale, scale, shape)
            + 1j * rng.uniform(-scale, scale, shape))


def _report(ok: bool, label: str, detail: str) -> bool:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    return ok


DESK = cx.ExperimentConfig(mode="widely", hidden=32, lr=0.003, epochs=1000,
                           per_class=50, log_every=250)
DFT_SCALE = 2.0


def test_gradients_match_central_differences_everywhere():
    """Backprop agrees with numeric CR derivatives for every activation
    and cost combination on a 6-4-6 autoencoder."""
    t0 = time.perf_counter()
    rng = _rng(101)
    x = _random_complex(rng, (3, 6))
    kinds = [cx.CostKind("mse"),
             cx.CostKind("normalized-mse", beta=0.1),
             cx.CostKind("phase-amplitude", alpha=0.0, beta=0.1),
             cx.CostKind("phase-amplitude", alpha=1.0, beta=0.1),
             cx.CostKind("phase-amplitude", alpha=2.0, beta=0.1)]
    worst = 0.0
    checked = 0
    for act in ("arctan", "split-arctan"):
        for kind in kinds:
            net = cx.init_xavier([6, 4, 6], activations=act, mode="widely",
                                 seed=313)
            report = cx.check_network_gradients(net, kind, x, h=1e-6)
            worst = max(worst, report.worst_rel_err)
            checked += 1
            assert report.kink_notes == [], report.kink_notes
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 30.0
    assert _report(ok, "gradient check",
                   f"worst rel err {worst:.2e} over {checked} "
                   f"activation/cost combos ({dt:.1f}s < 30s)")


def test_cost_identities_and_real_equivalence():
    """The amplitude/phase split sums back to the squared error, the
    phase-amplitude cost at alpha=1 is the normalized cost, and the
    widely linear transform matches its real composite form."""
    t0 = time.perf_counter()
    rng = _rng(102)
    n_pairs = 10_000
    y = _random_complex(rng, (n_pairs, 8))
    x = _random_complex(rng, (n_pairs, 8))

    amp, phase = cx.factorize_mse(y, x)
    split_err = float(np.max(np.abs(amp + phase - np.abs(y - x) ** 2)))

    pa_vals, pa_das = kernels.active.pa_terms(y, x, 1.0, 0.1, 1e-12)
    nm_vals, nm_das = kernels.active.nmse_terms(y, x, 0.1)
    reduce_err = max(float(np.max(np.abs(pa_vals - nm_vals))),
                     float(np.max(np.abs(pa_das - nm_das))))

    composite_err = 0.0
    for _ in range(1000):
        m, n = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        w1 = _random_complex(rng, (m, n))
        w2 = _random_complex(rng, (m, n))
        a = _random_complex(rng, (n,))
        b = np.zeros(m, dtype=np.complex128)
        direct = cx.widely_linear(w1, w2, b, a)
        via_real = cx.to_real_composite(w1, w2).apply(a)
        composite_err = max(composite_err, float(np.max(np.abs(direct - via_real))))

    dt = time.perf_counter() - t0
    ok = (split_err <= 1e-12 and reduce_err <= 1e-12
          and composite_err <= 1e-12 and dt < 5.0)
    assert _report(ok, "cost identities",
                   f"split {split_err:.2e}, alpha=1 reduction {reduce_err:.2e} "
                   f"over {n_pairs} pairs; real equivalence {composite_err:.2e} "
                   f"over 1000 transforms ({dt:.1f}s < 5s)")


def test_phase_swap_behaviour():
    """Swapping an image's phases with its own is the identity, and a
    cross swap keeps one donor's magnitudes and the other's phases."""
    t0 = time.perf_counter()
    images, _ = cx.synthesize_dataset(per_class=1, seed=17)
    self_err = max(float(np.max(np.abs(cx.phase_swap(img, img) - img)))
                   for img in images)
    mag_err = 0.0
    phase_err = 0.0
    for i, j in ((0, 1), (3, 7), (4, 9), (2, 6)):
        swapped = cx.phase_swap(images[i], images[j])
        fs = np.fft.fft2(swapped, norm="ortho")
        fa = np.fft.fft2(images[i], norm="ortho")
        fb = np.fft.fft2(images[j], norm="ortho")
        mag_err = max(mag_err, float(np.max(np.abs(np.abs(fs) - np.abs(fa)))))
        keep = np.abs(fs) > 1e-8
        delta = np.angle(fs[keep]) - np.angle(fb[keep])
        delta = (delta + np.pi) % (2 * np.pi) - np.pi
        phase_err = max(phase_err, float(np.max(np.abs(delta))))
    dt = time.perf_counter() - t0
    ok = self_err <= 1e-10 and mag_err <= 1e-10 and phase_err <= 1e-8 and dt < 1.0
    assert _report(ok, "phase swap",
                   f"self-swap {self_err:.2e}, magnitude drift {mag_err:.2e}, "
                   f"donor phase mismatch {phase_err:.2e} ({dt:.2f}s < 1s)")


def test_codecs_round_trip_digits():
    """Both image/vector codecs reproduce 100 digits exactly."""
    t0 = time.perf_counter()
    images, _ = cx.synthesize_dataset(per_class=10, seed=23)
    worst = 0.0
    for codec in (cx.PixelPairCodec(), cx.HalfSpectrumCodec(),
                  cx.HalfSpectrumCodec(scale=DFT_SCALE)):
        out = codec.decode(codec.encode(images))
        worst = max(worst, float(np.max(np.abs(out - images))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 5.0
    assert _report(ok, "codec round trip",
                   f"max abs error {worst:.2e} on 100 digits ({dt:.1f}s < 5s)")


def test_spectrum_training_beats_pixel_training():
    """At desk scale the normalized spectrum cost beats plain spectrum
    MSE, which beats pixel-pair MSE, by at least 0.3 dB averaged over
    three seeds."""
    t0 = time.perf_counter()
    seeds = (0, 1, 2)
    setups = {
        "nmse+dft": replace(DESK, codec="half-spectrum", scale=DFT_SCALE,
                            cost="normalized-mse"),
        "mse+dft": replace(DESK, codec="half-spectrum", scale=DFT_SCALE,
                           cost="mse"),
        "mse+pixel": replace(DESK, codec="pixel-pair", scale=1.0, cost="mse"),
    }
    means = {}
    for name, base in setups.items():
        finals = []
        for seed in seeds:
            _, log = cx.train(replace(base, seed=seed))
            assert log.diverged_at is None
            finals.append(log.final_psnr)
        means[name] = float(np.mean(finals))
    dt = time.perf_counter() - t0
    m1 = means["nmse+dft"] - means["mse+dft"]
    m2 = means["mse+dft"] - means["mse+pixel"]
    ok = m1 >= 0.3 and m2 >= 0.3 and dt < 900.0
    assert _report(ok, "reconstruction ordering",
                   f"nmse+dft {means['nmse+dft']:.2f} dB, mse+dft "
                   f"{means['mse+dft']:.2f} dB, mse+pixel {means['mse+pixel']:.2f} dB; "
                   f"margins {m1:.2f} / {m2:.2f} dB ({dt:.0f}s < 900s)")


def test_widely_linear_survives_strictly_linear_instability():
    """On the studied rate ladder, either no rate destabilizes strictly
    linear pixel-pair training (reported honestly), or at the largest
    destabilizing rate the widely linear twin ends no worse in at least
    two of three seeds."""
    t0 = time.perf_counter()
    base = replace(DESK, codec="pixel-pair", scale=1.0, cost="mse")
    report = cx.compare_stability(base, ladder=(0.003, 0.005, 0.006, 0.01),
                                  seeds=(0, 1, 2))
    dt = time.perf_counter() - t0
    if report.critical_lr is None:
        by_lr = {lr: [r for r in report.runs if r.lr == lr and r.mode == "strictly"]
                 for lr in report.ladder}
        ok = all(len(rs) == 3 and sum(r.destabilized for r in rs) * 2 <= 3
                 for rs in by_lr.values())
        detail = (f"no rate on {report.ladder} destabilized a majority of "
                  f"strictly linear seeds; reported honestly ({dt:.0f}s)")
    else:
        ok = report.wl_not_worse >= 2
        detail = (f"largest destabilizing lr {report.critical_lr:g}; widely "
                  f"linear no worse in {report.wl_not_worse}/3 seeds ({dt:.0f}s)")
    print("\n" + report.summary())
    assert _report(ok, "stability race", detail)


def test_phase_weight_sweep_contains_no_regression():
    """The best phase weight over the sweep is at least as good as the
    plain normalized cost (alpha = 1), averaged over three seeds."""
    t0 = time.perf_counter()
    base = replace(DESK, codec="half-spectrum", scale=DFT_SCALE,
                   cost="phase-amplitude", epochs=500)
    report = cx.sweep_alpha(base, alphas=(0.5, 1.0, 2.0, 4.0), seeds=(0, 1, 2))
    dt = time.perf_counter() - t0
    means = report.mean_psnrs
    at_one = means[report.alphas.index(1.0)]
    best = max(means)
    ok = best >= at_one and all(np.isfinite(means))
    print("\n" + report.summary())
    assert _report(ok, "phase weight sweep",
                   f"best mean {best:.2f} dB vs {at_one:.2f} dB at alpha=1 "
                   f"({dt:.0f}s)")


def test_reruns_are_bitwise_identical(tmp_path):
    """Training the same configuration twice writes identical CSV bytes."""
    t0 = time.perf_counter()
    cfg = replace(DESK, codec="half-spectrum", scale=DFT_SCALE,
                  cost="normalized-mse", per_class=5, epochs=50, log_every=10)
    paths = []
    for name in ("first.csv", "second.csv"):
        _, log = cx.train(cfg)
        path = tmp_path / name
        cx.write_run_csv(path, log)
        paths.append(path)
    same = paths[0].read_bytes() == paths[1].read_bytes()
    dt = time.perf_counter() - t0
    ok = same and len(paths[0].read_bytes()) > 0
    assert _report(ok, "bitwise reruns",
                   f"two runs of one config wrote identical CSVs "
                   f"({len(paths[0].read_bytes())} bytes, {dt:.1f}s)")
