"""Benchmark the decoding kernels with and without JIT compilation.

The accelerated/interpreted choice is made once at import time via the
``MIMO3D_DISABLE_NUMBA`` environment variable, so this script re-launches
itself in a subprocess for each configuration and compares throughput.

Usage:
    python3 benchmarks/bench_kernels.py [--trials N] [--snr DB]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_batch(trials: int, snr_db: float) -> dict:
    import numpy as np

    from mimo3d import NUMBA_ENABLED, channel, stbc
    from mimo3d.constellation import make_qam
    from mimo3d.decoders import simplified_ml_decode, sphere_decode_se
    from mimo3d.structured_qr import gram_schmidt_qr, qr_r23

    qam = make_qam(4)
    g = stbc.generator_matrix()
    rng = np.random.default_rng(0)

    instances = []
    for _ in range(trials):
        h = channel.draw_channel(rng)
        heq = channel.equivalent_channel(h, g)
        s = rng.choice(qam.points, size=8)
        y = channel.transmit(stbc.encode(s), h, channel.NoiseConfig(snr_db), rng)
        factors = gram_schmidt_qr(heq)
        instances.append((channel.realize_received(y), heq, factors,
                          qr_r23(factors.block(2, 3))))

    # warm-up triggers JIT compilation so it is excluded from the timing
    y0, heq0, f0, r0 = instances[0]
    sphere_decode_se(y0, heq0, qam, factors=f0)
    simplified_ml_decode(y0, heq0, qam, factors=f0, r23_factors=r0)

    out = {"jit": NUMBA_ENABLED, "trials": trials, "snr_db": snr_db}
    for name, fn in (("sphere", lambda a: sphere_decode_se(a[0], a[1], qam, factors=a[2])),
                     ("simplified", lambda a: simplified_ml_decode(
                         a[0], a[1], qam, factors=a[2], r23_factors=a[3]))):
        t0 = time.perf_counter()
        for inst in instances:
            fn(inst)
        out[name + "_ms"] = (time.perf_counter() - t0) / trials * 1e3
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--snr", type=float, default=10.0)
    ap.add_argument("--_worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args._worker:
        print(json.dumps(run_batch(args.trials, args.snr)))
        return 0

    results = {}
    for label, disable in (("jit", "0"), ("interpreted", "1")):
        env = dict(os.environ, MIMO3D_DISABLE_NUMBA=disable)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--_worker",
             "--trials", str(args.trials), "--snr", str(args.snr)],
            env=env, capture_output=True, text=True, check=True)
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])

    print(f"{args.trials} trials per decoder at {args.snr:g} dB, M=4")
    print(f"{'decoder':<12} {'jit ms/trial':>14} {'interp ms/trial':>16} {'speedup':>9}")
    for dec in ("sphere", "simplified"):
        a = results["jit"][dec + "_ms"]
        b = results["interpreted"][dec + "_ms"]
        print(f"{dec:<12} {a:>14.4f} {b:>16.4f} {b / a:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
