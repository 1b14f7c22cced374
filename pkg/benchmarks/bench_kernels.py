"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeats 5]

Prints one row per kernel: median milliseconds for each backend, the
speed-up, and the max abs difference between backend outputs.
"""
import argparse
import os
import time

os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")

import numpy as np  # noqa: E402

from segformer3d import kernels  # noqa: E402
from segformer3d.model import ModelConfig, SegFormer3D  # noqa: E402
from segformer3d.lossmetrics import dice_ce_loss  # noqa: E402
from segformer3d.tensor import Tensor  # noqa: E402


def median_ms(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000)
    return float(np.median(times))


def cases(rng):
    # shapes of the reference model's stage-1 mix-FFN at batch 4, 32^3 input
    xp = rng.standard_normal((4, 128, 10, 10, 10)).astype(np.float32)
    w = rng.standard_normal((128, 3, 3, 3)).astype(np.float32)
    g = rng.standard_normal((4, 128, 8, 8, 8)).astype(np.float32)
    up = rng.standard_normal((4, 128, 4, 4, 4)).astype(np.float32)
    gup = rng.standard_normal((4, 128, 16, 16, 16)).astype(np.float32)
    pe = rng.standard_normal((4, 4, 38, 38, 38)).astype(np.float32)
    col = kernels.im2col3d(pe, (7, 7, 7), (4, 4, 4), (8, 8, 8))
    return {
        "dwconv3d forward": lambda: kernels.dwconv3d_forward(xp, w, (1, 1, 1), (8, 8, 8)),
        "dwconv3d backward": lambda: kernels.dwconv3d_backward(xp, w, g, (1, 1, 1)),
        "upsample x4 forward": lambda: kernels.upsample_trilinear_forward(up, 4),
        "upsample x4 backward": lambda: kernels.upsample_trilinear_backward(gup, (4, 4, 4), 4),
        "im2col 7/4": lambda: kernels.im2col3d(pe, (7, 7, 7), (4, 4, 4), (8, 8, 8)),
        "col2im 7/4": lambda: kernels.col2im3d(col, 4, (7, 7, 7), (38, 38, 38), (4, 4, 4)),
    }


def train_step():
    m = SegFormer3D(ModelConfig())
    rng = np.random.default_rng(0)
    x = Tensor(rng.standard_normal((4, 4, 32, 32, 32)).astype(np.float32))
    y = rng.integers(0, 4, (4, 32, 32, 32))

    def step():
        m.zero_grad()
        dice_ce_loss(m(x), y).backward()

    return step


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    rng = np.random.default_rng(0)
    print(f"backends: {', '.join(backends)}")
    head = f"{'kernel':<26}" + "".join(f"{b + ' ms':>14}" for b in backends)
    print(head + (f"{'speed-up':>10}{'max diff':>11}" if len(backends) > 1 else ""))
    for name, fn in cases(rng).items():
        ms, outs = [], []
        for b in backends:
            with kernels.use_backend(b):
                ms.append(median_ms(fn, args.repeats))
                outs.append(fn())
        row = f"{name:<26}" + "".join(f"{v:>14.2f}" for v in ms)
        if len(backends) > 1:
            a, c = outs[0], outs[1]
            a, c = (a, c) if not isinstance(a, tuple) else (a[-1], c[-1])
            row += f"{ms[1] / ms[0]:>9.1f}x{float(np.max(np.abs(a - c))):>11.1e}"
        print(row)
    step_ms = []
    for b in backends:
        with kernels.use_backend(b):
            step_ms.append(median_ms(train_step(), max(1, args.repeats // 2)))
    row = f"{'train step (B=4, 32^3)':<26}" + "".join(f"{v:>14.1f}" for v in step_ms)
    if len(backends) > 1:
        row += f"{step_ms[1] / step_ms[0]:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
