#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python twins.

Usage: python benchmarks/bench_kernels.py [--frames N] [--mb N]
"""

import argparse
import random
import time

from skimwatch.kernels import _pure

try:
    from skimwatch.kernels import _core
except ImportError:
    _core = None


def make_scene(rng, width, height, rects):
    background = bytes(rng.randrange(0, 25) for _ in range(width * height))
    frame = bytearray(background)
    for _ in range(rects):
        w, h = rng.randrange(6, 24), rng.randrange(6, 24)
        x0, y0 = rng.randrange(0, width - w), rng.randrange(0, height - h)
        for y in range(y0, y0 + h):
            for x in range(x0, x0 + w):
                frame[y * width + x] = 230
    return bytes(frame), background


def bench(label, fn, repeats=3):
    best = min(timeit(fn) for _ in range(repeats))
    print(f"  {label:<26} {best * 1000:9.2f} ms")
    return best


def timeit(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--frames", type=int, default=20,
                        help="VGA frames per blob-labeling run")
    parser.add_argument("--mb", type=int, default=4, help="MiB per CRC run")
    args = parser.parse_args()

    rng = random.Random(7)
    width, height = 640, 480
    scenes = [make_scene(rng, width, height, rects=12) for _ in range(args.frames)]
    payload = rng.randbytes(args.mb * 1024 * 1024)

    print(f"blob labeling: {args.frames} frames @ {width}x{height}, 12 blobs each")
    t_pure = bench("pure python", lambda: [
        _pure.diff_blobs(f, b, width, height, 60, 16) for f, b in scenes])
    if _core is not None:
        t_native = bench("cython", lambda: [
            _core.diff_blobs(f, b, width, height, 60, 16) for f, b in scenes])
        print(f"  speedup: {t_pure / t_native:.1f}x")
    else:
        print("  cython kernel not built; run pip install -e . with a compiler")

    print(f"crc16: {args.mb} MiB")
    t_pure = bench("pure python", lambda: _pure.crc16(payload))
    if _core is not None:
        t_native = bench("cython", lambda: _core.crc16(payload))
        print(f"  speedup: {t_pure / t_native:.1f}x")

    # Both backends must agree bit-for-bit.
    if _core is not None:
        sample = rng.randbytes(4096)
        assert _pure.crc16(sample) == _core.crc16(sample)
        f, b = scenes[0]
        assert sorted(_pure.diff_blobs(f, b, width, height, 60, 16)) == \
            sorted(_core.diff_blobs(f, b, width, height, 60, 16))
        print("backends agree on spot checks")


if __name__ == "__main__":
    main()
