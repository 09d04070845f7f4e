"""Throughput comparison of the RC5 kernel backends.

Times the numba @njit path against the vectorized pure-numpy path on the
same block batches, plus the full seal/open path through the codec. The
numpy path is what you get with WSNSEC_PURE_NUMPY=1 or without numba
installed.

Run: python3 benchmarks/bench_rc5.py [--blocks N] [--iters N]
"""

import argparse
import random
import time

import numpy as np

from wsnsec import _kernels, aead, rc5


def bench_kernel(fn, s, rounds, ab, iters):
    fn(s, rounds, ab)  # warm up (JIT compile / cache touch)
    t0 = time.perf_counter()
    for _ in range(iters):
        fn(s, rounds, ab)
    dt = time.perf_counter() - t0
    blocks = ab.shape[0] * iters
    return dt, blocks / dt


def bench_seal(key, iters):
    rnd = random.Random(1)
    payloads = [rnd.randbytes(29) for _ in range(64)]
    aad = bytes(5)
    t0 = time.perf_counter()
    n = 0
    for i in range(iters):
        pt = payloads[i % len(payloads)]
        ct, tag = aead.seal(key, 12, i + 1, aad, pt, True)
        assert aead.open_(key, 12, i + 1, aad, ct, tag, True) == pt
        n += 1
    dt = time.perf_counter() - t0
    return dt, n / dt


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--blocks", type=int, default=4096, help="blocks per batch")
    parser.add_argument("--iters", type=int, default=200, help="batches per backend")
    parser.add_argument("--seal-iters", type=int, default=5000)
    args = parser.parse_args()

    key = bytes(range(10))
    rnd = np.random.default_rng(7)
    ab = rnd.integers(0, 1 << 32, size=(args.blocks, 2), dtype=np.int64)

    print(f"selected backend: {_kernels.BACKEND}")
    print(f"batch: {args.blocks} blocks x {args.iters} iterations\n")
    print(f"{'rounds':>6} {'backend':>8} {'seconds':>9} {'blocks/s':>12}")
    for rounds in (4, 8, 12):
        s = rc5._schedule(key, rounds)
        rows = [("numpy", _kernels._encrypt_numpy)]
        if _kernels._njit_encrypt is not None:
            def njit_path(s, rounds, ab):
                out = np.empty_like(ab)
                _kernels._njit_encrypt(s, rounds, ab, out)
                return out
            rows.append(("numba", njit_path))
        for name, fn in rows:
            dt, rate = bench_kernel(fn, s, rounds, ab, args.iters)
            print(f"{rounds:>6} {name:>8} {dt:>9.3f} {rate:>12.0f}")

    dt, rate = bench_seal(key, args.seal_iters)
    print(f"\nseal+open (12 rounds, 29-octet payload, {_kernels.BACKEND} backend): "
          f"{rate:.0f} op/s ({dt:.2f}s for {args.seal_iters})")


if __name__ == "__main__":
    main()
