"""Compare the compiled and numpy bit-packing kernels.

Usage: python benchmarks/bench_bitpack.py [--repeats N]
"""

import argparse
import time

import numpy as np

from falq.kernels import available_backends


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; run `pip install -e .` first")
    rng = np.random.default_rng(0)

    print(f"{'n':>10} {'bits':>4}", end="")
    for name in backends:
        print(f" {name + ' pack':>14} {name + ' unpack':>14}", end="")
    if len(backends) == 2:
        print(f" {'pack speedup':>13} {'unpack speedup':>15}", end="")
    print()

    for n in (10_000, 100_000, 1_000_000, 4_000_000):
        for bits in (4, 5, 12):
            idx = rng.integers(0, 2**bits, size=n).astype(np.uint32)
            row = f"{n:>10} {bits:>4}"
            times = {}
            for name, mod in backends.items():
                packed = mod.pack_bits(idx, bits)
                t_pack = time_call(mod.pack_bits, idx, bits, repeats=args.repeats)
                t_unpack = time_call(
                    mod.unpack_bits, packed, bits, n, repeats=args.repeats
                )
                assert np.array_equal(mod.unpack_bits(packed, bits, n), idx)
                times[name] = (t_pack, t_unpack)
                row += f" {t_pack * 1e3:>12.3f}ms {t_unpack * 1e3:>12.3f}ms"
            if len(backends) == 2:
                row += (
                    f" {times['numpy'][0] / times['cython'][0]:>12.1f}x"
                    f" {times['numpy'][1] / times['cython'][1]:>14.1f}x"
                )
            print(row)


if __name__ == "__main__":
    main()
