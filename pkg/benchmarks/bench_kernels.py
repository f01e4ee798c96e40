"""Time each numba kernel against its pure-numpy twin.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The jit variants are compiled once before timing. Both variants are
imported regardless of EVERETT_DISABLE_NUMBA.
"""
import argparse
import timeit

import numpy as np

from everett import _kernels as k


def cases():
    comps = k.compositions_np(200, 4)
    logp = np.log(np.array([0.1, 0.2, 0.3, 0.4]))
    regs = k.branch_registers_np(16, 2)
    coeffs = np.array([0.6, 0.8], dtype=np.complex128)
    return [
        ("compositions(200, 4)", k.compositions_jit, k.compositions_np, (200, 4)),
        ("log_class_measures(1.4M x 4)", k.log_class_measures_jit, k.log_class_measures_np, (comps, logp)),
        ("branch_registers(16, 2)", k.branch_registers_jit, k.branch_registers_np, (16, 2)),
        ("branch_amplitudes(2^16)", k.branch_amplitudes_jit, k.branch_amplitudes_np, (coeffs, regs)),
        ("register_counts(2^16)", k.register_counts_jit, k.register_counts_np, (regs, 2)),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not k.HAVE_NUMBA:
        print("numba not importable; only the numpy column is meaningful")
    print(f"{'kernel':32s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, jit, ref, argv in cases():
        jit(*argv)
        if hasattr(ref, "cache_clear"):
            ref.cache_clear()
        t_jit = min(timeit.repeat(lambda: jit(*argv), number=1, repeat=args.repeat))
        t_np = min(
            timeit.repeat(
                lambda: (ref.cache_clear() if hasattr(ref, "cache_clear") else None, ref(*argv)),
                number=1,
                repeat=args.repeat,
            )
        )
        print(f"{name:32s} {t_jit:10.4f} {t_np:10.4f} {t_np / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
