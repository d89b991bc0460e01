"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--sizes 16,32,64,128] [--reps 3]
"""
import argparse
import statistics
import time

from apar.kernels import _pykernels

try:
    from apar.kernels import _ckernels
except ImportError:
    _ckernels = None


def timed(fn, reps):
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples) * 1e3, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="16,32,64,128")
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args(argv)
    backends = [_pykernels] + ([_ckernels] if _ckernels else [])
    if not _ckernels:
        print("# compiled backend not built; timing the pure-Python kernels only")
    print(f"{'kernel':<9} {'n':>5} " + " ".join(f"{b.NAME + '_ms':>12}" for b in backends)
          + ("   speedup" if _ckernels else ""))
    for n in (int(s) for s in args.sizes.split(",")):
        gen_ms, mul_ms, sums = [], [], set()
        for b in backends:
            ms, a = timed(lambda: b.gen_matrix(1, n, n), args.reps)
            gen_ms.append(ms)
            bm = b.gen_matrix(2, n, n)
            ms, c = timed(lambda: b.mat_mul(a, n, n, bm, n), args.reps)
            mul_ms.append(ms)
            sums.add(b.checksum(c))
        assert len(sums) == 1, f"backends disagree at n={n}"
        for name, row in (("genMatrix", gen_ms), ("matMul", mul_ms)):
            line = f"{name:<9} {n:>5} " + " ".join(f"{ms:>12.3f}" for ms in row)
            if len(row) == 2:
                line += f" {row[0] / max(row[1], 1e-9):>8.1f}x"
            print(line)


if __name__ == "__main__":
    main()
