"""Time the numba and numpy kernels side by side.

    python3 benchmarks/bench_kernels.py [--sizes 128 512 1024] [--repeat 3]
"""

import argparse
import time

import numpy as np

from nodalcount import kernels
from nodalcount._accel import HAVE_NUMBA
from nodalcount.ensembles import sample_goe
from nodalcount.sampling import SeedPlan
from nodalcount.spectral import symmetric_eigen


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_edge_counts(sizes, repeat):
    print("edge_sign_counts (all eigenvectors of one GOE matrix)")
    print(f"{'n':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}  agree")
    for n in sizes:
        A = sample_goe(n, SeedPlan(0).stream(n))
        V = symmetric_eigen(A).vectors
        t_np, r_np = best_of(lambda: kernels.edge_sign_counts_numpy(A, V, 0.0), repeat)
        if HAVE_NUMBA:
            kernels.edge_sign_counts_numba(A[:4, :4].copy(), V[:4, :4].copy(), 0.0)
            t_nb, r_nb = best_of(lambda: kernels.edge_sign_counts_numba(A, V, 0.0), repeat)
            agree = np.array_equal(r_np[0], r_nb[0])
            print(f"{n:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}  {agree}")
        else:
            print(f"{n:>6} {t_np:>10.4f} {'-':>10} {'-':>8}  -")


def bench_frame_signs(sizes, repeat, frames=4096, m=3):
    print(f"\nframe_edge_signs ({frames} frames of {m} Haar rows)")
    print(f"{'n':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}  agree")
    for n in sizes:
        rng = SeedPlan(1).stream(n)
        lam = rng.standard_normal(n)
        G = rng.standard_normal((frames, m, n))
        t_np, r_np = best_of(lambda: kernels.frame_edge_signs_numpy(G, lam, n - 1), repeat)
        if HAVE_NUMBA:
            kernels.frame_edge_signs_numba(G[:2], lam, n - 1)
            t_nb, r_nb = best_of(lambda: kernels.frame_edge_signs_numba(G, lam, n - 1), repeat)
            agree = np.array_equal(r_np, r_nb)
            print(f"{n:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}  {agree}")
        else:
            print(f"{n:>6} {t_np:>10.4f} {'-':>10} {'-':>8}  -")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; timing the numpy path only\n")
    bench_edge_counts(args.sizes, args.repeat)
    bench_frame_signs(args.sizes, args.repeat)


if __name__ == "__main__":
    main()
