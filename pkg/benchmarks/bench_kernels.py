"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py
      MQSYNTH_NUMBA=0 python3 benchmarks/bench_kernels.py   (numpy only)

Times the three hot loops at desk scale and at realistic-embedding scale:
the k-NN cosine scan dominates synthesis runtime once vocabularies reach
GloVe-like sizes, which is what the numba path is for.
"""

import time

import numpy as np

from mqsynth import kernels


def bench(label, fn, *args, repeat=5):
    fn(*args)  # warmup (and JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    print(f"  {label:28s} {best * 1e3:10.3f} ms")
    return best


def bench_pair(label, selected, fallback, *args):
    print(label)
    t_np = bench("numpy", fallback, *args)
    if kernels.USING_NUMBA:
        t_nb = bench("numba", selected, *args)
        print(f"  {'speedup':28s} {t_np / t_nb:10.2f} x")
    print()


def main():
    print(f"numba path active: {kernels.USING_NUMBA}\n")
    rng = np.random.default_rng(0)

    for vocab, dim in ((1_000, 50), (50_000, 50), (100_000, 300)):
        matrix = np.ascontiguousarray(rng.normal(size=(vocab, dim)))
        norms = np.linalg.norm(matrix, axis=1)
        query = np.ascontiguousarray(matrix[0])
        bench_pair(
            f"cosine distance scan (vocab={vocab:,}, dim={dim})",
            kernels.cosine_distance_scan,
            kernels.cosine_distance_scan_numpy,
            matrix, norms, query, float(norms[0]),
        )

    for n, d, epochs in ((50, 50, 500), (1_200, 200, 600)):
        X = np.ascontiguousarray(rng.normal(size=(n, d)))
        y = (rng.random(n) > 0.5).astype(np.float64)
        bench_pair(
            f"logistic regression fit (n={n:,}, d={d}, epochs={epochs})",
            kernels.logreg_fit,
            kernels.logreg_fit_numpy,
            X, y, 0.5, 1e-4, epochs, 1e-12,
        )

    X = np.ascontiguousarray(rng.normal(size=(10_000, 50)))
    w = rng.normal(size=50)
    bench_pair(
        "sigmoid batch scoring (n=10,000, d=50)",
        kernels.predict_proba_batch,
        kernels.predict_proba_batch_numpy,
        X, w, 0.1,
    )


if __name__ == "__main__":
    main()
