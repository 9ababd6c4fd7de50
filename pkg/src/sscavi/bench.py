"""Benchmark the sweep kernels: compiled extension vs pure-Python fallback.

Run as ``python -m sscavi.bench``. Times one sequential and one parallel
sweep on a synthetic instance for every available backend and reports the
speedup of the compiled kernels when both are present.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import backend
from .model import Hyperparams, inclusion_prob, precompute
from .synth import GenSpec, make_dataset


def _time_sweep(fn, repeat: int, *args) -> float:
    fn(*args)  # warm up
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def run_benchmark(n: int = 400, p: int = 200, repeat: int = 200, seed: int = 0):
    hyper = Hyperparams(pi=0.5, tau=1.0, sigma2=1.0)
    ds = make_dataset(GenSpec(n=n, p=p, s=p // 2, seed=seed))
    pre = precompute(ds, hyper)
    rng = np.random.default_rng(seed)
    mu = rng.standard_normal(p)
    alpha = inclusion_prob(mu, pre.a, hyper)
    mu_new = np.empty_like(mu)

    results = {}
    for name in backend.available_backends():
        kernels = backend.get_backend(name)
        seq_t = _time_sweep(
            kernels.seq_sweep, repeat, mu_new, mu, alpha, pre.xtx, pre.a, pre.xty, hyper.sigma2
        )
        par_t = _time_sweep(
            kernels.par_sweep, repeat, mu_new, mu, alpha, pre.xtx, pre.a, pre.xty, hyper.sigma2
        )
        results[name] = (seq_t, par_t)
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=400)
    parser.add_argument("--p", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    results = run_benchmark(args.n, args.p, args.repeat, args.seed)
    print(f"instance: n={args.n} p={args.p}, {args.repeat} timed sweeps per kernel")
    print(f"{'backend':<10} {'seq sweep':>14} {'par sweep':>14}")
    for name, (seq_t, par_t) in results.items():
        print(f"{name:<10} {seq_t * 1e6:>11.1f} us {par_t * 1e6:>11.1f} us")
    if "compiled" in results and "python" in results:
        seq_speed = results["python"][0] / results["compiled"][0]
        par_speed = results["python"][1] / results["compiled"][1]
        print(f"compiled speedup: {seq_speed:.1f}x (seq), {par_speed:.1f}x (par)")
    else:
        print("compiled kernels unavailable; only the python backend was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
