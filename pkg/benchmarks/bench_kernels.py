"""Time every kernel under the numba and the numpy backend.

    python3 benchmarks/bench_kernels.py [--repeat N] [--bound B]

Inputs are the largest built-in workloads: the T_2 setup over the
bound-4 input-output universe (65536 systems x 256 observations) and a
dense random order on a few hundred elements.
"""
import argparse
import time
from itertools import product

import numpy as np

from testlimits import kernels


def best_of(fn, repeat):
    fn()  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(bound, n_rel, seed):
    rng = np.random.default_rng(seed)
    nbits = bound * bound
    tuples = np.array(list(product(range(nbits), repeat=2)), dtype=np.int64)
    alpha = kernels.power_alpha(nbits, tuples)
    req = rng.random(1 << nbits) < 0.5
    order = np.arange(alpha.shape[1], dtype=np.int64)
    adj = np.triu(rng.random((n_rel, n_rel)) < 4.0 / n_rel)
    np.fill_diagonal(adj, True)
    leq = kernels.transitive_closure(adj)
    rel_mask = rng.random(n_rel) < 0.1
    rel_alpha = np.stack([kernels.up_closure_rel(leq, rng.random(n_rel) < 0.05) for _ in range(32)], axis=1)
    sys_sets = rng.random((4096, 31)) < 0.3
    obs_sets = rng.random((4992, 31)) < 0.08
    return {
        "power_alpha": lambda k: k.power_alpha(nbits, tuples),
        "irremediable": lambda k: k.irremediable(alpha, req),
        "contained": lambda k: k.contained(alpha, req),
        "first_witness": lambda k: k.first_witness(alpha, np.ones(alpha.shape[1], np.bool_), ~req, order),
        "up_closure_pow": lambda k: k.up_closure_pow(req, nbits),
        "down_closure_pow": lambda k: k.down_closure_pow(req, nbits),
        "monotone_violation_pow": lambda k: k.monotone_violation_pow(alpha, nbits),
        "transitive_closure": lambda k: k.transitive_closure(adj),
        "up_closure_rel": lambda k: k.up_closure_rel(leq, rel_mask),
        "monotone_violation_rel": lambda k: k.monotone_violation_rel(leq, rel_alpha),
        "subset_alpha": lambda k: k.subset_alpha(sys_sets, obs_sets),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--bound", type=int, default=4)
    ap.add_argument("--relation-size", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    impls = kernels.implementations()
    if "numba" not in impls:
        print("numba unavailable; timing the numpy backend only")
    jobs = workloads(args.bound, args.relation_size, args.seed)
    names = sorted(impls)
    print(f"{'kernel':<24}" + "".join(f"{n + ' (ms)':>14}" for n in names) + f"{'speedup':>10}")
    for job, fn in jobs.items():
        t = {n: best_of(lambda k=impls[n]: fn(k), args.repeat) for n in names}
        row = f"{job:<24}" + "".join(f"{t[n] * 1e3:>14.2f}" for n in names)
        if len(names) == 2:
            row += f"{t['numpy'] / t['numba']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
