"""Compare the compiled and numpy Euler-Maruyama ensemble kernels.

Usage::

    python benchmarks/bench_sde.py [--n-traj 2000] [--t-end 10] [--repeat 3]

Both backends receive the same seeds, so their outputs are also checked for
bit-identity.
"""

import argparse
import time

import numpy as np

from duomode import _kernels
from duomode.model import ReservoirSpec, SystemParams
from duomode.stochastic import SdeConfig, run_ensemble


def best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-traj", type=int, default=2000)
    ap.add_argument("--t-end", type=float, default=10.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    params = SystemParams(1.0, 0.5, 0.4, np.pi / 4)
    res = ReservoirSpec(1.0, 1.0)
    cfg = SdeConfig(dt=args.dt, t_end=args.t_end, n_traj=args.n_traj, seed=7)
    step_count = cfg.n_traj * cfg.n_steps

    backends = ["python"]
    if _kernels.compiled_integrate_ensemble is not None:
        backends.insert(0, "compiled")
    else:
        print("compiled kernel not built; timing the numpy fallback only")

    print(f"{cfg.n_traj} trajectories x {cfg.n_steps} steps, best of {args.repeat}")
    print(f"{'backend':<10}{'seconds':>10}{'ns/step':>10}{'speedup':>10}")
    results, base = {}, None
    for name in backends[::-1]:
        secs, est = best_of(lambda: run_ensemble(params, res, cfg, backend=name, threads=args.threads), args.repeat)
        results[name] = est
        base = base or secs
        print(f"{name:<10}{secs:>10.3f}{secs / step_count * 1e9:>10.1f}{base / secs:>10.2f}")

    if len(results) == 2:
        same = np.array_equal(results["compiled"].sigma_hat, results["python"].sigma_hat)
        print(f"bit-identical: {same}")


if __name__ == "__main__":
    main()
