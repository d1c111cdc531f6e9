"""Benchmark the compiled kernel against the pure-Python fallback.

Runs the same seeded scenario on both backends, reports wall time and
agent-steps per second, and verifies the outputs are bit-identical.

    python benchmarks/bench_backends.py --n 300 --horizon 300 --repeats 5
"""

import argparse
import time

from tpb_sim import _kernels
from tpb_sim.model import BehaviorType, ModelParams
from tpb_sim.population import PopulationConfig, run


def time_backend(backend, config, params, horizon, repeats):
    best = float("inf")
    series = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        traj = run(config, params, horizon, backend=backend)
        best = min(best, time.perf_counter() - t0)
        series = traj.y_avg_series
    return best, series


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=300, help="agents")
    parser.add_argument("--horizon", type=int, default=300, help="steps")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats (best of)")
    parser.add_argument("--seed", type=int, default=12345)
    parser.add_argument("--phi", type=float, default=0.7)
    parser.add_argument("--beta", type=float, default=5.0)
    args = parser.parse_args()

    params = ModelParams(phi=args.phi, beta=args.beta,
                         behavior=BehaviorType.BENEFICIAL)
    config = PopulationConfig.for_behavior(
        BehaviorType.BENEFICIAL, n=args.n, seed=args.seed
    )
    agent_steps = args.n * args.horizon

    backends = ["python"]
    try:
        _kernels.get_kernel("cython")
        backends.append("cython")
    except ImportError:
        print("compiled kernel not built; timing the Python backend only")

    results = {}
    for backend in backends:
        elapsed, series = time_backend(
            backend, config, params, args.horizon, args.repeats
        )
        results[backend] = (elapsed, series)
        print(f"{backend:>7}: {elapsed * 1e3:8.2f} ms  "
              f"({agent_steps / elapsed / 1e6:7.2f} M agent-steps/s)")

    if len(results) == 2:
        py_t, py_series = results["python"]
        cy_t, cy_series = results["cython"]
        print(f"speedup: {py_t / cy_t:.1f}x")
        if py_series == cy_series:
            print("outputs: bit-identical")
        else:
            raise SystemExit("outputs differ between backends")


if __name__ == "__main__":
    main()
