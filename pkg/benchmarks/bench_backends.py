"""Benchmark the pure-Python kernel backend against the compiled core.

Times the scalar learning/choice kernels, the nearest-idle scan, and one
full desk-scenario run per backend.  Run from the repository root:

    python benchmarks/bench_backends.py

Backend selection happens at import, so each end-to-end measurement runs
in a subprocess with RIDEMARKET_BACKEND set.
"""

import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from ridemarket.kernels import pure

try:
    from ridemarket.kernels import _core
except ImportError:
    _core = None

REPO = Path(__file__).parent.parent
DESK = REPO / "src" / "ridemarket" / "scenarios" / "desk.toml"


def time_scalar(mod, n=200_000):
    rng = np.random.default_rng(0)
    cus = rng.uniform(-8, 8, size=n)
    deltas = rng.uniform(-1, 1, size=n)
    sigmoid, step_cu, logit = mod.sigmoid, mod.step_cu, mod.logit
    t0 = time.perf_counter()
    acc = 0.0
    for cu, delta in zip(cus, deltas):
        new = step_cu(cu, 1.0, delta, 8.0)
        acc += logit(sigmoid(new, 1.0), 0.5, 5.0)
    dt = time.perf_counter() - t0
    return dt, acc


def time_nearest(mod, n=20_000):
    rng = np.random.default_rng(1)
    row = rng.uniform(0, 1e4, size=400)
    idxs = [
        [int(i) for i in rng.choice(400, size=int(rng.integers(2, 200)), replace=False)]
        for _ in range(200)
    ]
    nearest_of = mod.nearest_of
    t0 = time.perf_counter()
    acc = 0
    for i in range(n):
        acc += nearest_of(row, idxs[i % len(idxs)])
    dt = time.perf_counter() - t0
    return dt, acc


def time_end_to_end(backend):
    code = (
        "import time; from ridemarket import scenario, experiment; "
        f"raw = scenario.load_raw({str(DESK)!r}); "
        "assembled = scenario.assemble(scenario.validate(raw)); "
        "t0 = time.perf_counter(); "
        "experiment.run_experiment(assembled.scenario); "
        "print(time.perf_counter() - t0)"
    )
    env = dict(os.environ, RIDEMARKET_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    return float(out.stdout.strip().splitlines()[-1])


def main():
    print(f"compiled extension available: {_core is not None}")
    rows = []

    dt_pure, acc_pure = time_scalar(pure)
    rows.append(("scalar kernels (200k sigmoid+step+logit)", dt_pure, None))
    if _core is not None:
        dt_c, acc_c = time_scalar(_core)
        assert acc_pure == acc_c, "backends diverged"
        rows[-1] = (rows[-1][0], dt_pure, dt_c)

    dt_pure, acc_pure = time_nearest(pure)
    rows.append(("nearest-idle scan (20k scans)", dt_pure, None))
    if _core is not None:
        dt_c, acc_c = time_nearest(_core)
        assert acc_pure == acc_c, "backends diverged"
        rows[-1] = (rows[-1][0], dt_pure, dt_c)

    rows.append(("desk scenario, 400 days end-to-end", time_end_to_end("pure"),
                 time_end_to_end("") if _core is not None else None))

    print(f"\n{'workload':<42}{'pure [s]':>10}{'compiled [s]':>14}{'speedup':>9}")
    for name, p, c in rows:
        if c is None:
            print(f"{name:<42}{p:>10.3f}{'-':>14}{'-':>9}")
        else:
            print(f"{name:<42}{p:>10.3f}{c:>14.3f}{p / c:>8.1f}x")


if __name__ == "__main__":
    main()
