"""Time the compiled simplex kernel against the pure-Python fallback.

The workload is the compact meet program of sampled stabilizer constraint
sets, the hot path of a subset scan.  Each kernel runs in its own
subprocess; the fallback is forced with COHEST_PURE_PYTHON=1.

    python3 benchmarks/bench_simplex.py [--n 4] [--count 200]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from cohest import lp, qsim
from cohest.bounds import MeasurementRecord, build_constraints
from cohest.majorization import meet_over_polytope
from cohest.stabilizer import eigenvalue_matrix, get_state

n, count = int(sys.argv[1]), int(sys.argv[2])
label = {3: "ghz3", 4: "ghz4"}.get(n, f"cluster-{n}")
spec = get_state(label)
rng = np.random.default_rng(0)
rho = qsim.apply_depolarizing(qsim.pure_density(spec.amplitudes), 0.05)
B = eigenvalue_matrix(n)
top = 2 ** n - 1
recs = {t: MeasurementRecord(t, *qsim.sample_observable(rho, spec.stabilizers.element(t),
                                                         10000, rng))
        for t in range(1, top + 1)}
sets = []
for _ in range(count):
    masks = rng.choice(np.arange(1, top + 1), size=int(rng.integers(1, top + 1)),
                       replace=False)
    sets.append(build_constraints([recs[t] for t in masks], 3.0, B))
t0 = time.perf_counter()
for cs in sets:
    meet_over_polytope(cs)
print(json.dumps({"kernel": lp.KERNEL, "seconds": time.perf_counter() - t0}))
"""


def run(n, count, pure):
    env = dict(os.environ)
    env.pop("COHEST_PURE_PYTHON", None)
    if pure:
        env["COHEST_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", WORKER, str(n), str(count)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4, help="qubits (3..6)")
    ap.add_argument("--count", type=int, default=200, help="constraint sets to solve")
    args = ap.parse_args()
    fast, slow = run(args.n, args.count, False), run(args.n, args.count, True)
    for r in (fast, slow):
        print(f"{r['kernel']:>9}: {r['seconds']:8.3f} s  "
              f"({1e3 * r['seconds'] / args.count:.2f} ms per meet)")
    if fast["kernel"] == "compiled":
        print(f"  speedup: {slow['seconds'] / fast['seconds']:.1f}x")
    else:
        print("  compiled extension not available; both runs used the fallback")


if __name__ == "__main__":
    main()
