"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 7] [--nodes 20000]

Prints one row per kernel with the best wall time of each backend and the
max relative difference between their outputs, then times a full
extremal solve under each backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bergfock import _kernels_py

try:
    from bergfock import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(nodes: int, degree: int = 8, p: float = 3.0):
    rng = np.random.default_rng(0)
    z = np.sqrt(rng.uniform(0, 1, nodes)) * np.exp(2j * np.pi * rng.uniform(0, 1, nodes))
    coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    w = rng.uniform(0, 1, nodes)
    vals = _kernels_py.polyval(coeffs, z)
    nb = degree + 1
    return {
        "polyval": (coeffs, z),
        "lp_sum": (vals, w, p),
        "dual_moments": (vals, z, w, p, nb),
        "lp_hessian": (vals, z, w, p, nb, 1e-300),
    }


def rel_diff(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def time_solve(pure: bool, repeat: int) -> float:
    code = (
        "import timeit;from bergfock import *;"
        "g=build_grid(fock(1),12,p_max=3.0);k=Poly([1,1,1]);"
        f"print(min(timeit.repeat(lambda: solve(k,12,3.0,fock(1),g),number=1,repeat={repeat})))"
    )
    env = dict(os.environ, BERGFOCK_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--nodes", type=int, default=20000)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; only the fallback is available", file=sys.stderr)
        return 1
    print(f"{'kernel':<14}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}{'max rel diff':>14}")
    for name, a in cases(args.nodes).items():
        fp, fc = getattr(_kernels_py, name), getattr(_compiled, name)
        tp = min(timeit.repeat(lambda: fp(*a), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fc(*a), number=1, repeat=args.repeat))
        print(f"{name:<14}{1e3 * tp:>12.3f}{1e3 * tc:>13.3f}{tp / tc:>9.2f}{rel_diff(fc(*a), fp(*a)):>14.1e}")
    tp, tc = time_solve(True, 3), time_solve(False, 3)
    print(f"{'solve n=12 p=3':<14}{1e3 * tp:>12.1f}{1e3 * tc:>13.1f}{tp / tc:>9.2f}{'':>14}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
