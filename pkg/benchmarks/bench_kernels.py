"""Compiled kernels against the numpy fallback, plus end-to-end update timings.

Usage: python3 benchmarks/bench_kernels.py [--max-arguments 18] [--repeat 5]
"""
from __future__ import annotations

import argparse
import importlib
import os
import subprocess
import sys
import timeit

import numpy as np

from epiupdate import _pykernels


def backends():
    out = {"python": _pykernels}
    try:
        out["cython"] = importlib.import_module("epiupdate._ckernels")
    except ImportError:
        print("compiled kernels not built; timing the fallback only")
    return out


def best(fn, repeat: int) -> float:
    t = timeit.Timer(fn)
    number, _ = t.autorange()
    return min(t.repeat(repeat=repeat, number=number)) / number


def kernel_table(max_arguments: int, repeat: int) -> None:
    mods = backends()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'n':>4}" + "".join(f"{name:>14}" for name in mods) +
          ("   speedup" if len(mods) == 2 else ""))
    for n in range(10, max_arguments + 1, 2):
        p = rng.dirichlet(np.ones(1 << n))
        v = rng.random(n)
        cases = {
            "world_marginals": lambda m: m.world_marginals(p, n),
            "world_affine": lambda m: m.world_affine(v, 0.5, n),
            "world_product": lambda m: m.world_product(v, n),
            "world_gram": lambda m: m.world_gram(p, n),
        }
        for name, call in cases.items():
            times = {b: best(lambda m=m: call(m), repeat) for b, m in mods.items()}
            row = f"{name:<16}{n:>4}" + "".join(f"{times[b] * 1e3:>12.3f}ms" for b in mods)
            if len(mods) == 2:
                row += f"{times['python'] / times['cython']:>9.1f}x"
            print(row, flush=True)


def end_to_end() -> None:
    """Whole-update timings in a fresh interpreter per backend (the backend is fixed at import)."""
    script = (
        "import time, numpy as np\n"
        "from epiupdate import kernels, labelling_update, two_stage_ls_update, BAF, ProbabilityFunction\n"
        "from epiupdate.oracle import synthetic_instance, random_constraints\n"
        "baf, cs, L = synthetic_instance(1000, 2000, seed=0)\n"
        "t = time.perf_counter(); labelling_update(L, cs); a = time.perf_counter() - t\n"
        "rng = np.random.default_rng(1)\n"
        "b14 = BAF.of([f'a{i}' for i in range(14)])\n"
        "P = ProbabilityFunction(b14, rng.dirichlet(np.ones(1 << 14)))\n"
        "cs14 = random_constraints(rng, b14, satisfiable_rate=1.0)\n"
        "t = time.perf_counter(); two_stage_ls_update(P, cs14); b = time.perf_counter() - t\n"
        "print(f'{kernels.BACKEND:<8} labelling 1000x2000: {a:6.2f} s   two-stage, 14 arguments: {b:6.2f} s')\n"
    )
    for pure in ("", "1"):
        env = dict(os.environ, EPIUPDATE_PURE_PYTHON=pure) if pure else {
            k: v for k, v in os.environ.items() if k != "EPIUPDATE_PURE_PYTHON"}
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-arguments", type=int, default=18)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    kernel_table(args.max_arguments, args.repeat)
    if not args.skip_end_to_end:
        print(flush=True)
        end_to_end()


if __name__ == "__main__":
    main()
