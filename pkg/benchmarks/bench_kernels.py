"""Compare the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import timeit

import numpy as np

from qdyn import _kernels, _pykernels
from qdyn.dynamics import generator
from qdyn.models import JaynesCummings, OhmicDephasing, PauliTanh


def _cases():
    ts = np.linspace(0.0, 10.0, 2001)
    n0 = np.array([0.6, -0.3, 0.5])
    cases = []
    for s in (1.0, 3.0):
        m = OhmicDephasing(1.0, s)
        cases.append((
            f"ohmic_upsilon s={s:g} (2001 pts)",
            lambda m=m, impl=None: impl.ohmic_upsilon(ts, m.omega_c, m.s, math.gamma(m.s), 1e-10),
        ))
    for m in (OhmicDephasing(1.0, 3.0), JaynesCummings(1.0, 0.3, 0.4), PauliTanh(1.0, 0.5)):
        grid = ts[::20]

        def c_run(m=m, grid=grid):
            return _kernels._ckernels.rk45_affine(m.code, m.params, n0, grid, 1e-9)

        def py_run(m=m, grid=grid):
            return _pykernels.rk45_affine(lambda t: generator(m, t), n0, grid, 1e-9)

        cases.append((f"rk45 {m.kind} on [0, 10]", (c_run, py_run)))
    return cases


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels._ckernels is None:
        print("compiled kernels not built; nothing to compare")
        return 1
    print(f"{'kernel':40s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for name, fn in _cases():
        if isinstance(fn, tuple):
            c, p = fn
        else:
            c = lambda fn=fn: fn(impl=_kernels._ckernels)
            p = lambda fn=fn: fn(impl=_pykernels)
        tc = min(timeit.repeat(c, number=1, repeat=args.repeat)) * 1e3
        tp = min(timeit.repeat(p, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:40s} {tc:10.3f} {tp:10.3f} {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
