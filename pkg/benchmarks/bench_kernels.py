"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time per backend and the speed-up, and
checks that both backends return identical results.
"""
import argparse
import math
import time

import numpy as np

from nullcharge import _backend
from nullcharge.worldline import circular, SampledWorldline


def _best(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases():
    rng = np.random.default_rng(0)
    E = rng.normal(size=(20000, 3))
    B = rng.normal(size=(20000, 3))
    w = circular(1.0, t_min=0.0, t_max=20.0)
    ts = np.linspace(0.0, 20.0, 401)
    sw = SampledWorldline(ts, w.position(ts))
    pts = [np.array([25.0, *rng.uniform(-3, 3, 3)]) for _ in range(200)]
    return {
        "eigen_batch (20000 fields)": lambda k: k.eigen_batch(E, B, 1.0, 1e-10),
        "simpson_cutoff (eps=1e-3)": lambda k: [k.simpson_cutoff(i, 1e-3, math.pi, 1e-12, 60)
                                                for i in (0, 1)],
        "hermite_retarded_time (200 points)": lambda k: [
            k.hermite_retarded_time(sw.t, sw.z, sw.dz, x, 1e-12, 1024, 0.0) for x in pts],
    }


def _same(a, b):
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b), equal_nan=True)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = _backend.available()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':38s} " + " ".join(f"{n:>10s}" for n in backends) + "   speed-up  identical")
    for name, fn in _cases().items():
        times, outs = {}, {}
        for bname, k in backends.items():
            times[bname], outs[bname] = _best(lambda: fn(k), args.repeat)
        cols = " ".join(f"{times[n] * 1e3:8.2f}ms" for n in backends)
        if "cython" in times:
            speed = times["python"] / times["cython"]
            same = _same(outs["python"], outs["cython"])
            print(f"{name:38s} {cols}   {speed:7.1f}x  {same}")
        else:
            print(f"{name:38s} {cols}")


if __name__ == "__main__":
    main()
