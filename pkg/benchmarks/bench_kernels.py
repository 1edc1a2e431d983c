"""Timing comparison of the compiled kernels against the pure-Python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Reports per-call wall time for each hot kernel on large input arrays and for
one end-to-end sup-statistic evaluation.  When the extension is unavailable
(or disabled via LSGOF_BACKEND=python) both columns exercise the same code,
which is still useful as a smoke test.
"""
import time

import numpy as np

import lsgof
from lsgof._kernels import backend, reference
from lsgof.distributions import Distribution, Family, sample
from lsgof.kmt_core import _get_re_table, kmt_statistic


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def check_close(a, b):
    for u, v in zip(np.atleast_1d(a), np.atleast_1d(b)):
        np.testing.assert_allclose(u, v, rtol=1e-6, atol=1e-12)


def main():
    table = _get_re_table()
    xs_normal = np.linspace(-8.0, 4.7, 200_000)
    xs_logistic = np.linspace(-23.0, 13.8, 200_000)
    xs_re = np.linspace(-40.0, 40.0, 200_000)

    cases = [
        ("psi_normal (200k)", lambda m: m.psi_normal(xs_normal)),
        ("psi_logistic (200k)", lambda m: m.psi_logistic(xs_logistic, table)),
        ("re_cubic (200k)", lambda m: m.re_cubic(xs_re, table)),
    ]

    print("active backend: %s" % lsgof.backend_name)
    print()
    print("%-22s %12s %12s %8s" % ("kernel", "python (ms)", "active (ms)", "speedup"))
    for name, call in cases:
        check_close(call(reference), call(backend))
        t_ref = best_of(lambda: call(reference))
        t_fast = best_of(lambda: call(backend))
        print("%-22s %12.2f %12.2f %7.1fx"
              % (name, t_ref * 1e3, t_fast * 1e3, t_ref / t_fast))

    smp = sample(Distribution(Family.LOGISTIC, 2.0, 5.0), 2000, 99)
    t_end = best_of(lambda: kmt_statistic(Family.LOGISTIC, smp), repeats=3)
    print()
    print("end-to-end sup-statistic, logistic null, n=2000: %.1f ms" % (t_end * 1e3))


if __name__ == "__main__":
    main()
