"""Time the compiled and pure-Python RK4 kernels on the figure regimes.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``
"""
import argparse
import timeit

import numpy as np

from rabivac.model import ModelParams
from rabivac.propagator import OVERFLOW_GUARD, _half_step_coefficients, default_dt, time_grid
from rabivac._kernels import _rk4_py

try:
    from rabivac._kernels import _rk4 as _rk4_ext
except ImportError:
    _rk4_ext = None

REGIMES = {"fig1": (10.0, 0.0), "fig2": (20.0, 2.0), "fig3": (50.0, 5.0), "fig4b": (10.0, 6.0)}


def _inputs(omega0, delta, t_max=6.0):
    params = ModelParams.from_detuning(omega0, delta, 1.0)
    times = time_grid(t_max, default_dt(params))
    c = _half_step_coefficients(params, times)
    dt = float(times[1] - times[0])
    riccati = (c.eps0, c.eps_plus, c.eps_minus, dt, OVERFLOW_GUARD)
    y0 = np.array([0.7, 0.3 - 0.2j, 0.3 + 0.2j, 0.3])
    direct = (c.eps0, c.eps_plus, c.eps_minus, c.nu0, c.nu_plus, c.nu_minus, c.gamma_k_dot, y0, dt)
    return len(times) - 1, riccati, direct


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = {"python": _rk4_py}
    if _rk4_ext is not None:
        backends["cython"] = _rk4_ext
    else:
        print("compiled kernels not built; timing the pure-Python fallback only")

    print(f"{'regime':8} {'steps':>7} {'kernel':8} " + " ".join(f"{b + ' [ms]':>13}" for b in backends) + "  speedup")
    for name, (w0, d) in REGIMES.items():
        steps, riccati, direct = _inputs(w0, d)
        for kernel, call_args in (("riccati", riccati), ("direct", direct)):
            best = {}
            for backend, mod in backends.items():
                fn = getattr(mod, f"{kernel}_rk4")
                best[backend] = min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat))
            speedup = best["python"] / best["cython"] if "cython" in best else float("nan")
            cells = " ".join(f"{1e3 * best[b]:13.2f}" for b in backends)
            print(f"{name:8} {steps:7d} {kernel:8} {cells}  {speedup:6.1f}x")


if __name__ == "__main__":
    main()
