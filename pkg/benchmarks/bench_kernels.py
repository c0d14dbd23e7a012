"""Benchmark the jitted kernels against the pure-Python/NumPy fallback.

Run:  python benchmarks/bench_kernels.py
The same comparison can be forced package-wide with GIBBSDIM_DISABLE_NUMBA=1.
"""

import math
import time

import numpy as np

from gibbsdim import AffineIfs, CdfModel, LocallyConstantPotential, SftSpec, gibbs_chain
from gibbsdim import _kernels


def timeit(fn, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    spec = SftSpec(alphabet=("0", "1"), incidence=[[1, 1], [1, 1]])
    phi = LocallyConstantPotential.from_values(spec, [math.log(0.25), math.log(0.75)])
    chain = gibbs_chain(phi)
    ifs = AffineIfs(spec=spec, interval=(0.0, 1.0),
                    rates=np.array([0.5, 0.5]), offsets=np.array([0.0, 0.5]))
    model = CdfModel(ifs, phi)

    rng = np.random.default_rng(0)
    u = rng.random(1_000_000)
    start_cum = np.cumsum(chain.pi)
    q_cum = np.cumsum(chain.Q, axis=1)

    impls = {"numpy": _kernels._PY_IMPLS}
    if _kernels._JIT_IMPLS is not None:
        # trigger compilation outside the timed region
        _kernels._JIT_IMPLS["markov_path"](start_cum, q_cum, u[:8])
        _kernels._JIT_IMPLS["cdf_descend"](
            0.3, 1e-12, 100_000, model._root_next, model._root_mass, model._succ,
            model._prob, model._order, ifs.rates, ifs.offsets, 0.0, 1.0)
        impls["numba"] = _kernels._JIT_IMPLS
    else:
        print("numba unavailable or disabled; timing the fallback only")

    xs = np.linspace(0.0, 1.0, 2000)
    results = {}
    for name, impl in impls.items():
        t_path = timeit(lambda: impl["markov_path"](start_cum, q_cum, u))
        t_cdf = timeit(lambda: [impl["cdf_descend"](
            float(x), 1e-12, 100_000, model._root_next, model._root_mass,
            model._succ, model._prob, model._order, ifs.rates, ifs.offsets,
            0.0, 1.0) for x in xs])
        results[name] = (t_path, t_cdf)
        print(f"{name:>6}: markov_path(1e6 steps) {t_path:8.4f}s   "
              f"cdf_descend(2000 points) {t_cdf:8.4f}s")
    if len(results) == 2:
        sp = results["numpy"][0] / results["numba"][0]
        sc = results["numpy"][1] / results["numba"][1]
        print(f"speedup: markov_path x{sp:.1f}, cdf_descend x{sc:.1f}")


if __name__ == "__main__":
    main()
