"""Compare the compiled and pure-Python fixed-point kernels.

    python benchmarks/bench_kernel.py [--repeat N]

Times ``solve_all`` (every agent, outcome and semantics) on the bundled
examples and on an enumerated population of imperfect-information
mechanisms, after checking both backends agree.
"""

from __future__ import annotations

import argparse
import time

from respgap import kernel
from respgap.enumeration import EnumerationConfig, enumerate_mechanisms
from respgap.examples import catalog


def population():
    config = EnumerationConfig(max_depth=3, agent_count=1, partition_mode="exhaustive-partitions",
                               max_decision_nodes=4)
    return [m.compiled for m in enumerate_mechanisms(config)]


def bench(impl, compiled, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for cm in compiled:
            kernel.solve_all(cm, impl)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernel.backends()
    suites = {
        "examples": [m.compiled for m in catalog().values()],
        "enumerated": population(),
    }
    for name, compiled in suites.items():
        ref = [list(kernel.solve_all(cm, backends["python"])) for cm in compiled]
        for impl_name, impl in backends.items():
            got = [list(kernel.solve_all(cm, impl)) for cm in compiled]
            assert got == ref, f"{impl_name} disagrees with python on {name}"
        times = {k: bench(impl, compiled, args.repeat) for k, impl in backends.items()}
        line = f"{name:<11} {len(compiled):>6} mechanisms"
        for k, t in times.items():
            line += f"  {k}: {t * 1e6 / len(compiled):8.1f} us/mech"
        if "cython" in times:
            line += f"  speedup x{times['python'] / times['cython']:.1f}"
        print(line)


if __name__ == "__main__":
    main()
