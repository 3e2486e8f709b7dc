"""Time the numba and NumPy kernel paths on representative workloads.

    python benchmarks/bench_kernels.py [--repeat 3]

JIT compilation is excluded: every kernel is called once before timing.
"""
import argparse
import time

import numpy as np

from coinwalk import MultiCoinSpec, dephasing_channel, hadamard_coin
from coinwalk import _kernels
from coinwalk.channel import kraus_grid, step_channels
from coinwalk.coin import step_coins
from coinwalk.kspace import KGrid


def kspace_case(walk, channel, steps):
    coins, chans = step_coins(walk), step_channels(walk, channel)
    ks = KGrid.for_steps(steps).nodes
    ops = np.ascontiguousarray(np.stack([kraus_grid(c, a, ks) for c, a in zip(coins, chans)]))
    zs = np.ascontiguousarray(np.stack([c.z for c in coins]))
    rho = np.zeros((walk.dim, walk.dim), complex)
    rho[0, 0] = 1
    return "kspace_traces", (ops, zs, rho, steps)


def density_case(npos):
    h = hadamard_coin()
    ch = dephasing_channel(np.pi / 8)
    rng = np.random.default_rng(0)
    a = rng.standard_normal((npos * 2, npos * 2)) + 1j * rng.standard_normal((npos * 2, npos * 2))
    rho = (a @ a.conj().T).reshape(npos, 2, npos, 2)
    kops = np.ascontiguousarray(h.flip @ ch.ops)
    return "density_step", (rho, kops, h.proj_right, h.proj_left)


def pure_case(m, npos):
    c = step_coins(MultiCoinSpec(m))[0]
    rng = np.random.default_rng(1)
    psi = rng.standard_normal((npos, c.dim)) + 1j * rng.standard_normal((npos, c.dim))
    return "pure_step", (psi, c.flip, c.proj_right, c.proj_left)


CASES = {
    "kspace dephasing D=2 t=400": lambda: kspace_case(hadamard_coin(), dephasing_channel(np.pi / 8), 400),
    "kspace unitary M=5 t=100": lambda: kspace_case(MultiCoinSpec(5), None, 100),
    "density step D=2 801 sites": lambda: density_case(801),
    "pure step M=5 401 sites": lambda: pure_case(5, 401),
}


def bench(fn, args, repeat):
    fn(*args)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    backends = _kernels.available_backends()
    print(f"{'case':34s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, build in CASES.items():
        kernel, kargs = build()
        times = [bench(getattr(_kernels.get_backend(b), kernel), kargs, args.repeat) for b in backends]
        speed = f"{times[0] / times[-1]:10.1f}x" if len(times) > 1 else ""
        print(f"{name:34s}" + "".join(f"{t:11.4f}s" for t in times) + speed)


if __name__ == "__main__":
    main()
