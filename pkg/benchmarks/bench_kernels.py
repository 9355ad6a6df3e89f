"""Time the numba kernels against the numpy fallback on lattice-sized stacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best of ``--repeat`` runs after one warm-up call (which
also triggers numba compilation) and the largest deviation between backends relative to the output scale.
"""

import argparse
import timeit

import numpy as np

from genpoincare import kernels
from genpoincare import operators
from genpoincare.poincare import operator_bank


def _cases():
    rng = np.random.default_rng(0)
    for label, op, size in (("sym_grad n=2 N=33", operators.symmetric_gradient_2d(), 33),
                            ("curl n=3 N=21", operators.curl_3d(), 21),
                            ("grad n=3 N=41", operators.gradient(3), 41)):
        bank = operator_bank(op, size).matrices
        vshape = bank.shape[:-2] + bank.shape[-1:]
        vecs = rng.standard_normal(vshape) + 1j * rng.standard_normal(vshape)
        pinvs, _ = kernels.batched_pinv(bank, backend="numpy")
        field = rng.standard_normal(bank.shape[:-2] + (op.dim_v,))
        yield label, {
            "pinv": lambda be, b=bank: kernels.batched_pinv(b, backend=be)[0],
            "matvec": lambda be, b=bank, v=vecs: kernels.batched_matvec(b, v, backend=be),
            "matmul": lambda be, b=bank, p=pinvs: kernels.batched_matmul(b, p, backend=be),
            "norm_pow_sum": lambda be, f=field: np.array(kernels.fiber_norm_pow_sum(f, 3.0, backend=be)),
        }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = sorted(kernels.IMPLEMENTATIONS)
    print(f"{'case':<20} {'kernel':<13}" + "".join(f"{b + ' ms':>12}" for b in backends) + f"{'rel diff':>11}")
    for label, funcs in _cases():
        for name, fn in funcs.items():
            results, times = {}, {}
            for be in backends:
                results[be] = fn(be)
                times[be] = min(timeit.repeat(lambda: fn(be), number=1, repeat=args.repeat)) * 1e3
            ref = results[backends[0]]
            diff = max(np.abs(results[b] - ref).max() for b in backends) / max(np.abs(ref).max(), 1.0)
            print(f"{label:<20} {name:<13}" + "".join(f"{times[b]:>12.3f}" for b in backends) + f"{diff:>11.1e}")


if __name__ == "__main__":
    main()
