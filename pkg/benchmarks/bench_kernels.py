"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--number 200]

Each kernel is called on the same inputs by both backends; the table reports
the best per-call time of ``repeat`` batches of ``number`` calls, the speedup,
and the largest absolute difference between the two results.
"""

import argparse
import timeit

import numpy as np

from fusionnet import _kernels_py
from fusionnet.netgraph import acyclic_graph_11, binary_tree_11, tandem
from fusionnet.objectives import packed_layout

try:
    from fusionnet import _kernels as compiled
except ImportError:  # extension not built
    compiled = None


def graph_cases(seed):
    rng = np.random.default_rng(seed)
    w = np.array([[0.0, 0.5], [0.5, 0.0]])
    for name, d in (("tandem", tandem()), ("tree11", binary_tree_11()), ("acyclic11", acyclic_graph_11())):
        pk = packed_layout(d)
        p1 = np.ascontiguousarray(rng.uniform(0, 1, (2, int(pk.off[-1]))))
        base = (pk.n, pk.par_ptr, pk.par_idx, pk.off, p1)
        yield f"joint_probs[{name}]", "joint_probs", base
        yield f"node_gradient[{name}, k=1]", "node_gradient", (0, *base, w)


def corr_case():
    brk = np.linspace(-10, 12, 45)
    nodes, wts = np.polynomial.legendre.leggauss(16)
    args = (1.0, 1.5, 0.6, 0.3, 0.8, -1.0, 0.7, -0.4, 1.3, -2.0, 0.2, brk, nodes, wts)
    yield "corr_final_prob_h1", "corr_final_prob_h1", args


def best_time(fn, args, repeat, number):
    return min(timeit.repeat(lambda: fn(*args), repeat=repeat, number=number)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if compiled is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'kernel':34s} {'python [us]':>12s} {'compiled [us]':>14s} {'speedup':>8s} {'max |diff|':>11s}")
    for label, name, kargs in (*graph_cases(args.seed), *corr_case()):
        slow, fast = getattr(_kernels_py, name), getattr(compiled, name)
        diff = float(np.max(np.abs(np.asarray(slow(*kargs)) - np.asarray(fast(*kargs)))))
        ts = best_time(slow, kargs, args.repeat, args.number)
        tf = best_time(fast, kargs, args.repeat, args.number)
        print(f"{label:34s} {ts * 1e6:12.2f} {tf * 1e6:14.2f} {ts / tf:8.1f} {diff:11.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
