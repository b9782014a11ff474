"""Time the neighborhood scan under each available backend.

    python benchmarks/bench_kernels.py [--repeat 50]

Both backends must return the same move; the script checks that before timing.
"""
from __future__ import annotations

import argparse
import random
import timeit

from sonetls import kernels
from sonetls.instance import generate_goldschmidt, generate_lee
from sonetls.model import IdpSolution, SrapSolution
from sonetls.neighborhood import best_move
from sonetls.objective import ObjectiveSpec


def cases():
    rng = random.Random(0)
    for n in (15, 30, 50):
        inst = generate_goldschmidt(n, "low", "random", 0.3, n)
        yield f"srap n={n}", SrapSolution(inst, [rng.randrange(max(2, n // 5)) for _ in range(n)])
    for n, m in ((15, 30), (25, 35)):
        inst = generate_lee(n, m, n)
        yield f"idp n={n} m={m}", IdpSolution(inst, [rng.randrange(m // 4) for _ in range(m)])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()
    mods = kernels.backends()
    spec = ObjectiveSpec("z5")
    print(f"{'case':<18}" + "".join(f"{name:>14}" for name in mods) + "     speedup")
    for label, sol in cases():
        moves = {name: best_move(sol, spec, backend=mod) for name, mod in mods.items()}
        assert len(set(moves.values())) == 1, f"backends disagree on {label}"
        times = {name: min(timeit.repeat(lambda: best_move(sol, spec, backend=mod),
                                         number=args.repeat, repeat=3)) / args.repeat
                 for name, mod in mods.items()}
        cols = "".join(f"{times[n] * 1e6:>11.1f} us" for n in mods)
        speed = f"{times['python'] / times['cython']:>10.1f}x" if "cython" in times else ""
        print(f"{label:<18}{cols}{speed}")


if __name__ == "__main__":
    main()
