"""Golden-section minimization of a unimodal scalar function."""
from __future__ import annotations

import math
from typing import Callable, NamedTuple

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class GoldenResult(NamedTuple):
    x: float
    fx: float
    evaluations: int
    converged: bool


def golden_section_minimize(f: Callable[[float], float], lo: float, hi: float,
                            tol: float = 1e-8, max_iter: int = 200) -> GoldenResult:
    """Minimize ``f`` on [lo, hi]; the endpoints are also compared so that a
    monotone function returns its better endpoint."""
    if hi < lo:
        lo, hi = hi, lo
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    it = 0
    while (b - a) > tol and it < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        evals += 1
        it += 1
    best_x, best_f = (x1, f1) if f1 <= f2 else (x2, f2)
    for x_end in (lo, hi):
        fe = f(x_end)
        evals += 1
        if fe < best_f:
            best_x, best_f = x_end, fe
    return GoldenResult(best_x, best_f, evals, (b - a) <= tol)
