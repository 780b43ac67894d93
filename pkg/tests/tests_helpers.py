"""Shared construction helpers for the test suite."""

from relpoly.graphs import SPExpr


def random_expr(rng, leaves: int) -> SPExpr:
    if leaves == 1:
        return SPExpr.leaf(rng.random() < 0.25)
    k = rng.randint(1, leaves - 1)
    a, b = random_expr(rng, k), random_expr(rng, leaves - k)
    return SPExpr.series(a, b) if rng.random() < 0.5 else SPExpr.parallel(a, b)
