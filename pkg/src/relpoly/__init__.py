"""Exact reliability-polynomial toolkit.

Submodules:
  gaussian      exact Gaussian-rational arithmetic (the parameter field)
  bigcomplex    arbitrary-precision complex floats and interval helpers
  polynomials   rational polynomials, gcd, certified roots, reconstruction
  graphs        multigraphs, two-terminal graphs, the series-parallel DSL
  reliability   R and S evaluators (brute force, del-con, pair recursion)
  interactions  edge interactions, Mobius dynamics, pentagon template
  constructor   cover certificates and targeted interaction construction
  reduction     simulated-oracle reduction: box shrink, ratios, telescoping
  locus         activity scans, zero atlas, unity certificates, threshold
  cli           the `rel` command-line entry point
"""

from .gaussian import GQ, gq, parse_gaussian
from .graphs import K2, Multigraph, SPExpr, TwoTerminal, parse_sp, realize
from .reliability import RelPair, brute_force, eval_delcon, eval_sp, symbolic

__all__ = [
    "GQ",
    "gq",
    "parse_gaussian",
    "K2",
    "Multigraph",
    "SPExpr",
    "TwoTerminal",
    "parse_sp",
    "realize",
    "RelPair",
    "brute_force",
    "eval_delcon",
    "eval_sp",
    "symbolic",
]

__version__ = "0.1.0"
