"""Exact toolkit for arithmetic Hilbert-Samuel invariants of metrized graded algebras.

Submodules:

* ``exact``: rationals, multi-indices and rigorous extended reals
* ``superadd``: superadditive sequences, transport matrices, Fekete limits
* ``lattice``: metrized Z-modules, arithmetic degree, first minimum
* ``tube``: Reinhardt log profiles and their sup-norm chi-hat
* ``monomial``: monomial ideals, Gröbner bases and the cone deformation
* ``invariants``: the j-rescaled invariant estimates
* ``cli``: the ``hilbsam`` command
"""

from .exact import ExtReal, MultiIndex, simplex_count
from .invariants import InvariantEstimate, MetricSpec, estimate_invariant
from .kernels import BACKEND
from .lattice import ChiValue, MetrizedLattice, PresentedModule, arithmetic_degree, first_minimum
from .monomial import HomogeneousIdeal, MonomialIdeal, ResourceError, hilbert_function, parse_ideal
from .superadd import fekete_estimate, transport_matrix
from .tube import LogProfile, sup_chi

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChiValue", "ExtReal", "HomogeneousIdeal", "InvariantEstimate", "LogProfile",
    "MetricSpec", "MetrizedLattice", "MonomialIdeal", "MultiIndex", "PresentedModule", "ResourceError",
    "arithmetic_degree", "estimate_invariant", "fekete_estimate", "first_minimum", "hilbert_function",
    "parse_ideal", "simplex_count", "sup_chi", "transport_matrix",
]
