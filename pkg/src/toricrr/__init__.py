"""Exact Euler-Maclaurin expansions of quantization multiplicities for toric models."""
from .algebra import MultiPoly, LaurentSeries, Rational, bernoulli
from .polytope import LatticePolytope, VertexCone
from .dh import FaceDistribution, pair, pair_exact

__version__ = "0.1.0"
