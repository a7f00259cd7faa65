"""motint: motivic integration over Puiseux series, made computable.

Modules: ``semilinear`` (value-group geometry), ``grothring`` (classes of
varieties and rational functions in T), ``gammaring`` (the convolution ring
of step functions), ``rvcalc`` (blocks, retractions, zeta functions),
``milnor`` (Newton-polyhedron front end) and ``cli``.
"""
from .grothring import SCHEMA_VERSION, VClass
from .milnor import decompose, euler_milnor, milnor_fiber, parse_poly, zeta_f

__version__ = "0.1.0"
__all__ = ["SCHEMA_VERSION", "VClass", "decompose", "euler_milnor", "milnor_fiber",
           "parse_poly", "zeta_f"]
