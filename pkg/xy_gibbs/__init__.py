"""
Variational preparation of Gibbs states of the periodic spin-1/2 XY chain.

The numerical core lives in ``xy_gibbs.utils``; the command-line surface is a
set of Django management commands reachable through the ``xy-gibbs`` script.
"""

__version__ = "1.0.0"
