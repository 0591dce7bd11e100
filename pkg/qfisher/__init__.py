"""
qfisher - Fisher information, Kerridge inaccuracy and uncertainty products
for one-dimensional wavefunctions on a grid.
"""

__version__ = "0.1.0"
