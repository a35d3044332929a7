"""Stability of minimal surfaces through self-map variations.

Submodules: :mod:`algebra`, :mod:`weierstrass`, :mod:`spectral`,
:mod:`transforms`, :mod:`schwarz` and :mod:`cli`.
"""

__version__ = "0.1.0"
