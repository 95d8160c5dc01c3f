"""Backend selection for the hot loops.

The compiled extension ``corrph._ckernels`` is used when it imports cleanly;
otherwise, or when the environment variable ``CORRPH_PURE_PYTHON`` is set to
a non-empty value other than ``0``, the numpy implementations in
``corrph._pykernels`` are used. ``BACKEND`` names the active choice.
"""
import os

from . import _pykernels

_force_python = os.environ.get("CORRPH_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

faddeeva = _impl.faddeeva
ph_sums = _impl.ph_sums

__all__ = ["BACKEND", "faddeeva", "ph_sums"]
