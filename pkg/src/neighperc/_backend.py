"""Kernel selection.

The compiled core is used when it imports; set ``NEIGHPERC_PURE=1`` to force
the pure-Python kernels (identical results, much slower).
"""

import os

from . import _pykernels as python_kernels

compiled_kernels = None
if os.environ.get("NEIGHPERC_PURE") != "1":
    try:
        from . import _core as compiled_kernels
    except ImportError:  # no compiler at install time
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = kernels.NAME
