"""Backend selection for the quadrature hot loops.

The compiled module is used when it imports; otherwise the numpy fallback.
Set ``BERGFOCK_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("BERGFOCK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

polyval = _impl.polyval
lp_sum = _impl.lp_sum
dual_moments = _impl.dual_moments
lp_hessian = _impl.lp_hessian

__all__ = ["BACKEND", "polyval", "lp_sum", "dual_moments", "lp_hessian"]
