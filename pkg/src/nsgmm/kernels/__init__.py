"""Hot kernels with numba and pure-numpy implementations.

Both backends expose the same two entry points:

``location_scan``
    Exact 1-D minimization of the piecewise-quartic GMM criterion over
    the order-statistic intervals of y.

``ivqr_sweep``
    Exact 2-D minimization of the piecewise-constant IVQR criterion by
    sweeping the dual line arrangement in ascending slope.

The active implementation is resolved per call via
:func:`nsgmm.backends.backend_name` (env var ``NSGMM_BACKEND``).
"""

from __future__ import annotations

from ..backends import backend_name
from . import numpy_impl


def _impl(backend: str | None = None):
    name = backend or backend_name()
    if name == "numba":
        from . import numba_impl

        return numba_impl
    return numpy_impl


def location_scan(*args, backend: str | None = None):
    return _impl(backend).location_scan(*args)


def ivqr_sweep(*args, backend: str | None = None):
    return _impl(backend).ivqr_sweep(*args)
