"""RK4 inner loops with a compiled backend and a pure-Python fallback.

The compiled extension is used when importable. Set ``RABIVAC_KERNEL=python``
to force the fallback.
"""
import logging
import os

logger = logging.getLogger(__name__)

if os.environ.get("RABIVAC_KERNEL", "").lower() == "python":
    from ._rk4_py import direct_rk4, riccati_rk4

    BACKEND = "python"
else:
    try:
        from ._rk4 import direct_rk4, riccati_rk4

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._rk4_py import direct_rk4, riccati_rk4

        BACKEND = "python"
        logger.debug("compiled RK4 kernels unavailable, using pure-Python fallback")

__all__ = ["BACKEND", "direct_rk4", "riccati_rk4"]
