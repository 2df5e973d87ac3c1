"""Kernel backend selection.

The compiled extension is preferred; set ``MODEFLOW_PURE_PYTHON=1`` to force the
numpy fallback (useful for benchmarking and for platforms without a compiler).
"""
import os

BACKEND = "python"

if os.environ.get("MODEFLOW_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import (  # noqa: F401
        coherence_bound, lorenz_dominates, lorenz_evaluate, mode_l1_all, thermal_bound_sum,
    )
else:
    try:
        from ._ckernels import (  # noqa: F401
            coherence_bound, lorenz_dominates, lorenz_evaluate, mode_l1_all, thermal_bound_sum,
        )
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import (  # noqa: F401
            coherence_bound, lorenz_dominates, lorenz_evaluate, mode_l1_all, thermal_bound_sum,
        )
