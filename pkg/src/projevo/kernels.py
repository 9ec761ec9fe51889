"""Backend selection for the numerical hot loops.

The compiled Cython module is used when it was built; otherwise the numpy
implementation in ``_pykernels`` takes over.  Setting the environment
variable ``PROJEVO_PURE_PYTHON=1`` forces the fallback (used by the
benchmark and by the cross-backend tests).
"""

import os

BACKEND = "python"

if os.environ.get("PROJEVO_PURE_PYTHON", "") != "1":
    try:
        from ._ckernels import (  # noqa: F401
            phase_sum,
            pi_d_1d_array,
            si,
            si_array,
            sinc_sq_array,
        )
        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._pykernels import (  # noqa: F401
        phase_sum,
        pi_d_1d_array,
        si,
        si_array,
        sinc_sq_array,
    )

__all__ = ["BACKEND", "phase_sum", "pi_d_1d_array", "si", "si_array", "sinc_sq_array"]
