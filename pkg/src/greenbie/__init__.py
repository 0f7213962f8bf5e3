"""Learned Green's functions for 2-D Poisson and Helmholtz problems.

The package represents the smooth remainder H = G - G0 of a Green's
function either through boundary layer potentials whose density is a
trained network (the boundary-integral route) or through a network
approximating H directly (the derivative-based baseline), and uses the
resulting G as a solution operator for families of boundary-value
problems.

Set ``GREENBIE_THREADS`` before the first import to cap the number of
BLAS threads used by the numerical kernels.
"""

import os as _os

_cap = _os.environ.get("GREENBIE_THREADS")
if _cap:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _cap)

from .errors import (  # noqa: E402
    GeometryMismatchError,
    OracleFailure,
    SingularityError,
    TrainingDiverged,
)

__all__ = [
    "GeometryMismatchError",
    "OracleFailure",
    "SingularityError",
    "TrainingDiverged",
]

__version__ = "0.1.0"
