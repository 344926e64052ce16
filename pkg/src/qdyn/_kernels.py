"""Kernel backend selection.

The compiled extension is used when importable unless ``QDYN_BACKEND=python``
is set in the environment. ``BACKEND`` records the choice.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels
from .errors import IntegrationError

# model codes understood by both kernel backends
OHMIC, POLARIZATION, JAYNES_CUMMINGS, PAULI_TANH, PAULI_TAN = range(5)

_ckernels = None
if os.environ.get("QDYN_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels
    except ImportError:
        _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

_MESSAGES = {
    _pykernels.STEP_UNDERFLOW: "step size underflow",
    _pykernels.NONFINITE: "generator not finite",
    _pykernels.MAX_STEPS: "step budget exhausted",
}


def ohmic_upsilon(times, omega_c: float, s: float, gamma_s: float, tol: float) -> np.ndarray:
    impl = _ckernels if _ckernels is not None else _pykernels
    return impl.ohmic_upsilon(times, omega_c, s, gamma_s, tol)


def integrate_affine(code: int, params, generator, n0, times, tol: float) -> np.ndarray:
    """Integrate a model's Bloch equation on ``times``; raise on failure.

    ``generator`` is the Python callable used by the fallback backend; the
    compiled backend evaluates the generator for ``code`` natively.
    """
    if _ckernels is not None:
        states, status, t_fail = _ckernels.rk45_affine(code, params, n0, times, tol)
    else:
        states, status, t_fail = _pykernels.rk45_affine(generator, n0, times, tol)
    if status != _pykernels.OK:
        raise IntegrationError(_MESSAGES.get(status, "integration failed"), float(t_fail))
    return states
