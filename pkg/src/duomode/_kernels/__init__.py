"""Hot loops for the Monte Carlo engine.

The compiled extension ``_sde_core`` is used when it was built; otherwise the
numpy implementation in ``_sde_py`` is selected.  Set ``DUOMODE_BACKEND=python``
to force the fallback.  Both produce bit-identical output.
"""

import os

from . import _sde_py

python_integrate_ensemble = _sde_py.integrate_ensemble

try:
    from ._sde_core import integrate_ensemble as compiled_integrate_ensemble
except ImportError:  # extension not built
    compiled_integrate_ensemble = None

if compiled_integrate_ensemble is not None and os.environ.get("DUOMODE_BACKEND", "").lower() != "python":
    BACKEND = "compiled"
    integrate_ensemble = compiled_integrate_ensemble
else:
    BACKEND = "python"
    integrate_ensemble = python_integrate_ensemble


def get_integrator(backend=None):
    """Return the ensemble integrator for ``backend`` ("compiled", "python" or None)."""
    if backend is None:
        return integrate_ensemble
    if backend == "python":
        return python_integrate_ensemble
    if backend == "compiled":
        if compiled_integrate_ensemble is None:
            raise ImportError("compiled kernel _sde_core is not built")
        return compiled_integrate_ensemble
    raise ValueError(f"unknown backend {backend!r}")
