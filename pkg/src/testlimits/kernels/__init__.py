"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is fixed at import time.  Set ``TESTLIMITS_DISABLE_NUMBA=1``
(or numba's own ``NUMBA_DISABLE_JIT=1``) to select the numpy path; the
numba path is also skipped when numba cannot be imported.
"""
import os

from . import _numpy

_FUNCS = (
    "transitive_closure",
    "up_closure_rel",
    "down_closure_rel",
    "up_closure_pow",
    "down_closure_pow",
    "irremediable",
    "contained",
    "first_witness",
    "monotone_violation_rel",
    "monotone_violation_pow",
    "power_alpha",
    "subset_alpha",
)


def _flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


def _load_numba():
    if _flag("TESTLIMITS_DISABLE_NUMBA") or _flag("NUMBA_DISABLE_JIT"):
        return None
    try:
        from . import _numba
    except ImportError:
        return None
    return _numba


_numba_impl = _load_numba()
BACKEND = "numba" if _numba_impl is not None else "numpy"
_impl = _numba_impl or _numpy


def implementations():
    """Map backend name to kernel module for every backend available here."""
    out = {"numpy": _numpy}
    try:
        from . import _numba
    except ImportError:
        pass
    else:
        out["numba"] = _numba
    return out


transitive_closure = _impl.transitive_closure
up_closure_rel = _impl.up_closure_rel
down_closure_rel = _impl.down_closure_rel
up_closure_pow = _impl.up_closure_pow
down_closure_pow = _impl.down_closure_pow
irremediable = _impl.irremediable
contained = _impl.contained
first_witness = _impl.first_witness
monotone_violation_rel = _impl.monotone_violation_rel
monotone_violation_pow = _impl.monotone_violation_pow
power_alpha = _impl.power_alpha
subset_alpha = _impl.subset_alpha

__all__ = ["BACKEND", "implementations", *_FUNCS]
