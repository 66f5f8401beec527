"""Hot numerical kernels with a compiled backend and a pure-Python fallback.

The compiled extension ``_ckernel`` is used when it imports; otherwise, or
when the environment variable ``FBEIG_PURE_PYTHON`` is set to a non-empty
value other than ``0``, the functions come from ``_pykernel``.
"""
import os

from . import _pykernel

_forced = os.environ.get("FBEIG_PURE_PYTHON", "") not in ("", "0")

_compiled = None
if not _forced:
    try:
        from . import _ckernel as _compiled
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _pykernel
BACKEND = "cython" if _compiled is not None else "python"

jn_array = _impl.jn_array
u_value_dr = _impl.u_value_dr
u_full = _impl.u_full
u_many = _impl.u_many
miller_start = _impl.miller_start


def backends():
    """Map backend name to kernel module for every backend that loaded."""
    found = {"python": _pykernel}
    if _compiled is not None:
        found["cython"] = _compiled
    return found


def set_backend(name):
    """Rebind the module-level kernels to backend ``name``; returns the old name.

    Callers reach the kernels through this module at call time, so the
    switch takes effect immediately for the whole library.
    """
    global _impl, BACKEND, jn_array, u_value_dr, u_full, u_many, miller_start
    found = backends()
    if name not in found:
        raise ValueError(f"backend {name!r} is not available; have {sorted(found)}")
    old = BACKEND
    _impl = found[name]
    BACKEND = name
    jn_array = _impl.jn_array
    u_value_dr = _impl.u_value_dr
    u_full = _impl.u_full
    u_many = _impl.u_many
    miller_start = _impl.miller_start
    return old
