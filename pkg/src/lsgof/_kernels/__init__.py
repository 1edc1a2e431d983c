"""Kernel backend selection.

The compiled extension (built from _speedups.pyx) and the NumPy reference
module expose the same three functions: psi_normal, psi_logistic, re_cubic.
Selection happens once at import:

    LSGOF_BACKEND=native   require the compiled extension
    LSGOF_BACKEND=python   force the NumPy reference implementation
    (unset / auto)         use the extension when importable
"""
import os

from . import _ref

_requested = os.environ.get("LSGOF_BACKEND", "auto").strip().lower()

if _requested in ("python", "ref"):
    backend = _ref
    backend_name = "python"
elif _requested in ("native", "auto", ""):
    try:
        from . import _speedups as backend  # type: ignore[attr-defined]
        backend_name = "native"
    except ImportError:
        if _requested == "native":
            raise
        backend = _ref
        backend_name = "python"
else:
    raise ValueError("LSGOF_BACKEND must be 'native', 'python', or 'auto'; "
                     "got %r" % (_requested,))

LOGISTIC_SWITCH_X = _ref.LOGISTIC_SWITCH_X
RE_X0 = _ref.RE_X0
RE_DX = _ref.RE_DX
RE_N = _ref.RE_N

psi_normal = backend.psi_normal
psi_logistic = backend.psi_logistic
re_cubic = backend.re_cubic

reference = _ref
