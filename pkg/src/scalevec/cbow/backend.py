"""Training-kernel selection: compiled extension if available, numpy fallback otherwise.

Set SCALEVEC_BACKEND=python to force the fallback (e.g. for the backend
comparison benchmark).
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel_c  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _kernel_c = None
    HAVE_COMPILED = False


def get_kernel(name: str | None = None):
    """Return the kernel module for ``name`` (cython | python | None=auto)."""
    if name is None:
        name = os.environ.get("SCALEVEC_BACKEND", "auto")
    if name in ("auto", ""):
        return _kernel_c if HAVE_COMPILED else _kernel_py
    if name == "cython":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but the extension is not built")
        return _kernel_c
    if name == "python":
        return _kernel_py
    raise ValueError(f"unknown backend {name!r} (expected 'cython', 'python', or 'auto')")


def backend_name(name: str | None = None) -> str:
    return get_kernel(name).BACKEND_NAME
