"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy
implementation takes over.  Set ``SHORTCODE_PURE_PYTHON=1`` to force the
fallback (the benchmark and the backend-equivalence tests do this).
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType


def load_backend(name: str | None = None) -> ModuleType:
    if name is None:
        name = "python" if os.environ.get("SHORTCODE_PURE_PYTHON") else "auto"
    if name == "python":
        return importlib.import_module("shortcode._pykernels")
    try:
        return importlib.import_module("shortcode._ckernels")
    except ImportError:
        if name == "cython":
            raise
        return importlib.import_module("shortcode._pykernels")


_impl = load_backend()

BACKEND: str = _impl.BACKEND
outer_codes = _impl.outer_codes
tensor_outer_codes = _impl.tensor_outer_codes
shortcode_accepts = _impl.shortcode_accepts
tensor_accepts = _impl.tensor_accepts
grassmann_walk = _impl.grassmann_walk
