"""Kernel backend selection.

The hot kernels (tape evaluation inside adaptive quadrature) exist twice: a
Cython extension (_core) and a numpy-backed fallback (pure) with identical
semantics.  The compiled one is used when importable; set
FLATMAP_BACKEND=pure or FLATMAP_BACKEND=compiled to force a choice.
"""

import os

from .tape import (  # noqa: F401
    ERR_DIV_ZERO,
    ERR_NONFINITE,
    PanelLimitError,
    Tape,
    TapeEvalError,
    compile_tape,
)

_requested = os.environ.get("FLATMAP_BACKEND", "").strip().lower()
if _requested not in ("", "compiled", "pure"):
    raise ImportError(
        f"FLATMAP_BACKEND={_requested!r} not understood; use 'compiled' or 'pure'")

if _requested == "pure":
    from . import pure as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        from . import pure as _impl

backend_name: str = _impl.name
eval_tape = _impl.eval_tape
integrate_segment_exp = _impl.integrate_segment_exp
