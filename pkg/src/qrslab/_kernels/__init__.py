"""Hot-kernel backend selection.

The compiled extension (``_fast``, built from ``_fast.pyx``) is preferred
when importable; otherwise the NumPy reference (``_ref``) is used. Set
``QRSLAB_KERNELS=fallback`` to force the reference implementation, or
``QRSLAB_KERNELS=compiled`` to fail loudly when the extension is missing.
"""

import os

from . import _ref

_requested = os.environ.get("QRSLAB_KERNELS", "auto").lower()

if _requested == "fallback":
    _impl = _ref
elif _requested in ("auto", "compiled"):
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _ref
else:
    raise ValueError(f"unknown QRSLAB_KERNELS value: {_requested!r}")

BACKEND = _impl.BACKEND_NAME
perm_ryser = _impl.perm_ryser
perm_glynn = _impl.perm_glynn
perm_glynn_batch = _impl.perm_glynn_batch
haf_trace = _impl.haf_trace


def available_backends() -> dict:
    """Importable kernel modules keyed by name (for tests and the benchmark)."""
    backends = {"fallback": _ref}
    try:
        from . import _fast

        backends["compiled"] = _fast
    except ImportError:
        pass
    return backends
