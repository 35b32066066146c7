"""Hot inner loops over bit-packed columns.

``_ckernels`` is the compiled Cython build; ``_pykernels`` is a numpy
implementation with the same signatures.  The compiled module is used when
it imports, unless ``BCHSENSE_PURE_PYTHON=1`` is set.

Packed layout: a column of ``m`` trits is two rows of ``ceil(m/64)`` uint64
words (a ``plus`` plane and a ``minus`` plane); bit ``t`` of word ``w`` is
entry ``64*w + t``.
"""

import os

from . import _pykernels

try:
    if os.environ.get("BCHSENSE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from . import _ckernels as backend
except ImportError:
    backend = _pykernels

BACKEND_NAME = "cython" if backend is not _pykernels else "python"


def available_backends():
    """Name -> module for every kernel implementation that imports here."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
