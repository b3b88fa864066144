"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
``RESPGAP_PURE_PYTHON`` environment variable is set to a non-empty value,
the pure-Python module is used.  Both expose ``solve_one`` and ``solve_all``
with identical signatures and results.
"""

import os

from . import _kernel_py

if os.environ.get("RESPGAP_PURE_PYTHON"):
    _impl = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernel_py
        BACKEND = "python"

WIN, UWIN, EWIN = 0, 1, 2


def solve_all(cm, impl=None):
    impl = impl or _impl
    return impl.solve_all(cm.n, cm.n_agents, *cm.arrays())


def solve_one(cm, agent: int, outcome: int, sem: int, impl=None):
    impl = impl or _impl
    return impl.solve_one(cm.n, agent, outcome, sem, *cm.arrays())


def backends():
    """All importable backends, keyed by name."""
    out = {"python": _kernel_py}
    try:
        from . import _kernel

        out["cython"] = _kernel
    except ImportError:
        pass
    return out
