"""Kernel backend selection.

The compiled Cython extension is preferred when it imported cleanly; the
NumPy fallback keeps the package functional without a compiler. Setting
the environment variable ``HPSPLINES_PURE_PYTHON=1`` forces the fallback.
Both backends expose the same three kernels with identical semantics:
``eval_piecewise``, ``banded_cholesky_factor``, ``banded_cholesky_solve``.
"""

import os

from . import _kernels_py

if os.environ.get('HPSPLINES_PURE_PYTHON', '').strip() in ('1', 'true', 'yes'):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME = _impl.BACKEND_NAME

eval_piecewise = _impl.eval_piecewise
banded_cholesky_factor = _impl.banded_cholesky_factor
banded_cholesky_solve = _impl.banded_cholesky_solve
