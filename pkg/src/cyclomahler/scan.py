"""Lift-scanning kernel: compiled when available, pure Python otherwise.

Set CYCLOMAHLER_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _scan_py

BACKEND = "python"
scan_block = _scan_py.scan_block
splitting_ok = _scan_py.splitting_ok

if os.environ.get("CYCLOMAHLER_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _scan as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        scan_block = _compiled.scan_block
        splitting_ok = _compiled.splitting_ok
