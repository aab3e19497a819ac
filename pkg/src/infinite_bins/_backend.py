"""Pick the compiled kernels when available, else the pure-Python twin.

Set ``INFBIN_PURE=1`` to force the fallback.
"""

import os

if os.environ.get("INFBIN_PURE", "") not in ("", "0"):
    from . import _fallback as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        from . import _fallback as kernels

BACKEND = kernels.BACKEND
