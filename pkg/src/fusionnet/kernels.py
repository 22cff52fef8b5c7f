"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``FUSIONNET_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("FUSIONNET_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

joint_probs = _impl.joint_probs
node_gradient = _impl.node_gradient
corr_final_prob_h1 = _impl.corr_final_prob_h1
