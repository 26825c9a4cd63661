"""Select the compiled kernel backend, falling back to pure numpy.

Set ``MAGCAP_BACKEND=python`` to force the numpy fallback (used by the
backend-parity tests and the benchmark).
"""

import os

from . import _core_py

if os.environ.get("MAGCAP_BACKEND", "").lower() == "python":
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _core_py

BACKEND = "compiled" if _impl.__name__.endswith("._core") else "python"

field_batch = _impl.field_batch
field_jacobian_batch = _impl.field_jacobian_batch
force_on_dipole = _impl.force_on_dipole
