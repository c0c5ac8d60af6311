"""Hot-loop kernels: CRC-16/CCITT-FALSE and background-diff blob labeling.

The compiled Cython backend is picked when its extension module imports;
otherwise the pure-Python twin takes over. Set SKIMWATCH_PURE_KERNELS=1 to
force the fallback (used by the benchmark and the equivalence tests).
"""

import os

from . import _pure

if os.environ.get("SKIMWATCH_PURE_KERNELS") == "1":
    _impl = _pure
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND = "pure" if _impl is _pure else "native"

crc16 = _impl.crc16
diff_blobs = _impl.diff_blobs

CRC16_INIT = _pure.CRC16_INIT
CRC16_POLY = _pure.CRC16_POLY
