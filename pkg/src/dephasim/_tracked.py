"""Backend selection for the tracked-environment sum.

Prefers the compiled extension; falls back to the numpy implementation.
Set DEPHASIM_TRACKED_BACKEND=python (or =cython) to force a choice, e.g.
for benchmarking.
"""

import os

__all__ = ["tracked_sums", "TRACKED_BACKEND"]

_forced = os.environ.get("DEPHASIM_TRACKED_BACKEND", "").strip().lower()

if _forced == "python":
    from ._tracked_py import tracked_sums

    TRACKED_BACKEND = "python"
elif _forced == "cython":
    from ._tracked_cy import tracked_sums  # raises if the extension is absent

    TRACKED_BACKEND = "cython"
elif _forced:
    raise ImportError(
        f"DEPHASIM_TRACKED_BACKEND={_forced!r} not recognized "
        "(expected 'python' or 'cython')"
    )
else:
    try:
        from ._tracked_cy import tracked_sums

        TRACKED_BACKEND = "cython"
    except ImportError:
        from ._tracked_py import tracked_sums

        TRACKED_BACKEND = "python"
