"""Kernel dispatch.

Imports the compiled extension when it is available and falls back to the
pure-Python twin otherwise. Set TARSKICERT_PURE=1 to force the fallback
(useful for benchmarks and differential tests).
"""

from __future__ import annotations

import os

from . import _speedups_py

if os.environ.get("TARSKICERT_PURE") == "1":
    _impl = _speedups_py
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _speedups_py

IMPLEMENTATION: str = _impl.IMPLEMENTATION

series_one = _impl.series_one
series_mul_letter = _impl.series_mul_letter
word_series = _impl.word_series
series_mul = _impl.series_mul
series_truncate = _impl.series_truncate
collision_scan = _impl.collision_scan
loop_words = _impl.loop_words
nielsen_products = _impl.nielsen_products


def series_impl(rank: int, degree_bound: int):
    """Pick the series implementation that is safe for these parameters.

    The compiled kernels pack monomials into signed 64-bit keys, which needs
    (rank+1)**(degree_bound+1) to stay below 2**62; beyond that the pure
    implementation (arbitrary precision ints) is used even when the
    extension is present.
    """
    if _impl is not _speedups_py and (rank + 1) ** (degree_bound + 1) >= 2 ** 62:
        return _speedups_py
    return _impl


def word_impl(rank: int):
    """Word-enumeration kernels store letter codes in signed chars."""
    if _impl is not _speedups_py and 2 * rank > 127:
        return _speedups_py
    return _impl
