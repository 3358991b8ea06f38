"""Kernel backend selection.

Imports the compiled extension when available, otherwise the numpy
fallback. Set the environment variable ``UDCOP_PURE_PYTHON=1`` (before
import) or call :func:`set_backend` to force the pure implementation; the
two produce bit-identical results.
"""

from __future__ import annotations

import os

from udcop import _kernels_py

try:
    from udcop import _kernels  # type: ignore[attr-defined]
except ImportError:
    _kernels = None

_BACKENDS = {"python": _kernels_py}
if _kernels is not None:
    _BACKENDS["compiled"] = _kernels

if _kernels is not None and not os.environ.get("UDCOP_PURE_PYTHON"):
    _active = _kernels
else:
    _active = _kernels_py


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def backend_name() -> str:
    return _active.BACKEND


def set_backend(name: str) -> None:
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")


def eval_all_unit(unary_eval, neighbor_vals, w_unit):
    return _active.eval_all_unit(unary_eval, neighbor_vals, w_unit)


def eval_all_weighted(unary_eval, neighbor_ids, neighbor_vals, weights, w_unit):
    return _active.eval_all_weighted(unary_eval, neighbor_ids, neighbor_vals,
                                     weights, w_unit)
