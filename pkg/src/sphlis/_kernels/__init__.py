"""Numeric kernel backend selection.

The compiled extension (``_core``, built from Cython) is preferred; the
pure-numpy module (``_pure``) is the fallback so the package works without a
compiler.  Set ``SPHLIS_PURE_KERNELS=1`` to force the fallback.  Both
backends implement the same four functions with identical semantics; the
wrappers below normalise dtypes/shapes so callers can pass any array-like.
"""

import os

import numpy as np

from . import _pure

_impl = _pure
BACKEND = "pure"

if os.environ.get("SPHLIS_PURE_KERNELS", "0") in ("", "0"):
    try:
        from . import _core as _impl_core

        _impl = _impl_core
        BACKEND = "compiled"
    except ImportError:
        pass


def available_backends():
    """Importable backend modules keyed by name (for tests and benchmarks)."""
    backends = {"pure": _pure}
    try:
        from . import _core

        backends["compiled"] = _core
    except ImportError:
        pass
    return backends


def _as1d(x):
    return np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)


def cap_integrand(tau, u):
    u1 = _as1d(u)
    out = np.asarray(_impl.cap_integrand(float(tau), u1.ravel()))
    return out.reshape(u1.shape) if np.ndim(u) else float(out[0])


def cap_integrand_clamped(tau, u):
    u1 = _as1d(u)
    out = np.asarray(_impl.cap_integrand_clamped(float(tau), u1.ravel()))
    return out.reshape(u1.shape) if np.ndim(u) else float(out[0])


def disk_density(zk, sin_theta, cos_theta, r, phi):
    r1, phi1 = np.broadcast_arrays(_as1d(r), _as1d(phi))
    out = np.asarray(
        _impl.disk_density(
            float(zk),
            float(sin_theta),
            float(cos_theta),
            np.ascontiguousarray(r1.ravel()),
            np.ascontiguousarray(phi1.ravel()),
        )
    )
    if np.ndim(r) or np.ndim(phi):
        return out.reshape(r1.shape)
    return float(out[0])


def coherent_power(amp, phase):
    a1 = _as1d(amp).ravel()
    p1 = _as1d(phase).ravel()
    return float(_impl.coherent_power(a1, p1))
