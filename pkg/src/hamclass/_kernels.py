"""Amplitude-loop kernels for local (optionally controlled) matrices.

Two interchangeable backends implement the same in-place operations on a
flat ``complex128`` state of length ``2**n``. Qubit ``q`` lives at bit
position ``n - 1 - q`` of the amplitude index, so qubit 0 is the most
significant bit (the leftmost character of a bitstring).

The numba path is used when numba imports cleanly, unless the environment
variable ``HAMCLASS_DISABLE_NUMBA`` is set to a truthy value, in which case
the pure-numpy path (tensor reshapes + matmul) is used instead.
"""

from __future__ import annotations

import os

import numpy as np

_disabled = os.environ.get("HAMCLASS_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    if _disabled:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy path
# ---------------------------------------------------------------------------


def _np_view(psi, n, targets, controls, cvals):
    """Return (sub-view with target axes first, inverse axis order)."""
    batch = psi.shape[1:]
    t = psi.reshape((2,) * n + batch)
    idx = [slice(None)] * t.ndim
    for c, v in zip(controls, cvals):
        idx[c] = int(v)
    sub = t[tuple(idx)]
    remaining = [q for q in range(n) if q not in set(controls)]
    axes = [remaining.index(q) for q in targets]
    return sub, axes


def np_apply_matrix(psi, n, u, targets, controls=(), cvals=()):
    """psi <- (|cvals><cvals| (x) u + rest (x) 1) psi, in place."""
    k = len(targets)
    sub, axes = _np_view(psi, n, targets, controls, cvals)
    moved = np.moveaxis(sub, axes, range(k))
    shape = moved.shape
    new = (u @ moved.reshape(1 << k, -1)).reshape(shape)
    sub[...] = np.moveaxis(new, range(k), axes)
    return psi


def np_accumulate_matrix(psi, out, n, u, coef, targets, controls=(), cvals=()):
    """out += coef * (|cvals><cvals| (x) u) psi."""
    k = len(targets)
    sub, axes = _np_view(psi, n, targets, controls, cvals)
    osub, _ = _np_view(out, n, targets, controls, cvals)
    moved = np.moveaxis(sub, axes, range(k))
    shape = moved.shape
    new = (u @ moved.reshape(1 << k, -1)).reshape(shape)
    osub += coef * np.moveaxis(new, range(k), axes)
    return out


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _offsets(tpos):
        k = tpos.size
        dim = 1 << k
        offs = np.zeros(dim, np.int64)
        for j in range(dim):
            o = 0
            for b in range(k):
                if (j >> (k - 1 - b)) & 1:
                    o |= np.int64(1) << tpos[b]
            offs[j] = o
        return offs

    @njit(cache=True, nogil=True)
    def _deposit(i, fixed_sorted):
        base = i
        for p in fixed_sorted:
            base = ((base >> p) << (p + 1)) | (base & ((np.int64(1) << p) - 1))
        return base

    @njit(cache=True, nogil=True)
    def _nb_apply(psi, u, tpos, fixed_sorted, cbits, n_free):
        offs = _offsets(tpos)
        dim = offs.size
        buf = np.empty(dim, np.complex128)
        for i in range(np.int64(1) << n_free):
            base = _deposit(np.int64(i), fixed_sorted) | cbits
            for j in range(dim):
                buf[j] = psi[base + offs[j]]
            for r in range(dim):
                acc = 0j
                for c in range(dim):
                    acc += u[r, c] * buf[c]
                psi[base + offs[r]] = acc

    @njit(cache=True, nogil=True)
    def _nb_accumulate(psi, out, u, coef, tpos, fixed_sorted, cbits, n_free):
        offs = _offsets(tpos)
        dim = offs.size
        for i in range(np.int64(1) << n_free):
            base = _deposit(np.int64(i), fixed_sorted) | cbits
            for r in range(dim):
                acc = 0j
                for c in range(dim):
                    acc += u[r, c] * psi[base + offs[c]]
                out[base + offs[r]] += coef * acc


def _layout(n, targets, controls, cvals):
    tpos = np.array([n - 1 - q for q in targets], dtype=np.int64)
    cpos = [n - 1 - q for q in controls]
    fixed = np.array(sorted(list(tpos) + cpos), dtype=np.int64)
    cbits = 0
    for p, v in zip(cpos, cvals):
        if v:
            cbits |= 1 << p
    return tpos, fixed, np.int64(cbits), n - fixed.size


def nb_apply_matrix(psi, n, u, targets, controls=(), cvals=()):
    tpos, fixed, cbits, n_free = _layout(n, targets, controls, cvals)
    _nb_apply(psi, np.ascontiguousarray(u, dtype=np.complex128), tpos, fixed, cbits, n_free)
    return psi


def nb_accumulate_matrix(psi, out, n, u, coef, targets, controls=(), cvals=()):
    tpos, fixed, cbits, n_free = _layout(n, targets, controls, cvals)
    _nb_accumulate(
        psi,
        out,
        np.ascontiguousarray(u, dtype=np.complex128),
        complex(coef),
        tpos,
        fixed,
        cbits,
        n_free,
    )
    return out


def apply_matrix(psi, n, u, targets, controls=(), cvals=()):
    """Apply a (controlled) local matrix to a flat state in place."""
    if HAVE_NUMBA and psi.ndim == 1:
        return nb_apply_matrix(psi, n, u, targets, controls, cvals)
    return np_apply_matrix(psi, n, u, targets, controls, cvals)


def accumulate_matrix(psi, out, n, u, coef, targets, controls=(), cvals=()):
    """Add ``coef * (|c><c| (x) u) psi`` into ``out``."""
    if HAVE_NUMBA and psi.ndim == 1:
        return nb_accumulate_matrix(psi, out, n, u, coef, targets, controls, cvals)
    return np_accumulate_matrix(psi, out, n, u, coef, targets, controls, cvals)
