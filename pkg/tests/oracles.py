"""Independent reference implementations used by the tests.

Nothing here calls into the package's kernels: operators are built with
explicit Kronecker products and permutations of the full basis.
"""

import numpy as np

I2 = np.eye(2)


def embed(matrix, targets, n):
    """Full 2^n matrix of ``matrix`` on ``targets`` (targets[0] = matrix msb)."""
    k = len(targets)
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    others = [q for q in range(n) if q not in targets]
    for row in range(dim):
        for col in range(dim):
            rb = [(row >> (n - 1 - q)) & 1 for q in range(n)]
            cb = [(col >> (n - 1 - q)) & 1 for q in range(n)]
            if any(rb[q] != cb[q] for q in others):
                continue
            r = sum(rb[t] << (k - 1 - j) for j, t in enumerate(targets))
            c = sum(cb[t] << (k - 1 - j) for j, t in enumerate(targets))
            out[row, col] = matrix[r, c]
    return out


def controlled(matrix, targets, controls, pattern, n):
    """|pattern><pattern|_controls (x) matrix, dense."""
    proj = np.ones(1 << n)
    for q, b in zip(controls, pattern):
        proj = proj * np.array([((i >> (n - 1 - q)) & 1) == b for i in range(1 << n)])
    P = np.diag(proj)
    return P @ embed(matrix, targets, n) @ P


def expm_series(h, theta, terms=40):
    """exp(-i theta h) by truncated power series, scaled and squared."""
    a = -1j * theta * np.asarray(h, dtype=complex)
    s = max(0, int(np.ceil(np.log2(max(np.linalg.norm(a, 1), 1.0)))) + 1)
    a = a / (1 << s)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def reduced_density(psi, n, keep):
    """Partial trace by explicit index loops, keep[0] is the msb of the result."""
    k = len(keep)
    rho = np.zeros((1 << k, 1 << k), dtype=complex)
    rest = [q for q in range(n) if q not in keep]
    for i in range(1 << n):
        for j in range(1 << n):
            if any(((i >> (n - 1 - q)) & 1) != ((j >> (n - 1 - q)) & 1) for q in rest):
                continue
            a = sum(((i >> (n - 1 - q)) & 1) << (k - 1 - m) for m, q in enumerate(keep))
            b = sum(((j >> (n - 1 - q)) & 1) << (k - 1 - m) for m, q in enumerate(keep))
            rho[a, b] += psi[i] * np.conj(psi[j])
    return rho


def random_hermitian(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)
