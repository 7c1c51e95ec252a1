"""Dense symmetric linear-algebra helpers shared across the package."""

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .errors import NumericalFailure, SingularSystem

EIG_CLAMP = 1e-12


def spd_solve(mat, rhs):
    """Solve mat @ x = rhs for symmetric positive-definite mat.

    Uses a Cholesky factorization; never forms an explicit inverse.
    """
    try:
        c, low = cho_factor(mat, check_finite=False)
    except LinAlgError as exc:
        raise SingularSystem(f"SPD solve failed: {exc}") from exc
    return cho_solve((c, low), rhs, check_finite=False)


def sym_eig(mat):
    """Eigendecomposition of a (numerically) symmetric matrix."""
    try:
        return np.linalg.eigh((mat + mat.T) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc


def sym_sqrt(mat):
    """Symmetric square root, eigenvalues clamped at EIG_CLAMP."""
    w, v = sym_eig(mat)
    w = np.maximum(w, EIG_CLAMP)
    return (v * np.sqrt(w)) @ v.T


def sym_inv_sqrt(mat):
    """Symmetric inverse square root, eigenvalues clamped at EIG_CLAMP."""
    w, v = sym_eig(mat)
    w = np.maximum(w, EIG_CLAMP)
    return (v / np.sqrt(w)) @ v.T


def min_eigval(mat):
    """Smallest eigenvalue of a symmetric matrix."""
    return float(sym_eig(mat)[0][0])


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(fun, lo, hi, rel_tol=1e-10, max_iter=400):
    """Minimize a unimodal scalar function on [lo, hi].

    Returns (x_min, f_min). Tolerance is relative to max(1, |x|).
    """
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if (b - a) <= rel_tol * max(1.0, abs(a)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    x = (a + b) / 2.0
    fx = fun(x)
    # guard against the midpoint landing worse than a probe
    best = min((fx, x), (fc, c), (fd, d))
    return best[1], best[0]
