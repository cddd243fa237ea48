"""Thomas-algorithm tridiagonal solves, including batched Cayley sweeps."""

import numpy as np
from numba import njit

__all__ = ["thomas", "CayleySweep"]


def thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system A x = rhs.

    Parameters:
        lower (ndarray) : sub-diagonal, length n-1
        diag (ndarray) : main diagonal, length n
        upper (ndarray) : super-diagonal, length n-1
        rhs (ndarray) : right-hand side, shape (n,) or (n, m)

    Returns:
        x (ndarray) : solution with the shape of rhs
    """
    diag = np.asarray(diag)
    lower = np.asarray(lower)
    upper = np.asarray(upper)
    n = len(diag)
    if lower.shape != (n - 1,) or upper.shape != (n - 1,):
        raise ValueError("lower and upper diagonals must have length n-1")
    rhs = np.asarray(rhs)
    if rhs.shape[0] != n:
        raise ValueError("rhs must have n rows")
    dtype = np.result_type(lower, diag, upper, rhs, np.float64)
    cp = np.empty(n, dtype=dtype)
    dp = np.array(rhs, dtype=dtype, copy=True)
    denom = diag[0]
    if denom == 0:
        raise ZeroDivisionError("zero pivot in tridiagonal solve")
    cp[0] = upper[0] / denom if n > 1 else 0
    dp[0] = dp[0] / denom
    for i in range(1, n):
        denom = diag[i] - lower[i - 1] * cp[i - 1]
        if denom == 0:
            raise ZeroDivisionError("zero pivot in tridiagonal solve")
        cp[i] = upper[i] / denom if i < n - 1 else 0
        dp[i] = (dp[i] - lower[i - 1] * dp[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        dp[i] = dp[i] - cp[i] * dp[i + 1]
    return dp


@njit(cache=True)
def _sweep_axis0(psi, a, cp, inv_den):
    # (1 - 2a) psi_i + a (psi_{i-1} + psi_{i+1}) then forward elimination, in place
    n, m = psi.shape
    prev = np.zeros(m, dtype=psi.dtype)
    cur = np.empty(m, dtype=psi.dtype)
    d = 1.0 - 2.0 * a
    for i in range(n):
        for j in range(m):
            cur[j] = psi[i, j]
        for j in range(m):
            r = d * cur[j] + a * prev[j]
            if i + 1 < n:
                r += a * psi[i + 1, j]
            if i > 0:
                r = (r + a * psi[i - 1, j]) * inv_den[i]
            else:
                r = r * inv_den[i]
            psi[i, j] = r
        for j in range(m):
            prev[j] = cur[j]
    for i in range(n - 2, -1, -1):
        for j in range(m):
            psi[i, j] -= cp[i] * psi[i + 1, j]


@njit(cache=True)
def _sweep_axis1(psi, a, cp, inv_den):
    n_rows, n = psi.shape
    d = 1.0 - 2.0 * a
    for row in range(n_rows):
        prev = 0.0j
        prev_sol = 0.0j
        for i in range(n):
            cur = psi[row, i]
            r = d * cur + a * prev
            if i + 1 < n:
                r += a * psi[row, i + 1]
            r = (r + a * prev_sol) * inv_den[i]
            prev = cur
            prev_sol = r
            psi[row, i] = r
        for i in range(n - 2, -1, -1):
            psi[row, i] -= cp[i] * psi[row, i + 1]


class CayleySweep:
    """One-dimensional Cayley step (1 + i dt H/2)^-1 (1 - i dt H/2) for H = -D d^2/dx^2.

    The second-difference stencil uses hard walls just outside the grid.  The
    constant-coefficient Thomas factorization is computed once and reused.
    """

    def __init__(self, n, dx, dt, kinetic):
        self.n = int(n)
        self.a = 1j * dt * kinetic / (2.0 * dx * dx)
        a = self.a
        b = 1.0 + 2.0 * a
        cp = np.empty(self.n, dtype=complex)
        inv_den = np.empty(self.n, dtype=complex)
        inv_den[0] = 1.0 / b
        cp[0] = -a * inv_den[0]
        for i in range(1, self.n):
            den = b + a * cp[i - 1]
            if den == 0:
                raise ZeroDivisionError("tridiagonal factorization broke down")
            inv_den[i] = 1.0 / den
            cp[i] = -a * inv_den[i]
        cp[-1] = 0.0
        self.cp = cp
        self.inv_den = inv_den

    def apply(self, psi, axis=0):
        """Apply the sweep along ``axis`` of a 1D or 2D complex array, in place."""
        if psi.dtype != np.complex128 or not psi.flags.c_contiguous:
            raise TypeError("psi must be a C-contiguous complex128 array")
        if psi.ndim == 1:
            _sweep_axis1(psi.reshape(1, -1), self.a, self.cp, self.inv_den)
        elif axis == 0:
            _sweep_axis0(psi, self.a, self.cp, self.inv_den)
        else:
            _sweep_axis1(psi, self.a, self.cp, self.inv_den)
        return psi
