"""Pure numpy implementations of the quadrature hot loops.

Every function here has a twin in ``_kernels.pyx`` with the same signature
and the same results up to rounding.  ``bergfock.kernels`` picks one at
import time.
"""

import numpy as np


def polyval(coeffs, z):
    """Evaluate sum_m coeffs[m] z**m at every point of the 1-d array ``z``."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def lp_sum(values, weights, p):
    """sum_i weights[i] |values[i]|**p."""
    a = np.abs(np.asarray(values, dtype=np.complex128))
    return float(np.sum(np.asarray(weights, dtype=np.float64) * a**p))


def dual_moments(values, z, weights, p, nbasis):
    """s_m = sum_i w_i z_i**m |v_i|**(p-1) conj(sgn v_i), m < nbasis.

    sgn 0 is taken as 0.
    """
    v = np.asarray(values, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    a = np.abs(v)
    nz = a > 0
    dens = np.zeros_like(v)
    dens[nz] = np.asarray(weights)[nz] * a[nz] ** (p - 2.0) * np.conj(v[nz])
    out = np.empty(nbasis, dtype=np.complex128)
    zp = np.ones_like(z)
    for m in range(nbasis):
        out[m] = np.sum(dens * zp)
        zp = zp * z
    return out


def lp_hessian(values, z, weights, p, nbasis, floor):
    """Hessian of sum_i w_i |G_i|**p in the real coordinates (Re c, Im c).

    ``G = sum_m c_m z**m``; moduli below ``floor`` are clamped so p < 2 stays
    finite.  Returns a (2*nbasis, 2*nbasis) symmetric array.
    """
    v = np.asarray(values, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    a = np.maximum(np.abs(v), floor)
    g = v / a
    base = np.asarray(weights) * p * a ** (p - 2.0)
    P = np.empty((z.size, 2 * nbasis), dtype=np.complex128)
    P[:, :nbasis] = z[:, None] ** np.arange(nbasis)
    P[:, nbasis:] = 1j * P[:, :nbasis]
    H = np.real(P.conj().T @ (base[:, None] * P))
    U = np.real(np.conj(g)[:, None] * P)
    H += U.T @ ((base * (p - 2.0))[:, None] * U)
    return 0.5 * (H + H.T)
