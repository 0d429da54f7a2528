"""Pure-Python RK4 loops, used when the compiled extension is unavailable.

Both loops read coefficients sampled on the half-step grid ``k * dt / 2``,
``k = 0 .. 2 * nsteps``: stage 1 uses index ``2i``, stages 2 and 3 use
``2i + 1`` and stage 4 uses ``2i + 2``.
"""
import cmath

import numpy as np


def riccati_rk4(mu0, mu_plus, mu_minus, dt, guard):
    """Integrate X+' = mu+ - mu- X+^2 + mu0 X+, X0' = mu0 - 2 mu- X+, X-' = mu- exp(X0).

    Returns the ``(nsteps + 1, 3)`` array of (X+, X0, X-) and the index of the
    first sample where |X+| exceeded ``guard`` or a value became non-finite
    (``-1`` if none). Samples after a failure are left at zero.
    """
    mu0 = np.asarray(mu0, dtype=complex).tolist()
    mup = np.asarray(mu_plus, dtype=complex).tolist()
    mum = np.asarray(mu_minus, dtype=complex).tolist()
    nsteps = (len(mu0) - 1) // 2
    out = np.zeros((nsteps + 1, 3), dtype=complex)
    h = 0.5 * dt
    p = z = m = 0j
    rows = []
    failed = -1
    for i in range(nsteps):
        a, b, c = 2 * i, 2 * i + 1, 2 * i + 2

        k1p = mup[a] - mum[a] * p * p + mu0[a] * p
        k1z = mu0[a] - 2.0 * mum[a] * p
        k1m = mum[a] * cmath.exp(z)

        tp, tz = p + h * k1p, z + h * k1z
        k2p = mup[b] - mum[b] * tp * tp + mu0[b] * tp
        k2z = mu0[b] - 2.0 * mum[b] * tp
        k2m = mum[b] * cmath.exp(tz)

        tp, tz = p + h * k2p, z + h * k2z
        k3p = mup[b] - mum[b] * tp * tp + mu0[b] * tp
        k3z = mu0[b] - 2.0 * mum[b] * tp
        k3m = mum[b] * cmath.exp(tz)

        tp, tz = p + dt * k3p, z + dt * k3z
        k4p = mup[c] - mum[c] * tp * tp + mu0[c] * tp
        k4z = mu0[c] - 2.0 * mum[c] * tp
        k4m = mum[c] * cmath.exp(tz)

        p = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        z = z + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        m = m + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        rows.append((p, z, m))
        if not (abs(p) <= guard and cmath.isfinite(z) and cmath.isfinite(m)):
            failed = i + 1
            break
    if rows:
        out[1:len(rows) + 1] = rows
    return out, failed


def direct_rk4(eps0, eps_plus, eps_minus, nu0, nu_plus, nu_minus, gamma_dot, rho0, dt):
    """Integrate the master equation on the vector (rho11, rho10, rho01, rho00)."""
    e0h = (0.5 * np.asarray(eps0, dtype=complex)).tolist()
    ep = np.asarray(eps_plus, dtype=complex).tolist()
    em = np.asarray(eps_minus, dtype=complex).tolist()
    n0h = (0.5 * np.asarray(nu0, dtype=float)).tolist()
    npl = np.asarray(nu_plus, dtype=float).tolist()
    nmi = np.asarray(nu_minus, dtype=float).tolist()
    gd = np.asarray(gamma_dot, dtype=float).tolist()
    nsteps = (len(e0h) - 1) // 2

    def rhs(j, a, b, c, d):
        return (
            (n0h[j] - gd[j]) * a + npl[j] * d,
            (e0h[j] - gd[j]) * b + ep[j] * c,
            (-e0h[j] - gd[j]) * c + em[j] * b,
            (-n0h[j] - gd[j]) * d + nmi[j] * a,
        )

    y = tuple(complex(v) for v in rho0)
    rows = [y]
    h = 0.5 * dt
    for i in range(nsteps):
        k1 = rhs(2 * i, *y)
        k2 = rhs(2 * i + 1, *(yv + h * kv for yv, kv in zip(y, k1)))
        k3 = rhs(2 * i + 1, *(yv + h * kv for yv, kv in zip(y, k2)))
        k4 = rhs(2 * i + 2, *(yv + dt * kv for yv, kv in zip(y, k3)))
        y = tuple(
            yv + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
            for yv, a, b, c, d in zip(y, k1, k2, k3, k4)
        )
        rows.append(y)
    return np.array(rows, dtype=complex)

