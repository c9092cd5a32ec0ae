"""Shared brute-force reference implementations for the test suite.

Everything here is deliberately independent of the package under test: dense
matrices, explicit loops, numpy only.  Slow but unambiguous.  Site i maps to
bit i of the basis index (bit value 0 means sigma^z = +1).
"""

import numpy as np


def dense_chain_hamiltonian(n, omega, chi=1.0, gamma=0.0, fields=None):
    """Dense H = -chi sum sz sz(nn) - gamma sum sz sz(nnn) - sum h_i sz_i
    - omega sum sx, periodic boundaries."""
    dim = 1 << n
    idx = np.arange(dim)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    z = 1 - 2 * bits
    diag = -chi * np.einsum("bi,bi->b", z, np.roll(z, -1, axis=1)).astype(float)
    if gamma != 0.0:
        diag += -gamma * np.einsum("bi,bi->b", z, np.roll(z, -2, axis=1))
    if fields is not None:
        diag += -(z * np.asarray(fields)[None, :]).sum(axis=1)
    h = np.diag(diag)
    for i in range(n):
        h[idx, idx ^ (1 << i)] += -omega
    return h


def dense_ground_state(h):
    """Lowest eigenvector of a dense symmetric matrix, first-entry phase fixed."""
    w, v = np.linalg.eigh(h)
    gs = v[:, 0]
    pivot = np.argmax(np.abs(gs))
    if gs[pivot] < 0:
        gs = -gs
    return w[0], gs


def rotate_collective_x(psi, n, phi):
    """exp(-i phi/2 sum sx) applied site by site (exact 2x2 rotations)."""
    a = psi.astype(complex).copy()
    c, s = np.cos(phi / 2.0), np.sin(phi / 2.0)
    for i in range(n):
        a = a.reshape(-1, 2, 1 << i)
        out = np.empty_like(a)
        out[:, 0, :] = c * a[:, 0, :] - 1j * s * a[:, 1, :]
        out[:, 1, :] = -1j * s * a[:, 0, :] + c * a[:, 1, :]
        a = out
    return a.reshape(-1)


def fotoc_reference(psi, n, phis):
    """|<psi| e^{-i phi Sx} |psi>|^2 by explicit rotation."""
    psi = psi.astype(complex)
    return np.array(
        [abs(np.vdot(psi, rotate_collective_x(psi, n, phi))) ** 2 for phi in phis]
    )


def mqc_reference(psi, n, m_max=None):
    """Intensities I_m by discrete Fourier transform of the reference FOTOC."""
    if m_max is None:
        m_max = n
    k = max(2 * n + 2, 2 * m_max + 1)
    phis = 2.0 * np.pi * np.arange(k) / k
    f = fotoc_reference(psi, n, phis)
    coeff = np.fft.ifft(f)
    orders = np.arange(-m_max, m_max + 1)
    return orders, coeff[np.mod(orders, k)].real
