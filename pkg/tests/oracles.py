"""Independent reference computations.

Nothing here imports the solver internals beyond grid construction, so the
values act as oracles.  Run ``python3 tests/oracles.py`` to print the numbers
frozen into the test-suite.
"""

from __future__ import annotations

import math

import numpy as np


def lattice_sum_nonzero(L: float, R: int = 400, p: float = 3.0) -> float:
    """``sum_{0 < |m|_inf <= R} (1 + L|m|)^-p`` accumulated shell by shell."""
    total = 0.0
    for s in range(1, R + 1):
        # shell |m|_inf = s: 8 s lattice points
        a = np.arange(-s, s + 1, dtype=float)
        pts = np.concatenate([
            np.stack([a, np.full_like(a, s)], 1),
            np.stack([a, np.full_like(a, -s)], 1),
            np.stack([np.full_like(a[1:-1], s), a[1:-1]], 1),
            np.stack([np.full_like(a[1:-1], -s), a[1:-1]], 1),
        ])
        total += float(np.sum((1 + L * np.hypot(pts[:, 0], pts[:, 1])) ** -p))
    return total


def leray_kernel(z) -> np.ndarray:
    z1, z2 = z
    r2 = z1 * z1 + z2 * z2
    return np.array([[z1 * z1 - z2 * z2, 2 * z1 * z2], [2 * z1 * z2, z2 * z2 - z1 * z1]]) / (2 * math.pi * r2 * r2)


def periodic_kernel_response(z, d: float, mass: float, images: int = 40) -> np.ndarray:
    """Far field of ``P(m delta e1)`` on the torus.

    The image sum is only conditionally convergent.  Square partial sums are
    4-fold symmetric, so the trace-free kernel contributes nothing at k = 0,
    while the dropped k = 0 symbol ``I - kk/|k|^2`` averages to ``I/2``.
    """
    acc = np.zeros(2)
    for i in range(-images, images + 1):
        for j in range(-images, images + 1):
            acc += leray_kernel((z[0] + i * d, z[1] + j * d)) @ np.array([mass, 0.0])
    return acc - np.array([mass / (2 * d**2), 0.0])


def _band(n: int) -> np.ndarray:
    idx = np.fft.fftfreq(n, 1.0 / n).astype(int)
    keep = 3 * np.abs(idx) < n
    return keep[:, None] & keep[None, :]


def vorticity_operator(U: np.ndarray, d: float, nu: float, mu: float) -> np.ndarray:
    """Dense linearized vorticity operator on the 2/3-rule band.

    ``w' = nu lap w - mu w - (U.grad) w - (u.grad) W`` with ``W = rot U`` and
    ``u`` the zero-mean velocity of ``w``.  Products of band-limited fields
    are exact on the retained band, so its spectrum equals that of the
    velocity-form Oseen operator restricted to solenoidal band fields.
    """
    n = U.shape[-1]
    k = 2 * math.pi / d * np.fft.fftfreq(n, 1.0 / n)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    ksq = k1**2 + k2**2
    band = _band(n)
    band[0, 0] = False
    modes = np.argwhere(band)
    Uh = np.fft.fft2(U) * _band(n)
    Ur = np.real(np.fft.ifft2(Uh))
    Wh = 1j * k2 * Uh[0] - 1j * k1 * Uh[1]
    W1 = np.real(np.fft.ifft2(1j * k1 * Wh))
    W2 = np.real(np.fft.ifft2(1j * k2 * Wh))
    M = np.zeros((len(modes), len(modes)), dtype=complex)
    for col, (a, b) in enumerate(modes):
        wh = np.zeros((n, n), dtype=complex)
        wh[a, b] = 1.0
        sh = -wh / ksq[a, b]
        u1 = np.fft.ifft2(1j * k2 * sh)
        u2 = np.fft.ifft2(-1j * k1 * sh)
        g1 = np.fft.ifft2(1j * k1 * wh)
        g2 = np.fft.ifft2(1j * k2 * wh)
        adv = Ur[0] * g1 + Ur[1] * g2 + u1 * W1 + u2 * W2
        out = (-nu * ksq - mu) * wh - np.fft.fft2(adv)
        M[:, col] = out[modes[:, 0], modes[:, 1]]
    return M


def vortex_field(n: int, d: float, a: float, r0: float = 1.0, width: float = 0.18) -> np.ndarray:
    """Counter-rotating ring velocity at the box centre, built independently."""
    x = np.arange(n) * d / n
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    # periodic offset from the origin; the phase factor below moves it to d/2
    z1 = (X1 + d / 2) % d - d / 2
    z2 = (X2 + d / 2) % d - d / 2
    r2 = z1**2 + z2**2
    t = np.clip(1 - r2 / r0**2, 0, None)
    psi = a * r2 * t**3
    k = 2 * math.pi / d * np.fft.fftfreq(n, 1.0 / n)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    g = np.exp(-0.5 * (k1**2 + k2**2) * (width * r0) ** 2) * _band(n)
    ph = np.exp(-1j * (k1 + k2) * d / 2)
    sh = np.fft.fft2(psi) * g * ph
    return np.real(np.fft.ifft2(np.stack([1j * k2 * sh, -1j * k1 * sh])))


def leading(values: np.ndarray, count: int) -> np.ndarray:
    return values[np.argsort(-values.real, kind="stable")][:count]


if __name__ == "__main__":
    np.set_printoptions(precision=15)
    for L in (8, 16, 32):
        print("lattice sum", L, repr(lattice_sum_nonzero(L)))
    print("kernel", periodic_kernel_response((math.pi / 2, 0.0), 2 * math.pi, 1.0))
    for a in (0.0, 5.0, 150.0):
        U = vortex_field(64, 8.0, a)
        ev = np.linalg.eigvals(vorticity_operator(U, 8.0, 1.0, 0.0))
        print("eig", a, repr(leading(ev, 4)))
