"""Physical constants and spin-1 operator matrices."""

import numpy as np

# Bohr magneton over the Planck constant, GHz per Tesla. The Zeeman coefficient
# of a spin system is g * MU_B_GHZ_PER_T.
MU_B_GHZ_PER_T = 13.9962


def spin_operators():
    """Return the spin-1 operators (Sx, Sy, Sz) in the m_s = {+1, 0, -1} basis.

    Complex 3x3 arrays normalized so that [Sx, Sy] = i Sz.
    """
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    sx = inv_sqrt2 * np.array(
        [[0, 1, 0],
         [1, 0, 1],
         [0, 1, 0]], dtype=complex)
    sy = inv_sqrt2 * np.array(
        [[0, -1j, 0],
         [1j, 0, -1j],
         [0, 1j, 0]], dtype=complex)
    sz = np.array(
        [[1, 0, 0],
         [0, 0, 0],
         [0, 0, -1]], dtype=complex)
    return sx, sy, sz
