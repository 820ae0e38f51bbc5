"""Maps between the Cauchy transform of L's spectrum and that of the GSVs."""
from __future__ import annotations

from .model import Regime


def cauchy_omega(G_L, z, M1: int, S: int, regime: Regime):
    """G_omega from G_L for an un-swapped problem.

    With ``M2 >= N`` the spectrum of L carries ``M1 - S`` zeros which are
    removed; in the augmented regime the ``M1 - S`` extra eigenvalues sit at
    infinity and only the rescaling remains.
    """
    if S < 1:
        raise ValueError("S must be >= 1")
    if regime is Regime.FULL_COLUMN_RANK:
        if S == M1:
            return G_L
        return (M1 / S) * G_L - (M1 - S) / (S * z)
    if regime is Regime.AUGMENTED:
        return (M1 / S) * G_L
    raise ValueError(f"no G_L -> G_omega map for regime {regime}")


def reciprocal_cauchy(G_swapped, z):
    """Cauchy transform of 1/X at z, given ``G_swapped(u)`` of X.

    Used for M1 > M2: the GSVs of (H1, H2) are the reciprocals of those of
    (H2, H1). ``E[1/(z - 1/X)] = (1 - G_X(1/z)/z) / z``.
    """
    u = 1.0 / z
    return (1.0 - G_swapped(u) * u) * u
