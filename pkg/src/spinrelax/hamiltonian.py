"""Spin-1 ground-state level structure in an axial magnetic field.

Energies are ordinary frequencies in GHz, magnetic fields in Tesla, and the
basis is m_s = {+1, 0, -1} throughout. The Hamiltonian is

    H = D * Sz^2 + E * (Sx^2 - Sy^2) + g * (mu_B / h) * B * Sz

with the field applied along the defect symmetry axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import MU_B_GHZ_PER_T, spin_operators
from .errors import DegeneracyError, DomainError
from .search import refine_minimum

# Default exclusion window (Tesla) around the ground- and excited-state level
# anti-crossings, where resonant processes invalidate the smooth rate model.
# Mirrored to negative fields.
DEFAULT_LAC_WINDOW = (0.05, 0.17)

_SX, _SY, _SZ = spin_operators()
# These products are exactly real; .real drops the stored zero imaginary part.
_SZ2 = (_SZ @ _SZ).real
_SX2_MINUS_SY2 = (_SX @ _SX - _SY @ _SY).real
_SZ_REAL = _SZ.real


@dataclass(frozen=True)
class SpinSystemParams:
    """Ground-state spin parameters.

    Attributes
    ----------
    D : float
        Axial zero-field splitting, GHz. Must be positive.
    E : float
        Transverse zero-field splitting, GHz. Nonnegative and below D.
    g : float
        Electron g-factor, dimensionless.
    """

    D: float = 3.5
    E: float = 0.0
    g: float = 2.0

    def __post_init__(self):
        for name in ("D", "E", "g"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.D <= 0:
            raise DomainError(f"D must be positive, got {self.D}")
        if self.E < 0:
            raise DomainError(f"E must be nonnegative, got {self.E}")
        if self.E >= self.D:
            raise DomainError(
                f"E must be below D for a spin-1 ground state, got E={self.E}, D={self.D}")
        if self.g <= 0:
            raise DomainError(f"g must be positive, got {self.g}")

    @property
    def zeeman_coeff(self) -> float:
        """Zeeman coefficient g * mu_B / h, GHz per Tesla."""
        return self.g * MU_B_GHZ_PER_T


@dataclass(frozen=True, eq=False)
class LevelSet:
    """Eigenlevels at one field value, ascending, GHz."""

    energies: np.ndarray
    field: float

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        object.__setattr__(self, "energies", energies)
        if energies.shape != (3,):
            raise DomainError(f"expected 3 levels, got shape {energies.shape}")
        if not np.all(np.diff(energies) >= 0):
            raise DomainError("levels must be sorted ascending")


@dataclass(frozen=True)
class TransitionFrequencies:
    """Frequencies of the two transitions out of the m_s = 0 state, GHz."""

    f_lower: float
    f_upper: float

    def __post_init__(self):
        if self.f_lower < 0 or self.f_upper < 0:
            raise DomainError("transition frequencies must be nonnegative")
        if self.f_lower > self.f_upper:
            raise DomainError("f_lower must not exceed f_upper")


def build_hamiltonian(params: SpinSystemParams, field: float) -> np.ndarray:
    """Ground-state Hamiltonian matrix at the given axial field.

    Returns a real symmetric 3x3 array in GHz, assembled directly from the
    spin-1 operator matrices so the operator form holds exactly.
    """
    if not np.isfinite(field):
        raise DomainError(f"field must be finite, got {field!r}")
    return (params.D * _SZ2
            + params.E * _SX2_MINUS_SY2
            + params.zeeman_coeff * field * _SZ_REAL)


def eigenlevels(params: SpinSystemParams, field: float) -> LevelSet:
    """Eigenvalues of the Hamiltonian at ``field``, ascending."""
    h = build_hamiltonian(params, field)
    return LevelSet(energies=np.linalg.eigvalsh(h), field=float(field))


def transition_frequencies(params: SpinSystemParams, field: float) -> TransitionFrequencies:
    """Frequencies of the two transitions out of the m_s = 0 level.

    The m_s = 0 eigenstate is identified by its overlap with the m_s = 0
    basis vector. Near a level anti-crossing the numerical eigenvectors of the
    degenerate pair can mix; if the best overlap drops below 0.5 the labeling
    is ambiguous and a DegeneracyError is raised naming the field value.
    """
    h = build_hamiltonian(params, field)
    energies, vectors = np.linalg.eigh(h)
    overlaps = np.abs(vectors[1, :]) ** 2  # row 1 is the m_s = 0 basis vector
    k = int(np.argmax(overlaps))
    if overlaps[k] < 0.5:
        raise DegeneracyError(
            f"cannot identify the m_s = 0 level at field {field} T: "
            f"best overlap {overlaps[k]:.3f} < 0.5 (degenerate pair)")
    gaps = np.abs(np.delete(energies, k) - energies[k])
    return TransitionFrequencies(f_lower=float(gaps.min()), f_upper=float(gaps.max()))


def exclusion_windows(bounds=DEFAULT_LAC_WINDOW):
    """Masked field intervals around the level anti-crossings.

    Returns ((-hi, -lo), (lo, hi)) in Tesla. ``bounds`` overrides the default
    window; lo and hi must satisfy 0 < lo < hi.
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (0 < lo < hi):
        raise DomainError(f"exclusion bounds must satisfy 0 < lo < hi, got {bounds!r}")
    return ((-hi, -lo), (lo, hi))


def in_exclusion(field: float, windows=None) -> bool:
    """True when ``field`` lies inside any exclusion window (closed intervals)."""
    if windows is None:
        windows = exclusion_windows()
    return any(lo <= field <= hi for lo, hi in windows)


def lower_transition_minimum(params: SpinSystemParams, h_range=(0.0, 0.3), tol=1e-6) -> float:
    """Field in [h_range] that minimizes the lower transition frequency.

    Located numerically (coarse scan plus golden-section refinement) to the
    given field tolerance in Tesla.
    """
    lo, hi = float(h_range[0]), float(h_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise DomainError(f"invalid field range {h_range!r}")

    def f_lower(field):
        return transition_frequencies(params, field).f_lower

    x, _, _ = refine_minimum(f_lower, lo, hi, n_coarse=301, tol=tol)
    return x
