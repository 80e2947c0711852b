"""Closed-form Kresling cell kinematics.

A Kresling cell is a truss of crease springs between two rigid polygonal
separators.  The instantaneous geometry of one cell is fully determined by
the relative axial displacement ``du`` and relative rotation ``dphi`` of
its separators.  This module maps fold states to the geometric variables
(height, crease lengths, fold angle, crease inclinations) that
parameterize both the spring forces and the control features used by the
data-driven models.

Chirality convention: a design with negative ``theta0`` is the mirror
image of the corresponding positive-chirality cell.  Its geometry is
evaluated as ``g(|theta0|, du, -dphi)``, which keeps the crease families
(the ``ka``- and ``kb``-sprung diagonals) attached to the same physical
creases under mirroring.  This is what makes ``a(theta0, dphi) ==
a(-theta0, -dphi)`` hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, NonPositiveHeight

__all__ = [
    "KreslingDesign",
    "FoldState",
    "GeometryVector",
    "FEATURE_NAMES",
    "crease_geometry",
    "rest_geometry",
    "control_features",
    "feature_matrix",
]

#: Fixed ordering of the per-cell control features.  Downstream code reads
#: fitted coefficient matrices positionally, so this order is part of the
#: public contract.
FEATURE_NAMES = (
    "h",
    "a",
    "b",
    "psi",
    "alpha",
    "beta",
    "sin_alpha",
    "cos_alpha",
    "sin_beta",
    "cos_beta",
    "sin_psi",
    "cos_psi",
)


@dataclass(frozen=True)
class KreslingDesign:
    """Static design and mechanical parameters of one origami cell.

    Parameters
    ----------
    h0 : initial height [m]
    theta0 : initial rotation angle [rad], signed; the sign encodes chirality
    R : cross-section radius [m]
    N : number of vertices of the polygonal cross-section
    m : separator mass [kg]
    j : separator rotational inertia [kg m^2]
    ka, kb : axial spring constants of the two crease families [N/m]
    kpsi : torsional spring constant of the bottom crease [N m / rad]
    """

    h0: float
    theta0: float
    R: float
    N: int
    m: float
    j: float
    ka: float
    kb: float
    kpsi: float

    def __post_init__(self):
        if self.h0 <= 0 or self.R <= 0:
            raise ValueError("h0 and R must be positive")
        if self.N < 3:
            raise ValueError("N must be at least 3")
        if abs(self.theta0) >= math.pi:
            raise ValueError("|theta0| must be below pi")
        if min(self.m, self.j, self.ka, self.kb, self.kpsi) <= 0:
            raise ValueError("m, j, ka, kb, kpsi must be positive")

    def mirrored(self) -> "KreslingDesign":
        """The same cell with opposite chirality."""
        return KreslingDesign(
            h0=self.h0, theta0=-self.theta0, R=self.R, N=self.N,
            m=self.m, j=self.j, ka=self.ka, kb=self.kb, kpsi=self.kpsi,
        )


@dataclass(frozen=True)
class FoldState:
    """Relative displacement across one cell: ``du`` axial [m], ``dphi`` rotational [rad]."""

    du: float
    dphi: float


@dataclass(frozen=True)
class GeometryVector:
    """Instantaneous geometric variables of one cell.

    ``h`` height, ``a``/``b`` crease lengths [m]; ``psi`` fold angle,
    ``alpha``/``beta`` crease inclinations from the vertical [rad].
    """

    h: float
    a: float
    b: float
    psi: float
    alpha: float
    beta: float


def _geometry_arrays(design: KreslingDesign, du, dphi):
    """Vectorized core kinematics; accepts scalars or arrays.

    Returns (h, a, b, psi) without validity checks.  Negative chirality
    is handled by mirroring dphi.
    """
    th0 = design.theta0
    if th0 < 0:
        th0 = -th0
        dphi = -np.asarray(dphi)
    half = np.asarray(dphi) / 2.0 + th0 / 2.0
    gap = math.pi / (2.0 * design.N)
    h = design.h0 - np.asarray(du)
    four_r2 = 4.0 * design.R**2
    a = np.sqrt(h**2 + four_r2 * np.sin(half - gap) ** 2)
    b = np.sqrt(h**2 + four_r2 * np.sin(half + gap) ** 2)
    psi = np.arctan2(h, design.R * (math.cos(math.pi / design.N) - np.cos(np.asarray(dphi) + th0)))
    return h, a, b, psi


def crease_geometry(design: KreslingDesign, fold: FoldState) -> GeometryVector:
    """Geometric variables of one cell at the given fold state.

    The fold angle uses a two-argument arctangent so it stays continuous
    through the sign change of its denominator and lies in (0, pi) while
    the height is positive.  The crease inclinations are
    ``alpha = arccos(h/a)`` and ``beta = arccos(h/b)``, consistent with
    crease length^2 = height^2 + horizontal chord^2.

    Raises
    ------
    NonPositiveHeight
        if ``du >= h0``.
    DegenerateGeometry
        if a crease length collapses to zero.
    """
    h, a, b, psi = _geometry_arrays(design, fold.du, fold.dphi)
    h = float(h)
    a = float(a)
    b = float(b)
    if h <= 0.0:
        raise NonPositiveHeight(f"height {h:.6g} m is not positive (du={fold.du!r})")
    if a == 0.0 or b == 0.0:
        raise DegenerateGeometry("crease length collapsed to zero")
    alpha = math.acos(min(1.0, max(-1.0, h / a)))
    beta = math.acos(min(1.0, max(-1.0, h / b)))
    return GeometryVector(h=h, a=a, b=b, psi=float(psi), alpha=alpha, beta=beta)


def rest_geometry(design: KreslingDesign) -> GeometryVector:
    """Geometry at the undeformed state (du = dphi = 0)."""
    return crease_geometry(design, FoldState(0.0, 0.0))


def control_features(g: GeometryVector) -> np.ndarray:
    """The 12-entry feature vector of one cell, ordered per FEATURE_NAMES."""
    return np.array(
        [
            g.h,
            g.a,
            g.b,
            g.psi,
            g.alpha,
            g.beta,
            math.sin(g.alpha),
            math.cos(g.alpha),
            math.sin(g.beta),
            math.cos(g.beta),
            math.sin(g.psi),
            math.cos(g.psi),
        ]
    )


def feature_matrix(design: KreslingDesign, du: np.ndarray, dphi: np.ndarray) -> np.ndarray:
    """Control features for arrays of fold states of one cell.

    Parameters
    ----------
    du, dphi : arrays of shape (T,)

    Returns
    -------
    ndarray of shape (12, T), rows ordered per FEATURE_NAMES.
    """
    h, a, b, psi = _geometry_arrays(design, du, dphi)
    if np.any(h <= 0.0):
        raise NonPositiveHeight("height is not positive somewhere along the series")
    if np.any(a == 0.0) or np.any(b == 0.0):
        raise DegenerateGeometry("crease length collapsed to zero along the series")
    alpha = np.arccos(np.clip(h / a, -1.0, 1.0))
    beta = np.arccos(np.clip(h / b, -1.0, 1.0))
    return np.vstack(
        [
            h,
            a,
            b,
            psi,
            alpha,
            beta,
            np.sin(alpha),
            np.cos(alpha),
            np.sin(beta),
            np.cos(beta),
            np.sin(psi),
            np.cos(psi),
        ]
    )
