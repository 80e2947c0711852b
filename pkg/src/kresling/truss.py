"""Nonlinear truss-model dynamics of Kresling origami chains.

Each cell is reduced to effective axial/rotational springs between rigid
separators carrying mass ``m`` and rotational inertia ``j``.  The chain is
driven by a prescribed harmonic motion of separator 0 (optional) and
integrated with a classical fixed-step 4-stage Runge-Kutta scheme.  The
heavy per-step force evaluation is compiled with numba; the public
functions wrap the same compiled kernels so there is a single
implementation of the force law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .errors import NonPositiveHeight
from .geometry import FoldState, KreslingDesign, crease_geometry, rest_geometry

__all__ = [
    "ChainConfig",
    "Drive",
    "Trajectory",
    "force_torque",
    "potential_energy",
    "equations_of_motion",
    "integrate",
    "total_energy",
]


@dataclass(frozen=True)
class ChainConfig:
    """Layout of a chain of cells plus boundary and damping settings.

    ``cells`` orders the cells from the driven end; chirality alternates
    via the sign of each design's ``theta0``.  ``far_boundary`` fixes or
    frees the last separator.  ``near_boundary`` is ``"driven"`` when
    separator 0 follows the drive signal and ``"free"`` when it is an
    ordinary free separator (used for undriven energy/momentum checks).
    ``c_u``/``c_phi`` are optional per-DOF linear dashpot coefficients.
    """

    cells: tuple[KreslingDesign, ...]
    far_boundary: str = "fixed"
    near_boundary: str = "driven"
    c_u: float = 0.0
    c_phi: float = 0.0

    def __post_init__(self):
        if len(self.cells) < 1:
            raise ValueError("chain needs at least one cell")
        if self.far_boundary not in ("fixed", "free"):
            raise ValueError("far_boundary must be 'fixed' or 'free'")
        if self.near_boundary not in ("driven", "free"):
            raise ValueError("near_boundary must be 'driven' or 'free'")
        if len({c.N for c in self.cells}) != 1:
            raise ValueError("all cells must share the vertex count N")
        if self.c_u < 0 or self.c_phi < 0:
            raise ValueError("damping coefficients must be nonnegative")

    @property
    def n_separators(self) -> int:
        return len(self.cells) + 1

    @property
    def free_separators(self) -> tuple[int, ...]:
        """Indices of separators that carry dynamic degrees of freedom."""
        first = 1 if self.near_boundary == "driven" else 0
        last = self.n_separators - 1 if self.far_boundary == "fixed" else self.n_separators
        return tuple(range(first, last))


@dataclass(frozen=True)
class Drive:
    """Harmonic boundary excitation of separator 0."""

    u_amp: float = 0.0
    phi_amp: float = 0.0
    freq: float = 1.0
    phase: float = 0.0
    kind: str = "harmonic"

    def __post_init__(self):
        if self.kind != "harmonic":
            raise ValueError("only harmonic drives are supported")
        if self.freq <= 0:
            raise ValueError("freq must be positive")
        if self.u_amp < 0 or self.phi_amp < 0:
            raise ValueError("amplitudes must be nonnegative")

    def signal(self, t: np.ndarray) -> np.ndarray:
        """Drive channel [u0, phi0, v0, w0] sampled at times ``t``; shape (4, len(t))."""
        w = 2.0 * math.pi * self.freq
        arg = w * np.asarray(t) + self.phase
        return np.vstack(
            [
                self.u_amp * np.sin(arg),
                self.phi_amp * np.sin(arg),
                self.u_amp * w * np.cos(arg),
                self.phi_amp * w * np.cos(arg),
            ]
        )


@dataclass
class Trajectory:
    """Uniformly sampled chain motion.

    ``u, phi, v, w`` have shape (n_free, n_samples) and follow the
    separator order in ``separators``.  ``drive`` is the prescribed
    channel [u0, phi0, v0, w0] with shape (4, n_samples).  If the
    integration or a closed-loop prediction left the configured state
    bounds, ``diverged_at`` holds the time of the first bad sample and
    the arrays are truncated there.
    """

    sample_rate: float
    t: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    v: np.ndarray
    w: np.ndarray
    drive: np.ndarray
    separators: tuple[int, ...]
    diverged_at: Optional[float] = None

    @property
    def n_free(self) -> int:
        return self.u.shape[0]

    @property
    def n_samples(self) -> int:
        return self.t.shape[0]

    def state_matrix(self) -> np.ndarray:
        """Stacked state snapshots, shape (4*n_free, n_samples).

        Rows are blocked by quantity: all axial displacements first, then
        rotations, then the two velocity blocks, so the leading n_free
        rows of any fitted operator act on the axial displacements.
        """
        return np.vstack([self.u, self.phi, self.v, self.w])

    def state_labels(self) -> list[str]:
        out = []
        for prefix in ("u", "phi", "v", "w"):
            out.extend(f"{prefix}{s}" for s in self.separators)
        return out

    @classmethod
    def from_state_matrix(
        cls,
        states: np.ndarray,
        sample_rate: float,
        drive: np.ndarray,
        separators: Sequence[int],
        t0: float = 0.0,
        diverged_at: Optional[float] = None,
    ) -> "Trajectory":
        nf = states.shape[0] // 4
        ns = states.shape[1]
        t = t0 + np.arange(ns) / sample_rate
        return cls(
            sample_rate=sample_rate,
            t=t,
            u=states[:nf],
            phi=states[nf : 2 * nf],
            v=states[2 * nf : 3 * nf],
            w=states[3 * nf :],
            drive=drive[:, :ns],
            separators=tuple(separators),
            diverged_at=diverged_at,
        )


# ---------------------------------------------------------------------------
# Compiled force law and integrator
# ---------------------------------------------------------------------------


@njit(cache=True)
def _force_torque_cell(du, dphi, h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0):
    """Force/torque of one cell; mirror convention applied via sgn."""
    dp = sgn * dphi
    h = h0 - du
    gap = math.pi / (2.0 * nv)
    half = dp / 2.0 + th_abs / 2.0
    sa = math.sin(half - gap)
    sb = math.sin(half + gap)
    a = math.sqrt(h * h + 4.0 * R * R * sa * sa)
    b = math.sqrt(h * h + 4.0 * R * R * sb * sb)
    c = math.cos(math.pi / nv) - math.cos(dp + th_abs)
    psi = math.atan2(h, R * c)
    den = R * R * c * c + h * h
    f = (
        ka * nv * (du - h0) * (1.0 - a0 / a)
        + kb * nv * (du - h0) * (1.0 - b0 / b)
        + 2.0 * kpsi * nv * R * h0 * (psi0 - psi) * c / den
    )
    trq = (
        ka * nv * R * R * math.sin(dp + th_abs - math.pi / nv) * (1.0 - a0 / a)
        + kb * nv * R * R * math.sin(dp + th_abs + math.pi / nv) * (1.0 - b0 / b)
        + 2.0 * kpsi * nv * R * h0 * (psi0 - psi) * math.sin(dp + th_abs) * h / den
    )
    return f, sgn * trq


@njit(cache=True)
def _rhs(t, y, dy, u_full, phi_full, fcell, tcell,
         h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0,
         mass, inert, first_free, far_fixed, driven,
         amp_u, amp_phi, omega, phase, c_u, c_phi):
    ncell = h0.shape[0]
    nsep = ncell + 1
    nf = y.shape[0] // 4

    for i in range(nf):
        u_full[first_free + i] = y[i]
        phi_full[first_free + i] = y[nf + i]
    if driven:
        arg = omega * t + phase
        u_full[0] = amp_u * math.sin(arg)
        phi_full[0] = amp_phi * math.sin(arg)
    if far_fixed:
        u_full[nsep - 1] = 0.0
        phi_full[nsep - 1] = 0.0

    for c in range(ncell):
        du = u_full[c] - u_full[c + 1]
        dp = phi_full[c] - phi_full[c + 1]
        f, trq = _force_torque_cell(
            du, dp, h0[c], R[c], nv, th_abs[c], sgn[c],
            ka[c], kb[c], kpsi[c], a0[c], b0[c], psi0[c],
        )
        fcell[c] = f
        tcell[c] = trq

    for i in range(nf):
        n = first_free + i
        fl = fcell[n - 1] if n - 1 >= 0 else 0.0
        fr = fcell[n] if n < ncell else 0.0
        tl = tcell[n - 1] if n - 1 >= 0 else 0.0
        tr = tcell[n] if n < ncell else 0.0
        dy[i] = y[2 * nf + i]
        dy[nf + i] = y[3 * nf + i]
        dy[2 * nf + i] = (fl - fr - c_u * y[2 * nf + i]) / mass[n]
        dy[3 * nf + i] = (tl - tr - c_phi * y[3 * nf + i]) / inert[n]


@njit(cache=True)
def _rk4_run(y, dt, steps_per_sample, n_samples, out,
             h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0,
             mass, inert, first_free, far_fixed, driven,
             amp_u, amp_phi, omega, phase, c_u, c_phi, blowup):
    nsep = h0.shape[0] + 1
    ndof = y.shape[0]
    u_full = np.zeros(nsep)
    phi_full = np.zeros(nsep)
    fcell = np.zeros(nsep - 1)
    tcell = np.zeros(nsep - 1)
    k1 = np.empty(ndof)
    k2 = np.empty(ndof)
    k3 = np.empty(ndof)
    k4 = np.empty(ndof)
    ytmp = np.empty(ndof)

    out[0] = y
    t = 0.0
    for s in range(1, n_samples):
        for _ in range(steps_per_sample):
            _rhs(t, y, k1, u_full, phi_full, fcell, tcell,
                 h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0,
                 mass, inert, first_free, far_fixed, driven,
                 amp_u, amp_phi, omega, phase, c_u, c_phi)
            for i in range(ndof):
                ytmp[i] = y[i] + 0.5 * dt * k1[i]
            _rhs(t + 0.5 * dt, ytmp, k2, u_full, phi_full, fcell, tcell,
                 h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0,
                 mass, inert, first_free, far_fixed, driven,
                 amp_u, amp_phi, omega, phase, c_u, c_phi)
            for i in range(ndof):
                ytmp[i] = y[i] + 0.5 * dt * k2[i]
            _rhs(t + 0.5 * dt, ytmp, k3, u_full, phi_full, fcell, tcell,
                 h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0,
                 mass, inert, first_free, far_fixed, driven,
                 amp_u, amp_phi, omega, phase, c_u, c_phi)
            for i in range(ndof):
                ytmp[i] = y[i] + dt * k3[i]
            _rhs(t + dt, ytmp, k4, u_full, phi_full, fcell, tcell,
                 h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0,
                 mass, inert, first_free, far_fixed, driven,
                 amp_u, amp_phi, omega, phase, c_u, c_phi)
            for i in range(ndof):
                y[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            t += dt
        out[s] = y
        for i in range(ndof):
            if not math.isfinite(y[i]) or abs(y[i]) > blowup:
                return s
    return -1


@lru_cache(maxsize=32)
def _chain_params(chain: ChainConfig):
    """Flat parameter arrays consumed by the compiled kernels."""
    cells = chain.cells
    ncell = len(cells)
    h0 = np.array([c.h0 for c in cells])
    R = np.array([c.R for c in cells])
    th_abs = np.array([abs(c.theta0) for c in cells])
    sgn = np.array([1.0 if c.theta0 >= 0 else -1.0 for c in cells])
    ka = np.array([c.ka for c in cells])
    kb = np.array([c.kb for c in cells])
    kpsi = np.array([c.kpsi for c in cells])
    rests = [rest_geometry(c) for c in cells]
    a0 = np.array([g.a for g in rests])
    b0 = np.array([g.b for g in rests])
    psi0 = np.array([g.psi for g in rests])
    # separator i inherits the mass of the cell above it; the far
    # separator reuses the last cell's values
    mass = np.array([cells[min(i, ncell - 1)].m for i in range(ncell + 1)])
    inert = np.array([cells[min(i, ncell - 1)].j for i in range(ncell + 1)])
    nv = float(cells[0].N)
    return h0, R, nv, th_abs, sgn, ka, kb, kpsi, a0, b0, psi0, mass, inert


def force_torque(design: KreslingDesign, fold: FoldState) -> tuple[float, float]:
    """Axial force and torque exerted by one cell at the given fold state.

    Both vanish at the rest state and equal the partial derivatives of
    :func:`potential_energy` with respect to ``du`` and ``dphi``.
    """
    g0 = rest_geometry(design)
    # raises on degenerate/zero-height configurations
    crease_geometry(design, fold)
    f, trq = _force_torque_cell(
        fold.du, fold.dphi, design.h0, design.R, float(design.N),
        abs(design.theta0), 1.0 if design.theta0 >= 0 else -1.0,
        design.ka, design.kb, design.kpsi, g0.a, g0.b, g0.psi,
    )
    return float(f), float(trq)


def potential_energy(design: KreslingDesign, fold: FoldState) -> float:
    """Elastic energy stored in one cell relative to its rest state.

    V = N * (ka/2 (a-a0)^2 + kb/2 (b-b0)^2 + kpsi h0 (psi-psi0)^2).
    """
    g0 = rest_geometry(design)
    g = crease_geometry(design, fold)
    return design.N * (
        0.5 * design.ka * (g.a - g0.a) ** 2
        + 0.5 * design.kb * (g.b - g0.b) ** 2
        + design.kpsi * design.h0 * (g.psi - g0.psi) ** 2
    )


def equations_of_motion(
    chain: ChainConfig, state: np.ndarray, t: float, drive: Drive
) -> np.ndarray:
    """Time derivative of the free-DOF state vector.

    ``state`` stacks [u, phi, v, w] over the free separators.  Separator 0
    follows the drive when the chain's near boundary is driven; a fixed far
    boundary pins the last separator.
    """
    params = _chain_params(chain)
    free = chain.free_separators
    nf = len(free)
    if state.shape[0] != 4 * nf:
        raise ValueError(f"state must have length {4 * nf}")
    dy = np.empty_like(state, dtype=float)
    nsep = chain.n_separators
    u_full = np.zeros(nsep)
    phi_full = np.zeros(nsep)
    fcell = np.zeros(nsep - 1)
    tcell = np.zeros(nsep - 1)
    driven = chain.near_boundary == "driven"
    _rhs(
        t, np.ascontiguousarray(state, dtype=float), dy, u_full, phi_full, fcell, tcell,
        *params[:13],
        free[0], chain.far_boundary == "fixed", driven,
        drive.u_amp if driven else 0.0, drive.phi_amp if driven else 0.0,
        2.0 * math.pi * drive.freq, drive.phase, chain.c_u, chain.c_phi,
    )
    return dy


def integrate(
    chain: ChainConfig,
    drive: Drive,
    t_end: float,
    dt: float = 1e-5,
    sample_rate: float = 240.0,
    init_state: Optional[np.ndarray] = None,
    blowup: float = 1e3,
) -> Trajectory:
    """Integrate the chain under the drive and sample the result.

    The step is snapped to the nearest value that fits a whole number of
    steps between samples, so sample instants are hit exactly and output
    is bit-reproducible.  If any state entry exceeds ``blowup`` (or goes
    non-finite) the trajectory is truncated at the first bad sample and
    ``diverged_at`` records its time; no exception is raised so sweeps
    can record the failure and continue.
    """
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    if dt <= 0 or sample_rate <= 0:
        raise ValueError("dt and sample_rate must be positive")
    params = _chain_params(chain)
    free = chain.free_separators
    nf = len(free)
    if nf == 0:
        raise ValueError("chain has no free separators")
    steps_per_sample = max(1, round(1.0 / (sample_rate * dt)))
    dt_eff = 1.0 / (sample_rate * steps_per_sample)
    n_samples = int(round(t_end * sample_rate)) + 1

    y = np.zeros(4 * nf) if init_state is None else np.array(init_state, dtype=float)
    if y.shape[0] != 4 * nf:
        raise ValueError(f"init_state must have length {4 * nf}")
    out = np.empty((n_samples, 4 * nf))
    driven = chain.near_boundary == "driven"
    div = _rk4_run(
        y, dt_eff, steps_per_sample, n_samples, out,
        *params[:13],
        free[0], chain.far_boundary == "fixed", driven,
        drive.u_amp if driven else 0.0, drive.phi_amp if driven else 0.0,
        2.0 * math.pi * drive.freq, drive.phase, chain.c_u, chain.c_phi, blowup,
    )
    t = np.arange(n_samples) / sample_rate
    diverged_at = None
    if div >= 0:
        diverged_at = float(t[div])
        out = out[: div + 1]
        t = t[: div + 1]
    if driven:
        drive_sig = drive.signal(t)
    else:
        drive_sig = np.zeros((4, len(t)))
    states = out.T
    return Trajectory(
        sample_rate=sample_rate,
        t=t,
        u=states[:nf],
        phi=states[nf : 2 * nf],
        v=states[2 * nf : 3 * nf],
        w=states[3 * nf :],
        drive=drive_sig,
        separators=free,
        diverged_at=diverged_at,
    )


def total_energy(chain: ChainConfig, state: np.ndarray, t: float = 0.0,
                 drive: Optional[Drive] = None) -> float:
    """Kinetic plus elastic energy of the chain at one state snapshot.

    Conserved along undriven, undamped motion; used as an integrator
    audit.  The prescribed separator's kinetic energy is excluded.
    """
    params = _chain_params(chain)
    mass, inert = params[11], params[12]
    free = chain.free_separators
    nf = len(free)
    nsep = chain.n_separators
    u_full = np.zeros(nsep)
    phi_full = np.zeros(nsep)
    u_full[list(free)] = state[:nf]
    phi_full[list(free)] = state[nf : 2 * nf]
    if chain.near_boundary == "driven" and drive is not None:
        sig = drive.signal(np.array([t]))
        u_full[0] = sig[0, 0]
        phi_full[0] = sig[1, 0]
    kinetic = 0.5 * np.sum(mass[list(free)] * state[2 * nf : 3 * nf] ** 2)
    kinetic += 0.5 * np.sum(inert[list(free)] * state[3 * nf :] ** 2)
    elastic = 0.0
    for c, cell in enumerate(chain.cells):
        elastic += potential_energy(
            cell, FoldState(u_full[c] - u_full[c + 1], phi_full[c] - phi_full[c + 1])
        )
    return float(kinetic + elastic)
