"""Full three-level model: nonlinear steady state and 10-dim fluctuations.

The collective variables are the cavity field A2, the optical dipoles P1
(pump leg) and P2 (probe leg), the ground-state coherence Pr, and the
population differences Sz1 = (Pi1 - Pi3)/2, Sz2 = (Pi2 - Pi3)/2.  Total
atom number fluctuations are neglected, so the three populations are
reconstructed from (Sz1, Sz2) inside the linearized dynamics.

The deterministic part of every equation of motion is stored as a term
list (linear, bilinear field-atom, constant), from which the mean-field
residual, the Jacobian, and the exact linear solve of the atomic means at
fixed cavity amplitude are all derived.  Because the mean equations are
linear in the atomic operators once the field is fixed, steady states are
found without any damped iteration: the scalar cavity equation is the
only nonlinearity and is handled by one-dimensional bracketing in the
field amplitude, which also enumerates every branch of the bistable
response.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import einstein, noise
from .params import VACUUM, ParameterError, SqueezedVacuum, ThreeLevelParams

LABELS10 = ("A2", "A2+", "P1", "P1+", "P2", "P2+", "Pr", "Pr+", "Sz1", "Sz2")
ADJOINT10 = (1, 0, 3, 2, 5, 4, 7, 6, 8, 9)

_VARS11 = ("A2", "A2+", "P1", "P1+", "P2", "P2+", "Pr", "Pr+", "Pi1", "Pi2", "Pi3")
_ADJ11 = (1, 0, 3, 2, 5, 4, 7, 6, 8, 9, 10)
_ATOMIC11 = tuple(range(2, 11))


class NoConvergenceError(RuntimeError):
    """Steady-state search failed; carries the best residual found."""


class UnphysicalBranchError(RuntimeError):
    """Steady state has populations negative beyond tolerance."""


@dataclass(frozen=True)
class SteadyState3L:
    """Collective mean values on one branch of the driven response."""

    A2: complex
    P1: complex
    P2: complex
    Pr: complex
    Pi1: float
    Pi2: float
    Pi3: float
    A_in: complex
    residual: float
    branch: str = ""

    def populations(self) -> np.ndarray:
        return np.array([self.Pi1, self.Pi2, self.Pi3])

    def mean_spin(self) -> np.ndarray:
        """Ground-state mean spin (Sx, Sy, Sz) from the 1-2 coherence."""
        return np.array([self.Pr.real, self.Pr.imag, 0.5 * (self.Pi2 - self.Pi1)])

    def state11(self) -> np.ndarray:
        return np.array(
            [
                self.A2,
                np.conj(self.A2),
                self.P1,
                np.conj(self.P1),
                self.P2,
                np.conj(self.P2),
                self.Pr,
                np.conj(self.Pr),
                self.Pi1,
                self.Pi2,
                self.Pi3,
            ],
            dtype=complex,
        )


def _terms(p: ThreeLevelParams):
    """Linear/bilinear/constant terms of the deterministic equations.

    Returns (lin, bil, const) where lin holds (row, col, coeff), bil holds
    (row, col_a, col_b, coeff) for coeff * xi_a * xi_b, and const is an
    11-vector (the drive enters separately).  Adjoint rows are generated
    from the primaries.
    """
    g, W = p.g, complex(p.Omega1)
    gam, gam0 = p.gamma, p.gamma0
    lin = [
        (0, 0, -(p.kappa + 1j * p.Delta_c)),
        (0, 4, 1j * g / p.tau),
        (2, 2, -(1j * p.Delta1 + gam)),
        (2, 8, 1j * W),
        (2, 10, -1j * W),
        (4, 4, -(1j * p.Delta2 + gam)),
        (4, 6, 1j * W),
        (6, 6, -(gam0 - 1j * p.delta)),
        (6, 4, 1j * np.conj(W)),
        (8, 2, 1j * np.conj(W)),
        (8, 3, -1j * W),
        (8, 10, gam),
        (8, 8, -gam0),
        (9, 9, -gam0),
        (9, 10, gam),
        (10, 2, -1j * np.conj(W)),
        (10, 3, 1j * W),
        (10, 10, -(2.0 * gam + gam0)),
    ]
    bil = [
        (2, 0, 7, 1j * g),
        (4, 0, 9, 1j * g),
        (4, 0, 10, -1j * g),
        (6, 0, 3, -1j * g),
        (9, 1, 4, 1j * g),
        (9, 0, 5, -1j * g),
        (10, 1, 4, -1j * g),
        (10, 0, 5, 1j * g),
    ]
    const = np.zeros(11, dtype=complex)
    const[8] = p.Lambda1
    const[9] = p.Lambda2
    # adjoint rows of A2, P1, P2, Pr
    for row in (0, 2, 4, 6):
        arow = _ADJ11[row]
        lin.extend(
            (arow, _ADJ11[col], np.conj(c)) for r, col, c in list(lin) if r == row
        )
        bil.extend(
            (arow, _ADJ11[a], _ADJ11[b], np.conj(c))
            for r, a, b, c in list(bil)
            if r == row
        )
    return lin, bil, const


def mean_rhs(p: ThreeLevelParams, state11: np.ndarray, A_in: complex = 0.0) -> np.ndarray:
    """Deterministic right-hand sides at the given mean values."""
    lin, bil, const = _terms(p)
    f = const.astype(complex).copy()
    pump = math.sqrt(2.0 * p.kappa / p.tau)
    f[0] += pump * A_in
    f[1] += pump * np.conj(A_in)
    for row, col, c in lin:
        f[row] += c * state11[col]
    for row, a, b, c in bil:
        f[row] += c * state11[a] * state11[b]
    return f


def _residual(p: ThreeLevelParams, state11: np.ndarray, A_in: complex) -> float:
    lin, bil, const = _terms(p)
    f = mean_rhs(p, state11, A_in)
    scale = np.abs(const).astype(float)
    pump = math.sqrt(2.0 * p.kappa / p.tau)
    scale[0] += abs(pump * A_in)
    scale[1] += abs(pump * A_in)
    for row, col, c in lin:
        scale[row] += abs(c * state11[col])
    for row, a, b, c in bil:
        scale[row] += abs(c * state11[a] * state11[b])
    scale = np.maximum(scale, 1e-30)
    return float(np.max(np.abs(f) / scale))


def jacobian11(p: ThreeLevelParams, state11: np.ndarray) -> np.ndarray:
    """Jacobian of the deterministic right-hand sides at the given means."""
    lin, bil, _ = _terms(p)
    J = np.zeros((11, 11), dtype=complex)
    for row, col, c in lin:
        J[row, col] += c
    for row, a, b, c in bil:
        J[row, a] += c * state11[b]
        J[row, b] += c * state11[a]
    return J


def atomic_means_for_field(p: ThreeLevelParams, alpha: complex) -> np.ndarray:
    """Exact atomic means at fixed cavity amplitude (the equations are linear).

    Returns the 9-vector (P1, P1+, P2, P2+, Pr, Pr+, Pi1, Pi2, Pi3).
    """
    lin, bil, const = _terms(p)
    field_val = {0: complex(alpha), 1: complex(np.conj(alpha))}
    M = np.zeros((9, 9), dtype=complex)
    b = np.zeros(9, dtype=complex)
    for row, col, c in lin:
        if row < 2:
            continue
        r = row - 2
        if col in field_val:
            b[r] -= c * field_val[col]
        else:
            M[r, col - 2] += c
    for row, a, bb, c in bil:
        if row < 2:
            continue
        r = row - 2
        if a in field_val:
            M[r, bb - 2] += c * field_val[a]
        elif bb in field_val:
            M[r, a - 2] += c * field_val[bb]
        else:  # pragma: no cover - no atom-atom bilinears in this model
            raise AssertionError("unexpected atom-atom bilinear")
    b -= const[2:]
    x = np.linalg.solve(M, b)
    # conjugate pairing and real populations hold exactly up to roundoff
    pops = x[6:]
    if np.max(np.abs(pops.imag)) > 1e-9 * max(p.N, 1.0):
        raise NoConvergenceError("population means acquired imaginary parts")
    return x


def g_tilde(p: ThreeLevelParams) -> complex:
    """Raman coupling g Omega1 / Delta of the reduced description."""
    if p.Delta == 0:
        raise ParameterError("mean one-photon detuning vanishes")
    return p.g * complex(p.Omega1) / p.Delta


def intensity(p: ThreeLevelParams, A2: complex) -> float:
    """Dimensionless probe intensity I2 = |g_tilde A2 / gamma0|^2."""
    return abs(g_tilde(p) * A2 / p.gamma0) ** 2


def steady_state_for_field(
    p: ThreeLevelParams, alpha: complex, branch: str = ""
) -> SteadyState3L:
    """Steady state on the branch passing through cavity amplitude alpha."""
    x = atomic_means_for_field(p, alpha)
    P2 = x[2]
    A_in = ((p.kappa + 1j * p.Delta_c) * alpha - 1j * p.g * P2 / p.tau) / math.sqrt(
        2.0 * p.kappa / p.tau
    )
    pops = x[6:].real
    if pops.min() < -1e-9 * p.N:
        raise UnphysicalBranchError(f"negative population {pops.min():g}")
    state = np.concatenate(
        ([alpha, np.conj(alpha)], x[:6], pops.astype(complex))
    )
    res = _residual(p, state, A_in)
    if res > 1e-12:
        raise NoConvergenceError(f"steady-state residual {res:.3g} above 1e-12")
    return SteadyState3L(
        A2=complex(alpha),
        P1=complex(x[0]),
        P2=complex(P2),
        Pr=complex(x[4]),
        Pi1=float(pops[0]),
        Pi2=float(pops[1]),
        Pi3=float(pops[2]),
        A_in=complex(A_in),
        residual=res,
        branch=branch,
    )


def steady_state_at_intensity(p: ThreeLevelParams, I2: float) -> SteadyState3L:
    """Steady state at the operating intensity I2, in the real-coupling gauge."""
    gt = g_tilde(p)
    if gt == 0:
        if I2 > 0:
            raise ParameterError("finite I2 needs a nonzero Raman coupling")
        return steady_state_for_field(p, 0.0)
    alpha = p.gamma0 * math.sqrt(I2) / gt
    return steady_state_for_field(p, alpha)


def _rotated(ss: SteadyState3L, phase: float) -> SteadyState3L:
    """Gauge rotation: drive, cavity field, P2 and Pr share one phase."""
    ph = cmath.exp(1j * phase)
    return SteadyState3L(
        A2=ss.A2 * ph,
        P1=ss.P1,
        P2=ss.P2 * ph,
        Pr=ss.Pr * ph,
        Pi1=ss.Pi1,
        Pi2=ss.Pi2,
        Pi3=ss.Pi3,
        A_in=ss.A_in * ph,
        residual=ss.residual,
        branch=ss.branch,
    )


def steady_state(
    p: ThreeLevelParams, A_in: complex, n_scan: int = 2000
) -> list[SteadyState3L]:
    """All physical steady states for the given drive amplitude.

    Scans the single-valued map from intracavity amplitude to required
    drive intensity and brackets every crossing with the target, so all
    branches of a bistable response are returned (sorted by intensity and
    tagged lower/middle/upper when there are three).
    """
    target = abs(A_in) ** 2
    if target == 0.0:
        return [steady_state_for_field(p, 0.0, branch="single")]
    gt = g_tilde(p)
    gauge = p.gamma0 / gt if gt != 0 else 1.0

    def drive_intensity(t: float) -> float:
        return abs(steady_state_for_field(p, gauge * t).A_in) ** 2 - target

    # expand well past the last crossing so every branch of a bistable
    # response is inside the scan window
    t_hi = 1.0
    for _ in range(200):
        if drive_intensity(t_hi) > 10.0 * target:
            break
        t_hi *= 2.0
    else:
        raise NoConvergenceError("could not bracket the drive intensity")
    grid = np.concatenate(([0.0], np.geomspace(t_hi * 1e-8, t_hi, n_scan)))
    vals = np.array([drive_intensity(t) for t in grid])
    roots = []
    for k in range(len(grid) - 1):
        if vals[k] == 0.0:
            roots.append(grid[k])
        elif vals[k] * vals[k + 1] < 0:
            roots.append(brentq(drive_intensity, grid[k], grid[k + 1], xtol=1e-14))
    if not roots:
        raise NoConvergenceError("no steady state matches the drive")
    out = []
    tags = ("lower", "middle", "upper") if len(roots) == 3 else ()
    for k, t in enumerate(sorted(roots)):
        tag = tags[k] if tags else "single"
        ss = steady_state_for_field(p, gauge * t, branch=tag)
        out.append(_rotated(ss, cmath.phase(A_in) - cmath.phase(ss.A_in)))
    return out


# population reconstruction under fixed total atom number:
# dPi1 = (4 dSz1 - 2 dSz2)/3, dPi2 = (-2 dSz1 + 4 dSz2)/3, dPi3 = -(2/3)(dSz1 + dSz2)
_EMBED = np.zeros((11, 10))
_EMBED[:8, :8] = np.eye(8)
_EMBED[8, 8], _EMBED[8, 9] = 4.0 / 3.0, -2.0 / 3.0
_EMBED[9, 8], _EMBED[9, 9] = -2.0 / 3.0, 4.0 / 3.0
_EMBED[10, 8] = _EMBED[10, 9] = -2.0 / 3.0

_PROJECT = np.zeros((10, 11))
_PROJECT[:8, :8] = np.eye(8)
_PROJECT[8, 8], _PROJECT[8, 10] = 0.5, -0.5
_PROJECT[9, 9], _PROJECT[9, 10] = 0.5, -0.5


def drift_matrix_10(p: ThreeLevelParams, ss: SteadyState3L) -> np.ndarray:
    """10x10 drift over LABELS10, d(dxi)/dt = -B dxi + F."""
    J = jacobian11(p, ss.state11())
    return -np.asarray(_PROJECT @ J @ _EMBED, dtype=complex)


def _single_atom_context(p: ThreeLevelParams, ss: SteadyState3L):
    """Word matrices, drift matrices and means of the single-atom algebra."""
    E = lambda i, j: einstein.matrix_unit(3, i, j)
    alpha = ss.A2
    g, W = p.g, complex(p.Omega1)
    ident = np.eye(3, dtype=complex)
    words = [
        E(0, 2),  # P1
        E(2, 0),  # P1+
        E(1, 2),  # P2
        E(2, 1),  # P2+
        E(1, 0),  # Pr
        E(0, 1),  # Pr+
        0.5 * (E(0, 0) - E(2, 2)),  # Sz1
        0.5 * (E(1, 1) - E(2, 2)),  # Sz2
    ]
    d_p1 = (
        -(1j * p.Delta1 + p.gamma) * E(0, 2)
        + 1j * W * (E(0, 0) - E(2, 2))
        + 1j * g * alpha * E(0, 1)
    )
    d_p2 = (
        -(1j * p.Delta2 + p.gamma) * E(1, 2)
        + 1j * g * alpha * (E(1, 1) - E(2, 2))
        + 1j * W * E(1, 0)
    )
    d_pr = (
        -(p.gamma0 - 1j * p.delta) * E(1, 0)
        + 1j * np.conj(W) * E(1, 2)
        - 1j * g * alpha * E(2, 0)
    )
    d_pi1 = (
        1j * np.conj(W) * E(0, 2)
        - 1j * W * E(2, 0)
        + p.gamma * E(2, 2)
        - p.gamma0 * E(0, 0)
        + (p.Lambda1 / p.N) * ident
    )
    d_pi2 = (
        1j * g * np.conj(alpha) * E(1, 2)
        - 1j * g * alpha * E(2, 1)
        + p.gamma * E(2, 2)
        - p.gamma0 * E(1, 1)
        + (p.Lambda2 / p.N) * ident
    )
    d_pi3 = (
        -1j * np.conj(W) * E(0, 2)
        + 1j * W * E(2, 0)
        - 1j * g * np.conj(alpha) * E(1, 2)
        + 1j * g * alpha * E(2, 1)
        - (2.0 * p.gamma + p.gamma0) * E(2, 2)
    )
    drifts = [
        d_p1,
        d_p1.conj().T,
        d_p2,
        d_p2.conj().T,
        d_pr,
        d_pr.conj().T,
        0.5 * (d_pi1 - d_pi3),
        0.5 * (d_pi2 - d_pi3),
    ]
    n = p.N
    means = np.array(
        [
            [ss.Pi1 / n, np.conj(ss.Pr) / n, ss.P1 / n],
            [ss.Pr / n, ss.Pi2 / n, ss.P2 / n],
            [np.conj(ss.P1) / n, np.conj(ss.P2) / n, ss.Pi3 / n],
        ],
        dtype=complex,
    )
    return words, drifts, means


def diffusion_atomic_10(p: ThreeLevelParams, ss: SteadyState3L) -> np.ndarray:
    """Collective 8x8 diffusion block over (P1..Sz2) via Einstein relations."""
    words, drifts, means = _single_atom_context(p, ss)
    adjoint = (1, 0, 3, 2, 5, 4, 6, 7)
    D = p.N * einstein.diffusion_matrix(words, drifts, adjoint, means)
    # force correlations are exactly hermitian; symmetrize away the
    # rounding left over from the mean-value linear solve
    return 0.5 * (D + D.conj().T)


def diffusion_10(
    p: ThreeLevelParams, ss: SteadyState3L, drive: SqueezedVacuum | None = None
) -> np.ndarray:
    """Full 10x10 force correlation matrix (field block plus atomic block)."""
    D = np.zeros((10, 10), dtype=complex)
    vin = (drive or p.drive or VACUUM).correlations()
    D[:2, :2] = (2.0 * p.kappa / p.tau) * vin
    D[2:, 2:] = diffusion_atomic_10(p, ss)
    return D


def fluctuation_system(
    p: ThreeLevelParams, ss: SteadyState3L, drive: SqueezedVacuum | None = None
) -> noise.FluctuationSystem:
    """Drift and diffusion of the linearized three-level dynamics."""
    drive = drive or p.drive or VACUUM
    return noise.FluctuationSystem(
        labels=LABELS10,
        drift=drift_matrix_10(p, ss),
        diffusion=diffusion_10(p, ss, drive),
        adjoint=ADJOINT10,
        field_slots=(0, 1),
        input_correlations=drive.correlations(),
        kappa=p.kappa,
        tau=p.tau,
        spin_slots=(6, 7, 8, 9),
        spin_kind="coherence",
        mean_spin=ss.mean_spin(),
        meta={"I2": intensity(p, ss.A2)},
    )
