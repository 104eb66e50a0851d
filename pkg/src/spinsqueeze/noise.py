"""Generic fluctuation engine for linear quantum Langevin systems.

A :class:`FluctuationSystem` bundles a drift matrix B (convention
d(dxi)/dt = -B dxi + F) and the force correlation matrix D defined by
<F(t) F(t')†> = D delta(t - t').  Stationary second moments
G[i, j] = <dxi_i dxi_j†> solve the Lyapunov equation

    B G + G B† = D,

and the frequency-resolved moments are V(w) = (B - i w)^-1 D (B† + i w)^-1
with the convention dxi(t) = integral dw/2pi exp(-i w t) dxi(w), so that
integral dw/2pi V(w) = G.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import matrix_balance

from . import spinframe


class FluctuationError(RuntimeError):
    """Numerical failure in the fluctuation solvers."""


class InstabilityError(FluctuationError):
    """Drift matrix has a non-decaying eigenvalue (unstable branch)."""

    def __init__(self, eigenvalues):
        self.eigenvalues = np.asarray(eigenvalues)
        bad = self.eigenvalues[self.eigenvalues.real <= 0]
        super().__init__(
            "drift matrix is not strictly stable; offending eigenvalues: "
            + ", ".join(f"{z:.6g}" for z in bad)
        )


class TurningPointError(FluctuationError):
    """Eigenvalue pair sums to ~0; the operating point sits on a fold."""


class ResidualError(FluctuationError):
    """Lyapunov solve did not reach the required residual."""


class RegimeWarning(UserWarning):
    """Operating point is outside a model's stated validity regime."""


@dataclass
class FluctuationSystem:
    """Labeled drift/diffusion pair plus enough context to post-process it.

    ``adjoint`` maps each slot to the slot of its adjoint operator.
    ``field_slots`` marks the intracavity-field rows; diffusion entries in
    those rows/columns form the input-field noise channel, everything else
    is atomic.  ``spin_slots``/``spin_kind``/``mean_spin`` feed the
    mean-spin-frame variance extraction.
    """

    labels: tuple
    drift: np.ndarray
    diffusion: np.ndarray
    adjoint: tuple
    field_slots: tuple | None = None
    input_correlations: np.ndarray | None = None
    kappa: float | None = None
    tau: float = 1.0
    spin_slots: tuple | None = None
    spin_kind: str = "pm"
    mean_spin: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    def atomic_slots(self) -> tuple:
        fs = set(self.field_slots or ())
        return tuple(i for i in range(self.dim) if i not in fs)

    def diffusion_part(self, which: str) -> np.ndarray:
        """Diffusion restricted to one source group ("field" or "atomic")."""
        keep = set(self.field_slots or ()) if which == "field" else set(self.atomic_slots())
        d = np.zeros_like(self.diffusion)
        idx = sorted(keep)
        d[np.ix_(idx, idx)] = self.diffusion[np.ix_(idx, idx)]
        return d

    def spin_block(self, matrix: np.ndarray) -> np.ndarray:
        if self.spin_slots is None:
            raise ValueError("system has no spin block")
        idx = list(self.spin_slots)
        return matrix[np.ix_(idx, idx)]


@dataclass
class CovarianceMatrix:
    """Stationary second moments with the achieved Lyapunov residual."""

    labels: tuple
    matrix: np.ndarray
    residual: float


@dataclass
class SpectrumMatrix:
    """Frequency-resolved second moments on a grid (one matrix per point)."""

    omega: np.ndarray
    values: np.ndarray  # shape (len(omega), n, n)
    labels: tuple
    normalization: str = "raw"


RESIDUAL_TOL = 1e-10
# Pair sums of stable eigenvalues are positive; only a value at the float64
# noise floor (relative to the fastest rate) makes the Lyapunov operator
# numerically singular.  Stiff but stable systems with wide rate separation
# must pass, so the guard sits at the singularity scale, not at |B| * 1e-8.
FOLD_TOL = 1e-12


def stability_eigenvalues(B: np.ndarray, norm_scale: float | None = None) -> np.ndarray:
    """Eigenvalues of B, raising on instability or a fold singularity."""
    lam = np.linalg.eigvals(B)
    if lam.real.min() <= 0.0:
        raise InstabilityError(lam)
    pair_sums = np.abs(lam[:, None] + lam.conj()[None, :])
    scale = norm_scale if norm_scale is not None else np.linalg.norm(B)
    if pair_sums.min() < FOLD_TOL * scale:
        raise TurningPointError(
            f"eigenvalue pair sum {pair_sums.min():.3g} below {FOLD_TOL:g} * |B|; "
            "operating point is numerically on a turning point"
        )
    return lam


def stability_margin(B: np.ndarray) -> float:
    """Smallest decay rate of the linearized dynamics (negative if unstable)."""
    return float(np.linalg.eigvals(B).real.min())


def _lyapunov_kron(B: np.ndarray, D: np.ndarray) -> np.ndarray:
    n = B.shape[0]
    eye = np.eye(n)
    K = np.kron(eye, B) + np.kron(B.conj(), eye)
    Kinv = np.linalg.inv(K)  # small dense systems; reused for refinement
    G = (Kinv @ D.reshape(-1, order="F")).reshape((n, n), order="F")
    for _ in range(2):  # iterative refinement sharpens ill-conditioned solves
        R = D - (B @ G + G @ B.conj().T)
        if np.linalg.norm(R) <= 1e-14 * max(np.linalg.norm(D), 1e-300):
            break
        G = G + (Kinv @ R.reshape(-1, order="F")).reshape((n, n), order="F")
    return G


def _lyapunov_eig(B: np.ndarray, D: np.ndarray) -> np.ndarray:
    lam, U = np.linalg.eig(B)
    Uinv = np.linalg.inv(U)
    Dt = Uinv @ D @ Uinv.conj().T
    G = Dt / (lam[:, None] + lam.conj()[None, :])
    return U @ G @ U.conj().T


def solve_lyapunov(system, D: np.ndarray | None = None, *, method: str = "kron") -> CovarianceMatrix:
    """Solve B G + G B† = D for the stationary covariance G.

    ``system`` is a :class:`FluctuationSystem` or a bare drift matrix (in
    which case ``D`` must be given).  The default solver vectorizes the
    equation into a dense Kronecker system (fine up to dimension ~10) and
    falls back to an eigendecomposition if that fails; both run on a
    balanced copy of B to tame wide rate scales.
    """
    if isinstance(system, FluctuationSystem):
        B, D, labels = system.drift, system.diffusion, system.labels
    else:
        B = np.asarray(system, dtype=complex)
        if D is None:
            raise ValueError("diffusion matrix required when passing a bare drift")
        labels = tuple(range(B.shape[0]))
    D = np.asarray(D, dtype=complex)
    stability_eigenvalues(B)

    Bb, T = matrix_balance(B, permute=True, separate=False)
    Tinv = np.linalg.inv(T)
    Db = Tinv @ D @ Tinv.conj().T

    def finish(Gb):
        G = T @ Gb @ T.conj().T
        G = 0.5 * (G + G.conj().T)
        scale = np.linalg.norm(D)
        if scale == 0.0:
            scale = np.linalg.norm(B) * np.linalg.norm(G) + 1.0
        res = np.linalg.norm(B @ G + G @ B.conj().T - D) / scale
        return G, res

    solvers = [_lyapunov_kron, _lyapunov_eig] if method == "kron" else [_lyapunov_eig, _lyapunov_kron]
    best = None
    for solver in solvers:
        try:
            G, res = finish(solver(Bb, Db))
        except np.linalg.LinAlgError:
            continue
        if best is None or res < best[1]:
            best = (G, res)
        if res <= RESIDUAL_TOL:
            break
    if best is None:
        raise ResidualError("all Lyapunov solvers failed")
    G, res = best
    if res > RESIDUAL_TOL:
        raise ResidualError(f"Lyapunov residual {res:.3g} exceeds {RESIDUAL_TOL:g}")
    return CovarianceMatrix(labels=labels, matrix=G, residual=res)


def spectrum(system, omega, D: np.ndarray | None = None) -> SpectrumMatrix:
    """Frequency-resolved moment matrix V(w) on the given grid."""
    if isinstance(system, FluctuationSystem):
        B = system.drift
        D = system.diffusion if D is None else D
        labels = system.labels
    else:
        B = np.asarray(system, dtype=complex)
        labels = tuple(range(B.shape[0]))
    stability_eigenvalues(B)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n = B.shape[0]
    eye = np.eye(n)
    out = np.empty((omega.size, n, n), dtype=complex)
    for k, w in enumerate(omega):
        Tw = np.linalg.inv(B - 1j * w * eye)
        out[k] = Tw @ D @ Tw.conj().T
    return SpectrumMatrix(omega=omega, values=out, labels=labels)


def integrate_spectrum(system, D: np.ndarray | None = None, epsrel: float = 1e-9) -> np.ndarray:
    """Quadrature of V(w) dw / 2pi over the whole axis (equals G when D is total)."""
    if isinstance(system, FluctuationSystem):
        B = system.drift
        D = system.diffusion if D is None else D
    else:
        B = np.asarray(system, dtype=complex)
    stability_eigenvalues(B)
    n = B.shape[0]
    eye = np.eye(n)

    def integrand(w):
        Tw = np.linalg.inv(B - 1j * w * eye)
        return Tw @ D @ Tw.conj().T

    total, _err = quad_vec(integrand, -np.inf, np.inf, epsrel=epsrel, epsabs=1e-13)
    return total / (2.0 * math.pi)


@dataclass
class OutgoingSpectrum:
    """Shot-noise-normalized outgoing-field quadrature spectra."""

    omega: np.ndarray
    s_min: np.ndarray
    s_max: np.ndarray
    values: np.ndarray  # V_out(w), shape (len(omega), 2, 2)


def outgoing_spectrum(system: FluctuationSystem, omega) -> OutgoingSpectrum:
    """Spectrum of the field leaving the cavity through the coupling mirror.

    Uses dA_out = sqrt(2 kappa tau) dA - dA_in, which is the unique
    linear input-output relation consistent with the input coupling
    sqrt(2 kappa / tau) and a unit vacuum spectrum for an empty cavity.
    The extreme quadrature spectra are V11 + V22 -/+ 2 |V12|, normalized
    so that shot noise is 1.
    """
    if system.field_slots is None or system.kappa is None:
        raise ValueError("system lacks field slots or kappa; no outgoing field defined")
    if system.input_correlations is None:
        raise ValueError("system lacks input correlations")
    B, D = system.drift, system.diffusion
    stability_eigenvalues(B)
    n = B.shape[0]
    eye = np.eye(n)
    i1, i2 = system.field_slots
    P = np.zeros((2, n))
    P[0, i1] = P[1, i2] = 1.0
    E = P.T.copy()
    vin = system.input_correlations
    kap, tau = system.kappa, system.tau
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    vout = np.empty((omega.size, 2, 2), dtype=complex)
    for k, w in enumerate(omega):
        Tw = np.linalg.inv(B - 1j * w * eye)
        PT = P @ Tw
        cross = PT @ E @ vin
        vout[k] = (
            2.0 * kap * tau * (PT @ D @ PT.conj().T)
            - 2.0 * kap * (cross + cross.conj().T)
            + vin
        )
    trace = vout[:, 0, 0].real + vout[:, 1, 1].real
    off = 2.0 * np.abs(vout[:, 0, 1])
    return OutgoingSpectrum(omega=omega, s_min=trace - off, s_max=trace + off, values=vout)


@dataclass
class NoiseBudget:
    """Split of the minimal spin variance into input-field and atomic parts."""

    report: spinframe.SqueezingReport
    dS_field: float
    dS_atomic: float
    field_fraction: float
    omega: np.ndarray | None = None
    spectra: dict | None = None  # keys: total, field, atomic


def _quadrature_projection(system: FluctuationSystem, report) -> np.ndarray:
    w_spin = spinframe.quadrature_weights(
        report.theta, report.phi, report.alpha0, kind=system.spin_kind
    )
    w = np.zeros(system.dim, dtype=complex)
    for slot, coeff in zip(system.spin_slots, w_spin):
        w[slot] = coeff
    return w


def decompose(system: FluctuationSystem, omega=None) -> NoiseBudget:
    """Per-source contributions to the minimal spin variance.

    The quadrature direction is fixed by the total covariance; the
    input-field and atomic noise groups are then propagated separately
    (covariances are linear in the diffusion matrix) and projected onto
    that direction, so the parts sum to the total exactly.  When a
    frequency grid is supplied the same projection of V(w) is returned
    per group, normalized like the variances.
    """
    if system.spin_slots is None or system.mean_spin is None:
        raise ValueError("system lacks spin context")
    cov = solve_lyapunov(system)
    report = spinframe.squeezing_report(
        system.spin_block(cov.matrix), system.mean_spin, kind=system.spin_kind
    )
    w = _quadrature_projection(system, report)
    half = 0.5 * report.mean_spin_norm

    def projected(D):
        G = solve_lyapunov(system.drift, D).matrix
        return float(np.real(w @ G @ w.conj())) / half

    d_field = projected(system.diffusion_part("field"))
    d_atomic = projected(system.diffusion_part("atomic"))
    total = d_field + d_atomic
    if not math.isclose(total, report.dS_min, rel_tol=1e-8, abs_tol=1e-10):
        raise FluctuationError(
            f"source split {total:.12g} does not reproduce dS_min {report.dS_min:.12g}"
        )
    budget = NoiseBudget(
        report=report,
        dS_field=d_field,
        dS_atomic=d_atomic,
        field_fraction=d_field / report.dS_min if report.dS_min else math.nan,
    )
    if omega is not None:
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        matrices = {}
        spectra = {}
        for name, D in (
            ("total", system.diffusion),
            ("field", system.diffusion_part("field")),
            ("atomic", system.diffusion_part("atomic")),
        ):
            V = spectrum(system, omega, D=D).values
            matrices[name] = V
            spectra[name] = np.real(np.einsum("i,kij,j->k", w, V, w.conj())) / half
        for k in range(omega.size):
            gap = np.linalg.norm(
                matrices["total"][k] - matrices["field"][k] - matrices["atomic"][k]
            )
            if gap > 1e-10 * np.linalg.norm(matrices["total"][k]):
                raise FluctuationError("per-source spectra do not sum to the total")
        budget.omega = omega
        budget.spectra = spectra
    return budget


def check_regime(condition: bool, message: str, warn: bool = True):
    """Emit a :class:`RegimeWarning` when a validity condition fails."""
    if warn and not condition:
        warnings.warn(message, RegimeWarning, stacklevel=3)
