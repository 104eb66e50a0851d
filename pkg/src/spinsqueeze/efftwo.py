"""Effective two-level model: one cavity mode coupled to a ground-state spin.

Everything here runs in internal units (gamma0 = 1, frequencies in units
of gamma0) with the cavity round-trip time ``tau`` carried explicitly.
The mean intracavity field is taken real and non-negative in the gauge
where the effective coupling is real, so the operating point is fixed by
the dimensionless intensity I2 = (g_tilde <A2> / gamma0)^2, exactly the
quantity the optimal-squeezing tables are indexed by.

The residual optical-pumping rate Gamma_p extends the model to arbitrary
Gamma_p/gamma0 through the substitutions gamma0 -> gamma0 + Gamma_p and
Lambda2 -> Lambda2 + N Gamma_p; for nearly closed systems the additional
field terms linear in Omega2/Omega1 (probe over pump Rabi frequency) are
included both in the spin drive and in the cavity source term.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from . import einstein, noise
from .params import (
    VACUUM,
    EffectiveParams,
    ParameterError,
    SqueezedVacuum,
    internal_units,
)


class DegenerateSpinError(ParameterError):
    """lambda1 >= lambda2: mean spin zero or inverted, rotation undefined."""


LABELS5 = ("A2", "A2+", "S+", "S-", "Sz")
ADJOINT5 = (1, 0, 3, 2, 4)

LABELS3 = ("S+", "S-", "Sz")
ADJOINT3 = (1, 0, 2)


@dataclass(frozen=True)
class SteadyState2L:
    """Per-atom mean values of the spin and the scaled cavity amplitude."""

    s_plus: complex
    s_minus: complex
    s_z: float
    beta2: float
    I2: float
    branch: str = ""

    def mean_spin(self, N: float) -> np.ndarray:
        """Collective mean spin vector (Sx, Sy, Sz)."""
        return N * np.array([self.s_plus.real, self.s_plus.imag, self.s_z])


def _require_spin(p: EffectiveParams):
    if p.lambda2 <= p.lambda1:
        raise DegenerateSpinError(
            f"lambda2 = {p.lambda2:g} must exceed lambda1 = {p.lambda1:g}"
        )


def steady_state(p: EffectiveParams, I2: float) -> SteadyState2L:
    """Closed-form steady state at intracavity intensity I2 (Gamma_p = 0)."""
    if p.Gamma_p_ratio != 0.0:
        raise ParameterError("use corrected_steady_state when Gamma_p_ratio > 0")
    return corrected_steady_state(p, I2)


def corrected_steady_state(
    p: EffectiveParams, I2: float, omega_ratio: float = 0.0
) -> SteadyState2L:
    """Steady state including residual optical pumping Gamma_p.

    ``omega_ratio`` is Omega2/Omega1 at the operating point; its linear
    contribution drives the coherence and can push |<S+>| slightly past
    the Gamma_p = 0 maximum of N/4.  With Gamma_p = 0 this reduces to the
    plain closed form.
    """
    _require_spin(p)
    if I2 < 0:
        raise ParameterError("I2 must be non-negative")
    gp = p.Gamma_p_ratio
    geff = 1.0 + gp
    lam_d = p.lambda2 - p.lambda1
    dt = p.delta_bar
    a = math.sqrt(I2)
    pump = 0.5 * (gp + lam_d)
    den = geff**2 + dt**2
    s_z = (pump * den + 2.0 * a * gp * omega_ratio * dt) / (geff * (den + 4.0 * a * a))
    s_plus = (2j * a * s_z - gp * omega_ratio) / (geff - 1j * dt)
    return SteadyState2L(
        s_plus=complex(s_plus),
        s_minus=complex(np.conj(s_plus)),
        s_z=float(s_z),
        beta2=a,
        I2=float(I2),
        branch=branch_tag(p, I2),
    )


def input_intensity(p: EffectiveParams, I2: float) -> float:
    """Drive intensity required to sustain intracavity intensity I2.

    The dispersive term combines the cavity detuning with the atomic
    phase shift; in the table convention used throughout (see
    ``params.internal_units``) negative ``delta_c`` adds to the atomic
    shift at positive ``delta_bar``.
    """
    den = 1.0 + p.delta_bar**2 + 4.0 * I2
    absorptive = 1.0 + 2.0 * p.Ctilde / den
    dispersive = -p.delta_c + 2.0 * p.Ctilde * p.delta_bar / den
    return I2 * (absorptive**2 + dispersive**2)


def turning_points(p: EffectiveParams) -> np.ndarray:
    """Intracavity intensities where d(I2_in)/d(I2) vanishes.

    Roots of a cubic; an S-shaped response has exactly two positive ones,
    a monotone response none.
    """
    d0 = 1.0 + p.delta_bar**2
    D = Polynomial([d0, 4.0])
    A = D + 2.0 * p.Ctilde
    B = -p.delta_c * D + 2.0 * p.Ctilde * p.delta_bar
    P = Polynomial([0.0, 1.0]) * (A * A + B * B)
    cubic = P.deriv() * D - 8.0 * P
    roots = cubic.roots()
    real = roots[np.abs(roots.imag) < 1e-9 * (1.0 + np.abs(roots.real))].real
    return np.sort(real[real > 1e-12])


def branch_tag(p: EffectiveParams, I2: float) -> str:
    """lower / middle / upper relative to the turning points, or single."""
    tp = turning_points(p)
    if tp.size < 2:
        return "single"
    if I2 < tp[0]:
        return "lower"
    if I2 > tp[-1]:
        return "upper"
    return "middle"


def _assigned_rates(p: EffectiveParams):
    """Decay and pumping fractions after absorbing Gamma_p."""
    geff = 1.0 + p.Gamma_p_ratio
    lam1 = p.lambda1 / geff
    lam2 = (p.lambda2 + p.Gamma_p_ratio) / geff
    return geff, lam1, lam2


def atomic_diffusion_single(lam1: float, lam2: float, s_plus, s_minus, s_z) -> np.ndarray:
    """Per-atom spin diffusion block over (S+, S-, Sz), entries <F_a F_b†>.

    Closed form from the generalized Einstein relations for decay at unit
    rate plus incoherent repumping with fractions (lam1, lam2).  The same
    matrix with the S+ and S- slots exchanged is the adjoint-ordered
    (<F† F>) layout.
    """
    lam = lam1 - lam2
    sp, sm, sz = complex(s_plus), complex(s_minus), float(s_z)
    return np.array(
        [
            [1.0 - lam / 2.0 + sz, 0.0, (-1.0 + lam) * sp / 2.0],
            [0.0, 1.0 + lam / 2.0 - sz, (1.0 + lam) * sm / 2.0],
            [(-1.0 + lam) * sm / 2.0, (1.0 + lam) * sp / 2.0, 0.5 + lam * sz],
        ],
        dtype=complex,
    )


def diffusion_atomic(p: EffectiveParams, ss: SteadyState2L) -> np.ndarray:
    """Collective spin diffusion block, N gamma_eff times the per-atom form."""
    geff, lam1, lam2 = _assigned_rates(p)
    return p.N * geff * atomic_diffusion_single(lam1, lam2, ss.s_plus, ss.s_minus, ss.s_z)


def diffusion_atomic_einstein(
    p: EffectiveParams, ss: SteadyState2L, tau: float = 1.0, omega_ratio: float = 0.0
) -> np.ndarray:
    """Same block derived through the operator-algebra Einstein machinery.

    Independent route used to validate :func:`diffusion_atomic`: the
    two-level single-atom algebra is handed to
    :func:`einstein.diffusion_matrix` together with the drift operators.
    """
    u = internal_units(p, tau)
    geff, lam1, lam2 = _assigned_rates(p)
    a = ss.beta2  # g_tilde * <A2>, real in this gauge
    E = lambda i, j: einstein.matrix_unit(2, i, j)
    x_sp, x_sm = E(1, 0), E(0, 1)
    x_sz = 0.5 * (E(1, 1) - E(0, 0))
    ident = np.eye(2, dtype=complex)
    drift_sp = (
        -(geff - 1j * p.delta_bar) * x_sp
        + 2j * a * x_sz
        - u.Gamma_p * omega_ratio * ident
    )
    drift_sz = (
        -geff * x_sz
        + 0.5 * (u.Gamma_p + (p.lambda2 - p.lambda1)) * ident
        + 1j * a * (x_sp - x_sm)
    )
    means = np.array(
        [[0.5 - ss.s_z, ss.s_minus], [ss.s_plus, 0.5 + ss.s_z]], dtype=complex
    )
    single = einstein.diffusion_matrix(
        [x_sp, x_sm, x_sz],
        [drift_sp, drift_sp.conj().T, drift_sz],
        ADJOINT3,
        means,
    )
    return p.N * single


def diffusion_field(
    p: EffectiveParams, drive: SqueezedVacuum | None = None, tau: float = 1.0
) -> np.ndarray:
    """Input-field diffusion block (2 kappa / tau) x input correlations."""
    vin = (drive or p.drive or VACUUM).correlations()
    return (2.0 / (p.rho * tau)) * vin


def drift_matrix_5(
    p: EffectiveParams,
    ss: SteadyState2L,
    tau: float = 1.0,
    omega_ratio: float = 0.0,
) -> np.ndarray:
    """5x5 drift over (A2, A2+, S+, S-, Sz), d(dxi)/dt = -B dxi + F."""
    u = internal_units(p, tau)
    geff = 1.0 + u.Gamma_p
    kap, Dc, gt = u.kappa, u.Delta_c, u.g_tilde
    N = p.N
    # couplings to the atomic slots carry g_tilde*<A2> = beta2, which stays
    # finite in the classical-drive limit g_tilde -> 0 at fixed intensity
    a = ss.beta2
    Sp, Sm, Sz = N * ss.s_plus, N * ss.s_minus, N * ss.s_z
    B = np.zeros((5, 5), dtype=complex)
    B[0, 0] = kap + 1j * Dc
    B[0, 2] = -1j * gt / tau
    B[2, 0] = -2j * gt * Sz
    B[2, 2] = geff - 1j * p.delta_bar
    B[2, 4] = -2j * a
    B[4, 0] = 1j * gt * Sm
    B[4, 1] = -1j * gt * Sp
    B[4, 2] = -1j * a
    B[4, 3] = 1j * a
    B[4, 4] = geff
    if u.Gamma_p > 0.0 and omega_ratio != 0.0:
        if gt == 0.0 or a == 0.0:
            raise ParameterError("omega_ratio terms need a nonzero mean field and coupling")
        alpha = a / gt
        q = omega_ratio / alpha  # g / Omega1
        Pi2 = N * (0.5 + ss.s_z)
        B[2, 0] += N * u.Gamma_p * q
        B[0, 0] -= 1j * gt * q * Pi2 / tau
        B[0, 4] = -1j * gt * q * alpha / tau
    # adjoint rows mirror the primaries
    B[1, 1] = np.conj(B[0, 0])
    B[1, 3] = np.conj(B[0, 2])
    B[1, 4] = np.conj(B[0, 4])
    B[3, 1] = np.conj(B[2, 0])
    B[3, 3] = np.conj(B[2, 2])
    B[3, 4] = np.conj(B[2, 4])
    return B


def fluctuation_system(
    p: EffectiveParams,
    ss: SteadyState2L,
    tau: float = 1.0,
    omega_ratio: float = 0.0,
    drive: SqueezedVacuum | None = None,
) -> noise.FluctuationSystem:
    """Drift plus diffusion for the linearized field-spin dynamics."""
    drive = drive or p.drive or VACUUM
    B = drift_matrix_5(p, ss, tau=tau, omega_ratio=omega_ratio)
    D = np.zeros((5, 5), dtype=complex)
    D[:2, :2] = diffusion_field(p, drive, tau)
    D[2:, 2:] = diffusion_atomic(p, ss)
    geff, _, _ = _assigned_rates(p)
    lam_d = p.lambda2 - p.lambda1
    gamma_prime = geff + (
        4.0 * p.Ctilde * ss.s_z / (lam_d * (1.0 + p.delta_c**2)) if p.Ctilde else 0.0
    )
    return noise.FluctuationSystem(
        labels=LABELS5,
        drift=B,
        diffusion=D,
        adjoint=ADJOINT5,
        field_slots=(0, 1),
        input_correlations=drive.correlations(),
        kappa=1.0 / p.rho,
        tau=tau,
        spin_slots=(2, 3, 4),
        spin_kind="pm",
        mean_spin=ss.mean_spin(p.N),
        meta={"gamma_prime": gamma_prime, "I2": ss.I2},
    )


def adiabatic_drift(p: EffectiveParams, ss: SteadyState2L, warn: bool = True):
    """3x3 spin drift after eliminating the fast cavity field.

    Returns (B3, gamma_prime) with B3 in units of gamma0 and the
    broadened coherence decay rate gamma_prime.  Valid in the bad-cavity
    window gamma0 << Ctilde gamma0 << kappa.
    """
    _require_spin(p)
    kap = 1.0 / p.rho
    noise.check_regime(
        p.Ctilde >= 10.0 and p.Ctilde <= 0.1 * kap,
        f"bad-cavity window wants 10 <= Ctilde <= kappa/10, got Ctilde = {p.Ctilde:g}, "
        f"kappa = {kap:g}",
        warn,
    )
    lam_d = p.lambda2 - p.lambda1
    dc = -p.delta_c  # rotating-frame sign, see params.internal_units
    cplus = 1.0 + 1j * dc
    shift = 4.0 * p.Ctilde * ss.s_z / (lam_d * cplus) if p.Ctilde else 0.0
    pull = 2.0 * p.Ctilde / lam_d if p.Ctilde else 0.0
    b2 = ss.beta2
    B3 = np.array(
        [
            [1.0 - 1j * p.delta_bar + shift, 0.0, -2j * b2],
            [0.0, 1.0 + 1j * p.delta_bar + np.conj(shift), 2j * b2],
            [-1j * b2 - pull * ss.s_minus / cplus, 1j * b2 - pull * ss.s_plus / np.conj(cplus), 1.0],
        ],
        dtype=complex,
    )
    gamma_prime = 1.0 + (4.0 * p.Ctilde * ss.s_z / (lam_d * (1.0 + dc**2)) if p.Ctilde else 0.0)
    return B3, gamma_prime


def adiabatic_diffusion(
    p: EffectiveParams, ss: SteadyState2L, drive: SqueezedVacuum | None = None
) -> np.ndarray:
    """Spin diffusion after field elimination: bare noise plus cavity-fed noise.

    The eliminated field hands the input fluctuations to the spin with
    gain proportional to sqrt(Ctilde N); that contribution scales as N^2
    through Ctilde and dominates for large cooperativity.
    """
    vin = (drive or p.drive or VACUUM).correlations()
    base = p.N * atomic_diffusion_single(p.lambda1, p.lambda2, ss.s_plus, ss.s_minus, ss.s_z)
    if p.Ctilde == 0.0:
        return base
    lam_d = p.lambda2 - p.lambda1
    cplus = 1.0 - 1j * p.delta_c  # rotating-frame sign, see params.internal_units
    gain = math.sqrt(p.Ctilde * p.N / lam_d)
    phi = 4j * ss.s_z * gain / cplus
    psi1 = -2j * ss.s_minus * gain / cplus
    psi2 = 2j * ss.s_plus * gain / np.conj(cplus)
    K = np.array([[phi, 0.0], [0.0, np.conj(phi)], [psi1, psi2]], dtype=complex)
    return base + K @ vin @ K.conj().T


def adiabatic_system(
    p: EffectiveParams,
    ss: SteadyState2L,
    drive: SqueezedVacuum | None = None,
    warn: bool = True,
) -> noise.FluctuationSystem:
    """Fluctuation system of the field-eliminated (bad-cavity) spin model."""
    B3, gamma_prime = adiabatic_drift(p, ss, warn=warn)
    D3 = adiabatic_diffusion(p, ss, drive)
    return noise.FluctuationSystem(
        labels=LABELS3,
        drift=B3,
        diffusion=D3,
        adjoint=ADJOINT3,
        spin_slots=(0, 1, 2),
        spin_kind="pm",
        mean_spin=ss.mean_spin(p.N),
        meta={"gamma_prime": gamma_prime, "I2": ss.I2},
    )


def analytic_min_variance(Ctilde: float, delta_bar: float = 10.0, N: float = 1.0e4) -> float:
    """Minimal normalized variance of the bad-cavity model at its best point.

    The operating point maximizes the mean coherence, 4 I2 = 1 + delta_bar^2
    with all pumping into level 2; the result tends to 1/sqrt(2) for large
    cooperativity and to 1 (coherent-spin-state level) for Ctilde -> 0.
    """
    from . import spinframe

    rho = 1.0 / (1000.0 * max(Ctilde, 1.0))
    p = EffectiveParams(Ctilde=Ctilde, delta_bar=delta_bar, delta_c=0.0, rho=rho, N=N)
    ss = steady_state(p, 0.25 * (1.0 + delta_bar**2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", noise.RegimeWarning)
        sys3 = adiabatic_system(p, ss, warn=False)
    cov = noise.solve_lyapunov(sys3)
    report = spinframe.squeezing_report(cov.matrix, ss.mean_spin(p.N), kind="pm")
    return report.dS_min
