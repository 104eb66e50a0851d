"""Rotation into the mean-spin frame and normalized transverse spin variances.

The squeezing figure of merit used throughout is the smallest variance of
a spin component orthogonal to the mean spin, divided by |<S_Z>|/2 (the
coherent-spin-state value); squeezed means below one.

Covariance blocks follow the global convention G[i, j] = <dxi_i dxi_j†>,
where the adjoint of S+ is S- and of Pr is Pr†.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np


class ZeroMeanSpinError(ValueError):
    """Mean spin length is zero; the transverse frame is undefined."""


class UncertaintyWarning(RuntimeWarning):
    """Normalized variance product fell below the uncertainty bound."""


# (S+, S-, Sz) -> (Sx, Sy, Sz) with Sx = (S+ + S-)/2, Sy = (S+ - S-)/2i.
ROTATION_PM = 0.5 * np.array(
    [[1, 1, 0], [-1j, 1j, 0], [0, 0, 2]], dtype=complex
)

# (Pr, Pr+, Sz1, Sz2) -> (Sx, Sy, Sz) with Sz = (Pi2 - Pi1)/2 = Sz2 - Sz1.
ROTATION_COHERENCE = 0.5 * np.array(
    [[1, 1, 0, 0], [-1j, 1j, 0, 0], [0, 0, -2, 2]], dtype=complex
)

_KIND_TO_ROTATION = {"pm": ROTATION_PM, "coherence": ROTATION_COHERENCE}


@dataclass(frozen=True)
class SqueezingReport:
    """Mean-spin frame angles and normalized transverse variances."""

    theta: float
    phi: float
    alpha0: float
    dS_X: float
    dS_Y: float
    dS_XY: complex
    dS_min: float
    dS_max: float
    mean_spin_norm: float

    @property
    def uncertainty_product(self) -> float:
        return self.dS_min * self.dS_max


def mean_spin_angles(mean_spin) -> tuple[float, float]:
    """Polar and azimuthal angles of the mean spin vector (Sx, Sy, Sz).

    theta is the rotation about the (new) Y axis, phi about z, such that
    the rotated Z axis points along the mean spin.  phi defaults to 0 when
    the transverse projection vanishes.
    """
    sx, sy, sz = (float(np.real(c)) for c in mean_spin)
    norm = math.sqrt(sx * sx + sy * sy + sz * sz)
    if norm == 0.0:
        raise ZeroMeanSpinError("mean spin vanishes")
    s_perp = math.hypot(sx, sy)
    theta = math.atan2(s_perp, sz)
    phi = 0.0 if s_perp == 0.0 else math.atan2(sy, sx)
    return theta, phi


def transverse_rotation(theta: float, phi: float) -> np.ndarray:
    """2x3 map from (Sx, Sy, Sz) onto the transverse components (S_X, S_Y)."""
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    return np.array([[ct * cp, ct * sp, -st], [-sp, cp, 0.0]])


def cartesian_spin_covariance(block: np.ndarray, kind: str = "pm") -> np.ndarray:
    """Map a raised/lowered-operator covariance block onto (Sx, Sy, Sz).

    ``kind`` selects the source basis: "pm" for (S+, S-, Sz), "coherence"
    for (Pr, Pr+, Sz1, Sz2).
    """
    r1 = _KIND_TO_ROTATION[kind]
    block = np.asarray(block, dtype=complex)
    if block.shape != (r1.shape[1],) * 2:
        raise ValueError(f"covariance block must be {r1.shape[1]}x{r1.shape[1]} for kind {kind!r}")
    return r1 @ block @ r1.conj().T


def transverse_variances(g_xyz: np.ndarray, theta: float, phi: float):
    """Second moments (dS_X, dS_Y, dS_XY) in the plane orthogonal to the mean spin."""
    r2 = transverse_rotation(theta, phi)
    g_perp = r2 @ np.asarray(g_xyz, dtype=complex) @ r2.conj().T
    return float(g_perp[0, 0].real), float(g_perp[1, 1].real), complex(g_perp[0, 1])


def minimal_variance(dS_X: float, dS_Y: float, dS_XY: complex, mean_spin_norm: float):
    """Normalized minimal and maximal transverse variances and the optimal angle.

    The variance of the component at angle alpha from X is
    cos^2(a) dS_X + sin^2(a) dS_Y + sin(2a) Re(dS_XY); only the real part
    of the cross moment enters.  Returns (alpha0, dS_min, dS_max) with the
    variances divided by |<S_Z>|/2.  On an isotropic transverse block the
    angle is fixed to 0.
    """
    if mean_spin_norm <= 0.0:
        raise ZeroMeanSpinError("mean spin vanishes")
    half = 0.5 * mean_spin_norm
    a, b, c = float(dS_X), float(dS_Y), float(np.real(dS_XY))
    radius = math.hypot(0.5 * (a - b), c)
    avg = 0.5 * (a + b)
    if radius == 0.0:
        return 0.0, avg / half, avg / half
    alpha = 0.5 * math.atan2(2.0 * c, a - b)
    candidates = (alpha, alpha + 0.5 * math.pi)

    def variance(ang):
        return (
            math.cos(ang) ** 2 * a
            + math.sin(ang) ** 2 * b
            + math.sin(2.0 * ang) * c
        )

    alpha0 = min(candidates, key=variance)
    # fold into (-pi/2, pi/2]
    if alpha0 > 0.5 * math.pi:
        alpha0 -= math.pi
    elif alpha0 <= -0.5 * math.pi:
        alpha0 += math.pi
    return alpha0, (avg - radius) / half, (avg + radius) / half


def squeezing_report(block: np.ndarray, mean_spin, kind: str = "pm") -> SqueezingReport:
    """Full chain: rotate into the mean-spin frame and minimize the variance."""
    theta, phi = mean_spin_angles(mean_spin)
    g_xyz = cartesian_spin_covariance(block, kind)
    dS_X, dS_Y, dS_XY = transverse_variances(g_xyz, theta, phi)
    norm = float(np.linalg.norm(np.real(np.asarray(mean_spin, dtype=complex))))
    alpha0, d_min, d_max = minimal_variance(dS_X, dS_Y, dS_XY, norm)
    report = SqueezingReport(
        theta=theta,
        phi=phi,
        alpha0=alpha0,
        dS_X=dS_X,
        dS_Y=dS_Y,
        dS_XY=dS_XY,
        dS_min=d_min,
        dS_max=d_max,
        mean_spin_norm=norm,
    )
    if report.uncertainty_product < 1.0 - 1e-6:
        warnings.warn(
            f"normalized variance product {report.uncertainty_product:.6g} < 1",
            UncertaintyWarning,
            stacklevel=2,
        )
    return report


def quadrature_weights(theta: float, phi: float, alpha0: float, kind: str = "pm") -> np.ndarray:
    """Coefficients w such that dS_alpha0 = w . (block basis operators).

    Useful for projecting full covariance or spectrum matrices onto the
    minimal quadrature found by :func:`squeezing_report`.
    """
    direction = np.array([math.cos(alpha0), math.sin(alpha0)])
    return direction @ transverse_rotation(theta, phi) @ _KIND_TO_ROTATION[kind]
