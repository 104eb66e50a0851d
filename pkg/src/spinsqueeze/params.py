"""Parameter sets for the cavity-spin models and the Raman reduction between them.

Two parameter conventions coexist:

* :class:`ThreeLevelParams` describes the full model in physical rates
  (any consistent frequency unit; the optical linewidth ``gamma`` is the
  natural internal choice).
* :class:`EffectiveParams` describes the reduced ground-state spin model
  in dimensionless form: rates in units of the ground-state decay
  ``gamma0``, cavity detuning in units of the cavity linewidth ``kappa``.

:func:`reduce` maps the first onto the second when the one-photon
detunings dominate every other optical frequency scale.  The internal
unit scheme (``gamma0 = 1`` for the reduced model) is materialized by
:func:`internal_units`; the cavity round-trip time ``tau`` is carried
explicitly and cancels from every normalized output.
"""

import math
from dataclasses import dataclass, replace

import numpy as np


class ParameterError(ValueError):
    """Inconsistent or unphysical parameter set."""


class ReductionInvalidError(ParameterError):
    """One-photon detunings too small for the Raman reduction."""


class ConfigError(ValueError):
    """Malformed or ambiguous run configuration."""


@dataclass(frozen=True)
class SqueezedVacuum:
    """Broadband squeezed-vacuum input, ``r = 0`` is ordinary vacuum.

    ``theta`` sets which input quadrature is squeezed; with ``theta = 0``
    the minimum-variance quadrature spectrum equals ``exp(-2 r)``.
    """

    r: float = 0.0
    theta: float = 0.0

    def correlations(self) -> np.ndarray:
        """2x2 input correlation block in the (a, a†) basis.

        Entry (1,1) is <da da†>, entry (1,2) is <da da>; the cross term
        sinh(r)cosh(r) makes the input a minimum-uncertainty state.
        """
        ch, sh = math.cosh(self.r), math.sinh(self.r)
        c = sh * ch * np.exp(1j * self.theta)
        return np.array([[ch**2, c], [np.conj(c), sh**2]], dtype=complex)


VACUUM = SqueezedVacuum(0.0, 0.0)


@dataclass(frozen=True)
class ThreeLevelParams:
    """Physical parameters of N three-level atoms coupled to one cavity mode.

    Levels 1 and 2 are long-lived ground sublevels, level 3 the optical
    excited state.  A classical pump (Rabi coupling ``Omega1``, detuning
    ``Delta1``) drives 1-3 and the quantized cavity field (coupling ``g``,
    detuning ``Delta2``) drives 2-3.  ``gamma`` is the optical dipole decay
    rate, ``gamma0`` the ground-sublevel (transit) decay rate, ``Lambda1``
    and ``Lambda2`` the incoherent feeding rates of the two sublevels.
    """

    gamma: float
    gamma0: float
    N: float
    g: float
    Omega1: complex
    Delta1: float
    Delta2: float
    Delta_c: float
    kappa: float
    tau: float
    Lambda1: float = 0.0
    Lambda2: float | None = None
    drive: SqueezedVacuum | None = None

    def __post_init__(self):
        for name in ("gamma", "gamma0", "kappa", "tau"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if self.N < 1:
            raise ParameterError("N must be at least 1")
        if self.Lambda2 is None:
            object.__setattr__(self, "Lambda2", self.N * self.gamma0 - self.Lambda1)
        total = self.Lambda1 + self.Lambda2
        if self.Lambda1 < 0 or self.Lambda2 < 0:
            raise ParameterError("pumping rates must be non-negative")
        if not math.isclose(total, self.N * self.gamma0, rel_tol=1e-9, abs_tol=0.0):
            raise ParameterError(
                "Lambda1 + Lambda2 must equal N*gamma0 (fixed atom number), "
                f"got {total} vs {self.N * self.gamma0}"
            )

    @property
    def Delta(self) -> float:
        """Mean one-photon detuning (Delta1 + Delta2)/2."""
        return 0.5 * (self.Delta1 + self.Delta2)

    @property
    def delta(self) -> float:
        """Two-photon (ground-ground) detuning Delta1 - Delta2."""
        return self.Delta1 - self.Delta2

    @property
    def cooperativity(self) -> float:
        """Bare cooperativity g^2 N / (2 kappa tau gamma)."""
        return self.g**2 * self.N / (2.0 * self.kappa * self.tau * self.gamma)


@dataclass(frozen=True)
class EffectiveParams:
    """Dimensionless parameters of the reduced ground-state spin model.

    Rates are measured in units of ``gamma0`` and the cavity detuning in
    units of ``kappa``; ``rho = gamma0/kappa``.  ``lambda1 + lambda2 = 1``
    (fixed atom number).  ``Gamma_p_ratio`` is the residual optical-pumping
    rate over ``gamma0``; zero selects the uncorrected model.
    """

    Ctilde: float
    delta_bar: float
    delta_c: float = 0.0
    rho: float = 1.0 / 2000.0
    lambda1: float = 0.0
    lambda2: float = 1.0
    N: float = 1.0e4
    Gamma_p_ratio: float = 0.0
    drive: SqueezedVacuum | None = None

    def __post_init__(self):
        if self.rho <= 0:
            raise ParameterError("rho must be positive")
        if self.Ctilde < 0:
            raise ParameterError("Ctilde must be non-negative")
        if self.Gamma_p_ratio < 0:
            raise ParameterError("Gamma_p_ratio must be non-negative")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ParameterError("pumping fractions must be non-negative")
        if not math.isclose(self.lambda1 + self.lambda2, 1.0, rel_tol=1e-9):
            raise ParameterError("lambda1 + lambda2 must equal 1")
        if self.N < 1:
            raise ParameterError("N must be at least 1")

    @property
    def kappa(self) -> float:
        """Cavity linewidth in units of gamma0."""
        return 1.0 / self.rho

    def with_drive(self, drive: SqueezedVacuum | None) -> "EffectiveParams":
        return replace(self, drive=drive)


@dataclass(frozen=True)
class Reduction:
    """Result of the large-detuning reduction, with validity diagnostics."""

    effective: EffectiveParams
    g_tilde: complex
    delta_tilde: float
    Gamma_p: float
    gamma_over_Delta: float
    Omega1_over_Delta: float


def reduce(
    p: ThreeLevelParams,
    mean_intensity: float = 0.0,
    min_detuning_factor: float = 10.0,
) -> Reduction:
    """Reduce the three-level model to the effective two-level one.

    ``mean_intensity`` is the operating value of <A2† A2> and feeds the
    probe light shift; the pump light shift |Omega1|^2/Delta is always
    included.  Raises :class:`ReductionInvalidError` unless
    |Delta| > min_detuning_factor * max(gamma, |Omega1|).
    """
    Delta = p.Delta
    floor = min_detuning_factor * max(p.gamma, abs(p.Omega1))
    if abs(Delta) <= floor:
        raise ReductionInvalidError(
            f"|Delta| = {abs(Delta):g} must exceed {floor:g} "
            f"({min_detuning_factor:g} x max(gamma, |Omega1|))"
        )
    g_tilde = p.g * p.Omega1 / Delta
    delta_tilde = p.delta + abs(p.Omega1) ** 2 / Delta - p.g**2 * mean_intensity / Delta
    Gamma_p = p.gamma * abs(p.Omega1 / Delta) ** 2
    Ctilde = (
        abs(g_tilde) ** 2
        / (2.0 * p.kappa * p.tau * p.gamma0)
        * (p.Lambda2 - p.Lambda1)
        / p.gamma0
    )
    eff = EffectiveParams(
        Ctilde=Ctilde,
        delta_bar=delta_tilde / p.gamma0,
        delta_c=p.Delta_c / p.kappa,
        rho=p.gamma0 / p.kappa,
        lambda1=p.Lambda1 / (p.N * p.gamma0),
        lambda2=p.Lambda2 / (p.N * p.gamma0),
        N=p.N,
        Gamma_p_ratio=Gamma_p / p.gamma0,
        drive=p.drive,
    )
    return Reduction(
        effective=eff,
        g_tilde=g_tilde,
        delta_tilde=delta_tilde,
        Gamma_p=Gamma_p,
        gamma_over_Delta=p.gamma / abs(Delta),
        Omega1_over_Delta=abs(p.Omega1 / Delta),
    )


@dataclass(frozen=True)
class TwoLevelUnits:
    """Raw rates of the reduced model in internal units (gamma0 = 1).

    ``g_tilde`` is fixed by the cooperativity for the given ``tau`` and
    atom number; the combination g_tilde/sqrt(tau) is tau-independent, so
    every normalized output is too.
    """

    kappa: float
    Delta_c: float
    g_tilde: float
    tau: float
    N: float
    lambda1: float
    lambda2: float
    Gamma_p: float
    gamma0: float = 1.0

    @property
    def pump_difference(self) -> float:
        """Lambda2 - Lambda1 in internal units."""
        return self.N * self.gamma0 * (self.lambda2 - self.lambda1)


def internal_units(p: EffectiveParams, tau: float = 1.0) -> TwoLevelUnits:
    """Materialize the dimensionless set as concrete rates with gamma0 = 1.

    The quoted cavity detuning follows the operating-point tables: for
    positive ``delta_bar``, negative ``delta_c`` adds to the atomic
    dispersive shift.  The rotating-frame detuning entering the field
    equation is therefore ``Delta_c = -delta_c * kappa``.
    """
    if tau <= 0:
        raise ParameterError("tau must be positive")
    kappa = 1.0 / p.rho
    lam_d = p.lambda2 - p.lambda1
    if p.Ctilde == 0.0:
        g_tilde = 0.0
    else:
        if lam_d <= 0:
            raise ParameterError(
                "Ctilde > 0 requires lambda2 > lambda1 (net pumping asymmetry)"
            )
        g_tilde = math.sqrt(2.0 * kappa * tau * p.Ctilde / (p.N * lam_d))
    return TwoLevelUnits(
        kappa=kappa,
        Delta_c=-p.delta_c * kappa,
        g_tilde=g_tilde,
        tau=tau,
        N=p.N,
        lambda1=p.lambda1,
        lambda2=p.lambda2,
        Gamma_p=p.Gamma_p_ratio,
    )


_EFFECTIVE_KEYS = {
    "ctilde": "Ctilde",
    "delta_tilde": "delta_bar",
    "delta_bar": "delta_bar",
    "delta_c": "delta_c",
    "rho": "rho",
    "lambda1": "lambda1",
    "lambda2": "lambda2",
    "n": "N",
    "gamma_p_ratio": "Gamma_p_ratio",
}

_PHYSICAL_KEYS = {
    "gamma": "gamma",
    "gamma0": "gamma0",
    "n": "N",
    "g": "g",
    "omega1": "Omega1",
    "delta1": "Delta1",
    "delta2": "Delta2",
    "delta_c": "Delta_c",
    "kappa": "kappa",
    "tau": "tau",
    "lambda1": "Lambda1",
    "lambda2": "Lambda2",
}


def _coerce(mapping, keymap, cls_name):
    out = {}
    for key, raw in mapping.items():
        k = key.strip().lower().replace("-", "_")
        if k not in keymap:
            raise ConfigError(f"unknown {cls_name} parameter {key!r}")
        try:
            out[keymap[k]] = float(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cannot parse {key} = {raw!r}") from exc
    return out


def effective_from_mapping(mapping, drive: SqueezedVacuum | None = None) -> EffectiveParams:
    """Build :class:`EffectiveParams` from a flat key/value mapping."""
    kw = _coerce(mapping, _EFFECTIVE_KEYS, "dimensionless")
    if "lambda1" in kw and "lambda2" not in kw:
        kw["lambda2"] = 1.0 - kw["lambda1"]
    try:
        return EffectiveParams(drive=drive, **kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def three_level_from_mapping(mapping, drive: SqueezedVacuum | None = None) -> ThreeLevelParams:
    """Build :class:`ThreeLevelParams` from a flat key/value mapping."""
    kw = _coerce(mapping, _PHYSICAL_KEYS, "physical")
    try:
        return ThreeLevelParams(drive=drive, **kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def resolve_parameters(
    physical=None,
    dimensionless=None,
    drive: SqueezedVacuum | None = None,
    mean_intensity: float = 0.0,
):
    """Resolve a config that may name physical or dimensionless parameters.

    Returns (EffectiveParams, ThreeLevelParams | None).  Supplying both
    blocks is accepted only when they agree after reduction (relative
    1e-6); anything else is a hard :class:`ConfigError`.
    """
    if physical is None and dimensionless is None:
        raise ConfigError("no parameters given (need physical or dimensionless block)")
    three = three_level_from_mapping(physical, drive) if physical else None
    eff = effective_from_mapping(dimensionless, drive) if dimensionless else None
    if three is not None:
        reduced = reduce(three, mean_intensity=mean_intensity).effective
        if eff is not None:
            for name in ("Ctilde", "delta_bar", "delta_c", "rho", "lambda1", "lambda2"):
                a, b = getattr(eff, name), getattr(reduced, name)
                if not math.isclose(a, b, rel_tol=1e-6, abs_tol=1e-12):
                    raise ConfigError(
                        f"physical and dimensionless blocks disagree on {name}: "
                        f"{b:g} (reduced) vs {a:g}"
                    )
        eff = eff or reduced
    return eff, three
