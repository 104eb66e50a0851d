import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from spinsqueeze import efftwo, noise, spinframe
from spinsqueeze.params import EffectiveParams, ParameterError, SqueezedVacuum, internal_units

TABLE_POINT = EffectiveParams(Ctilde=100.0, delta_bar=10.0, delta_c=0.0, rho=1.0 / 2000.0, N=1e4)


def mean_equation_rhs(x, delta_bar, beta2, lam_d=1.0, geff=1.0, drive=0.0):
    """Stationarity of the per-atom mean equations (independent oracle)."""
    sp = x[0] + 1j * x[1]
    sz = x[2]
    f_sp = -(geff - 1j * delta_bar) * sp + 2j * beta2 * sz + drive
    f_sz = -geff * sz + 0.5 * (lam_d + (geff - 1.0)) - 2.0 * beta2 * (sp.imag)
    return [f_sp.real, f_sp.imag, f_sz]


def test_steady_state_against_numerical_oracle():
    I2 = 25.2
    sol = fsolve(lambda x: mean_equation_rhs(x, 10.0, math.sqrt(I2)), [0.0, 0.1, 0.4], xtol=1e-14)
    ss = efftwo.steady_state(TABLE_POINT, I2)
    assert ss.s_plus.real == pytest.approx(sol[0], abs=1e-10)
    assert ss.s_plus.imag == pytest.approx(sol[1], abs=1e-10)
    assert ss.s_z == pytest.approx(sol[2], abs=1e-10)
    assert abs(ss.s_plus) == pytest.approx(0.2499998772199553, rel=1e-12)


def test_steady_state_is_stationary():
    for I2 in (0.0, 1.3, 25.2, 80.0):
        ss = efftwo.steady_state(TABLE_POINT, I2)
        res = mean_equation_rhs([ss.s_plus.real, ss.s_plus.imag, ss.s_z], 10.0, ss.beta2)
        assert np.max(np.abs(res)) <= 1e-14


def test_steady_state_no_field():
    ss = efftwo.steady_state(TABLE_POINT, 0.0)
    assert ss.s_plus == 0.0
    assert ss.s_z == pytest.approx(0.5)


def test_max_coherence_point():
    # |<S+>|/N peaks at 1/4 when 4 I2 = 1 + delta_bar^2
    p = EffectiveParams(Ctilde=100.0, delta_bar=0.0)
    ss = efftwo.steady_state(p, 0.25)
    assert abs(ss.s_plus) == pytest.approx(0.25, rel=1e-12)
    assert ss.s_z == pytest.approx(0.25, rel=1e-12)
    rng = np.random.default_rng(11)
    for I2 in rng.uniform(0.0, 50.0, size=25):
        assert abs(efftwo.steady_state(p, float(I2)).s_plus) <= 0.25 + 1e-12


def test_degenerate_spin_error():
    p = EffectiveParams(Ctilde=0.0, delta_bar=0.0, lambda1=0.5, lambda2=0.5)
    with pytest.raises(efftwo.DegenerateSpinError):
        efftwo.steady_state(p, 1.0)


def test_corrected_reduces_to_plain():
    p = EffectiveParams(Ctilde=100.0, delta_bar=7.0, delta_c=0.1)
    a = efftwo.steady_state(p, 12.0)
    b = efftwo.corrected_steady_state(p, 12.0, 0.0)
    assert a == b


def test_corrected_max_coherence_condition():
    # with residual pumping the peak coherence moves to
    # 4 I2 = (1 + Gamma_p/gamma0)^2 + delta_bar^2 and stays N/4
    for gp, db in ((1.0, 0.0), (1.0, 8.0), (100.0, 30.0)):
        p = EffectiveParams(Ctilde=100.0, delta_bar=db, Gamma_p_ratio=gp)
        I2 = 0.25 * ((1.0 + gp) ** 2 + db**2)
        ss = efftwo.corrected_steady_state(p, I2)
        assert abs(ss.s_plus) == pytest.approx(0.25, rel=1e-12)


def test_corrected_probe_drive_lifts_coherence():
    p = EffectiveParams(Ctilde=1e4, delta_bar=0.0, rho=5e-6, Gamma_p_ratio=100.0)
    I2 = 0.25 * 101.0**2
    plain = efftwo.corrected_steady_state(p, I2, 0.0)
    driven = efftwo.corrected_steady_state(p, I2, 0.01)
    assert abs(plain.s_plus) == pytest.approx(0.25, rel=1e-12)
    assert abs(driven.s_plus) > 0.25
    assert abs(driven.s_plus) == pytest.approx(0.2501959823916857, rel=1e-9)


def test_input_intensity_empty_cavity():
    p0 = EffectiveParams(Ctilde=0.0, delta_bar=0.0, delta_c=0.0)
    assert efftwo.input_intensity(p0, 3.0) == pytest.approx(3.0)
    p1 = EffectiveParams(Ctilde=0.0, delta_bar=0.0, delta_c=1.0)
    assert efftwo.input_intensity(p1, 3.0) == pytest.approx(6.0)


def test_input_intensity_table_point():
    assert efftwo.input_intensity(TABLE_POINT, 25.2) == pytest.approx(2575.14799, rel=1e-8)


def test_turning_points_frozen_values():
    tp = efftwo.turning_points(TABLE_POINT)
    assert tp == pytest.approx([26.30837949, 446.9480187], rel=1e-8)
    tp0 = efftwo.turning_points(EffectiveParams(Ctilde=100.0, delta_bar=0.0))
    assert tp0 == pytest.approx([0.25510257, 49.24489743], rel=1e-8)
    assert efftwo.turning_points(EffectiveParams(Ctilde=0.0, delta_bar=10.0)).size == 0


def test_turning_points_match_numerical_derivative():
    # oracle: finite-difference stationarity of the drive curve
    for tp in efftwo.turning_points(TABLE_POINT):
        h = 1e-6 * tp
        slope = (
            efftwo.input_intensity(TABLE_POINT, tp + h)
            - efftwo.input_intensity(TABLE_POINT, tp - h)
        ) / (2 * h)
        assert abs(slope) <= 1e-4


def test_branch_tags():
    assert efftwo.steady_state(TABLE_POINT, 25.2).branch == "lower"
    assert efftwo.steady_state(TABLE_POINT, 100.0).branch == "middle"
    assert efftwo.steady_state(TABLE_POINT, 500.0).branch == "upper"
    assert efftwo.steady_state(EffectiveParams(Ctilde=0.0, delta_bar=0.0), 1.0).branch == "single"


def test_drift_entries_and_adjoint_structure():
    ss = efftwo.steady_state(TABLE_POINT, 25.2)
    tau = 1.7
    B = efftwo.drift_matrix_5(TABLE_POINT, ss, tau=tau)
    u = internal_units(TABLE_POINT, tau)
    assert B[0, 2] == pytest.approx(-1j * u.g_tilde / tau)
    assert B[0, 0] == pytest.approx(u.kappa + 1j * u.Delta_c)
    assert B[2, 2] == pytest.approx(1.0 - 1j * 10.0)
    # adjoint rows mirror the primaries under the pairing map
    pair = efftwo.ADJOINT5
    for i in range(5):
        for j in range(5):
            assert B[pair[i], pair[j]] == pytest.approx(np.conj(B[i, j]), abs=1e-12)


def test_transfer_point_decouples_inversion():
    p = EffectiveParams(Ctilde=100.0, delta_bar=0.0, delta_c=0.0, rho=1.0 / 2000.0)
    ss = efftwo.steady_state(p, 0.0)
    B = efftwo.drift_matrix_5(p, ss)
    assert np.allclose(B[4, :4], 0.0)
    assert np.allclose(B[:4, 4], 0.0)


def test_drift_first_order_consistency():
    # re-solving at I2 + h moves the steady state along a direction that
    # the atomic rows of B annihilate (only the drive row balances it)
    p, I2 = TABLE_POINT, 25.2
    h = I2 * 1e-6
    u = internal_units(p, 1.0)

    def collective(ss):
        alpha = ss.beta2 / u.g_tilde
        return np.array(
            [alpha, np.conj(alpha), p.N * ss.s_plus, p.N * ss.s_minus, p.N * ss.s_z]
        )

    dxi = (collective(efftwo.steady_state(p, I2 + h)) - collective(efftwo.steady_state(p, I2 - h))) / (2 * h)
    B = efftwo.drift_matrix_5(p, efftwo.steady_state(p, I2))
    atomic = (B @ dxi)[2:]
    scale = np.max(np.abs(B)) * np.max(np.abs(dxi))
    assert np.max(np.abs(atomic)) <= 1e-5 * scale


def test_field_diffusion_block():
    p = TABLE_POINT
    vac = efftwo.diffusion_field(p, SqueezedVacuum(), tau=2.0)
    assert np.allclose(vac, (2.0 * 2000.0 / 2.0) * np.diag([1.0, 0.0]))
    d = efftwo.diffusion_field(p, SqueezedVacuum(r=0.5), tau=1.0)
    assert abs(d[0, 1]) / (2.0 * 2000.0) == pytest.approx(0.5 * math.sinh(1.0), rel=1e-12)
    assert abs(d[0, 1]) / (2.0 * 2000.0) == pytest.approx(0.587600597, abs=1e-9)


def test_input_minimum_quadrature():
    # quadrature-angle scan of the input correlations (independent oracle)
    for r in (0.0, 0.3, 1.1):
        vin = SqueezedVacuum(r=r, theta=0.6).correlations()
        angles = np.linspace(0, np.pi, 721)
        spectra = [
            float(
                np.real(
                    np.array([np.exp(-1j * a), np.exp(1j * a)])
                    @ vin
                    @ np.array([np.exp(1j * a), np.exp(-1j * a)])
                )
            )
            for a in angles
        ]
        assert min(spectra) == pytest.approx(math.exp(-2 * r), abs=2e-5)
        assert max(spectra) == pytest.approx(math.exp(2 * r), rel=2e-5)


def test_atomic_diffusion_reference_states():
    # fully pumped, no field: only the <F+ F+†> channel is open
    d = efftwo.atomic_diffusion_single(0.0, 1.0, 0.0, 0.0, 0.5)
    assert np.allclose(d, np.diag([2.0, 0.0, 0.0]))
    # balanced pumping, unpolarized
    d = efftwo.atomic_diffusion_single(0.5, 0.5, 0.0, 0.0, 0.0)
    assert np.allclose(d, np.diag([1.0, 1.0, 0.5]))


def test_atomic_diffusion_hermitian():
    ss = efftwo.steady_state(TABLE_POINT, 25.2)
    d = efftwo.diffusion_atomic(TABLE_POINT, ss)
    assert np.allclose(d, d.conj().T)


ADJOINT_ORDERED_DAT = None


def adjoint_ordered_dat(l1, l2, sp, sm, sz):
    """Literal closed form in the <F† F> (adjoint-ordered) layout.

    Swapping the raising/lowering slots maps it onto the <F F†>-ordered
    matrix used throughout the package.
    """
    lam = l1 - l2
    return np.array(
        [
            [1 + lam / 2 - sz, 0, (1 + lam) * sm / 2],
            [0, 1 - lam / 2 + sz, (-1 + lam) * sp / 2],
            [(1 + lam) * sp / 2, (-1 + lam) * sm / 2, 0.5 + lam * sz],
        ],
        dtype=complex,
    )


def test_einstein_machinery_reproduces_closed_form():
    rng = np.random.default_rng(7)
    swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float)
    for _ in range(6):
        l1 = float(rng.uniform(0.0, 0.45))
        p = EffectiveParams(
            Ctilde=float(rng.uniform(1.0, 200.0)),
            delta_bar=float(rng.uniform(-15.0, 15.0)),
            delta_c=float(rng.uniform(-1.0, 1.0)),
            rho=1.0 / 2000.0,
            lambda1=l1,
            lambda2=1.0 - l1,
            N=1e4,
        )
        ss = efftwo.steady_state(p, float(rng.uniform(0.0, 5.0)))
        closed = efftwo.diffusion_atomic(p, ss)
        machinery = efftwo.diffusion_atomic_einstein(p, ss)
        scale = np.max(np.abs(closed))
        assert np.max(np.abs(closed - machinery)) <= 1e-12 * scale
        printed = p.N * adjoint_ordered_dat(p.lambda1, p.lambda2, ss.s_plus, ss.s_minus, ss.s_z)
        assert np.max(np.abs(swap @ printed @ swap - machinery)) <= 1e-12 * scale


def test_adiabatic_drift_broadening():
    p = TABLE_POINT
    ss = efftwo.steady_state(p, 25.2)
    B3, gamma_prime = efftwo.adiabatic_drift(p, ss)
    assert gamma_prime == pytest.approx(1.0 + 4.0 * 100.0 * ss.s_z, rel=1e-12)
    assert gamma_prime == pytest.approx(101.1, abs=0.1)
    assert B3[0, 0].real == pytest.approx(gamma_prime)


def test_adiabatic_zero_cooperativity_structure():
    p = EffectiveParams(Ctilde=0.0, delta_bar=10.0, rho=1e-4)
    ss = efftwo.steady_state(p, 4.0)
    with pytest.warns(noise.RegimeWarning):
        B3, _ = efftwo.adiabatic_drift(p, ss)
    b2 = ss.beta2
    expected = np.array(
        [
            [1.0 - 10.0j, 0, -2j * b2],
            [0, 1.0 + 10.0j, 2j * b2],
            [-1j * b2, 1j * b2, 1.0],
        ]
    )
    assert np.allclose(B3, expected)
    D3 = efftwo.adiabatic_diffusion(p, ss)
    assert np.allclose(
        D3, p.N * efftwo.atomic_diffusion_single(0.0, 1.0, ss.s_plus, ss.s_minus, ss.s_z)
    )


def test_adiabatic_no_field_decouples():
    p = EffectiveParams(Ctilde=50.0, delta_bar=3.0, rho=1e-4)
    ss = efftwo.steady_state(p, 0.0)
    B3, _ = efftwo.adiabatic_drift(p, ss, warn=False)
    assert B3[0, 2] == 0 and B3[1, 2] == 0
    assert B3[2, 0] == 0 and B3[2, 1] == 0


def test_adiabatic_field_noise_strength():
    # at the optimal point the cavity-fed noise entry is Ctilde * N
    # (four times the naive reading of the printed matrix; see ledger)
    p = EffectiveParams(Ctilde=100.0, delta_bar=10.0, rho=1.0 / 2000.0, N=1e4)
    ss = efftwo.steady_state(p, 0.25 * 101.0)
    assert ss.s_z == pytest.approx(0.25, rel=1e-12)
    D3 = efftwo.adiabatic_diffusion(p, ss)
    base = p.N * efftwo.atomic_diffusion_single(0.0, 1.0, ss.s_plus, ss.s_minus, ss.s_z)
    fed = D3 - base
    assert fed[0, 0].real == pytest.approx(100.0 * p.N, rel=1e-12)
    assert fed[1, 1] == pytest.approx(0.0, abs=1e-9)
    # field part dominates the bare atomic noise at large cooperativity
    assert np.linalg.norm(fed) / np.linalg.norm(base) > 10.0


def test_adiabatic_transfer_formula_exact():
    # transfer point: the 3x3 bad-cavity model reproduces the closed form
    # in the rho -> 0 limit, pinning the cavity-fed noise normalization
    r = 0.8
    C = 50.0
    p = EffectiveParams(Ctilde=C, delta_bar=0.0, rho=1e-7, N=1e4)
    ss = efftwo.steady_state(p, 0.0)
    system = efftwo.adiabatic_system(p, ss, drive=SqueezedVacuum(r=r), warn=False)
    cov = noise.solve_lyapunov(system)
    report = spinframe.squeezing_report(cov.matrix, ss.mean_spin(p.N), kind="pm")
    expected = 1.0 - 2.0 * C * (1.0 - math.exp(-2 * r)) / (1.0 + 2.0 * C)
    assert report.dS_min == pytest.approx(expected, rel=1e-12)


def test_analytic_min_variance_limits():
    assert efftwo.analytic_min_variance(1e4) == pytest.approx(1 / math.sqrt(2), rel=2e-2)
    assert efftwo.analytic_min_variance(1e5) == pytest.approx(1 / math.sqrt(2), rel=5e-3)
    assert 0.70 <= efftwo.analytic_min_variance(100.0) <= 0.73
    # with no cavity back-action the driven mixed ensemble sits at
    # 1/(2 |<sigma>|); see ledger for the coherent-state special case
    ss = efftwo.steady_state(EffectiveParams(Ctilde=100.0, delta_bar=10.0), 0.25 * 101.0)
    sigma = math.sqrt(abs(ss.s_plus) ** 2 + ss.s_z**2)
    assert efftwo.analytic_min_variance(0.0) == pytest.approx(1.0 / (2 * sigma), rel=1e-9)


def test_adiabatic_matches_full_model():
    from spinsqueeze import studies

    p = EffectiveParams(Ctilde=100.0, delta_bar=10.0, delta_c=0.0, rho=1.0 / 2000.0, N=1e4)
    full = studies.variance_at_point(p, 25.2).dS_min
    adia = efftwo.analytic_min_variance(100.0, delta_bar=10.0)
    assert abs(full - adia) <= 0.01 * full
