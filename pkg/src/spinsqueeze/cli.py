"""Command-line front end: config ingestion, study dispatch, file output.

Every run writes a results CSV, a manifest (parameters, tolerances, tool
version, content hash) and, for curve- or spectrum-producing studies,
plot-ready column files plus a rendered PNG figure.  Identical
configurations produce byte-identical CSV output.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import configparser
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, efftwo, lambda3, noise, plotting, reporting, spinframe, studies
from .params import (
    ConfigError,
    EffectiveParams,
    ParameterError,
    SqueezedVacuum,
    resolve_parameters,
    three_level_from_mapping,
)

MODELS = ("effective", "corrected", "adiabatic", "three-level")
STUDIES = (
    "steady",
    "bistability",
    "variance",
    "spectrum",
    "decompose",
    "optimize",
    "transfer",
    "validate",
)
TARGETS = ("table1", "table2", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8")

NUMERICAL_ERRORS = (
    noise.FluctuationError,
    lambda3.NoConvergenceError,
    lambda3.UnphysicalBranchError,
    studies.NoStablePointError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsqueeze",
        description="Cavity-spin steady states, fluctuation spectra and squeezing studies.",
    )
    parser.add_argument("--version", action="version", version=f"spinsqueeze {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one study at one configuration")
    run.add_argument("--config", type=Path, help="INI config file (see README)")
    run.add_argument("--model", choices=MODELS, default="effective")
    run.add_argument("--study", choices=STUDIES, required=False)
    run.add_argument("--Ctilde", type=float)
    run.add_argument("--delta-tilde", dest="delta_tilde", type=float)
    run.add_argument("--delta-c", dest="delta_c", type=float)
    run.add_argument("--I2", type=float)
    run.add_argument("--rho", type=float)
    run.add_argument("--lambda1", type=float)
    run.add_argument("--N", type=float)
    run.add_argument("--Gamma-p-ratio", dest="Gamma_p_ratio", type=float)
    run.add_argument("--omega-ratio", dest="omega_ratio", type=float, default=0.0)
    run.add_argument("--r", type=float, default=0.0, help="input squeezing parameter")
    run.add_argument("--theta", type=float, default=0.0, help="input squeezing phase")
    run.add_argument("--tau", type=float, default=1.0)
    run.add_argument("--omega-max", dest="omega_max", type=float, default=500.0)
    run.add_argument("--n-omega", dest="n_omega", type=int, default=1001)
    run.add_argument("--C-range", dest="C_range", nargs=3, type=float, metavar=("LO", "HI", "N"))
    run.add_argument(
        "--delta-grid", dest="delta_grid", nargs=3, type=float, metavar=("LO", "HI", "N")
    )
    run.add_argument("--regime", choices=("open", "closed"), default="open")
    run.add_argument("--out", type=Path, default=None)
    run.add_argument("--strict", action="store_true", help="escalate regime warnings to errors")

    rep = sub.add_parser("reproduce", help="rerun a bundled benchmark study recipe")
    rep.add_argument("target", choices=TARGETS)
    rep.add_argument("--out", type=Path, default=None)
    rep.add_argument("--points", type=int, default=None, help="grid points for curve targets")
    rep.add_argument("--strict", action="store_true")
    return parser


def _out_root() -> Path:
    return Path(os.environ.get("SPINSQUEEZE_OUT", "out"))


def _read_config(path: Path):
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path}")
    return {name: dict(cp[name]) for name in cp.sections()}


def _effective_params(args, sections) -> EffectiveParams:
    """Merge config-file parameters with flag overrides (flags win)."""
    drive = SqueezedVacuum(r=args.r, theta=args.theta)
    if "drive" in sections:
        d = sections["drive"]
        drive = SqueezedVacuum(r=float(d.get("r", args.r)), theta=float(d.get("theta", args.theta)))
    physical = sections.get("physical")
    dimensionless = dict(sections.get("dimensionless", {}))
    flag_map = {
        "Ctilde": args.Ctilde,
        "delta_tilde": args.delta_tilde,
        "delta_c": args.delta_c,
        "rho": args.rho,
        "lambda1": args.lambda1,
        "N": args.N,
        "Gamma_p_ratio": args.Gamma_p_ratio,
    }
    for key, val in flag_map.items():
        if val is not None:
            dimensionless[key] = val
    if "lambda1" in dimensionless and "lambda2" not in dimensionless:
        dimensionless["lambda2"] = 1.0 - float(dimensionless["lambda1"])
    if not dimensionless:
        dimensionless = None
    eff, _three = resolve_parameters(physical, dimensionless, drive=drive)
    return eff


def _three_level_params(args, sections):
    if "physical" not in sections:
        raise ConfigError("the three-level model needs a [physical] config section")
    drive = SqueezedVacuum(r=args.r, theta=args.theta)
    return three_level_from_mapping(sections["physical"], drive=drive)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError("missing required parameters: " + ", ".join(missing))


def _report_row(report: spinframe.SqueezingReport) -> dict:
    return {
        "dS_min": report.dS_min,
        "dS_max": report.dS_max,
        "alpha0": report.alpha0,
        "theta": report.theta,
        "phi": report.phi,
        "mean_spin_norm": report.mean_spin_norm,
    }


def _study_steady(args, sections, out, manifest):
    if args.model == "three-level":
        p3 = _three_level_params(args, sections)
        _require(args, "I2")
        ss = lambda3.steady_state_at_intensity(p3, args.I2)
        rows = [
            {
                "I2": args.I2,
                "A2_re": ss.A2.real,
                "A2_im": ss.A2.imag,
                "P1_re": ss.P1.real,
                "P1_im": ss.P1.imag,
                "P2_re": ss.P2.real,
                "P2_im": ss.P2.imag,
                "Pr_re": ss.Pr.real,
                "Pr_im": ss.Pr.imag,
                "Pi1": ss.Pi1,
                "Pi2": ss.Pi2,
                "Pi3": ss.Pi3,
                "residual": ss.residual,
                "branch": ss.branch,
            }
        ]
    else:
        p = _effective_params(args, sections)
        _require(args, "I2")
        ss = efftwo.corrected_steady_state(p, args.I2, args.omega_ratio)
        rows = [
            {
                "I2": ss.I2,
                "s_plus_re": ss.s_plus.real,
                "s_plus_im": ss.s_plus.imag,
                "s_z": ss.s_z,
                "beta2": ss.beta2,
                "branch": ss.branch,
                "I2_in": efftwo.input_intensity(p, ss.I2),
            }
        ]
    return list(rows[0]), rows, None


def _study_bistability(args, sections, out, manifest):
    p = _effective_params(args, sections)
    curve = studies.bistability_curve(p)
    manifest["turning_points"] = list(curve.turning_points)
    rows = [{"I2": a, "I2_in": b} for a, b in zip(curve.I2, curve.I2_in)]

    def extras(digest):
        reporting.write_columns(out / "bistability.dat", {"I2": curve.I2, "I2_in": curve.I2_in}, digest)
        plotting.line_figure(
            out / "bistability.png",
            curve.I2_in,
            {"intracavity": curve.I2},
            xlabel="drive intensity I2_in",
            ylabel="intracavity intensity I2",
            title="bistable response",
        )

    return ["I2", "I2_in"], rows, extras


def _point_result(args, sections):
    drive = SqueezedVacuum(r=args.r, theta=args.theta)
    if args.model == "three-level":
        p3 = _three_level_params(args, sections)
        _require(args, "I2")
        ss = lambda3.steady_state_at_intensity(p3, args.I2)
        system = lambda3.fluctuation_system(p3, ss, drive=drive)
        cov = noise.solve_lyapunov(system)
        report = spinframe.squeezing_report(
            system.spin_block(cov.matrix), system.mean_spin, kind="coherence"
        )
        return system, report
    p = _effective_params(args, sections)
    _require(args, "I2")
    if args.model == "adiabatic":
        ss = efftwo.corrected_steady_state(p, args.I2, args.omega_ratio)
        system = efftwo.adiabatic_system(p, ss, drive=drive)
        cov = noise.solve_lyapunov(system)
        report = spinframe.squeezing_report(system.spin_block(cov.matrix), system.mean_spin)
        return system, report
    res = studies.variance_at_point(p, args.I2, tau=args.tau, omega_ratio=args.omega_ratio, drive=drive)
    return res.system, res.report


def _study_variance(args, sections, out, manifest):
    system, report = _point_result(args, sections)
    row = {"model": args.model, **_report_row(report), "stability_margin": noise.stability_margin(system.drift)}
    return list(row), [row], None


def _study_spectrum(args, sections, out, manifest):
    system, report = _point_result(args, sections)
    omega = np.linspace(-args.omega_max, args.omega_max, args.n_omega)
    outgoing = noise.outgoing_spectrum(system, omega)
    band = studies.squeezing_band(omega, outgoing.s_min)
    manifest["band"] = band
    manifest["min_S_out"] = float(outgoing.s_min.min())
    if "gamma_prime" in system.meta:
        manifest["gamma_prime"] = system.meta["gamma_prime"]
    rows = [
        {"omega": w, "S_out_min": a, "S_out_max": b}
        for w, a, b in zip(omega, outgoing.s_min, outgoing.s_max)
    ]

    def extras(digest):
        reporting.write_columns(
            out / "spectrum.dat",
            {"omega": omega, "S_out_min": outgoing.s_min, "S_out_max": outgoing.s_max},
            digest,
        )
        plotting.line_figure(
            out / "spectrum.png",
            omega,
            {"S_out_min": outgoing.s_min, "S_out_max": outgoing.s_max},
            xlabel="frequency (gamma0 units)",
            ylabel="outgoing quadrature spectrum",
            hlines=(1.0,),
            title="outgoing field spectrum",
        )

    return ["omega", "S_out_min", "S_out_max"], rows, extras


def _study_decompose(args, sections, out, manifest):
    p = _effective_params(args, sections)
    omega = np.linspace(-args.omega_max, args.omega_max, args.n_omega)
    budget = studies.noise_budget(
        Ctilde=p.Ctilde,
        delta_bar=p.delta_bar,
        delta_c=p.delta_c,
        I2=args.I2,
        rho=p.rho,
        N=p.N,
        omega=omega,
    )
    row = {
        "dS_min": budget.report.dS_min,
        "dS_field": budget.dS_field,
        "dS_atomic": budget.dS_atomic,
        "field_fraction": budget.field_fraction,
    }

    def extras(digest):
        reporting.write_columns(
            out / "contributions.dat",
            {"omega": budget.omega, **budget.spectra},
            digest,
        )
        plotting.line_figure(
            out / "contributions.png",
            budget.omega,
            budget.spectra,
            xlabel="frequency (gamma0 units)",
            ylabel="spin quadrature noise density",
            title="noise contributions to the minimal spin quadrature",
        )

    return list(row), [row], extras


def _study_optimize(args, sections, out, manifest):
    p = _effective_params(args, sections)
    op = studies.optimize_squeezing(
        p.Ctilde,
        p.delta_bar,
        rho=p.rho,
        lambda1=p.lambda1,
        lambda2=p.lambda2,
        N=p.N,
        Gamma_p_ratio=p.Gamma_p_ratio,
    )
    row = {
        "delta_tilde": op.delta_tilde,
        "delta_c": op.delta_c,
        "I2": op.I2,
        "dS_min": op.dS_min,
        "stability_margin": op.stability_margin,
        "evaluations": op.evaluations,
    }
    return list(row), [row], None


def _study_transfer(args, sections, out, manifest):
    p = _effective_params(args, sections)
    r_values = np.linspace(0.0, 2.0, 21) if args.r == 0.0 else np.array([args.r])
    rows = []
    for r in r_values:
        closed = studies.transfer_variance(p.Ctilde, p.rho, float(r))
        full = studies.transfer_variance_full(p.Ctilde, p.rho, float(r), theta=args.theta, N=p.N)
        rows.append(
            {
                "r": float(r),
                "R_in": 1.0 - math.exp(-2.0 * r),
                "dS_min_closed_form": closed,
                "dS_min_full": full,
            }
        )
    manifest["eta"] = studies.transfer_efficiency(p.Ctilde, p.rho)

    def extras(digest):
        if len(rows) > 1:
            x = [row["R_in"] for row in rows]
            plotting.line_figure(
                out / "transfer.png",
                x,
                {
                    "closed form": [row["dS_min_closed_form"] for row in rows],
                    "full solve": [row["dS_min_full"] for row in rows],
                },
                xlabel="input squeezing R_in",
                ylabel="minimal spin variance",
                title=f"squeezing transfer, Ctilde={p.Ctilde:g}, rho={p.rho:g}",
            )

    return ["r", "R_in", "dS_min_closed_form", "dS_min_full"], rows, extras


def _study_validate(args, sections, out, manifest):
    grid = None
    if args.delta_grid:
        lo, hi, n = args.delta_grid
        grid = np.linspace(lo, hi, int(n))
    result = studies.validate_models(args.regime, delta_tilde_grid=grid)
    manifest["max_discrepancy"] = result.max_discrepancy
    manifest["Gamma_p_ratio"] = result.Gamma_p_ratio
    rows = [
        {
            "delta_tilde": r.delta_tilde,
            "delta_c": r.delta_c,
            "I2": r.I2,
            "dS_min_two_level": r.dS_min_two,
            "dS_min_three_level": r.dS_min_three,
            "discrepancy": r.discrepancy,
        }
        for r in result.rows
    ]

    def extras(digest):
        x = [r.delta_tilde for r in result.rows]
        plotting.line_figure(
            out / "validate.png",
            x,
            {
                "reduced model": [r.dS_min_two for r in result.rows],
                "three-level model": [r.dS_min_three for r in result.rows],
            },
            xlabel="two-photon detuning (gamma0 units)",
            ylabel="minimal spin variance",
            hlines=(1.0 / math.sqrt(2.0),),
            title=f"model validation, {result.regime} regime",
        )

    fields = ["delta_tilde", "delta_c", "I2", "dS_min_two_level", "dS_min_three_level", "discrepancy"]
    return fields, rows, extras


_STUDY_HANDLERS = {
    "steady": _study_steady,
    "bistability": _study_bistability,
    "variance": _study_variance,
    "spectrum": _study_spectrum,
    "decompose": _study_decompose,
    "optimize": _study_optimize,
    "transfer": _study_transfer,
    "validate": _study_validate,
}


def _run(args) -> int:
    sections = _read_config(args.config) if args.config else {}
    study = args.study or sections.get("study", {}).get("name")
    if study not in STUDIES:
        raise ConfigError(f"study must be one of {STUDIES}, got {study!r}")
    out = args.out or (_out_root() / study)
    out = Path(out)
    manifest = {
        "command": "run",
        "study": study,
        "model": args.model,
        "options": {
            k: getattr(args, k)
            for k in (
                "Ctilde",
                "delta_tilde",
                "delta_c",
                "I2",
                "rho",
                "lambda1",
                "N",
                "Gamma_p_ratio",
                "omega_ratio",
                "r",
                "theta",
                "tau",
                "omega_max",
                "n_omega",
                "regime",
            )
            if getattr(args, k) is not None
        },
        "config_sections": sections,
        "tolerances": {"lyapunov_residual": noise.RESIDUAL_TOL},
    }
    fields, rows, extras = _STUDY_HANDLERS[study](args, sections, out, manifest)
    digest = reporting.write_manifest(out, manifest)
    reporting.write_csv(out / "results.csv", fields, rows, digest, title=f"study={study}")
    if extras:
        extras(digest)
    print(f"wrote {out}/results.csv (manifest {digest})")
    return 0


def _reproduce(args) -> int:
    target = args.target
    out = Path(args.out or (_out_root() / target))
    manifest = {"command": "reproduce", "target": target}
    npts = args.points

    if target == "table1":
        rows = []
        for dt in (0.0, 5.0, 10.0, 15.0, 20.0):
            op = studies.optimize_squeezing(100.0, dt)
            rows.append(
                {
                    "delta_tilde": dt,
                    "delta_c": op.delta_c,
                    "I2": op.I2,
                    "dS_min": op.dS_min,
                    "stability_margin": op.stability_margin,
                }
            )
        manifest["parameters"] = {"Ctilde": 100.0, "rho": 1.0 / 2000.0}
        digest = reporting.write_manifest(out, manifest)
        reporting.write_csv(
            out / "results.csv",
            ["delta_tilde", "delta_c", "I2", "dS_min", "stability_margin"],
            rows,
            digest,
            title="optimal self-squeezing points, Ctilde=100",
        )

    elif target == "table2":
        budget = studies.noise_budget()
        manifest["parameters"] = {
            "Ctilde": 100.0,
            "delta_bar": 12.0,
            "delta_c": -0.2,
            "rho": 1.0 / 2000.0,
            "I2": "just below the lower fold",
        }
        digest = reporting.write_manifest(out, manifest)
        reporting.write_csv(
            out / "results.csv",
            ["dS_min", "dS_field", "dS_atomic", "field_fraction"],
            [
                {
                    "dS_min": budget.report.dS_min,
                    "dS_field": budget.dS_field,
                    "dS_atomic": budget.dS_atomic,
                    "field_fraction": budget.field_fraction,
                }
            ],
            digest,
            title="noise contributions at the near-fold point",
        )

    elif target == "fig2":
        C_values = np.geomspace(1.0, 1.0e4, npts or 17)
        rows = studies.squeezing_vs_cooperativity(C_values)
        digest = reporting.write_manifest(out, manifest)
        reporting.write_csv(
            out / "results.csv",
            ["Ctilde", "dS_min_full", "dS_min_adiabatic"],
            rows,
            digest,
            title="minimal variance versus cooperativity",
        )
        reporting.write_columns(
            out / "curve.dat",
            {
                "Ctilde": [r[0] for r in rows],
                "dS_min_full": [r[1] for r in rows],
                "dS_min_adiabatic": [r[2] for r in rows],
            },
            digest,
        )
        plotting.line_figure(
            out / "figure.png",
            [r[0] for r in rows],
            {"full model": [r[1] for r in rows], "bad-cavity model": [r[2] for r in rows]},
            xlabel="effective cooperativity",
            ylabel="minimal spin variance",
            xlog=True,
            hlines=(1.0 / math.sqrt(2.0),),
            title="self-squeezing versus cooperativity",
        )

    elif target == "fig3":
        st = studies.outgoing_spectrum_study(n_omega=npts or 2001)
        manifest["gamma_prime"] = st.gamma_prime
        manifest["min_S_out"] = st.minimum
        manifest["band"] = st.band
        digest = reporting.write_manifest(out, manifest)
        rows = [
            {"omega": w, "S_out_min": a, "S_out_max": b}
            for w, a, b in zip(st.omega, st.s_min, st.s_max)
        ]
        reporting.write_csv(
            out / "results.csv", ["omega", "S_out_min", "S_out_max"], rows, digest,
            title="outgoing spectra at the optimal point",
        )
        reporting.write_columns(
            out / "spectrum.dat",
            {"omega": st.omega, "S_out_min": st.s_min, "S_out_max": st.s_max},
            digest,
        )
        plotting.line_figure(
            out / "figure.png",
            st.omega,
            {"S_out_min": st.s_min, "S_out_max": st.s_max},
            xlabel="frequency (gamma0 units)",
            ylabel="outgoing quadrature spectrum",
            hlines=(1.0,),
            title="outgoing field squeezing",
        )

    elif target == "fig4":
        omega = np.linspace(-400.0, 400.0, npts or 801)
        budget = studies.noise_budget(omega=omega)
        manifest["dS_min"] = budget.report.dS_min
        manifest["field_fraction"] = budget.field_fraction
        digest = reporting.write_manifest(out, manifest)
        rows = [
            {"omega": w, "total": t, "field": f, "atomic": a}
            for w, t, f, a in zip(
                budget.omega, budget.spectra["total"], budget.spectra["field"], budget.spectra["atomic"]
            )
        ]
        reporting.write_csv(
            out / "results.csv", ["omega", "total", "field", "atomic"], rows, digest,
            title="noise contributions to the minimal spin quadrature",
        )
        reporting.write_columns(out / "contributions.dat", {"omega": budget.omega, **budget.spectra}, digest)
        plotting.line_figure(
            out / "figure.png",
            budget.omega,
            budget.spectra,
            xlabel="frequency (gamma0 units)",
            ylabel="spin quadrature noise density",
            title="noise budget of the spin variance",
        )

    elif target == "fig5":
        rows = []
        for rho in (1.0 / 2000.0, 0.5):
            for r_in, r, closed, full in studies.transfer_curve_vs_input(rho, n=npts or 34):
                rows.append(
                    {"rho": rho, "R_in": r_in, "r": r, "dS_min_closed_form": closed, "dS_min_full": full}
                )
        digest = reporting.write_manifest(out, manifest)
        reporting.write_csv(
            out / "results.csv",
            ["rho", "R_in", "r", "dS_min_closed_form", "dS_min_full"],
            rows,
            digest,
            title="transferred squeezing versus input squeezing",
        )
        half = len(rows) // 2
        plotting.line_figure(
            out / "figure.png",
            [row["R_in"] for row in rows[:half]],
            {
                "rho=1/2000": [row["dS_min_full"] for row in rows[:half]],
                "rho=1/2": [row["dS_min_full"] for row in rows[half:]],
            },
            xlabel="input squeezing R_in",
            ylabel="minimal spin variance",
            title="squeezing transfer",
        )

    elif target == "fig6":
        C_values = np.geomspace(0.1, 1.0e4, npts or 51)
        rows = []
        for rho in (1.0 / 2000.0, 0.5):
            for C, eta in studies.efficiency_curve_vs_cooperativity(rho, C_values):
                rows.append({"rho": rho, "Ctilde": C, "eta": eta})
        digest = reporting.write_manifest(out, manifest)
        reporting.write_csv(
            out / "results.csv", ["rho", "Ctilde", "eta"], rows, digest,
            title="transfer efficiency versus cooperativity",
        )
        half = len(rows) // 2
        plotting.line_figure(
            out / "figure.png",
            [row["Ctilde"] for row in rows[:half]],
            {
                "rho=1/2000": [row["eta"] for row in rows[:half]],
                "rho=1/2": [row["eta"] for row in rows[half:]],
            },
            xlabel="effective cooperativity",
            ylabel="transfer efficiency",
            xlog=True,
            title="squeezing transfer efficiency",
        )

    elif target in ("fig7", "fig8"):
        regime = "open" if target == "fig7" else "closed"
        result = studies.validate_models(regime)
        manifest["regime"] = regime
        manifest["Gamma_p_ratio"] = result.Gamma_p_ratio
        manifest["max_discrepancy"] = result.max_discrepancy
        digest = reporting.write_manifest(out, manifest)
        rows = [
            {
                "delta_tilde": r.delta_tilde,
                "delta_c": r.delta_c,
                "I2": r.I2,
                "dS_min_two_level": r.dS_min_two,
                "dS_min_three_level": r.dS_min_three,
                "discrepancy": r.discrepancy,
            }
            for r in result.rows
        ]
        reporting.write_csv(
            out / "results.csv",
            ["delta_tilde", "delta_c", "I2", "dS_min_two_level", "dS_min_three_level", "discrepancy"],
            rows,
            digest,
            title=f"model validation, {regime} regime",
        )
        plotting.line_figure(
            out / "figure.png",
            [r.delta_tilde for r in result.rows],
            {
                "reduced model": [r.dS_min_two for r in result.rows],
                "three-level model": [r.dS_min_three for r in result.rows],
            },
            xlabel="two-photon detuning (gamma0 units)",
            ylabel="minimal spin variance",
            hlines=(1.0 / math.sqrt(2.0),),
            title=f"model validation ({regime} regime)",
        )

    print(f"wrote {out}/results.csv")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.strict:
        warnings.simplefilter("error", noise.RegimeWarning)
    try:
        if args.command == "run":
            return _run(args)
        return _reproduce(args)
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except noise.RegimeWarning as exc:  # raised under --strict
        print(f"regime violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
