"""Batch command-line interface.

Every library operation is reachable from a subcommand; artifacts are CSV
and JSON files written into the output directory (flag --out, else the
WIGNERLAB_OUT environment variable, else the working directory).  Exit
codes: 0 success, 1 failed numerical check, 2 usage or file error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .ensemble import (
    Ensemble,
    build_A,
    density_matrix,
    density_matrix_direct,
    feichtinger_closure_check,
    find_partial_isometry,
    mixed_wigner,
    spectral_ensemble,
)
from .grid import (
    CheckError,
    PhaseSpaceGrid,
    SampledState,
    catalog_state,
    make_grid,
    make_self_reciprocal_grid,
    state_norm,
    write_state_csv,
)
from .io import (
    complex_matrix_to_pairs,
    covariance_report_to_dict,
    field_metadata,
    load_ensemble_json,
    marginal_report_to_dict,
    norm_report_to_dict,
    write_field_csv,
    write_json,
    write_marginal_csv,
)
from .modspace import diagnostic_grid_warning, feichtinger_diagnostic, modulation_norm
from .moments import covariance, marginals
from .wigner import apply_metaplectic, cross_wigner, overlap_identity_check, wigner

__all__ = ["RunConfig", "TOL_DEFAULTS", "main"]

TOL_DEFAULTS = {
    "convergent_tail": 1e-3,
    "diverging_growth": 0.5,
    "route_agreement": 1e-3,
    "density_match": 1e-6,
    "factor_residual": 1e-6,
    "field_match": 1e-5,
}


@dataclass
class RunConfig:
    hbar: float = 1.0
    grid_n: int = 1024
    grid_l: float = 12.0
    dim: int = 32
    tolerances: dict = field(default_factory=lambda: dict(TOL_DEFAULTS))
    output_dir: str = "."

    def __post_init__(self) -> None:
        if self.hbar <= 0 or self.grid_l <= 0 or self.dim <= 0:
            raise ValueError("hbar, grid_l, and dim must be positive")
        if self.grid_n < 8 or self.grid_n & (self.grid_n - 1):
            raise ValueError(f"grid_n must be a power of two >= 8, got {self.grid_n}")

    def as_dict(self) -> dict:
        return {
            "hbar": self.hbar,
            "grid_n": self.grid_n,
            "grid_l": self.grid_l,
            "dim": self.dim,
            "tolerances": dict(self.tolerances),
        }

    def grid(self) -> PhaseSpaceGrid:
        return make_grid(self.grid_n, self.grid_l, self.hbar)

    def out(self, name: str) -> str:
        os.makedirs(self.output_dir, exist_ok=True)
        return os.path.join(self.output_dir, name)


def _extract_tol_flags(argv: list[str]) -> tuple[dict, list[str]]:
    overrides: dict = {}
    rest: list[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token.startswith("--tol."):
            name, eq, inline = token[6:].partition("=")
            if name not in TOL_DEFAULTS:
                raise ValueError(
                    f"unknown tolerance {name!r}; known: {', '.join(sorted(TOL_DEFAULTS))}"
                )
            if eq:
                raw = inline
            else:
                i += 1
                if i >= len(argv):
                    raise ValueError(f"--tol.{name} needs a value")
                raw = argv[i]
            overrides[name] = float(raw)
        else:
            rest.append(token)
        i += 1
    return overrides, rest


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hbar", type=float, default=1.0)
    parser.add_argument("--grid-n", type=int, default=1024)
    parser.add_argument("--grid-l", type=float, default=12.0)
    parser.add_argument("--dim", type=int, default=32)
    parser.add_argument("--out", default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wignerlab",
        description="Phase-space analysis of sampled quantum states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner", help="Wigner transform of one state")
    _add_common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--apply", default=None, help="metaplectic descriptor applied first")

    p = sub.add_parser("cross-wigner", help="cross-Wigner transform of two states")
    _add_common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--state2", required=True)

    p = sub.add_parser("marginals", help="marginal densities of an ensemble")
    _add_common(p)
    p.add_argument("--ensemble", default=None)
    p.add_argument("--state", default=None)

    p = sub.add_parser("moments", help="mean and covariance of an ensemble")
    _add_common(p)
    p.add_argument("--ensemble", default=None)
    p.add_argument("--state", default=None)

    p = sub.add_parser("modnorm", help="weighted modulation norm ladder")
    _add_common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--window", default="hermite:0")

    p = sub.add_parser("diagnose", help="integrability verdict for a state")
    _add_common(p)
    p.add_argument("--state", required=True)

    p = sub.add_parser("ensemble-build", help="operator and density matrix of an ensemble")
    _add_common(p)
    p.add_argument("--ensemble", required=True)

    p = sub.add_parser("ensemble-equiv", help="partial isometry between two ensembles")
    _add_common(p)
    p.add_argument("--ensemble", required=True)
    p.add_argument("--ensemble2", required=True)
    p.add_argument("--s", type=float, default=0.0)

    p = sub.add_parser("ensemble-spectral", help="eigen-ensemble of a density matrix")
    _add_common(p)
    p.add_argument("--ensemble", required=True)

    p = sub.add_parser("reproduce", help="run a pinned verification scenario")
    _add_common(p)
    p.add_argument("scenario", choices=["prop1", "prop2", "prop3", "cor5"])

    return parser


def _config_from(ns: argparse.Namespace, overrides: dict) -> RunConfig:
    tols = dict(TOL_DEFAULTS)
    tols.update(overrides)
    out = ns.out or os.environ.get("WIGNERLAB_OUT") or "."
    return RunConfig(
        hbar=ns.hbar,
        grid_n=ns.grid_n,
        grid_l=ns.grid_l,
        dim=ns.dim,
        tolerances=tols,
        output_dir=out,
    )


def _ensemble_from(ns: argparse.Namespace, cfg: RunConfig) -> Ensemble:
    grid = cfg.grid()
    if getattr(ns, "ensemble", None):
        return load_ensemble_json(ns.ensemble, grid.x_grid, cfg.hbar)
    if getattr(ns, "state", None):
        state = catalog_state(ns.state, grid.x_grid, cfg.hbar)
        return Ensemble(((state, 1.0),), ns.state)
    raise ValueError("need --ensemble FILE or --state DESCRIPTOR")


def cmd_wigner(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    state = catalog_state(ns.state, grid.x_grid, cfg.hbar)
    if ns.apply:
        state = apply_metaplectic(state, ns.apply)
    result = wigner(state, grid)
    write_field_csv(cfg.out("wigner_field.csv"), result.field)
    meta = field_metadata(result.field)
    meta.update(
        {
            "config": cfg.as_dict(),
            "source": state.label,
            "max_abs": float(np.abs(result.field.values).max()),
        }
    )
    write_json(cfg.out("wigner_field.json"), meta)
    print(f"wrote wigner_field.csv and wigner_field.json to {cfg.output_dir}")
    return 0


def cmd_cross_wigner(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    psi = catalog_state(ns.state, grid.x_grid, cfg.hbar)
    phi = catalog_state(ns.state2, grid.x_grid, cfg.hbar)
    result = cross_wigner(psi, phi, grid)
    write_field_csv(cfg.out("cross_wigner_field.csv"), result.field)
    meta = field_metadata(result.field)
    meta.update(
        {
            "config": cfg.as_dict(),
            "sources": list(result.source_labels),
            "overlap_residual": overlap_identity_check(psi, phi, grid),
        }
    )
    write_json(cfg.out("cross_wigner_field.json"), meta)
    print(f"wrote cross_wigner_field.csv and cross_wigner_field.json to {cfg.output_dir}")
    return 0


def cmd_marginals(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    ens = _ensemble_from(ns, cfg)
    rho = mixed_wigner(ens, grid)
    report = marginals(rho, ens)
    doc = {
        "config": cfg.as_dict(),
        "ensemble": ens.label,
        "members": [st.label for st, _ in ens.members],
        "report": marginal_report_to_dict(report),
    }
    write_json(cfg.out("marginals_report.json"), doc)
    write_marginal_csv(cfg.out("marginal_x.csv"), "x", rho.x_axis, report.x_marginal)
    write_marginal_csv(cfg.out("marginal_p.csv"), "p", rho.p_axis, report.p_marginal)
    print(
        f"marginal residuals: x={report.x_residual:.3e} p={report.p_residual:.3e} "
        f"norm={report.norm_residual:.3e}"
    )
    return 0


def cmd_moments(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    ens = _ensemble_from(ns, cfg)
    verdicts = [
        modulation_norm(
            st,
            2.0,
            grid,
            tail_tol=cfg.tolerances["convergent_tail"],
            growth_threshold=cfg.tolerances["diverging_growth"],
        )
        for st, _ in ens.members
    ]
    rho = mixed_wigner(ens, grid)
    report = covariance(rho, verdicts, route_tol=cfg.tolerances["route_agreement"])
    doc = {
        "config": cfg.as_dict(),
        "ensemble": ens.label,
        "members": [st.label for st, _ in ens.members],
        "member_verdicts": [norm_report_to_dict(v) for v in verdicts],
        "covariance": covariance_report_to_dict(report),
    }
    write_json(cfg.out("moments_report.json"), doc)
    if report.flags:
        print(f"warning: {', '.join(report.flags)}", file=sys.stderr)
    print(f"covariance route residual {report.residual:.3e}")
    return 0


def cmd_modnorm(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    state = catalog_state(ns.state, grid.x_grid, cfg.hbar)
    report = modulation_norm(
        state,
        ns.s,
        grid,
        window=ns.window,
        tail_tol=cfg.tolerances["convergent_tail"],
        growth_threshold=cfg.tolerances["diverging_growth"],
    )
    doc = {"config": cfg.as_dict(), "state": state.label}
    doc.update(norm_report_to_dict(report))
    write_json(cfg.out("modnorm_report.json"), doc)
    print(f"verdict {report.verdict} (growth_exponent {report.growth_exponent:.4f})")
    return 0


def cmd_diagnose(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    state = catalog_state(ns.state, grid.x_grid, cfg.hbar)
    warning = diagnostic_grid_warning(state, grid)
    if warning:
        print(f"warning: {warning}", file=sys.stderr)
    report = feichtinger_diagnostic(
        state,
        grid,
        tail_tol=cfg.tolerances["convergent_tail"],
        growth_threshold=cfg.tolerances["diverging_growth"],
    )
    doc = {"config": cfg.as_dict(), "state": state.label}
    doc.update(norm_report_to_dict(report))
    write_json(cfg.out("diagnose_report.json"), doc)
    print(f"verdict {report.verdict} (growth_exponent {report.growth_exponent:.4f})")
    return 0


def cmd_ensemble_build(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    ens = load_ensemble_json(ns.ensemble, grid.x_grid, cfg.hbar)
    op = build_A(ens, cfg.dim)
    rho = density_matrix(op)
    direct = density_matrix_direct(ens, cfg.dim)
    route_residual = float(np.abs(rho.matrix - direct).max())
    write_json(
        cfg.out("ensemble_A.json"),
        {
            "config": cfg.as_dict(),
            "dim": op.dim,
            "basis": op.basis_label,
            "matrix": complex_matrix_to_pairs(op.matrix),
            "residuals": {"truncation_residual": op.truncation_residual},
        },
    )
    write_json(
        cfg.out("ensemble_rho.json"),
        {
            "config": cfg.as_dict(),
            "dim": rho.dim,
            "matrix": complex_matrix_to_pairs(rho.matrix),
            "residuals": {
                "trace_residual": rho.trace_residual,
                "route_residual": route_residual,
            },
        },
    )
    print(f"wrote ensemble_A.json and ensemble_rho.json to {cfg.output_dir}")
    return 0


def cmd_ensemble_equiv(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    e1 = load_ensemble_json(ns.ensemble, grid.x_grid, cfg.hbar)
    e2 = load_ensemble_json(ns.ensemble2, grid.x_grid, cfg.hbar)
    a = build_A(e1, cfg.dim)
    a_prime = build_A(e2, cfg.dim)
    isometry = find_partial_isometry(
        a,
        a_prime,
        density_tol=cfg.tolerances["density_match"],
        factor_tol=cfg.tolerances["factor_residual"],
    )
    closure = feichtinger_closure_check(
        e1,
        e2,
        grid,
        s=ns.s,
        dim=cfg.dim,
        density_tol=cfg.tolerances["density_match"],
        field_tol=cfg.tolerances["field_match"],
    )
    write_json(
        cfg.out("isometry.json"),
        {
            "config": cfg.as_dict(),
            "dim": a.dim,
            "matrix": complex_matrix_to_pairs(isometry.matrix),
            "residuals": {"defect": isometry.defect},
            "rank": isometry.rank,
        },
    )
    write_json(
        cfg.out("closure_report.json"),
        {
            "config": cfg.as_dict(),
            "s": closure.s,
            "density_residual": closure.density_residual,
            "field_residual": closure.field_residual,
            "e1_verdicts": list(closure.e1_verdicts),
            "e2_verdicts": list(closure.e2_verdicts),
            "implication_holds": closure.implication_holds,
            "inconclusive": closure.inconclusive,
        },
    )
    print(
        f"isometry rank {isometry.rank}, defect {isometry.defect:.3e}; "
        f"closure implication {'holds' if closure.implication_holds else 'fails'}"
    )
    if not closure.implication_holds:
        return 1
    return 0


def cmd_ensemble_spectral(ns: argparse.Namespace, cfg: RunConfig) -> int:
    grid = cfg.grid()
    ens = load_ensemble_json(ns.ensemble, grid.x_grid, cfg.hbar)
    rho = density_matrix(build_A(ens, cfg.dim))
    spectral = spectral_ensemble(rho, grid.x_grid)
    entries = []
    for idx, (state, weight) in enumerate(spectral.members):
        name = f"spectral_member_{idx}.csv"
        write_state_csv(cfg.out(name), grid.x_grid.points(), state.values)
        entries.append({"weight": weight, "state": name})
    write_json(
        cfg.out("spectral_ensemble.json"),
        {
            "config": cfg.as_dict(),
            "label": spectral.label,
            "members": entries,
            "eigenvalue_sum": float(spectral.weights().sum()),
        },
    )
    print(f"wrote spectral ensemble with {len(entries)} members to {cfg.output_dir}")
    return 0


def _combination_state(
    grid: PhaseSpaceGrid, coeffs: dict[int, float], label: str
) -> SampledState:
    from .grid import hermite_functions, trapezoid_weights

    k_max = max(coeffs)
    basis = hermite_functions(k_max, grid.x_grid.points(), grid.hbar)
    vals = np.zeros(grid.n_points, dtype=complex)
    for k, c in coeffs.items():
        vals += c * basis[k]
    w = trapezoid_weights(grid.n_points)
    vals /= math.sqrt(float(np.sum(w * np.abs(vals) ** 2)) * grid.dx)
    return SampledState(grid.x_grid, vals, label, grid.hbar)


def _hadamard_pair(grid: PhaseSpaceGrid) -> tuple[Ensemble, Ensemble]:
    h0 = catalog_state("hermite:0", grid.x_grid, grid.hbar)
    h1 = catalog_state("hermite:1", grid.x_grid, grid.hbar)
    plus = _combination_state(grid, {0: 1.0, 1: 1.0}, "mix:+")
    minus = _combination_state(grid, {0: 1.0, 1: -1.0}, "mix:-")
    e1 = Ensemble(((h0, 0.5), (h1, 0.5)), "pair:eigen")
    e2 = Ensemble(((plus, 0.5), (minus, 0.5)), "pair:rotated")
    return e1, e2


def _check(name: str, value: float, tol: float) -> dict:
    ok = bool(value <= tol)
    print(f"{'PASS' if ok else 'FAIL'} {name} value={value:.6e} tol={tol:.1e}")
    return {"name": name, "value": float(value), "tolerance": float(tol), "pass": ok}


def _hadamard_block_gap(u: np.ndarray) -> float:
    target = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    block = u[:2, :2]
    gap = 0.0
    for j in range(2):
        phase = np.vdot(target[:, j], block[:, j])
        phase = phase / abs(phase) if abs(phase) > 0 else 1.0
        gap = max(gap, float(np.abs(block[:, j] - phase * target[:, j]).max()))
    return gap


def cmd_reproduce(ns: argparse.Namespace, cfg: RunConfig) -> int:
    scenario = ns.scenario
    checks: list[dict] = []
    if scenario == "prop1":
        grid = make_grid(1024, 12.0, 1.0)
        h0 = catalog_state("hermite:0", grid.x_grid)
        h1 = catalog_state("hermite:1", grid.x_grid)
        ens = Ensemble(((h0, 0.5), (h1, 0.5)), "pair:eigen")
        report = marginals(mixed_wigner(ens, grid), ens)
        checks.append(_check("norm_residual", report.norm_residual, 1e-6))
        checks.append(_check("x_marginal_residual", report.x_residual, 1e-6))
        checks.append(_check("p_marginal_residual", report.p_residual, 1e-6))
    elif scenario == "prop2":
        grid = make_self_reciprocal_grid(2048, 1.0)
        h0 = catalog_state("hermite:0", grid.x_grid)
        h1 = catalog_state("hermite:1", grid.x_grid)
        ens = Ensemble(((h0, 0.5), (h1, 0.5)), "pair:eigen")
        verdicts = [modulation_norm(st, 2.0, grid) for st, _ in ens.members]
        report = covariance(mixed_wigner(ens, grid), verdicts)
        sigma_gap = float(np.abs(report.sigma - np.eye(2)).max())
        checks.append(_check("sigma_vs_identity", sigma_gap, 1e-5))
        checks.append(_check("route_agreement", report.residual, 1e-3))
    elif scenario == "prop3":
        grid = make_grid(512, 10.0, 1.0)
        e1, e2 = _hadamard_pair(grid)
        a = build_A(e1, 32)
        a_prime = build_A(e2, 32)
        rho_gap = float(
            np.abs(density_matrix(a).matrix - density_matrix(a_prime).matrix).max()
        )
        isometry = find_partial_isometry(a, a_prime, factor_tol=1e-8)
        factor_gap = float(np.linalg.norm(a.matrix - a_prime.matrix @ isometry.matrix))
        checks.append(_check("density_match", rho_gap, 1e-10))
        checks.append(_check("factorization_residual", factor_gap, 1e-8))
        checks.append(_check("isometry_defect", isometry.defect, 1e-8))
        checks.append(_check("hadamard_block", _hadamard_block_gap(isometry.matrix), 1e-8))
    else:
        grid = make_grid(512, 10.0, 1.0)
        e1, e2 = _hadamard_pair(grid)
        f1 = mixed_wigner(e1, grid)
        f2 = mixed_wigner(e2, grid)
        field_gap = float(np.abs(f1.values - f2.values).max())
        checks.append(_check("mixed_field_match", field_gap, 1e-5))
        verdicts = [
            modulation_norm(st, 0.0, grid).verdict
            for ens in (e1, e2)
            for st, _ in ens.members
        ]
        nonconv = float(sum(v != "convergent" for v in verdicts))
        checks.append(_check("nonconvergent_members", nonconv, 0.0))
    ok = all(c["pass"] for c in checks)
    write_json(
        cfg.out(f"reproduce_{scenario}.json"),
        {
            "scenario": scenario,
            "config": cfg.as_dict(),
            "checks": checks,
            "pass": ok,
        },
    )
    return 0 if ok else 1


_HANDLERS = {
    "wigner": cmd_wigner,
    "cross-wigner": cmd_cross_wigner,
    "marginals": cmd_marginals,
    "moments": cmd_moments,
    "modnorm": cmd_modnorm,
    "diagnose": cmd_diagnose,
    "ensemble-build": cmd_ensemble_build,
    "ensemble-equiv": cmd_ensemble_equiv,
    "ensemble-spectral": cmd_ensemble_spectral,
    "reproduce": cmd_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    args = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        overrides, rest = _extract_tol_flags(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    try:
        ns = parser.parse_args(rest)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from(ns, overrides)
        return _HANDLERS[ns.command](ns, cfg)
    except CheckError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
