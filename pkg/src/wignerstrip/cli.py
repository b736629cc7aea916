"""Command-line drivers for the package's experiments.

Every subcommand reads an optional key=value config file, applies --override
pairs, writes CSV/JSON artifacts plus a run manifest (config hash, versions,
timings) into --out, and returns a stable exit code:

    0  success
    1  a demo assertion failed (JSON diagnostic written)
    2  usage error
    3  config validation error

Outputs are deterministic for a fixed config; nothing here draws random
numbers.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .approx import closest_pure, monotonicity_probe, positive_part
from .dynamics import (consistency_check, harmonic_flow, initial_from_profile,
                       moyal_rhs, profile_from_initial)
from .errors import DomainError
from .grid import Grid1D, MixedState, PhaseGrid, PhaseSpaceField, field_integral
from .io import save_field_binary, save_field_csv, save_json, save_profile_csv
from .profiles import (Profile, check_two_point_compatibility, extract_profile,
                       realize_profile, validate_profile)
from .projection import positivity_witness
from .schrod1d import energy_scan, solve_boundary_potential, solve_reference_box
from .starcalc import (BoundaryPotentialSpec, boundary_term_B1, half_strip_field,
                       lambda_epsilon, stargenvalue_residual)
from .states import box_eigenstate, box_wigner_analytic, gaussian_state, harmonic_wigner
from .wigner import (marginals, moyal_overlap, support_and_bound_report,
                     wigner_property_checks, wigner_transform)


class ConfigError(Exception):
    pass


class DemoFailure(Exception):
    def __init__(self, message, diagnostic):
        super().__init__(message)
        self.diagnostic = diagnostic


def _parse_value(raw: str):
    s = raw.strip()
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


def read_config_file(path: str | Path) -> dict:
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = s.partition("=")
        cfg[key.strip()] = _parse_value(val)
    return cfg


def resolve_config(defaults: dict, args) -> dict:
    cfg = dict(defaults)
    file_cfg = read_config_file(args.config) if args.config else {}
    for src in (file_cfg, dict(kv.split("=", 1) for kv in args.override or [])):
        for key, val in src.items():
            key = key.strip()
            if key not in cfg:
                raise ConfigError(f"unknown config key '{key}' "
                                  f"(known: {', '.join(sorted(cfg))})")
            cfg[key] = _parse_value(val) if isinstance(val, str) else val
    return cfg


def config_hash(cfg: dict) -> str:
    canon = "\n".join(f"{k}={cfg[k]!r}" for k in sorted(cfg))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _grid(cfg: dict, prefix: str = "grid") -> Grid1D:
    return Grid1D(cfg[f"{prefix}.x_min"], cfg[f"{prefix}.x_max"],
                  cfg[f"{prefix}.n_x"], cfg[f"{prefix}.hbar"])


def _float_list(val) -> list[float]:
    if isinstance(val, (int, float)):
        return [float(val)]
    return [float(tok) for tok in str(val).split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_box_wigner(cfg, out: Path, emit):
    grid = _grid(cfg)
    pg = PhaseGrid.from_position_grid(grid)
    n, L, x0 = cfg["box.n"], cfg["box.L"], cfg["box.x0"]
    state = box_eigenstate(n, L, grid, x0)
    w_fft = wigner_transform(state.psi, pg)
    w_ana = box_wigner_analytic(n, L, pg, x0)
    save_field_csv(w_fft, out / "box_wigner.csv")
    if cfg["output.binary"]:
        save_field_binary(w_fft, out / "box_wigner.bin")
    pos, mom = marginals(w_fft)
    report = support_and_bound_report(w_fft, (x0, x0 + L))
    diag = {
        "n": n, "L": L, "energy": state.energy,
        "analytic_vs_fft_sup": float(np.max(np.abs(w_fft.values - w_ana.values))),
        "normalization": float(np.real(field_integral(w_fft))),
        "support_bound_report": report.as_dict(),
    }
    save_json(diag, out / "box_wigner_report.json")
    emit(f"box n={n}: E={state.energy:.6f}, analytic-vs-FFT sup diff "
         f"{diag['analytic_vs_fft_sup']:.3e}")
    return diag, [out / "box_wigner.csv", out / "box_wigner_report.json"]


def cmd_stargen_residual(cfg, out: Path, emit):
    L, x0, n_box = cfg["box.L"], cfg["box.x0"], cfg["box.n"]
    rows = []
    for n_x in (int(v) for v in _float_list(cfg["sweep.n_x"])):
        grid = Grid1D(cfg["grid.x_min"], cfg["grid.x_max"], n_x, cfg["grid.hbar"])
        pg = PhaseGrid.from_position_grid(grid)
        state = box_eigenstate(n_box, L, grid, x0)
        F1 = half_strip_field(state.psi, x0, x0 + L, pg, side="left")
        res = stargenvalue_residual(F1, state.energy, state.psi, x0,
                                    p_window=cfg["residual.p_window"] or None)
        rows.append({"n_x": n_x, **res.as_dict()})
    gaps = []
    grid = Grid1D(cfg["grid.x_min"], cfg["grid.x_max"],
                  int(_float_list(cfg["sweep.n_x"])[-1]), cfg["grid.hbar"])
    pg = PhaseGrid.from_position_grid(grid)
    state = box_eigenstate(n_box, L, grid, x0)
    B1 = boundary_term_B1(state.psi, x0, pg)
    x = grid.points
    half = (x >= x0) & (x <= x0 + L / 2)
    for eps in _float_list(cfg["sweep.epsilon"]):
        lam = lambda_epsilon(state.psi, x0, eps, pg, dirichlet=True)
        gap = float(np.max(np.abs((lam.values - B1.values)[half, :])))
        gaps.append({"epsilon": eps, "sup_gap": gap})
    diag = {"residuals": rows, "lambda_gaps": gaps}
    save_json(diag, out / "stargen_residual.json")
    for r in rows:
        emit(f"n_x={r['n_x']}: residual {r['sup_residual']:.3e} "
             f"(naive imaginary obstruction {r['sup_imag_naive']:.3e})")
    return diag, [out / "stargen_residual.json"]


def cmd_eigen_solve(cfg, out: Path, emit):
    grid = _grid(cfg)
    a, b = cfg["schrod.a"], cfg["schrod.b"]
    E = cfg["schrod.energy"] if cfg["schrod.energy"] > 0 else np.pi**2 / 8
    outputs = []
    summary = []
    for eps in _float_list(cfg["schrod.epsilon"]):
        sol = solve_boundary_potential(eps, E, grid, a, b)
        path = out / f"eigen_solve_eps{eps:g}.csv"
        with open(path, "w") as fh:
            fh.write("x,psi_eps,phi_1\n")
            for xi, pi, ri in zip(grid.points, np.real(sol.psi.values),
                                  np.real(sol.reference.values)):
                fh.write(f"{xi:.17g},{pi:.17g},{ri:.17g}\n")
        outputs.append(path)
        summary.append({"epsilon": eps, "energy": E,
                        "mismatch_core": sol.mismatch_core,
                        "mismatch_interior": sol.mismatch_interior,
                        "mismatch_box": sol.mismatch_box,
                        "exterior_max": sol.exterior_max})
        emit(f"eps={eps:g}: interior mismatch {sol.mismatch_interior:.3e}, "
             f"exterior max {sol.exterior_max:.3e}")
    if cfg["schrod.scan"]:
        scan = energy_scan(_float_list(cfg["schrod.epsilon"])[0],
                           (E - 0.1, E + 0.1), grid, a, b)
        summary.append({"scan_E_min": scan.E_min, "scan_defect": scan.defect_min,
                        "oracle_energy": scan.oracle_energy})
        emit(f"energy scan: min at {scan.E_min:.6f} (oracle {scan.oracle_energy:.6f})")
    save_json({"cases": summary}, out / "eigen_solve_report.json")
    outputs.append(out / "eigen_solve_report.json")
    return {"cases": summary}, outputs


def cmd_positivity_demo(cfg, out: Path, emit):
    grid = _grid(cfg)
    pg = PhaseGrid.from_position_grid(grid)
    L = cfg["box.L"]
    phi = box_eigenstate(1, L, grid, 0.0).psi
    chi_raw = box_eigenstate(cfg["witness.chi_n"], L, grid, L).psi
    wit = positivity_witness(phi, chi_raw, pg, L, N_factor=cfg["witness.N_factor"])
    diag = wit.as_dict()
    save_json(diag, out / "positivity_witness.json")
    emit(f"witness overlap {wit.overlap:+.6e} (closed form {wit.overlap_closed_form:+.6e})")
    if not wit.overlap < 0:
        raise DemoFailure("witness overlap is not negative", diag)
    if abs(wit.overlap - wit.overlap_closed_form) > wit.tolerance:
        raise DemoFailure("closed-form and FFT overlap disagree", diag)
    return diag, [out / "positivity_witness.json"]


def _default_profile(cfg, kind: str, anchor: float) -> Profile:
    grid = _grid(cfg)
    pg = PhaseGrid.from_position_grid(grid)
    hbar = grid.hbar
    p = pg.p_grid.points
    if kind == "ground":
        return Profile(pg.p_grid, np.exp(-p**2 / hbar) / (np.pi * hbar), anchor)
    if kind == "excited-offset":
        vals = np.exp(-p**2 / hbar) / (np.pi * hbar * np.e) * (1 + 2 * p**2 / hbar)
        return Profile(pg.p_grid, vals, anchor)
    raise ConfigError(f"unknown built-in profile '{kind}'")


def _load_profile(cfg, key_prefix: str) -> Profile:
    path = cfg[f"{key_prefix}.csv"]
    if path:
        from .io import load_profile_csv
        p, g = load_profile_csv(path)
        n = len(p)
        dp = p[1] - p[0]
        pgrid = Grid1D(float(p[0]), float(p[0]) + n * dp, n, cfg["grid.hbar"])
        return Profile(pgrid, g, cfg[f"{key_prefix}.anchor"])
    return _default_profile(cfg, cfg[f"{key_prefix}.kind"], cfg[f"{key_prefix}.anchor"])


def cmd_profile_check(cfg, out: Path, emit):
    prof = _load_profile(cfg, "profile")
    rep = validate_profile(prof)
    save_json(rep.as_dict(), out / "profile_report.json")
    emit(f"||g~||_L1 = {rep.fourier_l1:.8f}, bound {rep.bound:.8f}, "
         f"admissible={rep.admissible} (saturation {rep.saturation:.6f})")
    return rep.as_dict(), [out / "profile_report.json"]


def cmd_profile_realize(cfg, out: Path, emit):
    prof = _load_profile(cfg, "profile")
    psi = realize_profile(prof, verify_tol=cfg["realize.verify_tol"])
    path = out / "realized_state.csv"
    with open(path, "w") as fh:
        fh.write("x,re,im\n")
        for xi, vi in zip(psi.grid.points, psi.values):
            fh.write(f"{xi:.17g},{vi.real:.17g},{vi.imag:.17g}\n")
    pg = PhaseGrid.from_position_grid(psi.grid)
    w = wigner_transform(psi, pg)
    cut = w.values[psi.grid.index_of(prof.anchor_x), :]
    diag = {"anchor": prof.anchor_x, "norm": psi.norm,
            "anchor_sup_error": float(np.max(np.abs(cut - prof.values)))}
    save_json(diag, out / "realize_report.json")
    emit(f"realized state: norm {diag['norm']:.10f}, anchor error "
         f"{diag['anchor_sup_error']:.3e}")
    return diag, [path, out / "realize_report.json"]


def cmd_profile_compat(cfg, out: Path, emit):
    g_a = _load_profile(cfg, "profile_a")
    g_b = _load_profile(cfg, "profile_b")
    verdict = check_two_point_compatibility(g_a, g_b)
    save_json(verdict.as_dict(), out / "compat_verdict.json")
    emit(f"verdict: {verdict.verdict}"
         + (f" ({verdict.violated_condition}; zeros of the second transform at "
            f"{[round(z, 6) for z in verdict.zeros_b]})" if verdict.verdict == "incompatible" else ""))
    return verdict.as_dict(), [out / "compat_verdict.json"]


def cmd_ho_flow(cfg, out: Path, emit):
    grid = _grid(cfg)
    pg = PhaseGrid.from_position_grid(grid)
    F0 = wigner_transform(gaussian_state(grid, center=cfg["flow.center_x"],
                                         momentum=cfg["flow.center_p"]), pg)
    hbar = grid.hbar
    times = np.linspace(0, 2 * np.pi, int(cfg["flow.n_times"]), endpoint=True)
    rows = []
    outputs = []
    snapshots = []
    for j, t in enumerate(times):
        Ft = harmonic_flow(F0, t)
        rows.append({
            "t": float(t),
            "normalization": float(np.real(field_integral(Ft))),
            "self_moyal": float(np.real(moyal_overlap(Ft, Ft))),
        })
        if cfg["flow.snapshots"]:
            snap = out / f"snapshot_{j:03d}.csv"
            save_field_csv(Ft, snap)
            outputs.append(snap)
            snapshots.append({"index": j, "t": float(t), "file": snap.name})
    path = out / "ho_flow_conservation.csv"
    with open(path, "w") as fh:
        fh.write("t,normalization,self_moyal\n")
        for r in rows:
            fh.write(f"{r['t']:.17g},{r['normalization']:.17g},{r['self_moyal']:.17g}\n")
    worst_norm = max(abs(r["normalization"] - 1) for r in rows)
    worst_moyal = max(abs(r["self_moyal"] - 1 / (2 * np.pi * hbar)) for r in rows)
    diag = {"max_norm_drift": worst_norm, "max_moyal_drift": worst_moyal, "rows": rows}
    save_json(diag, out / "ho_flow_report.json")
    if cfg["flow.snapshots"]:
        series = {"t_values": [float(t) for t in times], "snapshots": snapshots,
                  "grid": {"x_min": grid.x_min, "x_max": grid.x_max,
                           "n_x": grid.n_points, "hbar": grid.hbar,
                           "p_min": pg.p_grid.x_min, "p_max": pg.p_grid.x_max,
                           "n_p": pg.p_grid.n_points}}
        save_json(series, out / "ho_flow_series.json")
        outputs.append(out / "ho_flow_series.json")
    emit(f"flow over one period: norm drift {worst_norm:.2e}, purity drift {worst_moyal:.2e}")
    return diag, [path, out / "ho_flow_report.json", *outputs]


def cmd_profile_roundtrip(cfg, out: Path, emit):
    grid = _grid(cfg)
    pg = PhaseGrid.from_position_grid(grid)
    F0 = wigner_transform(gaussian_state(grid, center=cfg["flow.center_x"],
                                         momentum=cfg["flow.center_p"]), pg)
    t = np.linspace(0, 2 * np.pi, int(cfg["flow.n_times"]), endpoint=False)
    g0 = profile_from_initial(F0, 0.0, t)
    F_rec = initial_from_profile(g0, pg)
    err = float(np.max(np.abs(F_rec.values - F0.values)))
    check = consistency_check(F0, g0=g0, tolerance=cfg["flow.consistency_tol"])
    diag = {"roundtrip_sup_error": err, "consistency": check.as_dict(),
            "reconstructed_normalization": float(np.real(field_integral(F_rec)))}
    save_json(diag, out / "roundtrip_report.json")
    emit(f"round trip sup error {err:.3e}")
    if not check.consistent:
        raise DemoFailure("self-consistency check failed", diag)
    return diag, [out / "roundtrip_report.json"]


def cmd_confined_stationarity(cfg, out: Path, emit):
    L, x0 = cfg["box.L"], cfg["box.x0"]
    rows = []
    for n_x, eps in zip((int(v) for v in _float_list(cfg["sweep.n_x"])),
                        _float_list(cfg["sweep.epsilon"])):
        grid = Grid1D(cfg["grid.x_min"], cfg["grid.x_max"], n_x, cfg["grid.hbar"])
        pg = PhaseGrid.from_position_grid(grid)
        state = box_eigenstate(cfg["box.n"], L, grid, x0)
        W = wigner_transform(state.psi, pg)
        hbar = grid.hbar
        specs = (BoundaryPotentialSpec(x0, x0 + L, eps, hbar**2 / 2, "left"),
                 BoundaryPotentialSpec(x0, x0 + L, eps, hbar**2 / 2, "right"))
        rhs = moyal_rhs(W, None, specs, edge_tol=cfg["stationarity.edge_tol"])
        x = grid.points
        inner = (x >= x0 + cfg["stationarity.margin"]) & (x <= x0 + L - cfg["stationarity.margin"])
        pwin = np.abs(pg.p_grid.points) <= cfg["stationarity.p_window"]
        sup = float(np.max(np.abs(rhs.values[np.ix_(inner, pwin)])))
        rows.append({"n_x": n_x, "epsilon": eps, "sup_rhs_bulk": sup})
        emit(f"n_x={n_x}, eps={eps:g}: bulk sup|RHS| = {sup:.4e}")
    diag = {"ladder": rows}
    save_json(diag, out / "stationarity_report.json")
    return diag, [out / "stationarity_report.json"]


def cmd_closest_wigner(cfg, out: Path, emit):
    grid = _grid(cfg)
    pg = PhaseGrid.from_position_grid(grid)
    w0 = harmonic_wigner(0, pg)
    w1 = harmonic_wigner(1, pg)
    F = PhaseSpaceField(pg, w0.values + cfg["approx.mix"] * w1.values)
    res = closest_pure(F, cfg["approx.eps"], N_max=int(cfg["approx.n_max"]))
    save_field_csv(res.field, out / "closest_field.csv")
    if cfg["output.binary"]:
        save_field_binary(res.field, out / "closest_field.bin")
    checks = wigner_property_checks(res.field)
    probe = monotonicity_probe(F, tuple(int(v) for v in _float_list(cfg["approx.ladder"])))
    diag = {"certificate": res.certificate(), "wigner_checks": checks,
            "monotonicity": probe}
    save_json(diag, out / "closest_certificate.json")
    emit(f"N={res.N}, lambda_1={res.lambda_1:.8f}, tail={res.tail:.3e}")
    return diag, [out / "closest_field.csv", out / "closest_certificate.json"]


COMMANDS = {
    "box-wigner": (cmd_box_wigner, {
        "grid.x_min": -8.0, "grid.x_max": 8.0, "grid.n_x": 512, "grid.hbar": 1.0,
        "box.n": 1, "box.L": 2.0, "box.x0": 0.0, "output.binary": False,
    }),
    "stargen-residual": (cmd_stargen_residual, {
        "grid.x_min": -1.0, "grid.x_max": 3.0, "grid.hbar": 1.0,
        "box.n": 1, "box.L": 2.0, "box.x0": 0.0,
        "sweep.n_x": "512,1024", "sweep.epsilon": "0.004,0.002,0.001",
        "residual.p_window": 0.0,
    }),
    "eigen-solve": (cmd_eigen_solve, {
        "grid.x_min": -2.0, "grid.x_max": 2.0, "grid.n_x": 4096, "grid.hbar": 1.0,
        "schrod.a": -1.0, "schrod.b": 1.0, "schrod.epsilon": "0.01,0.0025",
        "schrod.energy": 0.0, "schrod.scan": False,
    }),
    "positivity-demo": (cmd_positivity_demo, {
        "grid.x_min": -8.0, "grid.x_max": 8.0, "grid.n_x": 512, "grid.hbar": 1.0,
        "box.L": 2.0, "witness.chi_n": 1, "witness.N_factor": 1.5,
    }),
    "profile-check": (cmd_profile_check, {
        "grid.x_min": -8.0, "grid.x_max": 8.0, "grid.n_x": 512, "grid.hbar": 1.0,
        "profile.kind": "ground", "profile.csv": "", "profile.anchor": 0.0,
    }),
    "profile-realize": (cmd_profile_realize, {
        "grid.x_min": -8.0, "grid.x_max": 8.0, "grid.n_x": 512, "grid.hbar": 1.0,
        "profile.kind": "ground", "profile.csv": "", "profile.anchor": 0.0,
        "realize.verify_tol": 1e-4,
    }),
    "profile-compat": (cmd_profile_compat, {
        "grid.x_min": -8.0, "grid.x_max": 8.0, "grid.n_x": 512, "grid.hbar": 1.0,
        "profile_a.kind": "ground", "profile_a.csv": "", "profile_a.anchor": 0.0,
        "profile_b.kind": "excited-offset", "profile_b.csv": "", "profile_b.anchor": 1.0,
    }),
    "ho-flow": (cmd_ho_flow, {
        "grid.x_min": -8.0, "grid.x_max": 8.0, "grid.n_x": 256, "grid.hbar": 1.0,
        "flow.center_x": 1.0, "flow.center_p": 0.0, "flow.n_times": 9,
        "flow.snapshots": False,
    }),
    "profile-roundtrip": (cmd_profile_roundtrip, {
        "grid.x_min": -8.0, "grid.x_max": 8.0, "grid.n_x": 256, "grid.hbar": 1.0,
        "flow.center_x": 1.0, "flow.center_p": 0.0, "flow.n_times": 256,
        "flow.consistency_tol": 1e-3,
    }),
    "confined-stationarity": (cmd_confined_stationarity, {
        "grid.x_min": -2.0, "grid.x_max": 4.0, "grid.hbar": 1.0,
        "box.n": 1, "box.L": 2.0, "box.x0": 0.0,
        "sweep.n_x": "1024,2048", "sweep.epsilon": "0.05,0.025",
        "stationarity.p_window": 5.0, "stationarity.margin": 0.05,
        "stationarity.edge_tol": 1e-2,
    }),
    "closest-wigner": (cmd_closest_wigner, {
        "grid.x_min": -12.0, "grid.x_max": 12.0, "grid.n_x": 512, "grid.hbar": 1.0,
        "approx.mix": -0.3, "approx.eps": 1e-3, "approx.n_max": 32,
        "approx.ladder": "4,8,16,32", "output.binary": False,
    }),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wignerstrip",
        description="Phase-space experiments for a quantum device on an interval")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None,
                       help="key = value config file")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default out-<command>)")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="override one config key (repeatable)")
        p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    handler, defaults = COMMANDS[args.command]
    try:
        cfg = resolve_config(defaults, args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3

    out = args.out or Path(f"out-{args.command}")
    out.mkdir(parents=True, exist_ok=True)
    emit = (lambda msg: None) if args.quiet else (lambda msg: print(msg))

    manifest = {
        "command": args.command,
        "config": cfg,
        "config_hash": config_hash(cfg),
        "versions": {"wignerstrip": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
        "seed": None,
    }
    t0 = time.perf_counter()
    try:
        diag, outputs = handler(cfg, out, emit)
        manifest["status"] = "ok"
        manifest["outputs"] = [str(p) for p in outputs]
        code = 0
    except DemoFailure as exc:
        save_json({"error": str(exc), "diagnostic": exc.diagnostic},
                  out / "failure_diagnostic.json")
        manifest["status"] = "assertion-failed"
        manifest["outputs"] = [str(out / "failure_diagnostic.json")]
        print(f"demo assertion failed: {exc}", file=sys.stderr)
        code = 1
    except (DomainError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        manifest["status"] = "config-error"
        manifest["outputs"] = []
        code = 3
    manifest["timings"] = {"total_s": round(time.perf_counter() - t0, 6)}
    save_json(manifest, out / "manifest.json")
    return code


if __name__ == "__main__":
    sys.exit(main())
