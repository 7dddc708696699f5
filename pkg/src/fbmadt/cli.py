"""Command-line front end.

    fbmadt simulate    --config c.json --out DIR [--seed N]
    fbmadt fit         --data d.csv [--config c.json] --out DIR [--variant M0] [--method em]
    fbmadt reliability (--fit DIR/fit_report.json | --data d.csv) [--config c.json] --out DIR
    fbmadt evaluate    --data d.csv [--config c.json] --out DIR
    fbmadt crossval    --data d.csv [--config c.json] --out DIR [--variant ...]
    fbmadt sweep       [--config c.json] --out DIR [--replications R]

On failure the command exits with status 2 and prints a JSON object
``{"error": kind, "message": text}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import report
from .config import RunConfig
from .data import AdtDataset, ingest_csv, write_csv
from .evaluation import CrossValPlan, HeldOut, compare_models, cross_validate, simulate_levels
from .exceptions import AdtError
from .inference import SearchBounds, e_step, fit
from .model import StressSpec, ThetaM0, Variant, basis_vector, normalize_stress
from .reliability import McConfig, path_bands, reliability_curve, time_at_reliability
from .simulator import DESIGN_GRID, SimDesign, generate_dataset, run_design_sweep

logger = logging.getLogger("fbmadt")


def _provenance(cfg: RunConfig) -> dict:
    return {"config_hash": cfg.hash, "master_seed": int(cfg["master_seed"]), "units": report.UNITS}


def _load_data(path, cfg: RunConfig) -> AdtDataset:
    st = cfg["stress"]
    return ingest_csv(path, kind=st["kind"], s0=st["s0"], sH=st["sH"])


def _bounds(cfg: RunConfig) -> SearchBounds:
    return SearchBounds.from_dict(cfg["fit"].get("bounds") or {})


def _fit(data: AdtDataset, cfg: RunConfig, variant: str, method: str | None):
    f = cfg["fit"]
    theta0 = ThetaM0.from_dict(f["theta0"]).with_variant(variant) if f.get("theta0") else None
    return fit(data, variant, method, epsilon=f["epsilon"], max_iter=f["max_iter"], bounds=_bounds(cfg),
               theta0=theta0)


def _variants(arg: str | None, default) -> list[str]:
    if arg:
        return [Variant(v.strip()).value for v in arg.split(",")]
    return [Variant(v).value for v in ([default] if isinstance(default, str) else default)]


def cmd_simulate(args, cfg: RunConfig, out: Path) -> None:
    design = SimDesign.from_dict({**cfg["design"], "master_seed": cfg["master_seed"]})
    data = generate_dataset(design)
    write_csv(data, out / "dataset.csv")
    theta = design.theta_true
    fit_entry = {
        "method": "truth", "variant": theta.variant.value, "theta": theta.to_dict(),
        "theta_sd": theta.sd_values(), "n_params": theta.variant.n_params, "l_max": None, "aic": None,
        "iterations": 0, "converged": True, "trace": [], "warnings": [],
    }
    report.write_json(out / "truth.json", {
        **_provenance(cfg), "command": "simulate", "stress_spec": design.stress_spec.to_dict(),
        "design": design.to_dict(), "fits": [fit_entry],
    })


def _residual_rows(data: AdtDataset, theta: ThetaM0):
    if theta.variant.random_drift:
        drifts = iter(e_step(theta, data).mu)
    else:
        drifts = iter(np.full(data.n_units, theta.mu_a))
    for l, lvl in enumerate(data.levels):
        s = data.s_star(l)
        for unit in lvl.units:
            fitted = next(drifts) * basis_vector(theta, s, unit.times)
            for t, x, f in zip(unit.times, unit.values, fitted):
                yield [float(lvl.stress), unit.unit_id, float(t), float(x), float(f), float(x - f)]


def cmd_fit(args, cfg: RunConfig, out: Path) -> None:
    data = _load_data(args.data, cfg)
    fits = []
    for variant in _variants(args.variant, cfg["fit"]["variant"]):
        res = _fit(data, cfg, variant, args.method or cfg["fit"]["method"])
        fits.append(res)
        report.write_csv(out / f"residuals_{variant}.csv",
                         ["stress", "unit", "time_hours", "value", "fitted", "residual"],
                         _residual_rows(data, res.theta_hat),
                         {"config_hash": cfg.hash, "master_seed": cfg["master_seed"], "variant": variant},
                         comment="fitted = drift (posterior mean for random-drift variants) * psi(t)")
    report.write_json(out / "fit_report.json", {
        **_provenance(cfg), "command": "fit", "stress_spec": data.stress_spec.to_dict(),
        "fits": [r.to_dict() for r in fits],
    })
    best = fits[0].theta_hat
    ens = simulate_levels(best, data, int(cfg["evaluate"]["er_paths"] or 1000), int(cfg["master_seed"]))
    bands = [(lvl.units[0].times, *path_bands(e)) for lvl, e in zip(data.levels, ens)]
    if all(lvl.common_grid is not None for lvl in data.levels):
        report.plot_degradation_fans(data, bands, out / "degradation_fans.svg")


def _theta_for_reliability(args, cfg: RunConfig):
    if args.fit:
        rep = json.loads(Path(args.fit).read_text(encoding="utf-8"))
        fits = rep["fits"]
        if args.variant:
            fits = [f for f in fits if f["variant"] == Variant(args.variant).value] or fits
        spec = StressSpec.from_dict(rep["stress_spec"])
        return ThetaM0.from_dict(fits[0]["theta"]), spec
    if args.data:
        data = _load_data(args.data, cfg)
        variant = _variants(args.variant, cfg["fit"]["variant"])[0]
        return _fit(data, cfg, variant, args.method or cfg["fit"]["method"]).theta_hat, data.stress_spec
    raise AdtError("reliability needs --fit REPORT or --data CSV")


def cmd_reliability(args, cfg: RunConfig, out: Path) -> None:
    theta, spec = _theta_for_reliability(args, cfg)
    mc = cfg["mc"]
    stress = spec.s0 if mc["stress"] is None else float(mc["stress"])
    s_star = normalize_stress(stress, spec)
    mcfg = McConfig(n_paths=int(mc["n_paths"]), horizon=float(mc["horizon"]), x_th=float(mc["x_th"]),
                    master_seed=int(cfg["master_seed"]), step=mc["step"], workers=int(mc["workers"]))
    curve = reliability_curve(theta, s_star, mcfg)
    target = float(mc["r_target"])
    try:
        t_r = {"r_target": target, "time_hours": time_at_reliability(curve, target), "error": None}
    except AdtError as exc:
        t_r = {"r_target": target, "time_hours": None, "error": str(exc)}
    (out / "reliability.csv").write_text(
        f"# config_hash={cfg.hash} master_seed={cfg['master_seed']} stress={stress!r} x_th={mcfg.x_th!r}\n"
        + curve.to_csv_text(), encoding="utf-8")
    report.plot_reliability(curve, out / "reliability.svg", f"Reliability at stress {stress:g}")
    report.write_json(out / "reliability_report.json", {
        **_provenance(cfg), "command": "reliability", "theta": theta.to_dict(), "stress": stress,
        "s_star": s_star, "x_th": mcfg.x_th, "n_paths": mcfg.n_paths, "mc": mcfg.to_dict(),
        "censored_fraction": curve.censored_fraction, "time_at_reliability": t_r,
        "warnings": curve.warnings,
    })


def cmd_evaluate(args, cfg: RunConfig, out: Path) -> None:
    data = _load_data(args.data, cfg)
    ev, f = cfg["evaluate"], cfg["fit"]
    rows = compare_models(data, _variants(args.variant, ev["variants"]), epsilon=f["epsilon"],
                          max_iter=f["max_iter"], bounds=_bounds(cfg), er_paths=ev["er_paths"],
                          master_seed=int(cfg["master_seed"]))
    prov = _provenance(cfg)
    report.write_json(out / "evaluate_report.json",
                      {**prov, "command": "evaluate", "models": [r.to_dict() for r in rows]})
    head = ["model", "mu_a", "sigma_a", "alpha1", "beta", "sigma", "h", "l_max", "n_params", "aic"]
    report.write_csv(out / "aic_table.csv", head, (
        [r.variant, *[r.theta.sd_values()[k] for k in head[1:7]], r.l_max, r.n_params, r.aic] for r in rows),
        {"config_hash": prov["config_hash"], "master_seed": prov["master_seed"]})
    if all(r.er is not None for r in rows):
        report.write_csv(out / "er_table.csv", ["model", "er_mean", "er_upper", "er_lower"],
                         ([r.variant, r.er.er_mean, r.er.er_upper, r.er.er_lower] for r in rows),
                         {"config_hash": prov["config_hash"], "master_seed": prov["master_seed"]})


def cmd_crossval(args, cfg: RunConfig, out: Path) -> None:
    data = _load_data(args.data, cfg)
    ev, f = cfg["evaluate"], cfg["fit"]
    prov = _provenance(cfg)
    plans = []
    for held in HeldOut:
        plan = CrossValPlan(held)
        _, test = plan.split(data)
        models = []
        for v in _variants(args.variant, ev["variants"]):
            er, theta = cross_validate(data, plan, v, None, n_paths=int(ev["er_paths"] or 1000),
                                       master_seed=int(cfg["master_seed"]), epsilon=f["epsilon"],
                                       max_iter=f["max_iter"], bounds=_bounds(cfg))
            models.append({"variant": v, "theta": theta.to_dict(), "er": er.to_dict()})
        plans.append({"held_out": held.value, "test_stress": data.levels[test].stress, "models": models})
        report.write_csv(out / f"crossval_{held.value}.csv", ["model", "er_mean", "er_upper", "er_lower"],
                         ([m["variant"], m["er"]["er_mean"], m["er"]["er_upper"], m["er"]["er_lower"]]
                          for m in models),
                         {"config_hash": prov["config_hash"], "master_seed": prov["master_seed"]})
    report.write_json(out / "crossval_report.json", {**prov, "command": "crossval", "plans": plans})


def cmd_sweep(args, cfg: RunConfig, out: Path) -> None:
    base = SimDesign.from_dict({**cfg["design"], "master_seed": cfg["master_seed"]})
    sweep = run_design_sweep(DESIGN_GRID, args.replications, ("two_step", "em"), base=base,
                             master_seed=int(cfg["master_seed"]), epsilon=cfg["fit"]["epsilon"],
                             bounds=_bounds(cfg))
    report.write_json(out / "sweep_report.json", {**_provenance(cfg), "command": "sweep", **sweep.to_dict()})
    head = ["n_units", "n_measurements", "replication", "method", "mu_a", "sigma_a", "alpha1", "beta",
            "sigma", "h", "l_max", "re"]
    rows = []
    for r in sweep.rows:
        sd = ThetaM0.from_dict(r.theta).sd_values() if r.theta else {}
        rows.append([r.n_units, r.n_measurements, r.replication, r.method,
                     *[sd.get(k, "") for k in head[4:10]], r.l_max if r.l_max is not None else "",
                     r.re if r.re is not None else ""])
    report.write_csv(out / "sweep_table.csv", head, rows, {"config_hash": cfg.hash})


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "reliability": cmd_reliability,
    "evaluate": cmd_evaluate,
    "crossval": cmd_crossval,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbmadt", description="FBM accelerated degradation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory (default: config output_dir)")
        p.add_argument("--seed", type=int, help="master seed (overrides config)")
        p.add_argument("--data", help="CSV with columns stress,unit,time,value")
        p.add_argument("--variant", help="model variant(s), comma separated: M0,M1,M2,M3")
        p.add_argument("--method", choices=["em", "two_step", "mle_fixed"])
        if name == "reliability":
            p.add_argument("--fit", help="fit_report.json produced by 'fit'")
        if name == "sweep":
            p.add_argument("--replications", type=int, default=5)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg = cfg.with_overrides(master_seed=args.seed)
        if args.command in ("fit", "evaluate", "crossval") and not args.data:
            raise AdtError(f"'{args.command}' needs --data")
        out = Path(args.out or cfg["output_dir"])
        out.mkdir(parents=True, exist_ok=True)
        cfg.save(out / "config.json")
        COMMANDS[args.command](args, cfg, out)
    except (AdtError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        kind = getattr(exc, "kind", type(exc).__name__)
        print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
