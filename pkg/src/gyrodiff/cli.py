"""Command-line entry point.

Subcommands: coeff, field-validate, simulate, she, compare, study, scaling.
Runs are described by a TOML config file; every table lands as CSV with a
header row, metadata as JSON manifests (config echo, config hash, seeds,
version, wall time).  Exit codes: 0 success, 1 validation failure,
2 numerical non-convergence, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from ._quad import NonConvergedQuadrature
from .correlation import (PowerLaw, raised_cosine_envelope,
                          block_induced_envelope, separable, validate)
from .dcoeff import (QuadratureOptions, coefficient_profile,
                     mc_work_oracle, richardson_coefficient,
                     scaling_exponent)
from .field import FieldSpec, empirical_correlation, gaussian_bump_spec
from .harness import ExperimentConfig, compare, run_convergence_study
from .kinetics import (DeltaInit, PushConfig, SmoothBumpInit,
                       gyro_average_histogram, simulate_ensemble)
from .she import EnergyGrid, gaussian_profile, self_similar_fit, solve

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NONCONVERGED = 2
EXIT_USAGE = 64

_SCHEMA = {
    "correlation": {"kind", "alpha", "sigma2", "ell", "envelope",
                    "envelope_power", "t_support", "n"},
    "field": {"modes", "block_length", "master_seed"},
    "kinetics": {"epsilons", "particles", "realizations", "dt_per_gyro",
                 "t_end", "init"},
    "she": {"e_max", "cells", "dt"},
    "outputs": {"dir", "times", "formats"},
}
_INIT_KEYS = {"kind", "e0", "width"}


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    for section, content in raw.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        unknown = set(content) - _SCHEMA[section]
        if unknown:
            raise ConfigError(
                f"unknown key(s) in [{section}]: {sorted(unknown)}")
    init = raw.get("kinetics", {}).get("init", {})
    bad = set(init) - _INIT_KEYS
    if bad:
        raise ConfigError(f"unknown key(s) in [kinetics.init]: {sorted(bad)}")
    return raw


def _config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def build_correlation(cfg: dict):
    c = cfg.get("correlation", {})
    kind = c.get("kind", "gaussian-bump")
    t_support = float(c.get("t_support", 1.0))
    env_name = c.get("envelope", "block-induced")
    if env_name == "block-induced":
        env = block_induced_envelope(t_support)
    elif env_name == "raised-cosine":
        env = raised_cosine_envelope(power=int(c.get("envelope_power", 2)),
                                     support=t_support)
    else:
        raise ConfigError(f"unknown envelope {env_name!r}")
    if kind == "gaussian-bump":
        from .correlation import GaussianBump
        spatial = GaussianBump(sigma2=float(c.get("sigma2", 1.0)),
                               ell=float(c.get("ell", 1.0)))
    elif kind == "richardson":
        spatial = PowerLaw(alpha=float(c.get("alpha", 4.0 / 3.0)))
    else:
        raise ConfigError(f"unknown correlation kind {kind!r}")
    return separable(env, spatial), env, int(c.get("n", 1))


def build_field_spec(cfg: dict) -> FieldSpec:
    c = cfg.get("correlation", {})
    f = cfg.get("field", {})
    if c.get("kind", "gaussian-bump") != "gaussian-bump":
        raise ConfigError("field synthesis requires a gaussian-bump model")
    return gaussian_bump_spec(sigma2=float(c.get("sigma2", 1.0)),
                              ell=float(c.get("ell", 1.0)),
                              mode_count=int(f.get("modes", 64)),
                              block_length=float(f.get("block_length", 1.0)),
                              master_seed=int(f.get("master_seed", 0)))


def _out_dir(cfg: dict) -> Path:
    d = Path(cfg.get("outputs", {}).get("dir", "gyrodiff-out"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _write_manifest(path: Path, cfg: dict, started: float, extra=None):
    manifest = {
        "config": cfg,
        "config_hash": _config_hash(cfg),
        "master_seed": cfg.get("field", {}).get("master_seed", 0),
        "version": __version__,
        "wall_time_s": round(time.time() - started, 3),
    }
    if extra:
        manifest.update(extra)
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_coeff(args) -> int:
    started = time.time()
    cfg = load_config(args.config)
    model, env, n = build_correlation(cfg)
    e_values = np.array(sorted(float(x) for x in args.e.split(",")))
    table = coefficient_profile(model, e_values, n=n)
    out = _out_dir(cfg)
    rows = []
    if args.mc:
        spec = build_field_spec(cfg)
        for e, a in zip(table.e_values, table.a_values):
            est, se = mc_work_oracle(spec, float(e), n=n,
                                     n_samples=args.mc_samples,
                                     seed=spec.master_seed)
            rows.append([e, a, se, "quadrature+mc", n, est])
        header = ["e", "a", "stderr", "method", "n", "mc_estimate"]
    else:
        header = ["e", "a", "stderr", "method", "n"]
        rows = [[e, a, "", table.method, n]
                for e, a in zip(table.e_values, table.a_values)]
    _write_csv(out / "coeff.csv", header, rows)
    _write_manifest(out / "coeff_manifest.json", cfg, started)
    print(f"wrote {out / 'coeff.csv'}")
    return EXIT_OK


def cmd_field_validate(args) -> int:
    started = time.time()
    cfg = load_config(args.config)
    spec = build_field_spec(cfg)
    report = validate(spec.correlation, rng_seed=spec.master_seed)
    lag_taus = np.linspace(0.0, 1.5 * spec.block_length, args.lags)
    lags = [(t, np.array([xl, 0.0]))
            for t in lag_taus
            for xl in np.linspace(0.0, 2.0 * spec.spatial.ell, 3)]
    table = empirical_correlation(spec, lags,
                                  n_realizations=args.realizations)
    out = _out_dir(cfg)
    _write_csv(out / "field_correlation.csv",
               ["tau", "x1", "x2", "target", "estimate", "stderr"],
               [[r.tau, r.x[0], r.x[1], r.target, r.estimate, r.stderr]
                for r in table])
    _write_manifest(out / "field_manifest.json", cfg, started,
                    extra={"model_checks": [
                        {"name": c.name, "passed": c.passed,
                         "residual": c.residual} for c in report.checks]})
    worst = max(abs(r.estimate - r.target) / max(r.stderr, 1e-300)
                for r in table if r.stderr > 0)
    print(f"wrote {out / 'field_correlation.csv'} "
          f"(worst deviation {worst:.2f} stderr)")
    return EXIT_OK


def _init_from_config(cfg: dict):
    init_cfg = cfg.get("kinetics", {}).get("init", {})
    kind = init_cfg.get("kind", "delta")
    if kind == "delta":
        return DeltaInit(e0=float(init_cfg.get("e0", 1.0)))
    if kind == "smooth-bump":
        return SmoothBumpInit(e0=float(init_cfg.get("e0", 1.0)),
                              width=float(init_cfg.get("width", 0.2)))
    raise ConfigError(f"unknown init kind {kind!r}")


def _grid_from_config(cfg: dict) -> EnergyGrid:
    s = cfg.get("she", {})
    return EnergyGrid(float(s.get("e_max", 6.0)), int(s.get("cells", 48)))


def cmd_simulate(args) -> int:
    started = time.time()
    cfg = load_config(args.config)
    k = cfg.get("kinetics", {})
    spec = build_field_spec(cfg)
    grid = _grid_from_config(cfg)
    init = _init_from_config(cfg)
    _, _, n = build_correlation(cfg)
    eps = float(args.epsilon)
    times = cfg.get("outputs", {}).get("times", [k.get("t_end", 1.0)])
    push = PushConfig(t_end=float(k.get("t_end", 1.0)),
                      steps_per_gyro=int(k.get("dt_per_gyro", 64)),
                      output_times=[float(t) for t in times])
    n_real = int(k.get("realizations", 10))
    n_part = int(k.get("particles", 1000))
    per_time = {}
    for i in range(n_real):
        for t, energies in simulate_ensemble(init, spec, eps, n, push,
                                             n_part, spec.master_seed, i):
            profile, _ = gyro_average_histogram(energies, grid)
            per_time.setdefault(t, []).append(profile.density)
    out = _out_dir(cfg)
    rows = []
    for t in sorted(per_time):
        stack = np.array(per_time[t])
        mean = stack.mean(axis=0)
        se = (stack.std(axis=0, ddof=1) / np.sqrt(stack.shape[0])
              if stack.shape[0] > 1 else np.zeros_like(mean))
        for c, m, s in zip(grid.centers, mean, se):
            rows.append([t, c, m, s])
    _write_csv(out / f"simulate_eps{eps}.csv",
               ["time", "e_center", "density", "stderr"], rows)
    _write_manifest(out / f"simulate_eps{eps}_manifest.json", cfg, started,
                    extra={"epsilon": eps, "particles": n_part,
                           "realizations": n_real})
    print(f"wrote {out / f'simulate_eps{eps}.csv'}")
    return EXIT_OK


def cmd_she(args) -> int:
    started = time.time()
    cfg = load_config(args.config)
    model, env, n = build_correlation(cfg)
    grid = _grid_from_config(cfg)
    s = cfg.get("she", {})
    init = _init_from_config(cfg)
    coeff = coefficient_profile(model, np.linspace(0.0, grid.e_max, 65), n=n)
    t_end = float(cfg.get("kinetics", {}).get("t_end", 1.0))
    times = cfg.get("outputs", {}).get("times", [t_end])
    solutions = solve(gaussian_profile(grid, init.e0), coeff, t_end,
                      float(s.get("dt", 1e-3)),
                      output_times=[float(t) for t in times])
    out = _out_dir(cfg)
    rows = [[t, c, d] for t, p in solutions
            for c, d in zip(grid.centers, p.density)]
    _write_csv(out / "she.csv", ["time", "e_center", "density"], rows)
    extra = {}
    if args.fit_window:
        lo, hi = (float(v) for v in args.fit_window.split(","))
        beta, se = self_similar_fit(solutions, (lo, hi))
        extra["fit"] = {"beta_hat": beta, "stderr": se, "window": [lo, hi]}
        (out / "she_fit.json").write_text(json.dumps(extra["fit"]) + "\n")
    _write_manifest(out / "she_manifest.json", cfg, started, extra=extra)
    print(f"wrote {out / 'she.csv'}")
    return EXIT_OK


def _read_profile_csv(path: str):
    with open(path) as fh:
        rd = csv.DictReader(fh)
        rows = [(float(r["e_center"]), float(r["density"])) for r in rd]
    return np.array([r[0] for r in rows]), np.array([r[1] for r in rows])


def cmd_compare(args) -> int:
    ca, da = _read_profile_csv(args.a)
    cb, db = _read_profile_csv(args.b)
    if ca.shape != cb.shape or not np.allclose(ca, cb):
        raise ConfigError("profiles live on different energy grids")
    de = float(ca[1] - ca[0])
    diff = da - db
    result = {
        "l1": float(np.sum(np.abs(diff)) * de),
        "l2": float(np.sqrt(np.sum(diff**2) * de)),
        "w1": float(np.sum(np.abs(np.cumsum(diff) * de)) * de),
    }
    print(json.dumps(result))
    return EXIT_OK


def cmd_study(args) -> int:
    started = time.time()
    cfg = load_config(args.config)
    k = cfg.get("kinetics", {})
    eps_list = [float(e) for e in k.get("epsilons", [0.1, 0.05])]
    _, _, n = build_correlation(cfg)
    exp = ExperimentConfig(
        epsilons=eps_list,
        field_spec=build_field_spec(cfg),
        init=_init_from_config(cfg),
        n=n,
        n_particles=int(k.get("particles", 1000)),
        n_realizations=int(k.get("realizations", 20)),
        grid=_grid_from_config(cfg),
        t_end=float(k.get("t_end", 1.0)),
        output_times=[float(t) for t in
                      cfg.get("outputs", {}).get("times",
                                                 [0.5, float(k.get("t_end", 1.0))])],
        steps_per_gyro=int(k.get("dt_per_gyro", 64)),
        she_dt=float(cfg.get("she", {}).get("dt", 1e-3)),
        master_seed=int(cfg.get("field", {}).get("master_seed", 0)),
        threads=args.threads,
    )
    report = run_convergence_study(exp)
    out = _out_dir(cfg)
    _write_csv(out / "study_rows.csv",
               ["eps", "l1", "l2", "w1", "stderr_l1"],
               [[r.eps, r.l1, r.l2, r.w1, r.stderr_l1] for r in report.rows])
    summary = {
        "note": ("distances are finite-sample surrogates for the weak-L2 "
                 "convergence of the averaged gyro-density"),
        "rows": [{"eps": r.eps, "l1": r.l1, "l2": r.l2, "w1": r.w1,
                  "stderr_l1": r.stderr_l1} for r in report.rows],
        "monotone": report.monotone,
        "artifacts": {"rows_csv": str(out / "study_rows.csv")},
    }
    (out / "study_report.json").write_text(json.dumps(summary, indent=2) + "\n")
    _write_manifest(out / "study_manifest.json", cfg, started)
    print(json.dumps({"monotone": report.monotone,
                      "final_l1": report.rows[-1].l1}))
    return EXIT_OK


def cmd_scaling(args) -> int:
    beta = scaling_exponent(float(args.alpha))
    print(json.dumps({"alpha": float(args.alpha), "beta": beta}))
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gyrodiff")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeff", help="tabulate the diffusion coefficient")
    c.add_argument("--config", required=True)
    c.add_argument("--e", default="0.25,1,4",
                   help="comma-separated energies")
    c.add_argument("--mc", action="store_true",
                   help="also run the Monte Carlo work-integral oracle")
    c.add_argument("--mc-samples", type=int, default=2000)
    c.set_defaults(func=cmd_coeff)

    f = sub.add_parser("field-validate",
                       help="check the synthesized field correlation")
    f.add_argument("--config", required=True)
    f.add_argument("--lags", type=int, default=5)
    f.add_argument("--realizations", type=int, default=400)
    f.set_defaults(func=cmd_field_validate)

    s = sub.add_parser("simulate", help="run one kinetic ensemble")
    s.add_argument("--config", required=True)
    s.add_argument("--epsilon", required=True, type=float)
    s.set_defaults(func=cmd_simulate)

    h = sub.add_parser("she", help="solve the limiting energy diffusion")
    h.add_argument("--config", required=True)
    h.add_argument("--fit-window", default=None,
                   help="t_lo,t_hi for a self-similar exponent fit")
    h.set_defaults(func=cmd_she)

    cp = sub.add_parser("compare", help="distances between two profile CSVs")
    cp.add_argument("a")
    cp.add_argument("b")
    cp.set_defaults(func=cmd_compare)

    st = sub.add_parser("study", help="full kinetic-vs-limit convergence study")
    st.add_argument("--config", required=True)
    st.add_argument("--threads", type=int, default=1)
    st.set_defaults(func=cmd_study)

    sc = sub.add_parser("scaling", help="self-similar exponent beta(alpha)")
    sc.add_argument("--alpha", required=True)
    sc.set_defaults(func=cmd_scaling)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonConvergedQuadrature as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
