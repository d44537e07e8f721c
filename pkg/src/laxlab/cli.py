"""Command-line interface: verify, integrate, closure, and sweep runs.

Configuration is accepted both as command-line flags and as a single JSON
file (``--config path``); flags override file values.  The environment
variable ``LAGMF_SEED`` overrides the configured seed.  Every run writes a
``report.json`` ledger (and, for ``integrate``, a ``trajectory.csv``) into
the output directory.

Exit codes: 0 on full pass, 1 on any identity failure (the failing entries
are printed), 2 on configuration errors (single-line diagnostic).
"""

import argparse
import json
import os
import sys

import numpy as np

from .matrixcore import make_rng
from .models import FAMILY_NAMES, build_model
from .multitime import (closure_residual, commutativity_residual,
                        integrate_path, isospectral_drift)
from .verify import Report, run_suite


class ConfigError(Exception):
    """Raised for malformed or inconsistent run configuration."""


# flag name -> (config key, converter) for model parameters forwarded to
# build_model; complex-valued flags accept Python complex literals ("0.3+1j")
_MODEL_PARAMS = {
    "sites": ("sites", int),
    "T": ("T", int),
    "n": ("n", int),
    "beta": ("beta", complex),
    "tau": ("tau", complex),
    "zeta1": ("zeta1", complex),
    "trunc": ("trunc", int),
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="laxlab",
        description="Integrable-hierarchy laboratory: Lax flows, multitime "
                    "integration, and identity verification.")
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override")
        p.add_argument("--output", help="output directory (default '.')")
        p.add_argument("--model", help="model family")
        p.add_argument("--seed", type=int, help="RNG seed (default 7)")
        p.add_argument("--figures", action="store_true", default=None,
                       help="render PNG figures into the output directory")
        for flag, (_, conv) in _MODEL_PARAMS.items():
            p.add_argument(f"--{flag}", type=str, help=argparse.SUPPRESS)

    p = sub.add_parser("verify", help="run the identity ledger")
    common(p)
    p.add_argument("--step", type=float, help="integrator step (default 1e-3)")
    p.add_argument("--delta", type=float, help="residual leg length (default 0.1)")
    p.add_argument("--skip-algebra", action="store_true", default=None,
                   dest="skip_algebra", help="skip mCYBE/CYBE entries")
    p.add_argument("--skip-elliptic", action="store_true", default=None,
                   dest="skip_elliptic", help="skip elliptic-lattice entries")

    p = sub.add_parser("integrate", help="integrate one flow and emit a trajectory")
    common(p)
    p.add_argument("--flow", help="flow label, e.g. '1' or '1,0'")
    p.add_argument("--duration", type=float, help="flow time (default 1.0)")
    p.add_argument("--step", type=float, help="integrator step (default 1e-3)")
    p.add_argument("--probes", help="comma-separated spectral probes, e.g. '1,2j'")
    p.add_argument("--kmax", type=int, help="max trace power (default 3)")

    p = sub.add_parser("closure", help="closure residual on a flow-pair lattice")
    common(p)
    p.add_argument("--flows", help="flow pair, e.g. '1;2' or '1,0;1,1'")
    p.add_argument("--delta", type=float, help="lattice extent (default 0.1)")
    p.add_argument("--grid", type=int, help="cells per side (default 8)")

    p = sub.add_parser("sweep", help="RK4 order study by step halving")
    common(p)
    p.add_argument("--flows", help="flow pair, e.g. '1;2' or '1,0;1,1'")
    p.add_argument("--delta", type=float, help="leg length (default 0.1)")
    p.add_argument("--base-steps", type=int, dest="base_steps",
                   help="steps per leg at the coarsest level (default 25)")
    p.add_argument("--halvings", type=int, help="number of halvings (default 3)")
    return parser


def _load_config(args):
    """Merge JSON config file with flags; flags win; env seed wins over both."""
    config = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(config, dict):
            raise ConfigError("config file must hold a JSON object")
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        config[key] = value
    for flag, (key, conv) in _MODEL_PARAMS.items():
        if flag in config and isinstance(config[flag], str):
            try:
                config[flag] = conv(config[flag])
            except ValueError as exc:
                raise ConfigError(f"bad value for --{flag}: {exc}")
    env_seed = os.environ.get("LAGMF_SEED")
    if env_seed is not None:
        try:
            config["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"LAGMF_SEED must be an integer, got {env_seed!r}")
    for key in ("step", "delta", "duration", "grid", "base_steps", "halvings"):
        if key in config and not float(config[key]) > 0:
            raise ConfigError(f"{key} must be positive")
    return config


def _parse_flow(text):
    text = str(text).strip()
    if "," in text:
        parts = text.split(",")
        return tuple(int(p) for p in parts)
    return int(text)


def _parse_flow_pair(text):
    parts = str(text).split(";")
    if len(parts) != 2:
        raise ConfigError("flow pair must be two ';'-separated labels")
    return _parse_flow(parts[0]), _parse_flow(parts[1])


def _model_spec(config):
    family = config.get("model")
    if family is None:
        raise ConfigError("a --model family is required for this command")
    spec = {"family": family}
    for flag, (key, _) in _MODEL_PARAMS.items():
        if flag in config:
            spec[key] = config[flag]
    return spec


def _make_model(config):
    try:
        return build_model(_model_spec(config))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _default_flow_pair(model):
    if len(model.flows) < 2:
        raise ConfigError(f"{model.name} exposes a single flow; pass --flows")
    return model.flows[0], model.flows[1]


def _write_report(report, outdir):
    path = os.path.join(outdir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    return path


def _finish(report, outdir, figures=False):
    path = _write_report(report, outdir)
    if figures:
        _render_report_figure(report, outdir)
    npass = sum(1 for e in report.entries if e["pass"])
    print(f"{npass}/{len(report.entries)} identities pass -> {path}")
    if report.ok:
        return 0
    for e in report.failures():
        print(f"FAIL {e['identity']} [{e['model']}] residual "
              f"{e['residual']:.3e} >= tolerance {e['tolerance']:.1e}")
    return 1


def _render_report_figure(report, outdir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [f"{e['identity']}\n{e['model']}" for e in report.entries]
    residuals = [max(e["residual"], 1e-17) for e in report.entries]
    tols = [e["tolerance"] for e in report.entries]
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(labels)), 5))
    xs = np.arange(len(labels))
    ax.bar(xs, residuals, color="tab:blue", label="residual")
    ax.plot(xs, tols, "r_", markersize=10, label="tolerance")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, rotation=90, fontsize=5)
    ax.set_ylabel("residual")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "report.png"), dpi=150)
    plt.close(fig)


def _render_trajectory_figure(traj, outdir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    times = np.asarray(traj.times, dtype=float)
    states = np.stack(traj.states)
    fig, axes = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for k in range(states.shape[1]):
        axes[0].plot(times, states[:, k].real, lw=0.8)
    axes[0].set_ylabel("Re coordinates")
    traces = np.stack([np.asarray(t).ravel() for t in traj.traces])
    drift = np.abs(traces - traces[0])
    for k in range(traces.shape[1]):
        axes[1].plot(times, drift[:, k], lw=0.8)
    axes[1].set_yscale("symlog", linthresh=1e-16)
    axes[1].set_ylabel("|trace drift|")
    axes[1].set_xlabel("path parameter")
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "trajectory.png"), dpi=150)
    plt.close(fig)


def _cmd_verify(config, outdir):
    suite_cfg = {}
    for key in ("seed", "step", "delta", "skip_algebra", "skip_elliptic"):
        if key in config:
            suite_cfg[key] = config[key]
    if "model" in config:
        suite_cfg["model"] = config["model"]
        for flag, (key, _) in _MODEL_PARAMS.items():
            if flag in config:
                suite_cfg[key] = config[flag]
        if suite_cfg["model"] not in FAMILY_NAMES:
            raise ConfigError(
                f"unknown model family {suite_cfg['model']!r}; "
                f"choose from {', '.join(FAMILY_NAMES)}")
    report = run_suite(suite_cfg or None)
    if "model" in suite_cfg and not report.entries:
        raise ConfigError(
            f"model {suite_cfg['model']!r} has no suite entries")
    return _finish(report, outdir, figures=config.get("figures", False))


def _cmd_integrate(config, outdir):
    model = _make_model(config)
    if "flow" not in config:
        raise ConfigError("a --flow label is required for integrate")
    flow = _parse_flow(config["flow"])
    if flow not in model.flows:
        raise ConfigError(f"unknown flow {flow} for {model.name}; "
                          f"choose from {list(model.flows)}")
    duration = float(config.get("duration", 1.0))
    step = float(config.get("step", 1e-3))
    steps = max(1, int(round(duration / step)))
    probes = ()
    if "probes" in config:
        try:
            probes = tuple(complex(p) for p in str(config["probes"]).split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --probes value: {exc}")
    kmax = int(config.get("kmax", 3))
    seed = int(config.get("seed", 7))
    s0 = model.random_state(make_rng(seed))
    traj = integrate_path(model, s0, [(flow, duration, steps)],
                          lam_probes=probes, kmax=kmax)
    csv_path = os.path.join(outdir, "trajectory.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(traj.to_csv())
    print(f"{len(traj.times)} samples -> {csv_path}")

    report = Report()
    report.add("isospectral-drift", model.name,
               {"flow": str(flow), "duration": str(duration),
                "step": str(step), "seed": str(seed)},
               isospectral_drift(traj), 1e-8, 0.0)
    if config.get("figures"):
        _render_trajectory_figure(traj, outdir)
    return _finish(report, outdir)


def _cmd_closure(config, outdir):
    model = _make_model(config)
    if "flows" in config:
        fi, fj = _parse_flow_pair(config["flows"])
    else:
        fi, fj = _default_flow_pair(model)
    for f in (fi, fj):
        if f not in model.flows:
            raise ConfigError(f"unknown flow {f} for {model.name}")
    delta = float(config.get("delta", 0.1))
    grid = int(config.get("grid", 8))
    seed = int(config.get("seed", 7))
    s0 = model.random_state(make_rng(seed))
    report = Report()
    report.add("closure", model.name,
               {"flows": f"{fi};{fj}", "delta": str(delta),
                "grid": str(grid), "seed": str(seed)},
               closure_residual(model, fi, fj, s0, delta=delta, grid=grid),
               1e-5, 0.0)
    return _finish(report, outdir, figures=config.get("figures", False))


def _cmd_sweep(config, outdir):
    model = _make_model(config)
    if "flows" in config:
        fi, fj = _parse_flow_pair(config["flows"])
    else:
        fi, fj = _default_flow_pair(model)
    delta = float(config.get("delta", 0.1))
    base_steps = int(config.get("base_steps", 25))
    halvings = int(config.get("halvings", 3))
    seed = int(config.get("seed", 7))
    s0 = model.random_state(make_rng(seed))

    residuals = []
    for level in range(halvings + 1):
        steps = base_steps * 2 ** level
        residuals.append(commutativity_residual(model, fi, fj, s0,
                                                delta=delta, steps=steps))
    report = Report()
    for level in range(halvings):
        prev, cur = residuals[level], residuals[level + 1]
        factor = prev / cur if cur > 0 else float("inf")
        # RK4 halving should shrink the defect about 16x; outside [8, 32]
        # counts as a failure unless both legs sit on the roundoff floor
        if cur < 1e-12:
            deviation = 0.0
        elif 8.0 <= factor <= 32.0:
            deviation = 0.0
        else:
            deviation = min(abs(factor - 8.0), abs(factor - 32.0))
        report.add("rk4-order", model.name,
                   {"flows": f"{fi};{fj}", "steps": str(base_steps * 2 ** level),
                    "factor": f"{factor:.3f}", "seed": str(seed)},
                   deviation, 1.0, 0.0)
    if config.get("figures"):
        _render_sweep_figure(base_steps, residuals, outdir)
    return _finish(report, outdir)


def _render_sweep_figure(base_steps, residuals, outdir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    steps = [base_steps * 2 ** k for k in range(len(residuals))]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(steps, residuals, "o-", label="commutativity defect")
    ref = residuals[0] * (np.asarray(steps, dtype=float) / steps[0]) ** -4
    ax.loglog(steps, ref, "--", label="4th-order reference")
    ax.set_xlabel("steps per leg")
    ax.set_ylabel("residual")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(outdir, "sweep.png"), dpi=150)
    plt.close(fig)


_COMMANDS = {
    "verify": _cmd_verify,
    "integrate": _cmd_integrate,
    "closure": _cmd_closure,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        config = _load_config(args)
        outdir = str(config.get("output", "."))
        os.makedirs(outdir, exist_ok=True)
        return _COMMANDS[args.command](config, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NotImplementedError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
