"""Command-line front end.

Subcommands write CSV tables and JSON summaries into ``--out`` together with
one ``<command>.manifest.json`` per run. Exit codes: 0 success, 1 validation
failure, 2 bad input.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import __version__
from .capacity import convergence_study
from .channel import assemble, gram_defect
from .config import ConfigError, PhysicalConfig
from .dof import dof_sweep
from .power import ETA, IDENTITY_NOTE, mode_table
from .validation import all_passed, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# flag name -> config key; flags carry SI unit suffixes
_PHYS_FLAGS = {
    "k_rad_per_m": "k",
    "r_v_m": "r_v",
    "r_s_m": "r_s",
    "alpha": "alpha",
    "n_max": "n_max",
    "power_w": "power_w",
    "n0_w_per_hz": "n0_w_per_hz",
    "bandwidth_hz": "bandwidth_hz",
    "dipole_len_over_lambda": "dipole_len_over_lambda",
}


class UsageError(Exception):
    pass


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _float_list(text, name):
    if text is None:
        return None
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"--{name}: {exc}") from exc
    return vals


def _int_list(text, name):
    vals = _float_list(text, name)
    if vals is None:
        return None
    if any(v != int(v) for v in vals):
        raise UsageError(f"--{name} takes integers")
    return [int(v) for v in vals]


def load_config(args):
    data = PhysicalConfig().to_dict()
    if args.config:
        data.update(PhysicalConfig.from_json(args.config).to_dict())
    for flag, key in _PHYS_FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            data[key] = val
    if args.seed is not None:
        data["seed"] = args.seed
    return PhysicalConfig.from_dict(data)


class Run:
    """Collects outputs of one command and writes its manifest."""

    def __init__(self, command, args, config):
        self.command = command
        self.out = args.out
        self.config = config
        self.outputs = []

    def write(self, name, text):
        path = os.path.join(self.out, name)
        _write_atomic(path, text)
        self.outputs.append(name)
        return path

    def finish(self, notes=None, eta=ETA):
        manifest = {
            "command": self.command,
            "tool_version": __version__,
            "config": self.config.to_dict(),
            "seed": self.config.seed,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "outputs": self.outputs,
            "eta_ohm": eta,
            "notes": [IDENTITY_NOTE] + list(notes or []),
        }
        _write_atomic(os.path.join(self.out, f"{self.command}.manifest.json"), _json_text(manifest))


def cmd_rad_resistance(args, config):
    n_max = args.n_max if args.n_max is not None else config.n_max
    if n_max < 1:
        raise UsageError("rad-resistance needs n_max >= 1")
    tab = mode_table(n_max, config.k, config.r_s, config.r_v, config.eta)
    run = Run("rad-resistance", args, config)
    rows = [
        (i + 1, n, m, l, float(tab.T[i]), float(tab.R_rad[i]))
        for i, (n, m, l) in enumerate(tab.modes)
    ]
    run.write("rad_resistance.csv", _csv_text(["p", "n", "m", "l", "T_p", "R_rad_ohm"], rows))
    run.write("mode_table.csv", tab.to_csv())
    r_max = float(tab.R_rad.max())
    kR_V = config.k * config.r_v
    decay = None
    for i, (n, _, _) in enumerate(tab.modes):
        if n > kR_V and tab.R_rad[i] < 1e-3 * r_max:
            decay = n
            break
    summary = {
        "kR_V": kR_V,
        "n_max": n_max,
        "max_R_rad_ohm": r_max,
        "decay_index_n": decay,
        "rows": len(rows),
    }
    run.write("rad_resistance_summary.json", _json_text(summary))
    run.finish()
    return EXIT_OK


def cmd_ortho_check(args, config):
    n_list = _int_list(args.n_list, "n-list") or [config.n_dipoles]
    rows = []
    for N in n_list:
        cfg = config.with_dipoles(N)
        ch = assemble(cfg)
        off, diag = gram_defect(ch.phi)
        rows.append((cfg.n_dipoles, cfg.n_modes, off, diag))
    run = Run("ortho-check", args, config)
    run.write("ortho_check.csv", _csv_text(["N", "M", "max_offdiag", "max_diag_err"], rows))
    run.finish()
    if args.strict and max(rows[-1][2], rows[-1][3]) > 0.05:
        print(f"final Gram defect exceeds 0.05 at N={rows[-1][0]}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_capacity_sweep(args, config):
    m_list = _int_list(args.m_list, "m-list") or [config.n_modes]
    n_list = _int_list(args.n_list, "n-list") or [config.n_dipoles]
    try:
        rows = convergence_study(config, m_list, n_list)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    header = ["M", "N", "rate_finite", "rate_closed_form", "rate_limit", "ratio_to_limit"]
    run = Run("capacity-sweep", args, config)
    run.write("capacity_sweep.csv", _csv_text(header, [[r[h] for h in header] for r in rows]))
    run.finish()
    last = rows[-1]
    if args.strict and abs(last["rate_finite"] / last["rate_closed_form"] - 1) > 0.05:
        return EXIT_FAIL
    return EXIT_OK


def cmd_dof(args, config):
    radii = _float_list(args.r_v_over_lambda, "r-v-over-lambda")
    if radii is None:
        radii = [0.5 + 0.25 * i for i in range(15)]
    thresholds = _float_list(args.thresholds_ohm, "thresholds-ohm")
    if not thresholds:
        raise UsageError("need at least one threshold (--thresholds-ohm)")
    if not radii or min(radii) <= 0 or min(thresholds) <= 0:
        raise UsageError("radii and thresholds must be positive")
    curve = dof_sweep(radii, thresholds)
    run = Run("dof-count", args, config)
    run.write("dof.csv", _csv_text(["r_v_over_lambda", "threshold_ohm", "dof"], curve.rows()))
    summary = {
        "slopes_vs_area": {str(t): s for t, s in curve.slopes.items()},
        "r_squared": {str(t): s for t, s in curve.r_squared.items()},
        "violations": curve.violations(),
    }
    run.write("dof_summary.json", _json_text(summary))
    run.finish()
    if curve.violations():
        for v in curve.violations():
            print(f"monotonicity violation: {v}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_validate(args, config):
    eta = args.eta_ohm if args.eta_ohm is not None else ETA
    report = run_all(config, eta=eta)
    ok = all_passed(report)
    run = Run("validate", args, config)
    run.write("validate.json", _json_text({"passed": ok, "eta_ohm": eta, "checks": report}))
    run.finish(eta=eta)
    for item in report:
        flag = "PASS" if item["passed"] else "FAIL"
        print(f"{flag} {item['name']}: {item['measured']:.3e} (tol {item['tolerance']:.1e})")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, help="RNG seed (u64)")
    common.add_argument("--strict", action="store_true", help="fail on tolerance breaches")
    common.add_argument("--k-rad-per-m", type=float)
    common.add_argument("--r-v-m", type=float)
    common.add_argument("--r-s-m", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--power-w", type=float)
    common.add_argument("--n0-w-per-hz", type=float)
    common.add_argument("--bandwidth-hz", type=float)
    common.add_argument("--dipole-len-over-lambda", type=float)

    parser = argparse.ArgumentParser(prog="wavecap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rad-resistance", parents=[common], help="per-mode radiation resistance")
    p.add_argument("--n-max", type=int)
    p.set_defaults(func=cmd_rad_resistance)

    p = sub.add_parser("ortho-check", parents=[common], help="Gram-matrix convergence")
    p.add_argument("--n-max", type=int)
    p.add_argument("--n-list", help="comma-separated dipole counts")
    p.set_defaults(func=cmd_ortho_check)

    p = sub.add_parser("capacity-sweep", parents=[common], help="capacity over (M, N)")
    p.add_argument("--n-max", type=int)
    p.add_argument("--m-list", help="comma-separated mode counts (full shells)")
    p.add_argument("--n-list", help="comma-separated dipole counts")
    p.set_defaults(func=cmd_capacity_sweep)

    p = sub.add_parser("dof-count", parents=[common], help="threshold degrees of freedom")
    p.add_argument("--n-max", type=int)
    p.add_argument("--r-v-over-lambda", help="comma-separated source radii in wavelengths")
    p.add_argument("--thresholds-ohm", default="10,25", help="comma-separated thresholds")
    p.set_defaults(func=cmd_dof)

    p = sub.add_parser("validate", parents=[common], help="run the invariant suite")
    p.add_argument("--n-max", type=int)
    p.add_argument("--eta-ohm", type=float, help="override eta in the closed forms")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = load_config(args)
        if args.command != "rad-resistance" and args.n_max is not None:
            config = config.replace(n_max=args.n_max)
        return args.func(args, config)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
