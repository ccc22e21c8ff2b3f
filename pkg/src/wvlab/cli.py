"""Command line interface.

Subcommands:
  sweep      run the measurement-strength sweep and write CSV/JSON results
  estimate   invert one intensity set (JSON in, JSON out on stdout)
  verify     run the analytic self-checks (decomposition, plates, interferometer)
  plot-data  reshape a sweep JSON into per-figure CSV series (x = epsilon,
             y = ln sigma_bar / ln delta_bar per parameter)

Exit codes: 0 success, 1 usage error, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .circuits import ExperimentSetting, verify_decomposition
from .errors import WeakValueLabError
from .estimator import IntensitySet, invert_weak_value, reconstruct_preselection
from .gates import ID2, SIGMA_Z
from .noise import paper_noise_model
from .optics import (
    OpticalAxisVector,
    interferometer_unitary,
    phase_aligned_distance,
    ua_adjoint_from_plates,
    ua_exponential,
    ua_from_plates,
)
from .sweep import (
    SweepConfig,
    emit_csv,
    emit_json,
    load_sweep_document,
    merit_series,
    run_sweep,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="wvlab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a measurement-strength sweep")
    p_sweep.add_argument("--config", help="JSON sweep configuration file")
    p_sweep.add_argument("--out-csv", help="write per-point rows as CSV")
    p_sweep.add_argument("--out-json", help="write config, rows, and merits as JSON")
    p_sweep.add_argument("--seed", type=int, help="override the master seed")
    p_sweep.add_argument(
        "--noise",
        help="'none', 'paper', or a noise-model JSON file (overrides the config)",
    )
    p_sweep.add_argument(
        "--exact", action="store_true", help="exact-probability mode (shots = 0)"
    )
    p_sweep.add_argument("--threads", type=int, default=1, help="worker threads")

    p_est = sub.add_parser("estimate", help="invert a measured intensity set")
    p_est.add_argument("input", help="JSON file with epsilon, i0..i5, sigma_i0..sigma_i5")

    sub.add_parser("verify", help="run the analytic self-checks")

    p_plot = sub.add_parser("plot-data", help="reshape a sweep JSON into figure CSVs")
    p_plot.add_argument("input", help="sweep JSON produced by the sweep subcommand")
    p_plot.add_argument("--out-dir", default=".", help="directory for the CSV files")

    return parser


def _load_json_file(path):
    with open(path) as fh:
        return json.load(fh)


def _cmd_sweep(args) -> int:
    d = _load_json_file(args.config) if args.config else {}
    if not isinstance(d, dict):
        raise ValueError("sweep config must be a JSON object")
    if args.seed is not None:
        d["master_seed"] = args.seed
    if args.exact:
        d["shots"] = 0
    if args.noise is not None:
        if args.noise == "none":
            d["noise"] = None
        elif args.noise == "paper":
            d["noise"] = paper_noise_model().to_dict()
        else:
            d["noise"] = _load_json_file(args.noise)
    cfg = SweepConfig.from_dict(d)
    if args.threads < 1:
        raise ValueError("--threads must be >= 1")
    rows, merits = run_sweep(cfg, threads=args.threads)
    if args.out_csv:
        emit_csv(rows, args.out_csv)
    if args.out_json:
        emit_json(cfg, rows, merits, args.out_json)
    n_err = sum(1 for r in rows if r.error)
    print(f"sweep: {len(rows)} points, {len(merits)} merit rows, {n_err} error rows")
    return EXIT_OK


def _c2pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def _cmd_estimate(args) -> int:
    doc = _load_json_file(args.input)
    if "epsilon" not in doc:
        raise ValueError("estimate input must carry 'epsilon'")
    epsilon = float(doc.pop("epsilon"))
    phase_mode = doc.pop("phase_mode", "signed")
    iset = IntensitySet.from_dict(doc)
    est = invert_weak_value(iset, epsilon)
    pre = reconstruct_preselection(iset, epsilon, phase_mode)
    out = {
        "epsilon": epsilon,
        "phase_mode": phase_mode,
        "weak_value": {
            "R": est.R,
            "I": est.I,
            "mag2": est.mag2,
            "sigma_R": est.sigma_R,
            "sigma_I": est.sigma_I,
            "mag2_discrepancy": est.mag2_discrepancy,
        },
        "preselection": {
            "nu": pre.nu,
            "alpha": pre.alpha,
            "phi": pre.phi,
            "pi_plus": _c2pair(pre.pi_plus),
            "pi_minus": _c2pair(pre.pi_minus),
            "state": [_c2pair(pre.state[0]), _c2pair(pre.state[1])],
            "sigma_nu": pre.sigma_nu,
            "sigma_alpha": pre.sigma_alpha,
            "sigma_phi": pre.sigma_phi,
        },
    }
    json.dump(out, sys.stdout, indent=2)
    print()
    return EXIT_OK


def _verify_checks():
    rng = np.random.default_rng(20240131)

    dev = 0.0
    for _ in range(100):
        eps, phi = rng.uniform(-math.pi, math.pi, 2)
        dev = max(dev, verify_decomposition(ExperimentSetting(eps, phi, 0.0)))
    yield "gate decomposition vs closed-form evolution", dev, 1e-12

    dev = 0.0
    for theta in np.linspace(0.0, math.pi, 10):
        for varphi in np.linspace(-math.pi, math.pi, 10):
            for eps in np.linspace(0.01, math.pi - 0.01, 10):
                axis = OpticalAxisVector(theta, varphi)
                dev = max(
                    dev,
                    phase_aligned_distance(ua_from_plates(axis, eps), ua_exponential(axis, eps)),
                )
    yield "wave-plate synthesis vs matrix exponential", dev, 1e-9

    dev = 0.0
    for theta in np.linspace(0.1, math.pi - 0.1, 5):
        for varphi in np.linspace(-3.0, 3.0, 5):
            for eps in np.linspace(0.1, math.pi - 0.1, 5):
                axis = OpticalAxisVector(theta, varphi)
                dev = max(
                    dev,
                    phase_aligned_distance(
                        ua_adjoint_from_plates(axis, eps), ua_from_plates(axis, eps).conj().T
                    ),
                )
    yield "reverse-order plate rule vs adjoint", dev, 1e-9

    dev = 0.0
    for _ in range(25):
        theta = rng.uniform(0.0, math.pi)
        varphi = rng.uniform(-math.pi, math.pi)
        eps = rng.uniform(0.05, math.pi - 0.05)
        axis = OpticalAxisVector(theta, varphi)
        u_a = ua_exponential(axis, -eps)  # exp(+i eps sigma_n)
        assembled = interferometer_unitary(u_a.conj().T, u_a, u_a, u_a.conj().T)
        target = math.cos(eps) * np.kron(ID2, ID2) - 1j * math.sin(eps) * np.kron(
            axis.sigma, SIGMA_Z
        )
        dev = max(dev, phase_aligned_distance(assembled, target))
    yield "interferometer assembly vs evolution operator", dev, 1e-10


def _cmd_verify(_args) -> int:
    failed = False
    for name, dev, bound in _verify_checks():
        ok = dev < bound
        failed = failed or not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: max deviation {dev:.3e} (bound {bound:.0e})")
    return EXIT_VALIDATION if failed else EXIT_OK


_FIGURE_FILES = {
    "fig_weakvalue.csv": ("R", "I"),
    "fig_preselection.csv": ("nu", "alpha", "phi"),
}


def _cmd_plot_data(args) -> int:
    import os

    doc = load_sweep_document(args.input)
    series = merit_series(doc["merits"])
    written = []
    for fname, params in _FIGURE_FILES.items():
        path = os.path.join(args.out_dir, fname)
        header = ["epsilon"]
        for p in params:
            header += [f"ln_sigma_{p}", f"ln_delta_{p}"]
        by_eps: dict[float, dict] = {}
        for p in params:
            for eps, ls, ld in series[p]:
                by_eps.setdefault(eps, {})[p] = (ls, ld)
        lines = [",".join(header)]
        for eps in sorted(by_eps):
            cells = [repr(float(eps))]
            for p in params:
                ls, ld = by_eps[eps].get(p, (None, None))
                cells.append("" if ls is None else repr(float(ls)))
                cells.append("" if ld is None else repr(float(ld)))
            lines.append(",".join(cells))
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(path)
    print("wrote " + ", ".join(written))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit:
        # argparse exits itself on --help; treat that as success
        return EXIT_OK
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_plot_data(args)
    except (OSError, json.JSONDecodeError) as exc:
        # unreadable/unwritable files and malformed JSON
        if isinstance(exc, json.JSONDecodeError):
            print(f"validation error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (WeakValueLabError, ValueError, KeyError, TypeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
