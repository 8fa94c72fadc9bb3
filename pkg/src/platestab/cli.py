"""Command-line front end for reproducible plate-stability experiments.

Subcommands
-----------
eigen          global eigenvalue ordering up to a ceiling
simulate       one perturbed two-mode run in the rescaled frame
floquet        monodromy verdicts over an energy grid
scan-amplitude instability intervals over a u0 sweep
scan-damping   minimal stabilizing damping at one amplitude

Parameters resolve in three layers: built-in defaults, then an optional
config file (INI sections [plate], [run]), then command-line flags.  All
numeric output is full-precision scientific notation and runs are fully
deterministic, so identical configurations produce byte-identical reports.

Exit status: 0 on success, 1 on validation or numeric failure, 2 on
precondition failures (for example an onset search outside an instability
interval).
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .plate import Parity, PlateConfig, PlateModelError, PreconditionError
from . import spectrum as _spectrum
from .dynamics import TwoModeSystem
from . import floquet as _floquet
from . import scan as _scan

_PLATE_KEYS = ("l", "sigma", "P", "S", "delta")


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def _provenance(cfg: PlateConfig, extra: dict | None = None) -> list[str]:
    lines = [
        f"# platestab {__version__}",
        f"# l={_fmt(cfg.half_width_l)}",
        f"# sigma={_fmt(cfg.poisson_sigma)}",
        f"# P={_fmt(cfg.prestress_P)}",
        f"# S={_fmt(cfg.stiffness_S)}",
        f"# delta={_fmt(cfg.damping_delta)}",
    ]
    for key, val in (extra or {}).items():
        lines.append(f"# {key}={val}")
    return lines


def _load_config_file(path: str) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise PlateModelError(f"config file {path!r} not found")
    values: dict[str, str] = {}
    for section in parser.sections():
        for key, val in parser.items(section):
            values[key] = val
    return values


def _resolve_plate(args, file_values: dict) -> PlateConfig:
    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return float(file_values[key])
        return default

    return PlateConfig(
        half_width_l=pick(args.l, "l", math.pi / 150.0),
        poisson_sigma=pick(args.sigma, "sigma", 0.2),
        prestress_P=pick(args.P, "P", 0.48),
        stiffness_S=pick(args.S, "S", 3.0),
        damping_delta=pick(args.delta, "delta", 0.0),
    )


def _pick(args, file_values: dict, name: str, default, cast=float):
    val = getattr(args, name.replace("-", "_"), None)
    if val is not None:
        return val
    if name in file_values:
        return cast(file_values[name])
    return default


def _mode_pair(args, file_values, cfg: PlateConfig):
    """Resolve the (m, i) longitudinal and (n, k) torsional pairing.

    The default pairing perturbs the m-th longitudinal branch by the n-th
    torsional one; --carrier torsional swaps the roles.
    """
    m = int(_pick(args, file_values, "m", 6, int))
    i = int(_pick(args, file_values, "i", 1, int))
    n = int(_pick(args, file_values, "n", 2, int))
    k = int(_pick(args, file_values, "k", 1, int))
    carrier = _pick(args, file_values, "carrier", "longitudinal", str)
    long_pair = _spectrum.find_eigenvalues(
        m, Parity.LONGITUDINAL, i, cfg, search_ceiling=max(200.0, 4.0 * m * m)
    )[i - 1]
    tors_pair = _spectrum.find_eigenvalues(
        n, Parity.TORSIONAL, k, cfg, search_ceiling=2e4 * k * k
    )[k - 1]
    if carrier == "torsional":
        return TwoModeSystem.from_eigenpairs(tors_pair, long_pair, cfg)
    return TwoModeSystem.from_eigenpairs(long_pair, tors_pair, cfg)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_eigen(args, file_values) -> int:
    cfg = _resolve_plate(args, file_values)
    ceiling = _pick(args, file_values, "ceiling", 100.0)
    ordering = _spectrum.global_ordering(cfg, ceiling)
    out = _out_dir(args)
    ext = "csv" if args.format == "csv" else "txt"
    path = out / f"eigen_report.{ext}"
    _spectrum.write_eigen_report(
        ordering.pairs, path, cfg, fmt="csv" if ext == "csv" else "text",
        version=__version__,
    )
    if ordering.first_torsional_index is None:
        print(f"eigenvalues below {ceiling:g}: {len(ordering.pairs)}; no torsional entry")
    else:
        k = ordering.first_torsional_index
        print(
            f"eigenvalues below {ceiling:g}: {len(ordering.pairs)}; "
            f"first torsional entry at position {k + 1} "
            f"(Lambda={_fmt(ordering.pairs[k].Lambda)})"
        )
    print(f"report written to {path}")
    return 0


def cmd_simulate(args, file_values) -> int:
    cfg = _resolve_plate(args, file_values)
    system = _mode_pair(args, file_values, cfg)
    u0 = _pick(args, file_values, "u0", 24.3)
    horizon = _pick(args, file_values, "horizon", 60.0)
    ratio = _pick(args, file_values, "perturbation-ratio", 1e-3)
    if u0 < 0.0:
        raise PlateModelError("u0 must be nonnegative")
    out = _out_dir(args)
    if u0 == 0.0:
        times = np.linspace(0.0, horizon, 2401)
        states = np.zeros((times.size, 4))
    else:
        times, states = _scan.integrate_rescaled(
            system, u0, horizon=horizon, perturbation_ratio=ratio
        )
    energies = np.array(
        [_scan.rescaled_energy(row, system.mu, system.nu, system.gamma) for row in states]
    )
    header = _provenance(
        cfg,
        {
            "carrier_m": system.m,
            "carrier_parity": system.primary.parity.value,
            "perturbation_n": system.n,
            "u0": _fmt(u0),
            "horizon": _fmt(horizon),
            "frame": "rescaled",
        },
    )
    path = out / "trajectory.csv"
    lines = header + ["t,phi,phi_dot,psi,psi_dot,energy"]
    for t, row, E in zip(times, states, energies):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row] + [_fmt(E)]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    for name, col in (("series_phi.dat", 0), ("series_psi.dat", 2)):
        with open(out / name, "w", encoding="utf-8") as fh:
            for t, row in zip(times, states):
                fh.write(f"{_fmt(t)} {_fmt(row[col])}\n")
    psi0 = abs(states[0, 2])
    growth = float(np.max(np.abs(states[:, 2])) / psi0) if psi0 > 0 else 0.0
    print(f"growth factor G = {_fmt(growth)}")
    print(f"energy drift = {_fmt(float(np.max(np.abs(energies - energies[0]))))}")
    print(f"trajectory written to {path}")
    return 0


def cmd_floquet(args, file_values) -> int:
    cfg = _resolve_plate(args, file_values)
    system = _mode_pair(args, file_values, cfg)
    u0 = _pick(args, file_values, "u0", 30.0)
    points = int(_pick(args, file_values, "grid", 40, int))
    e_top = _floquet.duffing_energy(system.mu, u0) * system.S
    grid = np.geomspace(e_top / 1e3, e_top, points)
    results = _floquet.stability_over_energy(system, grid)
    out = _out_dir(args)
    path = out / "stability_scan.csv"
    _floquet.write_stability_scan_csv(
        system, results, path, header_lines=_provenance(cfg, {"grid": points})
    )
    n_unstable = sum(1 for r in results if r.verdict is _floquet.StabilityVerdict.UNSTABLE)
    print(f"{n_unstable} of {len(results)} grid energies unstable")
    print(f"scan written to {path}")
    return 0


def cmd_scan_amplitude(args, file_values) -> int:
    cfg = _resolve_plate(args, file_values)
    system = _mode_pair(args, file_values, cfg)
    lo = _pick(args, file_values, "u0-min", 15.0)
    hi = _pick(args, file_values, "u0-max", 35.0)
    points = int(_pick(args, file_values, "grid", 200, int))
    spec = _scan.ScanSpec(system=system, u0_range=(lo, hi), grid_points=points)
    report = _scan.find_instability_intervals(spec)
    out = _out_dir(args)
    header = _provenance(cfg)
    if args.format == "csv":
        _scan.write_samples_csv(report, out / "scan_samples.csv", header_lines=header)
    _scan.write_scan_report(report, out / "scan_report.txt", header_lines=header)
    if report.intervals:
        for (a, b), (ea, eb) in zip(report.intervals, report.interval_energies):
            print(f"instability interval u0 in ({_fmt(a)}, {_fmt(b)}) "
                  f"energy in ({_fmt(ea)}, {_fmt(eb)})")
    else:
        print("no instability interval detected")
    print(f"report written to {out / 'scan_report.txt'}")
    return 0


def cmd_scan_damping(args, file_values) -> int:
    cfg = _resolve_plate(args, file_values)
    system = _mode_pair(args, file_values, cfg)
    u0 = _pick(args, file_values, "u0", 24.3)
    delta_hi = _pick(args, file_values, "delta-hi", 0.05)
    lo = _pick(args, file_values, "u0-min", 10.0)
    hi = _pick(args, file_values, "u0-max", 40.0)
    spec = _scan.ScanSpec(system=system, u0_range=(lo, hi))
    threshold = _scan.damping_threshold(system, u0, spec, delta_hi)
    original = threshold * system.m * math.sqrt(system.S)
    out = _out_dir(args)
    path = out / "damping_threshold.txt"
    lines = ["[meta]"]
    lines += [s.lstrip("# ") for s in _provenance(cfg)]
    lines += [
        "[result]",
        f"u0 = {_fmt(u0)}",
        f"delta_rescaled = {_fmt(threshold)}",
        f"delta_original = {_fmt(original)}",
        "note = rescaled damping times m sqrt(S) gives the original coefficient",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"minimal stabilizing damping (rescaled frame) = {_fmt(threshold)}")
    print(f"equivalent original-variable damping = {_fmt(original)}")
    print(f"report written to {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platestab",
        description="Spectrum, modal dynamics, and stability of a hinged-free plate deck",
    )
    parser.add_argument("--version", action="version", version=f"platestab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file; flags override it")
        p.add_argument("--l", type=float, help="half width of the plate")
        p.add_argument("--sigma", type=float, help="Poisson ratio in (0, 1/2)")
        p.add_argument("--P", type=float, help="prestress")
        p.add_argument("--S", type=float, help="stretching stiffness")
        p.add_argument("--delta", type=float, help="damping coefficient")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", choices=("csv", "text"), default="csv")

    def modes(p):
        p.add_argument("--m", type=int, help="longitudinal x-frequency")
        p.add_argument("--i", type=int, help="longitudinal branch index")
        p.add_argument("--n", type=int, help="torsional x-frequency")
        p.add_argument("--k", type=int, help="torsional branch index")
        p.add_argument(
            "--carrier",
            choices=("longitudinal", "torsional"),
            help="which mode carries the large initial amplitude",
        )

    p = sub.add_parser("eigen", help="global eigenvalue ordering")
    common(p)
    p.add_argument("--ceiling", type=float, help="largest eigenvalue to report")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("simulate", help="one perturbed two-mode run")
    common(p)
    modes(p)
    p.add_argument("--u0", type=float, help="carrier initial amplitude (rescaled)")
    p.add_argument("--horizon", type=float, help="integration horizon")
    p.add_argument("--perturbation-ratio", type=float, dest="perturbation_ratio")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("floquet", help="monodromy verdicts over an energy grid")
    common(p)
    modes(p)
    p.add_argument("--u0", type=float, help="amplitude defining the top grid energy")
    p.add_argument("--grid", type=int, help="number of grid energies")
    p.set_defaults(func=cmd_floquet)

    p = sub.add_parser("scan-amplitude", help="instability intervals over a u0 sweep")
    common(p)
    modes(p)
    p.add_argument("--u0-min", type=float, dest="u0_min")
    p.add_argument("--u0-max", type=float, dest="u0_max")
    p.add_argument("--grid", type=int, help="sweep grid points")
    p.set_defaults(func=cmd_scan_amplitude)

    p = sub.add_parser("scan-damping", help="minimal stabilizing damping at one u0")
    common(p)
    modes(p)
    p.add_argument("--u0", type=float, help="carrier amplitude (rescaled)")
    p.add_argument("--delta-hi", type=float, dest="delta_hi", help="bisection upper bound")
    p.set_defaults(func=cmd_scan_damping)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        file_values = _load_config_file(args.config) if args.config else {}
        return args.func(args, file_values)
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 2
    except (PlateModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
