"""Command-line entry point: ``walshrecon {transform,compress,sense,ddfilter}``.

Every output file embeds the run configuration (including the seed), and
reruns with identical flags write byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import compression, ddfilter, negligibility, profiles, sensor, stats
from .walsh import Ordering, WalshIndex, as_paley, degree

EXIT_OK, EXIT_VALIDATION, EXIT_SATURATION = 0, 2, 3


class ValidationError(ValueError):
    pass


def _load_profile(spec: str, duration: float) -> profiles.FieldProfile:
    if spec in profiles.CORPUS:
        return profiles.named_profile(spec, duration)
    path = Path(spec)
    if not path.exists():
        raise ValidationError(f"profile {spec!r} is neither a corpus name {sorted(profiles.CORPUS)} "
                              "nor an existing CSV file")
    return profiles.load_profile_csv(path)


def _parse_indices(text: str | None, ordering: str) -> list[int] | None:
    if not text:
        return None
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = (int(x) for x in part.split("-"))
            out.extend(range(a, b + 1))
        elif part:
            out.append(int(part))
    return sorted({as_paley(m, ordering) for m in out})


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def _run_config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["out"] = str(cfg["out"])
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_transform(args) -> int:
    f = _load_profile(args.profile, args.duration)
    indices = _parse_indices(args.indices, args.ordering)
    if indices is None:
        if args.order is None:
            raise ValidationError("transform needs --order or --indices")
        spec = profiles.walsh_spectrum(f, order=args.order)
    else:
        spec = profiles.walsh_spectrum(f, indices)
    out = _out_dir(args)
    data = spec.to_json()
    data["run_config"] = _run_config(args)
    _write_json(out / "spectrum.json", data)
    rows = [(m, WalshIndex(m).sequency, negligibility.rank(m), negligibility.negligibility(m),
             spec[m], abs(spec[m])) for m in spec.indices]
    _write_csv(out / "coefficients.csv",
               ["paley", "sequency", "rank", "negligibility", "coefficient", "magnitude"], rows)
    print(f"{len(spec.indices)} coefficients of {f.name} written to {out}")
    return EXIT_OK


def _plan_from_args(args) -> compression.CompressionPlan:
    method = compression.Method(args.method)
    if method is compression.Method.THRESHOLD and args.p0 is None:
        raise ValidationError("--method threshold needs --p0")
    if method is compression.Method.CPMG_PDD and args.M is None:
        raise ValidationError("--method cpmgpdd needs --M")
    if method in (compression.Method.SUBDEGREE, compression.Method.FULL) and args.order is None:
        raise ValidationError(f"--method {method.value} needs --order")
    return compression.plan_indices(method, M=args.M, p0=args.p0, n=args.order,
                                    cutoff_offset=getattr(args, "cutoff_offset", None))


def cmd_compress(args) -> int:
    f = _load_profile(args.profile, args.duration)
    plan = _plan_from_args(args)
    report = compression.compression_report(f, plan)
    report["run_config"] = _run_config(args)
    out = _out_dir(args)
    _write_json(out / "compression.json", report)
    rec = compression.reconstruct(f, plan)
    level = max(rec.level, args.grid)
    t = (np.arange(2**level) + 0.5) * f.T / 2**level
    _write_csv(out / "reconstruction.csv", ["t", "value", "reconstruction"],
               zip(t, f(t), rec.cell_values(level)))
    print(f"{plan.method.value}: {len(plan)} indices, {plan.pulse_count} pulses, MSQE {report['msqe']:.6g}")
    return EXIT_OK


def cmd_sense(args) -> int:
    f = _load_profile(args.profile, args.duration)
    indices = _parse_indices(args.indices, args.ordering)
    if indices is not None:
        plan = compression.CompressionPlan(compression.Method.FULL, {"indices": indices}, tuple(indices))
    elif args.method:
        plan = _plan_from_args(args)
    elif args.order is not None:
        plan = compression.plan_indices("full", n=args.order)
    else:
        raise ValidationError("sense needs --indices, --method or --order")
    cfg = sensor.SensorConfig(args.gamma, f.T)
    vis = sensor.VisibilityModel(args.t2 if args.t2 else float("inf"), args.stretch, args.t2_scaling)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sensor.SaturationWarning)
        acq = sensor.run_protocol(f, cfg, plan, vis, args.shots, args.seed, noiseless=args.noiseless)
    env = stats.envelope(plan.selected_indices, args.shots, cfg, vis, spectrum=acq.spectrum)
    out = _out_dir(args)
    data = acq.to_json()
    data["envelope_variance"] = env.variance
    data["run_config"] = _run_config(args)
    _write_json(out / "acquisition.json", data)
    level = max(acq.spectrum.level, args.grid)
    t = (np.arange(2**level) + 0.5) * f.T / 2**level
    env.write_csv(out / "envelope.csv", t)
    print(f"envelope variance {env.variance:.6g} (sigma {env.sigma:.6g}) over {len(plan)} coefficients")
    if acq.saturated:
        print(f"saturated coefficients: {acq.saturated}", file=sys.stderr)
        if args.strict:
            return EXIT_SATURATION
    return EXIT_OK


def _spectrum_from_args(args) -> ddfilter.NoiseSpectrum | None:
    if args.noise is None:
        return None
    return ddfilter.NoiseSpectrum(kind=args.noise, amplitude=args.noise_amplitude,
                                  omega_min=args.omega_min, omega_max=args.omega_max,
                                  exponent=args.noise_exponent, cutoff=args.noise_cutoff)


def cmd_ddfilter(args) -> int:
    indices = _parse_indices(args.indices, args.ordering)
    if indices is None:
        raise ValidationError("ddfilter needs --indices")
    n = args.order
    if n is not None:
        bad = [m for m in indices if degree(m) > n]
        if bad:
            raise ValidationError(f"--order {n} is below the degree of indices {bad}")
    grid = np.linspace(args.wt_min, args.wt_max, args.wt_points)
    table = ddfilter.filter_table(indices, n, grid)
    out = _out_dir(args)
    _write_csv(out / "filter.csv", ["omegaT"] + [f"F_{m}" for m in indices],
               zip(grid, *(table[m] for m in indices)))
    noise = _spectrum_from_args(args)
    if noise is not None:
        ranking = ddfilter.rank_by_chi(indices, n, args.duration, noise)
        _write_json(out / "chi_ranking.json", {"ranking": ranking, "run_config": _run_config(args)})
        for row in ranking:
            print(f"m={row['index']:>5}  r={row['rank']}  p={row['negligibility']:>3}  chi={row['chi']:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walshrecon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=Path, default=Path("out"))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--ordering", choices=[o.value for o in Ordering], default="paley",
                       help="ordering used to read --indices")
        p.add_argument("--duration", type=float, default=1.0, help="acquisition time T (s)")
        p.add_argument("--indices", help="comma list or ranges, e.g. 0-7,16")
        p.add_argument("--order", type=int, help="reconstruction order n (first 2**n indices)")

    def plan_flags(p):
        p.add_argument("--method", choices=[m.value for m in compression.Method])
        p.add_argument("--p0", type=int, help="threshold negligibility")
        p.add_argument("--M", type=int, help="number of CPMG and PDD sequences")
        p.add_argument("--cutoff-offset", type=int, dest="cutoff_offset",
                       help="sub-degree rule d' = d - k (default 2)")
        p.add_argument("--grid", type=int, default=8, help="output grid level (2**grid points)")

    p = sub.add_parser("transform", help="Walsh spectrum of a profile")
    common(p)
    p.add_argument("--profile", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("compress", help="compressed reconstruction and its error")
    common(p)
    plan_flags(p)
    p.add_argument("--profile", required=True)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("sense", help="simulated acquisition with shot noise")
    common(p)
    plan_flags(p)
    p.add_argument("--profile", required=True)
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--strict", action="store_true", help="exit 3 when any coefficient saturates")
    p.add_argument("--t2", type=float, default=None)
    p.add_argument("--stretch", type=float, default=1.0)
    p.add_argument("--t2-scaling", type=float, default=0.0, dest="t2_scaling")
    p.set_defaults(func=cmd_sense)

    p = sub.add_parser("ddfilter", help="filter functions and coherence ranking")
    common(p)
    p.add_argument("--wt-min", type=float, default=0.0, dest="wt_min")
    p.add_argument("--wt-max", type=float, default=20.0, dest="wt_max")
    p.add_argument("--wt-points", type=int, default=201, dest="wt_points")
    p.add_argument("--noise", choices=[k.value for k in ddfilter.SpectrumKind if k.value != "tabulated"])
    p.add_argument("--noise-amplitude", type=float, default=1.0, dest="noise_amplitude")
    p.add_argument("--noise-exponent", type=float, default=0.0, dest="noise_exponent")
    p.add_argument("--noise-cutoff", type=float, default=1.0, dest="noise_cutoff")
    p.add_argument("--omega-min", type=float, default=None, dest="omega_min")
    p.add_argument("--omega-max", type=float, default=1.0, dest="omega_max")
    p.set_defaults(func=cmd_ddfilter)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
