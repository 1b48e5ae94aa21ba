"""Command-line interface.

Subcommands:
  sample         draw variates (complex as "re,im" lines, power as scalars)
  density-grid   export density values on a grid as CSV
  kurtosis-sweep export the excess-kurtosis comparison sweep as CSV
  fit-spectra    run the patchwise model-comparison experiment on WAV input
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import (
    AmplitudeParams,
    ComplexParams,
    PowerParams,
    complex_density_rows,
    scalar_density_rows,
)
from .moments import kurtosis_sweep
from .sampling import rng_stream, sample_complex, sample_power
from .spectral import StftConfig, run_experiment, sweep_windows

MODEL_ALIASES = {
    "exp": "exponential",
    "exponential": "exponential",
    "gamma": "gamma",
    "ncgamma": "noncentral_gamma",
    "noncentral_gamma": "noncentral_gamma",
    "proposed": "proposed",
}


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _cmd_sample(args) -> int:
    rng = rng_stream(args.seed)
    out, close = _open_out(args.out)
    try:
        if args.kind == "complex":
            p = ComplexParams(
                mu=complex(args.mu_re, args.mu_im), sigma2=args.sigma2, alpha=args.alpha
            )
            draws = sample_complex(p, rng, size=args.count, method=args.method)
            for z in draws:
                out.write(f"{z.real:.17g},{z.imag:.17g}\n")
        else:
            p = PowerParams(alpha=args.alpha, beta=args.beta, lam=args.lam)
            draws = sample_power(p, rng, size=args.count, method=args.method)
            for x in draws:
                out.write(f"{x:.17g}\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_density_grid(args) -> int:
    out, close = _open_out(args.out)
    writer = csv.writer(out)
    try:
        if args.kind == "complex":
            p = ComplexParams(
                mu=complex(args.mu_re, args.mu_im), sigma2=args.sigma2, alpha=args.alpha
            )
            writer.writerow(["re", "im", "density"])
            rows = complex_density_rows(
                p,
                (args.re_min, args.re_max),
                (args.im_min, args.im_max),
                args.n,
                args.n,
            )
            writer.writerows(rows)
        else:
            writer.writerow(["x", "density"])
            if args.kind == "amplitude":
                params = AmplitudeParams(nu=args.nu, sigma2=args.sigma2, alpha=args.alpha)
            else:
                params = PowerParams(alpha=args.alpha, beta=args.beta, lam=args.lam)
            rows = scalar_density_rows(args.kind, params, args.x_min, args.x_max, args.n)
            writer.writerows(rows)
    finally:
        if close:
            out.close()
    return 0


def _cmd_kurtosis_sweep(args) -> int:
    lambdas = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    alphas = [float(a) for a in args.alphas.split(",")]
    out, close = _open_out(args.out)
    writer = csv.writer(out)
    try:
        writer.writerow(["lambda", "alpha", "gamma2_proposed", "gamma2_ncgamma"])
        writer.writerows(kurtosis_sweep(lambdas, alphas, beta=args.beta))
    finally:
        if close:
            out.close()
    return 0


def _collect_wavs(input_path: str) -> list[str]:
    p = Path(input_path)
    if p.is_dir():
        found = sorted(str(f) for f in p.rglob("*") if f.suffix.lower() == ".wav")
        if not found:
            raise SystemExit(f"no .wav files under {p}")
        return found
    return [str(p)]


def _cmd_fit_spectra(args) -> int:
    paths = _collect_wavs(args.input)
    models = []
    for name in args.models.split(","):
        key = name.strip().lower()
        if key not in MODEL_ALIASES:
            raise SystemExit(f"unknown model {name!r}; choose from {sorted(MODEL_ALIASES)}")
        canonical = MODEL_ALIASES[key]
        if canonical not in models:
            models.append(canonical)
    stft = StftConfig(frame_ms=args.frame_ms, hop_ms=args.hop_ms, window=args.window)
    kwargs = dict(
        models=models,
        floor_eps=args.floor_eps,
        seed=args.seed,
        patch_freq=args.patch_freq,
        patch_time=args.patch_time,
        fit_scope=args.fit_scope,
    )

    if args.sweep:
        reports = sweep_windows(paths, stft, **kwargs)
        for window, report in reports.items():
            out_path = Path(args.out)
            target = out_path.with_name(f"{out_path.stem}.{window}{out_path.suffix}")
            target.write_text(report.to_json())
            print(f"[{window}]")
            for m in models:
                print(f"  {m:>17s}: avg LL {report.models[m]['avg_ll']:10.3f}")
            print(f"  report: {target}")
        return 0

    report = run_experiment(paths, stft, **kwargs)
    Path(args.out).write_text(report.to_json())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows(report.csv_rows())
    for m in models:
        line = f"{m:>17s}: avg LL {report.models[m]['avg_ll']:10.3f}"
        if m in report.tests:
            line += f"   p vs proposed {report.tests[m]:.3g}"
        print(line)
    print(f"report: {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwncg",
        description="Power-weighted noncentral complex Gaussian toolbox",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sample", help="draw variates, one per line")
    ps.add_argument("--kind", choices=["complex", "power"], default="power")
    ps.add_argument("--alpha", type=float, required=True)
    ps.add_argument("--sigma2", type=float, default=1.0, help="complex kind only")
    ps.add_argument("--mu-re", type=float, default=0.0, help="complex kind only")
    ps.add_argument("--mu-im", type=float, default=0.0, help="complex kind only")
    ps.add_argument("--beta", type=float, default=1.0, help="power kind only")
    ps.add_argument("--lam", type=float, default=0.0, help="power kind only")
    ps.add_argument("--count", type=int, default=1)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--method", choices=["trunc", "mh"], default="trunc")
    ps.add_argument("--out", default="-")
    ps.set_defaults(func=_cmd_sample)

    pg = sub.add_parser("density-grid", help="export density values as CSV")
    pg.add_argument("--kind", choices=["complex", "amplitude", "power"], default="complex")
    pg.add_argument("--alpha", type=float, required=True)
    pg.add_argument("--sigma2", type=float, default=1.0)
    pg.add_argument("--mu-re", type=float, default=0.0)
    pg.add_argument("--mu-im", type=float, default=0.0)
    pg.add_argument("--nu", type=float, default=0.0, help="amplitude kind only")
    pg.add_argument("--beta", type=float, default=1.0, help="power kind only")
    pg.add_argument("--lam", type=float, default=0.0, help="power kind only")
    pg.add_argument("--re-min", type=float, default=-3.0)
    pg.add_argument("--re-max", type=float, default=3.0)
    pg.add_argument("--im-min", type=float, default=-3.0)
    pg.add_argument("--im-max", type=float, default=3.0)
    pg.add_argument("--x-min", type=float, default=1e-3)
    pg.add_argument("--x-max", type=float, default=10.0)
    pg.add_argument("--n", type=int, default=201)
    pg.add_argument("--out", default="-")
    pg.set_defaults(func=_cmd_density_grid)

    pk = sub.add_parser("kurtosis-sweep", help="export the kurtosis comparison as CSV")
    pk.add_argument("--lambda-min", type=float, default=0.0)
    pk.add_argument("--lambda-max", type=float, default=10.0)
    pk.add_argument("--steps", type=int, default=101)
    pk.add_argument("--alphas", default="0.5,1,2")
    pk.add_argument("--beta", type=float, default=1.0)
    pk.add_argument("--out", default="-")
    pk.set_defaults(func=_cmd_kurtosis_sweep)

    pf = sub.add_parser("fit-spectra", help="patchwise model comparison on WAV input")
    pf.add_argument("--input", required=True, help="WAV file or directory")
    pf.add_argument("--frame-ms", type=float, default=16.0)
    pf.add_argument("--hop-ms", type=float, default=4.0)
    pf.add_argument("--window", choices=["hann", "hamming", "rect"], default="hann")
    pf.add_argument("--patch-freq", type=int, default=3)
    pf.add_argument("--patch-time", type=int, default=20)
    pf.add_argument("--models", default="exp,gamma,ncgamma,proposed")
    pf.add_argument("--floor-eps", type=float, default=1e-10)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--fit-scope", choices=["patch", "file"], default="patch")
    pf.add_argument("--out", default="report.json")
    pf.add_argument("--csv", default=None)
    pf.add_argument(
        "--sweep",
        action="store_true",
        help="run once per window (hann, hamming, rect) and write one report each",
    )
    pf.set_defaults(func=_cmd_fit_spectra)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
