"""Command-line surface: the only module with side effects.

Subcommands analyze / grid / region / family / cauchy read Matrix Market
inputs, drive the library and emit JSON reports or CSV tables.  Outputs
are deterministic for fixed inputs, flags and seed: reruns are
byte-identical (timestamps only appear with --timestamp).

Exit codes: 0 success, 2 input/parse error (malformed files, bad flag
values, non-square matrices), 3 numerical failure (factorization,
singular point, boundary or contour configuration).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .cauchy import CauchyConfig, builtin_source, envelope_comparison
from .certificates import (
    bound_from_condition3,
    build_condition3,
    build_condition4,
    miller_region_bound,
)
from .constants import (
    SearchConfig,
    cal_k_continuous,
    cal_k_discrete,
    kreiss_constant_continuous,
    kreiss_constant_discrete,
    sup_power_norm,
    sup_semigroup_norm,
)
from .errors import (
    BoundaryError,
    DimensionError,
    KreissError,
    MatrixMarketError,
    SingularPointError,
)
from .families import FamilySpec, family_report, generate_family
from .linalg import spectral_norm
from .mmio import read_matrix
from .reporting import (
    SCHEMA,
    dumps,
    encode_condition3,
    encode_condition4,
    encode_family_report,
    encode_float,
    encode_spectrum,
    encode_sup_result,
    encode_verdict,
)
from .resolvent import region_S_membership, region_T_membership, resolvent_grid
from .spectra import classify_power_bounded, classify_quasi_stable


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--coarse", type=int, default=24, help="coarse grid resolution")
    p.add_argument("--refine-iters", type=int, default=60, help="local refinement iterations")
    p.add_argument("--threshold", type=float, default=1e6, help="divergence threshold")
    p.add_argument("--re-max", type=float, default=None, help="real-part cap of the search domain")
    p.add_argument("--im-max", type=float, default=None, help="imaginary-part cap of the search domain")
    p.add_argument("--t-max", type=float, default=None, help="time horizon for the semigroup sweep")
    p.add_argument("--nu-max", type=int, default=10_000, help="largest power in the discrete sweep")
    p.add_argument("--no-spectrum-seeds", action="store_true",
                   help="disable spectrum-anchored probe sequences")


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        coarse=args.coarse,
        refine_iters=args.refine_iters,
        divergence_threshold=args.threshold,
        t_max=args.t_max,
        nu_max=args.nu_max,
        re_cap=args.re_max,
        im_cap=args.im_max,
        seed_spectrum=not args.no_spectrum_seeds,
    )


def _read_input(path: str) -> tuple[np.ndarray, str]:
    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    return read_matrix(path), digest


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def _cmd_analyze(args) -> int:
    matrix, digest = _read_input(args.path)
    cfg = _search_config(args)
    mode = "discrete" if args.discrete else "continuous"
    if mode == "continuous":
        verdict = classify_quasi_stable(matrix, tol=args.tol)
        k1 = sup_semigroup_norm(matrix, cfg)
        k2 = kreiss_constant_continuous(matrix, cfg)
        ck = cal_k_continuous(matrix, cfg)
    else:
        verdict = classify_power_bounded(matrix, tol=args.tol)
        k1 = sup_power_norm(matrix, cfg)
        k2 = kreiss_constant_discrete(matrix, cfg)
        ck = cal_k_discrete(matrix, cfg)

    certificates = None
    if args.certify:
        cert3 = build_condition3(matrix, mode, scaling_eps=args.eps_scaling)
        if mode == "continuous":
            bound = bound_from_condition3(cert3)
        else:
            bound = miller_region_bound(cert3, 1.0)
        try:
            cert4 = encode_condition4(build_condition4(matrix, mode))
            cert4_reason = None
        except BoundaryError as exc:
            cert4 = None
            cert4_reason = str(exc)
        certificates = {
            "condition3": encode_condition3(cert3, bound=bound),
            "condition4": cert4,
            "condition4_unavailable_reason": cert4_reason,
        }

    report = {
        "schema": SCHEMA,
        "tool": {"name": "kreissometer", "version": __version__},
        "input": {
            "path": args.path,
            "sha256": digest,
            "dimension": int(matrix.shape[0]),
            "norm": encode_float(spectral_norm(matrix)),
        },
        "mode": mode,
        "config": {
            "tol": encode_float(args.tol if args.tol is not None else 1e-8),
            "eps_scaling": encode_float(args.eps_scaling),
            "coarse": cfg.coarse,
            "refine_iters": cfg.refine_iters,
            "divergence_threshold": encode_float(cfg.divergence_threshold),
            "t_max": None if cfg.t_max is None else encode_float(cfg.t_max),
            "nu_max": cfg.nu_max,
            "re_cap": None if cfg.re_cap is None else encode_float(cfg.re_cap),
            "im_cap": None if cfg.im_cap is None else encode_float(cfg.im_cap),
            "seed_spectrum": cfg.seed_spectrum,
        },
        "spectrum": encode_spectrum(verdict.report),
        "classification": encode_verdict(verdict),
        "functionals": {
            "k1": encode_sup_result(k1),
            "k2": encode_sup_result(k2),
            "cal_k": encode_sup_result(ck),
        },
        "certificates": certificates,
    }
    if args.timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    _emit(dumps(report), args.out)
    return 0


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        counts = (int(a), int(b))
    except ValueError:
        raise ValueError(f"--grid expects NxM, got {text!r}") from None
    if counts[0] < 1 or counts[1] < 1:
        raise ValueError("grid counts must be positive")
    return counts


def _cmd_grid(args) -> int:
    matrix, _ = _read_input(args.path)
    counts = _parse_grid(args.grid)
    grid = resolvent_grid(
        matrix,
        (args.re_min, args.re_max),
        (args.im_min, args.im_max),
        counts,
        cluster_tol=args.tol,
    )
    import io

    buf = io.StringIO()
    grid.write_csv(buf)
    _emit(buf.getvalue(), args.out)
    return 0


def _cmd_region(args) -> int:
    matrix, _ = _read_input(args.path)
    counts = _parse_grid(args.grid)
    member_of = region_S_membership if args.mode == "continuous" else region_T_membership
    res = np.linspace(args.re_min, args.re_max, counts[0])
    ims = np.linspace(args.im_min, args.im_max, counts[1])
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re", "im", "in_region", "flag"])
    for x in res:
        for y in ims:
            z = complex(x, y)
            try:
                inside = member_of(matrix, z, args.r)
                writer.writerow([repr(float(x)), repr(float(y)), int(inside), "ok"])
            except SingularPointError:
                writer.writerow([repr(float(x)), repr(float(y)), "", "singular"])
    _emit(buf.getvalue(), args.out)
    return 0


def _cmd_family(args) -> int:
    spec = FamilySpec(
        kind=args.kind,
        n=args.n,
        count=args.count,
        seed=args.seed,
        shift_margin=args.shift_margin,
        delta=args.delta,
        block_size=args.block_size,
        theta=args.theta,
        symbol=args.symbol,
        xi_min=args.xi_min,
        xi_max=args.xi_max,
        table_path=args.table,
    )
    family = generate_family(spec)
    report = family_report(family, mode=args.mode, cfg=_search_config(args))
    document = {
        "schema": SCHEMA,
        "tool": {"name": "kreissometer", "version": __version__},
        "family_spec": {
            "kind": spec.kind,
            "n": spec.n,
            "count": spec.count,
            "seed": spec.seed,
            "shift_margin": encode_float(spec.shift_margin),
            "delta": encode_float(spec.delta),
            "block_size": spec.block_size,
            "theta": None if spec.theta is None else encode_float(spec.theta),
            "symbol": spec.symbol,
            "xi_min": encode_float(spec.xi_min),
            "xi_max": encode_float(spec.xi_max),
            "table_path": spec.table_path,
        },
        "report": encode_family_report(report),
    }
    _emit(dumps(document), args.out)
    return 0


def _cmd_cauchy(args) -> int:
    matrix, _ = _read_input(args.path)
    cfg = CauchyConfig(
        gamma=args.gamma,
        alpha=args.alpha,
        k_old=args.k_old,
        k_new=args.k_new,
        y_max=args.y_max,
        y_count=args.y_count,
        t_eval=tuple(args.t or ()),
    )
    source = None
    if args.source is not None:
        source = builtin_source(
            args.source,
            matrix.shape[0],
            amplitude=args.amplitude,
            rate=args.rate,
            center=args.center,
            width=args.width,
        )
    comparison = envelope_comparison(matrix, cfg, source=source, search_cfg=_search_config(args))

    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["y", "true_norm", "old_env", "new_env"])
    for i, y in enumerate(comparison.y):
        old = comparison.old_envelope[i] if comparison.old_envelope is not None else float("nan")
        new = comparison.new_envelope[i] if comparison.new_envelope is not None else float("nan")
        writer.writerow([
            repr(float(y)),
            repr(float(comparison.true_norm[i])),
            repr(float(old)),
            repr(float(new)),
        ])
    _emit(buf.getvalue(), args.out_envelope)

    if comparison.reconstructed is not None and args.out_solution is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        n = comparison.reconstructed.shape[1]
        header = ["t"]
        for comp in range(n):
            header += [f"recon_{comp}_re", f"recon_{comp}_im"]
        for comp in range(n):
            header += [f"ref_{comp}_re", f"ref_{comp}_im"]
        writer.writerow(header)
        for i, t in enumerate(comparison.t_eval):
            row = [repr(float(t))]
            for comp in range(n):
                v = comparison.reconstructed[i, comp]
                row += [repr(float(v.real)), repr(float(v.imag))]
            for comp in range(n):
                if comparison.reference is not None:
                    v = comparison.reference[i, comp]
                    row += [repr(float(v.real)), repr(float(v.imag))]
                else:
                    row += ["nan", "nan"]
            writer.writerow(row)
        _emit(buf.getvalue(), args.out_solution)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kreissometer",
        description="Stability functionals, resolvent-ratio estimates and "
        "Kreiss-type certificates for dense complex matrices.",
    )
    parser.add_argument("--version", action="version", version=f"kreissometer {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full functional/certificate report for one matrix")
    p.add_argument("path", help="Matrix Market input file")
    p.add_argument("--discrete", action="store_true", help="power-bounded analysis instead of semigroup")
    p.add_argument("--certify", action="store_true", help="build both certificate forms")
    p.add_argument("--eps-scaling", type=float, default=1.0, help="diagonal scaling of the similarity")
    p.add_argument("--tol", type=float, default=None, help="classification tolerance (relative)")
    p.add_argument("--timestamp", action="store_true", help="include a UTC timestamp (breaks rerun identity)")
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    _add_search_flags(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("grid", help="resolvent norm / ratio field on a rectangle (CSV)")
    p.add_argument("path")
    p.add_argument("--re-min", type=float, required=True)
    p.add_argument("--re-max", type=float, required=True)
    p.add_argument("--im-min", type=float, required=True)
    p.add_argument("--im-max", type=float, required=True)
    p.add_argument("--grid", required=True, help="counts as NxM (real x imaginary)")
    p.add_argument("--tol", type=float, default=None, help="spectrum clustering tolerance")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("region", help="region membership samples on a rectangle (CSV)")
    p.add_argument("path")
    p.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
    p.add_argument("--r", type=float, required=True, help="region parameter r > 0")
    p.add_argument("--re-min", type=float, required=True)
    p.add_argument("--re-max", type=float, required=True)
    p.add_argument("--im-min", type=float, required=True)
    p.add_argument("--im-max", type=float, required=True)
    p.add_argument("--grid", required=True, help="counts as NxM")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("family", help="generate a family and report uniformity (JSON)")
    p.add_argument("--kind", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
    p.add_argument("--shift-margin", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--block-size", type=int, default=2)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--symbol", default=None)
    p.add_argument("--xi-min", type=float, default=-np.pi)
    p.add_argument("--xi-max", type=float, default=np.pi)
    p.add_argument("--table", default=None, help="symbol table file for --symbol user-table")
    p.add_argument("--out", default=None)
    _add_search_flags(p)
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("cauchy", help="contour reconstruction and envelope comparison (CSV)")
    p.add_argument("path")
    p.add_argument("--gamma", type=float, required=True, help="contour abscissa")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--k-old", type=float, default=None)
    p.add_argument("--k-new", type=float, default=None)
    p.add_argument("--y-max", type=float, default=100.0)
    p.add_argument("--y-count", type=int, default=20_001)
    p.add_argument("--t", type=float, action="append", help="evaluation time (repeatable)")
    p.add_argument("--source", choices=("constant", "exp-decay", "gaussian"), default=None)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--center", type=float, default=2.0)
    p.add_argument("--width", type=float, default=0.5)
    p.add_argument("--out-envelope", default=None)
    p.add_argument("--out-solution", default=None)
    _add_search_flags(p)
    p.set_defaults(func=_cmd_cauchy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MatrixMarketError, DimensionError) as exc:
        print(f"kreissometer: input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"kreissometer: invalid argument: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"kreissometer: {exc}", file=sys.stderr)
        return 2
    except KreissError as exc:
        print(f"kreissometer: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
