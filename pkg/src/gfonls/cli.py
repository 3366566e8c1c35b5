"""Command-line entry point: ``gfonls {simulate,verify,trace,calibrate,theta}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .engine import evaluate_grid
from .errors import ConfigError, GfonlsError, SpectrumError
from .io import (
    RunConfig,
    load_config,
    read_field_csv,
    with_grid,
    write_field_csv,
    write_heatmap_pgm,
    write_json,
    write_metadata_json,
)
from .lax import calibrate
from .spectrum import format_phase, theta_condition, theta_condition_raw
from .trace import contour_points, evaluate_trace
from .verification import boundary_check, phase_jump, refinement_pair, residual

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

log = logging.getLogger("gfonls")


class _Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _resolve(path: str, out_dir: str | None) -> Path:
    p = Path(path)
    if out_dir and not p.is_absolute():
        p = Path(out_dir) / p
    return p


def _load(args) -> RunConfig:
    try:
        return load_config(args.config)
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot read config {args.config}: {exc}") from exc


def cmd_simulate(args) -> int:
    cfg = _load(args)
    field = evaluate_grid(cfg.engine_config(), cfg.grid, workers=args.workers)
    field.metadata["k4_form"] = cfg.k4_form
    for out in cfg.outputs:
        path = _resolve(out.path, args.out_dir)
        try:
            if out.kind == "csv":
                write_field_csv(field, path)
            elif out.kind == "pgm":
                write_heatmap_pgm(field, path, cfg.digest)
            elif out.kind == "json-meta":
                write_metadata_json(field, path, cfg)
            elif out.kind == "png":
                from .plotting import render_field_png

                render_field_png(field, path, title=Path(args.config).stem)
        except OSError as exc:
            raise _Failure(EXIT_IO, f"cannot write {path}: {exc}") from exc
        log.info("wrote %s", path)
    n = field.values.size
    flagged = field.metadata["flagged_points"]
    print(f"simulated {field.values.shape[1]}x{field.values.shape[0]} grid, "
          f"{flagged} flagged, max condition {field.metadata['max_condition']:.3e}")
    if n and flagged == n:
        print("every grid point is flagged", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args)
    p = cfg.params
    ec = cfg.engine_config()
    if args.field:
        if args.meta:
            try:
                meta = json.loads(Path(args.meta).read_text(encoding="utf-8"))
            except OSError as exc:
                raise _Failure(EXIT_IO, f"cannot read {args.meta}: {exc}") from exc
            other = meta.get("metadata", {}).get("config_digest")
            if other != cfg.digest:
                raise _Failure(EXIT_CONFIG, f"refusing to compare: field digest {other} "
                               f"differs from config digest {cfg.digest}")
        try:
            field = read_field_csv(args.field)
        except OSError as exc:
            raise _Failure(EXIT_IO, f"cannot read {args.field}: {exc}") from exc
        field.metadata.update({"config_digest": cfg.digest,
                               "gamma": 0.0 if cfg.options.gauge == "gauge_fixed" else 6 * p.alpha4 * p.psi0**4})
    else:
        field = evaluate_grid(ec, cfg.grid, workers=args.workers)
    gauge = cfg.options.gauge
    if args.refine and args.refine > 1:
        g = cfg.grid
        r = int(args.refine)
        fine_grid = type(g)(g.x0, g.x1, (g.nx - 1) * r + 1, g.t0, g.t1, (g.nt - 1) * r + 1)
        fine = evaluate_grid(with_grid(cfg, fine_grid).engine_config(), fine_grid, workers=args.workers)
        _, rep, _ = refinement_pair(field, fine, p, gauge, cfg.k4_form, factor=r)
        coarse = residual(field, p, gauge, k4_form=cfg.k4_form)
        rep.extra["coarse_sup_norm"] = coarse.sup_norm
    else:
        rep = residual(field, p, gauge, k4_form=cfg.k4_form)
    rep.config_digest = cfg.digest
    doc = rep.to_json()
    doc.update({
        "dispersion": cfg.options.dispersion,
        "sign": cfg.options.sign,
        "boundary_deviation": boundary_check(field, p),
        "phase_jump": phase_jump(field),
        "theta_condition": theta_condition(cfg.spectrum),
        "flagged_points": int(np.count_nonzero(field.flags)),
        "version": __version__,
    })
    _emit(doc, args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    cfg = _load(args)
    pts = contour_points(args.contour, args.samples, cfg.params, radius=args.radius)
    rows = evaluate_trace(pts, cfg.spectrum, cfg.params)
    lines = ["z_re,z_im,s11_re,s11_im,s22_re,s22_im"]
    for r in rows:
        lines.append(",".join("%.17g" % v for v in (r.z.real, r.z.imag, r.s11.real, r.s11.imag,
                                                       r.s22.real, r.s22.imag)))
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise _Failure(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _load(args)
    p = cfg.params
    rng = np.random.default_rng(args.seed)
    r = p.psi0 * rng.uniform(0.3, 3.0, args.samples)
    ang = rng.uniform(-np.pi, np.pi, args.samples)
    res = calibrate(p, r * np.exp(1j * ang))
    doc = [rep.to_json() for rep in res.reports]
    _emit(doc, args.out)
    print(f"verdict: {res.verdict} (max discrepancy {res.max_discrepancy:.3e}; "
          f"literal assembly [U,V] defect {res.literal_commutator_defect:.3e})", file=sys.stderr)
    return EXIT_OK


def cmd_theta(args) -> int:
    cfg = _load(args)
    print(format_phase(theta_condition(cfg.spectrum), theta_condition_raw(cfg.spectrum)))
    return EXIT_OK


def _emit(doc, out):
    if out:
        try:
            write_json(doc, out)
        except OSError as exc:
            raise _Failure(EXIT_IO, f"cannot write {out}: {exc}") from exc
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gfonls", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("-c", "--config", required=True)

    s = sub.add_parser("simulate", help="evaluate the field and write the configured outputs")
    common(s)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out-dir", default=None, help="base directory for relative output paths")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify", help="PDE residual report as JSON")
    common(s)
    s.add_argument("--refine", type=int, default=None)
    s.add_argument("--field", default=None, help="CSV field to check instead of regenerating")
    s.add_argument("--meta", default=None, help="metadata JSON that accompanies --field")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--out", default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("trace", help="sample s11/s22 along a contour")
    common(s)
    s.add_argument("--contour", choices=("real", "circle"), required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--radius", type=float, default=10.0)
    s.add_argument("-o", "--out", default=None)
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("calibrate", help="compare printed and Lax dispersion")
    common(s)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--out", default=None)
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("theta", help="print the theta-condition phase")
    common(s)
    s.set_defaults(func=cmd_theta)
    return ap


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except _Failure as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except (ConfigError, SpectrumError) as exc:
        msgs = getattr(exc, "messages", None) or getattr(exc, "violations", None) or [str(exc)]
        for m in msgs:
            print(m, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GfonlsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
