"""Command-line entry point: figure scenarios and single-model tools.

    optoconv <scenario> --config cfg.yaml --out DIR [--set k=v]... [--seed N]
    optoconv sparams|correlations|feedforward|qff|etalon|shiftcode [options]

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
Set OPTOCONV_THREADS to cap BLAS threads.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, apply_overrides, load_config, converter_params
from .params import TWO_PI, ParameterError
from .scattering import UnstableConfigurationError

TOOLS = ("sparams", "correlations", "feedforward", "qff", "etalon", "shiftcode")


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else str(float(v))


def table_csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.data:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _load(args):
    cfg = load_config(args.config)
    return apply_overrides(cfg, args.set or [])


def run_scenario(name: str, args) -> int:
    from .scenarios import SCENARIOS

    cfg = _load(args)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc.strerror}") from None
    result = SCENARIOS[name](cfg, args.seed)
    files = {}
    for key, table in result.tables.items():
        text = table_csv(table)
        (out / f"{key}.csv").write_text(text)
        files[f"{key}.csv"] = _sha(text)
    summary = _dump_json(result.summary)
    (out / "summary.json").write_text(summary)
    files["summary.json"] = _sha(summary)
    manifest = {
        "scenario": name,
        "seed": args.seed,
        "config_source": cfg.source,
        "config_sha256": _sha(json.dumps(cfg.data, sort_keys=True)),
        "overrides": list(args.set or []),
        "files": files,
        "version": __version__,
    }
    (out / "manifest.json").write_text(_dump_json(manifest))
    print(f"{name}: wrote {len(files)} files to {out}")
    return 0


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _grid(spec: str, what: str):
    try:
        a, b, n = spec.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError:
        raise UsageError(f"{what} must look like start:stop:count, got {spec!r}") from None


def tool_sparams(args) -> int:
    from .scenarios import _sparam_table

    p = converter_params(_load(args))
    _emit(table_csv(_sparam_table(p, args.span, args.points)), args.out)
    return 0


def tool_correlations(args) -> int:
    from .correlations import eo_block, quadrature_spectra, spectral_matrix
    from .scenarios import Table

    p = converter_params(_load(args))
    f = p.omega_m / TWO_PI + np.linspace(-args.span, args.span, args.points)
    w = TWO_PI * f
    s = quadrature_spectra(p, w)
    eig = eo_block(spectral_matrix(p, w)).eigen_min
    t = Table(["f [Hz]", "x_ee [photons]", "x_oo [photons]", "x_eo [photons]", "y_eo [photons]",
               "eigen_min [photons]"], np.column_stack([f, s.x_ee, s.x_oo, s.x_eo, s.y_eo, eig]))
    _emit(table_csv(t), args.out)
    return 0


def tool_feedforward(args) -> int:
    from . import feedforward as ff
    from .scattering import efficiency_report, mechanical_pole
    from .correlations import quadrature_spectra
    from .scenarios import Table, _chain

    cfg = _load(args)
    p = converter_params(cfg)
    chain = _chain(cfg)
    rep = efficiency_report(p)
    w0 = -mechanical_pole(p).imag
    base = ff.FeedforwardConfig(0.0, chain.n_e, chain.n_o, rep.gain_a, rep.eta)
    offsets = np.linspace(-args.span, args.span, args.points)
    budget = ff.budget_from_spectra(quadrature_spectra(p, w0 + TWO_PI * offsets, phase_ref=w0),
                                    chain.n_e, chain.n_o, chain.excess_e)
    peak = ff.budget_from_spectra(quadrature_spectra(p, w0, phase_ref=w0),
                                  chain.n_e, chain.n_o, chain.excess_e)
    if args.sweep_w:
        weights = _grid(args.sweep_w, "--sweep-w")
    elif args.optimize:
        weights = [ff.optimal_weight(peak, base)]
    else:
        weights = [args.w]
    rows = []
    for wt in weights:
        x, y = ff.ff_spectrum(budget, base.with_w(float(wt)))
        n_add = ff.n_add_input_referred(x + y, 2 * chain.n_o, base)
        rows.append(np.column_stack([np.full_like(offsets, wt), offsets, x, y, x + y, n_add]))
    t = Table(["w [1]", "offset [Hz]", "x_check [photons]", "y_check [photons]", "total [photons]",
               "n_add [photons]"], np.vstack(rows))
    _emit(table_csv(t), args.out)
    return 0


def tool_qff(args) -> int:
    from .qfeedforward import AncillaSpec, added_noise
    from .scenarios import Table

    anc = AncillaSpec.vacuum() if args.squeezing <= 0 else AncillaSpec.squeezed(args.squeezing)
    eta = np.linspace(0.0, 1.0, args.points)
    t = Table(["eta [1]", "added_noise [photons]"], np.column_stack([eta, added_noise(eta, anc)]))
    _emit(table_csv(t), args.out)
    return 0


def tool_etalon(args) -> int:
    from . import cavity
    from .scenarios import Table

    stack = cavity.EtalonStack(index=args.index, thickness=args.thickness)
    k_int = args.kappa_int * TWO_PI
    xs = np.linspace(0.0, args.periods * stack.wavelength / 2, args.points)
    scan = cavity.etalon_scan(stack, xs, kappa_int=k_int)
    t = Table(["x [m]", "kappa_o [Hz]", "kappa_ex_o [Hz]", "g_o_norm [1]"],
              np.column_stack([xs, scan.kappa_o / TWO_PI, scan.kappa_ex_o / TWO_PI, scan.g_o_norm]))
    _emit(table_csv(t), args.out)
    return 0


def tool_shiftcode(args) -> int:
    from .shiftcode import ShiftCodeParams, simulate_fidelity

    decoder = {"ideal": "ideal_fb", "cubic": "cubic"}[args.decoder]
    try:
        params = ShiftCodeParams(args.b, args.sigma, decoder, args.samples, args.tolerance)
        r = simulate_fidelity(params, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"b": args.b, "sigma_x": args.sigma, "decoder": decoder, "seed": args.seed,
           "n_samples": r.n_samples, "f_ent_estimate": r.f_ent_estimate,
           "f_ent_bound": r.f_ent_bound, "failure_rate": r.failure_rate, "stderr": r.stderr}
    _emit(_dump_json(out), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    from .scenarios import SCENARIOS

    parser = argparse.ArgumentParser(prog="optoconv", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def common(sp, out_help):
        sp.add_argument("--config", help="YAML config (default: bundled device parameters)")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="dotted-path config override; repeatable")
        sp.add_argument("--out", help=out_help)

    for name, fn in SCENARIOS.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or name).split("\n")[0])
        common(sp, "output directory")
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(handler=lambda a, n=name: run_scenario(n, a), needs_out=True)

    sp = sub.add_parser("sparams", help="probe scattering parameters around f_m")
    common(sp, "CSV path (stdout if omitted)")
    sp.add_argument("--span", type=float, default=5000.0, help="half-span in Hz")
    sp.add_argument("--points", type=int, default=501)
    sp.set_defaults(handler=tool_sparams)

    sp = sub.add_parser("correlations", help="converter-referred quadrature spectra")
    common(sp, "CSV path (stdout if omitted)")
    sp.add_argument("--span", type=float, default=2000.0)
    sp.add_argument("--points", type=int, default=401)
    sp.set_defaults(handler=tool_correlations)

    sp = sub.add_parser("feedforward", help="fed-forward optical spectra")
    common(sp, "CSV path (stdout if omitted)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--w", type=float, default=1.0)
    g.add_argument("--optimize", action="store_true")
    g.add_argument("--sweep-w", metavar="A:B:N")
    sp.add_argument("--span", type=float, default=1000.0)
    sp.add_argument("--points", type=int, default=201)
    sp.set_defaults(handler=tool_feedforward)

    sp = sub.add_parser("qff", help="quantum feedforward added noise versus eta")
    sp.add_argument("--squeezing", type=float, default=20.0, help="r; 0 gives a vacuum ancilla")
    sp.add_argument("--points", type=int, default=101)
    sp.add_argument("--out")
    sp.set_defaults(handler=tool_qff)

    sp = sub.add_parser("etalon", help="membrane-position scan of the optical cavity")
    sp.add_argument("--index", type=float, default=2.0)
    sp.add_argument("--thickness", type=float, default=100e-9)
    sp.add_argument("--kappa-int", type=float, default=0.0, help="constant internal loss (Hz)")
    sp.add_argument("--periods", type=float, default=2.0)
    sp.add_argument("--points", type=int, default=401)
    sp.add_argument("--out")
    sp.set_defaults(handler=tool_etalon)

    sp = sub.add_parser("shiftcode", help="shift-code fidelity Monte Carlo (JSON)")
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--decoder", choices=("ideal", "cubic"), default="ideal")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--tolerance", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(handler=tool_shiftcode)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_out", False) and not args.out:
        parser.error(f"{args.command} requires --out DIR")
    try:
        return args.handler(args)
    except (UsageError, ConfigError) as exc:
        print(f"optoconv: error: {exc}", file=sys.stderr)
        return 2
    except (UnstableConfigurationError, ParameterError, RuntimeError, ValueError, OSError) as exc:
        print(f"optoconv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
