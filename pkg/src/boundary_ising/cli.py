"""Command-line front end: ``boundary-ising <command> [options]``.

Every command writes versioned CSV (or JSON with ``--format json``) into
``--out`` and prints a short summary.  Parameter-grid work runs on a process
pool (``--threads``); results are merged in grid order so the output files do
not depend on the number of workers.
"""
from __future__ import annotations

import argparse
import configparser
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, export
from .model import DisorderSpec, ModelParams, ParameterError, Parity, sample_disorder, validate


# --------------------------------------------------------------------------- helpers

def _floats(text) -> list[float]:
    """'0.1,0.2' -> list; 'lo:hi:n' -> n log-spaced values; 'lo:hi:n:lin' -> linear."""
    if isinstance(text, (int, float)):
        return [float(text)]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        lin = len(parts) > 3 and parts[3] == "lin"
        return list(np.linspace(lo, hi, n) if lin else np.geomspace(lo, hi, n))
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text) -> list[int]:
    return [int(round(x)) for x in _floats(text)] if ":" not in str(text) else \
        [int(x) for x in np.unique(np.round(_floats(text)).astype(int))]


def _pool_map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))


def _params(args, N=None, h=None, gamma=None) -> ModelParams:
    N = args.n if N is None else N
    h = args.h if h is None else h
    g = args.gamma if gamma is None else gamma
    gl = g if args.gammaL is None else args.gammaL
    gr = g if args.gammaR is None else args.gammaR
    return validate(ModelParams(N=int(N), h=h, gammaL=float(gl), gammaR=float(gr), J=float(args.J)))


def _first(values):
    vals = _floats(values)
    return vals[0]


def _out(args) -> Path:
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _say(args, msg):
    if not args.quiet:
        print(msg)


# --------------------------------------------------------------------------- spectrum

def cmd_spectrum(args) -> int:
    from . import rapidity, spectrum, matching, phase

    h = _first(args.h)
    p = _params(args, h=h, gamma=_first(args.gamma))
    out = _out(args)
    rows = []
    for par in (Parity.EVEN, Parity.ODD):
        spec = rapidity.solve_channel(p, par) if p.uniform else None
        if spec is None:
            from . import tmatrix
            for k, E in enumerate(tmatrix.eigenvalues(tmatrix.build_t(p, par))):
                rows.append([par.label, k, None, None, E.real, E.imag, None, None, None])
            continue
        for k, m in enumerate(spec.modes):
            rows.append([par.label, k, m.theta.real, m.theta.imag, m.E.real, m.E.imag,
                         int(m.is_bound_state), int(m.is_pure_imaginary_E), m.residual])
    export.write_table(out, "rapidity", ["channel", "index", "theta_re", "theta_im", "E_re", "E_im",
                                         "bound_state", "pure_imaginary_E", "residual"], rows,
                       "rapidity", args.format)
    report = {"params": _param_dict(p)}
    if args.rapidity_only:
        _say(args, f"wrote rapidities for N={p.N} to {out}")
        return 0
    if p.N > spectrum.N_MAX_ENUM:
        print(f"error: N={p.N} exceeds the enumeration limit {spectrum.N_MAX_ENUM}; "
              "rerun with --rapidity-only", file=sys.stderr)
        return 2
    lam = spectrum.from_params(p)
    export.write_table(out, "liouvillian", ["re", "im", "channel"],
                       [[z.real, z.imag, "even" if c == 1 else "odd"] for z, c in zip(lam.eigenvalues, lam.channel)],
                       "liouvillian", args.format)
    seg = spectrum.count_segments(lam)
    report.update(segment_count=seg.n_segments, segment_intervals=seg.intervals,
                  segment_threshold=seg.threshold, max_re=float(lam.eigenvalues.real.max()))
    if p.uniform and p.equal_dissipation and p.gammaL > 0 and h > 0:
        rc = phase.classify_region(h, p.gammaL)
        report.update(analytic_structure=rc.structure.name, analytic_segments=rc.structure.n_segments,
                      on_boundary=rc.on_boundary)
    if args.oracle:
        from . import oracle_ed
        e, o = oracle_ed.parity_resolved_spectrum(oracle_ed.build_superoperator(p))
        report["oracle_pairing_error"] = max(matching.pairing_error(lam.even, e),
                                             matching.pairing_error(lam.odd, o))
    export.write_json(out / "segments.json", report, "segment-report")
    _say(args, f"N={p.N} h={h} gamma=({p.gammaL}, {p.gammaR}): segments={seg.n_segments}"
         + (f", oracle pairing error={report['oracle_pairing_error']:.2e}" if args.oracle else ""))
    return 0


def _param_dict(p: ModelParams) -> dict:
    return {"N": p.N, "J": p.J, "h": list(p.fields) if not p.uniform else p.h,
            "gammaL": p.gammaL, "gammaR": p.gammaR}


# --------------------------------------------------------------------------- phase diagram

def _phase_point(task):
    from . import phase
    h, g, N = task
    rc = phase.classify_region(h, g)
    row = {"h": h, "gamma": g, "segment_count": rc.structure.n_segments, "structure": rc.structure.name,
           "on_boundary": int(rc.on_boundary), "boundary_distance": rc.distance}
    if N:
        s = phase.numeric_structure(h, g, N)
        row["numeric_segment_count"] = s.n_segments if s is not None else None
        row["agree"] = int(s == rc.structure)
    return row


def cmd_phase_diagram(args) -> int:
    hs, gs = _floats(args.h), _floats(args.gamma)
    tasks = [(h, g, args.numeric or 0) for h in hs for g in gs]
    rows = _pool_map(_phase_point, tasks, args.threads)
    cols = ["h", "gamma", "segment_count", "structure", "on_boundary", "boundary_distance"]
    if args.numeric:
        cols += ["numeric_segment_count", "agree"]
    export.write_table(_out(args), "phase_diagram", cols, rows, "phase-diagram", args.format)
    msg = f"{len(rows)} grid points"
    if args.numeric:
        off = [r for r in rows if r["boundary_distance"] > args.buffer]
        if off:
            msg += f"; numeric agreement {sum(r['agree'] for r in off)}/{len(off)} off-boundary points"
    _say(args, msg)
    return 0


# --------------------------------------------------------------------------- gap

def _gap_point(task):
    from . import gap
    h, g, N, J, methods = task
    base = {"gamma": g, "N": N, "h": h}
    rows = []
    for m in methods:
        row = dict(base, method=m, delta_g=None, delta_g_dual=None, mismatch=None)
        if g <= 0:
            row["method"] = f"{m}:undefined"
            rows.append(row)
            continue
        fns = {"exact": gap.gap_exact, "weak": gap.gap_perturbative_weak,
               "strong": gap.gap_perturbative_strong, "full": gap.gap_full_spectrum}
        # the weak limit at gamma pairs with the strong limit at 1/gamma
        partner = {"weak": "strong", "strong": "weak"}.get(m, m)
        try:
            res = fns[m](ModelParams.symmetric(N, h, g, J))
            dd = fns[partner](ModelParams.symmetric(N, h, 1.0 / g, J)).delta_g
        except ParameterError:
            # e.g. full enumeration beyond its size limit
            row["method"] = f"{m}:unavailable"
            rows.append(row)
            continue
        row.update(method=res.method.value if m != "full" else "full_spectrum",
                   delta_g=res.delta_g, delta_g_dual=dd, mismatch=abs(res.delta_g - dd) / res.delta_g)
        rows.append(row)
    return rows


def cmd_gap(args) -> int:
    from . import gap
    hs, gs, Ns = _floats(args.h), _floats(args.gamma), _ints(args.n)
    methods = [m.strip() for m in args.method.split(",")]
    tasks = [(h, g, N, args.J, methods) for h in hs for N in Ns for g in gs]
    rows = [r for chunk in _pool_map(_gap_point, tasks, args.threads) for r in chunk]
    cols = ["gamma", "N", "h", "delta_g", "method", "delta_g_dual", "mismatch"]
    export.write_table(_out(args), "gap", cols, rows, "gap", args.format)
    if len(Ns) > 1:
        for h in hs:
            for g in gs:
                pts = [(r["N"], r["delta_g"]) for r in rows
                       if r["h"] == h and r["gamma"] == g and r["method"] == "exact_rapidity" and r["delta_g"]]
                if len(pts) > 1:
                    x, y = zip(*pts)
                    _say(args, f"h={h} gamma={g}: log-log slope in N = {gap.loglog_slope(x, y):.3f}")
    _say(args, f"wrote {len(rows)} gap rows")
    return 0


# --------------------------------------------------------------------------- dynamics

def cmd_dynamics(args) -> int:
    from . import dynamics

    h = _first(args.h)
    gammas = _floats(args.gamma)
    t = np.linspace(0.0, args.t_max, int(round(args.t_max / args.dt)) + 1)
    rows, report = [], {}
    for g in gammas:
        p = ModelParams.symmetric(args.n, h, g, args.J)
        m = dynamics.magnetization_curve(p, t, lower_block=args.gamma0)
        rows += [[g, ti, mi, "lyapunov"] for ti, mi in zip(t, m)]
        if args.oracle:
            from . import oracle_ed
            if args.n > 5:
                print("warning: --oracle skipped for N > 5", file=sys.stderr)
            else:
                st, _ = oracle_ed.evolve_density(oracle_ed.build_superoperator(p), oracle_ed.all_up_state(args.n), t)
                me = oracle_ed.magnetization_series(st, args.n).real
                rows += [[g, ti, mi, "oracle"] for ti, mi in zip(t, me)]
                report[f"oracle_max_deviation_gamma_{g}"] = float(np.abs(me - m).max())
        if args.dual and g != 1:
            rep = dynamics.dynamical_duality_compare(h, g, args.n, t, J=args.J)
            rows += [[1.0 / g, ti, mi, "lyapunov_dual"] for ti, mi in zip(t, rep.m_dual)]
            report[f"duality_gamma_{g}"] = {"t_cross": rep.t_cross, "divergence": rep.divergence,
                                            "slower_initially": rep.slower_initially}
    out = _out(args)
    export.write_table(out, "dynamics", ["gamma", "t", "m_z", "source"], rows, "dynamics", args.format)
    if report:
        export.write_json(out / "dynamics_report.json", report, "dynamics-report")
        for k, v in report.items():
            _say(args, f"{k}: {v}")
    _say(args, f"wrote {len(rows)} dynamics rows")
    return 0


# --------------------------------------------------------------------------- disorder

def _disorder_point(task):
    from . import spectrum, matching
    idx, p, with_ed = task
    lam = spectrum.from_params(p)
    seg = spectrum.count_segments(lam).n_segments
    ed_err = None
    if with_ed:
        from . import oracle_ed
        e, o = oracle_ed.parity_resolved_spectrum(oracle_ed.build_superoperator(p))
        ed_err = max(matching.pairing_error(lam.even, e), matching.pairing_error(lam.odd, o))
    return idx, lam, seg, ed_err


def cmd_disorder(args) -> int:
    from . import spectrum

    h, g = _first(args.h), _first(args.gamma)
    base = ModelParams.symmetric(args.n, h, g, args.J)
    clean = spectrum.count_segments(spectrum.from_params(base)).n_segments
    cfgs = sample_disorder(base, DisorderSpec(args.delta, args.seed, args.configs))
    results = _pool_map(_disorder_point, [(i, p, args.n <= 5 and not args.no_ed) for i, p in enumerate(cfgs)],
                        args.threads)
    scatter, segs = [], []
    for (i, lam, seg, ed_err), p in zip(results, cfgs):
        for z, c in zip(lam.eigenvalues, lam.channel):
            scatter.append([i, "even" if c == 1 else "odd", z.real, z.imag])
        segs.append({"config": i, "segment_count": seg, "preserved": int(seg == clean),
                     "ed_pairing_error": ed_err, "fields": " ".join(f"{x:.12g}" for x in p.fields)})
    out = _out(args)
    export.write_table(out, "disorder_scatter", ["config", "channel", "re", "im"], scatter, "disorder-scatter",
                       args.format)
    export.write_table(out, "disorder_segments", ["config", "segment_count", "preserved", "ed_pairing_error",
                                                  "fields"], segs, "disorder-segments", args.format)
    frac = float(np.mean([s["preserved"] for s in segs]))
    export.write_json(out / "disorder_summary.json",
                      {"clean_segment_count": clean, "preserved_fraction": frac, "delta": args.delta,
                       "seed": args.seed, "n_configs": args.configs, "params": _param_dict(base)},
                      "disorder-summary")
    _say(args, f"clean segments={clean}; preserved in {100 * frac:.0f}% of {args.configs} configurations")
    return 0


# --------------------------------------------------------------------------- validate

def cmd_validate(args) -> int:
    from . import validation

    only = set(_ints(args.only)) if args.only else None
    results = validation.run_all(quick=args.quick, only=only, echo=print)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


# --------------------------------------------------------------------------- parser

def _load_config(path) -> dict:
    """Flat ``key = value`` file; an optional ``[section]`` header is ignored."""
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    cp = configparser.ConfigParser()
    cp.read_string(text)
    out = {}
    for sec in cp.sections():
        out.update({k.replace("-", "_"): v for k, v in cp[sec].items()})
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="boundary-ising", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags given on the command line win")
    common.add_argument("--h", default="1.0", help="field: value, list a,b,c or log grid lo:hi:n")
    common.add_argument("--gamma", default="1.0", help="dissipation: value, list or grid")
    common.add_argument("--gammaL", type=float, default=None)
    common.add_argument("--gammaR", type=float, default=None)
    common.add_argument("--n", default="6", help="chain length (list allowed for gap)")
    common.add_argument("--J", type=float, default=1.0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="out")
    common.add_argument("--quiet", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="rapidity and Liouvillian spectra")
    s.add_argument("--oracle", action="store_true", help="compare with exact diagonalization")
    s.add_argument("--rapidity-only", action="store_true")
    s.set_defaults(func=cmd_spectrum, int_n=True)

    s = sub.add_parser("phase-diagram", parents=[common], help="analytic (and numeric) phase diagram")
    s.add_argument("--numeric", type=int, default=0, metavar="N", help="also classify rapidity roots at this N")
    s.add_argument("--buffer", type=float, default=0.05)
    s.set_defaults(func=cmd_phase_diagram, h="0.1:10:20", gamma="0.1:10:20")

    s = sub.add_parser("gap", parents=[common], help="Liouvillian gap tables")
    s.add_argument("--method", default="exact", help="comma list of exact, weak, strong, full")
    s.set_defaults(func=cmd_gap)

    s = sub.add_parser("dynamics", parents=[common], help="magnetization relaxation")
    s.add_argument("--t-max", type=float, default=100.0)
    s.add_argument("--dt", type=float, default=0.1)
    s.add_argument("--dual", action="store_true", help="add the 1/gamma partner curve")
    s.add_argument("--oracle", action="store_true", help="add the ED curve (N <= 5)")
    s.add_argument("--gamma0", choices=("zero", "printed"), default="zero",
                   help="lower-right block of the initial covariance matrix")
    s.set_defaults(func=cmd_dynamics, int_n=True)

    s = sub.add_parser("disorder", parents=[common], help="spectra under random on-site fields")
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--configs", type=int, default=50)
    s.add_argument("--no-ed", action="store_true", help="skip the ED comparison for N <= 5")
    s.set_defaults(func=cmd_disorder, int_n=True)

    s = sub.add_parser("validate", parents=[common], help="run the acceptance suite")
    s.add_argument("--quick", action="store_true")
    s.add_argument("--only", default=None, help="comma list of criterion numbers")
    s.set_defaults(func=cmd_validate)
    return ap


def parse_args(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        # re-parse with config values as defaults so explicit flags still win
        conf = _load_config(args.config)
        sub = ap._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(conf) - known
        if unknown:
            ap.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        typed = {}
        for a in sub._actions:
            if a.dest in conf:
                v = conf[a.dest]
                if a.type is not None:
                    v = a.type(v)
                elif a.const is True:  # store_true
                    v = v.strip().lower() in ("1", "true", "yes", "on")
                typed[a.dest] = v
        sub.set_defaults(**typed)
        args = ap.parse_args(argv)
    if getattr(args, "int_n", False):
        args.n = int(_first(args.n))
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
