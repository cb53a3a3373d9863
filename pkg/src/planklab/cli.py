"""Command-line orchestration: build coverings, run verification pipelines and
sweeps, emit deterministic CSV reports with JSON sidecars."""

import argparse
import json
import sys
import time

import numpy as np

from .dyadic import dyadic_str, is_dyadic_pow2, parse_dyadic

EXIT_PASS, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
MULT_BUDGET = 8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        sys.exit(EXIT_USAGE)


def _dyadic_list(text):
    return [float(parse_dyadic(t)) for t in str(text).split(",")]


def _int_list(text):
    return [int(t) for t in str(text).split(",")]


def _dy(v):
    return dyadic_str(v) if is_dyadic_pow2(v) else "%.10g" % v


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, float):
        return "%.10g" % v
    return str(v)


def _write_reports(args, header, rows, passed, meta):
    body = ",".join(header) + "\n" + "".join(
        ",".join(_fmt(row[h]) for h in header) + "\n" for row in rows)
    if args.out:
        with open(args.out, "w") as f:
            f.write(body)
        sidecar = args.out + ".json" if not args.out.endswith(".csv") \
            else args.out[:-4] + ".json"
        with open(sidecar, "w") as f:
            json.dump({"argv": sys.argv[1:], "timestamp": time.time(),
                       "seed": getattr(args, "seed", None),
                       "passed": passed, **meta}, f, indent=1, default=str)
        if getattr(args, "emit_plot", False) and len(header) >= 2:
            num = [h for h in header if rows and isinstance(rows[0][h], (int, float))]
            with open(args.out.rsplit(".", 1)[0] + ".dat", "w") as f:
                for row in rows:
                    f.write(" ".join(_fmt(row[h]) for h in num) + "\n")
    else:
        sys.stdout.write(body)
    return EXIT_PASS if passed else EXIT_VIOLATION


# --- runners --------------------------------------------------------------------

def run_cover(args):
    from .complex_cone import build_complex_cover, verify_complex_cover
    from .cone_cover import build_cone_cover, verify_cone_cover
    from .curve_cover import build_curve_cover, verify_neighborhood_cover
    rows = []
    passed = True
    for k in args.k:
        for d in args.delta:
            if args.space == "plane":
                cov = build_curve_cover(k, d)
                rep = verify_neighborhood_cover(cov, args.samples, args.seed)
                frac, mult = rep.covered_fraction, rep.max_multiplicity
            elif args.space == "cone":
                rep = verify_cone_cover(build_cone_cover(k, d), args.samples, args.seed)
                frac, mult = rep["covered_fraction"], rep["max_multiplicity"]
            else:
                rep = verify_complex_cover(build_complex_cover(round(1 / d)),
                                           args.samples, args.seed)
                frac, mult = rep["covered_fraction"], rep["max_multiplicity"]
            ok = frac == 1.0 and (args.space == "complex" or mult <= MULT_BUDGET)
            passed &= ok
            rows.append({"space": args.space, "k": k, "delta": _dy(d),
                         "samples": args.samples, "covered_fraction": frac,
                         "max_multiplicity": mult, "passed": ok})
    return ["space", "k", "delta", "samples", "covered_fraction",
            "max_multiplicity", "passed"], rows, passed, {}


def run_biortho(args):
    from .biortho import check_biorthogonality, enumerate_quadruples
    from .curve_cover import build_curve_cover
    rows = []
    passed = True
    for k in args.k:
        for d in args.delta:
            sols = enumerate_quadruples(k, d, args.step, args.tol)
            cov = build_curve_cover(k, d)
            rep = check_biorthogonality(sols, cov, args.D)
            nv = rep.n_violations[args.D]
            ok = nv == 0
            passed &= ok
            rows.append({"k": k, "delta": _dy(d), "step": _dy(args.step),
                         "tol": args.tol, "D": args.D,
                         "n_solutions": len(sols), "violations": nv, "passed": ok})
    return ["k", "delta", "step", "tol", "D", "n_solutions", "violations",
            "passed"], rows, passed, {}


def run_overlap(args):
    from .complex_cone import (HighLow5, build_complex_cover,
                               complex_overlap_count,
                               sample_complex_difference_points)
    from .cone_cover import (build_cone_cover, omega_overlap_count,
                             sample_difference_points, HighLow3, sigma_scales)
    S = args.S if args.S is not None else (4.0 if args.space == "r3" else 10.0)
    rows = []
    passed = True
    for k in args.k:
        for r in args.r:
            if args.space == "r3":
                cover = build_cone_cover(k, r**-2)
                pts, _ = sample_difference_points(cover, args.samples, args.seed)
                hl = HighLow3(k=k, r=r)
                worst = 0
                n_omega = 0
                for j in range(pts.shape[1]):
                    for s in sigma_scales(r):
                        oc = omega_overlap_count(tuple(pts[:, j]), k, r, s, S, hl)
                        if oc.in_omega:
                            n_omega += 1
                            worst = max(worst, oc.count_same_K)
                            break
                budget = 8
            else:
                cover = build_complex_cover(round(r**2))
                pts, _ = sample_complex_difference_points(cover, args.samples,
                                                          args.seed)
                worst = 0
                n_omega = 0
                hl = HighLow5(r=r)
                for j in range(pts.shape[1]):
                    for s in sigma_scales(r):
                        oc = complex_overlap_count(pts[:, j], r, s, S, hl)
                        if oc.in_omega:
                            n_omega += 1
                            worst = max(worst, oc.count)
                            break
                budget = 6
            ok = worst <= budget
            passed &= ok
            rows.append({"space": args.space, "k": k, "r": _dy(r), "S": S,
                         "samples": args.samples, "n_omega": n_omega,
                         "max_overlap": worst, "budget": budget, "passed": ok})
    return ["space", "k", "r", "S", "samples", "n_omega", "max_overlap",
            "budget", "passed"], rows, passed, {}


def run_ends(args):
    from .complex_cone import sample_admissible_ends
    out = sample_admissible_ends(args.configs, args.seed)
    checked = sum(sum(rep.n_checked.values()) for _, rep in out)
    alt = sum(sum(rep.n_alternating.values()) for _, rep in out)
    ok = len(out) == args.configs and checked == alt
    rows = [{"configs": len(out), "checked_components": checked,
             "alternating": alt, "passed": ok}]
    return ["configs", "checked_components", "alternating", "passed"], rows, ok, {}


def run_rescale(args):
    from .cone_cover import (c_max, lorentz_rescale, mapped_subplank_report,
                             subsector_params)
    rows = []
    passed = True
    for k in args.k:
        lm = lorentz_rescale(k, 0.5, min(args.c, 0.9 * c_max(k)))
        lo, hi = lm.f2pp_interval()
        ok_curv = 1.5 <= lo and hi <= 2.5
        for M in args.M:
            nu, c = subsector_params(k, M)
            worst_t_lo, worst_t_hi, worst_any = np.inf, 0.0, 0.0
            for w in np.linspace(-1.0, 1.0, 41):
                xi1 = nu + M * w
                if not (0.0 < xi1 <= 1.0):
                    continue
                rep = mapped_subplank_report(k, 2.0**-6 * M**k, nu, c, xi1)
                worst_t_lo = min(worst_t_lo, rep["tangential_ratio"])
                worst_t_hi = max(worst_t_hi, rep["tangential_ratio"])
                worst_any = max(worst_any, max(rep.values()))
            ok = ok_curv and 0.25 <= worst_t_lo and max(worst_t_hi, worst_any) <= 4.0
            passed &= ok
            rows.append({"k": k, "c": _fmt(args.c), "M": _dy(M),
                         "f2pp_lo": lo, "f2pp_hi": hi,
                         "tangential_lo": worst_t_lo, "tangential_hi": worst_t_hi,
                         "max_ratio": worst_any, "passed": ok})
    return ["k", "c", "M", "f2pp_lo", "f2pp_hi", "tangential_lo",
            "tangential_hi", "max_ratio", "passed"], rows, passed, {}


def run_ratio(args):
    from . import fourier_lab as F
    from .curve_cover import build_curve_cover
    rows = []
    passed = True
    for k in args.k:
        per_k = []
        for d in args.delta:
            cov = build_curve_cover(k, d)
            grid = F.grid_for_cover(cov, args.grid)
            w = F.build_partition(cov, grid)
            if args.occupancy == "single":
                fld = F.single_block_field(grid, w, len(cov.rects) // 2, args.seed)
                ratios = [F.square_function_ratio(fld, w)["ratio"]]
                ok = abs(ratios[0] - 1.0) <= 1e-6
            else:
                occ = float(args.occupancy)
                ratios = [F.square_function_ratio(
                    F.sample_field(cov, grid, args.seed, occ, weights=w, trial=t),
                    w)["ratio"] for t in range(args.trials)]
                ok = max(ratios) <= F.C_EMP_RATIO
            passed &= ok
            per_k.append((d, max(ratios)))
            rows.append({"k": k, "delta": _dy(d), "grid": args.grid,
                         "trials": len(ratios), "max_ratio": max(ratios),
                         "mean_ratio": sum(ratios) / len(ratios),
                         "c_emp": F.C_EMP_RATIO, "passed": ok})
        if len(per_k) >= 2:
            slope = F.loglog_slope([p[0] for p in per_k], [p[1] for p in per_k])
            passed &= -0.1 <= slope <= 0.1
    return ["k", "delta", "grid", "trials", "max_ratio", "mean_ratio", "c_emp",
            "passed"], rows, passed, {}


def run_kakeya(args):
    from . import fourier_lab as F
    from .cone_cover import build_cone_cover
    rows = []
    passed = True
    for k in args.k:
        for r in args.r:
            cover = build_cone_cover(k, r**-2)
            grid = F.grid_for_cone(cover, args.grid)
            assign = F.build_cone_assignment(cover, grid)
            worst = 0.0
            for t in range(args.trials):
                fld = F.sample_cone_field(cover, grid, assign, args.seed,
                                          float(args.occupancy), trial=t)
                rep = F.kakeya_functional(fld, cover, assign, r)
                worst = max(worst, rep.log_ratio)
            ok = worst <= F.C_EMP_CONE
            passed &= ok
            rows.append({"k": k, "r": _dy(r), "grid": args.grid,
                         "trials": args.trials, "max_log_ratio": worst,
                         "c_emp": F.C_EMP_CONE, "passed": ok})
    return ["k", "r", "grid", "trials", "max_log_ratio", "c_emp",
            "passed"], rows, passed, {}


def run_complex(args):
    from . import fourier_lab as F
    from .complex_cone import build_complex_cover
    cover = build_complex_cover(args.R)
    cgrid = F.ComplexGrid()
    assign = F.build_complex_assignment(cover, cgrid)
    rows = []
    passed = True
    for t in range(args.trials):
        spec = F.sample_complex_field(cover, cgrid, assign, args.seed,
                                      float(args.occupancy), trial=t)
        rep = F.complex_kakeya_functional(spec, cover, cgrid, assign)
        ok = (rep.ratio <= F.C_EMP_COMPLEX and rep.plancherel_error <= 1e-6
              and rep.lhs_sample_error <= 1e-6)
        passed &= ok
        rows.append({"R": args.R, "trial": t, "lhs": rep.lhs, "rhs": rep.rhs,
                     "ratio": rep.ratio, "c_emp": F.C_EMP_COMPLEX,
                     "plancherel_error": rep.plancherel_error, "passed": ok})
    return ["R", "trial", "lhs", "rhs", "ratio", "c_emp", "plancherel_error",
            "passed"], rows, passed, {}


_RUNNERS = {"cover": run_cover, "biortho": run_biortho, "overlap": run_overlap,
            "ends": run_ends, "rescale": run_rescale, "ratio": run_ratio,
            "kakeya": run_kakeya, "complex": run_complex}


def _add_common(p):
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--emit-plot", action="store_true", dest="emit_plot")


def build_parser():
    top = _Parser(prog="planklab")
    sub = top.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("cover")
    p.add_argument("--space", choices=["plane", "cone", "complex"], default="plane")
    p.add_argument("--k", type=_int_list, default=[3])
    p.add_argument("--delta", type=_dyadic_list, default=[2.0**-10])
    p.add_argument("--samples", type=lambda s: int(float(s)), default=100000)
    _add_common(p)

    p = sub.add_parser("biortho")
    p.add_argument("--k", type=_int_list, default=[3])
    p.add_argument("--delta", type=_dyadic_list, default=[2.0**-12])
    p.add_argument("--step", type=lambda s: float(parse_dyadic(s)), default=2.0**-8)
    p.add_argument("--D", type=int, default=16)
    p.add_argument("--tol", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("overlap")
    p.add_argument("--space", choices=["r3", "r5"], default="r3")
    p.add_argument("--k", type=_int_list, default=[3])
    p.add_argument("--r", type=_dyadic_list, default=[16.0])
    p.add_argument("--S", type=float, default=None)
    p.add_argument("--samples", type=lambda s: int(float(s)), default=200)
    _add_common(p)

    p = sub.add_parser("ends")
    p.add_argument("--configs", type=int, default=1000)
    _add_common(p)

    p = sub.add_parser("rescale")
    p.add_argument("--k", type=_int_list, default=[2, 3, 4, 5])
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--M", type=_dyadic_list,
                   default=[0.5, 0.25, 0.125, 0.0625])
    _add_common(p)

    p = sub.add_parser("ratio")
    p.add_argument("--k", type=_int_list, default=[2])
    p.add_argument("--delta", type=_dyadic_list, default=[2.0**-6])
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--occupancy", default="0.5")
    _add_common(p)

    p = sub.add_parser("kakeya")
    p.add_argument("--k", type=_int_list, default=[3])
    p.add_argument("--r", type=_dyadic_list, default=[8.0])
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--occupancy", default="0.5")
    _add_common(p)

    p = sub.add_parser("complex")
    p.add_argument("--R", type=int, default=64)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--occupancy", default="0.25")
    _add_common(p)

    sub.add_parser("sweep")
    return top


def _load_config(path):
    out = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def run(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    top = build_parser()
    if argv and argv[0] == "sweep":
        sp = _Parser(prog="planklab sweep")
        sp.add_argument("--cmd", dest="sweep_cmd", choices=sorted(_RUNNERS),
                        required=True)
        sw, rest = sp.parse_known_args(argv[1:])
        return run([sw.sweep_cmd] + rest)
    args = top.parse_args(argv)
    if args.config:
        cfg = _load_config(args.config)
        sub_argv = [args.cmd]
        for key, value in cfg.items():
            flag = "--" + key.replace("_", "-") if key in ("emit_plot",) \
                else "--" + key
            if key == "emit_plot":
                if value.lower() in ("1", "true", "yes"):
                    sub_argv.append("--emit-plot")
            else:
                sub_argv += [flag, value]
        # flags given on the command line override config values
        sub_argv += [a for a in argv if a != args.cmd and not a.startswith("--config")
                     and a != args.config]
        args = top.parse_args(sub_argv)
    try:
        header, rows, passed, meta = _RUNNERS[args.cmd](args)
    except ValueError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    return _write_reports(args, header, rows, passed, meta)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
