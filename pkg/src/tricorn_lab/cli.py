"""Command-line entry point: ``tricorn-lab <subcommand> [--flags]``.

Exit status is 0 on success, 2 when a check misses its tolerance and 1 on
usage or runtime errors.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from pathlib import Path

from . import julia, koenigs, orbits, parabolic, rays, render, scaling
from .core import iterate

OK, RUNTIME, FAILED = 0, 1, 2
OMEGA = cmath.exp(2j * math.pi / 3)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(payload, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _c(args) -> complex:
    return complex(args.c_re, args.c_im)


def _threads(args) -> int:
    return args.threads or render.default_threads()


def _image_out(args, default: str) -> Path:
    path = Path(args.out or default)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


# ------------------------------------------------------------------ commands


def cmd_render(args) -> int:
    win = render.Window.square(complex(args.center_re, args.center_im), args.width, args.px)
    grid = render.render_parameter(win, args.max_iter, threads=_threads(args))
    grid.save(_image_out(args, "tricorn.ppm"))
    return OK


def cmd_julia(args) -> int:
    win = render.Window.square(complex(args.center_re, args.center_im), args.width, args.px)
    grid = render.render_dynamical(_c(args), win, args.max_iter, threads=_threads(args))
    grid.save(_image_out(args, "julia.ppm"))
    return OK


def cmd_baby(args) -> int:
    win = render.Window.square(complex(args.center_re, args.center_im), args.width, args.px)
    grid = render.render_baby_window(args.n, win, args.max_iter, threads=_threads(args))
    grid.save(_image_out(args, f"baby_{args.n}.ppm"))
    return OK


def _ray_out(trace: rays.RayTrace, out: str | None) -> None:
    if out is not None and out.endswith(".json"):
        _emit(trace.to_json(), out)
    else:
        _emit(trace.to_csv(), out)


def cmd_ray(args) -> int:
    trace = rays.trace_dynamical_ray(_c(args), (args.angle_num, args.angle_den), g_lo=args.g_lo)
    _ray_out(trace, args.out)
    return FAILED if trace.truncated else OK


def cmd_param_ray(args) -> int:
    trace = rays.trace_parameter_ray((args.angle_num, args.angle_den), g_lo=args.g_lo)
    _ray_out(trace, args.out)
    return FAILED if trace.truncated else OK


def cmd_cn(args) -> int:
    table = orbits.cn_table(args.n_max)
    _emit([r.to_json() for r in table], args.out)
    return OK if all(r.orbit_check for r in table) else FAILED


def cmd_koenigs(args) -> int:
    chart = koenigs.build_chart(_c(args))
    z = complex(args.z_re, args.z_im)
    kappa = koenigs.koenigs_eval(chart, z)
    back = koenigs.poincare_eval(chart, kappa)
    _emit({"chart": chart.to_json(), "z": z, "kappa": kappa, "roundtrip_error": abs(back - z)}, args.out)
    return OK


def cmd_bconst(args) -> int:
    h = scaling.hat_constants()
    ref = koenigs.closed_form_constants()
    rel = {
        "A2": abs(h["A2"] / ref["A2_hat"] - 1),
        "b0": abs(h["b0"] / ref["b0"] - 1),
        "b0_star": abs(h["b0_star"] / ref["b0_star"] - 1),
    }
    ok = rel["A2"] <= 1e-6 and rel["b0"] <= 1e-4 and rel["b0_star"] <= 1e-4
    _emit({"computed": h, "closed_form": ref, "relative_error": rel, "pass": ok}, args.out)
    return OK if ok else FAILED


def cmd_scaling(args) -> int:
    rep = scaling.convergence_report(args.n_lo, args.n_hi)
    if args.out is not None and args.out.endswith(".json"):
        _emit(rep.to_json(), args.out)
    else:
        _emit(rep.to_csv(), args.out)
    worst = max((r for _, _, r in rep.rows if r is not None), default=math.inf)
    return OK if worst < 0.7 else FAILED


def cmd_aspect(args) -> int:
    frames = [scaling.build_frame(n) for n in range(args.n_lo, args.n_hi + 1)]
    ratios = {f.n: scaling.aspect_ratio(f) for f in frames}
    ok = all(abs(r - 1.8) <= 1e-12 for r in ratios.values())
    _emit({"aspect": ratios, "expected": 1.8, "pass": ok}, args.out)
    return OK if ok else FAILED


def _parabolic_point(args) -> parabolic.ParabolicPoint:
    if args.period == 1:
        if args.c_re is None:
            return parabolic.deltoid_parabolic(args.phi)
        return parabolic.parabolic_from_parameter(_c(args), 1)
    seed = orbits.solve_c_n(0).c_n if args.c_re is None else _c(args)
    return parabolic.find_parabolic_on_arc(args.period, seed, args.height)


def cmd_parabolic(args) -> int:
    pp = _parabolic_point(args)
    attr = parabolic.attracting_chart(pp)
    rep = parabolic.repelling_chart(pp)
    # the critical orbit lies in the attracting basin of pp.x
    crit = [pp.c]
    for _ in range(2):
        crit.append(iterate(pp.c, crit[-1], 2 * pp.period))
    res_a = max(parabolic.abel_residual(attr, z) for z in crit)
    rep_pts = [parabolic.repelling_fatou_inverse(rep, complex(-50.0, y)) for y in (-1.0, 0.0, 1.0)]
    res_r = max(parabolic.abel_residual(rep, z) for z in rep_pts)
    out = {
        "point": pp.to_json(),
        "E_crit": parabolic.critical_ecalle_height(pp),
        "abel_residual_attracting": res_a,
        "abel_residual_repelling": res_r,
    }
    _emit(out, args.out)
    return OK if max(res_a, res_r) < 1e-6 else FAILED


def cmd_access(args) -> int:
    if args.period == 1 and args.c_re is None:
        pp = parabolic.parabolic_from_parameter(OMEGA / 4, 1)
    else:
        pp = _parabolic_point(args)
    report = parabolic.accessibility_test(pp, args.epsilon)
    _emit(report.to_json(), args.out)
    return OK if report.verdict else FAILED


def cmd_rl_fit(args) -> int:
    fit = julia.rl_scaling_fit(count=args.count, seed=args.seed)
    ok = 0.4 <= fit.slope <= 0.6 and fit.r2 >= 0.95
    _emit({**fit.to_json(), "seed": args.seed, "pass": ok}, args.out)
    return OK if ok else FAILED


def cmd_argquant(args) -> int:
    q = julia.argument_quantization(args.n, args.m, args.count, args.seed)
    _emit(q.to_json(), args.out)
    return OK


def cmd_interval(args) -> int:
    lo, hi = julia.koenigs_interval_check(args.grid_step)
    ok = abs(lo - 4 / 9) <= 1e-8 and abs(hi - 16 / 9) <= 1e-8
    _emit({"lo": lo, "hi": hi, "expected": [4 / 9, 16 / 9], "pass": ok}, args.out)
    return OK if ok else FAILED


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tricorn-lab", description="Numerical experiments on the tricorn family conj(z)^2 + c.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", default=None, help="output file (default: stdout, or an image name)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=None)
        return sp

    def window(sp, cx=0.0, width=4.0, px=512, max_iter=500):
        sp.add_argument("--center-re", type=float, default=cx)
        sp.add_argument("--center-im", type=float, default=0.0)
        sp.add_argument("--width", type=float, default=width)
        sp.add_argument("--px", type=int, default=px)
        sp.add_argument("--max-iter", type=int, default=max_iter)

    def param_c(sp, re=0.0, im=0.0):
        sp.add_argument("--c-re", type=float, default=re)
        sp.add_argument("--c-im", type=float, default=im)

    def angle(sp, num=0, den=1):
        sp.add_argument("--angle-num", type=int, default=num)
        sp.add_argument("--angle-den", type=int, default=den)

    window(add("render", cmd_render, "escape-time image of the tricorn"), cx=-0.25, width=4.5)
    sp = add("julia", cmd_julia, "escape-time image of K(f_c)")
    window(sp)
    param_c(sp)
    sp = add("baby", cmd_baby, "baby tricorn window around c_n, axes in t")
    window(sp, cx=-0.005, width=0.06, px=256, max_iter=2000)
    sp.add_argument("--n", type=int, default=3)
    sp = add("ray", cmd_ray, "dynamical ray, CSV (or JSON for a .json --out)")
    param_c(sp)
    angle(sp)
    sp.add_argument("--g-lo", type=float, default=1e-6)
    sp = add("param-ray", cmd_param_ray, "parameter ray")
    angle(sp)
    sp.add_argument("--g-lo", type=float, default=1e-3)
    sp = add("cn", cmd_cn, "table of the real parameters c_n")
    sp.add_argument("--n-max", type=int, default=8)
    sp = add("koenigs", cmd_koenigs, "Koenigs coordinate at the beta fixed point")
    param_c(sp, -2.0)
    sp.add_argument("--z-re", type=float, default=1.0)
    sp.add_argument("--z-im", type=float, default=0.0)
    add("bconst", cmd_bconst, "A_2, b0 and b0* at c = -2 against their closed forms")
    sp = add("scaling", cmd_scaling, "convergence of the rescaled return maps")
    sp.add_argument("--n-lo", type=int, default=2)
    sp.add_argument("--n-hi", type=int, default=scaling.N_MAX)
    sp = add("aspect", cmd_aspect, "aspect ratio |rho_n(i)| / |rho_n(1)|")
    sp.add_argument("--n-lo", type=int, default=0)
    sp.add_argument("--n-hi", type=int, default=scaling.N_MAX)
    for name, func, help_ in (("parabolic", cmd_parabolic, "parabolic point with Fatou chart diagnostics"),
                              ("access", cmd_access, "strip-escape accessibility test")):
        sp = add(name, func, help_)
        sp.add_argument("--period", type=int, default=1)
        sp.add_argument("--c-re", type=float, default=None)
        sp.add_argument("--c-im", type=float, default=0.0)
        sp.add_argument("--phi", type=float, default=0.0)
        sp.add_argument("--height", type=float, default=0.0)
        sp.add_argument("--epsilon", type=float, default=0.05)
    sp = add("rl-fit", cmd_rl_fit, "square-root scaling of K(f_c) near c = -2")
    sp.add_argument("--count", type=int, default=20_000)
    sp = add("argquant", cmd_argquant, "argument quantization in the m-th band at c_n")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--count", type=int, default=20_000)
    sp = add("interval", cmd_interval, "image of [-1, 1] under kappa_{-2}")
    sp.add_argument("--grid-step", type=float, default=1e-3)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"tricorn-lab: {exc}", file=sys.stderr)
        return RUNTIME
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"tricorn-lab: error: {exc}", file=sys.stderr)
        return RUNTIME


def main() -> None:
    sys.exit(run())
