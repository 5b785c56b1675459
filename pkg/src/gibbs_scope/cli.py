"""Command-line interface.

Every command accepts ``--config FILE`` holding flat ``key = value`` lines;
explicit command-line options win over the file. Data files are CSV (floats
written with 17 significant digits) or JSON reports carrying
``schema_version``, the resolved configuration and the library version.
"""

import argparse
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import __version__
from ._numerics import parse_range
from .errors import GibbsScopeError, InvalidParameterError

SCHEMA_VERSION = 1


# --------------------------------------------------------------------------- output


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Float(float(obj))
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


class _Float(float):
    """Float marker so the encoder can apply the fixed format."""


def _encode(obj, indent=0):
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_encode(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _encode(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, _Float):
        if math.isfinite(obj):
            return format(float(obj), ".17g")
        return json.dumps(format_value(obj))
    return json.dumps(obj)


def to_json_text(obj):
    return _encode(_jsonable(obj)) + "\n"


def parse_json_value(v):
    """Inverse of the JSON encoding for non-finite floats stored as strings."""
    if v in ("inf", "-inf", "nan"):
        return float(v)
    return v


def to_csv_text(header, rows):
    lines = [",".join(header)]
    lines += [",".join(format_value(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def read_csv(path):
    """Parse a CSV written by this tool back into header and typed rows."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        row = []
        for cell in line.split(","):
            try:
                row.append(int(cell))
            except ValueError:
                try:
                    row.append(float(cell))
                except ValueError:
                    row.append(cell)
        rows.append(row)
    return header, rows


def atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text, meta=None):
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    atomic_write(args.output, text)
    if meta is not None:
        atomic_write(args.output + ".meta.json", to_json_text(meta))


def _report(args, command, results):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "config": resolved_config(args),
        "results": results,
    }


def emit_report(args, command, results):
    _emit(args, to_json_text(_report(args, command, results)))


def emit_table(args, command, header, rows, summary=None):
    meta = _report(args, command, summary or {})
    if getattr(args, "format", "csv") == "json":
        results = dict(summary or {})
        results["columns"] = list(header)
        results["rows"] = [list(r) for r in rows]
        _emit(args, to_json_text(_report(args, command, results)))
    else:
        _emit(args, to_csv_text(header, rows), meta)


# --------------------------------------------------------------------------- config

_INTERNAL = {"func", "command", "config", "output", "cert", "dl", "_defaults", "_required"}


def read_config(path):
    """Flat key = value file; '#' starts a comment; keys may use '-' or '_'."""
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise InvalidParameterError(f"cannot read config file {path!r}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def resolved_config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _INTERNAL}


def _resolve(args):
    """Fill unset options from the config file, then from defaults; check required ones."""
    defaults = getattr(args, "_defaults", {})
    conv = getattr(args, "_converters", {})
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    known = set(defaults) | set(getattr(args, "_required", ()))
    for key in cfg:
        if key not in known and key != "output" and key != "format":
            raise InvalidParameterError(f"unknown config key {key!r}")
    if "output" in cfg and args.output is None:
        args.output = cfg["output"]
    if "format" in cfg and getattr(args, "format", None) is None:
        args.format = cfg["format"]
    for key in known:
        if getattr(args, key, None) is None:
            if key in cfg:
                try:
                    setattr(args, key, conv.get(key, str)(cfg[key]))
                except (TypeError, ValueError) as exc:
                    raise InvalidParameterError(f"invalid value for {key}: {cfg[key]!r}") from exc
            elif key in defaults:
                setattr(args, key, defaults[key])
    for key in getattr(args, "_required", ()):
        if getattr(args, key, None) is None:
            raise InvalidParameterError(f"missing required parameter: --{key.replace('_', '-')}")
    if hasattr(args, "format") and args.format is None:
        args.format = "csv"
    del args._defaults, args._required, args._converters
    return args


def _bool(text):
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _range(text):
    try:
        a, b, n = parse_range(text)
    except ValueError as exc:
        raise InvalidParameterError(str(exc)) from exc
    if n < 2:
        raise InvalidParameterError(f"grid {text!r} needs at least 2 points")
    if not (b > a):
        raise InvalidParameterError(f"grid {text!r} must have start < stop")
    return a, b, n


def _interval(text):
    parts = str(text).split(":")
    if len(parts) != 2:
        raise InvalidParameterError(f"expected lo:hi, got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise InvalidParameterError(f"interval {text!r} must have lo < hi")
    return lo, hi


class _Spec:
    """Collects option definitions so defaults and required keys are known to _resolve."""

    def __init__(self, parser):
        self.parser = parser
        self.defaults, self.required, self.converters = {}, [], {}
        parser.add_argument("--config", default=None, help="flat key = value config file")
        parser.add_argument("--output", "-o", default=None, help="output path (default stdout)")

    def opt(self, name, type=float, default=None, required=False, help=None, **kw):
        dest = name.lstrip("-").replace("-", "_")
        self.parser.add_argument(name, dest=dest, type=type, default=None, help=help, **kw)
        self.converters[dest] = type
        if required:
            self.required.append(dest)
        else:
            self.defaults[dest] = default
        return self

    def flag(self, name, help=None):
        dest = name.lstrip("-").replace("-", "_")
        self.parser.add_argument(name, dest=dest, action="store_const", const=True, default=None, help=help)
        self.defaults[dest] = False
        self.converters[dest] = _bool
        return self

    def done(self, func):
        self.parser.set_defaults(func=func, _defaults=dict(self.defaults),
                                 _required=tuple(self.required), _converters=dict(self.converters))


def _quad(args):
    from .circle_kernel import QuadratureGrid

    return QuadratureGrid(args.quad_points)


# --------------------------------------------------------------------------- commands


def cmd_kernel(args):
    from .circle_kernel import (
        Convention,
        HeatKernelSpec,
        fourier_density,
        heat_kernel_density,
        wrapped_gaussian_density,
    )

    if args.points < 4:
        raise InvalidParameterError("--points must be at least 4")
    theta = 2 * math.pi * np.arange(args.points) / args.points
    if args.compare_conventions:
        spec = HeatKernelSpec(args.t, Convention.FOURIER_QT, args.fourier_K)
        q = fourier_density(theta, spec.fourier_time, spec.truncation_K)
        w = wrapped_gaussian_density(theta, 2 * args.t)
        diff = np.abs(q - w)
        rows = list(zip(theta, q, w, diff))
        emit_table(args, "kernel", ("theta", "fourier_qt", "wrapped_2t", "abs_diff"), rows,
                   {"max_abs_diff": float(diff.max())})
        return 0
    spec = HeatKernelSpec(args.t, args.convention, args.fourier_K)
    dens = heat_kernel_density(theta, spec)
    total = float(dens.sum() * 2 * math.pi / args.points)
    if abs(total - 1.0) > 1e-9:
        from .errors import QuadratureConvergenceError

        raise QuadratureConvergenceError(
            f"kernel mass on {args.points} points is {total!r}; increase --points"
        )
    emit_table(args, "kernel", ("theta", "density"), list(zip(theta, dens)),
               {"mass": total, "truncation_K": spec.truncation_K})
    return 0


def _kernel_spec(args, t=None):
    from .circle_kernel import Convention, HeatKernelSpec

    return HeatKernelSpec(args.t if t is None else t, Convention(args.convention), args.fourier_K)


def cmd_profile(args):
    from .errors import QuadratureConvergenceError
    from .meanfield_rate import make_G_evaluator

    a, b, n = _range(args.u_range)
    U = np.linspace(a, b, n)
    spec = _kernel_spec(args)
    grid = _quad(args)
    G = make_G_evaluator(args.beta, args.hbar, args.epsilon, args.t, grid, spec)(U)
    G2 = make_G_evaluator(args.beta, args.hbar, args.epsilon, args.t, grid.refined(), spec)(U)
    change = float(np.abs(G2 - G).max())
    if change > 1e-9:
        raise QuadratureConvergenceError(f"profile changed by {change:.3e} under node doubling")
    d = np.diff(G)
    minima = [float(U[i + 1]) for i in range(len(d) - 1) if d[i] < 0 <= d[i + 1]]
    emit_table(args, "profile", ("U", "G"), list(zip(U, G)),
               {"grid_local_minima": minima, "refinement_change": change})
    return 0


def _epsilon_star_payload(res):
    return {
        "epsilon_star": res.epsilon,
        "bisection_width": res.width,
        "depth_difference": res.depth_difference,
        "U_minima": [m.location for m in res.minima],
        "depths": [m.depth for m in res.minima],
        "iterations": res.iterations,
        "bracket": list(res.bracket),
    }


def cmd_epsilon_star(args):
    from .bifurcation import epsilon_star, verify_argmin_jump
    from .circle_kernel import Convention, HeatKernelSpec
    from .errors import BifurcationError

    grid = _quad(args)
    spec = _kernel_spec(args)
    res = epsilon_star(args.beta, args.hbar, args.t, args.bracket, args.tol, args.width_tol,
                       grid, spec)
    out = _epsilon_star_payload(res)
    out["argmin_jump"] = verify_argmin_jump(args.beta, args.hbar, args.t, res, 1e-4, grid, spec)
    out["convention"] = spec.convention.value
    if args.sensitivity:
        other = (Convention.WRAPPED_PT if spec.convention is Convention.FOURIER_QT
                 else Convention.FOURIER_QT)
        alt_spec = HeatKernelSpec(args.t, other)
        try:
            alt = _find_alt_epsilon(args, grid, alt_spec)
            out["sensitivity"] = {"convention": other.value, **_epsilon_star_payload(alt)}
        except BifurcationError as exc:
            out["sensitivity"] = {"convention": other.value, "error": str(exc)}
    emit_report(args, "epsilon-star", out)
    return 0


def _find_alt_epsilon(args, grid, spec):
    """Locate a bracket for the alternate convention by scanning epsilon."""
    from .bifurcation import _flip_brackets, epsilon_star, profile_minima
    from .errors import BracketError

    eps = tuple(np.linspace(0.0, math.pi, 65)[:-1])
    reps = [profile_minima(args.beta, args.hbar, e, args.t, grid, spec) for e in eps]
    for lo, hi in _flip_brackets(eps, reps):
        return epsilon_star(args.beta, args.hbar, args.t, (lo, hi), args.tol, args.width_tol, grid, spec)
    raise BracketError("no basin flip found for the alternate convention")


def cmd_scan(args):
    from .bifurcation import ScanRow, classify_gibbs, time_interval_scan

    grid = _quad(args)
    a, b, n = _range(args.epsilon_grid)
    eps = tuple(float(e) for e in np.linspace(a, b, n))
    if args.t_grid:
        ta, tb, tn = _range(args.t_grid)
        ts = np.geomspace(ta, tb, tn) if args.log_t else np.linspace(ta, tb, tn)
        res = time_interval_scan(args.beta, args.hbar, ts, eps, grid=grid,
                                 check_disk=not args.axis_only)
        rows = [(t, v.verdict.value, v.witness.epsilon if v.witness else math.nan,
                 "; ".join(v.annotations)) for t, v in res.entries]
        emit_table(args, "scan", ("t", "verdict", "epsilon_star", "annotations"), rows,
                   {"windows": [list(w) for w in res.windows]})
        return 0
    if args.t is None:
        raise InvalidParameterError("missing required parameter: --t (or give --t-grid)")
    v = classify_gibbs(args.beta, args.hbar, args.t, eps, grid=grid, check_disk=not args.axis_only)
    summary = {"verdict": v.verdict.value, "annotations": list(v.annotations)}
    if v.witness is not None:
        summary["witness"] = _epsilon_star_payload(v.witness)
    emit_table(args, "scan", ScanRow.FIELDS, [r.as_tuple() for r in v.rows], summary)
    if args.output in (None, "-") and args.format == "csv":
        print(f"verdict: {v.verdict.value}", file=sys.stderr)
    return 0


def _mf_payload(C):
    return {"C": C.value, "hessian_max_norm": C.hessian_max_norm, "delta_g": C.delta_g,
            "lipschitz_norm": C.lipschitz_norm, "delta_Fg": C.delta_Fg, "converged": C.converged}


def cmd_certificate(args):
    from .certificates import lattice as lat
    from .certificates import meanfield as mf
    from .circle_kernel import Convention, HeatKernelSpec, std_alpha_heat

    name = args.cert
    out = {"condition": name}
    if name in ("generalint", "thm2", "cor3", "prop1"):
        if name == "cor3":
            C = mf.cor3_constant(args.beta, args.n)
            out["C"] = C
        else:
            Cc = mf.mf_cfg_constant(mf.quadratic_rotator_spec(args.beta, args.n))
            out.update(_mf_payload(Cc))
            out["closed_form_C"] = mf.cor3_constant(args.beta, args.n)
            C = Cc.value
        if name == "generalint":
            if args.t is None:
                raise InvalidParameterError("missing required parameter: --t")
            if args.n != 1:
                raise InvalidParameterError("std_alpha(k) is computed on the circle only (n = 1)")
            sk = std_alpha_heat(HeatKernelSpec(args.t, Convention.FOURIER_QT))
            cert = mf.mf_gibbs_certificate(C, sk)
            out.update(std_alpha_k=sk, holds=cert.holds, margin=cert.margin,
                       continuity_coefficient=cert.continuity_coefficient)
        elif name in ("thm2", "cor3"):
            th = mf.thm2_threshold(args.beta, args.n, C)
            out.update(t_max=th.t_max, holds_for_all_t=th.holds_for_all_t,
                       two_C_squared=2 * C * C)
            if args.t is not None:
                out.update(t=args.t, condition_value=th.condition(args.t), holds=th.holds_at(args.t),
                           continuity_coefficient=th.continuity_coefficient(args.t))
        else:
            if args.rho is None:
                raise InvalidParameterError("missing required parameter: --rho")
            cert = mf.fineness_certificate_mf(C, args.rho)
            out.update(rho=args.rho, holds=cert.holds, rho_max=cert.rho_max, minimal_arc_count=cert.min_arcs)
        emit_report(args, "certificate", out)
        return 0
    spec = lat.LatticeInteractionSpec(args.beta, args.J, args.h, args.d, args.n, args.torus_side)
    L = lat.lattice_L_constants(spec)
    out.update(L_pair=L.L_pair, L_site=L.L_site, L_converged=L.converged,
               site_sup_sum=spec.site_sup_sum, field_in_site_sum=True)
    if name == "fineapp":
        if args.rho is None:
            raise InvalidParameterError("missing required parameter: --rho")
        cert = lat.fineapp_certificate(spec, args.rho)
        out.update(rho=args.rho, holds=cert.holds, rho_max=cert.rho_max, minimal_arc_count=cert.min_arcs)
    else:
        if args.t is None:
            raise InvalidParameterError("missing required parameter: --t")
        if name == "genthm":
            cert = lat.genthm_certificate(spec, args.t)
            out.update(t=args.t, holds=cert.holds, cbar_row_sum=cert.row_sum, t_max=cert.t_max)
            if cert.Qbar is not None:
                out.update(qbar_row_sum=cert.Qbar.offdiag_row_sum_sup,
                           qbar_distance_profile=cert.Qbar.graph_distance_profile())
        else:
            cmp = lat.std_ij_comparison(spec, args.t)
            C = lat.cbar_matrix(spec, cmp.bound)
            out.update(t=args.t, std_ij_bound=cmp.bound, std_ij_direct=cmp.direct,
                       cbar_row_sum=C.row_sum_sup, holds=C.row_sum_sup < 1)
            if C.row_sum_sup < 1:
                Q = lat.goodness_matrix_Q(spec, C)
                out.update(q_row_sum=Q.offdiag_row_sum_sup, q_distance_profile=Q.graph_distance_profile())
    emit_report(args, "certificate", out)
    return 0


def _dl_params(args, eps=None):
    from .double_layer import PairPotentialParams, default_time

    t = args.t if args.t is not None else default_time(args.beta, args.h)
    return PairPotentialParams(args.beta, args.J, args.h, t, args.epsilon if eps is None else eps)


def _ground_payload(rep):
    return {
        "unique": rep.unique,
        "degenerate": rep.degenerate,
        "near_form_flags": rep.near_form_flags,
        "minima": [{"location": list(m.location), "depth": m.depth, "form": m.form,
                    "positive_definite": m.positive_definite, "hessian": m.hessian}
                   for m in rep.minima],
        "num_global": len(rep.global_minima),
    }


def cmd_doublelayer(args):
    from . import double_layer as dl

    name = args.dl
    if name == "recovery":
        r = dl.recovery_check(args.J, args.h, args.t if args.t is not None else 5.0, args.beta, args.epsilon)
        emit_report(args, "doublelayer", {"condition": "recovery", **vars(r)})
        return 0
    p = _dl_params(args)
    if name == "surface":
        n = args.grid_n
        g = 2 * math.pi * np.arange(n) / n
        S1, S2 = np.meshgrid(g, g, indexing="ij")
        V = dl.make_potential(p)(S1, S2)
        rows = list(zip(S1.ravel(), S2.ravel(), V.ravel()))
        emit_table(args, "doublelayer", ("sigma1", "sigma2", "phi"), rows, {"t": p.t})
        return 0
    if name == "ground-states":
        rep = dl.ground_states(p, args.grid_n)
        m6 = dl.malyshev6_conditions(dl.make_potential(p), rep.global_minima)
        emit_report(args, "doublelayer", {"condition": "ground-states", "t": p.t, **_ground_payload(rep),
                                          "hessian_ratios": list(m6.ratios)})
        return 0
    bracket = args.bracket or dl.find_spin_flop_bracket(args.beta, args.J, args.h, p.t)
    res = dl.spin_flop_epsilon(args.beta, args.J, args.h, p.t, bracket)
    rep = dl.ground_states(p.__class__(p.beta, p.J, p.h, p.t, res.epsilon), args.grid_n)
    m6 = dl.malyshev6_conditions(dl.make_potential(p.__class__(p.beta, p.J, p.h, p.t, res.epsilon)),
                                 rep.global_minima)
    emit_report(args, "doublelayer", {
        "condition": "spin-flop", "t": p.t, "epsilon_star": res.epsilon, "width": res.width,
        "depth_difference": res.depth_difference, "north": list(res.basins.north),
        "south": list(res.basins.south), "leading_order_residual": res.leading_order_residual,
        "ground_states": _ground_payload(rep), "hessian_ratios": list(m6.ratios),
        "all_positive_definite": m6.all_positive_definite,
    })
    return 0


# --------------------------------------------------------------------------- parser


def build_parser():
    parser = argparse.ArgumentParser(prog="gibbs-scope", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def table(p):
        p.add_argument("--format", choices=("csv", "json"), default=None)

    s = _Spec(sub.add_parser("kernel", help="circle heat-kernel profiles"))
    table(s.parser)
    (s.opt("--t", required=True).opt("--convention", str, "fourier_qt", choices=("fourier_qt", "wrapped_pt"))
     .opt("--points", int, 256).opt("--fourier-K", int, None).flag("--compare-conventions").done(cmd_kernel))

    s = _Spec(sub.add_parser("profile", help="reduced functional G(U)"))
    table(s.parser)
    (s.opt("--beta", required=True).opt("--hbar", required=True).opt("--epsilon", required=True)
     .opt("--t", required=True).opt("--u-range", str, "-8:8:801").opt("--quad-points", int, 1024)
     .opt("--fourier-K", int, None).opt("--convention", str, "fourier_qt").done(cmd_profile))

    s = _Spec(sub.add_parser("epsilon-star", help="equal-depth conditioning tilt"))
    (s.opt("--beta", required=True).opt("--hbar", required=True).opt("--t", required=True)
     .opt("--bracket", _interval, (0.3, 0.4)).opt("--tol", float, 1e-10).opt("--width-tol", float, 1e-9)
     .opt("--quad-points", int, 1024).opt("--fourier-K", int, None).opt("--convention", str, "fourier_qt")
     .flag("--sensitivity").done(cmd_epsilon_star))

    s = _Spec(sub.add_parser("scan", help="Gibbs classification over an epsilon grid"))
    table(s.parser)
    (s.opt("--beta", required=True).opt("--hbar", required=True).opt("--t", float, None)
     .opt("--epsilon-grid", str, "0:3.0434179:32").opt("--t-grid", str, None).flag("--log-t")
     .flag("--axis-only").opt("--quad-points", int, 1024).done(cmd_scan))

    cp = sub.add_parser("certificate", help="sufficient Gibbsianness conditions")
    csub = cp.add_subparsers(dest="cert", required=True)
    for name in ("generalint", "thm2", "cor3", "prop1", "mainthm-lat", "genthm", "fineapp"):
        s = _Spec(csub.add_parser(name))
        s.opt("--beta", required=True).opt("--n", int, 1).opt("--t", float, None).opt("--rho", float, None)
        if name in ("mainthm-lat", "genthm", "fineapp"):
            s.opt("--J", float, 1.0).opt("--h", float, 0.0).opt("--d", int, 2).opt("--torus-side", int, 16)
        s.done(cmd_certificate)

    dp = sub.add_parser("doublelayer", help="conditioned double-layer potential")
    dsub = dp.add_subparsers(dest="dl", required=True)
    for name in ("surface", "ground-states", "spin-flop", "recovery"):
        s = _Spec(dsub.add_parser(name))
        if name == "surface":
            table(s.parser)
        (s.opt("--beta", required=True).opt("--J", float, 1.0).opt("--h", float, 0.0)
         .opt("--t", float, None).opt("--epsilon", float, 0.0)
         .opt("--grid-n", int, 128 if name == "surface" else 256))
        if name == "spin-flop":
            s.opt("--bracket", _interval, None)
        s.done(cmd_doublelayer)
    return parser


_NEGATIVE = re.compile(r"^-\.?\d")


def _join_negative_values(argv):
    """Attach values such as '-4:6:5' to the preceding long option."""
    out = []
    for tok in argv:
        if out and _NEGATIVE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    try:
        _resolve(args)
        return int(args.func(args) or 0)
    except GibbsScopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InvalidParameterError.exit_code


if __name__ == "__main__":
    sys.exit(main())
