"""Command-line front end.

Every subcommand writes JSON (default) or CSV to stdout or ``--out``.
Outputs carry a provenance header (package version, seed, SHA-256 of the
parsed configuration) and no timestamps, so identical command lines give
byte-identical files.  Failures print ``{"error": <class name>, "message": ...}``
to stderr: exit 2 for usage errors, 1 for errors raised by the library.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import levy_core, operator_stable2d as os2d, renorm_sampling as rs
from . import scaling_theory as st, stable1d, stable_density as sd
from .errors import InvalidParameter, NormalLaw, StableMechError
from .stable1d import StableLaw1D


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    epsabs: float = 1e-13
    epsrel: float = 1e-10
    fmt: str = "json"
    out: str | None = None

    def __post_init__(self):
        if self.epsabs <= 0 or self.epsrel <= 0:
            raise InvalidParameter("tolerances must be positive")
        if self.fmt not in ("json", "csv"):
            raise InvalidParameter(f"unknown output format {self.fmt!r}")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(v)) if "/" in v else float(v) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _complexes(text: str) -> list[complex]:
    try:
        return [complex(v.replace(" ", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}")


def _number(text: str) -> float:
    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")


def _exact(text: str):
    try:
        return st.as_number(text)
    except InvalidParameter as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _grid(text: str) -> list[float]:
    """``lo:hi:n`` linear grid or a comma list."""
    if ":" not in text:
        return _floats(text)
    try:
        lo, hi, n = text.split(":")
        return np.linspace(_number(lo), _number(hi), int(n)).tolist()
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}")


def _add_law(p: argparse.ArgumentParser, alpha_required: bool = True) -> None:
    g = p.add_argument_group("stable law (S1 parameters, or tail weights c1/c2)")
    g.add_argument("--alpha", type=_number, required=alpha_required, help="characteristic exponent in (0, 2]")
    g.add_argument("--beta", type=_number, default=0.0, help="skewness in [-1, 1] (default 0)")
    g.add_argument("--sigma", type=_number, default=1.0, help="scale; alpha=2 gives variance 2 sigma^2")
    g.add_argument("--loc", type=_number, default=0.0, help="location a (default 0)")
    g.add_argument("--c1", type=_number, help="right tail weight (overrides sigma/beta)")
    g.add_argument("--c2", type=_number, help="left tail weight (overrides sigma/beta)")


def _law(args) -> StableLaw1D:
    if args.c1 is not None or args.c2 is not None:
        return StableLaw1D(args.alpha, args.c1 or 0.0, args.c2 or 0.0, args.loc)
    return StableLaw1D.from_sigma_beta(args.alpha, args.sigma, args.beta, args.loc)


def _add_tail(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("tail model")
    g.add_argument("--model", choices=("pareto", "gaussian", "pareto-log"), default="pareto")
    g.add_argument("--tail-alpha", type=_number, default=1.5, help="tail exponent of the model")
    g.add_argument("--c-right", type=_number, default=1.0)
    g.add_argument("--c-left", type=_number, default=0.0)
    g.add_argument("--shift", type=_number, default=0.0)


def _tail(args) -> rs.TailModel:
    if args.model == "gaussian":
        return rs.TailModel.gaussian()
    if args.model == "pareto-log":
        return rs.TailModel.log_corrected_pareto(args.tail_alpha)
    return rs.TailModel.pareto(args.tail_alpha, args.c_right, args.c_left, args.shift)


def _exponent(args) -> os2d.ExponentMatrix:
    if args.B is not None:
        if len(args.B) != 4:
            raise InvalidParameter("--B needs four entries b11,b12,b21,b22")
        return os2d.ExponentMatrix.from_matrix(np.reshape(args.B, (2, 2)))
    if args.shape == "diagonal":
        return os2d.ExponentMatrix.diagonal(args.alpha1, args.alpha2)
    if args.shape == "scalar":
        return os2d.ExponentMatrix.scalar(args.alpha1)
    if args.shape == "lower-triangular":
        return os2d.ExponentMatrix.lower_triangular(args.alpha1, args.coupling)
    return os2d.ExponentMatrix.symmetric(args.alpha1, args.coupling)


def _add_exponent(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("exponent matrix B")
    g.add_argument("--shape", choices=os2d.SHAPES, default="diagonal")
    g.add_argument("--alpha1", type=_number, default=2.0, help="B11 = 1/alpha1")
    g.add_argument("--alpha2", type=_number, default=2.0, help="B22 = 1/alpha2 (diagonal shape)")
    g.add_argument("--coupling", type=_number, default=0.0, help="off-diagonal entry")
    g.add_argument("--B", type=_floats, help="explicit matrix b11,b12,b21,b22")


# ---------------------------------------------------------------------------
# commands: each returns (json payload, csv rows or None)
# ---------------------------------------------------------------------------


def _cmd_cf(args, cfg):
    law = _law(args)
    triple = stable1d.induced_triple(law) if args.canonical else None
    rows = []
    for y in args.y:
        z = stable1d.log_cf(law, y)
        row = {"y": y, "re": z.real, "im": z.imag}
        if triple is not None:
            w = levy_core.eval_log_cf(triple, y, levy_core.QuadSettings(epsrel=cfg.epsrel))
            row.update(canonical_re=w.real, canonical_im=w.imag)
        rows.append(row)
    return {"law": law.to_dict(), "values": rows}, rows


def _cmd_lnz(args, cfg):
    law = _law(args)
    triple = stable1d.induced_triple(law)
    rows = []
    for v in args.v:
        rows.append({"v": v, "singular": stable1d.singular_lnZ(law, v),
                     "lnz_shift": levy_core.log_partition_shift(triple, v)})
    out = {"law": law.to_dict(), "transition": stable1d.classify_transition(law.alpha).kind.value,
           "values": rows}
    if args.order:
        out["exponent"] = stable1d.singularity_exponent(law, args.order)
    return out, rows


def _cmd_density(args, cfg):
    law = _law(args)
    settings = sd.InversionSettings(epsabs=cfg.epsabs, epsrel=cfg.epsrel)
    vals = sd.density(law, np.asarray(args.x, float), settings)
    rows = [{"x": x, "density": float(g)} for x, g in zip(args.x, np.atleast_1d(vals))]
    return {"law": law.to_dict(), "values": rows}, rows


def _cmd_mellin(args, cfg):
    spec = sd.MellinSpec(args.alpha, args.rho)
    rows = []
    for s in args.s:
        m = sd.mellin_value(spec, s)
        rows.append({"s_re": s.real, "s_im": s.imag, "M_re": m.real, "M_im": m.imag})
    out = {"alpha": args.alpha, "rho": args.rho, "values": rows}
    fox = sd.fox_params(args.alpha, args.rho)
    out["fox_h"] = {"orders": list(fox.orders), "upper": [list(p) for p in fox.upper],
                    "lower": [list(p) for p in fox.lower]}
    if args.meijer:
        g = sd.meijer_reduction(*args.meijer)
        out["meijer_g"] = {
            "M": g.M, "N": g.N, "L": g.L, "orders": list(g.orders),
            "upper": [str(v) for v in g.upper], "lower": [str(v) for v in g.lower],
            "prefactor": g.prefactor, "prefactor_exponent": str(g.prefactor_exponent),
            "arg_power": g.arg_power, "arg_coeff": str(g.arg_coeff), "ode_order": g.ode_order,
        }
    return out, rows


def _cmd_sample(args, cfg):
    law = _law(args)
    s = rs.sample(law, args.n, seed=cfg.seed, workers=args.workers)
    out = {"law": law.to_dict(), "n": s.size, "median": s.median()}
    if args.samples_out:
        rs.write_samples(args.samples_out, s.values, "text" if args.text else "binary")
        out["file"] = str(args.samples_out)
        out["sha256"] = hashlib.sha256(Path(args.samples_out).read_bytes()).hexdigest()
    rows = [{"value": v} for v in s.values.tolist()] if cfg.fmt == "csv" else None
    return out, rows


def _cmd_stability(args, cfg):
    crit = rs.ks_critical_value(args.N, args.N, args.level)
    rows = []
    if args.samples:
        vals = rs.read_samples(args.samples, "text" if args.text else "binary")
        base = rs.EmpiricalDistribution(vals[: len(vals) // (args.n + 1)])
        pool = rs.EmpiricalDistribution(vals[len(vals) // (args.n + 1):])
        ks = rs.fixed_point_distance_samples(base, pool, args.n, args.alpha, args.b_n)
        crit = rs.ks_critical_value(base.size, pool.size // args.n, args.level)
        rows.append({"seed": None, "ks": ks, "critical": crit, "below": ks < crit})
        return {"source": str(args.samples), "n": args.n, "values": rows}, rows
    law = _law(args)
    for k in range(args.seeds):
        ks = rs.fixed_point_distance(law, args.n, args.N, seed=cfg.seed + k, workers=args.workers)
        rows.append({"seed": cfg.seed + k, "ks": ks, "critical": crit, "below": ks < crit})
    return {"law": law.to_dict(), "n": args.n, "N": args.N, "values": rows}, rows


def _cmd_attraction(args, cfg):
    res = rs.attraction_test(_tail(args), args.alpha, args.k, tol=args.tol)
    return {"model": _tail(args).name, "alpha": args.alpha, "attracted": res.attracted,
            "c_ratio": _jnum(res.c_ratio),
            "intercepts": {str(k): _jnum(v) for k, v in res.intercepts.items()}}, None


def _cmd_norm(args, cfg):
    rows = []
    for n in args.n:
        A, b = rs.norm_constants(_tail(args), args.alpha, n)
        rows.append({"n": n, "A_n": A, "b_n": b})
    return {"model": _tail(args).name, "alpha": args.alpha, "values": rows}, rows


def _cmd_indexes(args, cfg):
    if args.preset:
        res = st.preset_indexes(args.preset)
    else:
        if args.alpha1 is None or args.alpha2 is None:
            raise UsageError("give --preset or both --alpha1 and --alpha2")
        res = st.critical_indexes(args.alpha1, args.alpha2, args.dim)
    return res.to_dict(), [res.to_dict()]


def _phi_rows(ev, ts, hs):
    rows = []
    for t in ts:
        for h in hs:
            row = {"t": t, "h": h, "phi": math.nan, "C": math.nan, "eta": math.nan, "chi": math.nan}
            try:
                row["phi"] = st.phi(ev, t, h)
                row.update(st.thermo_derivatives(ev, t, h))
            except StableMechError:
                pass  # singular points stay nan
            rows.append(row)
    return rows


def _cmd_phi_grid(args, cfg):
    if args.preset:
        ev = st.preset_evaluator(args.preset)
    else:
        ev = st.PhiEvaluator(float(args.alpha1), float(args.alpha2), float(args.dim))
    rows = _phi_rows(ev, args.t, args.h)
    return {"alpha1": ev.alpha1, "alpha2": ev.alpha2, "d": _jnum(ev.d),
            "values": [{k: _jnum(v) for k, v in r.items()} for r in rows]}, rows


def _cmd_ising(args, cfg):
    k = st.IsingConstants(c=args.c, c2=args.c2, c3=args.c3, c4=args.c4, c6=args.c6)
    ev = st.PhiEvaluator.ising_model(k)
    rows = _phi_rows(ev, args.t, args.h)
    out = {"constants": asdict(k), "values": [{kk: _jnum(v) for kk, v in r.items()} for r in rows]}
    if args.exponents:
        ts = np.logspace(-1, -3, 7)
        hs = np.logspace(-1, -4, 7)
        out["beta"] = st.log_slope(ts, [st.thermo_derivatives(ev, -t, 0.0)["eta"] for t in ts])
        out["one_over_delta"] = st.log_slope(hs, [st.thermo_derivatives(ev, 0.0, h)["eta"] for h in hs])
        tc = np.logspace(-2, -5, 7)
        ratio = [st.thermo_derivatives(ev, t, 0.0)["C"] / math.log(1 / t) for t in tc]
        out["C_over_log"] = {"min": min(ratio), "max": max(ratio)}
    return out, rows


def _cmd_b_of_t(args, cfg):
    B = _exponent(args)
    rows = []
    for t in args.t:
        b = os2d.b_of_t(B, args.d, t)
        row = {"t": t, "b1": float(b[0]), "b2": float(b[1])}
        if args.check:
            q = os2d.b_of_t_quadrature(B, args.d, t)
            row["quad_err"] = float(np.max(np.abs(b - q)))
        rows.append(row)
    out = {"B": B.to_list(), "d": list(args.d), "values": rows}
    if args.strictify:
        law, shift = os2d.strictify_2d(os2d.OperatorStableLaw2D(B, tuple(args.d)))
        out["strict_shift"] = shift.tolist()
    return out, rows


def _cmd_spectrum(args, cfg):
    B = _exponent(args)
    res = os2d.spectrum_check(B)
    try:
        cutoff = os2d.moment_cutoff(B) if res.valid else None
    except NormalLaw:
        cutoff = math.inf
    return {"B": B.to_list(), "valid": res.valid, "Lambda": res.Lambda,
            "eigenvalues": list(res.eigenvalues), "moment_cutoff": _jnum(cutoff)}, None


def _jnum(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

COMMANDS = {
    "cf": (_cmd_cf, "log characteristic function of a stable law",
           "psi(y) = i y a + alpha Gamma(-alpha) (c1 (-iy)^alpha + c2 (iy)^alpha) for alpha != 1; "
           "alpha = 1: i y a - c1 iy ln(-iy / e^(1-gamma)) + c2 iy ln(iy / e^(1-gamma)). "
           "--canonical also integrates the Levy-Khintchine form "
           "i y a + int (e^(iyx) - 1 - iyx/(1+x^2)) M(dx)."),
    "lnz": (_cmd_lnz, "log partition function shift at a stable state",
            "ln Z(u+v) - ln Z(u) = psi(iv): the singular part c1 alpha Gamma(-alpha) v^alpha "
            "(alpha != 1), c1 v ln v (alpha = 1); --order k regresses the exponent of the k-th derivative."),
    "density": (_cmd_density, "stable density by Fourier inversion",
                "g(x) = (1/pi) int_0^inf Re[exp(psi(y) - i x y)] dy, with the tail series "
                "(1/pi) sum (-1)^(k+1) Gamma(k alpha + 1)/k! sin(k pi alpha rho) x^(-k alpha - 1) far out."),
    "mellin": (_cmd_mellin, "Mellin transform and Fox H / Meijer G data",
               "M(s | alpha, rho) = Gamma(s-1) Gamma(1 + 1/alpha - s/alpha) / "
               "(Gamma(rho s - rho) Gamma(1 + rho - rho s)); H^{11}_{22} parameters "
               "[(-1/alpha, 1/alpha), (-rho, rho)] over [(-1, 1), (-rho, rho)]; "
               "--meijer M,N,L gives the G^{M-1, L-1}_{N+L-2, M+L-2} reduction for alpha = M/N, rho = L/M."),
    "sample": (_cmd_sample, "draw a stable sample (Chambers-Mallows-Stuck)",
               "X = sigma S(alpha, beta) + a with S(alpha, beta) = D sin(alpha(V + B)) / cos(V)^(1/alpha) "
               "(cos(V - alpha(V + B)) / W)^((1 - alpha)/alpha); binary files hold a uint64 count "
               "then little-endian float64 values."),
    "stability-check": (_cmd_stability, "renormalization fixed-point test",
                        "KS distance between X and (X_1 + ... + X_n - b_n) / n^(1/alpha), "
                        "b_n = a (n - n^(1/alpha)) (alpha != 1) or (c1 - c2) n ln n (alpha = 1), "
                        "against the two-sample critical value c(level) sqrt(2/N)."),
    "attraction": (_cmd_attraction, "domain-of-attraction test for a tail model",
                   "h(x)/h(kx) -> k^alpha with h(x) = 1 - F(x) + F(-x), and "
                   "c_ratio = lim F(-x)/(1 - F(x))."),
    "norm-constants": (_cmd_norm, "normalizing constants A_n, b_n",
                       "n h(A_n) = 1; b_n = 0 (alpha < 1), n E[X] (1 < alpha <= 2), "
                       "n A_n^2 E[X / (X^2 + A_n^2)] (alpha = 1)."),
    "indexes": (_cmd_indexes, "critical exponents from (alpha1, alpha2, d)",
                "alpha = 2 - a1, beta = (a2-1) a1/a2, gamma = (2-a2) a1/a2, epsilon = (2-a1) a2/a1, "
                "delta = 1/(a2-1), nu = a1/d, mu = a2/d, sigma = 2d(a2-1)/a2, zeta = sigma - d + 2."),
    "phi-grid": (_cmd_phi_grid, "scaling potential and its derivatives on a grid",
                 "Phi = |t|^a1 f(h/|t|^(a1/a2), sign t) for |t|^a1 > |h|^a2, else |h|^a2 g(t/|h|^(a2/a1)); "
                 "C = -Phi_tt, eta = -Phi_h, chi = -Phi_hh."),
    "ising": (_cmd_ising, "Ising branch (alpha1 = 1, alpha2 = 16/15)",
              "Phi = t^2 (c1 ln|t| + c2) + c3 h |t|^(1/8) for |t| > |h|^(8/15), else "
              "c4 |h|^(16/15) + t^2 (c5 ln|t| + c6), with c1 = c5 = c."),
    "b-of-t": (_cmd_b_of_t, "centering b(t) of an operator-stable law",
               "b(t) = t int_(1/t)^1 v^(-B) dv d; diagonal entries d_i (t - t^(1/alpha_i))/(1 - 1/alpha_i), "
               "d_i t ln t when alpha_i = 1; --strictify prints the shift -(B - I)^(-1) d."),
    "spectrum": (_cmd_spectrum, "spectrum constraint and moment cutoff of B",
                 "valid iff every eigenvalue has Re >= 1/2; Lambda = max Re; "
                 "E|X|^p finite exactly for p < 1/Lambda."),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output file (written atomically); default stdout")
    common.add_argument("--epsabs", type=float, default=1e-13, help="absolute quadrature tolerance")
    common.add_argument("--epsrel", type=float, default=1e-10, help="relative quadrature tolerance")

    parser = _Parser(prog="stablemech", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stablemech {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name):
        _, short, formula = COMMANDS[name]
        return sub.add_parser(name, parents=[common], help=short,
                              description=f"{short}. Implements: {formula}")

    p = add("cf")
    _add_law(p)
    p.add_argument("--y", type=_floats, required=True, help="comma-separated real points")
    p.add_argument("--canonical", action="store_true", help="also integrate the canonical form")

    p = add("lnz")
    _add_law(p)
    p.add_argument("--v", type=_floats, required=True, help="comma-separated shifts")
    p.add_argument("--order", type=int, choices=(1, 2), help="regress the derivative exponent")

    p = add("density")
    _add_law(p)
    p.add_argument("--x", type=_grid, required=True, help="points: a,b,c or lo:hi:n")

    p = add("mellin")
    p.add_argument("--alpha", type=_number, required=True)
    p.add_argument("--rho", type=_number, default=0.5)
    p.add_argument("--s", type=_complexes, default=[1.2, 1.5, 1.8], help="complex points, e.g. 1.5,1.2+0.3j")
    p.add_argument("--meijer", type=lambda v: [int(x) for x in v.split(",")], metavar="M,N,L")

    p = add("sample")
    _add_law(p)
    p.add_argument("--n", type=int, required=True, help="number of draws")
    p.add_argument("--samples-out", help="write the sample set to this file")
    p.add_argument("--text", action="store_true", help="one value per line instead of binary")
    p.add_argument("--workers", type=int, default=1)

    p = add("stability-check")
    _add_law(p)
    p.add_argument("--n", type=int, default=2, help="group size")
    p.add_argument("--N", type=int, default=100_000, help="sample size")
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--level", type=float, default=0.01, help="KS significance level")
    p.add_argument("--samples", help="external sample file instead of a stable law")
    p.add_argument("--text", action="store_true", help="external file is one value per line")
    p.add_argument("--b-n", type=_number, default=0.0, help="centering for external samples")
    p.add_argument("--workers", type=int, default=1)

    p = add("attraction")
    _add_tail(p)
    p.add_argument("--alpha", type=_number, required=True, help="stable exponent to test against")
    p.add_argument("--k", type=_floats, default=[2.0, 5.0, 10.0])
    p.add_argument("--tol", type=float, default=1e-3)

    p = add("norm-constants")
    _add_tail(p)
    p.add_argument("--alpha", type=_number, required=True)
    p.add_argument("--n", type=lambda v: [int(x) for x in v.split(",")], default=[1, 10, 100])

    p = add("indexes")
    p.add_argument("--alpha1", type=_exact)
    p.add_argument("--alpha2", type=_exact)
    p.add_argument("--dim", type=_exact, default=Fraction(3), help="dimension or inf")
    p.add_argument("--preset", choices=sorted(st.PRESETS))

    p = add("phi-grid")
    p.add_argument("--alpha1", type=_exact, default=Fraction(2))
    p.add_argument("--alpha2", type=_exact, default=Fraction(6, 5))
    p.add_argument("--dim", type=_exact, default=Fraction(3))
    p.add_argument("--preset", choices=sorted(st.PRESETS))
    p.add_argument("--t", type=_grid, default=_grid("-0.5:0.5:5"))
    p.add_argument("--h", type=_grid, default=_grid("-0.5:0.5:5"))

    p = add("ising")
    p.add_argument("--t", type=_grid, default=_grid("-0.5:0.5:5"))
    p.add_argument("--h", type=_grid, default=_grid("-0.5:0.5:5"))
    p.add_argument("--c", type=_number, default=1.0)
    p.add_argument("--c2", type=_number)
    p.add_argument("--c3", type=_number, default=-1.0)
    p.add_argument("--c4", type=_number, default=-1.0)
    p.add_argument("--c6", type=_number, default=-1.5)
    p.add_argument("--exponents", action="store_true", help="regress beta, 1/delta and C/ln(1/t)")

    p = add("b-of-t")
    _add_exponent(p)
    p.add_argument("--d", type=_floats, default=[1.0, 1.0], help="drift vector d1,d2")
    p.add_argument("--t", type=_floats, required=True)
    p.add_argument("--check", action="store_true", help="compare with matrix-exponential quadrature")
    p.add_argument("--strictify", action="store_true")

    p = add("spectrum")
    _add_exponent(p)
    return parser


def _config_hash(args) -> str:
    items = {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}
    blob = json.dumps(items, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _render(cfg: RunConfig, header: dict, payload: dict, rows) -> str:
    if cfg.fmt == "json":
        return json.dumps({"provenance": header, "result": payload}, indent=2,
                          sort_keys=True, allow_nan=False, default=str) + "\n"
    if rows is None:
        raise InvalidParameter("this command has no tabular output; use --format json")
    buf = io.StringIO()
    for k, v in header.items():
        buf.write(f"# {k}: {v}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fail(name: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": name, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig(args.seed, args.epsabs, args.epsrel, args.fmt, args.out)
        handler = COMMANDS[args.command][0]
        payload, rows = handler(args, cfg)
        header = {"tool": "stablemech", "version": __version__, "command": args.command,
                  "seed": cfg.seed, "config_sha256": _config_hash(args)}
        _write(cfg.out, _render(cfg, header, payload, rows))
    except UsageError as exc:
        return _fail("UsageError", str(exc), 2)
    except StableMechError as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
