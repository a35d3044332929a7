"""Command-line front end: ``minstab <command> [options]``.

Every command writes one UTF-8 JSON document (``-o`` or stdout) with a
``"schema": 1`` field and a one-line human summary on stderr.

Exit codes: 0 success, 1 usage or I/O error, 2 validation failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .algebra import LaurentTail
from .errors import (
    ConvergenceError,
    DomainError,
    MinstabError,
    NotQuasiconformal,
    SeriesDivergenceRisk,
    Unsupported,
    ValidationError,
)
from .quadrature import DiskGrid
from .schwarz import schwarz_verdict
from .spectral import C_canonical, C_printed, F_alpha, destab_search_single_m, gram_index
from .transforms import (
    BlendedExtension,
    CutoffExtension,
    PlaneGrid,
    energy_area_after_precomposition,
    equivalent_beltrami_family,
    nmi_finite_check,
    nmi_infinitesimal_analytic,
    nmi_infinitesimal_check,
    random_beltrami,
    random_compact_beltrami,
    read_field,
    sample_variation,
)
from .weierstrass import CATALOG, energy_and_area, from_catalog, load_descriptor, mesh_export

log = logging.getLogger("minstab")

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- output --------------------------------------------------------------

def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars, complex numbers, non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(float(obj.real)), _clean(float(obj.imag))]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def dumps(report):
    return json.dumps(_clean(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path, data, mode="w"):
    """Write via a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".minstab-", dir=d)
    try:
        with os.fdopen(fd, mode, encoding="utf-8" if "b" not in mode else None) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, report, summary):
    report = dict(report)
    report["schema"] = SCHEMA
    report["command"] = args.command
    text = dumps(report)
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        print(summary, file=sys.stderr)


# -- surfaces ------------------------------------------------------------

def load_surface(args, check=True):
    if args.catalog and args.surface:
        raise UsageError("give either --catalog or --surface, not both")
    if args.surface:
        return load_descriptor(args.surface)
    if not args.catalog:
        raise UsageError("a surface is required: --catalog NAME or --surface FILE")
    return from_catalog(args.catalog, k=args.k, r=args.r)


def _parse_complex(s):
    try:
        return complex(str(s).replace(" ", ""))
    except ValueError:
        raise UsageError(f"cannot parse complex number {s!r}") from None


def _positive(name, x):
    if not x > 0:
        raise UsageError(f"{name} must be positive")
    return x


def _rng(seed, *stream):
    return np.random.default_rng([int(seed), *stream])


# -- analyses ------------------------------------------------------------

def destab_report(W, m_min, m_max, gamma=None):
    if m_min < 1 or m_max < m_min:
        raise UsageError(f"empty or invalid m range {m_min}..{m_max}")
    rows = []
    first = None
    for m in range(m_min, m_max + 1):
        ev, gstar, M = destab_search_single_m(W, m)
        g = gstar if gamma is None else gamma
        scale = max(1.0, float(np.max(np.abs(M))))
        flagged = ev < -1e-12 * scale
        if flagged and first is None:
            first = m
        rows.append({
            "m": m,
            "min_eigenvalue": ev,
            "gamma_star": gstar,
            "gamma": g,
            "matrix": M,
            "sum_C_canonical": sum(C_canonical(p, g, m) for p in W.polys),
            "sum_C_printed": sum(C_printed(p, g, m) for p in W.polys),
            "destabilizing": bool(flagged),
        })
    return {"per_m": rows, "first_destabilizing_m": first, "unstable": first is not None}


def index_report(W, M, tolerance=None):
    rep = gram_index(W, M, tolerance)
    d = rep.to_json()
    d["spectral_radius"] = rep.spectral_radius
    d["M"] = M
    return d, rep


def nmi_destab_report(W, m=1, Lambda=20.0):
    ev, gstar, _ = destab_search_single_m(W, m)
    phi = LaurentTail.monomial(m, gstar)
    ext = CutoffExtension(W, phi, Lambda)
    res = nmi_infinitesimal_analytic(W, ext)
    d = res.to_json()
    d.update({"construction": "cutoff", "m": m, "gamma": gstar, "Lambda": Lambda,
              "F_alpha": F_alpha(W, phi)})
    return d


def nmi_random_report(W, mode, trials, seed, grid=None, equal=False):
    worst = math.inf
    failures = 0
    max_eq = 0.0
    for t in range(trials):
        rng = _rng(seed, 1 if mode == "finite" else 2, t)
        if mode == "finite":
            g = grid or DiskGrid(48, 192)
            if equal:
                mus = [random_beltrami(rng, g, 0.95)] * W.n
            else:
                ext = BlendedExtension.random(rng, W.n)
                mus, _ = equivalent_beltrami_family(ext, g, rng.uniform(0.05, 0.95))
            res = nmi_finite_check(W, mus, g)
        else:
            g = grid or PlaneGrid(8.0, 128)
            ext = BlendedExtension.random(rng, W.n, equal=equal).normalized()
            res = nmi_infinitesimal_check(W, sample_variation(ext, g), g)
            max_eq = max(max_eq, res.residuals["equivalence"])
        worst = min(worst, res.rhs - res.lhs)
        failures += 0 if res.holds else 1
    out = {"trials": trials, "failures": failures, "all_hold": failures == 0,
           "min_margin": worst if trials else 0.0, "equal_fields": equal}
    if mode != "finite":
        out["max_equivalence_residual"] = max_eq
    return out


def energy_report(W, radius, trials, seed, bound, N):
    ea = energy_and_area(W, radius)
    out = {"radius": radius, "energy": ea.energy, "area": ea.area,
           "energy_quadrature": ea.energy_quadrature, "area_quadrature": ea.area_quadrature}
    if trials:
        grid = PlaneGrid(8.0, N)
        runs = []
        for t in range(trials):
            mu = random_compact_beltrami(_rng(seed, 3, t), grid, bound)
            runs.append(energy_area_after_precomposition(W, mu, grid).to_json())
        out["precomposed"] = {
            "trials": trials,
            "bound": bound,
            "all_hold": all(r["holds"] for r in runs),
            "min_relative_gap": min((r["energy"] - r["area"]) / r["area"] for r in runs),
            "max_rs_mismatch": max(abs(r["energy"] - r["energy_before"] - r["rs_delta"]) for r in runs),
        }
    return out


# -- commands ------------------------------------------------------------

def cmd_validate(args):
    try:
        W = load_surface(args)
    except ValidationError as exc:
        emit(args, {"valid": False, "error": exc.as_dict()}, f"invalid: {exc}")
        return EXIT_INVALID
    emit(args, {"valid": True, "surface": W.to_json()}, f"valid: {W.label or 'surface'} (n={W.n})")
    return EXIT_OK


def cmd_destab(args):
    W = load_surface(args)
    gamma = _parse_complex(args.gamma) if args.gamma is not None else None
    rep = destab_report(W, args.m_min, args.m_max, gamma)
    rep["surface"] = W.to_json()
    first = rep["first_destabilizing_m"]
    emit(args, rep, f"destabilizing m: {first}" if first else "no destabilizing m in range")
    return EXIT_OK


def cmd_index(args):
    W = load_surface(args)
    if args.tolerance is not None:
        _positive("--tolerance", args.tolerance)
    d, rep = index_report(W, args.M, args.tolerance)
    d["surface"] = W.to_json()
    neg = ", ".join(f"{x:.6g}" for x in rep.eigenvalues[: max(rep.index, 1)])
    emit(args, d, f"index {rep.index} on {2 * args.M} directions (lowest eigenvalues: {neg})")
    return EXIT_OK


def cmd_nmi(args):
    W = load_surface(args)
    out = {"mode": args.mode, "surface": W.to_json(), "seed": args.seed}
    if args.fields:
        if len(args.fields) != W.n:
            raise UsageError(f"need {W.n} field files, got {len(args.fields)}")
        loaded = [read_field(f) for f in args.fields]
        grid = loaded[0][0]
        if any(g != grid for g, _, _ in loaded):
            raise UsageError("field files use different grids")
        fields = [v for _, v, _ in loaded]
        res = (nmi_finite_check(W, fields, grid) if args.mode == "finite"
               else nmi_infinitesimal_check(W, fields, grid))
        out.update(res.to_json())
        out["construction"] = "files"
    elif args.construction == "zero":
        grid = PlaneGrid(args.L, args.N)
        zeros = [np.zeros(grid.z.shape, dtype=complex)] * W.n
        res = (nmi_finite_check(W, zeros, grid) if args.mode == "finite"
               else nmi_infinitesimal_check(W, zeros, grid))
        out.update(res.to_json())
        out["construction"] = "zero"
    elif args.construction == "destabilizing":
        if args.mode != "infinitesimal":
            raise UsageError("the destabilizing construction is infinitesimal")
        out.update(nmi_destab_report(W, args.m, args.Lambda))
    else:
        grid = PlaneGrid(args.L, args.N) if args.mode == "infinitesimal" else None
        rep = nmi_random_report(W, args.mode, args.trials, args.seed, grid, args.equal)
        out.update(rep)
        out["construction"] = "random"
        out["holds"] = rep["all_hold"]
    emit(args, out, f"nmi {args.mode}: holds={out['holds']}")
    return EXIT_OK


def cmd_schwarz(args):
    W = load_surface(args)
    v = schwarz_verdict(W, 1.0, _positive("--tolerance", args.tolerance))
    d = v.to_json()
    d["surface"] = W.to_json()
    state = "inconclusive" if v.inconclusive else ("unstable" if v.unstable else "no instability evidence")
    emit(args, d, f"lambda1 = {v.lambda1:.10g}: {state}")
    return EXIT_OK


def cmd_mesh(args):
    W = load_surface(args)
    if not args.output:
        raise UsageError("mesh needs -o FILE.obj")
    sample = mesh_export(W, args.nr, args.ntheta)
    write_atomic(args.output, sample.to_obj())
    d = {"schema": SCHEMA, "command": "mesh", "path": os.path.abspath(args.output),
         "vertices": int(sample.points.shape[0]), "faces": int(sample.triangles.shape[0]),
         "surface": W.to_json()}
    sys.stdout.write(dumps(d))
    if not args.quiet:
        print(f"wrote {d['vertices']} vertices, {d['faces']} faces to {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_energy(args):
    W = load_surface(args)
    d = energy_report(W, args.radius, args.trials, args.seed, args.bound, args.N)
    d["surface"] = W.to_json()
    emit(args, d, f"energy {d['energy']:.10g}, area {d['area']:.10g}")
    return EXIT_OK


def cmd_report(args):
    W = load_surface(args)
    d = {"surface": W.to_json(), "seed": args.seed, "valid": True}
    d["destab"] = destab_report(W, 1, args.m_max)
    idx, rep = index_report(W, args.M)
    d["index"] = idx
    d["nmi"] = {
        "infinitesimal_destabilizing": nmi_destab_report(W, 1),
        "finite_random": nmi_random_report(W, "finite", args.trials, args.seed),
        "infinitesimal_random": nmi_random_report(W, "infinitesimal", max(1, args.trials // 4),
                                                  args.seed, PlaneGrid(8.0, 128)),
    }
    try:
        d["schwarz"] = schwarz_verdict(W, 1.0, args.tolerance).to_json()
    except Unsupported as exc:
        d["schwarz"] = {"skipped": str(exc)}
    d["energy"] = energy_report(W, 1.0, 0, args.seed, 0.2, 128)
    verdicts = {
        "destab": d["destab"]["unstable"],
        "index": rep.index > 0,
        "nmi": not d["nmi"]["infinitesimal_destabilizing"]["holds"],
    }
    sw = d["schwarz"]
    if "skipped" not in sw and not sw["inconclusive"] and not (sw["enclosure"] and not sw["unstable"]):
        verdicts["schwarz"] = sw["unstable"]
    d["verdicts"] = verdicts
    d["consistent"] = len(set(verdicts.values())) == 1
    d["unstable"] = verdicts["index"]
    emit(args, d, f"unstable={d['unstable']} consistent={d['consistent']} ({verdicts})")
    return EXIT_OK


# -- parser --------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    src = common.add_argument_group("surface")
    src.add_argument("--catalog", choices=sorted(CATALOG), help="named surface")
    src.add_argument("--k", type=int, default=1, help="catalog order")
    src.add_argument("--r", type=float, default=1.0, help="catalog radius")
    src.add_argument("--surface", help="JSON surface descriptor")
    common.add_argument("--config", help="JSON file of option defaults; flags override")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", help="output path (default stdout)")
    common.add_argument("-q", "--quiet", action="store_true")

    p = _Parser(prog="minstab", description="Stability analysis of minimal surfaces.")
    p.add_argument("--version", action="version", version=f"minstab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check minimality and admissibility")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("destab", parents=[common], help="search single-mode destabilizing tails")
    s.add_argument("--m-min", type=int, default=1)
    s.add_argument("--m-max", type=int, default=4)
    s.add_argument("--gamma", help="fixed coefficient, e.g. 1 or 0.6+0.8j")
    s.set_defaults(func=cmd_destab)

    s = sub.add_parser("index", parents=[common], help="negative index on monomial tails")
    s.add_argument("--M", type=int, default=6)
    s.add_argument("--tolerance", type=float)
    s.set_defaults(func=cmd_index)

    s = sub.add_parser("nmi", parents=[common], help="finite or infinitesimal inequality checks")
    s.add_argument("--mode", choices=("finite", "infinitesimal"), default="infinitesimal")
    s.add_argument("--construction", choices=("random", "destabilizing", "zero"), default="random")
    s.add_argument("--fields", nargs="+", help="one field file per coordinate")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--equal", action="store_true", help="use one field for every coordinate")
    s.add_argument("--m", type=int, default=1, help="tail order of the destabilizing construction")
    s.add_argument("--Lambda", type=float, default=20.0, help="log width of cutoffs")
    s.add_argument("--L", type=float, default=8.0)
    s.add_argument("--N", type=int, default=256)
    s.set_defaults(func=cmd_nmi)

    s = sub.add_parser("schwarz", parents=[common], help="Gauss-map cap eigenvalue verdict")
    s.add_argument("--tolerance", type=float, default=1e-6)
    s.set_defaults(func=cmd_schwarz)

    s = sub.add_parser("mesh", parents=[common], help="export an OBJ mesh")
    s.add_argument("--nr", type=int, default=32)
    s.add_argument("--ntheta", type=int, default=64)
    s.set_defaults(func=cmd_mesh)

    s = sub.add_parser("energy", parents=[common], help="energy and area, optionally after precomposition")
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--bound", type=float, default=0.2)
    s.add_argument("--N", type=int, default=256)
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("report", parents=[common], help="all analyses in one document")
    s.add_argument("--m-max", type=int, default=4)
    s.add_argument("--M", type=int, default=6)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--tolerance", type=float, default=1e-6)
    s.set_defaults(func=cmd_report)
    return p


def _apply_config(parser, argv):
    """Reparse ``argv`` with defaults taken from ``--config``."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest for a in sub._actions}
    cfg = {k.replace("-", "_"): v for k, v in cfg.items() if k != "command"}
    unknown = sorted(set(cfg) - dests)
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {unknown}")
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"minstab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"minstab: invalid surface: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NotQuasiconformal as exc:
        print(f"minstab: invalid Beltrami field: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, SeriesDivergenceRisk) as exc:
        print(f"minstab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, Unsupported) as exc:
        print(f"minstab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"minstab: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MinstabError as exc:
        print(f"minstab: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
