"""Command-line front end.

Exit codes: 0 success or PASS, 1 verification FAIL, 2 input error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adjoint_pairing import GRAM_ZERO_TOL, gram, verify_signature_equals_sf
from .cone_ode import ConeRealization, deficiency_indices, lagrangian_boundary, verify_null_cobordism
from .cutoff import CutoffSpec
from .errors import IndicialError, LagrangianObstruction
from .io import decode_vector, dump_json, encode_matrix, encode_vector, load_json, pencil_from_dict
from .model_zoo import circle_dirac, circle_pencil, random_dirac, random_pencil, write_fixture
from .numerics import DEFAULT_ZERO_TOL
from .pencil import DEFAULT_ROOT_TOL, DiracData, dirac_block, indicial_roots, normalize_strip
from .singular_functions import strip_decomposition
from .spectral_flow import choose_window, eigenvalue_curves, sf_all_methods, spectral_flow

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


def _c(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def emit_curves(p, T: float, samples: int, path) -> None:
    """CSV of ascending eigenvalues of p(sigma) on an equispaced grid of [-T, T]."""
    sigmas, eigs = eigenvalue_curves(p, T, samples)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["sigma"] + [f"lambda_{i + 1}" for i in range(p.dim)])
            for s, row in zip(sigmas, eigs):
                w.writerow([repr(float(s))] + [repr(float(v)) for v in row])
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def _load_pencil(path):
    try:
        return pencil_from_dict(load_json(path))
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _report_dict(rep) -> dict | None:
    if rep is None:
        return None
    return {"value": rep.value, "method": rep.method, "interval": list(rep.interval),
            "margins": list(rep.margins),
            "crossings": [{"sigma_c": c.sigma_c, "kernel_dim": c.kernel_dim,
                           "crossing_signature": c.crossing_signature} for c in rep.crossings]}


def _cutoff(args) -> CutoffSpec:
    try:
        return CutoffSpec(args.plateau_end, args.support_end)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_roots(args):
    p = _load_pencil(args.input)
    roots = indicial_roots(p, args.root_tol, method=args.method)
    out = [{"sigma0": _c(r.sigma0), "alg_mult": r.alg_mult, "is_real": r.is_real,
            "in_strip": r.in_strip} for r in roots]
    return {"roots": out}, EXIT_OK


def cmd_sf(args):
    p = _load_pencil(args.input)
    res = sf_all_methods(p, args.root_tol, args.zero_tol)
    out = {"T": res["T"], "endpoint": res["endpoint"], "agree": res["agree"],
           "partition": _report_dict(res["partition"]),
           "crossing_form": _report_dict(res["crossing_form"])}
    for k in ("partition_error", "crossing_form_error"):
        if k in res:
            out[k] = res[k]
    if args.csv:
        emit_curves(p, res["T"], args.samples, args.csv)
    return out, EXIT_OK if res["agree"] else EXIT_FAIL


def cmd_ebasis(args):
    p = _load_pencil(args.input)
    bases = strip_decomposition(p, args.root_tol, _cutoff(args))
    out = [{"root": _c(b.root.sigma0), "alg_mult": b.root.alg_mult, "dim": b.dim,
            "elements": [encode_matrix(e.coeffs) for e in b.elements]} for b in bases]
    return {"bases": out}, EXIT_OK


def cmd_gram(args):
    p = _load_pencil(args.input)
    g = gram(p, cutoff=_cutoff(args), tol=args.quad_tol, real_only=args.real_only,
             root_tol=args.root_tol, zero_tol=args.gram_zero_tol)
    return {"roots": [_c(r) for r in g.roots], "gram": encode_matrix(g.matrix) if g.matrix.size else [],
            "inertia": list(g.signature), "sig": g.signature.value,
            "raw_asymmetry": g.raw_asymmetry}, EXIT_OK


def _verdict_exit(v) -> int:
    if v.status == "PASS":
        return EXIT_OK
    if v.status == "FAIL" or (v.cause or "").startswith("LagrangianObstruction"):
        return EXIT_FAIL
    return EXIT_NUMERIC


def cmd_verify(args):
    p = _load_pencil(args.input)
    v = verify_signature_equals_sf(p, _cutoff(args), args.quad_tol, args.root_tol, args.zero_tol)
    return v.to_dict(), _verdict_exit(v)


def _load_cone(path):
    try:
        data = load_json(path)
        p = pencil_from_dict(data)
        if "boundary" not in data:
            return p, None
        cols = [decode_vector(col) for col in data["boundary"]]
        b = np.array(cols, dtype=complex).T.reshape(p.dim, len(cols))
        return p, ConeRealization(p, b)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_cone(args):
    p, c = _load_cone(args.input)
    if c is None:
        try:
            c = ConeRealization(p, lagrangian_boundary(p.leading))
        except LagrangianObstruction as exc:
            out = {"obstruction_signature": exc.signature, "sf": spectral_flow(p, args.root_tol),
                   "verdict": verify_null_cobordism(p).to_dict()}
            return out, EXIT_FAIL
    rep = deficiency_indices(c, args.ode_tol)
    v = verify_null_cobordism(c, args.ode_tol, args.quad_tol, args.root_tol)
    out = {"boundary": [encode_vector(col) for col in c.boundary_subspace.T],
           "deficiency": {"n_plus": rep.n_plus, "n_minus": rep.n_minus,
                          "frobenius_exponents": [_c(r) for r in rep.frobenius_exponents],
                          "shooting_residuals": {k: [float(x) for x in r]
                                                 for k, r in rep.shooting_residuals.items()}},
           "verdict": v.to_dict()}
    return out, _verdict_exit(v)


def cmd_zoo(args):
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(str(exc)) from exc
    written = []

    def save(name, p, seed, ind=None):
        path = outdir / f"{name}.json"
        write_fixture(path, p, seed, spectral_flow(p), ind)
        written.append(str(path))

    for d, name in ((DiracData(np.zeros((1, 1))), "dirac_zero"), (DiracData([[1, 0]]), "dirac_1x2")):
        save(name, dirac_block(d), None, d.index())
    for i in range(args.count):
        seed = args.seed + i
        d = random_dirac(1 + seed % 4, 1 + (seed // 4) % 4, seed)
        save(f"dirac_{seed}", dirac_block(d), seed, d.index())
        save(f"pencil_{seed}", random_pencil(1 + seed % 5, 1 + (seed // 5) % 3, seed), seed)
    for N in (1, 4, 8):
        save(f"circle_N{N}", circle_pencil(circle_dirac(0.0, N)), None, 0)
    return {"fixtures": written}, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    tol = argparse.ArgumentParser(add_help=False)
    tol.add_argument("--root-tol", type=float, default=DEFAULT_ROOT_TOL, help="root clustering radius")
    tol.add_argument("--quad-tol", type=float, default=1e-10, help="Gram quadrature tolerance")
    tol.add_argument("--ode-tol", type=float, default=1e-10, help="Frobenius/shooting tolerance")
    tol.add_argument("--zero-tol", type=float, default=DEFAULT_ZERO_TOL, help="eigenvalue zero threshold")
    tol.add_argument("--json", metavar="PATH", help="write the result here instead of stdout")

    cut = argparse.ArgumentParser(add_help=False)
    cut.add_argument("--plateau-end", type=float, default=0.25)
    cut.add_argument("--support-end", type=float, default=0.5)

    ap = argparse.ArgumentParser(prog="indicialflow", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("roots", parents=[tol], help="indicial roots with multiplicities")
    s.add_argument("input")
    s.add_argument("--method", choices=["auto", "linearization", "interpolation"], default="auto")
    s.set_defaults(func=cmd_roots)

    s = sub.add_parser("sf", parents=[tol], help="spectral flow by all three methods")
    s.add_argument("input")
    s.add_argument("--csv", metavar="PATH", help="also write eigenvalue curves")
    s.add_argument("--samples", type=int, default=201)
    s.set_defaults(func=cmd_sf)

    s = sub.add_parser("ebasis", parents=[tol, cut], help="singular-function bases for strip roots")
    s.add_argument("input")
    s.set_defaults(func=cmd_ebasis)

    s = sub.add_parser("gram", parents=[tol, cut], help="Gram matrix of the adjoint pairing")
    s.add_argument("input")
    s.add_argument("--real-only", action="store_true")
    s.add_argument("--gram-zero-tol", type=float, default=GRAM_ZERO_TOL)
    s.set_defaults(func=cmd_gram)

    s = sub.add_parser("verify", parents=[tol, cut], help="check sig(Gram) = SF")
    s.add_argument("input")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("cone", parents=[tol], help="deficiency indices and null-cobordism check")
    s.add_argument("input")
    s.set_defaults(func=cmd_cone)

    s = sub.add_parser("zoo", parents=[tol], help="write fixture files")
    s.add_argument("outdir")
    s.add_argument("--count", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_zoo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "samples", 2) < 2:
            raise InputError("--samples must be at least 2")
        out, code = args.func(args)
        text = dump_json(out)
        if args.json:
            try:
                Path(args.json).write_text(text + "\n", encoding="utf-8")
            except OSError as exc:
                raise InputError(f"cannot write {args.json}: {exc}") from exc
        else:
            print(text)
        return code
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IndicialError as exc:
        kind = EXIT_INPUT if isinstance(exc, ValueError) else EXIT_NUMERIC
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return kind


if __name__ == "__main__":
    sys.exit(main())
