"""End-to-end verification pipeline and command-line interface.

Subcommands:
    solve     find critical orbits and report them
    verify    run every check (algebra, eigenvectors, norms, kernel geometry)
    spectrum  eigenvalue tables of the commuting coefficients per orbit
    weightfn  weight-function vectors at the critical orbits
    selftest  run `verify` on a built-in instance

Problem files are JSON: {"N": 2, "partitions": [[1,0,0], [1,1,0]],
"l": [1, 1], "z": ["0", "1"], "solver": {"seed": 0}}.  Site entries may be
rational strings/integers (exact mode) or [re, im] pairs (numeric mode).
Reports are deterministic for a fixed seed and backend; exit status is 0 when
every check passes, 1 on any failure, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import jsonschema

from . import kernels
from .bethe_algebra import (algebra_selfcheck, first_coefficient_identity,
                            restrict_family, universal_operator)
from .errors import (DegenerateCriticalPoint, GaudinError, SchemaError,
                     ZeroVector)
from .linalg import SparseMatrix, rank
from .master import (GaudinProblem, SolverConfig, factored_pole_data,
                     find_critical_orbits, group_polynomials,
                     hessian_determinant, master_coefficients,
                     master_operator_at, scalar_coefficient_values,
                     series_by_contour, try_rationalize_orbit)
from .repr_core import (build_irreducible, tensor_module, tensor_shapovalov,
                        weight_and_singular_subspace)
from .scalars import (format_scalar, is_exact, parse_rational, scalar_abs,
                      to_complex)
from .weight_function import bethe_vector, term_count
from .wronski_schubert import (exponent_data, kernel_residuals,
                               schubert_incidence, solve_h_tuple,
                               verify_wronskian_identities)

REPORT_FORMAT = "gaudin-report/1"
EIG_TOL = 1e-8
NORM_TOL = 1e-8
SING_TOL = 1e-8

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["N", "partitions", "l", "z"],
    "additionalProperties": False,
    "properties": {
        "N": {"type": "integer", "minimum": 1},
        "partitions": {
            "type": "array", "minItems": 1,
            "items": {"type": "array",
                      "items": {"type": "integer", "minimum": 0}},
        },
        "l": {"type": "array",
              "items": {"type": "integer", "minimum": 0}},
        "z": {
            "type": "array", "minItems": 1,
            "items": {"anyOf": [
                {"type": "string"},
                {"type": "integer"},
                {"type": "number"},
                {"type": "array", "items": {"type": "number"},
                 "minItems": 2, "maxItems": 2},
            ]},
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "seed": {"type": "integer", "minimum": 0},
                "starts": {"type": "integer", "minimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
                "tol_residual": {"type": "number"},
                "tol_dedup": {"type": "number"},
                "tol_degenerate": {"type": "number"},
                "pole_margin": {"type": "number"},
                "precision": {"enum": ["double", "longdouble"]},
                "early_stop": {"type": "boolean"},
            },
        },
        "j_max": {"type": "integer", "minimum": 1},
        "d_cap": {"type": "integer", "minimum": 1},
        "max_terms": {"type": "integer", "minimum": 1},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["format", "problem", "backend", "checks", "summary"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "problem": {"type": "object"},
        "backend": {"type": "string"},
        "derived": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status"],
                "properties": {
                    "name": {"type": "string"},
                    "status": {"enum": ["PASS", "FAIL", "SKIPPED"]},
                    "residual": {"type": ["number", "null"]},
                    "detail": {"type": "string"},
                },
            },
        },
        "orbits": {"type": "array"},
        "summary": {
            "type": "object",
            "required": ["checks", "passed", "failed", "skipped", "all_pass"],
        },
    },
}


def _parse_site(x):
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, bool):
        raise SchemaError("boolean site position")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return complex(x, 0.0)
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    raise SchemaError(f"unreadable site position {x!r}")


def load_problem(source):
    """dict or path -> (GaudinProblem, SolverConfig, options dict)."""
    if isinstance(source, (str, bytes)):
        try:
            with open(source) as fh:
                source = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise SchemaError(f"cannot read problem file: {e}") from e
    try:
        jsonschema.validate(source, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as e:
        raise SchemaError(f"problem does not match the schema: {e.message}") from e
    try:
        z = [_parse_site(x) for x in source["z"]]
        problem = GaudinProblem(source["N"], source["partitions"],
                                source["l"], z)
    except (GaudinError, ValueError) as e:
        raise SchemaError(str(e)) from e
    config = SolverConfig(**source.get("solver", {}))
    options = {k: source[k] for k in ("j_max", "d_cap", "max_terms")
               if k in source}
    return problem, config, options


def default_j_max(problem):
    return problem.n_sites * max(max(p) for p in problem.partitions) \
        + problem.N + 1


def _fmt_complex(x):
    c = to_complex(x)
    return [c.real, c.imag]


def _eigencheck_points(problem, point, count):
    """Deterministic rational sample points away from sites and variables."""
    avoid = [to_complex(z) for z in problem.z]
    avoid += [to_complex(t) for grp in point for t in grp]
    out = []
    k = 2
    while len(out) < count:
        cand = Fraction(k)
        k += 1
        cc = complex(cand)
        if any(abs(cc - a) < 1e-6 for a in avoid):
            continue
        out.append(cand)
    return out


def _fmt_groups(groups):
    return [[format_scalar(x) for x in grp] for grp in groups]


class Checks:
    def __init__(self):
        self.items = []

    def add(self, name, ok, residual=None, detail=""):
        self.items.append({
            "name": name,
            "status": "PASS" if ok else "FAIL",
            "residual": None if residual is None else float(residual),
            "detail": detail,
        })

    def skip(self, name, detail):
        self.items.append({"name": name, "status": "SKIPPED",
                           "residual": None, "detail": detail})

    def summary(self):
        n = len(self.items)
        p = sum(1 for c in self.items if c["status"] == "PASS")
        f = sum(1 for c in self.items if c["status"] == "FAIL")
        s = n - p - f
        return {"checks": n, "passed": p, "failed": f, "skipped": s,
                "all_pass": f == 0}


def build_modules(problem):
    pairs = [build_irreducible(lam, problem.N) for lam in problem.partitions]
    mods = [m for m, _ in pairs]
    forms = [f for _, f in pairs]
    if len(mods) == 1:
        return mods[0], forms[0]
    return tensor_module(mods), tensor_shapovalov(forms)


def run_pipeline(problem: GaudinProblem, config: SolverConfig = None,
                 j_max=None, d_cap=None, max_terms=10 ** 7,
                 stage="verify"):
    """Full machine verification; returns the report dict."""
    config = config or SolverConfig()
    j_max = j_max or default_j_max(problem)
    checks = Checks()
    report = {
        "format": REPORT_FORMAT,
        "backend": kernels.backend_name(),
        "seed": config.seed,
        "problem": {
            "N": problem.N,
            "partitions": [list(p) for p in problem.partitions],
            "l": list(problem.l),
            "z": [format_scalar(x) for x in problem.z],
            "mode": problem.mode,
        },
        "orbits": [],
    }

    M, form = build_modules(problem)
    mu = problem.infinity_weight
    W, S = weight_and_singular_subspace(M, mu)
    expected = S.ncols
    data = exponent_data(problem, d_cap)
    report["derived"] = {
        "infinity_weight": list(mu),
        "module_dimension": M.dim,
        "weight_dimension": W.ncols,
        "singular_dimension": expected,
        "expected_orbits": expected,
        "exponents": list(data.exponents),
        "dual_partition": list(data.dual_partition),
        "d_cap": data.d_cap,
        "j_max": j_max,
        "term_count": term_count(problem.l, problem.n_sites),
    }

    orbits = find_critical_orbits(problem, config, expected=expected)
    for orb in orbits:
        report["orbits"].append({
            "index": orb.index,
            "groups": [[_fmt_complex(x) for x in grp] for grp in orb.groups],
            "residual": float(orb.residual),
            "hessian_determinant": _fmt_complex(orb.hessian_determinant),
            "degenerate": bool(orb.degenerate),
        })
    if stage == "solve":
        checks.add("orbit_count", len(orbits) == expected,
                   detail=f"found {len(orbits)}, expected {expected}")
        report["checks"] = checks.items
        report["summary"] = checks.summary()
        return report

    # --- algebra-level checks on the full module
    pencil = universal_operator(M, problem.z)
    family = restrict_family(pencil, None, j_max)
    sc = algebra_selfcheck(family, form, M)
    checks.add("algebra_commutativity", sc["commutator_pairs"] == 0.0
               or sc["commutator_pairs"] < 1e-10,
               residual=sc["commutator_pairs"])
    checks.add("algebra_gl_invariance", sc["commutator_with_gl"] == 0.0
               or sc["commutator_with_gl"] < 1e-10,
               residual=sc["commutator_with_gl"])
    checks.add("algebra_form_symmetry",
               max(sc["form_symmetry_at_samples"],
                   sc["form_symmetry_coefficients"]) < 1e-10,
               residual=max(sc["form_symmetry_at_samples"],
                            sc["form_symmetry_coefficients"]))
    checks.add("coefficient_triangularity", sc["lower_coefficients"] < 1e-10,
               residual=sc["lower_coefficients"])
    checks.add("first_coefficient",
               first_coefficient_identity(pencil, problem.sizes, problem.z))
    checks.add("orbit_count", len(orbits) == expected,
               detail=f"found {len(orbits)}, expected {expected}")

    # --- per-orbit checks
    vectors = []
    spectra = []
    for orb in orbits:
        tag = f"orbit{orb.index}"
        if orb.degenerate:
            checks.skip(tag, "degenerate critical point (multiplicity > 1) "
                             "out of scope")
            vectors.append(None)
            spectra.append(None)
            continue
        point = try_rationalize_orbit(problem, orb) or orb.groups
        exact_pt = all(is_exact(x) for grp in point for x in grp)
        scalar_pencil = master_operator_at(problem, point)
        pole_data = factored_pole_data(problem, point)
        if exact_pt and problem.exact:
            _, series = master_coefficients(scalar_pencil, j_max)
        else:
            # expanding the composed coefficients in floating point loses
            # digits to cancellation; recover the expansion from stable
            # jet-sampled values instead
            series = {i: series_by_contour(pole_data, j_max, i)
                      for i in range(1, problem.N + 2)}
        spectra.append({
            "index": orb.index,
            "exact_point": exact_pt,
            "eigenvalues": {
                str(i): [format_scalar(c) for c in series[i]]
                for i in sorted(series)
            },
        })
        try:
            vec, info = bethe_vector(problem, M, point, form=form,
                                     max_terms=max_terms)
        except ZeroVector:
            checks.add(f"{tag}.nonvanishing", False,
                       detail="weight function vanished at the critical point")
            vectors.append(None)
            continue
        vectors.append(vec)
        checks.add(f"{tag}.nonvanishing", True, residual=0.0)
        checks.add(f"{tag}.singular_membership",
                   info["singular_residual"] < SING_TOL * max(1.0, info["coeff_max"]),
                   residual=info["singular_residual"])

        # eigenvalue equations: coefficient-by-coefficient in exact mode,
        # else the same identity sampled at enough points to pin it, with
        # scalar values taken from stable jets
        worst = 0.0
        scale = max(1.0, info["coeff_max"])
        if exact_pt and problem.exact:
            for i in range(1, problem.N + 2):
                gij = series[i]
                for j, mat in enumerate(family.B_coeffs[i], start=1):
                    lhs = mat.apply(vec)
                    g = gij[j - 1]
                    diff = dict(lhs)
                    for idx, v in vec.items():
                        cur = diff.get(idx, 0)
                        s = cur - g * v
                        if s:
                            diff[idx] = s
                        else:
                            diff.pop(idx, None)
                    for v in diff.values():
                        worst = max(worst, scalar_abs(v))
        else:
            pts = _eigencheck_points(problem, point, max(20, 2 * j_max + 1))
            for u0 in pts:
                gvals = scalar_coefficient_values(pole_data, u0)
                for i in range(1, problem.N + 2):
                    lhs = family.eval(i, u0).apply(vec)
                    g = gvals[i - 1]
                    diff = dict(lhs)
                    for idx, v in vec.items():
                        cur = diff.get(idx, 0)
                        s = cur - g * v
                        if s:
                            diff[idx] = s
                        else:
                            diff.pop(idx, None)
                    for v in diff.values():
                        worst = max(worst, scalar_abs(v))
        checks.add(f"{tag}.eigenvalue_equations", worst < EIG_TOL * scale,
                   residual=worst)

        # norm formula against the Hessian determinant
        det = hessian_determinant(problem, point)
        norm = info.get("norm_square")
        if is_exact(det) and is_exact(norm):
            ok = det == norm
            res = 0.0 if ok else float(abs(to_complex(norm) - to_complex(det)))
        else:
            dv, nv = to_complex(det), to_complex(norm)
            res = abs(dv - nv) / max(1.0, abs(dv))
            ok = res < NORM_TOL
        checks.add(f"{tag}.norm_formula", ok, residual=res,
                   detail=f"form {format_scalar(norm)} vs determinant "
                          f"{format_scalar(det)}")

        # kernel polynomials and their certificates
        try:
            ht = solve_h_tuple(problem, point, pencil=scalar_pencil, data=data)
        except GaudinError as e:
            checks.add(f"{tag}.kernel_shape", False, detail=str(e))
            continue
        checks.add(f"{tag}.kernel_shape", True,
                   detail=f"degrees {[p.degree for p in ht.polys]}")
        res_k = max(kernel_residuals(problem, point, ht, pencil=scalar_pencil))
        checks.add(f"{tag}.kernel_residual", res_k < 1e-8, residual=res_k)
        ys = group_polynomials(problem, point)
        yN = ys[-1] if ys else None
        if problem.N >= 1:
            diff = ht.polys[-1] - ys[problem.N - 1]
            res_y = 0.0 if diff.is_zero() else \
                diff.max_abs() / max(ys[problem.N - 1].max_abs(), 1.0)
            checks.add(f"{tag}.last_kernel_is_group_polynomial",
                       res_y < 1e-8, residual=res_y)
        wr = verify_wronskian_identities(problem, point, ht)
        res_w = max(wr.values()) if wr else 0.0
        checks.add(f"{tag}.wronskian_identities", res_w < 1e-8, residual=res_w)
        inc = schubert_incidence(problem, ht, data)
        checks.add(f"{tag}.schubert_incidence", inc["ok"],
                   detail=json.dumps({"sites": [s["ok"] for s in inc["sites"]],
                                      "infinity": inc["infinity"]["ok"]}))

    # --- joint checks over all nondegenerate vectors
    live = [(k, v) for k, v in enumerate(vectors) if v is not None]
    if live:
        gram = SparseMatrix(len(live), len(live))
        worst_off = 0.0
        for a, (_, va) in enumerate(live):
            for b, (_, vb) in enumerate(live):
                val = form.pairing(va, vb)
                gram[a, b] = val
                if a != b:
                    worst_off = max(worst_off, scalar_abs(val))
        g_rank = rank(gram)
        checks.add("gram_rank", g_rank == len(live),
                   detail=f"rank {g_rank} of {len(live)} vectors")
        diag_scale = max(scalar_abs(gram[a, a]) for a in range(len(live)))
        checks.add("pairwise_orthogonality",
                   worst_off < 1e-8 * max(1.0, diag_scale),
                   residual=worst_off)
        checks.add("completeness",
                   len(live) == expected and len(orbits) == expected,
                   detail=f"{len(live)} independent vectors for singular "
                          f"dimension {expected}")

    report["spectra"] = [s for s in spectra if s is not None]
    report["checks"] = checks.items
    report["summary"] = checks.summary()
    jsonschema.validate(report, REPORT_SCHEMA)
    return report


def emit_report(report, fmt="text", stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(report, sort_keys=True, indent=2))
        stream.write("\n")
        return
    p = report["problem"]
    stream.write(f"# {REPORT_FORMAT} backend={report['backend']} "
                 f"mode={p['mode']} seed={report.get('seed')}\n")
    d = report.get("derived", {})
    if d:
        stream.write(f"# module dim {d['module_dimension']}, singular dim "
                     f"{d['singular_dimension']}, exponents {d['exponents']}\n")
    for orb in report.get("orbits", []):
        stream.write(f"# orbit {orb['index']}: residual {orb['residual']:.2e}"
                     f"{' DEGENERATE' if orb['degenerate'] else ''}\n")
    for c in report.get("checks", []):
        res = "" if c.get("residual") is None else f" residual={c['residual']:.3e}"
        det = f" {c['detail']}" if c.get("detail") else ""
        stream.write(f"{c['status']:7s} {c['name']}{res}{det}\n")
    s = report["summary"]
    stream.write(f"# {s['passed']} passed, {s['failed']} failed, "
                 f"{s['skipped']} skipped\n")


SELFTEST_PROBLEM = {
    "N": 1,
    "partitions": [[1, 0], [1, 0]],
    "l": [1],
    "z": ["0", "1"],
    "solver": {"seed": 1},
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="gaudin",
        description="Verification workbench for the rational Gaudin model")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
            ("solve", "find critical orbits"),
            ("verify", "run all checks"),
            ("spectrum", "eigenvalue tables per orbit"),
            ("weightfn", "weight-function vectors per orbit"),
            ("selftest", "verify a built-in instance")]:
        sp = sub.add_parser(name, help=helptext)
        if name != "selftest":
            sp.add_argument("--problem", required=True)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=["json", "text"], default="text")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--starts", type=int)
        sp.add_argument("--tol-residual", type=float)
        sp.add_argument("--tol-dedup", type=float)
        sp.add_argument("--jmax", type=int)
        sp.add_argument("--precision", choices=["double", "longdouble"])
        sp.add_argument("--threads", type=int)
        sp.add_argument("--max-terms", type=int)
    args = parser.parse_args(argv)

    try:
        if args.command == "selftest":
            problem, config, options = load_problem(dict(SELFTEST_PROBLEM))
        else:
            problem, config, options = load_problem(args.problem)
    except SchemaError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2

    if args.seed is not None:
        config.seed = args.seed
    if args.starts is not None:
        config.starts = args.starts
    if args.tol_residual is not None:
        config.tol_residual = args.tol_residual
    if args.tol_dedup is not None:
        config.tol_dedup = args.tol_dedup
    if args.precision is not None:
        config.precision = args.precision
    if args.jmax is not None:
        options["j_max"] = args.jmax
    if args.max_terms is not None:
        options["max_terms"] = args.max_terms
    if args.threads is not None and kernels.HAS_NUMBA:
        try:
            kernels.numba.set_num_threads(args.threads)
        except ValueError:
            pass

    stage = {"solve": "solve", "verify": "verify", "selftest": "verify",
             "spectrum": "verify", "weightfn": "verify"}[args.command]
    try:
        report = run_pipeline(problem, config,
                              j_max=options.get("j_max"),
                              d_cap=options.get("d_cap"),
                              max_terms=options.get("max_terms", 10 ** 7),
                              stage=stage)
    except GaudinError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2

    if args.command == "spectrum":
        _print_spectra(report)
    elif args.command == "weightfn":
        _print_weightfn(problem, report)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            emit_report(report, "json" if out.endswith(".json")
                        else args.format, fh)
    if args.command not in ("spectrum", "weightfn") or args.format == "json":
        emit_report(report, args.format)
    return 0 if report["summary"]["all_pass"] else 1


def _print_spectra(report):
    for spec in report.get("spectra", []):
        print(f"orbit {spec['index']} (exact point: {spec['exact_point']})")
        for i, coeffs in spec["eigenvalues"].items():
            print(f"  coefficient {i}: {coeffs}")


def _print_weightfn(problem, report):
    M, form = build_modules(problem)
    print(f"summand count: {term_count(problem.l, problem.n_sites)}")
    for orb in report.get("orbits", []):
        if orb["degenerate"]:
            print(f"orbit {orb['index']}: degenerate, skipped")
            continue
        groups = [[complex(re, im) for (re, im) in grp]
                  for grp in orb["groups"]]
        try:
            vec, info = bethe_vector(problem, M, groups, form=form)
        except ZeroVector:
            print(f"orbit {orb['index']}: zero vector")
            continue
        print(f"orbit {orb['index']}: {len(vec)} nonzero coordinates, "
              f"norm^2 = {format_scalar(info['norm_square'])}")
        for idx in sorted(vec):
            print(f"  [{idx}] weight {M.basis_weights[idx]}: "
                  f"{format_scalar(vec[idx])}")


if __name__ == "__main__":
    sys.exit(main())
