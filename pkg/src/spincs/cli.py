"""Command-line front end.

One job per invocation; the result is a single JSON document on stdout.
Inputs are role-tagged files (``--input role=path``) validated against
their schemas before any computation starts.  Exit codes: 0 success,
2 schema or invariant violation, 3 enumeration or order cap exceeded,
4 a check that ran and failed.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction
from importlib import resources
from typing import Optional

from .classify import (
    ascs_from_lattice,
    classify_pointed,
    psm_from_even_sublattice,
    triples_equivalent,
    two_to_one_check,
)
from .groups import EnumerationCapError, gauss_sum
from .mcg import (
    intertwiner_check,
    oriented_restriction_check,
    spin_s,
    spin_t,
    torus_basis,
)
from .scalars import OrderOverflowError, root_of_unity
from .schemas import (
    SchemaError,
    parse_lattice,
    parse_metric_group,
    parse_pointed,
    parse_summary,
    parse_surgery,
    render_cyclotomic,
    render_matrix,
)
from .spin import (
    SurfaceSpinStructure,
    arf,
    pointed_summary,
    spin_state_dims,
    three_torus_closed_form,
)
from .surgery import (
    characteristic_sublinks,
    inertia,
    oriented_manifold_invariant,
    refinement_check,
    spin_manifold_invariant,
)

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_CAP = 3
EXIT_CHECK = 4


class CheckFailed(RuntimeError):
    """A verification subcommand ran to completion and the check failed."""

    def __init__(self, message: str, document: dict):
        super().__init__(message)
        self.document = document


def _data_path(name: str):
    return resources.files("spincs").joinpath("data", name)


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise SchemaError(f"input file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})")


def _collect_inputs(pairs: Optional[list[str]], allowed: set[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise SchemaError(
                f"--input must look like role=path, got {pair!r}; "
                f"roles here: {sorted(allowed)}"
            )
        role, path = pair.split("=", 1)
        if role not in allowed:
            raise SchemaError(
                f"unknown input role {role!r}; expected one of {sorted(allowed)}"
            )
        if role in out:
            raise SchemaError(f"duplicate input role {role!r}")
        out[role] = path
    return out


def _need(inputs: dict[str, str], role: str) -> str:
    if role not in inputs:
        raise SchemaError(f"missing required input: --input {role}=FILE")
    return inputs[role]


PSM_CORPUS = ["z4.json", "z2z2.json", "z2z4.json", "z4z4.json", "z4z8.json", "z2z2z2.json"]
SURGERY_CORPUS = [
    "lens2.json",
    "lens3.json",
    "hopf.json",
    "zero3.json",
    "diag222.json",
    "sym4.json",
]
LATTICE_CORPUS = ["lat_z.json", "lat_diag111.json", "lat_diag1m11.json", "lat_a2.json"]


def _corpus_docs(names: list[str]) -> list[tuple[str, dict]]:
    return [(name, _load_json(_data_path(name))) for name in names]


# -- subcommands --------------------------------------------------------------


def cmd_gauss_sum(args) -> dict:
    digits = args.precision
    if args.corpus:
        docs = _corpus_docs(PSM_CORPUS)
    else:
        inputs = _collect_inputs(args.input, {"group"})
        docs = [(_need(inputs, "group"), _load_json(_need(inputs, "group")))]
    results = []
    for name, doc in docs:
        q = parse_metric_group(doc, where="group")
        entry = {
            "input": str(name),
            "orders": list(q.group.orders),
            "homogeneous": q.is_homogeneous(),
            "nondegenerate": q.is_nondegenerate(),
            "tau_plus": render_cyclotomic(gauss_sum(q, +1), digits),
            "tau_minus": render_cyclotomic(gauss_sum(q, -1), digits),
        }
        tau = gauss_sum(q, +1)
        sigma = next(
            (k for k in range(8) if tau == root_of_unity(Fraction(k, 8))), None
        )
        entry["sigma_mod_8"] = sigma
        results.append(entry)
    return {"command": "gauss-sum", "results": results}


def _summary_from_inputs(args) -> tuple[str, object]:
    inputs = _collect_inputs(args.input, {"summary", "psm"})
    if "summary" in inputs:
        return inputs["summary"], parse_summary(_load_json(inputs["summary"]))
    if "psm" in inputs:
        psm = parse_pointed(_load_json(inputs["psm"]))
        return inputs["psm"], pointed_summary(psm)
    raise SchemaError("dims needs --input summary=FILE or --input psm=FILE")


def _parse_bits(text: str, where: str) -> tuple[int, ...]:
    try:
        bits = tuple(int(b) for b in text.replace(" ", "").split(",") if b != "")
    except ValueError:
        raise SchemaError(f"{where}: expected comma-separated bits") from None
    if any(b not in (0, 1) for b in bits):
        raise SchemaError(f"{where}: entries must be 0 or 1")
    return bits


def cmd_dims(args) -> dict:
    digits = args.precision
    if args.corpus:
        jobs_docs = [("ising.json", parse_summary(_load_json(_data_path("ising.json"))))]
        for name in PSM_CORPUS:
            psm = parse_pointed(_load_json(_data_path(name)))
            jobs_docs.append((name, pointed_summary(psm)))
    else:
        jobs_docs = [_summary_from_inputs(args)]
    genus = args.genus
    results = []
    for name, summary in jobs_docs:
        if args.spin_tuple is not None:
            bits = _parse_bits(args.spin_tuple, "--spin-tuple")
            if len(bits) != 2 * genus:
                raise SchemaError(
                    f"--spin-tuple: expected {2 * genus} bits for genus {genus}"
                )
            tuples = [SurfaceSpinStructure.from_bits(bits)]
        else:
            tuples = [
                SurfaceSpinStructure.from_bits(bits)
                for bits in itertools.product((0, 1), repeat=2 * genus)
            ]
        for sigma in tuples:
            plus, minus = spin_state_dims(summary, genus, sigma)
            results.append(
                {
                    "input": str(name),
                    "genus": genus,
                    "spin_tuple": [b for pair in sigma.tuple for b in pair],
                    "arf": arf(sigma),
                    "dim_plus": str(plus.as_rational()),
                    "dim_minus": str(minus.as_rational()),
                }
            )
    return {"command": "dims", "results": results}


def cmd_invariant(args) -> dict:
    digits = args.precision
    if args.corpus:
        pairs = [
            (gname, sname)
            for gname in ["z4.json", "z2z2.json"]
            for sname in SURGERY_CORPUS
        ]
        jobs_list = [
            (
                f"{g}+{s}",
                parse_pointed(_load_json(_data_path(g))),
                *parse_surgery(_load_json(_data_path(s))),
            )
            for g, s in pairs
        ]
    else:
        inputs = _collect_inputs(args.input, {"psm", "surgery"})
        psm = parse_pointed(_load_json(_need(inputs, "psm")))
        link, sublink = parse_surgery(_load_json(_need(inputs, "surgery")))
        jobs_list = [(inputs["surgery"], psm, link, sublink)]
    results = []
    for name, psm, link, sublink in jobs_list:
        inert = inertia(link)
        all_subs = characteristic_sublinks(link)
        chosen = [sublink] if sublink is not None else all_subs
        is_zero_3x3 = link.size == 3 and all(
            x == 0 for row in link.entries for x in row
        )
        summary = pointed_summary(psm) if is_zero_3x3 else None
        values = []
        for s in chosen:
            value = spin_manifold_invariant(psm, link, s, jobs=args.jobs)
            entry = {"sublink": list(s.s), "value": render_cyclotomic(value, digits)}
            if summary is not None:
                # The closed-form three-torus expression differs from the
                # surgery normalisation by a factor of 2 on pointed inputs;
                # both are reported, the surgery value is authoritative.
                closed = three_torus_closed_form(summary, tuple(s.s))
                entry["three_torus_closed_form"] = render_cyclotomic(closed, digits)
            values.append(entry)
        results.append(
            {
                "input": str(name),
                "inertia": {
                    "b_plus": inert.b_plus,
                    "b_minus": inert.b_minus,
                    "b_one": inert.b_one,
                },
                "sublink_count": len(all_subs),
                "spin_invariants": values,
                "oriented_invariant": render_cyclotomic(
                    oriented_manifold_invariant(psm, link, jobs=args.jobs), digits
                ),
            }
        )
    return {"command": "invariant", "results": results}


def _render_triple(result) -> dict:
    triple = result.triple
    table = {
        ",".join(map(str, g.residues)): str(triple.q_rep(g).value)
        for g in sorted(triple.group.elements(), key=lambda x: x.residues)
    }
    return {
        "group_invariant_factors": list(triple.group.canonical_orders),
        "group_orders": list(triple.group.orders),
        "q_table": table,
        "sigma_mod_8": triple.sigma,
        "is_spin": triple.is_spin(),
        "shift_rep": list(result.shift_rep.residues),
        "w2_image": list(result.w2_image.residues),
    }


def cmd_classify(args) -> dict:
    digits = args.precision
    if args.from_lattice:
        return cmd_lattice(args)
    if args.corpus:
        names = PSM_CORPUS
        docs = [(n, parse_pointed(_load_json(_data_path(n)))) for n in names]
    else:
        inputs = _collect_inputs(args.input, {"psm"})
        path = _need(inputs, "psm")
        docs = [(path, parse_pointed(_load_json(path)))]
    results = []
    for name, psm in docs:
        classification = classify_pointed(psm)
        entry = _render_triple(classification)
        entry["input"] = str(name)
        entry["tau_plus"] = render_cyclotomic(gauss_sum(psm.metric, +1), digits)
        results.append(entry)
    return {"command": "classify", "results": results}


def cmd_lattice(args) -> dict:
    digits = args.precision
    if args.corpus:
        docs = _corpus_docs(LATTICE_CORPUS)
    else:
        inputs = _collect_inputs(args.input, {"lattice"})
        path = _need(inputs, "lattice")
        docs = [(path, _load_json(path))]
    results = []
    for name, doc in docs:
        lat = parse_lattice(doc)
        triple = ascs_from_lattice(lat)
        table = {
            ",".join(map(str, g.residues)): str(triple.q_rep(g).value)
            for g in sorted(triple.group.elements(), key=lambda x: x.residues)
        }
        entry = {
            "input": str(name),
            "triple": {
                "group_invariant_factors": list(triple.group.canonical_orders),
                "q_table": table,
                "sigma_mod_8": triple.sigma,
                "is_spin": triple.is_spin(),
            },
        }
        try:
            psm = psm_from_even_sublattice(lat)
            reconstructed = classify_pointed(psm)
            entry["reconstructed_psm"] = {
                "orders": list(psm.group.orders),
                "invariant_factors": list(psm.group.canonical_orders),
                "fermion": list(psm.fermion.residues),
                "q_table": {
                    ",".join(map(str, g.residues)): str(psm.metric(g).value)
                    for g in sorted(psm.group.elements(), key=lambda x: x.residues)
                },
                "round_trip_matches": triples_equivalent(triple, reconstructed.triple),
            }
        except ValueError as exc:
            entry["reconstructed_psm"] = {"error": str(exc)}
        results.append(entry)
    return {"command": "lattice", "results": results}


def cmd_mcg(args) -> dict:
    digits = args.precision
    if args.corpus:
        names = ["z4.json", "z2z4.json", "z4z4.json"]
        docs = [(n, parse_pointed(_load_json(_data_path(n)))) for n in names]
    else:
        inputs = _collect_inputs(args.input, {"psm"})
        path = _need(inputs, "psm")
        docs = [(path, parse_pointed(_load_json(path)))]
    results = []
    failed = False
    for name, psm in docs:
        sectors_doc = {}
        for sector in ((0, 0), (1, 0), (0, 1), (1, 1)):
            basis = torus_basis(psm, sector)
            t_map = spin_t(psm, sector)
            s_map = spin_s(psm, sector)
            sectors_doc[f"{sector[0]}{sector[1]}"] = {
                "basis_labels": [list(g.residues) for g in basis.labels],
                "t": {
                    "target_sector": list(t_map.target_sector),
                    "matrix": render_matrix(t_map.matrix, digits),
                },
                "s": {
                    "target_sector": list(s_map.target_sector),
                    "matrix": render_matrix(s_map.matrix, digits),
                },
            }
        restriction_ok = oriented_restriction_check(psm)
        report = intertwiner_check(psm)
        entry = {
            "input": str(name),
            "sectors": sectors_doc,
            "restriction_check": restriction_ok,
            "intertwiner": {
                "passed": report.passed,
                "global_t_phase": render_cyclotomic(report.global_t_phase, digits)
                if report.global_t_phase is not None
                else None,
                "phase_order": report.phase_order,
                "shift_rep": list(report.shift_rep.residues),
                "detail": report.detail,
            },
        }
        if not restriction_ok or not report.passed:
            failed = True
        results.append(entry)
    doc = {"command": "mcg", "results": results}
    if failed:
        raise CheckFailed("restriction or intertwiner check failed", doc)
    return doc


def cmd_check_refinement(args) -> dict:
    digits = args.precision
    if args.corpus:
        jobs_list = []
        for gname in ["z4.json", "z2z2.json", "z2z4.json"]:
            psm = parse_pointed(_load_json(_data_path(gname)))
            for sname in SURGERY_CORPUS:
                link, _ = parse_surgery(_load_json(_data_path(sname)))
                jobs_list.append((f"{gname}+{sname}", psm, link))
    else:
        inputs = _collect_inputs(args.input, {"psm", "surgery"})
        psm = parse_pointed(_load_json(_need(inputs, "psm")))
        link, _ = parse_surgery(_load_json(_need(inputs, "surgery")))
        jobs_list = [(inputs["surgery"], psm, link)]
    results = []
    constants = []
    failed = False
    for name, psm, link in jobs_list:
        report = refinement_check(psm, link, jobs=args.jobs)
        if not report.passed:
            failed = True
        entry = {
            "input": str(name),
            "passed": report.passed,
            "sublink_count": report.sublink_count,
            "spin_average": render_cyclotomic(report.spin_average, digits),
            "oriented_value": render_cyclotomic(report.oriented_value, digits),
            "constant": render_cyclotomic(report.constant, digits)
            if report.constant is not None
            else None,
        }
        if report.constant is not None:
            constants.append(report.constant)
        results.append(entry)
    single = all(c == constants[0] for c in constants[1:]) if constants else True
    if not single:
        failed = True
    doc = {
        "command": "check-refinement",
        "results": results,
        "single_constant": single,
    }
    if failed:
        raise CheckFailed("refinement identity failed or constant not unique", doc)
    return doc


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincs",
        description=(
            "Exact invariants of metric groups: Gauss sums, spin state-space "
            "dimensions, surgery invariants, Chern-Simons classification and "
            "torus mapping class group data"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--input",
            action="append",
            metavar="ROLE=FILE",
            help="role-tagged input file; repeatable",
        )
        p.add_argument("--precision", type=int, default=12, metavar="N",
                       help="display digits for float renderings (default 12)")
        p.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="worker bound for colouring enumerations")
        p.add_argument("--corpus", action="store_true",
                       help="run on the bundled example corpus")

    p = sub.add_parser("gauss-sum", help="Gauss sums of a metric group")
    common(p)
    p.set_defaults(func=cmd_gauss_sum)

    p = sub.add_parser("dims", help="spin state-space dimensions")
    common(p)
    p.add_argument("--genus", type=int, default=1, metavar="G")
    p.add_argument("--spin-tuple", metavar="BITS",
                   help="comma-separated framing bits a1,b1,...; all tuples when omitted")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("invariant", help="spin surgery invariants of a linking matrix")
    common(p)
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("classify", help="spin Chern-Simons triple of a pointed datum")
    common(p)
    p.add_argument("--from-lattice", action="store_true",
                   help="classify a lattice input instead (role lattice=FILE)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("lattice", help="discriminant triple and reconstructed pointed datum")
    common(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("mcg", help="torus mapping class group data and checks")
    common(p)
    p.set_defaults(func=cmd_mcg)

    p = sub.add_parser("check-refinement", help="spin refinement identity check")
    common(p)
    p.set_defaults(func=cmd_check_refinement)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        print(json.dumps({"error": "--jobs must be >= 1"}), file=sys.stderr)
        return EXIT_SCHEMA
    try:
        doc = args.func(args)
    except SchemaError as exc:
        print(json.dumps({"error": f"schema: {exc}"}, sort_keys=True))
        return EXIT_SCHEMA
    except (EnumerationCapError, OrderOverflowError) as exc:
        print(json.dumps({"error": f"cap exceeded: {exc}"}, sort_keys=True))
        return EXIT_CAP
    except CheckFailed as exc:
        doc = dict(exc.document)
        doc["error"] = str(exc)
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_CHECK
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
