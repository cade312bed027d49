import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Tuple

from checks.built_in_checks import (
    BraidCheck,
    DiagramCheck,
    FlagCheck,
    KMatrixCheck,
    RMatrixCheck,
    SphericalCheck,
)
from orchestrator import SuiteOrchestrator
from qgroup.cartan import build_cartan
from qgroup.diagrams import (
    admissible_sign,
    diagram_from_text,
    extend_sign,
    extension_report,
    format_diagram,
    non_invariant_classes,
    sign_check,
    vogan_classes,
)
from qgroup.errors import PrecisionError, QGroupError
from qgroup.jsonio import SCHEMA, kmatrix_document, load_module, module_document, save_json, to_jsonable
from qgroup.kmatrix import coideal_data, kmatrix_report, modified_k
from qgroup.parsing import format_permutation, parse_rational, parse_weight
from qgroup.repn import build_module, check_relations, decompose, tensor
from qgroup.scalars import ScalarContext

RESET = "\033[0m"
RED = "\033[31m"
GREEN = "\033[32m"
YELLOW = "\033[33m"
BLUE = "\033[34m"
BOLD = "\033[1m"

SUITES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "suites")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def display_suite_flow(config: dict) -> None:
    '''
    Displays a human-readable logical flow of the suite based on its configuration.
    '''
    print(f"{BLUE}--- Suite Flow ---{RESET}", file=sys.stderr)
    if not config or 'checks' not in config or 'start_check' not in config:
        print(f"{RED}Invalid or incomplete suite configuration provided.{RESET}", file=sys.stderr)
        return

    checks_map = {check['id']: check for check in config.get('checks', [])}
    routing_map = config.get('routing', {})
    current_id = config.get('start_check')

    if current_id not in checks_map:
        print(f"{RED}Start check '{current_id}' not found in checks configuration.{RESET}", file=sys.stderr)
        return

    visited = set()
    step_number = 1
    while current_id and current_id not in visited:
        visited.add(current_id)
        details = checks_map.get(current_id)
        if not details:
            print(f"{RED}Error: Check '{current_id}' found in routing but not defined in checks list.{RESET}", file=sys.stderr)
            break

        print(f"{GREEN}{step_number}. Check: {current_id} (Type: {details.get('type', 'N/A')}){RESET}", file=sys.stderr)
        print(f"   Description: {details.get('description', 'No description.')}", file=sys.stderr)

        route = routing_map.get(current_id, {})
        next_id = route.get('next')
        gate = details.get('check_config', {})
        if 'then_execute_step' in gate:
            print(f"   Passed -> {YELLOW}{gate['then_execute_step']}{RESET}, "
                  f"Failed -> {YELLOW}{gate.get('else_execute_step') or 'END'}{RESET}", file=sys.stderr)
            next_id = gate['then_execute_step']
        elif next_id:
            print(f"   Next -> {YELLOW}{next_id}{RESET}", file=sys.stderr)
        else:
            print(f"   Next -> {RED}END{RESET}", file=sys.stderr)

        current_id = next_id
        step_number += 1
        print("-" * 20, file=sys.stderr)

    if current_id and current_id in visited:
        print(f"{YELLOW}Warning: Loop detected or check '{current_id}' already visited. Flow display terminated.{RESET}", file=sys.stderr)


def display_final_outputs(final_results: Dict[str, Any]) -> None:
    print(f"""{GREEN}
╭───────────────────────╮
│                       │
│     Final Output:     │
│                       │
╰───────────────────────╯
{RESET}""")

    if not final_results:
        print("No final outputs were defined in the suite configuration.", file=sys.stderr)
    else:
        for key, value in final_results.items():
            print(f"\n➡️ {key.replace('_', ' ').title()}:", file=sys.stderr)
            if isinstance(value, list):
                for item in value:
                    print(f"  - {item}", file=sys.stderr)
            elif isinstance(value, str):
                for line in value.split('\n'):
                    print(f"  {line}", file=sys.stderr)
            else:
                print(f"  {json.dumps(to_jsonable(value), indent=2)}", file=sys.stderr)

    print("\n" + f"{BLUE}=" * 50 + RESET, file=sys.stderr)


# --- argument parsing -------------------------------------------------------------------------


def _global_options(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    """--q, --prec, --tol, --seed, --out and --verbose, accepted before or after the subcommand."""
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--q", default=default(None), help="deformation parameter as p/q or a decimal (default 1/2)")
    parser.add_argument("--prec", type=int, default=default(None), help="working precision in bits (default 300)")
    parser.add_argument("--tol", type=float, default=default(None), help="residual tolerance (default 1e-60)")
    parser.add_argument("--seed", type=int, default=default(0), help="seed for sampled test vectors")
    parser.add_argument("--out", default=default(None), help="write the JSON result here instead of stdout")
    parser.add_argument("--verbose", action="store_true", default=default(False), help="DEBUG logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgroup",
        description="Quantum group K-matrix engine: build modules, check identities, run verification suites.",
    )
    _global_options(parser)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def group(name: str, help_text: str):
        return sub.add_parser(name, help=help_text).add_subparsers(dest="action", required=True)

    def leaf(actions, name: str, help_text: Optional[str] = None) -> argparse.ArgumentParser:
        return actions.add_parser(name, help=help_text, parents=[common])

    cartan = group("cartan", "Cartan data")
    info = leaf(cartan, "info", "Cartan matrix, symmetrizer, roots and longest word")
    info.add_argument("algebra")

    repn = group("repn", "highest weight modules")
    build = leaf(repn, "build", "build V(weight) and check its relations")
    build.add_argument("--algebra", required=True)
    build.add_argument("--weight", required=True, help="fundamental coordinates, e.g. 1,0,0,0")
    check = leaf(repn, "check", "reload a module document and re-check its relations")
    check.add_argument("module")
    split = leaf(repn, "decompose", "highest weights of V(a) (x) V(b)")
    split.add_argument("--algebra", required=True)
    split.add_argument("--weights", nargs=2, required=True)

    rmat = group("rmat", "R-matrix identities")
    rcheck = leaf(rmat, "check")
    rcheck.add_argument("--algebra", required=True)
    rcheck.add_argument("--weight", default=None)
    rcheck.add_argument("--no-triple", dest="triple", action="store_false", help="skip the threefold tensor product")

    braid = group("braid", "braid operators")
    bcheck = leaf(braid, "check")
    bcheck.add_argument("--algebra", action="append", default=[], help="repeatable")
    bcheck.add_argument("--rank-one-max", type=int, default=6)

    diagrams = group("diagrams", "Satake and Vogan diagrams")
    classes = leaf(diagrams, "classes", "Vogan classes of an algebra")
    classes.add_argument("algebra")
    extend = leaf(diagrams, "extend", "extend the admissible sign of a Satake diagram")
    extend.add_argument("satake", help="e.g. 'g=F4; X=2,3,4; tau=id'")
    dcheck = leaf(diagrams, "check", "the exact diagram suite")
    dcheck.add_argument("--algebra", default="D4")
    dcheck.add_argument("--max-rank", type=int, default=4)

    kmatrix = group("kmatrix", "universal K-matrices")
    kbuild = leaf(kmatrix, "build", "the K-matrix bundle on one module, with its residual report")
    kbuild.add_argument("--diagram", required=True, help="e.g. 'g=F4; X=2,3,4; tau=id'")
    kbuild.add_argument("--module", required=True, help="highest weight, e.g. 1,0,0,0")
    kcheck = leaf(kmatrix, "check", "symmetric-type K-matrix identities")
    kcheck.add_argument("satake", nargs="?", default=None)
    kcheck.add_argument("--diagram", default=None, help="the Satake diagram, instead of the positional form")
    kcheck.add_argument("--weight", action="append", default=None, help="repeatable")
    kcheck.add_argument("--no-coproduct", dest="coproduct", action="store_false")
    kflag = leaf(kmatrix, "flag", "flag-type K-matrix identities")
    kflag.add_argument("--algebra", required=True)
    kflag.add_argument("--S", dest="S", required=True, help="1-based nodes where eps = 1")
    kflag.add_argument("--module", default=None)

    spherical = group("spherical", "spherical modules")
    scan = leaf(spherical, "scan", "multiplicities of invariant vectors")
    scan.add_argument("satake", nargs="?", default=None)
    scan.add_argument("--diagram", default=None, help="the Satake diagram, instead of the positional form")
    scan.add_argument("--max-height", type=int, default=10)
    invariants = leaf(spherical, "invariants", "coideal-invariant vectors in one module")
    invariants.add_argument("satake")
    invariants.add_argument("--weight", required=True)

    verify = sub.add_parser("verify", help="run a verification suite", parents=[common])
    verify.add_argument("target", help="'f4', a suite name under suites/, 'all', or a path to a suite JSON")
    verify.add_argument("--quiet", action="store_true", help="skip the flow display and progress banner")
    return parser


def _context(args) -> ScalarContext:
    defaults = ScalarContext()
    q = parse_rational(args.q) if args.q is not None else defaults.q
    ctx = ScalarContext(q,
                        args.prec if args.prec is not None else defaults.precision_bits,
                        args.tol if args.tol is not None else defaults.tol)
    return ctx.activate()


def _inputs(ctx: ScalarContext, args) -> dict:
    return {"q": ctx.q, "precision_bits": ctx.precision_bits, "tol": ctx.tol, "seed": args.seed}


# --- subcommands ------------------------------------------------------------------------------


def cmd_cartan(args, ctx) -> Tuple[dict, bool]:
    datum = build_cartan(args.algebra)
    fundamentals = [tuple(1 if k == j else 0 for k in datum.index_set) for j in datum.index_set]
    doc = {
        "algebra": datum.name,
        "rank": datum.rank,
        "cartan": [list(row) for row in datum.cartan],
        "d": [str(x) for x in datum.d],
        "positive_roots": len(datum.positive_roots),
        "rho": list(datum.rho),
        "longest_word": [r + 1 for r in datum.longest_word()],
        "tau0": format_permutation(datum.tau0),
        "fundamental_dims": [datum.weyl_dim(w) for w in fundamentals],
    }
    return doc, True


def cmd_repn(args, ctx) -> Tuple[dict, bool]:
    if args.action == "build":
        datum = build_cartan(args.algebra)
        M = build_module(datum, parse_weight(args.weight, datum.rank), ctx)
        relations = check_relations(M)
        doc = module_document(M)
        doc["weyl_dim"] = datum.weyl_dim(M.highest_weights[0][0])
        doc["relations"] = relations
        return doc, relations["max"] < ctx.tol_mpf and M.dim == doc["weyl_dim"]
    if args.action == "check":
        M = load_module(args.module)
        relations = check_relations(M)
        return {"label": M.label, "dim": M.dim, "relations": relations}, relations["max"] < ctx.tol_mpf
    datum = build_cartan(args.algebra)
    V, W = (build_module(datum, parse_weight(w, datum.rank), ctx) for w in args.weights)
    VW = tensor(V, W)
    components = [list(top) for top, _ in decompose(VW)]
    dims = sum(datum.weyl_dim(top) for top in components)
    return {"algebra": datum.name, "dim": VW.dim, "components": components}, dims == VW.dim


def cmd_rmat(args, ctx) -> Tuple[dict, bool]:
    config = {"algebras": [args.algebra], "triple": args.triple}
    if args.weight:
        config["weights"] = [args.weight]
    outputs = RMatrixCheck().execute(inputs=_inputs(ctx, args), config=config)
    return outputs, outputs["passed"]


def cmd_braid(args, ctx) -> Tuple[dict, bool]:
    config = {"algebras": args.algebra, "rank_one_max": args.rank_one_max}
    outputs = BraidCheck().execute(inputs=_inputs(ctx, args), config=config)
    return outputs, outputs["passed"]


def cmd_diagrams(args, ctx) -> Tuple[dict, bool]:
    if args.action == "classes":
        datum = build_cartan(args.algebra)
        rows = [{"tau_prime": format_permutation(c.tau_prime), "representative": str(c.canonical_rep),
                 "orbit_size": c.orbit_size} for c in vogan_classes(datum)]
        split = [str(c.canonical_rep) for c in non_invariant_classes(datum)]
        return {"algebra": datum.name, "classes": rows, "non_invariant": split}, True
    if args.action == "extend":
        s = diagram_from_text(args.satake)
        eps = admissible_sign(s)
        bad = sign_check(s, eps)
        doc = {"diagram": format_diagram(s), "sign": str(eps), "z": list(s.z), "chi0": [str(x) for x in s.chi0]}
        if bad is not None:
            doc["violating_k"] = list(bad)
            return doc, False
        eps_tilde = extend_sign(s, eps)
        report = extension_report(s, eps, eps_tilde)
        doc.update({"extension": [str(x) for x in eps_tilde.chi], "report": report})
        return doc, all(report.values())
    outputs = DiagramCheck().execute(inputs={}, config={"vogan_algebra": args.algebra, "max_rank": args.max_rank})
    return outputs, outputs["passed"]


def _satake_text(args) -> str:
    text = getattr(args, "diagram", None) or args.satake
    if not text:
        raise ValueError("A Satake diagram is required, either positionally or with --diagram.")
    return text


def cmd_kmatrix(args, ctx) -> Tuple[dict, bool]:
    if args.action == "build":
        s = diagram_from_text(args.diagram)
        bundle = modified_k(coideal_data(s), admissible_sign(s))
        V = build_module(s.datum, parse_weight(args.module, s.datum.rank), ctx)
        report = kmatrix_report(bundle, V)
        return kmatrix_document(bundle, V, report), report["max"] < ctx.tol_mpf
    if args.action == "check":
        check, config = KMatrixCheck(), {"cases": [{"satake": _satake_text(args), "weights": args.weight,
                                                    "coproduct": args.coproduct}]}
    else:
        case = {"algebra": args.algebra, "S": args.S}
        if args.module:
            case["module"] = [args.module]
        check, config = FlagCheck(), {"cases": [case]}
    outputs = check.execute(inputs=_inputs(ctx, args), config=config)
    return outputs, outputs["passed"]


def cmd_spherical(args, ctx) -> Tuple[dict, bool]:
    if args.action == "scan":
        config = {"scan": [{"satake": _satake_text(args), "max_height": args.max_height}]}
    else:
        config = {"unique": [{"satake": args.satake, "weight": args.weight}]}
    outputs = SphericalCheck().execute(inputs=_inputs(ctx, args), config=config)
    return outputs, outputs["passed"]


def resolve_suite(target: str) -> str:
    if target.endswith(".json"):
        return target
    return os.path.join(SUITES_DIR, f"{target}.json")


def cmd_verify(args, ctx) -> Tuple[dict, bool]:
    path = resolve_suite(args.target)
    with open(path, "r", encoding="utf-8") as f:
        config = json.load(f)
    if not args.quiet:
        print(f"{GREEN}✅ Successfully loaded suite: {BOLD}'{config.get('suite_name', 'N/A')}'{RESET}", file=sys.stderr)
        display_suite_flow(config)

    overrides = {"q": str(ctx.q) if args.q is not None else None,
                 "precision_bits": args.prec, "tol": args.tol, "seed": args.seed}
    orchestrator = SuiteOrchestrator(config, context_overrides=overrides, quiet=args.quiet)
    final_state = orchestrator.run()
    final_results = orchestrator.get_final_outputs(final_state)
    if not args.quiet:
        display_final_outputs(final_results)

    checks = {}
    for check_id in orchestrator.checks:
        if f"{check_id}.passed" in final_state:
            checks[check_id] = {key: final_state.get(f"{check_id}.{key}")
                                for key in ("passed", "max_residual", "failed", "error")
                                if f"{check_id}.{key}" in final_state}
    passed = orchestrator.verdict(final_state)
    return {"suite": config["suite_name"], "context": orchestrator.context,
            "final_outputs": final_results, "checks": checks}, passed


COMMANDS = {
    "cartan": cmd_cartan,
    "repn": cmd_repn,
    "rmat": cmd_rmat,
    "braid": cmd_braid,
    "diagrams": cmd_diagrams,
    "kmatrix": cmd_kmatrix,
    "spherical": cmd_spherical,
    "verify": cmd_verify,
}


def emit(doc: dict, out: Optional[str]) -> None:
    if out:
        save_json(doc, out)
        print(f"{GREEN}✅ Result written to '{out}'.{RESET}", file=sys.stderr)
    else:
        print(json.dumps(to_jsonable(doc), indent=2))


def run(argv: Optional[List[str]] = None) -> int:
    """
    The command-line entry point. Returns the exit code: 0 when every checked identity
    passes, 1 when a residual or mathematical check fails, 2 on malformed input.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        ctx = _context(args)
    except (ValueError, ZeroDivisionError, PrecisionError) as e:
        print(f"{RED}❌ Error: invalid numeric context: {e}{RESET}", file=sys.stderr)
        return EXIT_USAGE

    try:
        result, passed = COMMANDS[args.command](args, ctx)
    except FileNotFoundError as e:
        print(f"{RED}❌ Error: file not found: '{e.filename}'.{RESET}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as e:
        print(f"{RED}❌ Error: not valid JSON: {e}{RESET}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        # CartanError, DiagramError, DocumentError and parse errors are all ValueErrors.
        print(f"{RED}❌ Error: {e}{RESET}", file=sys.stderr)
        return EXIT_USAGE
    except QGroupError as e:
        print(f"{RED}❌ Error: {type(e).__name__}: {e}{RESET}", file=sys.stderr)
        result, passed = {"error": f"{type(e).__name__}: {e}"}, False

    doc = {"schema": SCHEMA, "command": args.command, "action": getattr(args, "action", None),
           "context": ctx.as_dict(), "seed": args.seed, "passed": bool(passed)}
    doc.update(result)
    doc["passed"] = bool(passed)
    emit(doc, args.out)
    return EXIT_OK if passed else EXIT_FAILED


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
