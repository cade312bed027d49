import logging
import random
from typing import Dict, List, Optional

from qgroup import linalg as la
from qgroup.braid import braid_T, braid_relation_report, commutation_reports
from qgroup.cartan import build_cartan
from qgroup.diagrams import (
    SignFunction,
    admissible_sign,
    diagram_from_text,
    dl_invariant,
    extend_sign,
    extension_report,
    format_diagram,
    load_fixtures,
    non_invariant_classes,
    sign_check,
    vogan_orbit,
)
from qgroup.errors import QGroupError
from qgroup.f4case import verify_f4_identities
from qgroup.kmatrix import coideal_data, coproduct_report, flag_report, kmatrix_report, modified_k
from qgroup.parsing import parse_index_list, parse_weight
from qgroup.repn import build_module, check_relations
from qgroup.rmat import (
    coboundary_report,
    extremal_report,
    quasitriangular_report,
    r_matrix_report,
    ribbon_report,
    star_antipode_t_report,
)
from qgroup.spherical import (
    dual_coideal_check,
    flag_phihat_check,
    flag_span_check,
    invariant_vectors,
    phihat_family,
    spherical_scan,
    symmetric_span_check,
    wj_component_check,
)

from .base_check import BaseCheck

logger = logging.getLogger(__name__)


def _fundamental(rank: int, j: int) -> tuple:
    return tuple(1 if k == j else 0 for k in range(rank))


def _tag(weight) -> str:
    return ",".join(str(x) for x in weight)


def _bundle(satake_text: str):
    s = diagram_from_text(satake_text)
    return modified_k(coideal_data(s), admissible_sign(s))


def _flag_sign(rank: int, S) -> SignFunction:
    """eps with eps_r = 1 exactly on S (1-based list)."""
    support = parse_index_list(S, rank)
    return SignFunction.painted(rank, [r for r in range(rank) if r not in support], flag=True)


def _random_pairs(dim: int, seed, count: int) -> List[List[int]]:
    """1-based basis index pairs drawn from a seeded generator."""
    rng = random.Random(int(seed or 0))
    return [[rng.randint(1, dim), rng.randint(1, dim)] for _ in range(count)]


def _weights(datum, values: Optional[List], default=None) -> List[tuple]:
    if not values:
        return [default or _fundamental(datum.rank, 0)]
    return [parse_weight(v, datum.rank) for v in values]


# --- Check #1: Defining relations ---
class RelationsCheck(BaseCheck):
    """
    Builds every fundamental module of the listed algebras and checks the defining
    relations, the adjoint rule and the Weyl dimension.
    """

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        algebras = config.get("algebras")
        if not algebras:
            raise ValueError("RelationsCheck requires 'algebras' in its check_config.")
        residuals, conditions, dims = {}, {}, {}
        for name in algebras:
            datum = build_cartan(name)
            for j in datum.index_set:
                w = _fundamental(datum.rank, j)
                M = build_module(datum, w, ctx)
                key = f"{datum.name}:[{_tag(w)}]"
                residuals[key] = check_relations(M)["max"]
                dims[key] = M.dim
                conditions[f"{key}:dim"] = M.dim == datum.weyl_dim(w)
        return self.finish({"dims": dims, "residuals": residuals}, residuals, config, conditions, ctx=ctx)


# --- Check #2: R-matrix identities ---
class RMatrixCheck(BaseCheck):
    """Quasitriangularity, Yang-Baxter, R^* = R_21, ribbon and coboundary identities on V (x) V (x) V."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        residuals = {}
        for name in config.get("algebras", []):
            datum = build_cartan(name)
            V = build_module(datum, _weights(datum, config.get("weights"))[0], ctx)
            found = dict(r_matrix_report(V, V))
            found["extremal"] = extremal_report(V, V)
            if config.get("triple", True):
                found.update(quasitriangular_report(V, V, V))
            found["ribbon"] = ribbon_report(V, V)
            found.update(coboundary_report(V, V))
            found["star_antipode_t"] = star_antipode_t_report(V)
            residuals.update({f"{datum.name}:{k}": v for k, v in found.items()})
        return self.finish({"residuals": residuals}, residuals, config, ctx=ctx)


# --- Check #3: Braid operators ---
class BraidCheck(BaseCheck):
    """Rank-one action on highest weight vectors, braid relations and the unitarity properties of T."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        residuals = {}
        a1 = build_cartan("A1")
        for n in range(int(config.get("rank_one_max", 6)) + 1):
            V = build_module(a1, (n,), ctx)
            top = la.unit_vector(V.dim, 0)
            lowered = top
            for _ in range(n):
                lowered = la.matvec(V.F[0], lowered)
            expected = ((-1) ** n) * ctx.q_power(n) / ctx.qfactorial(n) * lowered
            residuals[f"A1:T[{n}]"] = la.residual(la.matvec(braid_T(V, 0), top), expected)
        for name in config.get("algebras", []):
            datum = build_cartan(name)
            for k, v in braid_relation_report(datum, ctx).items():
                residuals[f"{datum.name}:braid:{k}"] = v
        for case in config.get("unitarity", []):
            datum = build_cartan(case["algebra"])
            V = build_module(datum, _weights(datum, case.get("weights"))[0], ctx)
            subsets = [parse_index_list(X, datum.rank) for X in case.get("subsets", [])]
            for k, v in commutation_reports(V, subsets).items():
                residuals[f"{datum.name}:{k}"] = v
        return self.finish({"residuals": residuals}, residuals, config, ctx=ctx)


# --- Check #4: Diagram combinatorics (exact) ---
class DiagramCheck(BaseCheck):
    """
    Vogan classes that split under inner conjugacy, the orbit invariant on a pair of
    sign functions, and sign extensions for every tabled Satake diagram.
    """

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        datum = build_cartan(config.get("vogan_algebra", "D4"))
        classes = non_invariant_classes(datum)
        expected = config.get("expected_classes")
        conditions: Dict[str, bool] = {}
        if expected is not None:
            conditions["class_count"] = len(classes) == int(expected)
        pair = config.get("inequivalent_pair")
        invariants = []
        if pair:
            ident = tuple(datum.index_set)
            signs = [SignFunction.painted(datum.rank, parse_index_list(p, datum.rank)) for p in pair]
            invariants = [dl_invariant(datum, eps) for eps in signs]
            conditions["pair_invariants_differ"] = invariants[0] != invariants[1]
            conditions["pair_orbits_differ"] = vogan_orbit(datum, ident, signs[0]) != vogan_orbit(datum, ident, signs[1])
        max_rank = int(config.get("max_rank", 4))
        extensions = []
        for row in load_fixtures():
            s = diagram_from_text(row["satake"])
            if s.datum.rank > max_rank:
                continue
            label = format_diagram(s)
            try:
                eps = admissible_sign(s)
                bad = sign_check(s, eps)
                ext = extension_report(s, eps, extend_sign(s, eps)) if bad is None else {}
                ok = bad is None and all(ext.values())
            except QGroupError as e:
                logger.warning("Sign extension failed on %s: %s", label, e)
                ok = False
            conditions[f"extension:{label}"] = ok
            extensions.append({"diagram": label, "real_form": row.get("real_form"), "extends": ok})
        report = {
            "classes": len(classes),
            "canonical": [str(c.canonical_rep) for c in classes],
            "dl_invariants": invariants,
            "extensions": extensions,
        }
        return self.finish(report, {}, config, conditions)


# --- Check #5: Symmetric-type K-matrices ---
class KMatrixCheck(BaseCheck):
    """Single-module and coproduct identities of the modified K-matrix per Satake diagram."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        residuals, gaps = {}, {}
        for case in config.get("cases", []):
            bundle = _bundle(case["satake"])
            datum = bundle.coideal.datum
            for w in _weights(datum, case.get("weights")):
                V = build_module(datum, w, ctx)
                key = f"{case['satake']}:[{_tag(w)}]"
                found = kmatrix_report(bundle, V)
                gaps[key] = found.pop("nontrivial")
                found.pop("max")
                if case.get("coproduct", True):
                    pair = coproduct_report(bundle, V, V)
                    pair.pop("max")
                    found.update({f"pair:{k}": v for k, v in pair.items()})
                residuals.update({f"{key}:{k}": v for k, v in found.items()})
        return self.finish({"residuals": residuals, "scalar_gaps": gaps}, residuals, config, ctx=ctx)


# --- Check #6: Flag K-matrices ---
class FlagCheck(BaseCheck):
    """K_eps identities and the phi-hat image K_{-2 w_S varpi} for flag characters."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        residuals = {}
        for case in config.get("cases", []):
            datum = build_cartan(case["algebra"])
            eps = _flag_sign(datum.rank, case["S"])
            V = build_module(datum, _weights(datum, case.get("module"))[0], ctx)
            key = f"{datum.name}:S={_tag(case['S'])}"
            found = flag_report(datum, eps, V, V)
            found.pop("max")
            residuals.update({f"{key}:{k}": v for k, v in found.items()})
            for w in _weights(datum, case.get("weights")):
                residuals[f"{key}:phihat[{_tag(w)}]"] = flag_phihat_check(datum, eps, w, V)
        return self.finish({"residuals": residuals}, residuals, config, ctx=ctx)


# --- Check #7: Spherical modules ---
class SphericalCheck(BaseCheck):
    """Spherical weight scans, uniqueness of invariants, the exterior-power component and dual membership."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        residuals: Dict[str, object] = {}
        conditions: Dict[str, bool] = {}
        report: Dict[str, object] = {}
        for case in config.get("scan", []):
            cd = coideal_data(diagram_from_text(case["satake"]))
            rows = spherical_scan(cd, ctx, int(case.get("max_height", 10)))
            report[f"scan:{case['satake']}"] = rows
            conditions[f"scan:{case['satake']}"] = all(row["agrees"] for row in rows)
        for case in config.get("unique", []):
            cd = coideal_data(diagram_from_text(case["satake"]))
            w = parse_weight(case["weight"], cd.datum.rank)
            found = invariant_vectors(cd, build_module(cd.datum, w, ctx)).dim_invariants
            report[f"invariants:{case['satake']}:[{_tag(w)}]"] = found
            conditions[f"unique:{case['satake']}:[{_tag(w)}]"] = found == 1
        for case in config.get("exterior", []):
            cd = coideal_data(diagram_from_text(case["satake"]))
            found = wj_component_check(cd, ctx, int(case.get("m", 1)))
            report[f"exterior:{case['satake']}"] = found
            conditions[f"exterior:{case['satake']}"] = found["passed"]
        for case in config.get("dual", []):
            bundle = _bundle(case["satake"])
            datum, sigma = bundle.coideal.datum, bundle.satake.tau_nu
            V = build_module(datum, _weights(datum, case.get("coefficient"))[0], ctx)
            W = build_module(datum, _weights(datum, case.get("module"))[0], ctx)
            pairs = case.get("pairs") or _random_pairs(V.dim, inputs.get("seed", 0), int(case.get("samples", 3)))
            for i, j in pairs:
                Y = phihat_family(bundle.modified, sigma, V, la.unit_vector(V.dim, i - 1), la.unit_vector(V.dim, j - 1))
                residuals[f"dual:{case['satake']}:({i},{j})"] = dual_coideal_check(bundle.modified, sigma, Y, W, W)
        return self.finish(report, residuals, config, conditions, ctx=ctx)


# --- Check #8: Algebra equality on a fixed module ---
class AlgebraSpanCheck(BaseCheck):
    """Gap between the algebra of phi-hat images and the coideal (or Levi) algebra on one module."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        residuals, report = {}, {}
        for case in config.get("symmetric", []):
            bundle = _bundle(case["satake"])
            datum = bundle.coideal.datum
            W = build_module(datum, _weights(datum, case.get("module"))[0], ctx)
            found = symmetric_span_check(bundle, _weights(datum, case.get("coefficients")), W)
            report[case["satake"]] = found
            residuals[f"span:{case['satake']}"] = found["gap"]
        for case in config.get("flag", []):
            datum = build_cartan(case["algebra"])
            eps = _flag_sign(datum.rank, case["S"])
            W = build_module(datum, _weights(datum, case.get("module"))[0], ctx)
            found = flag_span_check(datum, eps, _weights(datum, case.get("coefficients")), W)
            key = f"{datum.name}:S={_tag(case['S'])}"
            report[key] = found
            residuals[f"span:{key}"] = found["gap"]
        return self.finish(report, residuals, config, ctx=ctx)


# --- Check #9: The FII computation on F4 ---
class F4Check(BaseCheck):
    """Every identity of the explicit FII computation, plus positivity of the counit value."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        ctx = self.context(inputs)
        found = verify_f4_identities(ctx)
        report = {k: v for k, v in found.items() if k != "identities"}
        report["residuals"] = found["identities"]
        return self.finish(report, found["identities"], config, {"positive": found["positive"]}, ctx=ctx)


# --- Check #10: Residual gate router ---
class ResidualGateCheck(BaseCheck):
    """
    Directs the suite's flow on the verdict of an earlier check. Returns the special
    '_next_step_id' output that the orchestrator uses to pick the next step.
    """

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        if "passed" not in inputs:
            raise ValueError("ResidualGateCheck requires 'passed' in inputs.")
        verdict = bool(inputs["passed"])
        if verdict:
            return {"verdict": True, "_next_step_id": config.get("then_execute_step")}
        return {"verdict": False, "_next_step_id": config.get("else_execute_step")}


# --- Check #11: Verdict aggregator ---
class VerdictAggregatorCheck(BaseCheck):
    """Merges the 'passed' outputs of earlier checks into a single verdict."""

    def execute(self, inputs: dict, config: dict, check_id: str = None, **kwargs) -> dict:
        verdicts = {name: bool(value) for name, value in inputs.items()}
        return {"passed": all(verdicts.values()), "verdicts": verdicts}
