"""Command-line interface: instance I/O, analysis reports, grid runs, checks.

Instances are JSON documents with four fields::

    {
      "group":   {"family": "cyclic", "n": 2}   or  {"table": [[0,1],[1,0]]},
      "carrier": ["p", "q", "r"],
      "domains": {"0": ["p","q","r"], "1": ["p","q"]},
      "maps":    {"0": [["p","p"],["q","q"],["r","r"]], "1": [["p","q"],["q","p"]]}
    }

Carrier entries are arbitrary labels (strings or numbers); ``domains`` and
``maps`` are keyed by group element index.  Reports are JSON on stdout with
rationals rendered as "p/q" strings and the infinite dimension as the string
"infinity"; diagnostics go to stderr.  Exit codes: 0 success, 1 domain
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .decomp import orbit_type_decomposition, stratification
from .fdcstar import (
    block_structure_full,
    crossed_product,
    crossed_product_blocks_combinatorial,
    fixed_point_algebra,
    imprimitivity_bimodule_verify,
    morita_equivalent,
)
from .groups import FiniteGroup, GroupError, build_group
from .harness import run_all_checks
from .pactions import (
    PartialAction,
    PartialActionError,
    central_splitting,
    freeness_witness,
    globalize,
    is_free,
    translation_groupoid,
    validate,
)
from .rokhlin import (
    DEFAULT_BUDGET,
    NonexistenceProof,
    SearchBudgetExceeded,
    TowerCertificate,
    rokhlin_dimension,
    towers_exist,
)

SCHEMA_VERSION = 1


class ParseError(ValueError):
    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{message}{f' (at {location})' if location else ''}")


class ValidationError(ValueError):
    def __init__(self, cause: PartialActionError):
        self.cause = cause
        super().__init__(f"instance does not validate: {cause}")


def _group_from_payload(payload, location: str) -> FiniteGroup:
    if not isinstance(payload, dict):
        raise ParseError("group must be an object", location)
    if "table" in payload:
        return build_group(payload["table"])
    if "family" in payload:
        family = payload["family"]
        if family == "klein4":
            return build_group("klein4")
        if "n" not in payload:
            raise ParseError(f"family {family!r} needs a parameter n", location)
        return build_group((family, int(payload["n"])))
    raise ParseError("group needs either 'family' or 'table'", location)


def parse_instance(text: str) -> PartialAction:
    """Parse and validate an instance document; labels map to dense indices."""
    pa, _ = parse_instance_with_labels(text)
    return pa


def parse_instance_with_labels(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"not valid JSON: {err.msg}", f"line {err.lineno}, column {err.colno}")
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    for key in ("group", "carrier", "domains", "maps"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    try:
        group = _group_from_payload(doc["group"], "group")
    except GroupError as err:
        raise ParseError(str(err), "group")
    labels = list(doc["carrier"])
    if len(set(map(str, labels))) != len(labels):
        raise ParseError("carrier labels are not distinct", "carrier")
    index = {str(lbl): i for i, lbl in enumerate(labels)}

    def point(lbl, location) -> int:
        key = str(lbl)
        if key not in index:
            raise ParseError(f"label {lbl!r} is not in the carrier", location)
        return index[key]

    domains = {}
    for g_str, lst in dict(doc["domains"]).items():
        g = _element(group, g_str, "domains")
        domains[g] = {point(lbl, f"domains.{g_str}") for lbl in lst}
    maps = {}
    for g_str, pairs in dict(doc["maps"]).items():
        g = _element(group, g_str, "maps")
        mapping = {}
        for entry in pairs:
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise ParseError("map entries must be [source, target] pairs", f"maps.{g_str}")
            src, tgt = entry
            mapping[point(src, f"maps.{g_str}")] = point(tgt, f"maps.{g_str}")
        maps[g] = mapping
    try:
        pa = validate(group, range(len(labels)), domains, maps)
    except PartialActionError as err:
        raise ValidationError(err)
    return pa, labels


def _element(group: FiniteGroup, key, location: str) -> int:
    try:
        g = int(key)
    except (TypeError, ValueError):
        raise ParseError(f"group element key {key!r} is not an index", location)
    if not (0 <= g < group.order):
        raise ParseError(f"group element {g} out of range", location)
    return g


def serialize_instance(pa: PartialAction, labels: Optional[Sequence] = None) -> str:
    """Canonical JSON serialization; parse . serialize is the identity."""
    if labels is None:
        labels = sorted(pa.carrier)
    label_of = {x: labels[i] for i, x in enumerate(sorted(pa.carrier))}
    doc = {
        "group": {"table": [list(row) for row in pa.group.table]},
        "carrier": list(labels),
        "domains": {
            str(g): [label_of[x] for x in sorted(pa.domain(g))]
            for g in pa.group.elements()
        },
        "maps": {
            str(g): sorted(
                ([label_of[x], label_of[y]] for x, y in pa.maps[g].items()),
                key=lambda e: str(e[0]),
            )
            for g in pa.group.elements()
        },
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def instance_digest(pa: PartialAction) -> str:
    return hashlib.sha256(serialize_instance(pa).encode()).hexdigest()


def _frac_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _dim_json(value):
    return "infinity" if value == math.inf else int(value)


def _certificate_payload(cert: TowerCertificate) -> dict:
    return {
        "d": cert.d,
        "levels": [
            {str(x): _frac_str(v) for x, v in sorted(level.items())}
            for level in cert.levels
        ],
    }


def _nonexistence_payload(proof: NonexistenceProof) -> dict:
    return {
        "d": proof.d,
        "exhaustive": proof.exhaustive,
        "orbits": [
            {
                "points": list(ev.orbit),
                "parallelSources": list(ev.parallel_sources),
                "supports": ev.supports_found,
                "patterns": ev.patterns_checked,
                "note": ev.note,
            }
            for ev in proof.evidence
        ],
    }


def analyze(pa: PartialAction, seed: int = 0, budget: int = DEFAULT_BUDGET) -> dict:
    """The full report: every analysis section, budget overruns distinguished."""
    gr = translation_groupoid(pa)
    strata = stratification(pa)
    tuple_sizes = {len(pa.domain_tuple(x)) for x in pa.carrier}
    decomposable_n = tuple_sizes.pop() if len(tuple_sizes) == 1 else None
    report: dict = {
        "schemaVersion": SCHEMA_VERSION,
        "toolVersion": __version__,
        "instanceDigest": instance_digest(pa),
        "seeds": {"blockStructure": seed},
        "group": {"name": pa.group.name, "order": pa.group.order},
        "carrierSize": pa.size(),
        "freeness": {
            "free": is_free(pa),
            "witness": list(freeness_witness(pa)) if freeness_witness(pa) else None,
        },
        "orbits": {
            "count": len(gr.orbits),
            "sizes": sorted(len(o) for o in gr.orbits),
            "stabilizerOrders": sorted(s.order for s in gr.stabilizers.values()),
        },
        "strata": {str(k): len(strata.stratum(k)) for k in range(1, pa.group.order + 1)},
        "decomposability": {"n": decomposable_n},
    }
    try:
        rok = rokhlin_dimension(pa, budget=budget)
        report["rokhlin"] = {
            "dimension": _dim_json(rok.dimension),
            "commutingTowers": _dim_json(rok.commuting_dimension),
            "certificate": _certificate_payload(rok.certificate) if rok.certificate else None,
            "budget": {"exceeded": False, "limit": budget},
        }
    except SearchBudgetExceeded as err:
        report["rokhlin"] = {
            "dimension": "unknown",
            "commutingTowers": "unknown",
            "certificate": None,
            "budget": {
                "exceeded": True,
                "limit": budget,
                "explored": err.explored,
                "orbit": sorted(err.orbit),
            },
        }
    cp = crossed_product(pa)
    numeric = block_structure_full(cp, seed=seed)
    combinatorial = crossed_product_blocks_combinatorial(pa)
    if numeric.algebra != combinatorial:
        raise AssertionError(
            f"block routes disagree: {numeric.algebra.blocks} vs {combinatorial.blocks}"
        )
    fp = fixed_point_algebra(pa)
    bimodule = imprimitivity_bimodule_verify(pa, seed=seed)
    report["crossedProduct"] = {
        "dimension": cp.dimension,
        "blocks": list(numeric.algebra.blocks),
        "blocksCombinatorial": list(combinatorial.blocks),
        "integralityResidual": numeric.integrality_residual,
    }
    report["fixedPoint"] = {"blocks": list(fp.blocks)}
    report["morita"] = {
        "equivalent": morita_equivalent(fp, numeric.algebra),
        "hypothesisFinite": report["rokhlin"]["dimension"] not in ("infinity", "unknown"),
        "bimodule": {
            **{k: v for k, v in bimodule.clauses.items()},
            "spanDimension": bimodule.span_dimension,
            "algebraDimension": bimodule.algebra_dimension,
        },
    }
    glob = globalize(pa)
    split = central_splitting(glob)
    report["globalization"] = {
        "envelopeSize": glob.envelope.size(),
        "splittingSizes": {str(g): len(split[g]) for g in pa.group.elements()},
    }
    return report


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _read_instance(path: str) -> PartialAction:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _cmd_validate(args) -> int:
    pa = _read_instance(args.instance)
    _emit({"valid": True, "instanceDigest": instance_digest(pa), "carrierSize": pa.size()})
    return 0


def _cmd_analyze(args) -> int:
    pa = _read_instance(args.instance)
    _emit(analyze(pa, seed=args.seed, budget=args.budget))
    return 0


def _cmd_towers(args) -> int:
    pa = _read_instance(args.instance)
    outcome = towers_exist(pa, args.d, budget=args.budget)
    if isinstance(outcome, TowerCertificate):
        _emit({"exists": True, "certificate": _certificate_payload(outcome)})
    else:
        _emit({"exists": False, "nonexistence": _nonexistence_payload(outcome)})
    return 0


def _cmd_globalize(args) -> int:
    pa = _read_instance(args.instance)
    result = globalize(pa)
    split = central_splitting(result)
    _emit(
        {
            "instanceDigest": instance_digest(pa),
            "envelopeSize": result.envelope.size(),
            "embedding": {str(x): y for x, y in sorted(result.embedding.items())},
            "splitting": {str(g): sorted(split[g]) for g in pa.group.elements()},
        }
    )
    return 0


def _cmd_decompose(args) -> int:
    pa = _read_instance(args.instance)
    strata = stratification(pa)
    payload = {
        "instanceDigest": instance_digest(pa),
        "strata": {str(k): sorted(strata.stratum(k)) for k in range(1, pa.group.order + 1)},
        "parts": None,
    }
    sizes = {len(pa.domain_tuple(x)) for x in pa.carrier}
    if len(sizes) == 1:
        n = sizes.pop()
        parts = orbit_type_decomposition(pa, n)
        payload["parts"] = [
            {
                "orbitClass": p.orbit_class,
                "representativeTuple": sorted(p.representative),
                "points": sorted(p.part),
                "stabilizerOrder": p.stabilizer.order,
                "subsystemCarrier": sorted(p.carrier_X_tau),
            }
            for p in parts
        ]
        payload["decomposableN"] = n
    _emit(payload)
    return 0


def _cmd_grid(args) -> int:
    from fractions import Fraction as F

    from .gridtowers import (
        interval_half_shift,
        punctured_circle_pair,
        punctured_circle_pair_global,
        residual,
        search_towers,
        witness_bound,
    )

    if args.model == "interval":
        delta = F(args.delta) if args.delta else F(1, 8)
        ga, towers, family = interval_half_shift(delta, args.m)
        res = residual(ga, towers, family)
        bound = witness_bound(ga, family, delta)
        payload = {
            "model": "interval",
            "m": args.m,
            "delta": _frac_str(delta),
            "displayedTowersResidual": _frac_str(res),
            "impliedBound": _frac_str(bound),
            "residualWithinBound": res <= bound,
        }
    elif args.model == "circle-pair-global":
        ga, towers = punctured_circle_pair_global(args.m)
        family = [{k: F(1) for k in ga.pa.carrier}]
        payload = {
            "model": "circle-pair-global",
            "m": args.m,
            "projectionResidual": _frac_str(residual(ga, towers, family)),
        }
    else:
        ga, family, eps = punctured_circle_pair(args.m, lipschitz=args.lipschitz)
        trace: list = []
        towers, best = search_towers(
            ga,
            family,
            F(args.eps) if args.eps else F(0),
            args.d,
            lipschitz=args.lipschitz,
            seed=args.seed,
            restarts=args.restarts,
            trace=trace,
        )
        payload = {
            "model": "circle-pair",
            "m": args.m,
            "d": args.d,
            "lipschitz": args.lipschitz,
            "restarts": args.restarts,
            "seed": args.seed,
            "bestResidual": _frac_str(best),
            "bestResidualFloat": float(best),
        }
        if args.trace:
            with open(args.trace, "w", encoding="utf-8") as fh:
                fh.write("restart\tresidual\tbest\n")
                for restart, res_f, best_f in trace:
                    fh.write(f"{restart}\t{res_f:.9g}\t{best_f:.9g}\n")
            payload["traceFile"] = args.trace
    _emit(payload)
    return 0


def _cmd_check(args) -> int:
    reports = run_all_checks(args.seed, count=args.count)
    _emit([r.to_payload() for r in reports])
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partact",
        description="Partial actions of finite groups on finite sets: analysis and certificates.",
    )
    parser.add_argument("--version", action="version", version=f"partact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Parse and validate an instance file.")
    p.add_argument("instance")
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("analyze", help="Full analysis report for an instance.")
    p.add_argument("instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("towers", help="Exact tower search at a fixed dimension.")
    p.add_argument("instance")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(fn=_cmd_towers)

    p = sub.add_parser("globalize", help="Enveloping action and central splitting.")
    p.add_argument("instance")
    p.set_defaults(fn=_cmd_globalize)

    p = sub.add_parser("decompose", help="Strata and orbit-type decomposition.")
    p.add_argument("instance")
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("grid", help="Grid-discretized tower models and search.")
    p.add_argument("model", choices=["interval", "circle-pair", "circle-pair-global"])
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--delta", type=str, default=None, help="for the interval model, e.g. 1/8")
    p.add_argument("--d", type=int, default=0)
    p.add_argument("--lipschitz", type=int, default=8)
    p.add_argument("--eps", type=str, default=None, help="early-stop residual target, e.g. 1/1000")
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", type=str, default=None, help="write a tab-separated residual trace")
    p.set_defaults(fn=_cmd_grid)

    p = sub.add_parser("check", help="Run the six theorem-check suites.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(fn=_cmd_check)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ValidationError, PartialActionError, GroupError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SearchBudgetExceeded as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
