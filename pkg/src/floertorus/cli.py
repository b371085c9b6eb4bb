"""Batch front door: ingest TOML configurations, emit deterministic JSON.

Exit codes: 0 on success, 1 when a verification suite reports failures,
2 on malformed input.  Output JSON has stable key order and renders every
rational as a "p/q" string; no floating point appears in any artifact.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import ainfty, reduce as reduction, torus
from .ainfty import AInftyStructure, BasisElement
from .config import ConfigError, Setup, load_setup
from .novikov import NovikovSeries, as_fraction, frac_str, series_repr, series_to_obj
from .torus import AnchoredLag, ParallelDirectionsError, Point
from .utils import pmap

COMMANDS = (
    "intersections",
    "pair",
    "product",
    "verify",
    "reduce",
    "galois",
    "ainfty-check",
    "export-ainfty",
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    config_path: Optional[str]
    cutoff: Fraction
    anchored: bool
    n: Optional[int]
    output: Optional[str]
    indices: Optional[tuple[int, ...]]
    structure_path: Optional[str]
    max_arity: int


class InputError(ValueError):
    """Bad request at the command level (exit code 2)."""


def _point_json(p: Point) -> list[str]:
    return [frac_str(p[0]), frac_str(p[1])]


def _generator_json(g: torus.Generator) -> dict:
    return {
        "point": _point_json(g.point),
        "lift": _point_json(g.lift),
        "action": frac_str(g.action),
        "degree": g.degree,
    }


def _pick(setup: Setup, indices: Sequence[int], count: int) -> list[AnchoredLag]:
    anchored = setup.anchored()
    if indices:
        if len(indices) != count:
            raise InputError(f"expected {count} indices, got {len(indices)}")
    else:
        indices = tuple(range(count))
    try:
        return [anchored[i] for i in indices]
    except IndexError as exc:
        raise InputError(
            f"index out of range: {indices} with {len(anchored)} Lagrangians"
        ) from exc


# -- the directed structure export ---------------------------------------------


def pair_id(i: int, j: int) -> str:
    return f"x{j}_{i}"


def export_ainfty(setup: Setup, cutoff: Fraction) -> AInftyStructure:
    """Directed anchored structure: one generator per pair i < j, and the
    triangle product for every orientation-compatible chain i < j < k."""
    anchored = setup.anchored()
    if len(anchored) < 3:
        raise InputError("export needs at least 3 Lagrangians in anchored mode")
    basis: list[BasisElement] = []
    n = len(anchored)
    for i in range(n):
        for j in range(i + 1, n):
            try:
                gen = torus.admissible_generator(
                    (anchored[i], anchored[j]), setup.base
                )
            except ParallelDirectionsError:
                continue
            basis.append(BasisElement(pair_id(i, j), gen.degree, gen.action))
    known = {el.id for el in basis}
    ops: dict[int, dict[tuple[str, ...], dict[str, NovikovSeries]]] = {2: {}}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                names = (pair_id(j, k), pair_id(i, j), pair_id(i, k))
                if not all(name in known for name in names):
                    continue
                table = torus.m2_anchored(
                    (anchored[i], anchored[j], anchored[k]), cutoff, setup.base
                )
                for (_, _, _), series in table.items():
                    ops[2][(names[0], names[1])] = {names[2]: series}
    if not ops[2]:
        del ops[2]
    return AInftyStructure.build(basis, ops, cutoff, order=1)


# -- verification suites --------------------------------------------------------


@dataclass
class Suite:
    name: str
    passed: int = 0
    violations: Optional[list] = None

    def __post_init__(self):
        if self.violations is None:
            self.violations = []

    def check(self, ok: bool, message: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.violations.append(message)

    def as_json(self) -> dict:
        return {
            "pass": self.passed,
            "fail": len(self.violations),
            "violations": list(self.violations),
        }


def _transverse_pairs(setup: Setup):
    anchored = setup.anchored()
    for i in range(len(anchored)):
        for j in range(len(anchored)):
            if i == j:
                continue
            a, b = anchored[i], anchored[j]
            if (
                a.lagrangian.direction[0] * b.lagrangian.direction[1]
                - b.lagrangian.direction[0] * a.lagrangian.direction[1]
            ):
                yield (i, j), (a, b)


def _directed_triples(setup: Setup):
    anchored = setup.anchored()
    n = len(anchored)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                triple = (anchored[i], anchored[j], anchored[k])
                lags = [al.lagrangian for al in triple]
                dets = [
                    lags[a].direction[0] * lags[b].direction[1]
                    - lags[b].direction[0] * lags[a].direction[1]
                    for a, b in ((0, 1), (1, 2), (0, 2))
                ]
                if all(dets):
                    yield (i, j, k), triple


def run_verify(setup: Setup, cutoff: Fraction) -> dict:
    suites: dict[str, Suite] = {}

    def suite(name: str) -> Suite:
        return suites.setdefault(name, Suite(name))

    adm = suite("admissibility_partition")
    for (i, j), (a, b) in _transverse_pairs(setup):
        lags = (a.lagrangian, b.lagrangian)
        points = torus.intersections(*lags)
        det = abs(
            lags[0].direction[0] * lags[1].direction[1]
            - lags[1].direction[0] * lags[0].direction[1]
        )
        adm.check(
            len(points) == det,
            f"pair {(i, j)}: {len(points)} intersections, determinant {det}",
        )
        covered = set()
        for du in range(det):
            for dv in range(det):
                moved = AnchoredLag(b.lagrangian, b.anchor.translated(du, dv))
                gen = torus.admissible_generator((a, moved), setup.base)
                covered.add(gen.point)
        adm.check(
            covered == set(points),
            f"pair {(i, j)}: deck translates cover {len(covered)} of {det} points",
        )

    dual = suite("degree_duality")
    grading = suite("grading_comparison")
    for (i, j), (a, b) in _transverse_pairs(setup):
        fwd = torus.admissible_generator((a, b), setup.base)
        rev = torus.admissible_generator((b, a), setup.base)
        dual.check(
            torus.maslov_morse_degree(fwd, (a, b))
            + torus.maslov_morse_degree(rev, (b, a))
            == 1,
            f"pair {(i, j)}: degree duality violated",
        )
        grading.check(
            fwd.degree
            == torus.seidel_degree(fwd.point, a.lagrangian, b.lagrangian),
            f"pair {(i, j)}: loop degree differs from crossing degree",
        )

    def run_triple(item):
        (i, j, k), triple = item
        rec = torus.anchored_triangle(triple, setup.base)
        results = []
        if rec.orientation_compatible:
            g10, g21, g20 = rec.generators
            results.append(
                (
                    "action_additivity",
                    g20.action == g10.action + g21.action + rec.area,
                    f"triple {(i, j, k)}: action additivity fails",
                )
            )
            results.append(
                (
                    "energy_positivity",
                    rec.signed_area >= 0,
                    f"triple {(i, j, k)}: counted class with negative energy",
                )
            )
            results.append(
                (
                    "degree_rule",
                    g20.degree == g10.degree + g21.degree,
                    f"triple {(i, j, k)}: degree rule fails",
                )
            )
            lags = tuple(al.lagrangian for al in triple)
            poly = torus.chain_polygonal_index(lags)
            results.append(
                (
                    "index_sum",
                    poly == -1 and poly == torus._strip_index_sum(triple),
                    f"triple {(i, j, k)}: polygonal index {poly}",
                )
            )
        for index in ("area", "maslov"):
            report = torus.abstract_index_check(
                index, [torus.SplitCase(triple)], setup.base
            )
            results.append(
                (
                    "abstract_index",
                    report.ok,
                    f"triple {(i, j, k)}: {report.violations}",
                )
            )
        return results

    for results in pmap(run_triple, list(_directed_triples(setup))):
        for name, ok, msg in results:
            suite(name).check(ok, msg)

    if len(setup.lagrangians) >= 3:
        structure = export_ainfty(setup, cutoff)
        filt = ainfty.filtration_check(structure)
        suite("filtration").check(
            filt.ok, f"filtration violations: {filt.violations}"
        )
        residual = ainfty.ainfty_residual(structure, max_arity=3)
        suite("ainfty_relation").check(
            residual.ok,
            f"{len(residual.entries)} nonzero residual entries",
        )
    return {name: s.as_json() for name, s in sorted(suites.items())}


# -- command handlers ------------------------------------------------------------


def _setup_for(rc: RunConfig) -> Setup:
    if not rc.config_path:
        raise InputError("this command requires --config")
    return load_setup(rc.config_path)


def _cmd_intersections(rc: RunConfig) -> dict:
    setup = _setup_for(rc)
    a, b = _pick(setup, rc.indices, 2)
    points = torus.intersections(a.lagrangian, b.lagrangian)
    return {"points": [_point_json(p) for p in points]}


def _cmd_pair(rc: RunConfig) -> dict:
    setup = _setup_for(rc)
    a, b = _pick(setup, rc.indices, 2)
    gen = torus.admissible_generator((a, b), setup.base)
    return {
        "generator": _generator_json(gen),
        "spectrum": [frac_str(v) for v in torus.spectrum((a, b), setup.base)],
    }


def _cmd_product(rc: RunConfig) -> dict:
    setup = _setup_for(rc)
    a, b, c = _pick(setup, rc.indices, 3)
    if rc.anchored:
        table = torus.m2_anchored((a, b, c), rc.cutoff, setup.base)
        entries = [
            {
                "inputs": [_generator_json(g21), _generator_json(g10)],
                "output": _generator_json(g20),
                "coeff": series_to_obj(series),
            }
            for (g21, g10, g20), series in table.items()
        ]
        return {"mode": "anchored", "entries": entries}
    rec = torus.anchored_triangle((a, b, c), setup.base)
    points = tuple((v[0] % 1, v[1] % 1) for v in rec.vertices)
    series = torus.m2_nonanchored(
        a.lagrangian, b.lagrangian, c.lagrangian,
        points[0], points[1], points[2], rc.cutoff,
    )
    return {
        "mode": "non-anchored",
        "points": {
            "p10": _point_json(points[0]),
            "p21": _point_json(points[1]),
            "p02": _point_json(points[2]),
        },
        "series": series_to_obj(series),
        "pretty": series_repr(series),
    }


def _cmd_verify(rc: RunConfig) -> dict:
    setup = _setup_for(rc)
    return {"suites": run_verify(setup, rc.cutoff)}


def _cmd_reduce(rc: RunConfig) -> dict:
    setup = _setup_for(rc)
    n = rc.n or max(
        (cfg.rationalization_n or 1 for cfg in setup.lagrangians), default=1
    )
    preq = reduction.Prequantum(setup.m_amb)
    report: dict = {"N": n, "m_amb": setup.m_amb, "lagrangians": [], "triples": []}
    anchored = setup.anchored()
    for i, al in enumerate(anchored):
        hol = reduction.holonomy(al.lagrangian, preq)
        bs = reduction.is_bs_n_rational(al.lagrangian, preq, n)
        report["lagrangians"].append(
            {
                "index": i,
                "holonomy": frac_str(hol),
                "bs_n_rational": bs.is_rational,
                "m_min": bs.m_min,
            }
        )
    if any(not entry["bs_n_rational"] for entry in report["lagrangians"]):
        return report
    sections = [
        reduction.Rationalization.from_anchor(al, n, setup.m_amb, setup.base)
        for al in anchored
    ]
    for (i, j, k), triple in _directed_triples(setup):
        rec = torus.anchored_triangle(triple, setup.base)
        if not rec.orientation_compatible:
            continue
        v10, v21, v02 = rec.vertices
        cs = (
            reduction.c_of_p(sections[i], sections[j], v10),
            reduction.c_of_p(sections[j], sections[k], v21),
            reduction.c_of_p(sections[k], sections[i], v02),
        )
        ep = reduction.e_prime(rec.area, cs, n)
        report["triples"].append(
            {
                "chain": [i, j, k],
                "area": frac_str(rec.area),
                "corner_cs": [frac_str(c) for c in cs],
                "e_prime": frac_str(ep.value),
                "in_lattice": ep.in_lattice,
            }
        )
    return report


def _cmd_galois(rc: RunConfig) -> dict:
    setup = _setup_for(rc)
    if rc.n is None:
        raise InputError("galois requires --N")
    if len(setup.lagrangians) < 3:
        raise InputError("galois requires at least 3 Lagrangians")
    anchored = setup.anchored()[:3]
    bundles = tuple(
        reduction.FlatBundle(al.lagrangian, cfg.bundle_holonomy or Fraction(0))
        for al, cfg in zip(anchored, setup.lagrangians[:3])
    )
    triple = reduction.RationalTriple(
        tuple(anchored), bundles, rc.n, reduction.Prequantum(setup.m_amb), setup.base
    )
    report = reduction.galois_equivariance_check(triple, rc.cutoff)
    return {
        "N": report.n,
        "m_amb": report.m_amb,
        "classes": report.classes,
        "twists_checked": report.twists_checked,
        "ok": report.ok,
        "violations": list(report.violations),
    }


def _cmd_ainfty_check(rc: RunConfig) -> dict:
    if rc.structure_path:
        with open(rc.structure_path) as handle:
            structure = ainfty.structure_from_json(handle.read())
    else:
        structure = export_ainfty(_setup_for(rc), rc.cutoff)
    residual = ainfty.ainfty_residual(structure, rc.max_arity)
    filt = ainfty.filtration_check(structure)
    entries = [
        {
            "inputs": list(inputs),
            "output": out,
            "coeff": series_to_obj(series),
        }
        for (inputs, out), series in sorted(residual.entries.items())
    ]
    return {
        "residual_empty": residual.ok,
        "missing_arities": list(residual.missing_arities),
        "residual_entries": entries,
        "filtration_ok": filt.ok,
    }


def _cmd_export_ainfty(rc: RunConfig) -> dict:
    structure = export_ainfty(_setup_for(rc), rc.cutoff)
    return ainfty.structure_to_obj(structure)


_HANDLERS = {
    "intersections": _cmd_intersections,
    "pair": _cmd_pair,
    "product": _cmd_product,
    "verify": _cmd_verify,
    "reduce": _cmd_reduce,
    "galois": _cmd_galois,
    "ainfty-check": _cmd_ainfty_check,
    "export-ainfty": _cmd_export_ainfty,
}


def run(rc: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns (exit status, JSON document)."""
    if rc.command not in _HANDLERS:
        raise InputError(f"unknown command {rc.command!r}")
    if rc.cutoff <= 0:
        raise InputError("cutoff must be positive")
    document = _HANDLERS[rc.command](rc)
    document = {"schema": 1, "command": rc.command, **document}
    status = 0
    if rc.command == "verify":
        if any(s["fail"] for s in document["suites"].values()):
            status = 1
    if rc.command == "galois" and not document["ok"]:
        status = 1
    if rc.command == "ainfty-check" and not (
        document["residual_empty"] and document["filtration_ok"]
    ):
        status = 1
    if rc.command == "reduce":
        bad = any(not t["in_lattice"] for t in document.get("triples", []))
        if bad or any(
            not entry["bs_n_rational"] for entry in document["lagrangians"]
        ):
            status = 1
    return status, document


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floer",
        description="Exact anchored Floer data for affine Lagrangians on T^2",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML configuration path")
        p.add_argument("--cutoff", default="8", help="energy cutoff, 'p/q'")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--anchored", dest="anchored", action="store_true")
        group.add_argument("--non-anchored", dest="anchored", action="store_false")
        p.set_defaults(anchored=True)
        p.add_argument("--N", dest="n", type=int, help="coefficient lattice order")
        p.add_argument("--json", dest="output", help="write the JSON document here")
        p.add_argument(
            "--indices",
            type=int,
            nargs="*",
            help="which configured Lagrangians to use",
        )
        p.add_argument("--structure", dest="structure_path",
                       help="A-infinity structure JSON (ainfty-check)")
        p.add_argument("--max-arity", dest="max_arity", type=int, default=3)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = RunConfig(
            command=args.command,
            config_path=args.config,
            cutoff=as_fraction(args.cutoff),
            anchored=args.anchored,
            n=args.n,
            output=args.output,
            indices=tuple(args.indices) if args.indices else None,
            structure_path=args.structure_path,
            max_arity=args.max_arity,
        )
        status, document = run(rc)
    except (ConfigError, InputError, ParallelDirectionsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(document, sort_keys=True, indent=2)
    if rc.output:
        with open(rc.output, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
