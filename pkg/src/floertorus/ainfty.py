"""Abstract filtered A-infinity bookkeeping over Novikov coefficients.

A structure is a finite graded basis with rational filtration levels
(actions) and arity-indexed multilinear operation tables valued in
truncated Novikov series.  Inputs of an arity-k operation are written in
the order (x_k, ..., x_1), matching the usual right-to-left composition
m_k(x_k, ..., x_1).

The defect of the quadratic relation is computed literally as

    sum over k1 + k2 = k + 1 and placements i of
    (-1)^(i + deg x_k + ... + deg x_(k-i)) m_k1(x_k, ..., m_k2(block), ..., x_1)

where the block is (x_(k-i-1), ..., x_(k-i-k2)) and i runs from the -1
boundary placement through the last in-range placement.  This sign equals
minus the shifted-degree Koszul sign of the coderivation composition; the
two are implemented independently and compared in the tests.  An empty
defect map means the relation holds modulo the cutoff filtration level.

Deformation by an element b of positive valuation inserts arbitrarily many
copies of b between the inputs; b is assumed to sit in (unshifted) degree
one, so the insertions contribute no Koszul signs.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .novikov import (
    Cutoff,
    NovikovSeries,
    as_fraction,
    frac_str,
    series_from_obj,
    series_to_obj,
)

INF = math.inf


class NonpositiveValuationError(ValueError):
    """A deformation element must have strictly positive valuation."""


@dataclass(frozen=True)
class BasisElement:
    id: str
    degree: int
    action: Fraction = Fraction(0)


OpEntry = dict[str, NovikovSeries]  # output id -> coefficient
OpTable = dict[tuple[str, ...], OpEntry]


@dataclass
class AInftyStructure:
    """Finite basis plus one operation table per arity present (k >= 0)."""

    basis: dict[str, BasisElement]
    ops: dict[int, OpTable]
    cutoff: Cutoff = None
    order: int = 1

    @staticmethod
    def build(
        basis: Sequence[BasisElement],
        ops: Mapping[int, Mapping[tuple[str, ...], Mapping[str, NovikovSeries]]],
        cutoff: Cutoff = None,
        order: int = 1,
    ) -> "AInftyStructure":
        bmap: dict[str, BasisElement] = {}
        for el in basis:
            if el.id in bmap:
                raise ValueError(f"duplicate basis id {el.id!r}")
            bmap[el.id] = el
        tables: dict[int, OpTable] = {}
        for k, table in ops.items():
            out_table: OpTable = {}
            for inputs, entry in table.items():
                if len(inputs) != k:
                    raise ValueError(f"arity-{k} entry with {len(inputs)} inputs")
                for name in tuple(inputs) + tuple(entry):
                    if name not in bmap:
                        raise ValueError(f"unknown basis id {name!r}")
                clean = {
                    out: c.truncate(cutoff)
                    for out, c in entry.items()
                    if c.truncate(cutoff)
                }
                if clean:
                    out_table[tuple(inputs)] = clean
            if out_table:
                tables[k] = out_table
        return AInftyStructure(bmap, tables, cutoff, order)

    def op(self, k: int, inputs: tuple[str, ...]) -> OpEntry:
        return self.ops.get(k, {}).get(inputs, {})

    def degree(self, name: str) -> int:
        return self.basis[name].degree

    def arities(self) -> list[int]:
        return sorted(self.ops)

    def zero_series(self) -> NovikovSeries:
        return NovikovSeries.zero(self.order, self.cutoff)


def shifted_degree(elements: Sequence[BasisElement]) -> int:
    """Shifted degree of a bar-complex tensor: sum of degrees minus length."""
    return sum(el.degree for el in elements) - len(elements)


def _add_into(acc: dict, key, series: NovikovSeries) -> None:
    if key in acc:
        series = acc[key] + series
    if series:
        acc[key] = series
    else:
        acc.pop(key, None)


@dataclass(frozen=True)
class ResidualReport:
    """Defect of the quadratic relation per (input tuple, output id)."""

    entries: dict[tuple[tuple[str, ...], str], NovikovSeries]
    missing_arities: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.entries


def _residual_on_tuple(
    s: AInftyStructure, inputs: tuple[str, ...], sign_flip: bool = False
) -> dict[str, NovikovSeries]:
    """Signed double-composition sum on one input tuple (x_k, ..., x_1)."""
    k = len(inputs)
    acc: dict[str, NovikovSeries] = {}
    for k2 in range(0, k + 1):
        k1 = k + 1 - k2
        if k2 not in s.ops or (k1 not in s.ops and k1 != 0):
            continue
        for i in range(-1, k - k2):
            block = inputs[i + 1 : i + 1 + k2]
            sign = i + sum(s.degree(x) for x in inputs[: i + 1])
            if sign_flip:
                sign += i  # corrupted placement parity, for the sign guard
            unit = -1 if sign % 2 else 1
            for mid, c_in in s.op(k2, block).items():
                outer = inputs[: i + 1] + (mid,) + inputs[i + 1 + k2 :]
                for out, c_out in s.op(k1, outer).items():
                    _add_into(acc, out, (c_in * c_out).scale(unit))
    return acc


def ainfty_residual(
    s: AInftyStructure, max_arity: int, sign_flip: bool = False
) -> ResidualReport:
    """Quadratic-relation defect for every input tuple up to max_arity.

    Arities with no table are treated as the zero map and reported.  The
    optional sign_flip corrupts the placement parity of the sign rule; a
    structure that genuinely satisfies the relation through cancellation
    must fail under the corruption.
    """
    entries: dict[tuple[tuple[str, ...], str], NovikovSeries] = {}
    ids = sorted(s.basis)
    present = set(s.ops)
    needed = set(range(0, max_arity + 2))
    missing = tuple(sorted(needed - present))
    for k in range(1, max_arity + 1):
        for inputs in itertools.product(ids, repeat=k):
            for out, series in _residual_on_tuple(s, inputs, sign_flip).items():
                _add_into(entries, (inputs, out), series)
    return ResidualReport(entries, missing)


def _coderivation_apply(
    s: AInftyStructure, tensor: tuple[str, ...]
) -> dict[tuple[str, ...], NovikovSeries]:
    """One application of the coderivation sum_k m_hat_k with shifted Koszul signs."""
    out: dict[tuple[str, ...], NovikovSeries] = {}
    n = len(tensor)
    for k2 in s.arities():
        if k2 > n:
            continue
        for start in range(0, n - k2 + 1):
            left = tensor[:start]
            block = tensor[start : start + k2]
            right = tensor[start + k2 :]
            koszul = sum(s.degree(x) - 1 for x in left)
            unit = -1 if koszul % 2 else 1
            for mid, c in s.op(k2, block).items():
                _add_into(out, left + (mid,) + right, c.scale(unit))
    return out


def ainfty_residual_coderivation(
    s: AInftyStructure, max_arity: int
) -> ResidualReport:
    """Length-one component of d(d(tensor)) via generic coderivation extension.

    Independent implementation of the same defect, up to one global sign:
    ainfty_residual equals minus this map, termwise.
    """
    entries: dict[tuple[tuple[str, ...], str], NovikovSeries] = {}
    ids = sorted(s.basis)
    for k in range(1, max_arity + 1):
        for inputs in itertools.product(ids, repeat=k):
            first = _coderivation_apply(s, inputs)
            for mid_tensor, c1 in first.items():
                second = _coderivation_apply(s, mid_tensor)
                for out_tensor, c2 in second.items():
                    if len(out_tensor) != 1:
                        continue
                    _add_into(entries, (inputs, out_tensor[0]), c1 * c2)
    return ResidualReport(entries, ())


Element = dict[str, NovikovSeries]  # formal combination of basis elements


def _check_positive_valuation(s: AInftyStructure, b: Element) -> None:
    for name, series in b.items():
        if name not in s.basis:
            raise ValueError(f"unknown basis id {name!r}")
        if series and series.valuation() <= 0:
            raise NonpositiveValuationError(
                f"coefficient of {name!r} has valuation {series.valuation()} <= 0"
            )


def mc_residual(s: AInftyStructure, b: Element) -> Element:
    """The curvature sum_k m_k(b, ..., b) of the deformation candidate b.

    Requires every coefficient of b to have positive valuation, which makes
    the sum finite below the cutoff.  An empty result means b solves the
    deformation equation modulo the cutoff.
    """
    _check_positive_valuation(s, b)
    acc: Element = {}
    for k in s.arities():
        for inputs, entry in s.ops[k].items():
            weight: Optional[NovikovSeries] = None
            for name in inputs:
                c = b.get(name)
                if c is None or not c:
                    weight = None
                    break
                weight = c if weight is None else weight * c
            if k == 0:
                weight = NovikovSeries.one(s.order, s.cutoff)
            if weight is None:
                continue
            for out, c_out in entry.items():
                _add_into(acc, out, c_out * weight)
    return acc


def deform(s: AInftyStructure, b: Element) -> AInftyStructure:
    """Deformed structure with operations m_k^b = m(e^b, x_k, e^b, ..., x_1, e^b).

    Every way of marking table inputs as b-insertions contributes the
    original coefficient times the product of the marked b-coefficients.
    Deforming by the empty element returns an identical structure, and the
    deformed arity-zero term is exactly the deformation-equation residual.
    """
    _check_positive_valuation(s, b)
    new_ops: dict[int, dict[tuple[str, ...], dict[str, NovikovSeries]]] = {}
    for k, table in s.ops.items():
        for inputs, entry in table.items():
            for mask in itertools.product((False, True), repeat=k):
                weight: Optional[NovikovSeries] = None
                keep: list[str] = []
                ok = True
                for name, marked in zip(inputs, mask):
                    if not marked:
                        keep.append(name)
                        continue
                    c = b.get(name)
                    if c is None or not c:
                        ok = False
                        break
                    weight = c if weight is None else weight * c
                if not ok:
                    continue
                new_k = len(keep)
                target = new_ops.setdefault(new_k, {}).setdefault(tuple(keep), {})
                for out, c_out in entry.items():
                    c = c_out if weight is None else c_out * weight
                    _add_into(target, out, c)
    return AInftyStructure.build(
        list(s.basis.values()), new_ops, s.cutoff, s.order
    )


@dataclass(frozen=True)
class FiltrationViolation:
    arity: int
    inputs: tuple[str, ...]
    output: str
    margin: Fraction | float  # v(coeff) + action(out) - sum action(in), < 0


@dataclass(frozen=True)
class FiltrationReport:
    checked: int
    violations: tuple[FiltrationViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def filtration_check(s: AInftyStructure) -> FiltrationReport:
    """Verify v(coeff) + action(out) >= sum action(in) for every table entry."""
    checked = 0
    bad: list[FiltrationViolation] = []
    for k, table in s.ops.items():
        for inputs, entry in table.items():
            lhs = sum((s.basis[x].action for x in inputs), Fraction(0))
            for out, c in entry.items():
                checked += 1
                margin = c.valuation() + s.basis[out].action - lhs
                if margin < 0:
                    bad.append(FiltrationViolation(k, inputs, out, margin))
    return FiltrationReport(checked, tuple(bad))


# -- structure file format ----------------------------------------------------


def structure_to_obj(s: AInftyStructure) -> dict:
    ops = []
    for k in sorted(s.ops):
        for inputs in sorted(s.ops[k]):
            entry = s.ops[k][inputs]
            ops.append(
                {
                    "arity": k,
                    "inputs": list(inputs),
                    "outputs": [
                        {"id": out, "coeff": series_to_obj(entry[out])}
                        for out in sorted(entry)
                    ],
                }
            )
    return {
        "schema": 1,
        "order": s.order,
        "cutoff": None if s.cutoff is None else frac_str(s.cutoff),
        "basis": [
            {
                "id": el.id,
                "degree": el.degree,
                "action": frac_str(el.action),
            }
            for el in sorted(s.basis.values(), key=lambda e: e.id)
        ],
        "ops": ops,
    }


def structure_from_obj(obj: Mapping) -> AInftyStructure:
    cutoff = None if obj.get("cutoff") is None else as_fraction(obj["cutoff"])
    order = int(obj.get("order", 1))
    basis = [
        BasisElement(e["id"], int(e["degree"]), as_fraction(e["action"]))
        for e in obj["basis"]
    ]
    ops: dict[int, dict[tuple[str, ...], dict[str, NovikovSeries]]] = {}
    for entry in obj["ops"]:
        k = int(entry["arity"])
        inputs = tuple(entry["inputs"])
        target = ops.setdefault(k, {}).setdefault(inputs, {})
        for out in entry["outputs"]:
            target[out["id"]] = series_from_obj(out["coeff"])
    return AInftyStructure.build(basis, ops, cutoff, order)


def structure_to_json(s: AInftyStructure) -> str:
    return json.dumps(structure_to_obj(s), sort_keys=True, indent=2)


def structure_from_json(text: str) -> AInftyStructure:
    return structure_from_obj(json.loads(text))
