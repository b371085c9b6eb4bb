"""Exact arithmetic for truncated universal Novikov series.

An element is a finite sum of terms ``a * zeta^j * T^lam * e^(mu/2)`` where

* ``lam`` is an exact rational energy exponent (the formal variable ``T``),
* ``mu`` is an integer degree exponent (odd ``mu`` means a genuine
  half-integer power of ``e``),
* ``a * zeta^j`` is an element of the group ring ``Q[Z/N]``, ``zeta`` a
  formal N-th root of unity subject only to ``zeta^N = 1``.

Every series carries an energy cutoff: terms with ``lam >= cutoff`` are
dropped and the series is understood modulo that filtration level.  A
cutoff of ``None`` means no truncation.  Series are immutable; all
operations return new objects.

The valuation ``v`` of a series is the smallest energy exponent of a
nonzero term (``+inf`` for zero).  For ``N = 1`` the coefficients form a
field and ``v`` is multiplicative; for ``N > 1`` the group ring has zero
divisors and only ``v(x*y) >= v(x) + v(y)`` holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Union

RationalLike = Union[int, str, Fraction]

INF = math.inf


class OrderMismatchError(ValueError):
    """Operands live in group rings of different orders."""


class ExponentLatticeError(ValueError):
    """An energy exponent does not lie in the required (1/N)Z lattice."""


def as_fraction(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


def frac_str(q: Fraction) -> str:
    """Canonical 'p/q' form, lowest terms, q > 0 (integers as 'p/1')."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class ExponentPair(NamedTuple):
    """Energy/degree exponent pair of one term: T^lam * e^(mu/2)."""

    lam: Fraction
    mu: int


@dataclass(frozen=True)
class GroupRingCoeff:
    """Element sum_j a_j zeta^j of Q[Z/N], canonical: keys in [0, N), no zeros."""

    order: int
    entries: tuple[tuple[int, Fraction], ...]

    @staticmethod
    def from_dict(order: int, d: Mapping[int, RationalLike]) -> "GroupRingCoeff":
        if order < 1:
            raise ValueError("group ring order must be positive")
        acc: dict[int, Fraction] = {}
        for j, a in d.items():
            a = as_fraction(a)
            if a == 0:
                continue
            j %= order
            acc[j] = acc.get(j, Fraction(0)) + a
        items = tuple(sorted((j, a) for j, a in acc.items() if a != 0))
        return GroupRingCoeff(order, items)

    @staticmethod
    def rational(a: RationalLike, order: int = 1) -> "GroupRingCoeff":
        return GroupRingCoeff.from_dict(order, {0: as_fraction(a)})

    @staticmethod
    def zeta(j: int, order: int) -> "GroupRingCoeff":
        return GroupRingCoeff.from_dict(order, {j: 1})

    def __bool__(self) -> bool:
        return bool(self.entries)

    def _check(self, other: "GroupRingCoeff") -> None:
        if self.order != other.order:
            raise OrderMismatchError(
                f"group ring orders differ: {self.order} vs {other.order}"
            )

    def __add__(self, other: "GroupRingCoeff") -> "GroupRingCoeff":
        self._check(other)
        d = dict(self.entries)
        for j, a in other.entries:
            d[j] = d.get(j, Fraction(0)) + a
        return GroupRingCoeff.from_dict(self.order, d)

    def __neg__(self) -> "GroupRingCoeff":
        return GroupRingCoeff(self.order, tuple((j, -a) for j, a in self.entries))

    def __sub__(self, other: "GroupRingCoeff") -> "GroupRingCoeff":
        return self + (-other)

    def __mul__(self, other: "GroupRingCoeff") -> "GroupRingCoeff":
        self._check(other)
        d: dict[int, Fraction] = {}
        for j, a in self.entries:
            for k, b in other.entries:
                jk = (j + k) % self.order
                d[jk] = d.get(jk, Fraction(0)) + a * b
        return GroupRingCoeff.from_dict(self.order, d)

    def scale(self, a: RationalLike) -> "GroupRingCoeff":
        a = as_fraction(a)
        return GroupRingCoeff.from_dict(
            self.order, {j: b * a for j, b in self.entries}
        )

    def shift(self, j: int) -> "GroupRingCoeff":
        """Multiply by zeta^j."""
        return GroupRingCoeff.from_dict(
            self.order, {(k + j) % self.order: a for k, a in self.entries}
        )

    def embed(self, new_order: int) -> "GroupRingCoeff":
        """Embed Q[Z/N] -> Q[Z/N'] via zeta_N -> zeta_N'^(N'/N); needs N | N'."""
        if new_order % self.order != 0:
            raise OrderMismatchError(
                f"{self.order} does not divide {new_order}"
            )
        step = new_order // self.order
        return GroupRingCoeff.from_dict(
            new_order, {j * step: a for j, a in self.entries}
        )

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.entries)


Cutoff = Optional[Fraction]


def _min_cutoff(a: Cutoff, b: Cutoff) -> Cutoff:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class NovikovSeries:
    """Finite canonical sum of (ExponentPair, GroupRingCoeff) terms.

    Terms are sorted by (lam, mu), carry no zero coefficients, and every
    lam is strictly below the cutoff (when one is set).
    """

    order: int
    terms: tuple[tuple[ExponentPair, GroupRingCoeff], ...]
    cutoff: Cutoff = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_terms(
        terms: Iterable[tuple[ExponentPair, GroupRingCoeff]],
        order: int = 1,
        cutoff: Cutoff = None,
    ) -> "NovikovSeries":
        acc: dict[ExponentPair, GroupRingCoeff] = {}
        for ep, c in terms:
            ep = ExponentPair(as_fraction(ep[0]), int(ep[1]))
            if c.order != order:
                raise OrderMismatchError(
                    f"coefficient order {c.order} != series order {order}"
                )
            if cutoff is not None and ep.lam >= cutoff:
                continue
            acc[ep] = acc[ep] + c if ep in acc else c
        items = tuple(
            (ep, c) for ep, c in sorted(acc.items(), key=lambda t: (t[0].lam, t[0].mu)) if c
        )
        return NovikovSeries(order, items, cutoff)

    @staticmethod
    def zero(order: int = 1, cutoff: Cutoff = None) -> "NovikovSeries":
        return NovikovSeries(order, (), cutoff)

    @staticmethod
    def monomial(
        coeff: RationalLike | GroupRingCoeff,
        lam: RationalLike = 0,
        mu: int = 0,
        order: int = 1,
        cutoff: Cutoff = None,
    ) -> "NovikovSeries":
        if not isinstance(coeff, GroupRingCoeff):
            coeff = GroupRingCoeff.rational(coeff, order)
        return NovikovSeries.from_terms(
            [(ExponentPair(as_fraction(lam), mu), coeff)], coeff.order, cutoff
        )

    @staticmethod
    def one(order: int = 1, cutoff: Cutoff = None) -> "NovikovSeries":
        return NovikovSeries.monomial(1, 0, 0, order, cutoff)

    # -- ring structure ----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check(self, other: "NovikovSeries") -> None:
        if self.order != other.order:
            raise OrderMismatchError(
                f"series orders differ: {self.order} vs {other.order};"
                " embed into the lcm order first"
            )

    def __add__(self, other: "NovikovSeries") -> "NovikovSeries":
        self._check(other)
        cut = _min_cutoff(self.cutoff, other.cutoff)
        return NovikovSeries.from_terms(
            list(self.terms) + list(other.terms), self.order, cut
        )

    def __neg__(self) -> "NovikovSeries":
        return NovikovSeries(
            self.order, tuple((ep, -c) for ep, c in self.terms), self.cutoff
        )

    def __sub__(self, other: "NovikovSeries") -> "NovikovSeries":
        return self + (-other)

    def __mul__(self, other: "NovikovSeries") -> "NovikovSeries":
        self._check(other)
        cut = _min_cutoff(self.cutoff, other.cutoff)
        out: list[tuple[ExponentPair, GroupRingCoeff]] = []
        for ep1, c1 in self.terms:
            for ep2, c2 in other.terms:
                lam = ep1.lam + ep2.lam
                if cut is not None and lam >= cut:
                    continue
                out.append((ExponentPair(lam, ep1.mu + ep2.mu), c1 * c2))
        return NovikovSeries.from_terms(out, self.order, cut)

    def scale(self, a: RationalLike) -> "NovikovSeries":
        return NovikovSeries.from_terms(
            ((ep, c.scale(a)) for ep, c in self.terms), self.order, self.cutoff
        )

    def truncate(self, cutoff: Cutoff) -> "NovikovSeries":
        cut = _min_cutoff(self.cutoff, None if cutoff is None else as_fraction(cutoff))
        return NovikovSeries.from_terms(self.terms, self.order, cut)

    # -- structure queries --------------------------------------------------

    def valuation(self) -> Fraction | float:
        """inf of energy exponents of nonzero terms; +inf for the zero series."""
        if not self.terms:
            return INF
        return min(ep.lam for ep, _ in self.terms)

    def coefficient(self, lam: RationalLike, mu: int) -> GroupRingCoeff:
        key = ExponentPair(as_fraction(lam), mu)
        for ep, c in self.terms:
            if ep == key:
                return c
        return GroupRingCoeff.from_dict(self.order, {})

    def is_in_lambda0(self) -> bool:
        return all(ep.lam >= 0 for ep, _ in self.terms)

    def embed_order(self, new_order: int) -> "NovikovSeries":
        return NovikovSeries.from_terms(
            ((ep, c.embed(new_order)) for ep, c in self.terms),
            new_order,
            self.cutoff,
        )


@dataclass(frozen=True)
class SubringReport:
    """Membership flags of a series in the named coefficient subrings."""

    in_lambda0: bool
    in_z_over_n: bool
    degree_parity: str  # "even" | "odd" | "mixed" | "empty"


def subring_report(x: NovikovSeries, n: int) -> SubringReport:
    """Flags: all lam >= 0; all lam in (1/n)Z; parity of the e-exponents."""
    in_l0 = x.is_in_lambda0()
    in_zn = all((ep.lam * n).denominator == 1 for ep, _ in x.terms)
    mus = {ep.mu % 2 for ep, _ in x.terms}
    if not mus:
        parity = "empty"
    elif mus == {0}:
        parity = "even"
    elif mus == {1}:
        parity = "odd"
    else:
        parity = "mixed"
    return SubringReport(in_l0, in_zn, parity)


def galois(x: NovikovSeries, j: int, n: int) -> NovikovSeries:
    """Ring automorphism T^(1/n) -> zeta_n^j T^(1/n).

    A term a zeta^m T^q maps to a zeta^(m + j*n*q) T^q; requires every
    energy exponent q of x to lie in (1/n)Z.  The result lives in the
    group ring of order lcm(x.order, n).
    """
    new_order = math.lcm(x.order, n)
    step = new_order // n
    out = []
    for ep, c in x.terms:
        nq = ep.lam * n
        if nq.denominator != 1:
            raise ExponentLatticeError(
                f"exponent {ep.lam} is not in (1/{n})Z"
            )
        shift = (j * int(nq) * step) % new_order
        out.append((ep, c.embed(new_order).shift(shift)))
    return NovikovSeries.from_terms(out, new_order, x.cutoff)


def embed_order(x: NovikovSeries, new_order: int) -> NovikovSeries:
    """Value-preserving embedding zeta_N -> zeta_N'^(N'/N); needs N | N'."""
    return x.embed_order(new_order)


# -- serialization -----------------------------------------------------------


def coeff_to_json(c: GroupRingCoeff) -> dict[str, str]:
    return {str(j): frac_str(a) for j, a in c.entries}


def series_to_json(x: NovikovSeries) -> list[dict]:
    """The wire format: array of {"lambda": "p/q", "mu": m, "coeff": {...}}."""
    return [
        {"lambda": frac_str(ep.lam), "mu": ep.mu, "coeff": coeff_to_json(c)}
        for ep, c in x.terms
    ]


def series_to_obj(x: NovikovSeries) -> dict:
    """Full-fidelity wrapper carrying order and cutoff alongside the terms."""
    return {
        "order": x.order,
        "cutoff": None if x.cutoff is None else frac_str(x.cutoff),
        "terms": series_to_json(x),
    }


def series_from_obj(obj: Mapping) -> NovikovSeries:
    order = int(obj.get("order", 1))
    cut = obj.get("cutoff")
    cutoff = None if cut is None else as_fraction(cut)
    terms = []
    for t in obj["terms"]:
        ep = ExponentPair(as_fraction(t["lambda"]), int(t["mu"]))
        c = GroupRingCoeff.from_dict(
            order, {int(j): as_fraction(a) for j, a in t["coeff"].items()}
        )
        terms.append((ep, c))
    return NovikovSeries.from_terms(terms, order, cutoff)


def series_repr(x: NovikovSeries) -> str:
    """Human-readable rendering, e.g. '1 + 2*T^1/2 + 2*T^2'."""
    if not x.terms:
        return "0"
    rendered = []
    for ep, c in x.terms:
        negate = False
        if len(c.entries) == 1 and c.entries[0][0] == 0:
            value = c.entries[0][1]
            negate = value < 0
            coeff = str(abs(value))
        else:
            coeff = "(" + " + ".join(
                (f"{a}" if j == 0 else f"{a}*z^{j}") for j, a in c.entries
            ) + ")"
        factors = [] if coeff == "1" else [coeff]
        if ep.lam != 0:
            factors.append(f"T^{ep.lam}")
        if ep.mu != 0:
            factors.append(f"e^{Fraction(ep.mu, 2)}")
        rendered.append(("-" if negate else "+", "*".join(factors) if factors else "1"))
    sign, head = rendered[0]
    text = ("-" if sign == "-" else "") + head
    for sign, part in rendered[1:]:
        text += f" {sign} {part}"
    return text
