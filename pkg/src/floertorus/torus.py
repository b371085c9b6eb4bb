"""Anchored affine Lagrangians on the flat torus T^2 = R^2/Z^2, omega = dx^dy.

A Lagrangian is an affine closed geodesic ``{b x - a y = c}`` with primitive
integer direction (a, b), rational offset c, and an integer grading lift of
its angle.  An anchor is a homotopy class of path from a fixed base point,
encoded as a rational endpoint lift in the universal cover (pi_2(T^2) = 0, so
the lift determines the class) together with an optional piecewise-linear
representative used for action bookkeeping.

All the Floer-theoretic data computed here is exact:

* intersection points and admissible generators by rational 2x2 solves,
* actions as (negated) shoelace areas of the capping polygons,
* degrees by delegation to the Maslov winding engine,
* anchored and non-anchored triangle products by lattice enumeration.

Sign and orientation conventions are fixed once and locked by the golden
tests: a triangle chain is *counted* when its three lines, walked along the
boundary counterclockwise, appear in the cyclic side order (L1, L2, L0); the
action is minus the shoelace of the capping traversal, which makes the
product action-additive with a nonnegative area term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import maslov
from .maslov import AngleFrac, AngleLift, AnglePath, RatPiAngle, dir_angle, frac_cmp
from .novikov import NovikovSeries, RationalLike, as_fraction

Point = tuple[Fraction, Fraction]
ORIGIN: Point = (Fraction(0), Fraction(0))


class ParallelDirectionsError(ValueError):
    """Two Lagrangians share a direction where transversality is required."""


def pt(x: RationalLike, y: RationalLike) -> Point:
    return (as_fraction(x), as_fraction(y))


def shoelace(points: Sequence[Point]) -> Fraction:
    """Signed area of the closed polygon, counterclockwise positive."""
    total = Fraction(0)
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2


@dataclass(frozen=True)
class TorusLagrangian:
    """Affine line {b x - a y = c} on T^2 with a grading lift of its angle.

    The direction is normalized to the upper half plane and the offset is
    reduced mod 1, so equal submanifolds have equal canonical forms.
    """

    direction: tuple[int, int]
    offset: Fraction = Fraction(0)
    grading: int = 0

    def __post_init__(self):
        a, b = self.direction
        if (a, b) == (0, 0):
            raise ValueError("zero direction")
        if math.gcd(abs(a), abs(b)) != 1:
            raise ValueError(f"direction {(a, b)} is not primitive")
        c = as_fraction(self.offset)
        if b < 0 or (b == 0 and a < 0):
            a, b, c = -a, -b, -c
        object.__setattr__(self, "direction", (a, b))
        object.__setattr__(self, "offset", c % 1)

    @property
    def angle(self) -> AngleFrac:
        return dir_angle(*self.direction)

    @property
    def angle_lift(self) -> AngleLift:
        return AngleLift(self.angle, self.grading)

    def offset_of_point(self, p: Point) -> Fraction:
        a, b = self.direction
        return b * p[0] - a * p[1]

    def contains(self, p: Point) -> bool:
        return (self.offset_of_point(p) - self.offset) % 1 == 0

    def with_grading(self, k: int) -> "TorusLagrangian":
        return TorusLagrangian(self.direction, self.offset, k)


@dataclass(frozen=True)
class Anchor:
    """Universal-cover lift of the anchor endpoint, plus an optional PL path.

    The representative, when present, runs from the base lift to the
    endpoint and is listed with both endpoints included; homotopy classes
    of anchors are in bijection with endpoint lifts.
    """

    endpoint: Point
    representative: Optional[tuple[Point, ...]] = None

    def polyline(self, base: Point) -> tuple[Point, ...]:
        if self.representative is None:
            return (base, self.endpoint)
        rep = self.representative
        if rep[0] != base or rep[-1] != self.endpoint:
            raise ValueError("anchor representative must run from the base lift "
                             "to the anchor endpoint")
        return rep

    def translated(self, du: int, dv: int) -> "Anchor":
        x, y = self.endpoint
        return Anchor((x + du, y + dv))


@dataclass(frozen=True)
class AnchoredLag:
    lagrangian: TorusLagrangian
    anchor: Anchor

    def __post_init__(self):
        lag, p = self.lagrangian, self.anchor.endpoint
        if (lag.offset_of_point(p) - lag.offset) % 1 != 0:
            raise ValueError(
                f"anchor endpoint {p} does not lie on a lift of the Lagrangian"
            )


@dataclass(frozen=True)
class LiftedLine:
    """The affine line {b x - a y = c_lift} in R^2."""

    direction: tuple[int, int]
    c_lift: Fraction

    def contains(self, p: Point) -> bool:
        a, b = self.direction
        return b * p[0] - a * p[1] == self.c_lift


@dataclass(frozen=True)
class Generator:
    """Admissible intersection point [p, w]: torus point, cover lift, action, degree."""

    point: Point
    lift: Point
    action: Fraction
    degree: int


def lifted_line(al: AnchoredLag) -> LiftedLine:
    lag = al.lagrangian
    return LiftedLine(lag.direction, lag.offset_of_point(al.anchor.endpoint))


def line_intersect(l0: LiftedLine, l1: LiftedLine) -> Point:
    a0, b0 = l0.direction
    a1, b1 = l1.direction
    det = a0 * b1 - a1 * b0
    if det == 0:
        raise ParallelDirectionsError(
            f"directions {l0.direction} and {l1.direction} are parallel"
        )
    x = (-a1 * l0.c_lift + a0 * l1.c_lift) / det
    y = (-b1 * l0.c_lift + b0 * l1.c_lift) / det
    return (x, y)


def intersections(l0: TorusLagrangian, l1: TorusLagrangian) -> list[Point]:
    """All |a0 b1 - a1 b0| intersection points on T^2, sorted lexicographically."""
    a0, b0 = l0.direction
    a1, b1 = l1.direction
    det = a0 * b1 - a1 * b0
    if det == 0:
        raise ParallelDirectionsError(
            f"directions {l0.direction} and {l1.direction} are parallel"
        )
    d = abs(det)
    seen = set()
    for k0 in range(d):
        for k1 in range(d):
            p = line_intersect(
                LiftedLine(l0.direction, l0.offset + k0),
                LiftedLine(l1.direction, l1.offset + k1),
            )
            seen.add((p[0] % 1, p[1] % 1))
    points = sorted(seen)
    assert len(points) == d
    return points


Pair = tuple[AnchoredLag, AnchoredLag]
Triple = tuple[AnchoredLag, AnchoredLag, AnchoredLag]


def action(gen: Generator, pair: Pair, base: Point = ORIGIN) -> Fraction:
    """Action of the capped generator: minus the shoelace of the traversal
    base -> anchor0 path -> along the L0 lift to the generator lift ->
    along the L1 lift to the anchor1 endpoint -> reversed anchor1 path.

    The global sign is fixed so that the triangle product adds actions with
    a nonnegative area term (energy positivity locks the convention).
    """
    al0, al1 = pair
    rep0 = al0.anchor.polyline(base)
    rep1 = al1.anchor.polyline(base)
    cycle = list(rep0) + [gen.lift] + list(reversed(rep1))[:-1]
    return -shoelace(cycle)


def maslov_morse_degree(gen: Generator, pair: Pair) -> int:
    """Degree of the generator via the four-sided Maslov loop.

    Flat lines have constant boundary angle paths, so the index depends
    only on the two grading lifts and the line angles.
    """
    al0, al1 = pair
    lag0, lag1 = al0.lagrangian, al1.lagrangian
    base_lift = AngleLift(RatPiAngle(Fraction(0)), 0)
    lam0 = AnglePath.linear(base_lift, lag0.angle_lift)
    lam1 = AnglePath.linear(base_lift, lag1.angle_lift)
    lam01 = AnglePath.concat(lam0.reversed(), lam1)
    b0 = AnglePath.constant(AngleLift(lag0.angle, 0))
    b1 = AnglePath.constant(AngleLift(lag1.angle, 0))
    return maslov.maslov_morse(lam01, b0, b1, lag0.angle, lag1.angle)


def seidel_degree(p: Point, l0: TorusLagrangian, l1: TorusLagrangian) -> int:
    """Degree from the two absolute grading lifts at p, counted as signed
    crossings of the Maslov cycle {theta = theta_0 mod pi} by the straight
    lift from the L0 grading to the L1 grading (departure counts upward).

    Independent of the loop-assembly machinery; agrees with
    maslov_morse_degree on every transverse flat pair.
    """
    f0, k0 = l0.angle_lift.frac, l0.angle_lift.k
    f1, k1 = l1.angle_lift.frac, l1.angle_lift.k
    if frac_cmp(f0, f1) == 0:
        raise maslov.NonTransverseError("grading sections are parallel at p")

    def less(fa, ka, fb, kb):
        c = frac_cmp(fa, fb)
        return ka < kb or (ka == kb and c < 0)

    if less(f0, k0, f1, k1):
        count, j = 0, 0
        while less(f0, k0 + j, f1, k1):
            count += 1
            j += 1
        return count
    count, j = 0, 1
    while less(f1, k1, f0, k0 - j):
        count -= 1
        j += 1
    return count


def admissible_generator(pair: Pair, base: Point = ORIGIN) -> Generator:
    """The unique admissible intersection point of the anchored pair.

    Its lift is the intersection of the two anchored line lifts; the action
    and degree fields are filled by action() and maslov_morse_degree().
    """
    al0, al1 = pair
    lift = line_intersect(lifted_line(al0), lifted_line(al1))
    point = (lift[0] % 1, lift[1] % 1)
    gen = Generator(point, lift, Fraction(0), 0)
    a = action(gen, pair, base)
    d = maslov_morse_degree(gen, pair)
    return Generator(point, lift, a, d)


def spectrum(pair: Pair, base: Point = ORIGIN) -> list[Fraction]:
    """Critical values of the anchored action functional (a singleton here)."""
    return [admissible_generator(pair, base).action]


# -- triangles and products ---------------------------------------------------


def orientation_compatible(
    l0: TorusLagrangian, l1: TorusLagrangian, l2: TorusLagrangian
) -> bool:
    """Whether the ordered chain bounds rigid triangles.

    Counterclockwise boundaries of nondegenerate triangles of these three
    lines visit the sides in a cyclic order determined by the angles alone;
    the chain is counted exactly when that order is (L1, L2, L0),
    equivalently when its polygonal index is -1.
    """
    fracs = (l0.angle, l1.angle, l2.angle)
    corners = ((1, 2), (2, 0), (0, 1))
    increasing = 0
    for i, j in corners:
        c = frac_cmp(fracs[i], fracs[j])
        if c == 0:
            raise ParallelDirectionsError("chain has parallel members")
        if c < 0:
            increasing += 1
    return increasing == 1


def chain_polygonal_index(
    lags: Sequence[TorusLagrangian], twists: Sequence[int] | None = None
) -> int:
    """Polygonal Maslov index of a flat (k+1)-gon chain.

    Sides follow the counterclockwise order (L1, ..., Lk, L0); a twist adds
    full pi-turns to one side's boundary path.
    """
    k1 = len(lags)
    order = list(range(1, k1)) + [0]
    twists = twists or [0] * k1
    paths = []
    corners = []
    for pos, i in enumerate(order):
        f = lags[i].angle
        paths.append(
            AnglePath.linear(AngleLift(f, 0), AngleLift(f, twists[pos]))
        )
        nxt = order[(pos + 1) % k1]
        corners.append((f, lags[nxt].angle))
    return maslov.polygonal_index(corners, paths)


@dataclass(frozen=True)
class TriangleRecord:
    """One anchored triangle: area, counting flags, generators, vertex lifts."""

    area: Fraction
    signed_area: Fraction
    degenerate: bool
    orientation_compatible: bool
    counted: bool
    generators: tuple[Generator, Generator, Generator]  # g10, g21, g20
    vertices: tuple[Point, Point, Point]  # v10, v21, v02


def anchored_triangle(triple: Triple, base: Point = ORIGIN) -> TriangleRecord:
    """Intersect the three anchored line lifts pairwise.

    Returns the triangle area (absolute shoelace) and the three induced
    generators.  The triangle is counted (multiplicity one) iff the chain
    orientation is compatible and the vertices are distinct; concurrent
    lifts yield a degenerate record with area zero, never an error.
    """
    al0, al1, al2 = triple
    g10 = admissible_generator((al0, al1), base)
    g21 = admissible_generator((al1, al2), base)
    g20 = admissible_generator((al0, al2), base)
    v10, v21, v02 = g10.lift, g21.lift, g20.lift
    signed = shoelace([v10, v21, v02])
    degenerate = v10 == v21 == v02
    oc = orientation_compatible(
        al0.lagrangian, al1.lagrangian, al2.lagrangian
    )
    return TriangleRecord(
        area=abs(signed),
        signed_area=signed,
        degenerate=degenerate,
        orientation_compatible=oc,
        counted=oc and not degenerate,
        generators=(g10, g21, g20),
        vertices=(v10, v21, v02),
    )


def m2_anchored(
    triple: Triple, cutoff: RationalLike, base: Point = ORIGIN
) -> dict[tuple[Generator, Generator, Generator], NovikovSeries]:
    """Anchored product table: m2(x21, x10) = x20 with scalar coefficient one.

    The unique admissible class carries multiplicity one exactly when the
    chain orientation is compatible (the rigid count; the degenerate
    concurrent configuration is the constant triangle and still counts).
    Energies live in the generators' actions, so the coefficient is T^0.
    """
    cut = as_fraction(cutoff)
    rec = anchored_triangle(triple, base)
    if not rec.orientation_compatible:
        return {}
    g10, g21, g20 = rec.generators
    return {(g21, g10, g20): NovikovSeries.one(cutoff=cut)}


# -- lattice enumeration of non-anchored triangle classes ---------------------

_ALL = (0, 1)  # progression "t = 0 mod 1", i.e. every integer


def _cong_solve(alpha: Fraction, beta: Fraction):
    """Solve beta*t + alpha in Z for t in Z: progression (r, s), _ALL, or None."""
    if beta == 0:
        return _ALL if alpha.denominator == 1 else None
    big = math.lcm(beta.denominator, alpha.denominator)
    a = int(beta * big)
    b = int(-alpha * big)
    g = math.gcd(a, big)
    if b % g:
        return None
    a2, b2, m2 = a // g, b // g, big // g
    if m2 == 1:
        return _ALL
    r = (b2 * pow(a2, -1, m2)) % m2
    return (r, m2)


def _cong_merge(p1, p2):
    if p1 is None or p2 is None:
        return None
    r1, s1 = p1
    r2, s2 = p2
    g = math.gcd(s1, s2)
    if (r2 - r1) % g:
        return None
    lcm = s1 * s2 // g
    k = ((r2 - r1) // g * pow(s1 // g, -1, s2 // g)) % (s2 // g) if s2 // g > 1 else 0
    return ((r1 + s1 * k) % lcm, lcm)


@dataclass(frozen=True)
class TriangleClass:
    """One enumerated lift class: vertex lifts and its (signed) area."""

    vertices: tuple[Point, Point, Point]  # v10, v21, v02
    area: Fraction


def enumerate_triangle_classes(
    l0: TorusLagrangian,
    l1: TorusLagrangian,
    l2: TorusLagrangian,
    p10: Point,
    p21: Point,
    p02: Point,
    bound: Fraction,
) -> list[TriangleClass]:
    """All lift classes of triangles with the given corner points, area < bound.

    The lifts of L0 and L1 are fixed through the [0,1)^2 lift of p10; the
    lifts of L2 run over offset translates whose intersections with the two
    fixed lines project to p21 and p02.  Candidate translates form an
    arithmetic progression and the area is a positive-definite quadratic in
    the translate, so the walk outward from its vertex terminates.
    """
    for lag, pts in ((l0, (p10, p02)), (l1, (p10, p21)), (l2, (p21, p02))):
        for p in pts:
            if not lag.contains(p):
                raise ValueError(
                    f"point {p} is not on the Lagrangian with direction "
                    f"{lag.direction} and offset {lag.offset}"
                )
    line0 = LiftedLine(l0.direction, l0.offset_of_point(p10))
    line1 = LiftedLine(l1.direction, l1.offset_of_point(p10))
    v10 = line_intersect(line0, line1)

    def l2_line(t: int | Fraction) -> LiftedLine:
        return LiftedLine(l2.direction, l2.offset + t)

    def vertices(t):
        return (
            line_intersect(line1, l2_line(t)),
            line_intersect(l2_line(t), line0),
        )

    v21_0, v02_0 = vertices(0)
    v21_1, v02_1 = vertices(1)
    prog = _ALL
    for v0, v1, target in ((v21_0, v21_1, p21), (v02_0, v02_1, p02)):
        for coord in (0, 1):
            alpha = v0[coord] - target[coord]
            beta = v1[coord] - v0[coord]
            prog = _cong_merge(prog, _cong_solve(alpha, beta))
            if prog is None:
                return []

    def signed_area(t: Fraction) -> Fraction:
        v21, v02 = vertices(t)
        return shoelace([v10, v21, v02])

    s0, s1, sm = signed_area(Fraction(0)), signed_area(Fraction(1)), signed_area(Fraction(-1))
    quad_a = (s1 + sm - 2 * s0) / 2
    quad_b = (s1 - sm) / 2
    if quad_a <= 0:
        # signed area is a definite quadratic in the translate; a negative
        # leading term means the chain orientation admits no rigid classes
        raise ValueError("chain orientation is incompatible: no counted classes")
    t_center = -quad_b / (2 * quad_a)
    r, s = prog
    n_center = (t_center - r) / s
    classes = []

    def collect(n_start: int, step: int):
        n = n_start
        while True:
            t = r + s * n
            a = signed_area(Fraction(t))
            if a >= bound:
                break
            v21, v02 = vertices(t)
            classes.append(TriangleClass((v10, v21, v02), a))
            n += step

    collect(math.floor(n_center), -1)
    collect(math.floor(n_center) + 1, +1)
    classes.sort(key=lambda c: (c.area, c.vertices))
    return classes


def m2_nonanchored(
    l0: TorusLagrangian,
    l1: TorusLagrangian,
    l2: TorusLagrangian,
    p10: Point,
    p21: Point,
    p02: Point,
    cutoff: RationalLike,
) -> NovikovSeries:
    """Coefficient of the output point in the non-anchored triangle product.

    Counts one rigid triangle per orientation-compatible lift class of
    area below the cutoff, each contributing T^area on the <p20> basis
    (energies explicit as T-powers).  Returns the zero series when the
    chain orientation is incompatible.
    """
    cut = as_fraction(cutoff)
    if not orientation_compatible(l0, l1, l2):
        return NovikovSeries.zero(cutoff=cut)
    classes = enumerate_triangle_classes(l0, l1, l2, p10, p21, p02, cut)
    total = NovikovSeries.zero(cutoff=cut)
    for cls in classes:
        if cls.area < 0:
            raise AssertionError("counted class with negative energy")
        total = total + NovikovSeries.monomial(1, cls.area, 0, cutoff=cut)
    return total


# -- abstract index checks ----------------------------------------------------


@dataclass(frozen=True)
class SplitCase:
    """A counted triangle, optionally split along an anchored diagonal
    through the v10 vertex."""

    triple: Triple
    diagonal: Optional[AnchoredLag] = None


@dataclass(frozen=True)
class IndexCheckReport:
    index: str
    cases: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _strip_index_sum(triple: Triple) -> int:
    """Sum of the strip indices mu_1 = -maslov_morse over the three sides."""
    al0, al1, al2 = triple
    total = 0
    for pair in ((al0, al1), (al1, al2), (al2, al0)):
        gen = admissible_generator(pair)
        total -= maslov_morse_degree(gen, pair)
    return total


def _class_area_sum(triple: Triple, base: Point) -> Fraction:
    """Sum of the strip areas omega(w-) = -action over the three sides."""
    al0, al1, al2 = triple
    total = Fraction(0)
    for pair in ((al0, al1), (al1, al2), (al2, al0)):
        total -= admissible_generator(pair, base).action
    return total


def _check_triple(index: str, triple: Triple, base: Point, errs: list[str], tag: str):
    rec = anchored_triangle(triple, base)
    if index == "area":
        lhs = rec.signed_area
        rhs = _class_area_sum(triple, base)
        if lhs != rhs:
            errs.append(f"{tag}: omega(B) = {lhs} but strip sum = {rhs}")
    else:
        lags = tuple(al.lagrangian for al in triple)
        lhs = chain_polygonal_index(lags)
        rhs = _strip_index_sum(triple)
        if lhs != rhs:
            errs.append(f"{tag}: mu(B) = {lhs} but strip sum = {rhs}")
    return rec


def abstract_index_check(
    index: str, cases: Sequence[SplitCase], base: Point = ORIGIN
) -> IndexCheckReport:
    """Verify the gluing identity I(B) = sum I_1(strips) for area or maslov.

    For split cases the two sub-triangles are checked as well, together
    with exact area additivity across the diagonal.
    """
    if index not in ("area", "maslov"):
        raise ValueError("index must be 'area' or 'maslov'")
    errs: list[str] = []
    for n, case in enumerate(cases):
        rec = _check_triple(index, case.triple, base, errs, f"case {n}")
        if case.diagonal is None:
            continue
        al0, al1, al2 = case.triple
        diag = case.diagonal
        sub1 = (diag, al1, al2)
        sub2 = (al0, diag, al2)
        rec1 = _check_triple(index, sub1, base, errs, f"case {n} sub1")
        rec2 = _check_triple(index, sub2, base, errs, f"case {n} sub2")
        if index == "area":
            if rec1.signed_area + rec2.signed_area != rec.signed_area:
                errs.append(
                    f"case {n}: split areas {rec1.signed_area} + "
                    f"{rec2.signed_area} != {rec.signed_area}"
                )
    return IndexCheckReport(index, len(cases), tuple(errs))
