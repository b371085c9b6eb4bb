"""Maslov index machinery for paths and loops in Lag(R^2) = R/(pi Z).

A Lagrangian line in R^2 is identified with its angle theta mod pi.  Two
exact angle flavours coexist:

* ``RatPiAngle(q)``: theta = q*pi with q a rational in [0, 1);
* ``DirAngle(a, b)``: the angle of the primitive integer direction (a, b),
  normalized to the upper half plane.  Directions whose angle is a
  quarter-integer multiple of pi ((1,0), (1,1), (0,1), (-1,1)) are
  canonicalized to ``RatPiAngle`` on construction, so a ``DirAngle`` is
  never a rational multiple of pi and cross-flavour comparisons stay
  exact integer arithmetic.

An ``AngleLift`` (frac, k) is the real lift theta(frac) + k*pi.  Paths are
piecewise linear in the lift; a loop's Maslov index is its winding number
(theta_end - theta_start)/pi, which the lift bookkeeping evaluates as an
exact integer.  Orientation conventions (the direction of the short
corner paths and the traversal order of the strip loop) are locked by the
torus golden tests: the corner connector used when closing a strip runs
from the L1-line to the L0-line with increasing angle, and polygon
corners insert the reversed (decreasing) connectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .novikov import as_fraction


class IncomparableAnglesError(ValueError):
    """Ordering a generic rational-pi angle against a generic direction angle."""


class NonLoopError(ValueError):
    """Loop assembly failed: adjacent segment angles disagree mod pi."""


class NonTransverseError(ValueError):
    """Two angles coincide mod pi where transversality is required."""


@dataclass(frozen=True)
class RatPiAngle:
    """theta = q*pi with q in [0, 1)."""

    q: Fraction

    def __post_init__(self):
        q = as_fraction(self.q) % 1
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class DirAngle:
    """Angle of a primitive direction (a, b), b > 0, not a multiple of pi/4."""

    a: int
    b: int


AngleFrac = Union[RatPiAngle, DirAngle]

_QUARTER = {
    (1, 0): Fraction(0),
    (1, 1): Fraction(1, 4),
    (0, 1): Fraction(1, 2),
    (-1, 1): Fraction(3, 4),
}


def dir_angle(a: int, b: int) -> AngleFrac:
    """Canonical angle class of the line direction (a, b)."""
    if (a, b) == (0, 0):
        raise ValueError("zero direction")
    g = math.gcd(abs(a), abs(b))
    if g != 1:
        raise ValueError(f"direction {(a, b)} is not primitive")
    if b < 0 or (b == 0 and a < 0):
        a, b = -a, -b
    if (a, b) in _QUARTER:
        return RatPiAngle(_QUARTER[(a, b)])
    return DirAngle(a, b)


def _dir_of(f: AngleFrac) -> tuple[int, int] | None:
    if isinstance(f, DirAngle):
        return (f.a, f.b)
    inv = {v: k for k, v in _QUARTER.items()}
    return inv.get(f.q)


def frac_cmp(f1: AngleFrac, f2: AngleFrac) -> int:
    """Compare angles in [0, pi): -1, 0 or +1.  Exact."""
    if isinstance(f1, RatPiAngle) and isinstance(f2, RatPiAngle):
        return (f1.q > f2.q) - (f1.q < f2.q)
    d1, d2 = _dir_of(f1), _dir_of(f2)
    if d1 is None or d2 is None:
        raise IncomparableAnglesError(
            f"cannot compare {f1} with {f2} exactly"
        )
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    # both directions lie in the closed upper half plane, so the sign of the
    # cross product is the sign of theta2 - theta1
    return (cross < 0) - (cross > 0)


@dataclass(frozen=True)
class AngleLift:
    """Real lift theta(frac) + k*pi of a Lagrangian line angle."""

    frac: AngleFrac
    k: int = 0

    def shifted(self, n: int) -> "AngleLift":
        return AngleLift(self.frac, self.k + n)


@dataclass(frozen=True)
class AnglePath:
    """Piecewise-linear path of angle lifts over the parameter range [0, 1]."""

    breakpoints: tuple[tuple[Fraction, AngleLift], ...]

    def __post_init__(self):
        bps = tuple(
            (as_fraction(t), lift) for t, lift in self.breakpoints
        )
        if len(bps) < 2:
            raise ValueError("a path needs at least two breakpoints")
        ts = [t for t, _ in bps]
        if ts[0] != 0 or ts[-1] != 1 or any(u >= v for u, v in zip(ts, ts[1:])):
            raise ValueError("breakpoint times must increase strictly from 0 to 1")
        object.__setattr__(self, "breakpoints", bps)

    @staticmethod
    def linear(start: AngleLift, end: AngleLift) -> "AnglePath":
        return AnglePath(((Fraction(0), start), (Fraction(1), end)))

    @staticmethod
    def constant(lift: AngleLift) -> "AnglePath":
        return AnglePath.linear(lift, lift)

    @property
    def start(self) -> AngleLift:
        return self.breakpoints[0][1]

    @property
    def end(self) -> AngleLift:
        return self.breakpoints[-1][1]

    def delta_k(self) -> int:
        """Integer part of the total lift increment, (end.k - start.k)."""
        return self.end.k - self.start.k

    def reversed(self) -> "AnglePath":
        return AnglePath(
            tuple((1 - t, lift) for t, lift in reversed(self.breakpoints))
        )

    @staticmethod
    def concat(*paths: "AnglePath") -> "AnglePath":
        """Join paths end-to-start, rescaling time; lifts are re-threaded."""
        if not paths:
            raise ValueError("nothing to concatenate")
        n = len(paths)
        bps: list[tuple[Fraction, AngleLift]] = []
        shift = 0
        for i, p in enumerate(paths):
            if i > 0:
                prev_end = bps[-1][1]
                if frac_cmp(prev_end.frac, p.start.frac) != 0:
                    raise NonLoopError("concatenation endpoints disagree mod pi")
                shift = prev_end.k - p.start.k
            for j, (t, lift) in enumerate(p.breakpoints):
                if i > 0 and j == 0:
                    continue
                bps.append(
                    (Fraction(i, n) + t / n, lift.shifted(shift))
                )
        return AnglePath(tuple(bps))


@dataclass(frozen=True)
class LagLoopPlan:
    """Cyclic concatenation of angle paths plus deliberate lift jumps.

    ``lift_jumps[i]`` is the integer multiple of pi inserted at the
    junction following ``segments[i]`` (the last jump closes the loop).
    """

    segments: tuple[AnglePath, ...]
    lift_jumps: tuple[int, ...] = ()

    def __post_init__(self):
        jumps = self.lift_jumps or tuple(0 for _ in self.segments)
        if len(jumps) != len(self.segments):
            raise ValueError("one lift jump per junction required")
        object.__setattr__(self, "lift_jumps", tuple(jumps))


def maslov_loop(loop: LagLoopPlan) -> int:
    """Winding number of the loop: (lifted end - lifted start)/pi.

    Junction angles must agree mod pi; each segment contributes its
    internal lift increment and each junction its declared jump.
    """
    segs = loop.segments
    if not segs:
        raise NonLoopError("empty loop")
    total = 0
    for i, seg in enumerate(segs):
        nxt = segs[(i + 1) % len(segs)]
        if frac_cmp(seg.end.frac, nxt.start.frac) != 0:
            raise NonLoopError(
                f"junction after segment {i}: angles differ mod pi"
            )
        total += seg.delta_k() + loop.lift_jumps[i]
    return total


def short_positive_path(theta0: AngleLift, theta1_mod: AngleFrac) -> AnglePath:
    """The short path from theta0 with increasing angle, total turn in (0, pi).

    Any lift of the target transverse angle reachable by a positive turn
    differs from this one by full turns; only the turn in (0, pi) is kept.
    """
    c = frac_cmp(theta1_mod, theta0.frac)
    if c == 0:
        raise NonTransverseError("endpoint angles coincide mod pi")
    end = AngleLift(theta1_mod, theta0.k + (0 if c > 0 else 1))
    return AnglePath.linear(theta0, end)


def short_negative_path(theta0: AngleLift, theta1_mod: AngleFrac) -> AnglePath:
    """The short path from theta0 with decreasing angle, total turn in (-pi, 0)."""
    c = frac_cmp(theta1_mod, theta0.frac)
    if c == 0:
        raise NonTransverseError("endpoint angles coincide mod pi")
    end = AngleLift(theta1_mod, theta0.k - (0 if c < 0 else 1))
    return AnglePath.linear(theta0, end)


def maslov_morse(
    lambda01: AnglePath,
    boundary0: AnglePath,
    boundary1: AnglePath,
    theta_l0_at_p: AngleFrac,
    theta_l1_at_p: AngleFrac,
) -> int:
    """Index of the four-sided strip loop closed by the canonical corner path.

    The loop runs: the graded base path lambda01 (from the L0 grading to
    the L1 grading), then boundary1 out to the intersection point, then
    the short corner connector from the L1 angle to the L0 angle with
    increasing angle, then boundary0 traversed backwards.  The corner
    direction together with this traversal order is the one global
    orientation choice; it is pinned by the duality identity
    mu(forward) + mu(reversed) = 1 and by the torus golden tests.
    """
    if frac_cmp(lambda01.end.frac, boundary1.start.frac) != 0:
        raise NonLoopError("lambda01 end does not match boundary1 start mod pi")
    if frac_cmp(boundary1.end.frac, theta_l1_at_p) != 0:
        raise NonLoopError("boundary1 end does not match the L1 corner angle")
    if frac_cmp(boundary0.end.frac, theta_l0_at_p) != 0:
        raise NonLoopError("boundary0 end does not match the L0 corner angle")
    if frac_cmp(boundary0.start.frac, lambda01.start.frac) != 0:
        raise NonLoopError("boundary0 start does not match lambda01 start mod pi")
    corner = short_positive_path(AngleLift(theta_l1_at_p, 0), theta_l0_at_p)
    loop = LagLoopPlan((lambda01, boundary1, corner, boundary0.reversed()))
    return maslov_loop(loop)


def polygonal_index(
    corner_angles: Sequence[tuple[AngleFrac, AngleFrac]],
    boundary_paths: Sequence[AnglePath],
) -> int:
    """Index of the polygon boundary loop with canonical corner insertions.

    ``boundary_paths[i]`` runs along the i-th side; the corner after side i
    carries ``corner_angles[i] = (theta_in, theta_out)`` and receives the
    reversed short connector (decreasing angle, turn in (-pi, 0)).  The
    sides and corners must match cyclically mod pi.
    """
    k1 = len(boundary_paths)
    if k1 < 2 or len(corner_angles) != k1:
        raise NonLoopError("need k+1 >= 2 sides with one corner each")
    segs: list[AnglePath] = []
    for i, path in enumerate(boundary_paths):
        t_in, t_out = corner_angles[i]
        if frac_cmp(path.end.frac, t_in) != 0:
            raise NonLoopError(f"side {i} end does not match its corner in-angle")
        nxt = boundary_paths[(i + 1) % k1]
        if frac_cmp(t_out, nxt.start.frac) != 0:
            raise NonLoopError(f"corner {i} out-angle does not match side {i+1}")
        segs.append(path)
        segs.append(short_negative_path(AngleLift(t_in, 0), t_out))
    return maslov_loop(LagLoopPlan(tuple(segs)))
