#!/usr/bin/env python3
"""Print the triangle-count series of the standard three-line configuration
at a few cutoffs, next to the anchored one-term products it refines."""

from fractions import Fraction as F

from floertorus.novikov import series_repr
from floertorus.torus import (
    Anchor,
    AnchoredLag,
    TorusLagrangian,
    anchored_triangle,
    m2_nonanchored,
    pt,
)


def main() -> None:
    l0 = TorusLagrangian((0, 1))
    l1 = TorusLagrangian((1, 0))
    l2 = TorusLagrangian((1, -1))
    origin = pt(0, 0)
    print("non-anchored product coefficient at the common point:")
    for cutoff in (F(1, 4), F(5), F(13), F(25)):
        series = m2_nonanchored(l0, l1, l2, origin, origin, origin, cutoff)
        print(f"  cutoff {str(cutoff):>5}: {series_repr(series)}")

    print("\nanchored refinement: one rigid triangle per anchor triple")
    for m in range(-3, 4):
        triple = (
            AnchoredLag(l0, Anchor(pt(0, 0))),
            AnchoredLag(l1, Anchor(pt(0, 0))),
            AnchoredLag(l2, Anchor(pt(F(m, 2), F(m, 2)))),
        )
        rec = anchored_triangle(triple)
        print(f"  anchors (0, 0, {m:+d}): area {rec.area}")


if __name__ == "__main__":
    main()
