#!/usr/bin/env python3
"""Show the coefficient twist matching the object twist on one configuration.

The holonomy-weighted structure constants are computed over all triangle
classes below a cutoff; applying T^(1/N) -> zeta_N T^(1/N) to the
coefficients reproduces the constants of the objects tensored by the
restricted prequantum bundle.
"""

from fractions import Fraction as F

from floertorus.novikov import series_repr
from floertorus.reduce import (
    FlatBundle,
    RationalTriple,
    galois_equivariance_check,
    holonomy,
)
from floertorus.torus import Anchor, AnchoredLag, TorusLagrangian, pt


def main() -> None:
    n = 3
    lag0 = TorusLagrangian((0, 1))
    lag1 = TorusLagrangian((1, 0))
    lag2 = TorusLagrangian((1, -2), F(1, 3))
    a2, b2 = lag2.direction
    anchored = (
        AnchoredLag(lag0, Anchor(pt(0, 0))),
        AnchoredLag(lag1, Anchor(pt(0, 0))),
        AnchoredLag(lag2, Anchor((F(0), -lag2.offset / a2))),
    )
    bundles = tuple(
        FlatBundle(al.lagrangian, h)
        for al, h in zip(anchored, (F(1, 3), F(2, 3), F(1, 3)))
    )
    triple = RationalTriple(anchored, bundles, n)
    for i, al in enumerate(anchored):
        print(f"L{i}: prequantum holonomy exponent {holonomy(al.lagrangian)}")
    report = galois_equivariance_check(triple, F(6))
    print(
        f"\nN = {n}: {report.classes} classes, "
        f"{report.twists_checked} twists checked, ok = {report.ok}"
    )
    for violation in report.violations:
        print("  violation:", violation)


if __name__ == "__main__":
    main()
