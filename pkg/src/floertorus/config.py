"""TOML configuration schema for the command line front door.

A configuration lists the base lift, the prequantum integrality level and
the Lagrangians::

    schema = 1

    [base]
    lift = ["0/1", "0/1"]

    [prequantum]
    m_amb = 1

    [[lagrangian]]
    direction = [0, 1]
    offset = "0/1"
    grading = 0
    anchor_lift = ["0/1", "0/1"]
    bundle_holonomy = "0/1"        # optional
    rationalization_N = 2          # optional
    rationalization_phase = "0/1"  # optional

Rationals may be written as integers or "p/q" strings; all emitted JSON
uses "p/q" strings in lowest terms with positive denominator.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .novikov import as_fraction
from .torus import Anchor, AnchoredLag, Point, TorusLagrangian

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed configuration input (exit code 2 at the CLI)."""


def _rational(value, where: str) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: not an exact rational: {value!r}") from exc


def _point(value, where: str) -> Point:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where}: expected a pair of rationals")
    return (_rational(value[0], where), _rational(value[1], where))


@dataclass(frozen=True)
class LagrangianConfig:
    direction: tuple[int, int]
    offset: Fraction
    grading: int
    anchor_lift: Point
    bundle_holonomy: Optional[Fraction] = None
    rationalization_n: Optional[int] = None
    rationalization_phase: Optional[Fraction] = None

    def lagrangian(self) -> TorusLagrangian:
        return TorusLagrangian(self.direction, self.offset, self.grading)

    def anchored(self) -> AnchoredLag:
        return AnchoredLag(self.lagrangian(), Anchor(self.anchor_lift))


@dataclass(frozen=True)
class Setup:
    base: Point
    m_amb: int
    lagrangians: tuple[LagrangianConfig, ...]

    def anchored(self) -> tuple[AnchoredLag, ...]:
        return tuple(cfg.anchored() for cfg in self.lagrangians)


def parse_setup(data: dict) -> Setup:
    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {schema!r}")
    base = _point(data.get("base", {}).get("lift", [0, 0]), "[base] lift")
    m_amb = data.get("prequantum", {}).get("m_amb", 1)
    if not isinstance(m_amb, int) or m_amb < 1:
        raise ConfigError("[prequantum] m_amb must be a positive integer")
    raw = data.get("lagrangian", [])
    if not raw:
        raise ConfigError("no [[lagrangian]] blocks configured")
    lags = []
    for i, block in enumerate(raw):
        where = f"[[lagrangian]] #{i}"
        direction = block.get("direction")
        if (
            not isinstance(direction, list)
            or len(direction) != 2
            or not all(isinstance(x, int) for x in direction)
        ):
            raise ConfigError(f"{where}: direction must be a pair of integers")
        offset = _rational(block.get("offset", 0), f"{where} offset")
        grading = block.get("grading", 0)
        if not isinstance(grading, int):
            raise ConfigError(f"{where}: grading must be an integer")
        anchor = _point(block.get("anchor_lift", [0, 0]), f"{where} anchor_lift")
        hol = block.get("bundle_holonomy")
        rat_n = block.get("rationalization_N")
        rat_phase = block.get("rationalization_phase")
        if rat_n is not None and (not isinstance(rat_n, int) or rat_n < 1):
            raise ConfigError(f"{where}: rationalization_N must be a positive integer")
        try:
            cfg = LagrangianConfig(
                direction=(direction[0], direction[1]),
                offset=offset,
                grading=grading,
                anchor_lift=anchor,
                bundle_holonomy=None if hol is None else _rational(hol, where),
                rationalization_n=rat_n,
                rationalization_phase=None
                if rat_phase is None
                else _rational(rat_phase, where),
            )
            cfg.anchored()  # validates primitivity and anchor incidence
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{where}: {exc}") from exc
        lags.append(cfg)
    return Setup(base, m_amb, tuple(lags))


def load_setup(path: str) -> Setup:
    try:
        with open(path, "rb") as handle:
            data = _toml.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except _toml.TOMLDecodeError as exc:
        # tomli error messages carry line and column information
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
    return parse_setup(data)
