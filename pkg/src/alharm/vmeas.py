"""Virtual measures between outer levels of a two-level object.

``mu(F(i)|F(j))`` is a Haar measure on ``F(j)/F(i)`` when ``i <= j`` and a
formal inverse otherwise.  Every such measure is a positive multiple of a
fixed reference: on each row ``b`` the reference gives ``{a >= 0}`` volume
one, i.e. the coordinate ``a`` carries mass ``1/q`` if ``a >= 0`` and ``1``
otherwise.  Since ``m(a) m(-a-1) = 1/q`` on every row, the references of an
object and of its dual are dual to each other, so duality keeps scalars.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

from .filt2 import Automorphism2, FilteredObject2, dual2, iv_count, predicates2


def _rows(i: int, j: int) -> range:
    lo, hi = min(i, j), max(i, j)
    return range(-hi, -lo)


@dataclass(frozen=True)
class VirtualMeasure:
    """``scalar`` times the reference measure of ``F(j)/F(i)``.

    Canonical scalars are exact powers of ``q`` (``Fraction``); user
    scalars may be any nonzero number.
    """

    parent: FilteredObject2
    i: int
    j: int
    scalar: float

    def __post_init__(self):
        if self.scalar == 0:
            raise ValueError("virtual measures have nonzero scalars")

    @property
    def core(self):
        return self.parent.core

    def isclose(self, other: "VirtualMeasure", rel: float = 1e-12) -> bool:
        return (self.core == other.core and (self.i, self.j) == (other.i, other.j)
                and cmath.isclose(self.scalar, other.scalar, rel_tol=rel))

    def to_json(self) -> dict:
        z = complex(self.scalar)
        return {"i": self.i, "j": self.j, "scalar": [z.real, z.imag]}


def identity(E: FilteredObject2, i: int) -> VirtualMeasure:
    return VirtualMeasure(E, i, i, Fraction(1))


def reference(E: FilteredObject2, i: int, j: int) -> VirtualMeasure:
    return VirtualMeasure(E, i, j, Fraction(1))


def compose_gamma(m1: VirtualMeasure, m2: VirtualMeasure) -> VirtualMeasure:
    """``mu(F(i)|F(j)) (x) mu(F(j)|F(k)) -> mu(F(i)|F(k))``."""
    if m1.core != m2.core or m1.j != m2.i:
        raise ValueError("measures are not composable")
    return VirtualMeasure(m1.parent, m1.i, m2.j, m1.scalar * m2.scalar)


def invert(m: VirtualMeasure) -> VirtualMeasure:
    return VirtualMeasure(m.parent, m.j, m.i, Fraction(1) / m.scalar)


def _row_exponent(E: FilteredObject2, i: int, j: int, side: str) -> int:
    total = 0
    for b in _rows(i, j):
        row = E.region.row(b)
        n = iv_count(row, hi=-1) if side == "neg" else iv_count(row, lo=0)
        if n == float("inf"):
            raise ValueError(f"row {b} is not of the required finite type")
        total += int(n)
    return total if i <= j else -total


def canonical_one(E: FilteredObject2, i: int, j: int) -> VirtualMeasure:
    """Compact slabs: the measure with total mass one."""
    if not predicates2(E)["cf"]:
        raise ValueError("canonical unit measure needs a cf-object")
    return VirtualMeasure(E, i, j, Fraction(E.q) ** (-_row_exponent(E, i, j, "neg")))


def canonical_delta(E: FilteredObject2, i: int, j: int) -> VirtualMeasure:
    """Discrete slabs: counting measure."""
    if not predicates2(E)["df"]:
        raise ValueError("counting measure needs a df-object")
    return VirtualMeasure(E, i, j, Fraction(E.q) ** _row_exponent(E, i, j, "pos"))


# ---------------------------------------------------------------------------
# transport along automorphisms


def _shift_exponent(row, alpha: int) -> int:
    """``#{a: a < 0 <= a+alpha} - #{a: a+alpha < 0 <= a}`` over ``row``."""
    if alpha >= 0:
        return int(iv_count(row, -alpha, -1))
    return -int(iv_count(row, 0, -alpha - 1))


def lg_ratio(g: Automorphism2, E: FilteredObject2, i: int, j: int) -> float:
    """``g_* ref = ratio * ref`` from ``F(j)/F(i)`` to ``F(j-beta)/F(i-beta)``."""
    if g.perm and g.alpha:
        raise ValueError("exponent permutations combine with alpha = 0 only")
    e = 0
    for b in _rows(i, j):
        row = E.region.row(b)
        e += _shift_exponent(row, g.alpha)
        for a, pa in g.perm:
            if any(lo <= a <= hi for lo, hi in row):
                e += (a < 0) - (pa < 0)
    r = Fraction(E.q) ** e
    return r if i <= j else 1 / r


def lg_ratio_window(g: Automorphism2, E: FilteredObject2, i: int, j: int) -> float:
    """Same ratio computed cell by cell on the box, ``prod m(a)/m(g a)``.

    Valid when the box holds every cell where the masses differ.
    """
    q = E.q
    r = Fraction(1)
    lo, hi = min(i, j), max(i, j)
    for a, b in E.cells:
        if -hi <= b < -lo:
            ta, _ = g.cell_map(a, b)
            r *= Fraction(1, q if a >= 0 else 1) / Fraction(1, q if ta >= 0 else 1)
    return r if i <= j else 1 / r


def transport_lg(g: Automorphism2, m: VirtualMeasure) -> VirtualMeasure:
    """``l_g``: push a measure along ``g``; levels move by ``-beta``."""
    E = m.parent
    region = E.region if g.perm else E.region.shift(g.alpha, g.beta)
    target = FilteredObject2(E.q, region, E.box.shift(g.alpha, g.beta))
    return VirtualMeasure(target, m.i - g.beta, m.j - g.beta, m.scalar * lg_ratio(g, E, m.i, m.j))


def dual_transport(m: VirtualMeasure) -> VirtualMeasure:
    """The measure on the dual slab; references are self-dual."""
    return VirtualMeasure(dual2(m.parent), -m.i, -m.j, m.scalar)
