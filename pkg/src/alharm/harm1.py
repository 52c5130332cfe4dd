"""Functions, distributions and measures on finite-flavor C1 windows.

A Schwartz function on a window object is determined by a pair of levels
``a <= b``: it is supported in ``F(b)`` and invariant under ``F(a)``, so it
is a function on the finite group ``F(b)/F(a)``.  We keep that window table
and lift it to the ambient group ``W = F(hi)/F(lo)`` when needed.
Distributions are kernels on ``W``; their window kernels are fibre sums.

The Haar line of an object is coordinatized by the measure giving
``F(o_ref)`` volume 1.  On ``W`` this is the measure with point mass
``1 / |F(o_ref)/F(lo)|``; on the window ``F(b)/F(a)`` the point mass is
``|F(a)/F(lo)| / |F(o_ref)/F(lo)|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .archimed import poisson_lattice_check
from .filt1 import AdmissibleTriple1, FilteredObject1, dual1, is_compact1, is_discrete1
from .finabel import (FunctionC0, MeasureC0, extend_along, fourier_c0, pull_along,
                      push_along, reflect)

IMAGE_MODES = ("I1", "I2", "I3", "I4", "I5", "I6", "I7", "I8")


@lru_cache(maxsize=256)
def dual_object(E: FilteredObject1) -> FilteredObject1:
    return dual1(E)


def _to_dual_coords(E: FilteredObject1, t: np.ndarray) -> np.ndarray:
    """Tensor indexed by characters of ``W`` -> coordinates of ``dual1(E)``."""
    return t.transpose(tuple(reversed(range(t.ndim)))) if E.labels is not None else t


def _lift(E: FilteredObject1, a: int, b: int, table: np.ndarray) -> np.ndarray:
    _, p_a, inj = E.window_data(a, b)
    return pull_along(p_a, extend_along(inj, table))


def _deflate(E: FilteredObject1, a: int, b: int, values: np.ndarray) -> np.ndarray:
    Q, p_a, inj = E.window_data(a, b)
    table = pull_along(inj, push_along(p_a, values)) / E.order(a)
    if not np.allclose(_lift(E, a, b, table), values, rtol=0, atol=1e-12 * (1 + np.abs(values).max(initial=0))):
        raise ValueError(f"function does not live on the window [{a}, {b}]")
    return table


def _support_level(E: FilteredObject1, values: np.ndarray, tol: float) -> int:
    nz = np.abs(values) > tol
    return next(b for b in range(E.lo, E.hi + 1) if not np.any(nz & ~E.level(b).mask()))


def _invariance_level(E: FilteredObject1, values: np.ndarray, tol: float) -> int:
    a_best = E.lo
    for a in range(E.lo, E.hi + 1):
        _, p_a, _ = E.window_data(a, a)
        avg = pull_along(p_a, push_along(p_a, values)) / E.order(a)
        if np.max(np.abs(avg - values), initial=0.0) <= tol:
            a_best = a
        else:
            break
    return a_best


@dataclass(frozen=True, eq=False)
class SchwartzC1:
    parent: FilteredObject1
    a: int
    b: int
    table: np.ndarray

    def __post_init__(self):
        Q, _, _ = self.parent.window_data(self.a, self.b)
        t = np.asarray(self.table, dtype=complex).reshape(Q.shape)
        if not np.all(np.isfinite(t)):
            raise ValueError("function values must be finite")
        object.__setattr__(self, "table", t)

    @property
    def window(self) -> tuple[int, int]:
        return self.a, self.b

    def lifted(self) -> np.ndarray:
        return _lift(self.parent, self.a, self.b, self.table)

    def at_window(self, a: int, b: int) -> "SchwartzC1":
        """The same function written on the window ``[a, b]``."""
        return SchwartzC1(self.parent, a, b, _deflate(self.parent, a, b, self.lifted()))

    @classmethod
    def from_lifted(cls, E: FilteredObject1, values, window=None, tol: float = 1e-12) -> "SchwartzC1":
        values = np.asarray(values, dtype=complex).reshape(E.ambient.shape)
        if window is None:
            scale = tol * (1 + np.abs(values).max(initial=0))
            b = _support_level(E, values, scale)
            a = min(_invariance_level(E, values, scale), b)
            window = (a, b)
        return cls(E, *window, _deflate(E, *window, values))

    @classmethod
    def indicator(cls, E: FilteredObject1, i: int) -> "SchwartzC1":
        """Indicator of the level ``F(i)``."""
        Q, _, _ = E.window_data(i, i)
        return cls(E, i, i, np.ones(Q.shape))

    @classmethod
    def dirac(cls, E: FilteredObject1) -> "SchwartzC1":
        """Indicator of ``F(lo)``, the finest point of the window."""
        return cls.indicator(E, E.lo)

    def reflect(self) -> "SchwartzC1":
        return SchwartzC1.from_lifted(self.parent, reflect(self.lifted()), self.window)

    def translate(self, x) -> "SchwartzC1":
        """``y -> f(y + x)`` for a residue vector ``x`` of the ambient group."""
        v = self.lifted()
        for ax, s in enumerate(x):
            v = np.roll(v, -int(s), axis=ax)
        return SchwartzC1.from_lifted(self.parent, v, (self.parent.lo, self.parent.hi))

    def __add__(self, other: "SchwartzC1") -> "SchwartzC1":
        return SchwartzC1.from_lifted(self.parent, self.lifted() + other.lifted())

    def scale(self, c: complex) -> "SchwartzC1":
        return SchwartzC1(self.parent, self.a, self.b, c * self.table)


def canonicalize1(f: SchwartzC1, tol: float = 1e-12) -> SchwartzC1:
    """Rewrite ``f`` on its minimal window."""
    return SchwartzC1.from_lifted(f.parent, f.lifted(), tol=tol)


@dataclass(frozen=True, eq=False)
class DistC1:
    """Distribution given by a kernel on the ambient group of the window."""

    parent: FilteredObject1
    kernel: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=complex).reshape(self.parent.ambient.shape)
        object.__setattr__(self, "kernel", k)

    def at_window(self, a: int, b: int) -> np.ndarray:
        """Kernel of the restriction to functions on ``F(b)/F(a)``."""
        _, p_a, inj = self.parent.window_data(a, b)
        return pull_along(inj, push_along(p_a, self.kernel))

    @classmethod
    def dirac(cls, E: FilteredObject1) -> "DistC1":
        k = np.zeros(E.ambient.shape, dtype=complex)
        k[(0,) * E.ambient.rank] = 1.0
        return cls(E, k)


def pairing1(f: SchwartzC1, H: DistC1, window=None) -> complex:
    """``<f, H>`` on ``f``'s window or on a larger common window."""
    if f.parent != H.parent:
        raise ValueError("pairing across different objects")
    if window is not None:
        f = f.at_window(*window)
    return complex(np.sum(f.table * H.at_window(f.a, f.b)))


@dataclass(frozen=True)
class MeasureLine1:
    """``scalar`` times the measure with ``vol(F(o_ref)) = 1``."""

    parent: FilteredObject1
    scalar: complex = 1.0

    def point_mass(self, a: int | None = None) -> complex:
        E = self.parent
        a = E.lo if a is None else a
        return self.scalar * E.order(a) / E.order(E.o_ref)

    def as_distribution(self) -> DistC1:
        return DistC1(self.parent, np.full(self.parent.ambient.shape, self.point_mass()))

    def integrate(self, f: SchwartzC1) -> complex:
        return pairing1(f, self.as_distribution())

    def inverse(self) -> "MeasureLine1":
        """Dual measure on ``dual1(parent)``."""
        if self.scalar == 0:
            raise ValueError("zero measure has no inverse")
        return MeasureLine1(dual_object(self.parent), 1.0 / self.scalar)


def compose_measures(mu1: MeasureLine1, mu3: MeasureLine1, E2: FilteredObject1) -> MeasureLine1:
    """``mu1 (x) mu3`` in the Haar line of the middle object."""
    return MeasureLine1(E2, mu1.scalar * mu3.scalar)


def unit_measure(E: FilteredObject1) -> MeasureLine1:
    """Total mass one; exists on compact objects."""
    if not is_compact1(E):
        raise ValueError("total-mass-one measure needs a compact object")
    return MeasureLine1(E, E.order(E.o_ref) / E.ambient.order)


def counting_measure(E: FilteredObject1) -> MeasureLine1:
    """Point mass one; exists on discrete objects."""
    if not is_discrete1(E):
        raise ValueError("counting measure needs a discrete object")
    return MeasureLine1(E, E.order(E.o_ref))


# ---------------------------------------------------------------------------
# Fourier transform


def fourier1(f: SchwartzC1, mu: MeasureLine1) -> SchwartzC1:
    """Transform on the window ``F(b)/F(a)``, read on the dual window ``[-b, -a]``."""
    E = f.parent
    if mu.parent != E:
        raise ValueError("measure lives on another object")
    Q, p_a, inj = E.window_data(f.a, f.b)
    g = fourier_c0(FunctionC0(Q, f.table), MeasureC0(Q, mu.point_mass(f.a))).values
    on_chars = extend_along(p_a.dual(), pull_along(inj.dual(), g))
    D = dual_object(E)
    return SchwartzC1.from_lifted(D, _to_dual_coords(E, on_chars), (-f.b, -f.a))


def fourier1_direct(f: SchwartzC1, mu: MeasureLine1) -> SchwartzC1:
    """Transform computed on the whole ambient group (independent route)."""
    E = f.parent
    v = mu.point_mass() * np.fft.fftn(f.lifted()) if E.ambient.rank else mu.point_mass() * f.lifted()
    return SchwartzC1.from_lifted(dual_object(E), _to_dual_coords(E, v), (-f.b, -f.a))


def fourier1_dist(H: DistC1, nu: MeasureLine1) -> DistC1:
    """Transpose of ``fourier1(., nu)``; ``nu`` lives on ``dual1(H.parent)``."""
    E = H.parent
    D = dual_object(E)
    if nu.parent != D:
        raise ValueError("measure must live on the dual object")
    k = np.fft.fftn(H.kernel) if E.ambient.rank else H.kernel.copy()
    return DistC1(D, _to_dual_coords(E, nu.point_mass() * k))


# ---------------------------------------------------------------------------
# images along an admissible triple


def _need(cond: bool, mode: str, what: str):
    if not cond:
        raise ValueError(f"{mode} requires {what}")


def images1(T: AdmissibleTriple1, x, mode: str, mu: MeasureLine1 | None = None):
    """The eight image maps; ``mu`` (on E1) is used by I1 and I2."""
    if mode not in IMAGE_MODES:
        raise ValueError(f"unknown image mode {mode!r}")
    if mode in ("I1", "I2"):
        if mu is None or mu.parent != T.E1:
            raise ValueError(f"{mode} needs a measure on E1")
    if mode in ("I5", "I6"):
        _need(is_compact1(T.E1), mode, "E1 to be a compact object (is_compact1 is false)")
    if mode in ("I7", "I8"):
        _need(is_discrete1(T.E3), mode, "E3 to be a discrete object (is_discrete1 is false)")
    src = {"I1": T.E2, "I2": T.E3, "I3": T.E2, "I4": T.E1,
           "I5": T.E3, "I6": T.E2, "I7": T.E1, "I8": T.E2}[mode]
    if x.parent != src:
        raise ValueError(f"{mode} input lives on the wrong object")
    if mode == "I1":
        v = mu.point_mass() * push_along(T.beta, x.lifted())
        return SchwartzC1.from_lifted(T.E3, v, x.window)
    if mode == "I2":
        return DistC1(T.E2, mu.point_mass() * pull_along(T.beta, x.kernel))
    if mode == "I3":
        return SchwartzC1.from_lifted(T.E1, pull_along(T.alpha, x.lifted()), x.window)
    if mode == "I4":
        return DistC1(T.E2, extend_along(T.alpha, x.kernel))
    if mode == "I5":
        return SchwartzC1.from_lifted(T.E2, pull_along(T.beta, x.lifted()))
    if mode == "I6":
        return DistC1(T.E3, push_along(T.beta, x.kernel))
    if mode == "I7":
        return SchwartzC1.from_lifted(T.E2, extend_along(T.alpha, x.lifted()))
    return DistC1(T.E1, pull_along(T.alpha, x.kernel))


ADJOINT_PAIRS = (("I1", "I2"), ("I3", "I4"), ("I5", "I6"), ("I7", "I8"))


def poisson1_check(T: AdmissibleTriple1, mu1: MeasureLine1, mu3: MeasureLine1) -> dict:
    """Compare the transform of ``alpha_*(mu1)`` with ``beta^_*(mu3)``.

    ``mu1`` lives on E1 and ``mu3`` on ``dual1(E3)``; the transform uses
    ``mu1^-1 (x) mu3`` on ``dual1(E2)``.
    """
    if mu1.scalar == 0:
        raise ValueError("mu1 must be nonzero")
    if mu1.parent != T.E1 or mu3.parent != dual_object(T.E3):
        raise ValueError("measures live on the wrong objects")
    Td = T.dual()
    delta = images1(T, mu1.as_distribution(), "I4")
    lhs = fourier1_dist(delta, MeasureLine1(Td.E2, mu3.scalar / mu1.scalar))
    rhs = images1(Td, mu3.as_distribution(), "I4")
    dev = float(np.max(np.abs(lhs.kernel - rhs.kernel), initial=0.0))
    return {"lhs": lhs, "rhs": rhs, "max_deviation": dev}


def poisson1_lattice(coeffs) -> dict:
    """Archimedean instance ``Z -> R -> T``: delegated to the lattice check."""
    return poisson_lattice_check(coeffs)
