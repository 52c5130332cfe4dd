"""Groups ``A x Z^r x T^p x R^q`` with Schwartz functions as coefficient tensors.

Coefficient tensor axes come in the order A-axes, Z-axes, T-axes, R-axes:

* a Z-axis of length ``2N+1`` holds values at ``n = -N..N``;
* a T-axis of length ``2K+1`` holds Fourier modes ``e^{2 pi i k theta}``, ``k = -K..K``;
* an R-axis of length ``M`` holds Hermite coefficients of degree ``< M``.

On R we use ``psi_m(x) = (2 pi)^{1/4} phi_m(sqrt(2 pi) x)`` with ``phi_m`` the
orthonormal Hermite functions, so that the transform with kernel
``e^{-2 pi i x y}`` is diagonal with eigenvalue ``(-i)^m``.

Measures are scalars relative to counting (A, Z), the mass-one circle
measure (T) and Lebesgue measure (R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .finabel import (AdmissibleTripleC0, FinAbGroup, push_along, pull_along, extend_along)

HERMITE_CUTOFF = 32
FOURIER_MODES = 32
Z_BOX = 64


class CutoffOverflow(ValueError):
    """A result does not fit in the stored boxes within tolerance."""


def hermite_functions(M: int, x) -> np.ndarray:
    """``psi_0..psi_{M-1}`` at points ``x``; shape ``(M,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    y = math.sqrt(2 * math.pi) * x
    out = np.empty((M,) + x.shape)
    if M == 0:
        return out
    out[0] = 2 ** 0.25 * np.exp(-math.pi * x * x)
    if M > 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for m in range(1, M - 1):
        out[m + 1] = math.sqrt(2.0 / (m + 1)) * y * out[m] - math.sqrt(m / (m + 1)) * out[m - 1]
    return out


def hermite_eigenvalues(M: int) -> np.ndarray:
    return (-1j) ** np.arange(M)


def hermite_integrals(M: int) -> np.ndarray:
    """Lebesgue integrals of ``psi_m``: the transform evaluated at 0."""
    return hermite_eigenvalues(M) * hermite_functions(M, 0.0)


def hermite_eigen_check(M: int, ys=None, nodes: int = 160) -> dict:
    """Transform ``psi_m`` by Gauss-Hermite quadrature and compare with
    ``(-i)^m psi_m``.  The quadrature never uses the eigenrelation."""
    ys = np.linspace(-2.0, 2.0, 17) if ys is None else np.asarray(ys, dtype=float)
    s, w = hermgauss(nodes)
    # x = s / sqrt(pi) turns exp(-pi x^2) into the Hermite weight
    x = s / math.sqrt(math.pi)
    vals = hermite_functions(M, x) * np.exp(s * s)          # psi_m / exp(-s^2)
    phase = np.exp(-2j * math.pi * np.outer(x, ys))
    quad = (vals * w) @ phase / math.sqrt(math.pi)
    exact = hermite_eigenvalues(M)[:, None] * hermite_functions(M, ys)
    dev = np.abs(quad - exact).max(axis=1) if M else np.zeros(0)
    return {"degrees": M, "points": int(ys.size), "per_degree": dev.tolist(),
            "max_deviation": float(dev.max()) if M else 0.0}


def hermite_shift_matrix(M: int, a: float, out_M: int | None = None) -> np.ndarray:
    """``S[j, m] = integral psi_j(x) psi_m(x + a) dx`` by exact Gauss-Hermite rules."""
    out_M = M if out_M is None else out_M
    n = (M + out_M) // 2 + 4
    y, w = hermgauss(n)
    # psi_j(x) psi_m(x+a) = poly * exp(-2 pi (x + a/2)^2) * exp(-pi a^2 / 2)
    x = y / math.sqrt(2 * math.pi) - a / 2
    P = hermite_functions(out_M, x)
    Q = hermite_functions(M, x + a)
    weight = w * np.exp(y * y) / math.sqrt(2 * math.pi)
    return (P * weight) @ Q.T


@dataclass(frozen=True)
class C0arObject:
    A: FinAbGroup = FinAbGroup(())
    r: int = 0
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if min(self.r, self.p, self.q) < 0:
            raise ValueError("ranks must be nonnegative")

    def dual(self) -> "C0arObject":
        return C0arObject(self.A.dual(), self.p, self.r, self.q)

    @property
    def dimension(self) -> int:
        return self.p + self.q

    @property
    def components_rank(self) -> int:
        return self.r

    def is_compact(self) -> bool:
        return self.r == 0 and self.q == 0

    def is_discrete(self) -> bool:
        return self.p == 0 and self.q == 0

    def axes(self) -> dict[str, list[int]]:
        a = self.A.rank
        return {"A": list(range(a)),
                "Z": list(range(a, a + self.r)),
                "T": list(range(a + self.r, a + self.r + self.p)),
                "R": list(range(a + self.r + self.p, a + self.r + self.p + self.q))}


@dataclass(frozen=True, eq=False)
class SchwartzC0ar:
    obj: C0arObject
    coeffs: np.ndarray
    zbox: int = Z_BOX
    modes: int = FOURIER_MODES
    degree: int = HERMITE_CUTOFF

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.expected_shape():
            raise ValueError(f"coefficient shape {c.shape} != {self.expected_shape()}")
        object.__setattr__(self, "coeffs", c)

    def expected_shape(self) -> tuple[int, ...]:
        o = self.obj
        return (tuple(o.A.moduli) + (2 * self.zbox + 1,) * o.r
                + (2 * self.modes + 1,) * o.p + (self.degree,) * o.q)

    @classmethod
    def zeros(cls, obj: C0arObject, zbox=Z_BOX, modes=FOURIER_MODES, degree=HERMITE_CUTOFF):
        shape = (tuple(obj.A.moduli) + (2 * zbox + 1,) * obj.r
                 + (2 * modes + 1,) * obj.p + (degree,) * obj.q)
        return cls(obj, np.zeros(shape, dtype=complex), zbox, modes, degree)

    def like(self, coeffs, obj=None, zbox=None, modes=None):
        return type(self)(obj or self.obj, coeffs,
                          self.zbox if zbox is None else zbox,
                          self.modes if modes is None else modes, self.degree)

    def __call__(self, a, n, theta, x) -> complex:
        """Point evaluation at ``(a, n, theta, x)``; each argument a sequence."""
        o = self.obj
        c = self.coeffs
        c = c[tuple(int(v) % d for v, d in zip(a, o.A.moduli))] if o.A.rank else c
        for nv in n:
            if abs(nv) > self.zbox:
                return 0j
            c = c[int(nv) + self.zbox]
        ks = np.arange(-self.modes, self.modes + 1)
        for th in theta:
            c = np.tensordot(np.exp(2j * np.pi * ks * th), c, axes=(0, 0))
        for xv in x:
            c = np.tensordot(hermite_functions(self.degree, xv), c, axes=(0, 0))
        return complex(c)


class DistC0ar(SchwartzC0ar):
    """Distribution with a kernel in the same bases.

    ``<H, f> = sum_a sum_n int_T int_R H f``: T-modes pair ``k`` with ``-k``
    and Hermite coefficients pair diagonally (the basis is real orthonormal).
    """

    def pair(self, f: SchwartzC0ar) -> complex:
        if f.obj != self.obj:
            raise ValueError("pairing across different objects")
        g = f.coeffs
        for ax in self.obj.axes()["T"]:
            g = np.flip(g, axis=ax)
        return complex(np.sum(self.coeffs * g))


@dataclass(frozen=True)
class MeasureC0ar:
    obj: C0arObject
    scalar: complex = 1.0

    def inverse(self) -> "MeasureC0ar":
        if self.scalar == 0:
            raise ValueError("zero measure has no inverse")
        return MeasureC0ar(self.obj.dual(), 1.0 / (self.obj.A.order * self.scalar))

    def integrate(self, f: SchwartzC0ar) -> complex:
        """Total integral of ``f`` against this measure."""
        c = f.coeffs
        o = f.obj
        ax = o.axes()
        for _ in ax["A"]:
            c = c.sum(axis=0)
        for _ in ax["Z"]:
            c = c.sum(axis=0)
        for _ in ax["T"]:
            c = c[f.modes]
        w = hermite_integrals(f.degree)
        for _ in ax["R"]:
            c = np.tensordot(w, c, axes=(0, 0))
        return complex(self.scalar * c)


def _dual_layout(f: SchwartzC0ar) -> tuple[np.ndarray, int, int]:
    o = f.obj
    ax = o.axes()
    c = f.coeffs
    if o.A.rank:
        c = np.fft.fftn(c, axes=ax["A"])
    for a in ax["Z"]:
        c = np.flip(c, axis=a)      # mode k on the circle carries the value at n = -k
    for a in ax["R"]:
        shape = [1] * c.ndim
        shape[a] = f.degree
        c = c * hermite_eigenvalues(f.degree).reshape(shape)
    order = ax["A"] + ax["T"] + ax["Z"] + ax["R"]
    return np.transpose(c, order), f.modes, f.zbox


def fourier_c0ar(f: SchwartzC0ar, mu: MeasureC0ar) -> SchwartzC0ar:
    """Fourier transform; Z and T exchange roles and boxes."""
    if mu.obj != f.obj:
        raise ValueError("measure and function live on different objects")
    c, zbox, modes = _dual_layout(f)
    return type(f)(f.obj.dual(), mu.scalar * c, zbox, modes, f.degree)


def fourier_c0ar_dist(H: DistC0ar, nu: MeasureC0ar) -> DistC0ar:
    """Transpose of ``fourier_c0ar(., nu)`` with ``nu`` on the dual object."""
    if nu.obj != H.obj.dual():
        raise ValueError("measure must live on the dual object")
    c, zbox, modes = _dual_layout(H)
    return DistC0ar(H.obj.dual(), nu.scalar * c, zbox, modes, H.degree)


def reflect_ar(f: SchwartzC0ar) -> SchwartzC0ar:
    """``f(-b)``."""
    o = f.obj
    ax = o.axes()
    c = f.coeffs
    for a in ax["A"]:
        c = np.roll(np.flip(c, axis=a), 1, axis=a)
    for a in ax["Z"] + ax["T"]:
        c = np.flip(c, axis=a)
    for a in ax["R"]:
        shape = [1] * c.ndim
        shape[a] = f.degree
        c = c * ((-1.0) ** np.arange(f.degree)).reshape(shape)
    return f.like(c)


def translate(f: SchwartzC0ar, a=(), n=(), theta=(), x=(), tol: float = 1e-8):
    """``(T_s f)(b) = f(b + s)`` for ``s = (a, n, theta, x)``.

    Returns ``(g, residual)``; ``residual`` bounds the L2 mass lost to the
    Hermite cutoff.  Raises :class:`CutoffOverflow` when a Z-shift pushes
    nonzero values out of the box or the Hermite residual exceeds ``tol``.
    """
    o = f.obj
    ax = o.axes()
    c = f.coeffs
    for axis, s in zip(ax["A"], a):
        c = np.roll(c, -int(s), axis=axis)
    for axis, s in zip(ax["Z"], n):
        s = int(s)
        if s == 0:
            continue
        moved = np.roll(c, -s, axis=axis)
        lost = np.take(c, range(0, s), axis=axis) if s > 0 else np.take(
            c, range(c.shape[axis] + s, c.shape[axis]), axis=axis)
        if np.any(np.abs(lost) > 0):
            raise CutoffOverflow("Z-shift moves nonzero values out of the box")
        idx = range(c.shape[axis] - s, c.shape[axis]) if s > 0 else range(0, -s)
        sl = [slice(None)] * c.ndim
        sl[axis] = list(idx)
        moved[tuple(sl)] = 0
        c = moved
    ks = np.arange(-f.modes, f.modes + 1)
    for axis, t in zip(ax["T"], theta):
        shape = [1] * c.ndim
        shape[axis] = len(ks)
        c = c * np.exp(2j * np.pi * ks * t).reshape(shape)
    residual = 0.0
    for axis, s in zip(ax["R"], x):
        if s == 0:
            continue
        S = hermite_shift_matrix(f.degree, float(s))
        before = np.sum(np.abs(c) ** 2)
        c = np.moveaxis(np.tensordot(S, c, axes=(1, axis)), 0, axis)
        after = np.sum(np.abs(c) ** 2)
        residual = max(residual, math.sqrt(max(before - after, 0.0)))
    if residual > tol:
        raise CutoffOverflow(f"Hermite re-expansion residual {residual:.3e} exceeds {tol:.1e}")
    return f.like(c), residual


def poisson_lattice_check(coeffs, max_terms: int = 10_000, tail_tol: float = 1e-14) -> dict:
    """Compare ``sum f(n)`` with ``sum (F f)(n)`` over the integers.

    ``coeffs`` are Hermite coefficients of ``f`` on R.  Both sums are
    truncated at ``|n| <= N`` with ``N`` grown until two consecutive shells
    on both sides fall below ``tail_tol``.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be a finite 1-d vector")
    if len(c) > 4 * HERMITE_CUTOFF:
        raise ValueError("coefficient vector too long to decay within the lattice box")
    M = len(c)
    fc = c * hermite_eigenvalues(M)
    lhs = rhs = 0j
    quiet = 0
    N = -1
    for n in range(max_terms):
        pts = np.array([0.0]) if n == 0 else np.array([-n, n], dtype=float)
        basis = hermite_functions(M, pts)
        a = complex(np.sum(c @ basis))
        b = complex(np.sum(fc @ basis))
        lhs += a
        rhs += b
        N = n
        quiet = quiet + 1 if max(abs(a), abs(b)) < tail_tol else 0
        if quiet >= 2:
            break
    else:
        raise ValueError("coefficient vector does not decay within the lattice box")
    return {"lhs": lhs, "rhs": rhs, "N": N, "max_deviation": abs(lhs - rhs)}


# ---------------------------------------------------------------------------
# coordinate-aligned triples


@dataclass(frozen=True)
class AdmissibleTripleC0ar:
    """``G1 -> G2 -> G3`` built from a finite triple and a split of the
    continuous coordinates of ``G2``.

    ``roles`` assigns each Z/T/R coordinate of ``G2`` (in axis order) to
    ``"sub"`` (it belongs to G1) or ``"quot"`` (it survives in G3).
    """

    finite: AdmissibleTripleC0
    G2: C0arObject
    roles: tuple[str, ...]

    def __post_init__(self):
        o = self.G2
        if o.A != self.finite.G2:
            raise ValueError("finite part does not match G2")
        if len(self.roles) != o.r + o.p + o.q:
            raise ValueError("one role per continuous coordinate is required")
        if any(r not in ("sub", "quot") for r in self.roles):
            raise ValueError("roles are 'sub' or 'quot'")

    def _kinds(self):
        o = self.G2
        return ["Z"] * o.r + ["T"] * o.p + ["R"] * o.q

    def _part(self, role: str, A: FinAbGroup) -> C0arObject:
        k = [kind for kind, r in zip(self._kinds(), self.roles) if r == role]
        return C0arObject(A, k.count("Z"), k.count("T"), k.count("R"))

    @property
    def G1(self) -> C0arObject:
        return self._part("sub", self.finite.G1)

    @property
    def G3(self) -> C0arObject:
        return self._part("quot", self.finite.G3)

    def continuous_axes(self, role: str) -> list[int]:
        a = self.G2.A.rank
        return [a + i for i, r in enumerate(self.roles) if r == role]


def _move_finite(c: np.ndarray, nA_in: int, nA_out: int, op) -> np.ndarray:
    """Apply a finite-group op to the leading ``nA_in`` axes of every slice."""
    rest = c.shape[nA_in:]
    flat = c.reshape(c.shape[:nA_in] + (-1,)) if nA_in else c.reshape((1,) + (-1,))
    cols = [op(flat[..., j]) for j in range(flat.shape[-1])]
    out = np.stack(cols, axis=-1) if cols else np.zeros(flat.shape)
    return out.reshape(out.shape[:nA_out] + rest) if nA_out else out.reshape(rest)


def images_c0ar(T: AdmissibleTripleC0ar, f: SchwartzC0ar, mode: str,
                mu: MeasureC0ar | None = None) -> SchwartzC0ar:
    """Image maps on functions: ``epi_push``, ``mono_pull``, ``epi_pull``, ``mono_push``."""
    kinds = T._kinds()
    nA2 = T.G2.A.rank
    if mode == "epi_push":
        if f.obj != T.G2 or mu is None or mu.obj != T.G1:
            raise ValueError("epi_push needs f on G2 and a measure on G1")
        c = f.coeffs
        subs = T.continuous_axes("sub")
        # integrate out continuous G1 coordinates, highest axis first
        for axis in sorted(subs, reverse=True):
            kind = kinds[axis - nA2]
            if kind == "Z":
                c = c.sum(axis=axis)
            elif kind == "T":
                c = np.take(c, f.modes, axis=axis)
            else:
                c = np.tensordot(c, hermite_integrals(f.degree), axes=([axis], [0]))
        c = _move_finite(c, nA2, T.finite.G3.rank,
                         lambda v: push_along(T.finite.beta, v.reshape(T.finite.G2.shape)))
        return f.like(mu.scalar * c, obj=T.G3)
    if mode == "mono_pull":
        if f.obj != T.G2:
            raise ValueError("mono_pull needs f on G2")
        c = f.coeffs
        for axis in sorted(T.continuous_axes("quot"), reverse=True):
            kind = kinds[axis - nA2]
            if kind == "Z":
                c = np.take(c, f.zbox, axis=axis)
            elif kind == "T":
                c = c.sum(axis=axis)
            else:
                c = np.tensordot(c, hermite_functions(f.degree, 0.0), axes=([axis], [0]))
        c = _move_finite(c, nA2, T.finite.G1.rank,
                         lambda v: pull_along(T.finite.alpha, v.reshape(T.finite.G2.shape)))
        return f.like(c, obj=T.G1)
    if mode == "epi_pull":
        if not T.G1.is_compact():
            raise ValueError("epi_pull requires a compact G1")
        if f.obj != T.G3:
            raise ValueError("epi_pull needs f on G3")
        c = _move_finite(f.coeffs, T.finite.G3.rank, nA2,
                         lambda v: pull_along(T.finite.beta, v.reshape(T.finite.G3.shape)))
        for axis in sorted(T.continuous_axes("sub")):
            e = np.zeros(2 * f.modes + 1)
            e[f.modes] = 1.0
            c = np.moveaxis(np.multiply.outer(c, e), -1, axis)
        return f.like(c, obj=T.G2)
    if mode == "mono_push":
        if not T.G3.is_discrete():
            raise ValueError("mono_push requires a discrete G3")
        if f.obj != T.G1:
            raise ValueError("mono_push needs f on G1")
        c = _move_finite(f.coeffs, T.finite.G1.rank, nA2,
                         lambda v: extend_along(T.finite.alpha, v.reshape(T.finite.G1.shape)))
        for axis in sorted(T.continuous_axes("quot")):
            e = np.zeros(2 * f.zbox + 1)
            e[f.zbox] = 1.0
            c = np.moveaxis(np.multiply.outer(c, e), -1, axis)
        return f.like(c, obj=T.G2)
    raise ValueError(f"unknown mode {mode!r}")


def images_c0ar_dist(T: AdmissibleTripleC0ar, H: DistC0ar, mode: str,
                     mu: MeasureC0ar | None = None) -> DistC0ar:
    """Transposes of :func:`images_c0ar`, named after the function-level mode.

    ``epi_push`` gives the pullback of a distribution on G3 with ``mu``;
    ``mono_pull`` the extension of a distribution on G1; ``epi_pull`` the
    fiber integral of a distribution on G2; ``mono_push`` the restriction.
    """
    kinds = T._kinds()
    nA2 = T.G2.A.rank
    if mode == "epi_push":
        if H.obj != T.G3 or mu is None or mu.obj != T.G1:
            raise ValueError("needs H on G3 and a measure on G1")
        c = _move_finite(H.coeffs, T.finite.G3.rank, nA2,
                         lambda v: pull_along(T.finite.beta, v.reshape(T.finite.G3.shape)))
        for axis in sorted(T.continuous_axes("sub")):
            kind = kinds[axis - nA2]
            if kind == "Z":
                e = np.ones(2 * H.zbox + 1)
            elif kind == "T":
                e = np.zeros(2 * H.modes + 1)
                e[H.modes] = 1.0
            else:
                e = hermite_integrals(H.degree)
            c = np.moveaxis(np.multiply.outer(c, e), -1, axis)
        return DistC0ar(T.G2, mu.scalar * c, H.zbox, H.modes, H.degree)
    if mode == "mono_pull":
        if H.obj != T.G1:
            raise ValueError("needs H on G1")
        c = _move_finite(H.coeffs, T.finite.G1.rank, nA2,
                         lambda v: extend_along(T.finite.alpha, v.reshape(T.finite.G1.shape)))
        for axis in sorted(T.continuous_axes("quot")):
            kind = kinds[axis - nA2]
            if kind == "Z":
                e = np.zeros(2 * H.zbox + 1)
                e[H.zbox] = 1.0
            elif kind == "T":
                e = np.ones(2 * H.modes + 1)
            else:
                e = hermite_functions(H.degree, 0.0)
            c = np.moveaxis(np.multiply.outer(c, e), -1, axis)
        return DistC0ar(T.G2, c, H.zbox, H.modes, H.degree)
    if mode == "epi_pull":
        if not T.G1.is_compact():
            raise ValueError("requires a compact G1")
        c = H.coeffs
        for axis in sorted(T.continuous_axes("sub"), reverse=True):
            c = np.take(c, H.modes, axis=axis)
        c = _move_finite(c, nA2, T.finite.G3.rank,
                         lambda v: push_along(T.finite.beta, v.reshape(T.finite.G2.shape)))
        return DistC0ar(T.G3, c, H.zbox, H.modes, H.degree)
    if mode == "mono_push":
        if not T.G3.is_discrete():
            raise ValueError("requires a discrete G3")
        c = H.coeffs
        for axis in sorted(T.continuous_axes("quot"), reverse=True):
            c = np.take(c, H.zbox, axis=axis)
        c = _move_finite(c, nA2, T.finite.G1.rank,
                         lambda v: pull_along(T.finite.alpha, v.reshape(T.finite.G2.shape)))
        return DistC0ar(T.G1, c, H.zbox, H.modes, H.degree)
    raise ValueError(f"unknown mode {mode!r}")


def dual_triple_ar(T: AdmissibleTripleC0ar) -> AdmissibleTripleC0ar:
    """``dual(G3) -> dual(G2) -> dual(G1)``; roles swap with the axis layout."""
    kinds = T._kinds()
    # dual layout of G2: T-coordinates become Z, then Z become T, R stays
    by_kind = {k: [r for kk, r in zip(kinds, T.roles) if kk == k] for k in "ZTR"}
    flip = {"sub": "quot", "quot": "sub"}
    roles = tuple(flip[r] for r in by_kind["T"] + by_kind["Z"] + by_kind["R"])
    return AdmissibleTripleC0ar(T.finite.dual(), T.G2.dual(), roles)
