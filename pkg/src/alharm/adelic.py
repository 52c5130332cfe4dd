"""Desk-scale adelic computations.

Function-field instances live on the projective line over F_q: places are
monic irreducible polynomials in ``t`` plus the place at infinity with local
parameter ``1/t``.  Every dimension below is the rank of an explicit matrix
over F_q, computed by Gaussian elimination.

Truncations work on windows of local exponents.  A window ``[lo, hi]`` at a
place of degree ``d`` has ``(hi - lo + 1) d`` coordinates over F_q: the
coefficient of ``t^j`` in the ``pi``-adic digit of ``pi^e``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

from .archimed import C0arObject
from .finabel import FinAbGroup
from .filt1 import (FilteredObjectAr1, ar_steps_exact, dual1, is_compact1, is_discrete1,
                    laurent_object)


class InsufficientTruncation(ValueError):
    """The requested window cannot see the quantity being computed."""


# ---------------------------------------------------------------------------
# exact linear algebra


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def row_reduce(M, p: int | None) -> tuple[np.ndarray | list, list[int]]:
    """Reduced row echelon form and pivot columns, over F_p or over Q (``p=None``)."""
    if p is None:
        A = [[Fraction(x) for x in row] for row in M]
        ncols = len(A[0]) if A else 0
        pivots, r = [], 0
        for c in range(ncols):
            k = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
            if k is None:
                continue
            A[r], A[k] = A[k], A[r]
            piv = A[r][c]
            A[r] = [x / piv for x in A[r]]
            for i in range(len(A)):
                if i != r and A[i][c] != 0:
                    f = A[i][c]
                    A[i] = [x - f * y for x, y in zip(A[i], A[r])]
            pivots.append(c)
            r += 1
        return A[:r], pivots
    A = np.array(M, dtype=np.int64).reshape(len(M), -1) % p
    nrows, ncols = A.shape
    pivots, r = [], 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        A = (A - np.outer(col, A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M, p: int | None) -> int:
    if len(M) == 0:
        return 0
    return len(row_reduce(M, p)[1])


def span_intersection_dim(A, B, p: int | None) -> int:
    """``dim(span A & span B)`` from ``dim A + dim B - dim(A + B)``."""
    return rank(A, p) + rank(B, p) - rank(list(A) + list(B), p)


# ---------------------------------------------------------------------------
# polynomials over F_p, coefficient tuples from the constant term up


def _trim(a) -> tuple[int, ...]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def padd(a, b, p):
    n = max(len(a), len(b))
    return _trim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n))


def pscale(a, c, p):
    return _trim((x * c) % p for x in a)


def pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = (a[k + len(b) - 1] * inv) % p
        q[k] = c
        if c:
            for j, y in enumerate(b):
                a[k + j] = (a[k + j] - c * y) % p
    return _trim(q), _trim(a)


def ppow(a, n, p):
    out = (1,)
    for _ in range(n):
        out = pmul(out, a, p)
    return out


def pinv_mod(a, m, p):
    """Inverse of ``a`` modulo ``m``."""
    r0, r1, s0, s1 = m, pdivmod(a, m, p)[1], (), (1,)
    while r1:
        qq, r = pdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, padd(s0, pscale(pmul(qq, s1, p), p - 1, p), p)
    if len(r0) != 1:
        raise ValueError("not invertible")
    return pdivmod(pscale(s0, pow(r0[0], -1, p), p), m, p)[1]


def monic_polys(q: int, d: int):
    for tail in itertools.product(range(q), repeat=d):
        yield tuple(tail) + (1,)


def is_irreducible(f, q: int) -> bool:
    d = len(f) - 1
    if d < 1:
        return False
    return all(pdivmod(f, g, q)[1] for k in range(1, d // 2 + 1) for g in monic_polys(q, k))


# ---------------------------------------------------------------------------
# places and truncated adeles


@dataclass(frozen=True)
class Place:
    """A place of F_q(t) (``poly`` monic irreducible, ``None`` for infinity)
    or of Q (``prime``, ``None`` for the archimedean place)."""

    q: int | None = None
    poly: tuple[int, ...] | None = None
    prime: int | None = None
    degree: int = field(init=False)

    def __post_init__(self):
        if self.q is None:
            if self.prime is not None and not _is_prime(self.prime):
                raise ValueError(f"{self.prime} is not prime")
            object.__setattr__(self, "degree", 1)
            return
        if not _is_prime(self.q):
            raise ValueError("function-field places need a prime field size")
        if self.poly is None:
            object.__setattr__(self, "degree", 1)
            return
        f = _trim(self.poly)
        if not f or f[-1] != 1 or not is_irreducible(f, self.q):
            raise ValueError(f"{self.poly} is not monic irreducible over F_{self.q}")
        object.__setattr__(self, "poly", f)
        object.__setattr__(self, "degree", len(f) - 1)

    @property
    def is_infinite(self) -> bool:
        return self.poly is None and self.prime is None

    def __str__(self):
        if self.q is None:
            return "inf" if self.prime is None else str(self.prime)
        if self.poly is None:
            return "inf"
        return "+".join(f"{c}t^{k}" for k, c in enumerate(self.poly) if c)

    @classmethod
    def rational(cls, q: int, a: int | None) -> "Place":
        """``t = a`` or infinity when ``a is None``."""
        return cls(q, None) if a is None else cls(q, ((-a) % q, 1))


def places_upto(q: int, d: int) -> list[Place]:
    """Infinity, then monic irreducibles by degree and coefficients."""
    out = [Place(q, None)]
    for k in range(1, d + 1):
        out += [Place(q, f) for f in monic_polys(q, k) if is_irreducible(f, q)]
    return out


@dataclass(frozen=True)
class TruncatedAdele:
    """Coordinates of ``prod_{x in S} pi_x^lo O_x / pi_x^(hi+1) O_x``.

    Components outside ``S`` are integral and drop out of every quotient we
    form.  ``windows`` maps each place to its exponent range.
    """

    places: tuple[Place, ...]
    windows: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.places) != len(self.windows):
            raise ValueError("one window per place")
        if len(set(self.places)) != len(self.places):
            raise ValueError("repeated place")

    @classmethod
    def uniform(cls, places, lo: int, hi: int) -> "TruncatedAdele":
        return cls(tuple(places), tuple((lo, hi) for _ in places))

    @property
    def offsets(self) -> list[int]:
        out, k = [], 0
        for x, (lo, hi) in zip(self.places, self.windows):
            out.append(k)
            k += max(hi - lo + 1, 0) * x.degree
        out.append(k)
        return out

    @property
    def dimension(self) -> int:
        return self.offsets[-1]

    def coords(self, pred) -> list[int]:
        """Indices of coordinates ``(x, e)`` with ``pred(x, e)``."""
        off = self.offsets
        out = []
        for k, (x, (lo, hi)) in enumerate(zip(self.places, self.windows)):
            for e in range(lo, hi + 1):
                if pred(x, e):
                    base = off[k] + (e - lo) * x.degree
                    out.extend(range(base, base + x.degree))
        return out

    def unit_rows(self, pred) -> list[list[int]]:
        n = self.dimension
        rows = []
        for i in self.coords(pred):
            r = [0] * n
            r[i] = 1
            rows.append(r)
        return rows

    def embed(self, g, P, q: int, only=None) -> list[int]:
        """The diagonal image of ``g / P``; ``only`` restricts to one place."""
        v = []
        for x, (lo, hi) in zip(self.places, self.windows):
            if only is not None and x != only:
                v.extend([0] * (max(hi - lo + 1, 0) * x.degree))
            else:
                v.extend(local_expansion(g, P, x, lo, hi, q))
        return v


def local_expansion(g, P, x: Place, lo: int, hi: int, q: int) -> list[int]:
    """Window ``[lo, hi]`` of the expansion of ``g/P`` at ``x``."""
    if hi < lo:
        return []
    out = [0] * ((hi - lo + 1) * x.degree)
    if not g:
        return out
    if x.is_infinite:
        # coefficient of u^k = t^-k; divide g t^K by P with K >= hi
        K = max(hi, 0)
        Q, _ = pdivmod((0,) * K + tuple(g), P, q)
        for k in range(lo, hi + 1):
            j = K - k
            if 0 <= j < len(Q):
                out[k - lo] = Q[j]
        return out
    pi = x.poly
    m, rest = 0, P
    while True:
        qq, r = pdivmod(rest, pi, q)
        if r:
            break
        m, rest = m + 1, qq
    n = hi + m + 1
    if n <= 0:
        return out
    mod = ppow(pi, n, q)
    r = pdivmod(pmul(g, pinv_mod(rest, mod, q), q), mod, q)[1]
    d = x.degree
    for k in range(n):
        r, digit = pdivmod(r, pi, q)
        e = k - m
        if lo <= e <= hi:
            for j, c in enumerate(digit):
                out[(e - lo) * d + j] = c
    return out


def _pole_basis(q: int, places, bound: dict) -> tuple[list, tuple]:
    """Numerators ``t^k`` over ``prod pi_x^bound[x]``: the functions with
    poles only in ``places`` of order at most ``bound`` (at infinity,
    ``bound`` may be negative, forcing zeros)."""
    P = (1,)
    for x in places:
        if not x.is_infinite:
            P = pmul(P, ppow(x.poly, bound[x], q), q)
    inf = next((x for x in places if x.is_infinite), None)
    top = len(P) - 1 + (bound[inf] if inf is not None else 0)
    return [(0,) * k + (1,) for k in range(top + 1)], P


# ---------------------------------------------------------------------------
# curves: adelic complex of P^1


def adelic_complex_curve(q: int, n: int, truncation: int, place_degree: int = 1) -> dict:
    """``H^0``, ``H^1`` of ``O(n inf)`` from ``k(t) (+) A(D) -> A``.

    Modulo ``A(D)`` an adele is its tuple of principal parts, so the complex
    becomes ``V -> W``: ``V`` the functions with poles in the truncation
    set of order at most ``truncation``, ``W`` the principal parts of the
    same orders beyond ``D``.
    """
    if not _is_prime(q):
        raise ValueError(f"q = {q} must be prime")
    N = truncation
    if N < n + 2:
        raise InsufficientTruncation(f"truncation {N} < n + 2 = {n + 2}")
    S = places_upto(q, place_degree)
    Nf = max(N, 0)
    bound = {x: (N if x.is_infinite else Nf) for x in S}
    nums, P = _pole_basis(q, S, bound)
    W = TruncatedAdele(tuple(S), tuple((-N, -n - 1) if x.is_infinite else (-Nf, -1) for x in S))
    M = [W.embed(g, P, q) for g in nums]
    r = rank(M, q) if M and W.dimension else 0
    h0 = len(nums) - r
    h1 = W.dimension - r
    return {"q": q, "n": n, "truncation": N, "places": [str(x) for x in S],
            "h0": h0, "h1": h1, "euler": h0 - h1, "domain_dim": len(nums), "target_dim": W.dimension}


def curve_h0_bruteforce(q: int, n: int, denom_degree: int = 1) -> int:
    """``dim L(n inf)`` by listing reduced fractions with small denominators.

    Counts distinct ``g/h`` (``h`` monic, ``deg h <= denom_degree``) with no
    finite pole and pole order at most ``n`` at infinity; the count is
    ``q^h0``.
    """
    seen = set()
    top = max(n, 0) + denom_degree
    dens = [h for d in range(denom_degree + 1) for h in monic_polys(q, d)]
    for coeffs in itertools.product(range(q), repeat=top + 1):
        g = _trim(coeffs)
        for h in dens:
            if not g:
                seen.add(((), (1,)))
                continue
            # reduce g/h
            a, b = g, h
            while b:
                a, b = b, pdivmod(a, b, q)[1]
            c = pscale(a, pow(a[-1], -1, q), q)
            gg, hh = pdivmod(g, c, q)[0], pdivmod(h, c, q)[0]
            if len(hh) > 1:
                continue
            if len(gg) - 1 - (len(hh) - 1) <= n:
                seen.add((gg, hh))
    size, h0 = len(seen), 0
    while q ** h0 < size:
        h0 += 1
    if q ** h0 != size:
        raise AssertionError("fraction count is not a power of q")
    return h0


def curve_h1_bruteforce(q: int, n: int) -> int:
    """Serre duality on the line: ``h1(n inf) = h0((-2 - n) inf)``."""
    return curve_h0_bruteforce(q, -2 - n)


def curve_quotient_sequence_check(q: int, p: int | None, level: int, place_degree: int = 1) -> dict:
    """``0 -> prod_{x != p} O_x -> A / k(t) -> K_p / A_p -> 0`` at a level.

    Adeles are truncated to ``pi^-L O / pi^L O`` on the places of degree at
    most ``place_degree``; ``k(t)`` to functions with poles there of order
    at most ``L``.  Every term is a subquotient of the same window, and
    each exactness statement becomes a rank identity.
    """
    if not _is_prime(q):
        raise ValueError(f"q = {q} must be prime")
    L = level
    if L < 0:
        raise InsufficientTruncation("level must be nonnegative")
    xp = Place.rational(q, p)
    S = places_upto(q, place_degree)
    if xp not in S:
        raise ValueError("p must be a rational place")
    T = TruncatedAdele.uniform(S, -L, L - 1)
    nums, P = _pole_basis(q, S, {x: L for x in S})
    V = [T.embed(g, P, q) for g in nums] if T.dimension else []
    O = T.unit_rows(lambda x, e: x != xp and e >= 0)
    Kp = T.unit_rows(lambda x, e: x == xp)
    if xp.is_infinite:
        Ap = [((0,) * k + (1,), (1,)) for k in range(L + 1)]
    else:
        Ap = [((1,), ppow(xp.poly, k, q)) for k in range(L + 1)]
    Ap_diag = [T.embed(g, h, q) for g, h in Ap] if T.dimension else []
    Ap_local = [T.embed(g, h, q, only=xp) for g, h in Ap] if T.dimension else []

    dim_T, r_V = T.dimension, rank(V, q)
    dim_Q = dim_T - r_V
    injectivity = span_intersection_dim(O, V, q)
    r_sum = rank(O + Kp + V, q)
    approximation = dim_T - r_sum
    # K & (prod_{x != p} O_x x K_p) = A_p
    meet = r_V + rank(O + Kp, q) - r_sum
    kernel = abs(meet - rank(Ap_diag, q))
    dim_R = len(Kp) - rank(Ap_local, q)
    dim_O = len(O)
    counting = dim_Q - dim_O - dim_R
    defect = injectivity + approximation + kernel + abs(counting)

    # K_p / A_p is spanned by t_p F_q[[t_p]]: a compact object
    pos = T.unit_rows(lambda x, e: x == xp and e >= 1)
    complement = rank(Ap_local + pos, q) == len(Kp) and len(pos) == dim_R
    Rp = laurent_object(q, -(L - 1) if L > 1 else 0, 0, emin=1) if L > 1 else None
    rp_compact = complement and (Rp is None or is_compact1(Rp))
    return {"identity": "curve_quotient_sequence", "q": q, "p": str(xp), "level": L,
            "places": [str(x) for x in S],
            "dims": {"window": dim_T, "functions": r_V, "quotient": dim_Q, "integral": dim_O,
                     "Kp_mod_Ap": dim_R},
            "defects": {"injectivity": injectivity, "approximation": approximation,
                        "kernel": kernel, "counting": counting},
            "defect": defect, "compact": {"integral": True, "Kp_mod_Ap": rp_compact},
            "passed": defect == 0 and rp_compact}


# ---------------------------------------------------------------------------
# the rational number field


def _crt(residues, moduli) -> int:
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        k = ((r - x) * pow(m, -1, n)) % n
        x, m = x + m * k, m * n
    return x % m


def _prime_power(m: int, p: int) -> int:
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    if m != 1 or k == 0:
        raise ValueError(f"modulus {m * p ** k} is not a positive power of {p}")
    return k


def number_field_desk_check(primes, moduli) -> dict:
    """Strong approximation for Q and the triple ``P -> Q -> R`` at truncation.

    ``Q`` is the adele ring filtered by ``m Z^ x 0`` and ``m Z^ x R``, ``P``
    the diagonal copy of Q and ``R = A / Q``, along the chain that lowers one
    prime exponent at a time from ``M = prod moduli`` to 1.
    """
    primes, moduli = list(primes), list(moduli)
    if len(primes) != len(moduli):
        raise ValueError("one modulus per prime")
    places = [Place(prime=p) for p in primes]
    if len(set(primes)) != len(primes):
        raise ValueError("repeated prime")
    ks = [_prime_power(m, p) for p, m in zip(primes, moduli)]
    M = prod(moduli)

    def image(step: int, mods) -> set:
        return {tuple((step * n) % m for m in mods) for n in range(M)}

    brute = len(image(1, moduli)) == M
    constructive = all(tuple(_crt(r, moduli) % m for m in moduli) == tuple(r)
                       for r in itertools.product(*(range(m) for m in moduli)))

    # chain m_0 = M > m_1 > ... > 1
    chain, cur, exps = [M], M, list(ks)
    for i, p in enumerate(primes):
        while exps[i]:
            exps[i] -= 1
            cur //= p
            chain.append(cur)
    arch = [(C0arObject(r=1), C0arObject(q=1), C0arObject(p=1))]
    steps = []
    for m, m1 in zip(chain, chain[1:]):
        local = [p ** _val(m, p) for p in primes]
        idx_Q = prod(p ** (_val(m, p) - _val(m1, p)) for p in primes)
        idx_P = m // m1
        hit = len(image(m1, local))
        idx_R = idx_Q // hit
        steps.append((idx_P, idx_Q, idx_R))
    objs = []
    for role in range(3):
        ss = [arch[0][role]] + [C0arObject(FinAbGroup((s[role],)) if s[role] > 1 else FinAbGroup(()))
                                for s in steps]
        tails = [("trivial", "finite-stable"), ("finite-stable", "finite-stable"),
                 ("finite-stable", "trivial")][role]
        objs.append(FilteredObjectAr1(0, tuple(ss), *tails, 0))
    Pobj, Qobj, Robj = objs
    structure = {"P_discrete": is_discrete1(Pobj), "R_compact": is_compact1(Robj),
                 "steps_exact": ar_steps_exact(Pobj, Qobj, Robj),
                 "R_finite_steps_trivial": all(s[2] == 1 for s in steps)}
    dP, dQ, dR = dual1(Pobj), dual1(Qobj), dual1(Robj)
    duality = {"dual_P_like_R": (is_compact1(dP), is_discrete1(dP)) == (is_compact1(Robj), is_discrete1(Robj)),
               "dual_R_like_P": (is_compact1(dR), is_discrete1(dR)) == (is_compact1(Pobj), is_discrete1(Pobj)),
               "dual_Q_like_Q": (is_compact1(dQ), is_discrete1(dQ)) == (is_compact1(Qobj), is_discrete1(Qobj))
               and sorted(map(repr, dQ.steps)) == sorted(repr(s.dual()) for s in Qobj.steps)
               and sorted(repr(s) for s in Qobj.steps) == sorted(repr(s.dual()) for s in Qobj.steps)}
    passed = brute and constructive and all(structure.values()) and all(duality.values())
    return {"identity": "number_field_triple", "places": [str(x) for x in places], "moduli": moduli,
            "surjective": {"bruteforce": brute, "crt": constructive},
            "chain": chain, "step_orders": [list(s) for s in steps],
            "structure": structure, "duality": duality, "passed": passed}


def _val(m: int, p: int) -> int:
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# surfaces: monomial boxes in k((u))((t))


@dataclass(frozen=True)
class MonomialBoxSpace:
    """Monomials ``u^a t^b`` in a box, with named coordinate subspaces.

    A subspace is ``(var, bound)``: all monomials whose ``var`` exponent is
    at most ``bound``.  ``q`` is a prime or ``"R"``.
    """

    q: int | str
    box: tuple[int, int, int, int]
    subspaces: tuple[tuple[str, str, int], ...] = ()

    def __post_init__(self):
        a0, a1, b0, b1 = self.box
        if a1 < a0 or b1 < b0:
            raise ValueError("empty box")
        if self.q != "R" and not _is_prime(self.q):
            raise ValueError("base field must be F_q with q prime or R")
        for name, var, _ in self.subspaces:
            if var not in ("u", "t"):
                raise ValueError(f"subspace {name}: variable must be u or t")

    @property
    def monomials(self) -> list[tuple[int, int]]:
        a0, a1, b0, b1 = self.box
        return [(a, b) for b in range(b0, b1 + 1) for a in range(a0, a1 + 1)]

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def _field(self):
        return None if self.q == "R" else self.q

    def subspace_rows(self, name: str) -> list[list[int]]:
        spec = next((s for s in self.subspaces if s[0] == name), None)
        if spec is None:
            raise KeyError(name)
        _, var, bound = spec
        mons = self.monomials
        rows = []
        for k, (a, b) in enumerate(mons):
            if (a if var == "u" else b) <= bound:
                r = [0] * len(mons)
                r[k] = 1
                rows.append(r)
        return rows

    def quotient_dimension(self, names) -> int:
        rows = [r for n in names for r in self.subspace_rows(n)]
        return self.dimension - rank(rows, self._field())

    def quotient_basis(self, names) -> list[tuple[int, int]]:
        """Monomials completing the subspaces to the whole box."""
        rows = [r for n in names for r in self.subspace_rows(n)]
        mons = self.monomials
        out = []
        for k, m in enumerate(mons):
            e = [0] * len(mons)
            e[k] = 1
            if rank(rows + [e], self._field()) > rank(rows, self._field()):
                rows.append(e)
                out.append(m)
        return out


def surface_box(q, N: int) -> MonomialBoxSpace:
    """``k((u))((t))`` on ``[-N, N]^2`` with ``B_C2 = k[u^-1]((t))`` and
    ``B_C1 & B_p = k((u))[t^-1]``."""
    return MonomialBoxSpace(q, (-N, N, -N, N), (("B_C2", "u", 0), ("B_C1_Bp", "t", 0)))


def surface_quotient_dimension(q, N: int) -> int:
    """``dim k((u))((t)) / (k[u^-1]((t)) + k((u))[t^-1])`` on the box."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    return surface_box(q, N).quotient_dimension(["B_C2", "B_C1_Bp"])


def _curve_components(q: int, N: int, place_degree: int):
    """Places of a coordinate line and the point ``p`` (coordinate 0)."""
    S = places_upto(q, place_degree)
    return S, Place.rational(q, 0)


def surface_reduction_check(q: int, N: int, place_degree: int = 1, bx_degree: int = 1) -> dict:
    """Both sides of the reduction to the point ``p`` on ``P^1 x P^1``.

    ``C1 = {u = 0}`` has coordinate ``t``, ``C2 = {t = 0}`` coordinate ``u``.
    The left side keeps every place of each curve: windows of
    ``K_{x,C} = k(C)_x((s))`` (``s`` the equation of ``C``) modulo the curve
    fields ``k(C)((s))``, the rings ``B_x`` and the diagonal ``B_p``.  The
    right side is the two-field quotient at ``p``.  A third route is the
    single-field box quotient.
    """
    if not _is_prime(q):
        raise ValueError(f"q = {q} must be prime")
    if N < 0:
        raise InsufficientTruncation("N must be nonnegative")
    S, xp = _curve_components(q, N, place_degree)
    T = TruncatedAdele.uniform(S, -N, N)
    nums, P = _pole_basis(q, S, {x: N for x in S})
    F = [T.embed(g, P, q) for g in nums]
    dT, ndeg = T.dimension, 2 * N + 1
    pofs = T.offsets[S.index(xp)]

    # one curve: (local exponent, transversal degree) windows, block per degree
    def block(rowvec, s):
        out = [0] * (dT * ndeg)
        out[s * dT:(s + 1) * dT] = rowvec
        return out

    def curve_rows():
        rows = []
        for s in range(ndeg):
            rows += [block(v, s) for v in F]
            rows += [block(v, s) for v in T.unit_rows(lambda x, e: x != xp and e >= 0)]
        return rows

    def p_coord(local_e, degree):
        return (degree + N) * dT + pofs + (local_e + N)

    size = dT * ndeg
    rows = []
    for r in curve_rows():
        rows.append(r + [0] * size)
        rows.append([0] * size + r)
    # B_p: u^a t^b goes to both p-components.  On C1 the local exponent is
    # the t-exponent and the degree is the u-exponent; on C2 the reverse.
    for a in range(-N, N + 1):
        for b in range(-N, N + 1):
            r = [0] * (2 * size)
            r[p_coord(b, a)] = 1
            r[size + p_coord(a, b)] = 1
            rows.append(r)
    lhs = 2 * size - rank(rows, q) if rows else 0

    # two-field form at p
    box = [(a, b) for b in range(-N, N + 1) for a in range(-N, N + 1)]
    nb = len(box)
    rows2 = []
    for k, (a, b) in enumerate(box):
        if b <= 0:   # B_C1 = k[t^-1]((u)) in K_{p,C1}
            r = [0] * (2 * nb)
            r[k] = 1
            rows2.append(r)
        if a <= 0:   # B_C2 = k[u^-1]((t)) in K_{p,C2}
            r = [0] * (2 * nb)
            r[nb + k] = 1
            rows2.append(r)
        r = [0] * (2 * nb)
        r[k] = r[nb + k] = 1
        rows2.append(r)
    rhs = 2 * nb - rank(rows2, q)
    single = surface_quotient_dimension(q, N)

    lemma = lemma_degreewise_check(q, N, place_degree)
    bx = bx_window_probe(q, N, bx_degree)
    passed = lhs == rhs == single == N * N and lemma["passed"]
    return {"identity": "surface_reduction", "q": q, "N": N, "places": [str(x) for x in S],
            "dims": {"all_places": lhs, "two_fields": rhs, "single_field": single, "expected": N * N},
            "lemma": lemma, "bx": bx, "passed": passed}


def lemma_degreewise_check(q: int, N: int, place_degree: int = 1) -> dict:
    """``K_C / B_C = (+)_{x != p} K_{x,C} / B_x`` in each transversal degree.

    In one degree this is ``k(C) / A_p`` against principal parts away from
    ``p``; the map must be injective with the truncated ``B_C`` as kernel
    and onto the truncated principal parts.
    """
    S, xp = _curve_components(q, N, place_degree)
    # every transversal degree carries the same map
    nums, P = _pole_basis(q, S, {x: N for x in S})
    W = TruncatedAdele(tuple(x for x in S if x != xp), tuple((-N, -1) for x in S if x != xp))
    M = [W.embed(g, P, q) for g in nums]
    r = rank(M, q) if W.dimension else 0
    # B_C: functions regular off p with pole order <= N there
    kernel = len(nums) - r - (N + 1)
    cokernel = W.dimension - r
    degrees = 2 * N + 1
    defect = degrees * (abs(kernel) + cokernel)
    return {"identity": "lemma_degreewise", "degrees": degrees, "kernel_defect": kernel,
            "cokernel": cokernel, "defect": defect, "passed": defect == 0}


def bx_window_probe(q: int, N: int, degree: int = 1) -> dict:
    """Does cutting curves at ``degree`` enlarge ``B_x`` inside the window?

    ``B_x`` is cut out by all curves through ``x``.  For ``x`` on ``C2`` away
    from ``p``, in local coordinates ``(v, t)``, each ``1/h`` with
    ``h(0, 0) = 0``, ``t`` not dividing ``h`` and bidegree above ``degree``
    has a pole along a curve that a degree-``degree`` intersection ignores.
    The window model excludes such ``1/h`` iff its expansion shows a
    negative ``v``-exponent at ``t``-degree 0, which happens iff the
    ``v``-order of ``h(v, 0)`` is at most ``N``.
    """
    bound = degree + 1
    enlarged = []
    for coeffs in itertools.product(range(q), repeat=(bound + 1) ** 2):
        c = np.array(coeffs).reshape(bound + 1, bound + 1)   # c[i, j] v^i t^j
        if c[0, 0] or not c[:, 0].any():
            continue
        nz = np.nonzero(c)
        if max(nz[0].max(), nz[1].max()) <= degree:
            continue
        order = int(np.nonzero(c[:, 0])[0][0])
        if order > N:
            enlarged.append(c.tolist())
    return {"degree_bound": degree, "probe_bidegree": bound, "enlarged": bool(enlarged),
            "witnesses": len(enlarged)}


# ---------------------------------------------------------------------------
# arithmetic analogy


def quotient_descriptor(ambient_dim: int, lattice_rank: int, subspace_dim: int) -> C0arObject:
    """``R^n / (Z^r + R^s)`` for a lattice and subspace in general position."""
    free = ambient_dim - subspace_dim
    if free < 0 or lattice_rank > ambient_dim:
        raise ValueError("inconsistent ranks")
    circles = min(lattice_rank, free)
    return C0arObject(FinAbGroup(()), 0, circles, free - circles)


def arithmetic_analogy_series(N: int) -> dict:
    """Degreewise ``R((t)) / (Z((t)) + R[t^-1])`` on the window ``[-N, N]``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    degrees = list(range(-N, N + 1))
    parts = [quotient_descriptor(1, 1, 1 if d <= 0 else 0) for d in degrees]
    trivial, circle = C0arObject(), C0arObject(FinAbGroup(()), 0, 1, 0)
    pattern = all(x == (trivial if d <= 0 else circle) for d, x in zip(degrees, parts))
    circle_dual = all(x.dual() == C0arObject(FinAbGroup(()), 1, 0, 0) for d, x in zip(degrees, parts) if d >= 1)
    # levels F(i) = {degree >= -i}: steps run from degree N down to -N
    obj = FilteredObjectAr1(-N - 1, tuple(reversed(parts)), "finite-stable", "trivial", 0)
    return {"identity": "arithmetic_analogy", "N": N,
            "series": [{"degree": d, "kind": "circle" if x == circle else "trivial" if x == trivial else repr(x)}
                       for d, x in zip(degrees, parts)],
            "pattern": pattern, "circle_dual_is_Z": circle_dual,
            "c_object": obj.tail_above == "trivial", "cf_object": is_compact1(obj),
            "passed": pattern and circle_dual and is_compact1(obj)}
