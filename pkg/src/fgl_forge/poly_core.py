"""Graded multivariate polynomials over the coefficient domains.

Rings are interned descriptors (one object per parameter set), monomials are
dense exponent vectors packed into a single integer (10 bits per variable,
earlier variables in more significant bits), so monomial multiplication is
integer addition and the graded-reverse-lex order is integer comparison within
a degree.  On top of that: the cyclic group action, mod-2 reduction, ring
maps/substitution, degree-truncated Buchberger over F_2, and an independent
linear-algebra membership route used to cross-check the Groebner one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .coefficients import QQ, is_two_local, qq_from_string, qq_to_string, rational_mod2
from .errors import (
    AmbientMismatch,
    DegreeBoundExceeded,
    NonIntegralCoefficient,
    UnassignedVariable,
)

_BITS = 10
_SCALAR_TYPES = (int, type(QQ(0)))
_MASK = (1 << _BITS) - 1
_EXP_LIMIT = 1 << _BITS


# ---------------------------------------------------------------------------
# variables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    """A named ring generator: v_i, gamma^j t_i, gamma^j u (or u^-1), gamma^j tau_i."""

    kind: str  # "v" | "t" | "u" | "uinv" | "tau"
    i: int = 0
    j: int = 0  # conjugation index

    def __post_init__(self):
        if self.kind not in ("v", "t", "u", "uinv", "tau"):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.kind in ("v", "t") and self.i < 1:
            raise ValueError("level index must be >= 1")

    @property
    def degree(self) -> int:
        if self.kind in ("v", "t"):
            return 2 * ((1 << self.i) - 1)
        if self.kind == "u":
            return 2
        if self.kind == "uinv":
            return -2
        return 0  # tau

    @property
    def name(self) -> str:
        stem = {"v": f"v{self.i}", "t": f"t{self.i}", "u": "u", "uinv": "uinv", "tau": f"tau{self.i}"}[
            self.kind
        ]
        return stem if self.j == 0 else f"g{self.j}{stem}"


def V(i):
    return Variable("v", i)


def T(i, j=0):
    return Variable("t", i, j)


# ---------------------------------------------------------------------------
# ring descriptors (interned)
# ---------------------------------------------------------------------------

class PolyRing:
    """Ambient ring descriptor: BP_*, R_n, R_n<m>, their Q-extensions, or mod-2 reductions.

    Construct through bp_ring / rn_ring / rnm_ring so that equal descriptors
    are the same object; arithmetic uses identity checks for ambient matching.
    """

    def __init__(self, kind, n, m, k_max, rational, mod2, variables):
        self.kind = kind  # "BP" | "Rn" | "Rnm"
        self.n = n
        self.m = m
        self.k_max = k_max
        self.rational = rational
        self.mod2 = mod2
        self.variables = tuple(variables)
        self.nvars = len(self.variables)
        self.var_index = {v: idx for idx, v in enumerate(self.variables)}
        self.var_by_name = {v.name: v for v in self.variables}
        self.degrees = tuple(v.degree for v in self.variables)
        self.shifts = tuple(_BITS * (self.nvars - 1 - idx) for idx in range(self.nvars))
        self._deg_cache = {}
        if kind in ("Rn", "Rnm"):
            self._gamma_perm, self._gamma_sign = self._build_gamma()
        else:
            self._gamma_perm = self._gamma_sign = None

    def _build_gamma(self):
        half = 1 << (self.n - 1)
        perm, sign = [], []
        for v in self.variables:
            if v.j < half - 1:
                perm.append(self.var_index[Variable(v.kind, v.i, v.j + 1)])
                sign.append(1)
            else:
                perm.append(self.var_index[Variable(v.kind, v.i, 0)])
                sign.append(-1)
        return tuple(perm), tuple(sign)

    # -- monomial helpers --

    def encode(self, exponents) -> int:
        m = 0
        for idx, e in enumerate(exponents):
            if not 0 <= e < _EXP_LIMIT:
                raise DegreeBoundExceeded(f"exponent {e} out of packing range")
            m |= e << self.shifts[idx]
        return m

    def decode(self, mono: int):
        return tuple((mono >> s) & _MASK for s in self.shifts)

    def mono_degree(self, mono: int) -> int:
        d = self._deg_cache.get(mono)
        if d is None:
            d = sum(e * w for e, w in zip(self.decode(mono), self.degrees))
            self._deg_cache[mono] = d
        return d

    def mono_of(self, var: Variable, exp: int = 1) -> int:
        return exp << self.shifts[self.var_index[var]]

    def monomials_of_degree(self, degree: int):
        """All monomials of the given total degree (weights are all positive here)."""
        out = []

        def rec(idx, rem, acc):
            if idx == self.nvars:
                if rem == 0:
                    out.append(acc)
                return
            w = self.degrees[idx]
            if idx == self.nvars - 1:
                if rem % w == 0 and rem // w < _EXP_LIMIT:
                    out.append(acc | (rem // w) << self.shifts[idx])
                return
            for e in range(rem // w + 1):
                rec(idx + 1, rem - e * w, acc | e << self.shifts[idx])

        if degree < 0:
            return []
        rec(0, degree, 0)
        return out

    # -- element constructors --

    def zero(self):
        return GradedPolynomial(self, {})

    def one(self):
        return self.from_rational(1)

    def from_rational(self, q):
        q = QQ(q)
        if q == 0:
            return self.zero()
        return GradedPolynomial(self, {0: q})

    def var(self, v: Variable):
        if v not in self.var_index:
            raise AmbientMismatch(f"{v.name} is not a variable of {self}")
        return GradedPolynomial(self, {self.mono_of(v): QQ(1)})

    def descriptor(self):
        d = {"kind": self.kind, "k_max": self.k_max}
        if self.n is not None:
            d["n"] = self.n
        if self.m is not None:
            d["m"] = self.m
        if self.rational:
            d["rational"] = True
        if self.mod2:
            d["mod2"] = True
        return d

    def __repr__(self):
        tags = []
        if self.rational:
            tags.append("Q")
        if self.mod2:
            tags.append("F2")
        tag = ("|" + ",".join(tags)) if tags else ""
        if self.kind == "BP":
            return f"BP(k<={self.k_max}{tag})"
        if self.kind == "Rn":
            return f"R_{self.n}(k<={self.k_max}{tag})"
        return f"R_{self.n}<{self.m}>(k<={self.k_max}{tag})"


_RING_CACHE = {}


def _make_ring(kind, n, m, k_max, rational, mod2):
    key = (kind, n, m, k_max, rational, mod2)
    ring = _RING_CACHE.get(key)
    if ring is None:
        if rational and mod2:
            raise ValueError("a ring cannot be both rational and mod-2")
        if kind == "BP":
            variables = [V(i) for i in range(1, k_max + 1)]
        else:
            half = 1 << (n - 1)
            top = min(k_max, m) if kind == "Rnm" else k_max
            variables = [T(i, j) for i in range(1, top + 1) for j in range(half)]
        ring = PolyRing(kind, n, m, k_max, rational, mod2, variables)
        _RING_CACHE[key] = ring
    return ring


def bp_ring(k_max, rational=False, mod2=False) -> PolyRing:
    return _make_ring("BP", None, None, k_max, rational, mod2)


def rn_ring(n, k_max, rational=False, mod2=False) -> PolyRing:
    if n < 1:
        raise ValueError("n must be >= 1")
    return _make_ring("Rn", n, None, k_max, rational, mod2)


def rnm_ring(n, m, k_max, rational=False, mod2=False) -> PolyRing:
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    return _make_ring("Rnm", n, m, k_max, rational, mod2)


def ring_from_descriptor(d) -> PolyRing:
    kind = d["kind"]
    if kind == "BP":
        return bp_ring(d["k_max"], d.get("rational", False), d.get("mod2", False))
    if kind == "Rn":
        return rn_ring(d["n"], d["k_max"], d.get("rational", False), d.get("mod2", False))
    if kind == "Rnm":
        return rnm_ring(d["n"], d["m"], d["k_max"], d.get("rational", False), d.get("mod2", False))
    raise ValueError(f"unknown ring kind {kind!r}")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class GradedPolynomial:
    """Sparse polynomial: map packed-monomial -> nonzero coefficient.

    Coefficients are exact rationals (two-locality enforced unless the ring is
    a Q-extension) or ints mod 2 for mod-2 rings.  Immutable by convention.
    """

    __slots__ = ("ring", "terms", "_degree")

    def __init__(self, ring, terms, _checked=False):
        self.ring = ring
        if not _checked:
            clean = {}
            for mono, c in terms.items():
                if ring.mod2:
                    c = int(c) & 1
                    if c:
                        clean[mono] = 1
                else:
                    c = QQ(c)
                    if c != 0:
                        if not ring.rational and not is_two_local(c):
                            raise NonIntegralCoefficient(
                                f"coefficient {c} is not 2-locally integral in {ring}"
                            )
                        clean[mono] = c
            terms = clean
        self.terms = terms
        self._degree = None

    # -- structure --

    def is_zero(self):
        return not self.terms

    def is_homogeneous(self):
        degs = {self.ring.mono_degree(m) for m in self.terms}
        return len(degs) <= 1

    @property
    def degree(self):
        """Total degree when homogeneous (None for 0), else the max degree."""
        if self._degree is None and self.terms:
            self._degree = max(self.ring.mono_degree(m) for m in self.terms)
        return self._degree

    def coefficient(self, mono: int):
        return self.terms.get(mono, 0 if self.ring.mod2 else QQ(0))

    def constant_term(self):
        return self.coefficient(0)

    def leading_monomial(self) -> int:
        """Greatest monomial in graded-reverse-lex (max degree, then min packed)."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        deg = self.degree
        return min(m for m in self.terms if self.ring.mono_degree(m) == deg)

    def sorted_terms(self):
        """Terms in descending monomial order (deterministic serialization order)."""
        return sorted(self.terms.items(), key=lambda kv: (-self.ring.mono_degree(kv[0]), kv[0]))

    # -- arithmetic --

    def _check(self, other):
        if other.ring is not self.ring:
            raise AmbientMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            other = self.ring.from_rational(other)
        self._check(other)
        if self.ring.mod2:
            terms = dict(self.terms)
            for m in other.terms:
                if m in terms:
                    del terms[m]
                else:
                    terms[m] = 1
            return GradedPolynomial(self.ring, terms, _checked=True)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s == 0:
                    del terms[m]
                else:
                    terms[m] = s
        return GradedPolynomial(self.ring, terms, _checked=True)

    __radd__ = __add__

    def __neg__(self):
        if self.ring.mod2:
            return self
        return GradedPolynomial(
            self.ring, {m: -c for m, c in self.terms.items()}, _checked=True
        )

    def __sub__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            other = self.ring.from_rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _SCALAR_TYPES):
            return self.scalar_mul(other)
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        acc = {}
        if self.ring.mod2:
            for m1 in a:
                for m2 in b:
                    m = m1 + m2
                    if m in acc:
                        del acc[m]
                    else:
                        acc[m] = 1
        else:
            for m1, c1 in a.items():
                for m2, c2 in b.items():
                    m = m1 + m2
                    c = c1 * c2
                    s = acc.get(m)
                    if s is None:
                        acc[m] = c
                    else:
                        s = s + c
                        if s == 0:
                            del acc[m]
                        else:
                            acc[m] = s
        if not self.ring.rational and not self.ring.mod2:
            # products of 2-local coefficients stay 2-local; no recheck needed
            pass
        return GradedPolynomial(self.ring, acc, _checked=True)

    __rmul__ = __mul__

    def scalar_mul(self, q):
        if self.ring.mod2:
            return self if int(q) & 1 else self.ring.zero()
        q = QQ(q)
        if q == 0:
            return self.ring.zero()
        if not self.ring.rational and not is_two_local(q):
            raise NonIntegralCoefficient(f"scalar {q} is not 2-locally integral")
        return GradedPolynomial(
            self.ring, {m: c * q for m, c in self.terms.items()}, _checked=True
        )

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not defined here")
        r = self.ring.one()
        base = self
        while e:
            if e & 1:
                r = r * base
            base = base * base if e > 1 else base
            e >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.from_rational(other)
        return (
            isinstance(other, GradedPolynomial)
            and other.ring is self.ring
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((id(self.ring), frozenset(self.terms.items())))

    def __repr__(self):
        if self.is_zero():
            return "0"
        bits = []
        for mono, c in self.sorted_terms()[:12]:
            exps = self.ring.decode(mono)
            names = [
                f"{v.name}^{e}" if e > 1 else v.name
                for v, e in zip(self.ring.variables, exps)
                if e
            ]
            body = "*".join(names) if names else "1"
            cs = str(c)
            bits.append(body if cs == "1" and names else f"{cs}*{body}" if names else cs)
        more = "" if len(self.terms) <= 12 else f" + ({len(self.terms) - 12} more)"
        return " + ".join(bits) + more


# ---------------------------------------------------------------------------
# group action, reductions, ring maps
# ---------------------------------------------------------------------------

def gamma_act(p: GradedPolynomial, r: int = 1) -> GradedPolynomial:
    """Apply the generator of C_{2^n} r times (ring automorphism of R_n / R_n<m>)."""
    ring = p.ring
    if ring._gamma_perm is None:
        raise AmbientMismatch(f"{ring} carries no cyclic action")
    r %= 1 << ring.n
    if r == 0 or p.is_zero():
        return p
    # compose the one-step permutation r times
    perm = list(range(ring.nvars))
    sign = [1] * ring.nvars
    for _ in range(r):
        new_perm = [ring._gamma_perm[v] for v in perm]
        new_sign = [s * ring._gamma_sign[v] for s, v in zip(sign, perm)]
        perm, sign = new_perm, new_sign
    shifts = ring.shifts
    out = {}
    for mono, c in p.terms.items():
        nm = 0
        sgn = 1
        for idx in range(ring.nvars):
            e = (mono >> shifts[idx]) & _MASK
            if e:
                nm |= e << shifts[perm[idx]]
                if sign[idx] < 0 and e & 1:
                    sgn = -sgn
        if ring.mod2:
            if nm in out:
                del out[nm]
            else:
                out[nm] = 1
        else:
            cc = c if sgn > 0 else -c
            s = out.get(nm)
            if s is None:
                out[nm] = cc
            else:
                s = s + cc
                if s == 0:
                    del out[nm]
                else:
                    out[nm] = s
    return GradedPolynomial(ring, out, _checked=True)


def orbit_sum(p: GradedPolynomial) -> GradedPolynomial:
    """Sum of gamma^r(p) over the 2^{n-1} twisted-isomorphism levels r."""
    total = p.ring.zero()
    for r in range(1 << (p.ring.n - 1)):
        total = total + gamma_act(p, r)
    return total


def reduce_mod2(p: GradedPolynomial) -> GradedPolynomial:
    """Coefficient-wise reduction to the mod-2 ambient ring."""
    ring = p.ring
    if ring.mod2:
        return p
    target = _make_ring(ring.kind, ring.n, ring.m, ring.k_max, False, True)
    terms = {}
    for m, c in p.terms.items():
        if rational_mod2(c):
            terms[m] = 1
    return GradedPolynomial(target, terms, _checked=True)


def to_rational_ring(p: GradedPolynomial) -> GradedPolynomial:
    ring = p.ring
    if ring.rational:
        return p
    if ring.mod2:
        raise AmbientMismatch("cannot lift a mod-2 polynomial to Q")
    target = _make_ring(ring.kind, ring.n, ring.m, ring.k_max, True, False)
    return GradedPolynomial(target, dict(p.terms), _checked=True)


def from_rational_ring(p: GradedPolynomial) -> GradedPolynomial:
    """Inverse of to_rational_ring; raises NonIntegralCoefficient when stuck."""
    ring = p.ring
    if not ring.rational:
        return p
    target = _make_ring(ring.kind, ring.n, ring.m, ring.k_max, False, False)
    return GradedPolynomial(target, dict(p.terms))  # constructor re-checks


def ring_map(p: GradedPolynomial, assignment, target):
    """The ring-homomorphic extension of a variable assignment.

    `assignment` maps Variable -> element of the target; `target` must expose
    zero()/one()/from_rational().  Variables appearing in p with a nonzero
    exponent but missing from the assignment raise UnassignedVariable.
    """
    acc = target.zero()
    ring = p.ring
    img_cache = {}
    for mono, c in p.terms.items():
        term = target.from_rational(c if not ring.mod2 else QQ(int(c)))
        for idx, e in enumerate(ring.decode(mono)):
            if not e:
                continue
            v = ring.variables[idx]
            key = (idx, e)
            pw = img_cache.get(key)
            if pw is None:
                if v not in assignment:
                    raise UnassignedVariable(f"no image for {v.name}")
                pw = assignment[v] ** e
                img_cache[key] = pw
            term = term * pw
        acc = acc + term
    return acc


def quotient_to_rnm(p: GradedPolynomial, m: int) -> GradedPolynomial:
    """Image of p under R_n -> R_n<m> (kill t_i and all conjugates for i > m)."""
    ring = p.ring
    if ring.kind != "Rn":
        raise AmbientMismatch("quotient_to_rnm starts from R_n")
    target = _make_ring("Rnm", ring.n, m, ring.k_max, ring.rational, ring.mod2)
    assignment = {}
    for v in ring.variables:
        assignment[v] = target.var(v) if v.i <= m else target.zero()
    return ring_map(p, assignment, target)


# ---------------------------------------------------------------------------
# degree-truncated Groebner machinery over F_2
# ---------------------------------------------------------------------------

def _divides(ring, a: int, b: int) -> bool:
    # does monomial a divide b?
    for s in ring.shifts:
        if (a >> s) & _MASK > (b >> s) & _MASK:
            return False
    return True


def _nf(p: GradedPolynomial, basis) -> GradedPolynomial:
    """Full normal form over F_2 (reduce every reducible monomial)."""
    ring = p.ring
    work = dict(p.terms)
    out = {}
    lms = [(g.leading_monomial(), g) for g in basis]
    while work:
        deg = max(ring.mono_degree(m) for m in work)
        mono = min(m for m in work if ring.mono_degree(m) == deg)
        del work[mono]
        reducer = None
        for lm, g in lms:
            if _divides(ring, lm, mono):
                reducer = (lm, g)
                break
        if reducer is None:
            out[mono] = 1
            continue
        lm, g = reducer
        q = mono - lm  # packed-int monomial division
        for gm in g.terms:
            m2 = gm + q
            if m2 == mono:
                continue
            if m2 in work:
                del work[m2]
            else:
                work[m2] = 1
    return GradedPolynomial(ring, out, _checked=True)


class GroebnerBasis:
    """Buchberger output over F_2, truncated to total degree <= D.

    Sound and complete for deciding membership of homogeneous elements of
    degree <= D in a homogeneous ideal: S-pairs whose lcm exceeds D cannot
    influence normal forms at degree <= D.
    """

    def __init__(self, ring, generators, degree_bound):
        if not ring.mod2:
            raise AmbientMismatch("Groebner machinery runs over the mod-2 ring")
        gens = [g for g in generators if not g.is_zero()]
        for g in gens:
            if not g.is_homogeneous():
                raise DegreeBoundExceeded("generators must be homogeneous")
        self.ring = ring
        self.generators = list(gens)
        self.degree_bound = degree_bound
        self.basis = self._buchberger(gens, degree_bound)
        self.complete_up_to_bound = True

    def _buchberger(self, gens, D):
        ring = self.ring
        basis = []
        for g in gens:
            if g.degree <= D:
                g = _nf(g, basis)
                if not g.is_zero():
                    basis.append(g)
        pairs = list(itertools.combinations(range(len(basis)), 2))
        while pairs:
            i, j = pairs.pop()
            gi, gj = basis[i], basis[j]
            mi, mj = gi.leading_monomial(), gj.leading_monomial()
            lcm = ring.encode(
                tuple(max(a, b) for a, b in zip(ring.decode(mi), ring.decode(mj)))
            )
            if lcm == mi + mj:  # coprime leading monomials: S-poly reduces to 0
                continue
            if ring.mono_degree(lcm) > D:
                continue  # sound to skip for homogeneous ideals
            s = gi * GradedPolynomial(ring, {lcm - mi: 1}, _checked=True) + gj * (
                GradedPolynomial(ring, {lcm - mj: 1}, _checked=True)
            )
            s = _nf(s, basis)
            if not s.is_zero():
                if s.degree > D:
                    raise DegreeBoundExceeded("S-polynomial escaped the degree bound")
                basis.append(s)
                pairs.extend((t, len(basis) - 1) for t in range(len(basis) - 1))
        return basis

    def normal_form(self, p: GradedPolynomial) -> GradedPolynomial:
        if p.ring is not self.ring:
            raise AmbientMismatch("polynomial from a different ambient ring")
        if not p.is_zero() and p.degree > self.degree_bound:
            raise DegreeBoundExceeded(
                f"degree {p.degree} exceeds basis bound {self.degree_bound}"
            )
        return _nf(p, self.basis)

    def contains(self, p: GradedPolynomial) -> bool:
        return self.normal_form(p).is_zero()


def groebner_truncated(gens, degree_bound) -> GroebnerBasis:
    if not gens:
        raise ValueError("need at least the ambient ring; pass ring.zero() for the zero ideal")
    return GroebnerBasis(gens[0].ring, gens, degree_bound)


_GB_CACHE = {}


def _cached_basis(ring, gens_mod2, D) -> GroebnerBasis:
    key = (
        id(ring),
        tuple(sorted(frozenset(g.terms) for g in gens_mod2 if not g.is_zero())),
        D,
    )
    gb = _GB_CACHE.get(key)
    if gb is None:
        gb = GroebnerBasis(ring, gens_mod2, D)
        _GB_CACHE[key] = gb
    return gb


def ideal_contains(p: GradedPolynomial, gens) -> bool:
    """Is p in (2, gens) in its ambient ring?  Decided after reduction mod 2.

    Valid because the ambient rings are polynomial over Z_(2): an element lies
    in (2, g_1, ..., g_r) iff its mod-2 reduction lies in the ideal of the
    reductions.  p must be homogeneous (as every identity checked here is).
    """
    pbar = reduce_mod2(p)
    if pbar.is_zero():
        return True
    gens_mod2 = [reduce_mod2(g) for g in gens]
    gens_mod2 = [g for g in gens_mod2 if not g.is_zero()]
    if not gens_mod2:
        return False
    D = pbar.degree
    gb = _cached_basis(pbar.ring, gens_mod2, D)
    if D > gb.degree_bound:  # cached at a smaller bound: rebuild
        gb = GroebnerBasis(pbar.ring, gens_mod2, D)
    return gb.contains(pbar)


def ideal_contains_Ik(p: GradedPolynomial, k: int, v_images) -> bool:
    """Membership in I_k = (2, v_1, ..., v_{k-1}); v_images[i] is v_{i+1}'s image."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return ideal_contains(p, list(v_images[: k - 1]))


def f2_membership_linear(p: GradedPolynomial, gens) -> bool:
    """Independent membership route: exhaustive linear algebra on one graded piece.

    Spans { m * g : g in gens, m monomial, deg(m g) = deg(p) } over F_2 and
    tests whether p's coefficient vector lies in the row space.  Exponential in
    spirit but fine on the small cross-check cases; never used as the primary
    decision procedure.
    """
    ring = p.ring
    if not ring.mod2:
        p = reduce_mod2(p)
        gens = [reduce_mod2(g) for g in gens]
        ring = p.ring
    if p.is_zero():
        return True
    if not p.is_homogeneous():
        raise ValueError("linear-algebra membership needs a homogeneous input")
    deg = p.degree
    basis_monos = {m: i for i, m in enumerate(sorted(ring.monomials_of_degree(deg)))}

    def vec(poly):
        b = 0
        for m in poly.terms:
            b |= 1 << basis_monos[m]
        return b

    rows = []
    for g in gens:
        if g.is_zero():
            continue
        shift_deg = deg - g.degree
        if shift_deg < 0:
            continue
        for m in ring.monomials_of_degree(shift_deg):
            prod = g * GradedPolynomial(ring, {m: 1}, _checked=True)
            if not prod.is_zero():
                rows.append(vec(prod))
    # Gaussian elimination over F_2 with bitmask rows
    pivots = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                break
    target = vec(p)
    while target:
        top = target.bit_length() - 1
        if top not in pivots:
            return False
        target ^= pivots[top]
    return True


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def poly_to_json(p: GradedPolynomial):
    terms = []
    for mono, c in p.sorted_terms():
        exps = p.ring.decode(mono)
        monomial = {
            v.name: e for v, e in zip(p.ring.variables, exps) if e
        }
        coeff = str(int(c)) if p.ring.mod2 else qq_to_string(c)
        terms.append({"monomial": monomial, "coeff": coeff})
    return {"ring": p.ring.descriptor(), "terms": terms}


def poly_from_json(obj) -> GradedPolynomial:
    ring = ring_from_descriptor(obj["ring"])
    terms = {}
    for t in obj["terms"]:
        exps = [0] * ring.nvars
        for name, e in t["monomial"].items():
            v = ring.var_by_name.get(name)
            if v is None:
                raise UnassignedVariable(f"unknown variable {name!r} for {ring}")
            exps[ring.var_index[v]] = int(e)
        mono = ring.encode(exps)
        coeff = qq_from_string(t["coeff"])
        terms[mono] = terms.get(mono, QQ(0)) + coeff
    return GradedPolynomial(ring, terms)
