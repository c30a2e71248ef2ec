"""Truncated power-series calculus: logs, exponentials, formal group laws,
formal sums, strict isomorphisms and their 2-typical coordinates.

Series coefficients live in any ring object exposing zero()/one()/
from_rational(); the elements themselves must support +, -, *, ** (integer),
==, and is_zero().  Graded polynomial rings, the Lubin-Tate ring, and its
residue field all satisfy this protocol, so one engine serves every stage of
the pipeline.  Every series is truncated at a fixed cutoff in the series
variable(s); all identities asserted by this module are exact up to that
cutoff.
"""

from __future__ import annotations

from .coefficients import QQ
from .errors import (
    AmbientMismatch,
    ConsistencyFailure,
    HeightExceedsCutoff,
    NonIntegralResult,
    NonTwoTypicalIso,
    NonUnit,
    SourceTargetMismatch,
)
from .poly_core import (
    GradedPolynomial,
    V,
    bp_ring,
    from_rational_ring,
    poly_to_json,
    to_rational_ring,
)

_SCALARS = (int, type(QQ(0)))


def _coerce_coeff(ring, c):
    if isinstance(c, _SCALARS):
        return ring.from_rational(c)
    return c


# ---------------------------------------------------------------------------
# one-variable truncated series (no constant term)
# ---------------------------------------------------------------------------

class TruncatedSeries1:
    """x-power series sum_{1 <= e <= cutoff} c_e x^e with ring coefficients."""

    __slots__ = ("ring", "cutoff", "coeffs")

    def __init__(self, ring, coeffs, cutoff):
        self.ring = ring
        self.cutoff = cutoff
        clean = {}
        for e, c in coeffs.items():
            if e < 1:
                raise ValueError("series here have no constant term")
            if e <= cutoff and not c.is_zero():
                clean[e] = c
        self.coeffs = clean

    @staticmethod
    def identity(ring, cutoff):
        return TruncatedSeries1(ring, {1: ring.one()}, cutoff)

    @staticmethod
    def monomial(ring, coeff, e, cutoff):
        return TruncatedSeries1(ring, {e: _coerce_coeff(ring, coeff)}, cutoff)

    @staticmethod
    def zero(ring, cutoff):
        return TruncatedSeries1(ring, {}, cutoff)

    def coefficient(self, e):
        return self.coeffs.get(e, self.ring.zero())

    def is_zero(self):
        return not self.coeffs

    def _check(self, other):
        if other.ring is not self.ring or other.cutoff != self.cutoff:
            raise AmbientMismatch("series from different contexts")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return TruncatedSeries1(self.ring, out, self.cutoff)

    def __neg__(self):
        return TruncatedSeries1(
            self.ring, {e: -c for e, c in self.coeffs.items()}, self.cutoff
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Series product, truncated."""
        self._check(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e > self.cutoff:
                    continue
                c = c1 * c2
                s = out.get(e)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return TruncatedSeries1(self.ring, out, self.cutoff)

    def scale(self, c):
        c = _coerce_coeff(self.ring, c)
        return TruncatedSeries1(
            self.ring, {e: c * v for e, v in self.coeffs.items()}, self.cutoff
        )

    def powers(self, max_power):
        """[None, self, self^2, ..., self^max_power] (index = exponent)."""
        out = [None, self]
        for _ in range(1, max_power):
            out.append(out[-1] * self)
        return out

    def compose(self, inner: "TruncatedSeries1") -> "TruncatedSeries1":
        """self(inner(x)); inner has no constant term so this is well-defined."""
        self._check(inner)
        acc = TruncatedSeries1.zero(self.ring, self.cutoff)
        pw = None
        pw_exp = 0
        for e in sorted(self.coeffs):
            if pw is None:
                pw = inner
                pw_exp = 1
            while pw_exp < e:
                pw = pw * inner
                pw_exp += 1
            acc = acc + pw.scale(self.coeffs[e])
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries1)
            and other.ring is self.ring
            and other.cutoff == self.cutoff
            and other.coeffs == self.coeffs
        )

    def __repr__(self):
        bits = [f"({c!r})x^{e}" for e, c in sorted(self.coeffs.items())[:8]]
        return " + ".join(bits) + (" + ..." if len(self.coeffs) > 8 else "") or "0"

    def to_json(self):
        return [[e, _coeff_json(c)] for e, c in sorted(self.coeffs.items())]


def _coeff_json(c):
    if isinstance(c, GradedPolynomial):
        return poly_to_json(c)
    return c.to_json()


def series_exp(log: TruncatedSeries1) -> TruncatedSeries1:
    """Compositional inverse of a series with leading coefficient 1.

    Solves exp(log(x)) = x order by order: the x^e coefficient of exp only
    enters through the linear term of log, everything else is known.
    """
    ring, X = log.ring, log.cutoff
    one = ring.one()
    if log.coefficient(1) != one:
        raise ValueError("series_exp needs leading coefficient 1")
    g = {1: one}
    support = sorted(e for e in log.coeffs if e >= 2)
    for e in range(2, X + 1):
        partial = TruncatedSeries1(ring, g, e)
        val = ring.zero()
        pw, pw_exp = None, 0
        for k in support:
            if k > e:
                break
            if pw is None:
                pw, pw_exp = partial, 1
            while pw_exp < k:
                pw = pw * partial
                pw_exp += 1
            val = val + log.coeffs[k] * pw.coefficient(e)
        if not val.is_zero():
            g[e] = -val
    result = TruncatedSeries1(ring, g, X)
    if not log.compose(result).coeffs == {1: one}:
        raise ConsistencyFailure("compositional inverse failed its defining identity")
    return result


# ---------------------------------------------------------------------------
# two-variable truncated series and formal group laws
# ---------------------------------------------------------------------------

class TruncatedSeries2:
    """Series sum c_{e1 e2} x^{e1} y^{e2}, truncated at e1 + e2 <= cutoff."""

    __slots__ = ("ring", "cutoff", "coeffs")

    def __init__(self, ring, coeffs, cutoff):
        self.ring = ring
        self.cutoff = cutoff
        clean = {}
        for (e1, e2), c in coeffs.items():
            if e1 < 0 or e2 < 0 or e1 + e2 < 1:
                raise ValueError("exponents out of range")
            if e1 + e2 <= cutoff and not c.is_zero():
                clean[(e1, e2)] = c
        self.coeffs = clean

    def coefficient(self, e1, e2):
        return self.coeffs.get((e1, e2), self.ring.zero())

    def _check(self, other):
        if other.ring is not self.ring or other.cutoff != self.cutoff:
            raise AmbientMismatch("series from different contexts")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return TruncatedSeries2(self.ring, out, self.cutoff)

    def __neg__(self):
        return TruncatedSeries2(
            self.ring, {k: -c for k, c in self.coeffs.items()}, self.cutoff
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        out = {}
        for (a1, a2), c1 in self.coeffs.items():
            for (b1, b2), c2 in other.coeffs.items():
                if a1 + a2 + b1 + b2 > self.cutoff:
                    continue
                k = (a1 + b1, a2 + b2)
                c = c1 * c2
                s = out.get(k)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return TruncatedSeries2(self.ring, out, self.cutoff)

    def scale(self, c):
        c = _coerce_coeff(self.ring, c)
        return TruncatedSeries2(
            self.ring, {k: c * v for k, v in self.coeffs.items()}, self.cutoff
        )

    def swap(self):
        return TruncatedSeries2(
            self.ring, {(e2, e1): c for (e1, e2), c in self.coeffs.items()}, self.cutoff
        )

    def powers(self, max_power):
        out = [None, self]
        for _ in range(1, max_power):
            out.append(out[-1] * self)
        return out

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries2)
            and other.ring is self.ring
            and other.cutoff == self.cutoff
            and other.coeffs == self.coeffs
        )

    def __repr__(self):
        bits = [f"({c!r})x^{a}y^{b}" for (a, b), c in sorted(self.coeffs.items())[:8]]
        return " + ".join(bits) + (" + ..." if len(self.coeffs) > 8 else "") or "0"

    def to_json(self):
        return [
            [e1, e2, _coeff_json(c)] for (e1, e2), c in sorted(self.coeffs.items())
        ]


class FGL:
    """A (commutative, one-dimensional) formal group law truncated at cutoff.

    The unit and commutativity axioms are enforced at construction; exact
    associativity to the cutoff is a property the test suite verifies on every
    family this package constructs.  `provenance` records how the law arose:
    universal-Araki | conjugated | specialized | residue | adhoc.
    """

    __slots__ = ("two_var", "ring", "provenance", "cutoff", "log_list")

    def __init__(self, two_var: TruncatedSeries2, provenance="adhoc", log_list=None):
        ring = two_var.ring
        one = ring.one()
        if two_var.coefficient(1, 0) != one or two_var.coefficient(0, 1) != one:
            raise ValueError("formal group law must start x + y + ...")
        for (e1, e2), c in two_var.coeffs.items():
            if (e2 == 0 and e1 != 1) or (e1 == 0 and e2 != 1):
                raise ValueError("unit axiom violated: pure-power term beyond x, y")
            if two_var.coefficient(e2, e1) != c:
                raise ValueError("commutativity violated")
        self.two_var = two_var
        self.ring = ring
        self.cutoff = two_var.cutoff
        self.provenance = provenance
        self.log_list = log_list  # optional: the l_k used to build a universal law

    def coefficient(self, e1, e2):
        return self.two_var.coefficient(e1, e2)

    def __eq__(self, other):
        return (
            isinstance(other, FGL)
            and other.ring is self.ring
            and other.two_var == self.two_var
        )

    def __repr__(self):
        return f"FGL[{self.provenance}]@{self.ring!r}(cutoff={self.cutoff})"


def additive_fgl(ring, cutoff) -> FGL:
    one = ring.one()
    return FGL(
        TruncatedSeries2(ring, {(1, 0): one, (0, 1): one}, cutoff), provenance="adhoc"
    )


def fgl_apply(F: FGL, a, b):
    """F(a, b) for two series of the same kind (both 1-var or both 2-var)."""
    if a.ring is not F.ring or b.ring is not F.ring:
        raise AmbientMismatch("series ring differs from the law's ring")
    acc = a + b
    max1 = max((e1 for (e1, e2) in F.two_var.coeffs if e2 >= 1), default=0)
    max2 = max((e2 for (e1, e2) in F.two_var.coeffs if e1 >= 1), default=0)
    if max1 == 0 or max2 == 0:
        return acc
    pa = a.powers(max1)
    pb = b.powers(max2)
    for (e1, e2), c in F.two_var.coeffs.items():
        if e1 >= 1 and e2 >= 1:
            term = (pa[e1] * pb[e2]).scale(c)
            acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# logarithms and the universal law
# ---------------------------------------------------------------------------

def log_from_v(k_max: int):
    """The l_1..l_{k_max} determined by 2 l_k = 2^{2^k} l_k + sum l_{k-j} v_j^{2^{k-j}} + v_k.

    Returned over Q[v_1..v_{k_max}]; l_0 = 1 is implicit.  The denominator of
    l_k is exactly 2^k (asserted downstream by the 2^k l_k integrality tests).
    """
    ring = bp_ring(k_max, rational=True)
    ls = []
    for k in range(1, k_max + 1):
        rhs = ring.var(V(k))
        for j in range(1, k):
            l_prev = ls[k - j - 1]  # l_{k-j}
            rhs = rhs + l_prev * ring.var(V(j)) ** (1 << (k - j))
        denom = QQ(2) - QQ(2) ** (1 << k)
        ls.append(rhs.scalar_mul(1 / denom))
    return ls


def v_from_log(l_list, assert_integral=False):
    """Invert log_from_v: v_k = (2 - 2^{2^k}) l_k - sum_{j=1}^{k-1} l_{k-j} v_j^{2^{k-j}}.

    With assert_integral the outputs are converted to the 2-local ring and a
    NonIntegralResult is raised if any coefficient has even denominator.
    """
    if not l_list:
        return []
    ring = l_list[0].ring
    vs = []
    for k in range(1, len(l_list) + 1):
        vk = l_list[k - 1].scalar_mul(QQ(2) - QQ(2) ** (1 << k))
        for j in range(1, k):
            vk = vk - l_list[k - j - 1] * vs[j - 1] ** (1 << (k - j))
        vs.append(vk)
    if assert_integral:
        out = []
        for vk in vs:
            try:
                out.append(from_rational_ring(vk))
            except Exception as exc:
                raise NonIntegralResult(f"v-image not 2-locally integral: {exc}") from exc
        return out
    return vs


def log_series(l_list, ring, cutoff) -> TruncatedSeries1:
    """log(x) = x + sum l_k x^{2^k} as a truncated series over `ring`."""
    coeffs = {1: ring.one()}
    for k, lk in enumerate(l_list, start=1):
        if (1 << k) <= cutoff:
            coeffs[1 << k] = lk
    return TruncatedSeries1(ring, coeffs, cutoff)


def fgl_from_log(l_list, cutoff, integral=True) -> FGL:
    """F(x, y) = exp(log x + log y), optionally certified integral.

    With integral=True (the universal-Araki route) the coefficients are moved
    to the 2-local polynomial ring; a NonIntegralResult means the law is not
    defined over Z_(2) at this cutoff.
    """
    if l_list:
        ring = l_list[0].ring
    else:
        ring = bp_ring(1, rational=True)
    L = log_series(l_list, ring, cutoff)
    E = series_exp(L)
    one = ring.one()
    S = TruncatedSeries2(ring, {(1, 0): one, (0, 1): one}, cutoff)
    for k, lk in enumerate(l_list, start=1):
        e = 1 << k
        if e <= cutoff:
            S = S + TruncatedSeries2(ring, {(e, 0): lk, (0, e): lk}, cutoff)
    acc = TruncatedSeries2(ring, {}, cutoff)
    pw = None
    for e in range(1, cutoff + 1):
        pw = S if pw is None else pw * S
        if e in E.coeffs:
            acc = acc + pw.scale(E.coeffs[e])
        if pw.is_zero():
            break
    if not integral:
        return FGL(acc, provenance="universal-Araki", log_list=list(l_list))
    target = None
    terms = {}
    for key, c in acc.coeffs.items():
        try:
            ci = from_rational_ring(c)
        except Exception as exc:
            raise NonIntegralResult(
                f"coefficient at {key} is not 2-locally integral: {c!r}"
            ) from exc
        target = ci.ring
        terms[key] = ci
    if target is None:
        raise ConsistencyFailure("empty formal group law")
    return FGL(
        TruncatedSeries2(target, terms, cutoff),
        provenance="universal-Araki",
        log_list=list(l_list),
    )


# ---------------------------------------------------------------------------
# series attached to a law
# ---------------------------------------------------------------------------

def two_series(F: FGL) -> TruncatedSeries1:
    """[2](x) = F(x, x)."""
    out = {}
    ring = F.ring
    for (e1, e2), c in F.two_var.coeffs.items():
        e = e1 + e2
        if e > F.cutoff:
            continue
        s = out.get(e)
        s = c if s is None else s + c
        if s.is_zero():
            out.pop(e, None)
        else:
            out[e] = s
    return TruncatedSeries1(ring, out, F.cutoff)


def formal_sum(F: FGL, terms) -> TruncatedSeries1:
    """Sigma^F of monomials c x^e: left-iterated F-sum in the given order.

    `terms` is a list of (coefficient, exponent) pairs with distinct exponents.
    Order-independence up to the cutoff is a theorem (and a test), not an
    assumption of this routine.
    """
    ring, X = F.ring, F.cutoff
    series = [
        TruncatedSeries1.monomial(ring, c, e, X) for c, e in terms if e <= X
    ]
    if not series:
        return TruncatedSeries1.zero(ring, X)
    acc = series[0]
    for s in series[1:]:
        acc = fgl_apply(F, acc, s)
    return acc


def formal_sum_via_log(F: FGL, terms) -> TruncatedSeries1:
    """Fast route using the logarithm: exp(sum log(c x^e)); internal cross-check.

    Only available when F carries its log list (universal-Araki route); the
    equality with the left-iterated formal_sum is part of the test suite.
    """
    if F.log_list is None:
        raise ValueError("law carries no logarithm")
    lring = F.log_list[0].ring if F.log_list else None
    if lring is None:
        raise ValueError("need at least one log coefficient")
    X = F.cutoff
    L = log_series(F.log_list, lring, X)
    total = TruncatedSeries1.zero(lring, X)
    for c, e in terms:
        mono = TruncatedSeries1.monomial(lring, _lift_to(lring, c), e, X)
        total = total + L.compose(mono)
    E = series_exp(L)
    out = E.compose(total)
    # move back to the integral ring of F
    terms_out = {}
    for e, cc in out.coeffs.items():
        ci = from_rational_ring(cc)
        if ci.ring is not F.ring:
            raise AmbientMismatch("log route landed in an unexpected ring")
        terms_out[e] = ci
    return TruncatedSeries1(F.ring, terms_out, X)


def _lift_to(ring, c):
    if isinstance(c, _SCALARS):
        return ring.from_rational(c)
    if isinstance(c, GradedPolynomial) and c.ring is not ring:
        return to_rational_ring(c)
    return c


def formal_inverse(F: FGL) -> TruncatedSeries1:
    """The series i(x) with F(x, i(x)) = 0; starts with -x."""
    ring, X = F.ring, F.cutoff
    inv = {1: -ring.one()}
    for e in range(2, X + 1):
        partial = TruncatedSeries1(ring, inv, e)
        # F(x, partial) truncated at order e; unknown coefficient appears linearly
        x = TruncatedSeries1.identity(ring, e)
        val = fgl_apply(
            FGL(
                TruncatedSeries2(ring, dict(F.two_var.coeffs), e),
                provenance=F.provenance,
            ),
            x,
            partial,
        ).coefficient(e)
        if not val.is_zero():
            inv[e] = -val
    out = TruncatedSeries1(ring, inv, X)
    if not fgl_apply(F, TruncatedSeries1.identity(ring, X), out).is_zero():
        raise ConsistencyFailure("formal inverse failed F(x, i(x)) = 0")
    return out


def conjugate_fgl(F: FGL, coeff_map, target_ring=None, provenance="conjugated") -> FGL:
    """Apply a coefficient-ring homomorphism to every coefficient of F."""
    ring = target_ring if target_ring is not None else F.ring
    out = {}
    for k, c in F.two_var.coeffs.items():
        out[k] = coeff_map(c)
    return FGL(TruncatedSeries2(ring, out, F.cutoff), provenance=provenance)


def negate_fgl(F: FGL) -> FGL:
    """-F(-x, -y): the effect of the conjugation involution on a homogeneous law."""
    out = {}
    for (e1, e2), c in F.two_var.coeffs.items():
        out[(e1, e2)] = c if (e1 + e2) % 2 else -c
    return FGL(TruncatedSeries2(F.ring, out, F.cutoff), provenance="conjugated")


# ---------------------------------------------------------------------------
# strict isomorphisms
# ---------------------------------------------------------------------------

class StrictIso:
    """psi: source -> target with psi(F(x,y)) = G(psi x, psi y), psi = x + ..."""

    __slots__ = ("psi", "source", "target")

    def __init__(self, psi: TruncatedSeries1, source: FGL, target: FGL):
        if psi.coefficient(1) != psi.ring.one():
            raise ValueError("strict isomorphisms have leading coefficient 1")
        if psi.ring is not source.ring or psi.ring is not target.ring:
            raise AmbientMismatch("isomorphism and laws must share one ring")
        self.psi = psi
        self.source = source
        self.target = target

    def verify(self):
        """Exact check of psi(F(x,y)) = G(psi x, psi y) to cutoff; quadratic cost."""
        F, G, psi = self.source, self.target, self.psi
        ring, X = psi.ring, psi.cutoff
        lhs = TruncatedSeries2(ring, {}, X)
        pw = None
        for e in range(1, X + 1):
            pw = F.two_var if pw is None else pw * F.two_var
            if e in psi.coeffs:
                lhs = lhs + pw.scale(psi.coeffs[e])
            if pw.is_zero():
                break
        px = TruncatedSeries2(ring, {(e, 0): c for e, c in psi.coeffs.items()}, X)
        py = TruncatedSeries2(ring, {(0, e): c for e, c in psi.coeffs.items()}, X)
        rhs = fgl_apply(G, px, py)
        if lhs != rhs:
            raise ConsistencyFailure("strict isomorphism failed its defining identity")
        return True


def strict_iso_from_t(t_list, G: FGL, source: FGL = None) -> StrictIso:
    """psi(x) = x +^G sum^G t_i x^{2^i} (sums in the target law G).

    When `source` is omitted it is reconstructed as psi^{-1}(G(psi x, psi y)),
    which is exact to the cutoff but costs a two-variable composition.
    """
    ring, X = G.ring, G.cutoff
    terms = [(ring.one(), 1)]
    for i, ti in enumerate(t_list, start=1):
        e = 1 << i
        if e <= X:
            terms.append((_coerce_coeff(ring, ti), e))
    psi = formal_sum(G, terms)
    if source is None:
        source = _pullback_fgl(psi, G)
    return StrictIso(psi, source, G)


def _pullback_fgl(psi: TruncatedSeries1, G: FGL) -> FGL:
    ring, X = psi.ring, psi.cutoff
    px = TruncatedSeries2(ring, {(e, 0): c for e, c in psi.coeffs.items()}, X)
    py = TruncatedSeries2(ring, {(0, e): c for e, c in psi.coeffs.items()}, X)
    g = fgl_apply(G, px, py)
    # compositional inverse of psi, then substitute
    inv = series_exp(psi) if psi.coefficient(1) == ring.one() else None
    if inv is None:
        raise ValueError("not strict")
    acc = TruncatedSeries2(ring, {}, X)
    pw = None
    for e in range(1, X + 1):
        pw = g if pw is None else pw * g
        if e in inv.coeffs:
            acc = acc + pw.scale(inv.coeffs[e])
        if pw.is_zero():
            break
    return FGL(acc, provenance="adhoc")


def t_from_strict_iso(iso: StrictIso):
    """Recover the 2-typical coordinates t_i of a strict isomorphism.

    t_{r} is read off at x^{2^r} against the partial reconstruction; if after
    exhausting all 2-powers the reconstruction differs from psi, the
    isomorphism was not 2-typical and NonTwoTypicalIso reports the exponents.
    """
    psi, G = iso.psi, iso.target
    ring, X = psi.ring, psi.cutoff
    partial = TruncatedSeries1.identity(ring, X)
    ts = []
    r = 1
    while (1 << r) <= X:
        e = 1 << r
        tr = psi.coefficient(e) - partial.coefficient(e)
        ts.append(tr)
        if not tr.is_zero():
            partial = fgl_apply(G, partial, TruncatedSeries1.monomial(ring, tr, e, X))
        r += 1
    residual = psi - partial
    if not residual.is_zero():
        bad = sorted(residual.coeffs)
        raise NonTwoTypicalIso(f"residual at exponents {bad}")
    return ts


def compose_iso(iso2: StrictIso, iso1: StrictIso) -> StrictIso:
    """iso2 after iso1 (source of iso2 must equal target of iso1)."""
    if iso2.source != iso1.target:
        raise SourceTargetMismatch("chain does not compose")
    return StrictIso(iso2.psi.compose(iso1.psi), iso1.source, iso2.target)


def identity_iso(F: FGL) -> StrictIso:
    return StrictIso(TruncatedSeries1.identity(F.ring, F.cutoff), F, F)


# ---------------------------------------------------------------------------
# homogeneous <-> degree-0 translation and height
# ---------------------------------------------------------------------------

def _invert_in(ring, u):
    inv = getattr(ring, "invert", None)
    if inv is None:
        raise NonUnit(f"ring {ring!r} supports no inversion")
    return inv(u)


def dehomogenize(F: FGL, u, u_inv=None) -> FGL:
    """F~(x,y) = u F(u^{-1} x, u^{-1} y): coefficient c_{e1 e2} -> c u^{1-e1-e2}."""
    if u_inv is None:
        u_inv = _invert_in(F.ring, u)
    out = {}
    for (e1, e2), c in F.two_var.coeffs.items():
        n = e1 + e2 - 1
        out[(e1, e2)] = c if n == 0 else c * u_inv**n
    return FGL(TruncatedSeries2(F.ring, out, F.cutoff), provenance=F.provenance)


def homogenize(F: FGL, u, u_inv=None) -> FGL:
    """Inverse of dehomogenize: coefficient c_{e1 e2} -> c u^{e1+e2-1}."""
    out = {}
    for (e1, e2), c in F.two_var.coeffs.items():
        n = e1 + e2 - 1
        out[(e1, e2)] = c if n == 0 else c * u**n
    return FGL(TruncatedSeries2(F.ring, out, F.cutoff), provenance=F.provenance)


def height_of_residue_fgl(F: FGL, h_expected=None):
    """(h, leading coefficient) of [2](x) over a graded field of characteristic 2.

    Scans [2](x) for its first nonzero coefficient; that index must be a power
    of 2 (a Frobenius power), and in a graded field the coefficient is a unit.
    """
    if h_expected is not None and F.cutoff < (1 << h_expected):
        raise ValueError("cutoff too small for the expected height")
    two = two_series(F)
    for e in sorted(two.coeffs):
        c = two.coeffs[e]
        if c.is_zero():
            continue
        if e & (e - 1):
            raise ConsistencyFailure(
                f"first nonzero term of [2] at non-2-power exponent {e}"
            )
        return (e.bit_length() - 1, c)
    raise HeightExceedsCutoff(f"[2](x) = 0 up to x^{F.cutoff}")
