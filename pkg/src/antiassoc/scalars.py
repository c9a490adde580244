"""Exact and high-precision scalar arithmetic.

Four layers share one coercion ladder:

  Fraction  <  Cyclo12  <  MultiPoly / RatFun  (exact)
  BigComplex                                   (numeric, fixed binary precision)

``Cyclo12`` is the cyclotomic field Q(z) with z a primitive 12th root of
unity, the smallest field containing every exact constant used by the
bundled corpus (rationals, i = z^3, the cube root of unity w = z^2 - 1).
``Expr`` is the small expression language used for corpus strings
(basis entries, parameter substitutions, cocycle combinations).
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

import gmpy2

DEFAULT_PRECISION = 256

RESERVED_SYMBOLS = ("i", "w")


class DomainError(ArithmeticError):
    """Evaluation left the domain (division by zero, bad substitution)."""


# ---------------------------------------------------------------------------
# Cyclo12: Q(z)/(z^4 - z^2 + 1)
# ---------------------------------------------------------------------------

# z^m for m in 0..11 expressed on the basis (1, z, z^2, z^3).
_ZPOW = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (-1, 0, 1, 0),
    (0, -1, 0, 1),
    (-1, 0, 0, 0),
    (0, -1, 0, 0),
    (0, 0, -1, 0),
    (0, 0, 0, -1),
    (1, 0, -1, 0),
    (0, 1, 0, -1),
)

_FR0 = Fraction(0)
_FR1 = Fraction(1)


class Cyclo12:
    """Element a0 + a1*z + a2*z^2 + a3*z^3 of Q(z), z = exp(i*pi/6)."""

    __slots__ = ("coeffs",)

    def __init__(self, a0=0, a1=0, a2=0, a3=0):
        self.coeffs = (Fraction(a0), Fraction(a1), Fraction(a2), Fraction(a3))

    @classmethod
    def from_coeffs(cls, coeffs) -> "Cyclo12":
        obj = object.__new__(cls)
        obj.coeffs = tuple(coeffs)
        return obj

    @classmethod
    def coerce(cls, x) -> "Cyclo12":
        if isinstance(x, Cyclo12):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into Cyclo12")

    def __add__(self, other):
        try:
            other = Cyclo12.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        return Cyclo12.from_coeffs((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self):
        a = self.coeffs
        return Cyclo12.from_coeffs((-a[0], -a[1], -a[2], -a[3]))

    def __sub__(self, other):
        try:
            return self + (-Cyclo12.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + Cyclo12.coerce(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            a = self.coeffs
            return Cyclo12.from_coeffs((a[0] * other, a[1] * other, a[2] * other, a[3] * other))
        if not isinstance(other, Cyclo12):
            return NotImplemented
        other = Cyclo12.coerce(other)
        a, b = self.coeffs, other.coeffs
        conv = [_FR0] * 7
        for ia in range(4):
            ca = a[ia]
            if not ca:
                continue
            for ib in range(4):
                cb = b[ib]
                if cb:
                    conv[ia + ib] += ca * cb
        # fold z^6 = -1, z^5 = z^3 - z, z^4 = z^2 - 1
        r0, r1, r2, r3, r4, r5, r6 = conv
        r0 -= r6
        r3 += r5
        r1 -= r5
        r2 += r4
        r0 -= r4
        return Cyclo12.from_coeffs((r0, r1, r2, r3))

    __rmul__ = __mul__

    def galois(self, k: int) -> "Cyclo12":
        """Image under z -> z^k (k coprime to 12)."""
        out = [_FR0, _FR0, _FR0, _FR0]
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            pw = _ZPOW[(j * k) % 12]
            for m in range(4):
                if pw[m]:
                    out[m] += c * pw[m]
        return Cyclo12.from_coeffs(tuple(out))

    def inverse(self) -> "Cyclo12":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(z12)")
        conj = self.galois(5) * self.galois(7) * self.galois(11)
        norm = self * conj
        nc = norm.coeffs
        assert nc[1] == 0 and nc[2] == 0 and nc[3] == 0, "norm must be rational"
        return conj * (1 / nc[0])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError
            return self * (Fraction(1) / Fraction(other))
        if not isinstance(other, Cyclo12):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Cyclo12.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyclo12(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclo12(other)
        if not isinstance(other, Cyclo12):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        c = self.coeffs
        return not (c[1] or c[2] or c[3])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def to_bigcomplex(self, precision: int = DEFAULT_PRECISION) -> "BigComplex":
        with working_precision(precision):
            half = gmpy2.mpfr(Fraction(1, 2))
            zre = gmpy2.sqrt(gmpy2.mpfr(3)) / 2
            zim = half
            re = gmpy2.mpfr(0)
            im = gmpy2.mpfr(0)
            pre, pim = gmpy2.mpfr(1), gmpy2.mpfr(0)
            for c in self.coeffs:
                if c:
                    cf = gmpy2.mpfr(c)
                    re += cf * pre
                    im += cf * pim
                pre, pim = pre * zre - pim * zim, pre * zim + pim * zre
        return BigComplex(re, im, precision)

    def __repr__(self):
        return f"Cyclo12{self.coeffs}"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for c, name in zip(self.coeffs, ("", "z", "z^2", "z^3")):
            if not c:
                continue
            if name:
                term = name if abs(c) == 1 else f"{abs(c)}*{name}"
            else:
                term = str(abs(c))
            parts.append(("- " if c < 0 else "+ ") + term)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


CYCLO_ZERO = Cyclo12(0)
CYCLO_ONE = Cyclo12(1)
CYCLO_I = Cyclo12(0, 0, 0, 1)          # z^3
CYCLO_W = Cyclo12(-1, 0, 1, 0)         # z^4 = z^2 - 1, primitive cube root of unity


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials over Cyclo12
# ---------------------------------------------------------------------------

class PolyRing:
    """Polynomial ring over Q(z12) with a fixed ordered symbol list."""

    def __init__(self, symbols: Iterable[str]):
        self.symbols = tuple(symbols)
        for s in self.symbols:
            if s in RESERVED_SYMBOLS:
                raise ValueError(f"symbol {s!r} is reserved")
        self._index = {s: k for k, s in enumerate(self.symbols)}
        if len(self._index) != len(self.symbols):
            raise ValueError("duplicate symbols in ring")
        self._zero_exp = (0,) * len(self.symbols)
        self.zero = MultiPoly(self, {})
        self.one = MultiPoly(self, {self._zero_exp: CYCLO_ONE})

    def const(self, c) -> "MultiPoly":
        c = Cyclo12.coerce(c)
        if c.is_zero():
            return self.zero
        return MultiPoly(self, {self._zero_exp: c})

    def sym(self, name: str) -> "MultiPoly":
        k = self._index[name]
        exp = tuple(1 if j == k else 0 for j in range(len(self.symbols)))
        return MultiPoly(self, {exp: CYCLO_ONE})

    def index(self, name: str) -> int:
        return self._index[name]

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"PolyRing{self.symbols}"


class MultiPoly:
    """Sparse polynomial: map from exponent tuples to nonzero Cyclo12 coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise ValueError("mixed polynomial rings")
            return other
        if not isinstance(other, (int, Fraction, Cyclo12)):
            raise TypeError(f"cannot coerce {type(other).__name__} into MultiPoly")
        return self.ring.const(other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            acc = terms.get(e)
            if acc is None:
                terms[e] = c
            else:
                s = acc + c
                if s.is_zero():
                    del terms[e]
                else:
                    terms[e] = s
        return MultiPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclo12)):
            c0 = Cyclo12.coerce(other)
            if c0.is_zero():
                return self.ring.zero
            return MultiPoly(self.ring, {e: c * c0 for e, c in self.terms.items()})
        if not isinstance(other, MultiPoly):
            return NotImplemented
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                acc = terms.get(e)
                if acc is None:
                    terms[e] = prod
                else:
                    s = acc + prod
                    if s.is_zero():
                        del terms[e]
                    else:
                        terms[e] = s
        return MultiPoly(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial; use RatFun")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Cyclo12)):
            other = self.ring.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset((e, c) for e, c in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Cyclo12:
        if self.is_zero():
            return CYCLO_ZERO
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def degree(self, sym: str | None = None) -> int:
        if not self.terms:
            return 0
        if sym is None:
            return max(sum(e) for e in self.terms)
        k = self.ring.index(sym)
        return max(e[k] for e in self.terms)

    def derivative(self, sym: str) -> "MultiPoly":
        k = self.ring.index(sym)
        terms: dict = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = tuple(v - 1 if j == k else v for j, v in enumerate(e))
                nc = c * e[k]
                acc = terms.get(ne)
                terms[ne] = nc if acc is None else acc + nc
        return MultiPoly(self.ring, {e: c for e, c in terms.items() if not c.is_zero()})

    def eval(self, values: Mapping[str, Cyclo12]) -> Cyclo12:
        """Full evaluation; every ring symbol must be assigned."""
        vals = [Cyclo12.coerce(values[s]) for s in self.ring.symbols]
        total = CYCLO_ZERO
        for e, c in self.terms.items():
            term = c
            for k, ex in enumerate(e):
                if ex:
                    term = term * vals[k] ** ex
            total = total + term
        return total

    def eval_numeric(self, values: Mapping[str, "BigComplex"], precision: int) -> "BigComplex":
        total = BigComplex.from_int(0, precision)
        for e, c in self.terms.items():
            term = c.to_bigcomplex(precision)
            for k, ex in enumerate(e):
                if ex:
                    term = term * values[self.ring.symbols[k]] ** ex
            total = total + term
        return total

    def subs(self, values: Mapping[str, "RatFun"], target: "RatFunField") -> "RatFun":
        """Substitute every symbol by an element of a target rational-function field."""
        total = target.zero
        for e, c in self.terms.items():
            term = target.of(c)
            for k, ex in enumerate(e):
                if ex:
                    term = term * values[self.ring.symbols[k]] ** ex
            total = total + term
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{s}^{x}" if x > 1 else s
                for s, x in zip(self.ring.symbols, e)
                if x
            )
            coeff = str(c)
            if "+" in coeff or "-" in coeff[1:] or " " in coeff:
                coeff = f"({coeff})"
            if mono and coeff == "1":
                parts.append(mono)
            elif mono and coeff == "-1":
                parts.append(f"-{mono}")
            else:
                parts.append(f"{coeff}*{mono}" if mono else coeff)
        return " + ".join(parts)


def _univar_divmod(a: MultiPoly, b: MultiPoly):
    """Dense univariate division; rings must have exactly one symbol."""
    ring = a.ring
    da, db = a.degree(), b.degree()
    dense = [CYCLO_ZERO] * (da + 1)
    for e, c in a.terms.items():
        dense[e[0]] = c
    bd = [CYCLO_ZERO] * (db + 1)
    for e, c in b.terms.items():
        bd[e[0]] = c
    lead_inv = bd[db].inverse()
    quot = [CYCLO_ZERO] * max(da - db + 1, 1)
    for k in range(da - db, -1, -1):
        coeff = dense[db + k] * lead_inv
        if coeff.is_zero():
            continue
        quot[k] = coeff
        for j in range(db + 1):
            dense[j + k] = dense[j + k] - coeff * bd[j]
    q = MultiPoly(ring, {(k,): c for k, c in enumerate(quot) if not c.is_zero()})
    r = MultiPoly(ring, {(k,): c for k, c in enumerate(dense[:db] if db else []) if not c.is_zero()})
    return q, r


def _univar_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    while not b.is_zero():
        _, r = _univar_divmod(a, b)
        a, b = b, r
    if a.is_zero():
        return a
    # make monic
    lead = a.terms[max(a.terms)].inverse()
    return a * lead


class RatFun:
    """Rational function num/den over a PolyRing; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly, normalize: bool = True):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.ring != den.ring:
            raise ValueError("mixed rings")
        if normalize:
            num, den = _normalize_ratfun(num, den)
        self.num = num
        self.den = den

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    def _coerce(self, other) -> "RatFun":
        if isinstance(other, RatFun):
            if other.ring != self.ring:
                raise ValueError("mixed rational-function fields")
            return other
        if isinstance(other, MultiPoly):
            return RatFun(other, other.ring.one, normalize=False)
        if not isinstance(other, (int, Fraction, Cyclo12)):
            raise TypeError(f"cannot coerce {type(other).__name__} into RatFun")
        return RatFun(self.ring.const(other), self.ring.one, normalize=False)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.den is other.den or self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFun(self.num ** n, self.den ** n)

    def inverse(self) -> "RatFun":
        if self.num.is_zero():
            raise ZeroDivisionError
        return RatFun(self.den, self.num, normalize=False)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Cyclo12, MultiPoly)):
            other = self._coerce(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Cyclo12:
        return self.num.constant_value() / self.den.constant_value()

    def eval(self, values: Mapping[str, Cyclo12]) -> Cyclo12:
        den = self.den.eval(values)
        if den.is_zero():
            raise DomainError("denominator vanishes at evaluation point")
        return self.num.eval(values) / den

    def eval_numeric(self, values: Mapping[str, "BigComplex"], precision: int) -> "BigComplex":
        den = self.den.eval_numeric(values, precision)
        if den.is_zero():
            raise DomainError("denominator vanishes numerically")
        return self.num.eval_numeric(values, precision) / den

    def subs(self, values: Mapping[str, "RatFun"], target: "RatFunField") -> "RatFun":
        den = self.den.subs(values, target)
        if den.is_zero():
            raise DomainError("denominator vanishes identically after substitution")
        return self.num.subs(values, target) / den

    def derivative(self, sym: str) -> "RatFun":
        return RatFun(
            self.num.derivative(sym) * self.den - self.num * self.den.derivative(sym),
            self.den * self.den,
        )

    def __repr__(self):
        if self.den == self.ring.one:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def _normalize_ratfun(num: MultiPoly, den: MultiPoly):
    ring = num.ring
    if num.is_zero():
        return ring.zero, ring.one
    # cancel common monomial content
    nsym = len(ring.symbols)
    if nsym:
        mins = [min(e[k] for e in num.terms) for k in range(nsym)]
        dmins = [min(e[k] for e in den.terms) for k in range(nsym)]
        shift = tuple(min(a, b) for a, b in zip(mins, dmins))
        if any(shift):
            num = MultiPoly(ring, {tuple(a - s for a, s in zip(e, shift)): c for e, c in num.terms.items()})
            den = MultiPoly(ring, {tuple(a - s for a, s in zip(e, shift)): c for e, c in den.terms.items()})
    if den.is_constant():
        inv = den.constant_value().inverse()
        return num * inv, ring.one
    if nsym == 1:
        g = _univar_gcd(num, den)
        if g.degree() > 0:
            num, _ = _univar_divmod(num, g)
            den, _ = _univar_divmod(den, g)
    # scale so the denominator's leading term has coefficient 1
    lead = den.terms[max(den.terms)]
    if lead != CYCLO_ONE:
        inv = lead.inverse()
        num, den = num * inv, den * inv
    return num, den


# ---------------------------------------------------------------------------
# BigComplex over gmpy2 with explicit precision
# ---------------------------------------------------------------------------

@contextlib.contextmanager
def working_precision(bits: int):
    """Set the (thread-local) gmpy2 context precision, restoring on exit."""
    saved = gmpy2.get_context()
    ctx = saved.copy()
    ctx.precision = bits
    ctx.allow_complex = True
    gmpy2.set_context(ctx)
    try:
        yield
    finally:
        gmpy2.set_context(saved)


class BigComplex:
    """Immutable complex value at a fixed binary precision (>= 64 bits)."""

    __slots__ = ("re", "im", "precision")

    def __init__(self, re, im, precision: int):
        if precision < 64:
            raise ValueError("precision must be at least 64 bits")
        self.re = re
        self.im = im
        self.precision = precision

    @classmethod
    def from_int(cls, n: int, precision: int) -> "BigComplex":
        with working_precision(precision):
            return cls(gmpy2.mpfr(n), gmpy2.mpfr(0), precision)

    @classmethod
    def from_fraction(cls, q, precision: int) -> "BigComplex":
        with working_precision(precision):
            return cls(gmpy2.mpfr(Fraction(q)), gmpy2.mpfr(0), precision)

    def _prec(self, other: "BigComplex") -> int:
        return max(self.precision, other.precision)

    def _coerce(self, other, precision: int) -> "BigComplex":
        if isinstance(other, BigComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return BigComplex.from_fraction(other, precision)
        if isinstance(other, Cyclo12):
            return other.to_bigcomplex(precision)
        raise TypeError(f"cannot coerce {type(other).__name__} into BigComplex")

    def __add__(self, other):
        try:
            other = self._coerce(other, self.precision)
        except TypeError:
            return NotImplemented
        p = self._prec(other)
        with working_precision(p):
            return BigComplex(self.re + other.re, self.im + other.im, p)

    __radd__ = __add__

    def __neg__(self):
        with working_precision(self.precision):
            return BigComplex(-self.re, -self.im, self.precision)

    def __sub__(self, other):
        return self + (-self._coerce(other, self.precision))

    def __rsub__(self, other):
        return (-self) + self._coerce(other, self.precision)

    def __mul__(self, other):
        try:
            other = self._coerce(other, self.precision)
        except TypeError:
            return NotImplemented
        p = self._prec(other)
        with working_precision(p):
            return BigComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
                p,
            )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other, self.precision)
        p = self._prec(other)
        with working_precision(p):
            d = other.re * other.re + other.im * other.im
            if d == 0:
                raise ZeroDivisionError("complex division by zero")
            return BigComplex(
                (self.re * other.re + self.im * other.im) / d,
                (self.im * other.re - self.re * other.im) / d,
                p,
            )

    def __rtruediv__(self, other):
        return self._coerce(other, self.precision) / self

    def __pow__(self, exponent):
        """Integer powers exactly; fractional powers on the principal branch."""
        p = self.precision
        if isinstance(exponent, int) or (isinstance(exponent, Fraction) and exponent.denominator == 1):
            n = int(exponent)
            if n < 0:
                return (BigComplex.from_int(1, p) / self) ** (-n)
            result = BigComplex.from_int(1, p)
            base = self
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        exponent = Fraction(exponent)
        with working_precision(p):
            z = gmpy2.mpc(self.re, self.im)
            if z == 0:
                if exponent > 0:
                    return BigComplex.from_int(0, p)
                raise DomainError("0 raised to a non-positive fractional power")
            out = gmpy2.exp(gmpy2.mpfr(exponent) * gmpy2.log(z))
            return BigComplex(out.real, out.imag, p)

    def sqrt(self) -> "BigComplex":
        with working_precision(self.precision):
            out = gmpy2.sqrt(gmpy2.mpc(self.re, self.im))
            return BigComplex(out.real, out.imag, self.precision)

    def __abs__(self):
        with working_precision(self.precision):
            return gmpy2.sqrt(self.re * self.re + self.im * self.im)

    def magnitude(self):
        return self.__abs__()

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __eq__(self, other):
        if not isinstance(other, BigComplex):
            try:
                other = self._coerce(other, self.precision)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"BigComplex({self.re}, {self.im})"


# ---------------------------------------------------------------------------
# Expression language
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction


@dataclass(frozen=True)
class Sqrt:
    arg: "Expr"


Expr = Union[Num, Sym, Add, Sub, Mul, Div, Neg, Pow, Sqrt]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_OPS = set("+-*/^()")


def _tokenize(text: str):
    tokens = []
    k = 0
    n = len(text)
    while k < n:
        ch = text[k]
        if ch.isspace():
            k += 1
            continue
        if ch in _TOKEN_OPS:
            tokens.append((ch, ch, k))
            k += 1
            continue
        if ch.isdigit():
            j = k
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[k:j], k))
            k = j
            continue
        if ch.isalpha() or ch == "_":
            j = k
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("sym", text[k:j], k))
            k = j
            continue
        raise ParseError(f"unexpected character {ch!r}", k)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: Iterable[str]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.symbols = set(symbols) | set(RESERVED_SYMBOLS)

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Expr:
        if self.peek()[0] == "-":
            self.next()
            return Neg(self.factor())
        node = self.base()
        if self.peek()[0] == "^":
            self.next()
            node = Pow(node, self.exponent())
        return node

    def exponent(self) -> Fraction:
        tok = self.peek()
        sign = 1
        if tok[0] == "-":
            self.next()
            sign = -1
            tok = self.peek()
        if tok[0] == "int":
            self.next()
            return Fraction(sign * int(tok[1]))
        if tok[0] == "(":
            self.next()
            inner_sign = 1
            if self.peek()[0] == "-":
                self.next()
                inner_sign = -1
            p = self.expect("int")
            self.expect("/")
            q = self.expect("int")
            self.expect(")")
            if int(q[1]) <= 0:
                raise ParseError("exponent denominator must be positive", q[2])
            return Fraction(sign * inner_sign * int(p[1]), int(q[1]))
        raise ParseError("malformed exponent", tok[2])

    def base(self) -> Expr:
        tok = self.next()
        if tok[0] == "int":
            # rational literal: integer immediately followed by '/' integer
            if self.peek()[0] == "/" and self.tokens[self.pos + 1][0] == "int":
                self.next()
                den = self.next()
                if int(den[1]) <= 0:
                    raise ParseError("literal denominator must be positive", den[2])
                return Num(Fraction(int(tok[1]), int(den[1])))
            return Num(Fraction(int(tok[1])))
        if tok[0] == "sym":
            if tok[1] == "sqrt":
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return Sqrt(inner)
            if tok[1] not in self.symbols:
                raise ParseError(f"unknown symbol {tok[1]!r}", tok[2])
            return Sym(tok[1])
        if tok[0] == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])


def parse_expr(text: str, symbols: Iterable[str] = ()) -> Expr:
    """Parse an expression string; `symbols` lists the allowed free symbols."""
    return _Parser(text, symbols).parse()


def _prec_of(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def print_expr(e: Expr) -> str:
    """Canonical form; parse(print(e)) reproduces e up to whitespace."""

    def wrap(child: Expr, minimum: int) -> str:
        text = print_expr(child)
        return f"({text})" if _prec_of(child) < minimum else text

    if isinstance(e, Num):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Add):
        return f"{wrap(e.left, 1)} + {wrap(e.right, 2)}"
    if isinstance(e, Sub):
        return f"{wrap(e.left, 1)} - {wrap(e.right, 2)}"
    if isinstance(e, Mul):
        return f"{wrap(e.left, 2)}*{wrap(e.right, 3)}"
    if isinstance(e, Div):
        return f"{wrap(e.left, 2)}/{wrap(e.right, 5)}"
    if isinstance(e, Neg):
        return f"-{wrap(e.arg, 3)}"
    if isinstance(e, Pow):
        exp = e.exponent
        if exp.denominator == 1:
            etext = str(exp.numerator) if exp >= 0 else f"-{-exp.numerator}"
        else:
            etext = f"({exp.numerator}/{exp.denominator})"
        return f"{wrap(e.base, 5)}^{etext}"
    if isinstance(e, Sqrt):
        return f"sqrt({print_expr(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def expr_symbols(e: Expr) -> set:
    if isinstance(e, Sym):
        return {e.name}
    if isinstance(e, (Num,)):
        return set()
    if isinstance(e, (Add, Sub, Mul, Div)):
        return expr_symbols(e.left) | expr_symbols(e.right)
    if isinstance(e, Neg):
        return expr_symbols(e.arg)
    if isinstance(e, Pow):
        return expr_symbols(e.base)
    if isinstance(e, Sqrt):
        return expr_symbols(e.arg)
    raise TypeError(f"not an expression node: {e!r}")


class EvalResult:
    """Value plus a flag recording catastrophic cancellation along the way."""

    __slots__ = ("value", "cancellation")

    def __init__(self, value: BigComplex, cancellation: bool):
        self.value = value
        self.cancellation = cancellation


def eval_expr(
    e: Expr,
    assignment: Mapping[str, BigComplex],
    precision: int = DEFAULT_PRECISION,
) -> EvalResult:
    """Principal-branch numeric evaluation at the given precision.

    Raises DomainError for division by zero.  The cancellation flag is set
    when an addition loses more than half the working precision.
    """
    flag = [False]
    threshold = gmpy2.mpfr(2) ** (-(precision // 2))

    def ev(node: Expr) -> BigComplex:
        if isinstance(node, Num):
            return BigComplex.from_fraction(node.value, precision)
        if isinstance(node, Sym):
            if node.name == "i":
                return BigComplex(gmpy2.mpfr(0), gmpy2.mpfr(1), precision)
            if node.name == "w":
                return CYCLO_W.to_bigcomplex(precision)
            try:
                return assignment[node.name]
            except KeyError:
                raise DomainError(f"unassigned symbol {node.name!r}") from None
        if isinstance(node, (Add, Sub)):
            a = ev(node.left)
            b = ev(node.right)
            out = a + b if isinstance(node, Add) else a - b
            with working_precision(precision):
                big = max(abs(a), abs(b))
                if big > 0 and abs(out) < big * threshold and abs(out) != 0:
                    flag[0] = True
            return out
        if isinstance(node, Mul):
            return ev(node.left) * ev(node.right)
        if isinstance(node, Div):
            denom = ev(node.right)
            if denom.is_zero():
                raise DomainError("division by zero")
            return ev(node.left) / denom
        if isinstance(node, Neg):
            return -ev(node.arg)
        if isinstance(node, Pow):
            return ev(node.base) ** node.exponent
        if isinstance(node, Sqrt):
            return ev(node.arg).sqrt()
        raise TypeError(f"not an expression node: {node!r}")

    value = ev(e)
    return EvalResult(value, flag[0])


def eval_expr_exact(e: Expr, assignment: Mapping[str, Cyclo12]) -> Cyclo12:
    """Exact evaluation; every fractional power must disappear (integer powers only)."""
    if isinstance(e, Num):
        return Cyclo12(e.value)
    if isinstance(e, Sym):
        if e.name == "i":
            return CYCLO_I
        if e.name == "w":
            return CYCLO_W
        return Cyclo12.coerce(assignment[e.name])
    if isinstance(e, Add):
        return eval_expr_exact(e.left, assignment) + eval_expr_exact(e.right, assignment)
    if isinstance(e, Sub):
        return eval_expr_exact(e.left, assignment) - eval_expr_exact(e.right, assignment)
    if isinstance(e, Mul):
        return eval_expr_exact(e.left, assignment) * eval_expr_exact(e.right, assignment)
    if isinstance(e, Div):
        den = eval_expr_exact(e.right, assignment)
        if den.is_zero():
            raise DomainError("division by zero")
        return eval_expr_exact(e.left, assignment) / den
    if isinstance(e, Neg):
        return -eval_expr_exact(e.arg, assignment)
    if isinstance(e, Pow):
        if e.exponent.denominator != 1:
            raise DomainError("fractional power has no exact value here")
        return eval_expr_exact(e.base, assignment) ** int(e.exponent)
    if isinstance(e, Sqrt):
        raise DomainError("square root has no exact value here")
    raise TypeError(f"not an expression node: {e!r}")


def fractional_power_profile(e: Expr):
    """Collect denominators of fractional powers of t; flag anything inexact.

    Returns (denominators, exact_eligible).  Eligible means every radical is a
    fractional power of the bare symbol t (or sqrt(t)), so the substitution
    t = s^N clears them all.
    """
    denoms: set = set()
    eligible = [True]

    def walk(node: Expr):
        if isinstance(node, (Num, Sym)):
            return
        if isinstance(node, (Add, Sub, Mul, Div)):
            walk(node.left)
            walk(node.right)
            return
        if isinstance(node, Neg):
            walk(node.arg)
            return
        if isinstance(node, Pow):
            if node.exponent.denominator != 1:
                if isinstance(node.base, Sym) and node.base.name == "t":
                    denoms.add(node.exponent.denominator)
                else:
                    eligible[0] = False
            walk(node.base)
            return
        if isinstance(node, Sqrt):
            if isinstance(node.arg, Sym) and node.arg.name == "t":
                denoms.add(2)
            else:
                eligible[0] = False
            walk(node.arg)
            return
        raise TypeError(f"not an expression node: {node!r}")

    walk(e)
    return denoms, eligible[0]


def expr_to_ratfun(
    e: Expr,
    field: "RatFunField",
    assignment: Mapping[str, "RatFun"] | None = None,
    t_power: int = 1,
) -> RatFun:
    """Convert to a rational function.

    Symbols map through `assignment` (or to ring generators).  When
    t_power = N > 1 the symbol t is replaced by s^N and fractional powers
    t^(p/q) become integer powers of s; q must then divide N.
    """
    assignment = assignment or {}
    fld = field
    t_root = None
    if t_power > 1:
        tval = assignment.get("t")
        if tval is None:
            raise DomainError("t substitution requires an assignment for t")
        t_root = _nth_root_monomial(tval, t_power)

    def conv(node: Expr) -> RatFun:
        if isinstance(node, Num):
            return fld.of(node.value)
        if isinstance(node, Sym):
            if node.name == "i":
                return fld.of(CYCLO_I)
            if node.name == "w":
                return fld.of(CYCLO_W)
            if node.name in assignment:
                return assignment[node.name]
            if node.name in fld.ring.symbols:
                return fld.sym(node.name)
            raise DomainError(f"symbol {node.name!r} has no value")
        if isinstance(node, Add):
            return conv(node.left) + conv(node.right)
        if isinstance(node, Sub):
            return conv(node.left) - conv(node.right)
        if isinstance(node, Mul):
            return conv(node.left) * conv(node.right)
        if isinstance(node, Div):
            return conv(node.left) / conv(node.right)
        if isinstance(node, Neg):
            return -conv(node.arg)
        if isinstance(node, (Pow, Sqrt)):
            exponent = Fraction(1, 2) if isinstance(node, Sqrt) else node.exponent
            base = node.arg if isinstance(node, Sqrt) else node.base
            if exponent.denominator == 1:
                return conv(base) ** int(exponent)
            if isinstance(base, Sym) and base.name == "t" and t_root is not None:
                scaled = exponent * t_power
                if scaled.denominator != 1:
                    raise DomainError(
                        f"substitution exponent {t_power} does not clear t^{exponent}"
                    )
                return t_root ** int(scaled)
            raise DomainError("fractional power of a non-monomial is not rational")
        raise TypeError(f"not an expression node: {node!r}")

    return conv(e)


def _nth_root_monomial(rf: RatFun, n: int) -> RatFun:
    """Exact n-th root of a monomial rational function (used for t = s^N)."""
    num, den = rf.num, rf.den
    if len(num.terms) != 1 or len(den.terms) != 1:
        raise DomainError("t substitution value must be a monomial")
    (en, cn), = num.terms.items()
    (ed, cd), = den.terms.items()
    if cn != CYCLO_ONE or cd != CYCLO_ONE:
        raise DomainError("t substitution value must be a monic monomial")
    if any(v % n for v in en) or any(v % n for v in ed):
        raise DomainError("monomial exponent not divisible by substitution power")
    ring = rf.ring
    root_num = MultiPoly(ring, {tuple(v // n for v in en): CYCLO_ONE})
    root_den = MultiPoly(ring, {tuple(v // n for v in ed): CYCLO_ONE})
    return RatFun(root_num, root_den, normalize=False)


# ---------------------------------------------------------------------------
# Field descriptors used by the linear algebra layer
# ---------------------------------------------------------------------------

class FractionField:
    exact = True
    name = "Q"

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def of(x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, Cyclo12):
            return x.to_fraction()
        raise TypeError(f"cannot coerce {type(x).__name__} into Q")

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0

    def __repr__(self):
        return "QQ"


class CycloField:
    exact = True
    name = "Q(z12)"

    zero = CYCLO_ZERO
    one = CYCLO_ONE

    @staticmethod
    def of(x) -> Cyclo12:
        return Cyclo12.coerce(x)

    @staticmethod
    def is_zero(x) -> bool:
        return x.is_zero()

    def __repr__(self):
        return "CYCLO"


class RatFunField:
    """Field of rational functions over a PolyRing."""

    exact = True

    def __init__(self, symbols: Iterable[str]):
        self.ring = PolyRing(symbols)
        self.zero = RatFun(self.ring.zero, self.ring.one, normalize=False)
        self.one = RatFun(self.ring.one, self.ring.one, normalize=False)
        self.name = "Q(z12)(" + ",".join(self.ring.symbols) + ")"

    def sym(self, name: str) -> RatFun:
        return RatFun(self.ring.sym(name), self.ring.one, normalize=False)

    def of(self, x) -> RatFun:
        if isinstance(x, RatFun):
            if x.ring == self.ring:
                return x
            # re-embed into a ring with a superset of symbols
            mapping = {s: self.sym(s) for s in x.ring.symbols}
            return x.subs(mapping, self)
        if isinstance(x, MultiPoly):
            return self.of(RatFun(x, x.ring.one, normalize=False))
        return RatFun(self.ring.const(Cyclo12.coerce(x)), self.ring.one, normalize=False)

    @staticmethod
    def is_zero(x) -> bool:
        return x.is_zero()

    def __eq__(self, other):
        return isinstance(other, RatFunField) and self.ring == other.ring

    def __hash__(self):
        return hash(("RatFunField", self.ring))

    def __repr__(self):
        return self.name


class ComplexField:
    exact = False

    def __init__(self, precision: int = DEFAULT_PRECISION):
        self.precision = precision
        self.zero = BigComplex.from_int(0, precision)
        self.one = BigComplex.from_int(1, precision)
        self.name = f"C[{precision}b]"

    def of(self, x) -> BigComplex:
        if isinstance(x, BigComplex):
            return x
        if isinstance(x, (int, Fraction)):
            return BigComplex.from_fraction(x, self.precision)
        if isinstance(x, Cyclo12):
            return x.to_bigcomplex(self.precision)
        raise TypeError(f"cannot coerce {type(x).__name__} into BigComplex")

    @staticmethod
    def is_zero(x) -> bool:
        return x.is_zero()

    def __eq__(self, other):
        return isinstance(other, ComplexField) and self.precision == other.precision

    def __hash__(self):
        return hash(("ComplexField", self.precision))

    def __repr__(self):
        return self.name


QQ = FractionField()
CYCLO = CycloField()


def unify_fields(a, b):
    """Smallest common field in the ladder Q < Q(z12) < Q(z12)(syms)."""
    if a is b or a == b:
        return a
    order = {FractionField: 0, CycloField: 1, RatFunField: 2}
    ka, kb = order.get(type(a)), order.get(type(b))
    if ka is None or kb is None:
        raise TypeError(f"cannot unify fields {a!r} and {b!r}")
    if ka == kb == 2:
        merged = tuple(dict.fromkeys(a.ring.symbols + b.ring.symbols))
        return RatFunField(merged)
    return a if ka >= kb else b


def poly_equal(p: MultiPoly, q: MultiPoly) -> bool:
    """True iff p - q is the zero polynomial (same ring required)."""
    if p.ring != q.ring:
        raise ValueError("polynomials from different rings")
    return (p - q).is_zero()
