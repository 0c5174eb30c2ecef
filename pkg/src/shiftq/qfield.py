"""Exact scalars: Laurent polynomials and rational functions in q, q-numbers,
and truncated series in z or 1/z with formal exp/log.

Everything here is immutable and uses ``fractions.Fraction`` coefficients.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "LaurentQ",
    "RatQ",
    "RatFuncZ",
    "ZSeries",
    "QFieldError",
    "ZeroDivision",
    "PoleError",
    "LeadingTermError",
    "Q",
    "ZERO",
    "ONE",
    "qpow",
    "q_number",
    "q_factorial",
    "q_binomial",
    "series_expand",
    "series_log",
    "series_exp",
    "parse_ratq",
]


class QFieldError(ValueError):
    pass


class ZeroDivision(QFieldError, ZeroDivisionError):
    pass


class PoleError(QFieldError):
    pass


class LeadingTermError(QFieldError):
    pass


def _frac(c) -> Fraction:
    return c if type(c) is Fraction else Fraction(c)


# dense polynomial helpers, ascending coefficient lists, no trailing zeros


def _trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _pdivmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    if len(a) <= db:
        return [], a
    quo = [Fraction(0)] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = a[k + db] / lb
        quo[k] = c
        if c:
            for i in range(db + 1):
                a[k + i] -= c * b[i]
    return _trim(quo), _trim(a[:db])


def _pgcd(a: list, b: list) -> list:
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    lc = a[-1]
    return [c / lc for c in a]


class LaurentQ:
    """Finite sum of c * q^e with rational c. The zero polynomial has no terms."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = _frac(v)
                if v:
                    c[int(e)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict) -> "LaurentQ":
        obj = cls.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, e: int, c=1) -> "LaurentQ":
        c = _frac(c)
        return cls._raw({e: c} if c else {})

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def is_zero(self) -> bool:
        return not self._c

    def low(self) -> int:
        return min(self._c)

    def high(self) -> int:
        return max(self._c)

    def is_monomial(self) -> bool:
        return len(self._c) == 1

    def __eq__(self, other):
        if isinstance(other, LaurentQ):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __add__(self, other):
        other = _as_laurent(other)
        c = dict(self._c)
        for e, v in other._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return LaurentQ._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentQ._raw({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        return self + (-_as_laurent(other))

    def __rsub__(self, other):
        return _as_laurent(other) - self

    def __mul__(self, other):
        other = _as_laurent(other)
        if len(other._c) < len(self._c):
            a, b = other._c, self._c
        else:
            a, b = self._c, other._c
        c: dict = {}
        for e1, v1 in a.items():
            for e2, v2 in b.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return LaurentQ._raw({e: v for e, v in c.items() if v})

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentQ":
        return LaurentQ._raw({e + k: v for e, v in self._c.items()})

    def scale(self, c) -> "LaurentQ":
        c = _frac(c)
        if not c:
            return LaurentQ._raw({})
        return LaurentQ._raw({e: v * c for e, v in self._c.items()})

    def _dense(self) -> tuple[int, list]:
        lo, hi = self.low(), self.high()
        p = [Fraction(0)] * (hi - lo + 1)
        for e, v in self._c.items():
            p[e - lo] = v
        return lo, p

    @classmethod
    def _from_dense(cls, lo: int, p: Sequence) -> "LaurentQ":
        return cls._raw({lo + i: v for i, v in enumerate(p) if v})

    def __repr__(self):
        return f"LaurentQ({render_laurent(self)})"

    def __str__(self):
        return render_laurent(self)


def _as_laurent(x) -> LaurentQ:
    if isinstance(x, LaurentQ):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentQ.monomial(0, x)
    raise TypeError(f"cannot use {type(x).__name__} as a Laurent polynomial")


class RatQ:
    """Reduced quotient of Laurent polynomials in q.

    Canonical form: the denominator is an ordinary polynomial with constant
    term 1, coprime to the numerator. Equality is structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=1):
        num = _as_laurent(num)
        den = _as_laurent(den)
        if den.is_zero():
            raise ZeroDivision("zero denominator")
        n, d = _normalize(num, den)
        self.num = n
        self.den = d
        self._hash = None

    @classmethod
    def _raw(cls, num: LaurentQ, den: LaurentQ) -> "RatQ":
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def from_laurent(cls, p: LaurentQ) -> "RatQ":
        return cls._raw(p, _ONE_L)

    def is_zero(self) -> bool:
        return not self.num._c

    def is_laurent(self) -> bool:
        return self.den._c == _ONE_C

    def is_monomial(self) -> bool:
        return self.is_laurent() and self.num.is_monomial()

    def __bool__(self):
        return bool(self.num._c)

    def __eq__(self, other):
        if isinstance(other, RatQ):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, LaurentQ)):
            return self.is_laurent() and self.num == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __add__(self, other):
        other = _as_ratq(other)
        if not other.num._c:
            return self
        if not self.num._c:
            return other
        if self.den == other.den:
            if self.den._c == _ONE_C:
                return RatQ._raw(self.num + other.num, _ONE_L)
            return _build(self.num + other.num, self.den)
        return _build(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatQ._raw(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_ratq(other))

    def __rsub__(self, other):
        return _as_ratq(other) - self

    def __mul__(self, other):
        other = _as_ratq(other)
        if not self.num._c or not other.num._c:
            return ZERO
        if self.den._c == _ONE_C and other.den._c == _ONE_C:
            return RatQ._raw(self.num * other.num, _ONE_L)
        return _build(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatQ":
        if not self.num._c:
            raise ZeroDivision("inverse of zero")
        return _build(self.den, self.num)

    def __truediv__(self, other):
        other = _as_ratq(other)
        if not other.num._c:
            raise ZeroDivision("division by zero")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_ratq(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_monomial():
            (e, c), = self.num._c.items()
            return RatQ._raw(LaurentQ.monomial(e * n, c ** n), _ONE_L)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def subs_q_power(self, k: int) -> "RatQ":
        """Substitute q -> q^k."""
        if k == 0:
            raise QFieldError("substitution q -> 1 is not supported")
        n = LaurentQ._raw({e * k: v for e, v in self.num._c.items()})
        d = LaurentQ._raw({e * k: v for e, v in self.den._c.items()})
        return RatQ(n, d)

    def __repr__(self):
        return f"RatQ({render_ratq(self)})"

    def __str__(self):
        return render_ratq(self)


_ONE_C = {0: Fraction(1)}
_ONE_L = LaurentQ._raw(dict(_ONE_C))


def _normalize(num: LaurentQ, den: LaurentQ) -> tuple[LaurentQ, LaurentQ]:
    if not num._c:
        return num, _ONE_L
    if den.is_monomial():
        (e, c), = den._c.items()
        if e == 0 and c == 1:
            return num, _ONE_L
        inv = 1 / c
        return LaurentQ._raw({k - e: v * inv for k, v in num._c.items()}), _ONE_L
    nlo, np_ = num._dense()
    dlo, dp = den._dense()
    g = _pgcd(np_, dp) if len(np_) > 1 else [Fraction(1)]
    if len(g) > 1:
        np_, r1 = _pdivmod(np_, g)
        dp, r2 = _pdivmod(dp, g)
        assert not r1 and not r2
    c0 = dp[0]
    if c0 != 1:
        inv = 1 / c0
        np_ = [v * inv for v in np_]
        dp = [v * inv for v in dp]
    n = LaurentQ._from_dense(nlo - dlo, np_)
    d = LaurentQ._from_dense(0, dp)
    if len(d._c) == 1:
        d = _ONE_L
    return n, d


def _build(num: LaurentQ, den: LaurentQ) -> RatQ:
    if not den._c:
        raise ZeroDivision("zero denominator")
    n, d = _normalize(num, den)
    return RatQ._raw(n, d)


def _as_ratq(x) -> RatQ:
    if isinstance(x, RatQ):
        return x
    if isinstance(x, LaurentQ):
        return RatQ._raw(x, _ONE_L)
    if isinstance(x, (int, Fraction)):
        return RatQ._raw(LaurentQ.monomial(0, x), _ONE_L)
    raise TypeError(f"cannot use {type(x).__name__} as a scalar")


ZERO = RatQ._raw(LaurentQ._raw({}), _ONE_L)
ONE = RatQ._raw(_ONE_L, _ONE_L)
Q = RatQ._raw(LaurentQ.monomial(1), _ONE_L)

_QPOW_CACHE: dict[int, RatQ] = {}


def qpow(e: int, c=1) -> RatQ:
    """The monomial c * q^e."""
    if c == 1:
        r = _QPOW_CACHE.get(e)
        if r is None:
            r = RatQ._raw(LaurentQ.monomial(e), _ONE_L)
            _QPOW_CACHE[e] = r
        return r
    return RatQ._raw(LaurentQ.monomial(e, c), _ONE_L)


def ratq(x) -> RatQ:
    return _as_ratq(x)


# q-combinatorics


def q_number(m: int, x: RatQ = Q) -> RatQ:
    """[m]_x = (x^m - x^-m)/(x - x^-1); negative m gives -[-m]_x."""
    x = _as_ratq(x)
    if x.is_zero():
        raise QFieldError("q_number needs a nonzero base")
    if m < 0:
        return -q_number(-m, x)
    if m == 0:
        return ZERO
    if x.is_monomial():
        (e, c), = x.num._c.items()
        if c == 1:
            # sum of x^(m-1-2s), s = 0..m-1
            return RatQ._raw(
                LaurentQ._raw({e * (m - 1 - 2 * s): Fraction(1) for s in range(m)}), _ONE_L
            )
    xi = x.inverse()
    return (x ** m - xi ** m) / (x - xi)


def q_factorial(m: int, x: RatQ = Q) -> RatQ:
    if m < 0:
        raise QFieldError("q_factorial of a negative integer")
    out = ONE
    for s in range(1, m + 1):
        out = out * q_number(s, x)
    return out


def q_binomial(m: int, p: int, x: RatQ = Q) -> RatQ:
    if p < 0 or p > m:
        raise QFieldError(f"q_binomial needs 0 <= p <= m, got m={m}, p={p}")
    return q_factorial(m, x) / (q_factorial(p, x) * q_factorial(m - p, x))


# rational functions of z over RatQ


class RatFuncZ:
    """num(z)/den(z) with num, den polynomials in z (ascending RatQ lists)."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence, den: Sequence = (1,)):
        n = [_as_ratq(c) for c in num]
        d = [_as_ratq(c) for c in den]
        while n and n[-1].is_zero():
            n.pop()
        while d and d[-1].is_zero():
            d.pop()
        if not d:
            raise ZeroDivision("zero denominator in z")
        self.num = tuple(n)
        self.den = tuple(d)

    @staticmethod
    def _pmul(a, b):
        if not a or not b:
            return []
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
        return out

    def __mul__(self, other: "RatFuncZ") -> "RatFuncZ":
        return RatFuncZ(self._pmul(self.num, other.num), self._pmul(self.den, other.den))

    def evaluate(self, z: RatQ) -> RatQ:
        z = _as_ratq(z)

        def ev(p):
            acc = ZERO
            for c in reversed(p):
                acc = acc * z + c
            return acc

        d = ev(self.den)
        n = ev(self.num)
        if d.is_zero():
            raise PoleError(f"pole at z = {z}")
        return n / d

    def degree(self) -> int:
        """deg num - deg den, the shift degree of an ell-weight component."""
        if not self.num:
            raise QFieldError("degree of the zero function")
        return (len(self.num) - 1) - (len(self.den) - 1)

    def __repr__(self):
        return f"RatFuncZ({list(map(str, self.num))}, {list(map(str, self.den))})"


class ZSeries:
    """Truncated series  sum_{n=0}^{order} c_n z^(lead + s*n), s = +1 (in z) or -1 (in 1/z)."""

    __slots__ = ("direction", "lead", "coeffs")

    IN_Z = "z"
    IN_ZINV = "zinv"

    def __init__(self, direction: str, lead: int, coeffs: Sequence):
        if direction not in (self.IN_Z, self.IN_ZINV):
            raise QFieldError(f"unknown direction {direction!r}")
        self.direction = direction
        self.lead = int(lead)
        self.coeffs = tuple(_as_ratq(c) for c in coeffs)
        if not self.coeffs:
            raise QFieldError("a series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def step(self) -> int:
        return 1 if self.direction == self.IN_Z else -1

    def coefficient(self, exponent: int) -> RatQ:
        """Coefficient of z^exponent; raises if outside the stored window."""
        n = (exponent - self.lead) * self.step
        if n < 0:
            return ZERO
        if n > self.order:
            raise QFieldError(f"z^{exponent} is beyond the truncation order")
        return self.coeffs[n]

    def _check(self, other: "ZSeries"):
        if self.direction != other.direction:
            raise QFieldError("series with different expansion directions cannot be combined")

    def __eq__(self, other):
        if not isinstance(other, ZSeries):
            return NotImplemented
        return (self.direction, self.lead, self.coeffs) == (other.direction, other.lead, other.coeffs)

    def __hash__(self):
        return hash((self.direction, self.lead, self.coeffs))

    def __add__(self, other: "ZSeries") -> "ZSeries":
        self._check(other)
        lead = min(self.lead, other.lead) if self.step == 1 else max(self.lead, other.lead)
        top = min(self.lead * self.step + self.order, other.lead * other.step + other.order)
        n = top - lead * self.step
        out = []
        for k in range(n + 1):
            e = lead + self.step * k
            out.append(self.coefficient(e) + other.coefficient(e))
        return ZSeries(self.direction, lead, out)

    def __mul__(self, other: "ZSeries") -> "ZSeries":
        self._check(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            acc = ZERO
            for i in range(k + 1):
                if a[i] and b[k - i]:
                    acc = acc + a[i] * b[k - i]
            out.append(acc)
        return ZSeries(self.direction, self.lead + other.lead, out)

    def truncate(self, order: int) -> "ZSeries":
        return ZSeries(self.direction, self.lead, self.coeffs[: order + 1])

    def __repr__(self):
        v = "z" if self.step == 1 else "z^-1"
        terms = " + ".join(f"({c})*z^{self.lead + self.step * i}" for i, c in enumerate(self.coeffs))
        return f"ZSeries[{v}]({terms})"


def _series_div(num: Sequence[RatQ], den: Sequence[RatQ], order: int) -> list:
    d0 = den[0]
    inv = d0.inverse()
    out = []
    for k in range(order + 1):
        acc = num[k] if k < len(num) else ZERO
        for i in range(1, min(k, len(den) - 1) + 1):
            if den[i] and out[k - i]:
                acc = acc - den[i] * out[k - i]
        out.append(acc * inv)
    return out


def series_expand(f: RatFuncZ, direction: str, order: int) -> ZSeries:
    """Expand f in z (around 0) or in 1/z (around infinity) to `order` terms past the lead."""
    if order < 0:
        raise QFieldError("order must be nonnegative")
    if not f.num:
        return ZSeries(direction, 0, [ZERO] * (order + 1))
    num, den = list(f.num), list(f.den)
    if direction == ZSeries.IN_Z:
        # strip common powers of z
        lead = 0
        while num and num[0].is_zero():
            num.pop(0)
            lead += 1
        while den[0].is_zero():
            den.pop(0)
            lead -= 1
        if lead < 0:
            raise PoleError("pole at z = 0")
        return ZSeries(direction, lead, _series_div(num, den, order))
    if direction == ZSeries.IN_ZINV:
        lead = (len(num) - 1) - (len(den) - 1)
        return ZSeries(direction, lead, _series_div(num[::-1], den[::-1], order))
    raise QFieldError(f"unknown direction {direction!r}")


def series_log(s: ZSeries, normalize: bool = False) -> ZSeries:
    """Formal log. Without `normalize` the series must start with 1*z^0;
    with it the leading monomial is factored out first."""
    c0 = s.coeffs[0]
    if c0.is_zero():
        raise LeadingTermError("leading coefficient is zero")
    if not normalize and (s.lead != 0 or c0 != ONE):
        raise LeadingTermError("log needs leading term 1 (pass normalize=True to factor it out)")
    c = [x / c0 for x in s.coeffs] if c0 != ONE else list(s.coeffs)
    n = len(c) - 1
    lg = [ZERO] * (n + 1)
    for k in range(1, n + 1):
        acc = c[k] * k
        for j in range(1, k):
            if lg[j] and c[k - j]:
                acc = acc - lg[j] * c[k - j] * j
        lg[k] = acc * Fraction(1, k)
    return ZSeries(s.direction, 0, lg)


def series_exp(s: ZSeries) -> ZSeries:
    if s.lead != 0 or not s.coeffs[0].is_zero():
        raise LeadingTermError("exp needs a series with zero constant term")
    lg = s.coeffs
    n = len(lg) - 1
    ex = [ONE] + [ZERO] * n
    for k in range(1, n + 1):
        acc = ZERO
        for j in range(1, k + 1):
            if lg[j] and ex[k - j]:
                acc = acc + lg[j] * ex[k - j] * j
        ex[k] = acc * Fraction(1, k)
    return ZSeries(s.direction, 0, ex)


# text rendering and parsing


def _render_coeff_term(c: Fraction, e: int, first: bool) -> str:
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if e == 0:
        body = str(a)
    else:
        qs = "q" if e == 1 else f"q^{e}"
        body = qs if a == 1 else f"{a}*{qs}"
    if first:
        return body if sign == "+" else "-" + body
    return f" {sign} {body}"


def render_laurent(p: LaurentQ) -> str:
    if p.is_zero():
        return "0"
    out = []
    for i, (e, c) in enumerate(sorted(p._c.items(), reverse=True)):
        out.append(_render_coeff_term(c, e, i == 0))
    return "".join(out)


def render_ratq(x: RatQ) -> str:
    if x.is_laurent():
        return render_laurent(x.num)
    return f"({render_laurent(x.num)})/({render_laurent(x.den)})"


_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(\*\*|[-+*/^()]))")


def parse_ratq(text: str) -> RatQ:
    """Parse expressions such as ``(q^2 - q^-2)/(q - q^-1)`` or ``3/2*q^-1 + 1``."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise QFieldError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        if m.group(1):
            toks.append(("int", int(m.group(1))))
        elif m.group(2):
            toks.append(("q", None))
        else:
            op = m.group(3)
            toks.append(("op", "^" if op == "**" else op))
    toks.append(("end", None))
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, val=None):
        nonlocal i
        t = toks[i]
        if (kind and t[0] != kind) or (val is not None and t[1] != val):
            raise QFieldError(f"parse error near token {i} in {text!r}")
        i += 1
        return t

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        v = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            v = v + t if op == "+" else v - t
        return v

    def term():
        v = factor()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            f = factor()
            v = v * f if op == "*" else v / f
        return v

    def exponent():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        if peek() == ("op", "("):
            take()
            e = exponent()
            take("op", ")")
            return sign * e
        return sign * take("int")[1]

    def factor():
        t = peek()
        if t == ("op", "-"):
            take()
            return -factor()
        if t[0] == "int":
            take()
            base = ratq(t[1])
        elif t[0] == "q":
            take()
            base = Q
        elif t == ("op", "("):
            take()
            base = expr()
            take("op", ")")
        else:
            raise QFieldError(f"parse error near token {i} in {text!r}")
        if peek() == ("op", "^"):
            take()
            base = base ** exponent()
        return base

    v = expr()
    take("end")
    return v
