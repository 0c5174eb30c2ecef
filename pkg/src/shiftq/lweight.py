"""The l-weight group in canonical form.

An l-weight is stored as a torus exponent vector (gamma_i = q^(e_i)) together
with exponents n_(i,k) of the generators Psi_(i,q^k), whose node-i component
is the rational function (1 - q^k z). Y and A are only constructors/views.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from .cartan import CartanData, Coweight, NodeVector, TorusWeight, alpha, omega
from .qfield import (
    ONE,
    ZERO,
    LaurentQ,
    QFieldError,
    RatFuncZ,
    RatQ,
    qpow,
    q_number,
)

__all__ = [
    "LWeight",
    "YMonomial",
    "AMonomial",
    "LWeightError",
    "IDENTITY",
    "lw_multiply",
    "lw_psi",
    "lw_torus",
    "lw_from_Y",
    "lw_A",
    "lw_of_Y",
    "lw_of_A",
    "lw_to_Y",
    "lw_to_A",
    "varpi",
    "lw_degree",
    "lw_res_J",
    "lw_shift",
    "is_J_trivial",
    "is_J_dominant",
    "L_level",
    "right_negative",
    "kr_highest_weight",
    "build_named_weight",
    "NAMED_WEIGHTS",
    "factor_component",
    "lw_from_components",
    "parse_lweight",
    "render_lweight",
]


class LWeightError(ValueError):
    pass


class _Keyed:
    """Sparse map (node, spectral exponent) -> nonzero integer."""

    __slots__ = ("_items", "_hash")

    def __init__(self, data: Mapping | Iterable = ()):
        if isinstance(data, Mapping):
            data = data.items()
        acc: dict = {}
        for (i, k), n in data:
            key = (int(i), int(k))
            acc[key] = acc.get(key, 0) + int(n)
        self._items = tuple(sorted((key, n) for key, n in acc.items() if n))
        self._hash = None

    @classmethod
    def _raw(cls, items: tuple):
        obj = cls.__new__(cls)
        obj._items = items
        obj._hash = None
        return obj

    def items(self):
        return self._items

    def as_dict(self) -> dict:
        return dict(self._items)

    def __getitem__(self, key) -> int:
        for k, n in self._items:
            if k == key:
                return n
        return 0

    def __len__(self):
        return len(self._items)

    def __bool__(self):
        return bool(self._items)

    def nodes(self) -> frozenset:
        return frozenset(i for (i, _), _ in self._items)

    def _combine(self, other, sign=1):
        if not other._items:
            return self._items
        acc = dict(self._items)
        for key, n in other._items:
            acc[key] = acc.get(key, 0) + sign * n
        return tuple(sorted((key, n) for key, n in acc.items() if n))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._items == other._items

    def __lt__(self, other):
        return self._items < other._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._items))
        return self._hash


class YMonomial(_Keyed):
    """prod Y_(i,q^k)^n, reduced."""

    def __mul__(self, other: "YMonomial") -> "YMonomial":
        return YMonomial._raw(self._combine(other))

    def inverse(self) -> "YMonomial":
        return YMonomial._raw(tuple((key, -n) for key, n in self._items))

    def __repr__(self):
        if not self._items:
            return "YMonomial(1)"
        return "YMonomial(" + " * ".join(f"Y[{i},{k}]^{n}" for (i, k), n in self._items) + ")"


class AMonomial(_Keyed):
    """prod A_(i,q^k)^(-n) with n >= 0; the empty map is the identity."""

    def __init__(self, data=()):
        super().__init__(data)
        if any(n < 0 for _, n in self._items):
            raise LWeightError("AMonomial exponents count inverse powers and must be >= 0")

    def __mul__(self, other: "AMonomial") -> "AMonomial":
        return AMonomial._raw(self._combine(other))

    def degree(self) -> int:
        return sum(n for _, n in self._items)

    def divides(self, other: "AMonomial") -> bool:
        o = other.as_dict()
        return all(o.get(key, 0) >= n for key, n in self._items)

    def quotient(self, other: "AMonomial") -> "AMonomial":
        """self / other, requiring other to divide self."""
        return AMonomial(self._combine(other, -1))

    def shift(self, k: int) -> "AMonomial":
        return AMonomial._raw(tuple(((i, s + k), n) for (i, s), n in self._items))

    def __repr__(self):
        if not self._items:
            return "AMonomial(1)"
        return "AMonomial(" + " * ".join(f"A[{i},{k}]^-{n}" for (i, k), n in self._items) + ")"


class LWeight:
    """Canonical l-weight: [torus] * prod Psi_(i,q^k)^n."""

    __slots__ = ("torus", "psi", "_hash")

    def __init__(self, torus: TorusWeight | Mapping | None = None, psi: Mapping | Iterable = ()):
        self.torus = torus if isinstance(torus, NodeVector) else NodeVector(torus or {})
        self.psi = psi if isinstance(psi, _Keyed) and not isinstance(psi, (YMonomial, AMonomial)) else _Keyed(psi)
        self._hash = None

    @classmethod
    def _raw(cls, torus: NodeVector, psi_items: tuple) -> "LWeight":
        obj = cls.__new__(cls)
        obj.torus = torus
        obj.psi = _Keyed._raw(psi_items)
        obj._hash = None
        return obj

    def __mul__(self, other: "LWeight") -> "LWeight":
        return LWeight._raw(self.torus + other.torus, self.psi._combine(other.psi))

    def __truediv__(self, other: "LWeight") -> "LWeight":
        return LWeight._raw(self.torus - other.torus, self.psi._combine(other.psi, -1))

    def inverse(self) -> "LWeight":
        return LWeight._raw(-self.torus, tuple((key, -n) for key, n in self.psi._items))

    def __pow__(self, n: int) -> "LWeight":
        return LWeight._raw(self.torus.scale(n), tuple((key, m * n) for key, m in self.psi._items) if n else ())

    def is_identity(self) -> bool:
        return not self.torus and not self.psi

    def nodes(self) -> frozenset:
        return self.torus.support() | self.psi.nodes()

    def psi_at(self, i: int) -> dict:
        return {k: n for (j, k), n in self.psi._items if j == i}

    def component(self, i: int) -> RatFuncZ:
        """Node-i component q^(e_i) prod (1 - q^k z)^n as a rational function of z."""
        num = [qpow(self.torus[i])]
        den = [ONE]
        for k, n in self.psi_at(i).items():
            lin = [ONE, -qpow(k)]
            for _ in range(abs(n)):
                if n > 0:
                    num = RatFuncZ._pmul(num, lin)
                else:
                    den = RatFuncZ._pmul(den, lin)
        return RatFuncZ(num, den)

    def __eq__(self, other):
        if not isinstance(other, LWeight):
            return NotImplemented
        return self.torus == other.torus and self.psi == other.psi

    def __lt__(self, other):
        return (self.torus.items(), self.psi.items()) < (other.torus.items(), other.psi.items())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.torus, self.psi._items))
        return self._hash

    def __repr__(self):
        return f"LWeight({render_lweight(self)})"

    def __str__(self):
        return render_lweight(self)


IDENTITY = LWeight()


def lw_multiply(a: LWeight, b: LWeight, sign: int = 1) -> LWeight:
    if sign == 1:
        return a * b
    if sign == -1:
        return a / b
    raise LWeightError("sign must be +1 or -1")


def lw_psi(i: int, k: int, exp: int = 1) -> LWeight:
    return LWeight._raw(NodeVector._raw(()), (((i, k), exp),) if exp else ())


def lw_torus(e: TorusWeight | Mapping) -> LWeight:
    return LWeight(e)


def lw_from_Y(cd: CartanData, i: int, k: int, exp: int = 1) -> LWeight:
    """Y_(i,q^k)^exp = [omega_i]^exp Psi_(i,k-d_i)^exp Psi_(i,k+d_i)^-exp."""
    if exp == 0:
        return IDENTITY
    di = cd.sym(i)
    return LWeight(omega(cd, i, exp), {(i, k - di): exp, (i, k + di): -exp})


def _A_as_Y(cd: CartanData, i: int, k: int) -> dict:
    """A_(i,q^k) written as a Y-monomial (map (node, spec) -> exponent)."""
    di = cd.sym(i)
    y = {(i, k - di): 1, (i, k + di): 1}
    for j in cd.nodes:
        if j == i:
            continue
        c = cd.C(j, i)
        if c == 0:
            continue
        if c == -1:
            shifts = (0,)
        elif c == -2:
            shifts = (-1, 1)
        elif c == -3:
            shifts = (-2, 0, 2)
        else:
            raise LWeightError(f"unsupported Cartan entry C_({j},{i}) = {c}")
        for s in shifts:
            y[(j, k + s)] = y.get((j, k + s), 0) - 1
    return y


def lw_of_Y(cd: CartanData, m: YMonomial | Mapping) -> LWeight:
    items = m.items() if isinstance(m, _Keyed) else m.items()
    out = IDENTITY
    for (i, k), n in items:
        out = out * lw_from_Y(cd, i, k, n)
    return out


_A_CACHE: dict = {}


def lw_A(cd: CartanData, i: int, k: int, exp: int = 1) -> LWeight:
    """A_(i,q^k)^exp in canonical form."""
    key = (cd, i, k)
    base = _A_CACHE.get(key)
    if base is None:
        base = lw_of_Y(cd, _A_as_Y(cd, i, k))
        _A_CACHE[key] = base
    return base ** exp


def lw_of_A(cd: CartanData, m: AMonomial) -> LWeight:
    """prod A^(-n) for the AMonomial m."""
    out = IDENTITY
    for (i, k), n in m.items():
        out = out * lw_A(cd, i, k, -n)
    return out


def varpi(psi: LWeight) -> TorusWeight:
    return psi.torus


def lw_degree(psi: LWeight) -> Coweight:
    acc: dict = {}
    for (i, _), n in psi.psi.items():
        acc[i] = acc.get(i, 0) + n
    return NodeVector(acc)


def lw_res_J(psi: LWeight, J: Iterable[int]) -> LWeight:
    J = set(J)
    return LWeight._raw(psi.torus.restrict(J), tuple((key, n) for key, n in psi.psi.items() if key[0] in J))


def lw_shift(psi: LWeight, k: int) -> LWeight:
    if k == 0:
        return psi
    return LWeight._raw(psi.torus, tuple(((i, s + k), n) for (i, s), n in psi.psi.items()))


def is_J_trivial(psi: LWeight, J: Iterable[int]) -> bool:
    J = set(J)
    return not (psi.nodes() & J)


def lw_to_Y(cd: CartanData, psi: LWeight) -> YMonomial:
    """Inverse of lw_of_Y on its image; raises LWeightError otherwise.

    At node i, Y_(i,c) contributes x^(c-d) - x^(c+d) to the generating
    Laurent polynomial of Psi-exponents, so the Y-exponents are obtained by
    dividing that polynomial by -(x^d - x^-d).
    """
    out = {}
    for i in sorted(psi.nodes()):
        if not cd.has_node(i):
            raise LWeightError(f"node {i} not in diagram")
        di = cd.sym(i)
        p = dict(psi.psi_at(i))
        ys = {}
        floor = min(p) if p else 0
        # peel from the top: Y_(i,c)^n contributes +n at c-d and -n at c+d
        while p:
            top = max(p)
            if top - 2 * di < floor:
                raise LWeightError(f"Psi-exponents at node {i} are not a Y-monomial")
            c = top - di
            n = -p[top]
            ys[c] = ys.get(c, 0) + n
            p[top] = 0
            p[c - di] = p.get(c - di, 0) - n
            p = {e: v for e, v in p.items() if v}
        ys = {c: n for c, n in ys.items() if n}
        total = sum(ys.values())
        if psi.torus[i] != di * total:
            raise LWeightError(f"torus part at node {i} does not match a Y-monomial")
        for c, n in ys.items():
            out[(i, c)] = n
    for i, _ in psi.torus.items():
        if i not in psi.nodes():
            raise LWeightError("torus part alone is not a Y-monomial")
    m = YMonomial(out)
    if lw_of_Y(cd, m) != psi:
        raise LWeightError("l-weight is not in the image of the Y-monomials")
    return m


def lw_to_A(cd: CartanData, psi: LWeight) -> AMonomial:
    """Write psi = prod A_(i,q^k)^(-n) with n >= 0; raises LWeightError if impossible.

    Multiplying by A_(i,q^k)^(-n) changes the Psi-exponent generating
    polynomials P_j(x) = sum_k n_(j,k) x^k by (x^(d_j) - x^(-d_j)) times a row
    of a q-deformed Cartan matrix applied to N_i(x) = sum_k n_(i,k) x^k.  We
    solve that linear system over Q(x) exactly and check the result.
    """
    if psi.is_identity():
        return AMonomial()
    nodes = list(cd.nodes)
    for i in psi.nodes():
        if not cd.has_node(i):
            raise LWeightError(f"node {i} not in diagram")
    rhs = []
    for j in nodes:
        dj = cd.sym(j)
        P = LaurentQ({k: n for k, n in psi.psi_at(j).items()})
        fac = LaurentQ({dj: 1, -dj: -1})
        rhs.append(RatQ(P, fac))
    M = []
    for j in nodes:
        row = []
        for i in nodes:
            if i == j:
                dj = cd.sym(j)
                row.append(RatQ(LaurentQ({dj: 1, -dj: 1})))
            elif cd.C(j, i) != 0:
                row.append(-q_number(-cd.C(j, i)))
            else:
                row.append(ZERO)
        M.append(row)
    sol = _solve_ratq(M, rhs)
    out = {}
    for i, s in zip(nodes, sol):
        if not s.is_laurent():
            raise LWeightError("l-weight is not a monomial in the A^-1")
        for k, c in s.num.items():
            if c.denominator != 1 or c < 0:
                raise LWeightError("l-weight is not a monomial in the A^-1 with nonnegative powers")
            out[(i, k)] = int(c)
    m = AMonomial(out)
    if lw_of_A(cd, m) != psi:
        raise LWeightError("l-weight does not match any A^-1 monomial (torus mismatch)")
    return m


def _solve_ratq(M, b):
    n = len(M)
    A = [list(M[r]) + [b[r]] for r in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if not A[r][col].is_zero())
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col].inverse()
        A[col] = [x * p for x in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


def is_J_dominant(cd: CartanData, psi: LWeight, J: Iterable[int]) -> bool:
    """res_J(psi) is a Y-monomial with nonnegative exponents."""
    try:
        m = lw_to_Y(cd.subdiagram(J), lw_res_J(psi, J))
    except LWeightError:
        return False
    return all(n > 0 for _, n in m.items())


def L_level(m: YMonomial) -> int | None:
    """Largest spectral exponent among the variables of m (None for m = 1).

    All parameters live in one q-orbit, so there is a single spectral class.
    """
    if not m:
        return None
    return max(k for (_, k), _ in m.items())


def right_negative(m: YMonomial) -> bool:
    """Every variable at the top spectral level carries a negative power.
    The empty monomial is not right-negative."""
    L = L_level(m)
    if L is None:
        return False
    return all(n < 0 for (_, k), n in m.items() if k == L)


def kr_highest_weight(cd: CartanData, i: int, k: int, length: int) -> YMonomial:
    """Y_(i,k) Y_(i,k+2d_i) ... Y_(i,k+2d_i(length-1))."""
    if length < 1:
        raise LWeightError("length must be >= 1")
    di = cd.sym(i)
    return YMonomial({(i, k + 2 * di * s): 1 for s in range(length)})


# named weights


def _psi_tilde(cd: CartanData, j: int, k: int) -> LWeight:
    dj = cd.sym(j)
    out = lw_psi(j, k, -1)
    for i in cd.nodes:
        if i == j:
            continue
        c = cd.C(j, i)
        if c == -1:
            shifts = (dj,)
        elif c == -2:
            shifts = (0, 2 * dj)
        elif c == -3:
            shifts = (-dj, dj, 3 * dj)
        elif c == 0:
            continue
        else:
            raise LWeightError(f"unsupported Cartan entry {c}")
        for s in shifts:
            out = out * lw_psi(i, k + s)
    return out


def _psi_star(cd: CartanData, j: int, k: int) -> LWeight:
    dj = cd.sym(j)
    out = lw_from_Y(cd, j, k - dj)
    for i in cd.nodes:
        if i != j and cd.C(i, j) < 0:
            out = out * lw_psi(i, k - cd.sym(i) * cd.C(i, j))
    return out


def _qqstar_p(cd: CartanData, j: int, k: int, sign: int) -> LWeight:
    out = IDENTITY
    for i in cd.nodes:
        if cd.C(i, j) != 0:
            out = out * lw_psi(i, k - sign * cd.sym(i) * cd.C(i, j))
    return out


NAMED_WEIGHTS = ("psi_star", "psi_tilde", "qq_psi_p", "qqstar_psi_p1", "qqstar_psi_p2", "newT_psi_p")


def build_named_weight(cd: CartanData, name: str, j: int, k: int) -> LWeight:
    cd.idx(j)
    if name == "psi_tilde":
        return _psi_tilde(cd, j, k)
    if name == "psi_star":
        return _psi_star(cd, j, k)
    if name in ("qq_psi_p", "newT_psi_p"):
        return lw_psi(j, k) * _psi_tilde(cd, j, k)
    if name == "qqstar_psi_p1":
        return _qqstar_p(cd, j, k, +1)
    if name == "qqstar_psi_p2":
        return _qqstar_p(cd, j, k, -1)
    raise LWeightError(f"unknown named weight {name!r}; expected one of {', '.join(NAMED_WEIGHTS)}")


# reading l-weights back from rational functions


def factor_component(f: RatFuncZ) -> tuple[int, dict]:
    """Write f = q^e prod (1 - q^k z)^n; returns (e, {k: n}).

    The z-linear coefficient of a normalized product of (1 - q^k z) factors
    is -sum q^k, which lists the roots with multiplicity; the factorization
    is then confirmed by multiplying back.
    """
    num, den = list(f.num), list(f.den)
    if not num:
        raise LWeightError("zero eigenvalue")
    if num[0].is_zero() or den[0].is_zero():
        raise LWeightError("eigenvalue must be regular and nonzero at z = 0")
    c = num[0] / den[0]
    if not c.is_monomial() or next(iter(c.num.coeffs.values())) != 1:
        raise LWeightError(f"value at z = 0 is not a power of q: {c}")
    e = next(iter(c.num.coeffs))

    def roots(p):
        p0 = p[0]
        p = [x / p0 for x in p]
        if len(p) == 1:
            return {}
        lin = -p[1]
        if not lin.is_laurent():
            raise LWeightError("eigenvalue does not factor over q-powers")
        rs = {}
        for k, v in lin.num.items():
            if v.denominator != 1 or v < 0:
                raise LWeightError("eigenvalue does not factor over q-powers")
            rs[k] = int(v)
        if sum(rs.values()) != len(p) - 1:
            raise LWeightError("eigenvalue does not factor over q-powers")
        return rs

    out = dict(roots(num))
    for k, n in roots(den).items():
        out[k] = out.get(k, 0) - n
    out = {k: n for k, n in out.items() if n}
    return e, out


def lw_from_components(comps: Mapping[int, RatFuncZ]) -> LWeight:
    torus = {}
    psi = {}
    for i, f in comps.items():
        e, fac = factor_component(f)
        torus[i] = e
        for k, n in fac.items():
            psi[(i, k)] = n
    lw = LWeight(torus, psi)
    for i, f in comps.items():
        g = lw.component(i)
        if RatFuncZ._pmul(list(g.num), list(f.den)) != RatFuncZ._pmul(list(f.num), list(g.den)):
            raise LWeightError(f"eigenvalue at node {i} does not factor over q-powers")
    return lw


# text grammar: Psi[i,k]^n * Y[i,k]^n * A[i,k]^n * t[i]^e


_LW_TOKEN = re.compile(r"\s*(Psi|Y|A|t)\s*\[\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\]\s*(?:\^\s*\(?\s*(-?\d+)\s*\)?)?\s*")


def parse_lweight(text: str, cd: CartanData | None = None) -> LWeight:
    """Parse e.g. ``Psi[1,0]^-1 * Psi[2,1]`` or ``Y[1,-1] * t[2]^3``; ``1`` is the identity.
    Y and A factors need the diagram."""
    s = text.strip()
    if s in ("", "1"):
        return IDENTITY
    out = IDENTITY
    for part in s.split("*"):
        m = _LW_TOKEN.fullmatch(part)
        if not m:
            raise LWeightError(f"cannot parse factor {part.strip()!r}")
        kind, a, b, n = m.group(1), int(m.group(2)), m.group(3), int(m.group(4) or 1)
        if kind == "t":
            if b is not None:
                raise LWeightError("t[i] takes a single node index")
            out = out * LWeight({a: n})
            continue
        if b is None:
            raise LWeightError(f"{kind}[i,k] needs a node and a spectral exponent")
        k = int(b)
        if kind == "Psi":
            out = out * lw_psi(a, k, n)
        else:
            if cd is None:
                raise LWeightError(f"{kind} factors need a Dynkin type")
            cd.idx(a)
            out = out * (lw_from_Y(cd, a, k, n) if kind == "Y" else lw_A(cd, a, k, n))
    return out


def render_lweight(psi: LWeight) -> str:
    parts = [f"Psi[{i},{k}]" + (f"^{n}" if n != 1 else "") for (i, k), n in psi.psi.items()]
    parts += [f"t[{i}]" + (f"^{e}" if e != 1 else "") for i, e in psi.torus.items()]
    return " * ".join(parts) if parts else "1"


def lweight_to_json(psi: LWeight) -> dict:
    return {
        "t": {str(i): e for i, e in psi.torus.items()},
        "psi": [{"node": i, "spec": k, "exp": n} for (i, k), n in psi.psi.items()],
    }


def lweight_from_json(doc: Mapping) -> LWeight:
    try:
        torus = {int(i): int(e) for i, e in doc.get("t", {}).items()}
        psi = {(int(p["node"]), int(p["spec"])): int(p["exp"]) for p in doc.get("psi", [])}
    except (KeyError, TypeError, ValueError) as exc:
        raise LWeightError(f"malformed l-weight document: {exc}") from None
    return LWeight(torus, psi)
