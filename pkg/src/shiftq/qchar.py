"""Depth-truncated q-characters: a highest l-weight times a finite sum of
A^-1 monomials with multiplicities.

Closed forms live here (KR ladders, negative prefundamentals, the A2-pair
family), together with the inflation helpers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .cartan import CartanData, Coweight, NodeVector, alpha
from .lweight import (
    IDENTITY,
    AMonomial,
    LWeight,
    LWeightError,
    kr_highest_weight,
    lw_degree,
    lw_of_A,
    lw_of_Y,
    lw_psi,
    lw_res_J,
    varpi,
)

__all__ = [
    "TruncatedQChar",
    "InflationData",
    "QCharError",
    "InflationFailure",
    "qc_single",
    "qc_product",
    "qc_embed_J",
    "qc_restrict_J",
    "qc_materialize",
    "qc_truncate",
    "qc_kr_sl2",
    "qc_neg_prefund_rank1",
    "qc_neg_prefund_sl3_pair",
    "qc_inflation",
    "verify_inflation",
    "candidate_spectral_set",
    "build_inflation_data",
    "sl3_pair_count",
    "varpi_multiset",
    "varpi_iota_J",
]


class QCharError(ValueError):
    pass


class InflationFailure(QCharError):
    def __init__(self, reason: str, monomial: AMonomial | None = None, detail=None):
        super().__init__(reason)
        self.reason = reason
        self.monomial = monomial
        self.detail = detail


@dataclass(frozen=True)
class TruncatedQChar:
    cd: CartanData
    top: LWeight
    depth: int
    items: tuple  # sorted ((AMonomial, mult), ...)

    @classmethod
    def make(cls, cd: CartanData, top: LWeight, depth: int, terms: Mapping[AMonomial, int]) -> "TruncatedQChar":
        if depth < 0:
            raise QCharError("depth must be nonnegative")
        clean = {}
        for m, c in terms.items():
            if c < 0:
                raise QCharError(f"negative multiplicity for {m}")
            if c and m.degree() <= depth:
                clean[m] = clean.get(m, 0) + c
        return cls(cd, top, depth, tuple(sorted(clean.items())))

    @property
    def terms(self) -> dict:
        return dict(self.items)

    def mult(self, m: AMonomial) -> int:
        for k, c in self.items:
            if k == m:
                return c
        return 0

    def support_nodes(self) -> frozenset:
        out = set()
        for m, _ in self.items:
            out |= m.nodes()
        return frozenset(out)

    def same_terms(self, other: "TruncatedQChar") -> bool:
        return self.top == other.top and self.depth == other.depth and self.items == other.items

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True)
class InflationData:
    candidates: dict  # external node -> frozenset of spectral exponents
    multiplicities: dict  # (node, b) -> n >= 0
    psi_p: LWeight
    mu: Coweight


def qc_single(cd: CartanData, top: LWeight, depth: int) -> TruncatedQChar:
    """Character of a one-dimensional simple module (Psi_(i,a), invertibles, J-trivial tops)."""
    return TruncatedQChar.make(cd, top, depth, {AMonomial(): 1})


def qc_truncate(c: TruncatedQChar, depth: int) -> TruncatedQChar:
    if depth > c.depth:
        raise QCharError("cannot extend a truncated character")
    return TruncatedQChar.make(c.cd, c.top, depth, c.terms)


def qc_product(a: TruncatedQChar, b: TruncatedQChar) -> TruncatedQChar:
    if a.cd.nodes != b.cd.nodes:
        raise QCharError("characters live on different diagrams")
    D = min(a.depth, b.depth)
    acc: dict = {}
    bl = [(m, c, m.degree()) for m, c in b.items]
    for m1, c1 in a.items:
        d1 = m1.degree()
        if d1 > D:
            continue
        for m2, c2, d2 in bl:
            if d1 + d2 <= D:
                m = m1 * m2
                acc[m] = acc.get(m, 0) + c1 * c2
    return TruncatedQChar.make(a.cd, a.top * b.top, D, acc)


def qc_embed_J(c: TruncatedQChar, cd_full: CartanData, top_override: LWeight) -> TruncatedQChar:
    J = set(c.cd.nodes)
    if not c.support_nodes() <= J:
        raise QCharError("character has terms outside J")
    for j in J:
        cd_full.idx(j)
    return TruncatedQChar.make(cd_full, top_override, c.depth, c.terms)


def qc_restrict_J(c: TruncatedQChar, J: Iterable[int]) -> TruncatedQChar:
    J = set(J)
    if not c.support_nodes() <= J:
        raise QCharError("restriction of characters with terms outside J is not supported")
    sub = c.cd.subdiagram(J)
    return TruncatedQChar.make(sub, lw_res_J(c.top, J), c.depth, c.terms)


def qc_materialize(c: TruncatedQChar) -> list[tuple[LWeight, int]]:
    acc: dict = {}
    for m, mult in c.items:
        w = c.top * lw_of_A(c.cd, m)
        acc[w] = acc.get(w, 0) + mult
    return sorted(acc.items())


# closed forms


def _ladder(j: int, k: int, step: int, length: int) -> AMonomial:
    """A_(j,k)^-1 A_(j,k-step)^-1 ... (length factors)."""
    return AMonomial({(j, k - step * t): 1 for t in range(length)})


def qc_kr_sl2(cd: CartanData, j: int, k: int, length: int, depth: int) -> TruncatedQChar:
    """Kirillov-Reshetikhin character over the rank-one subdiagram {j}.

    With a = q^k this is T_(length, a) = L(Y_(j,a q_j^(1-2 length)) ... Y_(j,a q_j^-1)),
    whose normalized character is 1 + sum_(s<length) A_(j,a)^-1 ... A_(j,a q_j^-2s)^-1.
    """
    if length < 0:
        raise QCharError("length must be >= 0")
    sub = cd.subdiagram([j])
    if length == 0:
        return qc_single(sub, IDENTITY, depth)
    dj = cd.sym(j)
    top = lw_of_Y(sub, kr_highest_weight(sub, j, k + dj * (1 - 2 * length), length))
    terms = {AMonomial(): 1}
    for s in range(1, min(length, depth) + 1):
        terms[_ladder(j, k, 2 * dj, s)] = 1
    return TruncatedQChar.make(sub, top, depth, terms)


def qc_neg_prefund_rank1(cd: CartanData, j: int, k: int, depth: int) -> TruncatedQChar:
    """L(Psi_(j,q^k)^-1) over the subdiagram {j}: the infinite A-ladder, truncated."""
    sub = cd.subdiagram([j])
    dj = cd.sym(j)
    terms = {_ladder(j, k, 2 * dj, s): 1 for s in range(depth + 1)}
    return TruncatedQChar.make(sub, lw_psi(j, k, -1), depth, terms)


def sl3_pair_count(depth: int) -> int:
    """Number of pairs n >= m >= 0 with n + m <= depth."""
    return sum(1 for n in range(depth + 1) for m in range(n + 1) if n + m <= depth)


def qc_neg_prefund_sl3_pair(cd: CartanData, j1: int, j2: int, k: int, depth: int) -> TruncatedQChar:
    """L(Psi_(j1,q^k)^-1) over the A2 subdiagram {j1, j2}: one term per n >= m >= 0."""
    if j1 == j2 or cd.C(j1, j2) != -1 or cd.C(j2, j1) != -1:
        raise QCharError(f"nodes {j1}, {j2} do not span an A2 subdiagram")
    sub = cd.subdiagram([j1, j2])
    d = cd.sym(j1)
    terms = {}
    for n in range(depth + 1):
        for m in range(n + 1):
            if n + m > depth:
                break
            a = {(j1, k + 2 * (1 - t) * d): 1 for t in range(1, n + 1)}
            for t in range(1, m + 1):
                a[(j2, k + (3 - 2 * t) * d)] = 1
            terms[AMonomial(a)] = 1
    return TruncatedQChar.make(sub, lw_psi(j1, k, -1), depth, terms)


# inflations


def _check_external_shape(psi_p: LWeight, J: set) -> None:
    """psi_p must be J-trivial and, outside J, a product of positive Psi's and torus factors."""
    if psi_p.nodes() & J:
        raise InflationFailure("Psi_p is not J-trivial", detail=str(psi_p))
    for (i, k), n in psi_p.psi.items():
        if n < 0:
            raise InflationFailure(f"Psi_p has the inverse factor Psi[{i},{k}]^{n}", detail=(i, k, n))


def qc_inflation(chiW: TruncatedQChar, psi_top: LWeight, cd_full: CartanData) -> TruncatedQChar:
    J = set(chiW.cd.nodes)
    if lw_res_J(psi_top, J) != chiW.top:
        raise InflationFailure("res_J of the proposed top differs from the top of W")
    _check_external_shape(psi_top / chiW.top, J)
    return qc_embed_J(chiW, cd_full, psi_top)


def verify_inflation(chiV: TruncatedQChar, chiW: TruncatedQChar, J: Iterable[int]) -> LWeight:
    """Return Psi_p = top_V / top_W if chiV is the character of a J-inflation of W,
    otherwise raise InflationFailure naming the first problem."""
    J = set(J)
    if chiV.depth != chiW.depth:
        raise InflationFailure("depths differ")
    if set(chiW.cd.nodes) != J:
        raise InflationFailure("W is not a character over J")
    for m, _ in chiV.items:
        if not m.nodes() <= J:
            raise InflationFailure("term of V not supported on J", monomial=m)
    tv, tw = chiV.terms, chiW.terms
    for m in sorted(set(tv) | set(tw)):
        if tv.get(m, 0) != tw.get(m, 0):
            raise InflationFailure(
                "multiplicity mismatch", monomial=m, detail=(tv.get(m, 0), tw.get(m, 0))
            )
    psi_p = chiV.top / chiW.top
    _check_external_shape(psi_p, J)
    return psi_p


def candidate_spectral_set(cd: CartanData, i: int, j: int) -> frozenset:
    """{l : -d_i < l <= r h + d_i - d_j} with r the lacing number and h the dual Coxeter number."""
    if i == j:
        raise QCharError("i must be an external node, distinct from j")
    di, dj = cd.sym(i), cd.sym(j)
    hi = cd.lacing * cd.dual_coxeter + di - dj
    return frozenset(range(-di + 1, hi + 1))


def build_inflation_data(chiVprime: TruncatedQChar, J: Iterable[int]) -> InflationData:
    """Multiplicity data for the Psi_p that inflates W from a caller-supplied
    (truncated) character of V' whose terms use J-variables and at most one
    external A^-1."""
    J = set(J)
    cd = chiVprime.cd
    terms = chiVprime.terms
    jmon = {m: c for m, c in terms.items() if m.nodes() <= J}
    cands: dict = {}
    ext_terms: dict = {}
    for m, c in terms.items():
        outside = [(key, n) for key, n in m.items() if key[0] not in J]
        if len(outside) == 1 and outside[0][1] == 1 and c > 0:
            (i, b), _ = outside[0]
            cands.setdefault(i, set()).add(b)
            rest = AMonomial({key: n for key, n in m.items() if key[0] in J})
            ext_terms[(i, b, rest)] = c
    mults: dict = {}
    psi_p = IDENTITY
    mu = lw_degree(chiVprime.top)
    for i in sorted(cands):
        for b in sorted(cands[i]):
            best = 0
            Ms = set(jmon) | {rest for (i2, b2, rest) in ext_terms if (i2, b2) == (i, b)}
            for M in Ms:
                val = ext_terms.get((i, b, M), 0) + jmon.get(M, 0) - 2
                best = max(best, val)
            mults[(i, b)] = best
            if best:
                psi_p = psi_p * lw_psi(i, b, best)
                mu = mu + NodeVector({i: best})
    return InflationData(
        candidates={i: frozenset(s) for i, s in cands.items()},
        multiplicities=mults,
        psi_p=psi_p,
        mu=mu,
    )


def varpi_multiset(c: TruncatedQChar, normalized: bool = True) -> dict:
    """Multiset of varpi-values (as torus vectors) of the materialized character,
    divided by varpi(top) when normalized."""
    acc: dict = {}
    base = varpi(c.top)
    for w, mult in qc_materialize(c):
        v = varpi(w) - base if normalized else varpi(w)
        acc[v] = acc.get(v, 0) + mult
    return acc


def varpi_iota_J(chiW: TruncatedQChar, cd_full: CartanData) -> dict:
    """Image of the normalized weight multiset of W under [-alpha_j]^J -> [-alpha_j].

    Each normalized J-weight is written as -sum n_j alpha_j by solving the
    J-Cartan system, then re-read as a torus vector of the full diagram.
    """
    from fractions import Fraction

    sub = chiW.cd
    J = list(sub.nodes)
    M = [[Fraction(sub.DC(i, j)) for j in J] for i in J]
    out: dict = {}
    for t, mult in varpi_multiset(chiW).items():
        rhs = [Fraction(-t[i]) for i in J]
        n = _solve_fraction(M, rhs)
        if any(x.denominator != 1 or x < 0 for x in n):
            raise QCharError(f"weight {t} is not in -Q_J^+")
        img = NodeVector({})
        for j, nj in zip(J, n):
            img = img - alpha(cd_full, j, int(nj))
        out[img] = out.get(img, 0) + mult
    return out


def _solve_fraction(M, b):
    n = len(b)
    A = [row[:] + [b[r]] for r, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c] / A[c][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [A[r][n] / A[r][r] for r in range(n)]
