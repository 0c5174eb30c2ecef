"""Exact checks of Grothendieck-ring identities through truncated q-characters.

Each class [L(Psi)] is rendered as a truncated q-character from the closed
forms in `qchar`; a sum of products of classes is compared with another after
materializing both to absolute l-weights.  Truncation is measured from the
top of the left-hand side, so summands with a lower top keep fewer terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cartan import CartanData, alpha, omega
from .lweight import (
    AMonomial,
    LWeight,
    LWeightError,
    build_named_weight,
    kr_highest_weight,
    lw_of_A,
    lw_of_Y,
    lw_psi,
    lw_to_A,
    render_lweight,
)
from .qchar import (
    QCharError,
    TruncatedQChar,
    qc_inflation,
    qc_kr_sl2,
    qc_materialize,
    qc_neg_prefund_rank1,
    qc_product,
    qc_single,
    qc_truncate,
)

__all__ = [
    "IDENTITIES",
    "IdentityError",
    "IdentityReport",
    "check_identity",
    "identity_sides",
    "decompose_rad_top",
    "qc_rebase",
    "materialized_sum",
]

IDENTITIES = ("wronskian", "baxter_qt", "t_system", "qq_tilde", "qq_star", "inflated_t_system")
_NEEDS_LENGTH = ("t_system", "inflated_t_system")
_NEEDS_EXTERNAL = ("qq_tilde", "qq_star", "inflated_t_system")


class IdentityError(ValueError):
    pass


@dataclass
class IdentityReport:
    name: str
    params: dict
    passed: bool
    lhs_terms: int = 0
    rhs_terms: int = 0
    lhs_top: LWeight | None = None
    rhs_tops: list = field(default_factory=list)
    mismatch: dict | None = None

    def to_json(self) -> dict:
        return {
            "identity": self.name,
            "params": dict(self.params),
            "passed": self.passed,
            "lhs_terms": self.lhs_terms,
            "rhs_terms": self.rhs_terms,
            "lhs_top": render_lweight(self.lhs_top) if self.lhs_top is not None else None,
            "rhs_tops": [render_lweight(t) for t in self.rhs_tops],
            "mismatch": self.mismatch,
        }


# class builders


def _weight_class(cd: CartanData, torus, depth: int) -> TruncatedQChar:
    return qc_single(cd, LWeight(torus), depth)


def _pos(cd: CartanData, top: LWeight, depth: int) -> TruncatedQChar:
    """One-dimensional simple module: positive prefundamentals, invertibles, products of both."""
    return qc_single(cd, top, depth)


def _inflate(cd: CartanData, chiW: TruncatedQChar, psi_p: LWeight) -> TruncatedQChar:
    return qc_inflation(chiW, chiW.top * psi_p, cd)


def _product(chars: list) -> TruncatedQChar:
    out = chars[0]
    for c in chars[1:]:
        out = qc_product(out, c)
    return out


def identity_sides(name: str, cd: CartanData, j: int, k: int, depth: int, length: int | None = None):
    """Both sides as lists of summands; each summand is a list of characters to multiply."""
    if name not in IDENTITIES:
        raise IdentityError(f"unknown identity {name!r}; expected one of {', '.join(IDENTITIES)}")
    try:
        cd.idx(j)
    except Exception as exc:
        raise IdentityError(str(exc)) from None
    if depth < 0:
        raise IdentityError("depth must be nonnegative")
    if name in _NEEDS_LENGTH:
        if length is None or length < 1:
            raise IdentityError(f"{name} needs a length >= 1")
    if name in _NEEDS_EXTERNAL and not cd.neighbours(j):
        raise IdentityError(f"{name} needs a node with neighbours; node {j} of {cd.type}{cd.rank} has none")
    D = depth
    dj = cd.sym(j)
    sub = cd.subdiagram([j])

    if name == "wronskian":
        # [L(Psi_a)][L(Psi_a^-1)] = 1 + [-2 omega_j][L(Psi_(a q^2))][L(Psi_(a q^-2)^-1)]
        lhs = [[_pos(sub, lw_psi(j, k), D), qc_neg_prefund_rank1(cd, j, k, D)]]
        rhs = [
            [_pos(sub, LWeight(), D)],
            [_weight_class(sub, omega(sub, j, -2), D), _pos(sub, lw_psi(j, k + 2 * dj), D),
             qc_neg_prefund_rank1(cd, j, k - 2 * dj, D)],
        ]
        return lhs, rhs

    if name == "baxter_qt":
        # [L(Psi_a)][L(Y_(a q^-1))] = [omega_j][L(Psi_(a q^-2))] + [-omega_j][L(Psi_(a q^2))]
        lhs = [[_pos(sub, lw_psi(j, k), D), qc_kr_sl2(cd, j, k, 1, D)]]
        rhs = [
            [_weight_class(sub, omega(sub, j, 1), D), _pos(sub, lw_psi(j, k - 2 * dj), D)],
            [_weight_class(sub, omega(sub, j, -1), D), _pos(sub, lw_psi(j, k + 2 * dj), D)],
        ]
        return lhs, rhs

    if name == "t_system":
        # [T_(L,a)][T_(L,a q^-2)] = [T_(L+1,a)][T_(L-1,a q^-2)] + 1
        L = length
        lhs = [[qc_kr_sl2(cd, j, k, L, D), qc_kr_sl2(cd, j, k - 2 * dj, L, D)]]
        rhs = [
            [qc_kr_sl2(cd, j, k, L + 1, D), qc_kr_sl2(cd, j, k - 2 * dj, L - 1, D)],
            [_pos(sub, LWeight(), D)],
        ]
        return lhs, rhs

    try:
        if name == "qq_tilde":
            # [L(Psi_a)][L(Psi~_a)] = [L(Psi_p)] + [-alpha_j][L(Psi_(a q^2))][L(Psi~_(a q^-2))]
            def tilde(s):
                return _inflate(cd, qc_neg_prefund_rank1(cd, j, s, D), build_named_weight(cd, "qq_psi_p", j, s))

            lhs = [[_pos(cd, lw_psi(j, k), D), tilde(k)]]
            rhs = [
                [_pos(cd, build_named_weight(cd, "qq_psi_p", j, k), D)],
                [_weight_class(cd, alpha(cd, j, -1), D), _pos(cd, lw_psi(j, k + 2 * dj), D), tilde(k - 2 * dj)],
            ]
            return lhs, rhs

        if name == "qq_star":
            # [L(Psi_a)][L(Psi*_a)] = [omega_j][L(Psi_p1)] + [omega_j - alpha_j][L(Psi_p2)]
            star_top = build_named_weight(cd, "psi_star", j, k)
            chiW = qc_kr_sl2(cd, j, k, 1, D)
            star = qc_inflation(chiW, star_top, cd)
            lhs = [[_pos(cd, lw_psi(j, k), D), star]]
            rhs = [
                [_weight_class(cd, omega(cd, j, 1), D), _pos(cd, build_named_weight(cd, "qqstar_psi_p1", j, k), D)],
                [_weight_class(cd, omega(cd, j, 1) - alpha(cd, j, 1), D),
                 _pos(cd, build_named_weight(cd, "qqstar_psi_p2", j, k), D)],
            ]
            return lhs, rhs

        # inflated_t_system:
        # [V_(L,a)][V_(L,a q^-2)] = [V_(L+1,a)][V_(L-1,a q^-2)] + [L(2 omega_j - alpha_j)][L(Psi_p(a))][L(Psi_p(a q^-2(L+1)))]
        L = length

        def V(n, s):
            psi_p = build_named_weight(cd, "newT_psi_p", j, s)
            if n == 0:
                return _pos(cd, psi_p, D)
            return _inflate(cd, qc_kr_sl2(cd, j, s, n, D), psi_p)

        lhs = [[V(L, k), V(L, k - 2 * dj)]]
        rhs = [
            [V(L + 1, k), V(L - 1, k - 2 * dj)],
            [_weight_class(cd, omega(cd, j, 2 * L) - alpha(cd, j, L), D),
             _pos(cd, build_named_weight(cd, "newT_psi_p", j, k), D),
             _pos(cd, build_named_weight(cd, "newT_psi_p", j, k - 2 * dj * (L + 1)), D)],
        ]
        return lhs, rhs
    except (QCharError, LWeightError) as exc:
        raise IdentityError(str(exc)) from None


# comparison


def _offset(cd: CartanData, top: LWeight, ref: LWeight) -> AMonomial:
    """A-monomial m with top = ref * m^-1; raises if top is not below ref."""
    try:
        return lw_to_A(cd, top / ref)
    except LWeightError as exc:
        raise IdentityError(f"summand top {render_lweight(top)} is not below {render_lweight(ref)}: {exc}") from None


def materialized_sum(summands: list, ref: LWeight, depth: int) -> dict:
    """Sum over summands of the materialized product characters, truncated at
    `depth` relative to `ref`."""
    acc: dict = {}
    for chars in summands:
        prod = _product(chars)
        off = _offset(prod.cd, prod.top, ref).degree()
        if off > depth:
            continue
        for w, mult in qc_materialize(qc_truncate(prod, depth - off)):
            acc[w] = acc.get(w, 0) + mult
    return {w: c for w, c in acc.items() if c}


def check_identity(
    name: str, cd: CartanData, j: int, k: int, depth: int = 6, length: int | None = None
) -> IdentityReport:
    name = name.replace("-", "_")
    lhs, rhs = identity_sides(name, cd, j, k, depth, length)
    lhs_prod = _product(lhs[0]) if len(lhs) == 1 else None
    ref = lhs_prod.top if lhs_prod is not None else _product(lhs[0]).top
    base_cd = lhs_prod.cd
    L = materialized_sum(lhs, ref, depth)
    R = materialized_sum(rhs, ref, depth)
    params = {"type": f"{cd.type}{cd.rank}", "node": j, "spec": k, "depth": depth}
    if length is not None:
        params["length"] = length
    report = IdentityReport(
        name=name,
        params=params,
        passed=L == R,
        lhs_terms=sum(L.values()),
        rhs_terms=sum(R.values()),
        lhs_top=ref,
        rhs_tops=[_product(s).top for s in rhs],
    )
    if not report.passed:
        for w in sorted(set(L) | set(R)):
            if L.get(w, 0) != R.get(w, 0):
                try:
                    mon = str(lw_to_A(base_cd, w / ref))
                except LWeightError:
                    mon = None
                report.mismatch = {
                    "lweight": render_lweight(w),
                    "monomial": mon,
                    "lhs": L.get(w, 0),
                    "rhs": R.get(w, 0),
                }
                break
    return report


# rad / top


def qc_rebase(c: TruncatedQChar, top: LWeight, depth: int | None = None) -> TruncatedQChar:
    """Rewrite c relative to a higher top: terms are multiplied by the offset monomial."""
    off = _offset(c.cd, c.top, top)
    D = c.depth if depth is None else depth
    if D > c.depth + off.degree():
        raise IdentityError("rebased depth exceeds what the character covers")
    return TruncatedQChar.make(c.cd, top, D, {m * off: n for m, n in c.items})


def decompose_rad_top(product: TruncatedQChar, top_simple: TruncatedQChar) -> TruncatedQChar:
    """Termwise difference product - top_simple, both relative to the same top.

    The result carries the top of `product`; its terms form the character of the radical.
    """
    if product.top != top_simple.top:
        raise IdentityError(
            f"top mismatch: {render_lweight(product.top)} vs {render_lweight(top_simple.top)}"
        )
    if product.cd.nodes != top_simple.cd.nodes:
        raise IdentityError("characters live on different diagrams")
    D = min(product.depth, top_simple.depth)
    a = qc_truncate(product, D).terms
    b = qc_truncate(top_simple, D).terms
    out = {}
    for m in set(a) | set(b):
        d = a.get(m, 0) - b.get(m, 0)
        if d < 0:
            raise IdentityError(f"negative multiplicity {d} at {m}: wrong top candidate")
        if d:
            out[m] = d
    return TruncatedQChar.make(product.cd, product.top, D, out)
