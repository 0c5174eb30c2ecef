"""Explicit module realizations, exact checks of the defining relations,
l-weight extraction, Drinfeld-coproduct tensor actions and the A2 R-matrix.

A realization acts by exponential modes: x_(i,r) v = sum coeff * base^r * target.
Realizations are written at spectral parameter 1 and moved to a = q^k by the
pullback along the grading automorphism (bases scale by q^k, phi(z) -> phi(q^k z)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from .cartan import CartanData, Coweight, NodeVector, coroot, dynkin_data
from .lweight import (
    IDENTITY,
    LWeight,
    LWeightError,
    build_named_weight,
    lw_A,
    lw_degree,
    lw_from_components,
    lw_from_Y,
    lw_of_Y,
    lw_psi,
    lw_shift,
    lw_to_A,
    kr_highest_weight,
)
from .qchar import TruncatedQChar
from .qfield import (
    ONE,
    ZERO,
    QFieldError,
    PoleError,
    RatFuncZ,
    RatQ,
    ZSeries,
    q_binomial,
    q_number,
    qpow,
    series_expand,
    series_log,
)

__all__ = [
    "ExpModeTerm",
    "ModuleRealization",
    "RelationReport",
    "Window",
    "TruncationEscape",
    "RealizationError",
    "RELATIONS",
    "REALIZATIONS",
    "realize",
    "apply_mode",
    "phi_series_eigen",
    "extract_h_eigenvalue",
    "verify_definition_relations",
    "module_qchar",
    "drinfeld_tensor",
    "perturb",
    "rmatrix_gamma",
    "rmatrix_check",
    "rmatrix_indeterminate",
    "rmatrix_modules",
    "RMatrixReport",
]

RELATIONS = ("CommPhi", "PhiTX", "Relhx", "Relxpxmphi", "xpmRelSupp", "qSerre")


class RealizationError(ValueError):
    pass


class TruncationEscape(Exception):
    def __init__(self, label, bound):
        super().__init__(f"label {label!r} exceeds the basis bound {bound}")
        self.label = label
        self.bound = bound


@dataclass(frozen=True)
class ExpModeTerm:
    target: Hashable
    coeff: RatQ
    base: RatQ


@dataclass
class ModuleRealization:
    """Basis labels with diagonal phi-eigenvalues and exponential-mode x-actions.

    `rank(label)` orders the basis; `basis(N)` lists labels of rank <= N.
    `max_rank` is None for infinite-dimensional modules.
    """

    name: str
    cd: CartanData
    mu: Coweight
    top_label: Hashable
    rank: Callable[[Hashable], int]
    basis: Callable[[int], list]
    phi_fn: Callable[[Hashable, int], RatFuncZ]
    xplus_fn: Callable[[Hashable, int], list]
    xminus_fn: Callable[[Hashable, int], list]
    lweight_fn: Callable[[Hashable], LWeight] | None = None
    max_rank: int | None = None
    params: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def phi(self, label, i: int) -> RatFuncZ:
        key = ("phi", label, i)
        out = self._cache.get(key)
        if out is None:
            out = self.phi_fn(label, i)
            self._cache[key] = out
        return out

    def xplus(self, label, i: int) -> list:
        key = ("x+", label, i)
        out = self._cache.get(key)
        if out is None:
            out = [t for t in self.xplus_fn(label, i) if not t.coeff.is_zero()]
            self._cache[key] = out
        return out

    def xminus(self, label, i: int) -> list:
        key = ("x-", label, i)
        out = self._cache.get(key)
        if out is None:
            out = [t for t in self.xminus_fn(label, i) if not t.coeff.is_zero()]
            self._cache[key] = out
        return out

    def x(self, sign: int, label, i: int) -> list:
        return self.xplus(label, i) if sign > 0 else self.xminus(label, i)

    def lweight(self, label) -> LWeight:
        """l-weight of a basis vector, read off from the phi-eigenvalues."""
        key = ("lw", label)
        out = self._cache.get(key)
        if out is None:
            out = lw_from_components({i: self.phi(label, i) for i in self.cd.nodes})
            self._cache[key] = out
        return out

    def alpha_mu(self, i: int) -> int:
        return self.mu[i]


# helpers for building realizations


def _lin(k: int) -> list:
    """1 - q^k z."""
    return [ONE, -qpow(k)]


def _ratfunc(const: RatQ, num_roots: Iterable[int] = (), den_roots: Iterable[int] = ()) -> RatFuncZ:
    num = [const]
    den = [ONE]
    for k in num_roots:
        num = RatFuncZ._pmul(num, _lin(k))
    for k in den_roots:
        den = RatFuncZ._pmul(den, _lin(k))
    return RatFuncZ(num, den)


def _scale_z(f: RatFuncZ, k: int) -> RatFuncZ:
    """f(q^k z)."""
    if k == 0:
        return f
    return RatFuncZ(
        [c * qpow(k * n) for n, c in enumerate(f.num)],
        [c * qpow(k * n) for n, c in enumerate(f.den)],
    )


def _shifted(real: ModuleRealization, k: int) -> ModuleRealization:
    """Pullback along the grading automorphism with a = q^k."""
    if k == 0:
        return real
    a = qpow(k)

    def mv(terms):
        return [ExpModeTerm(t.target, t.coeff, t.base * a) for t in terms]

    lwf = None
    if real.lweight_fn is not None:
        base_fn = real.lweight_fn
        lwf = lambda lab: lw_shift(base_fn(lab), k)
    return ModuleRealization(
        name=real.name,
        cd=real.cd,
        mu=real.mu,
        top_label=real.top_label,
        rank=real.rank,
        basis=real.basis,
        phi_fn=lambda lab, i: _scale_z(real.phi_fn(lab, i), k),
        xplus_fn=lambda lab, i: mv(real.xplus_fn(lab, i)),
        xminus_fn=lambda lab, i: mv(real.xminus_fn(lab, i)),
        lweight_fn=lwf,
        max_rank=real.max_rank,
        params=dict(real.params, spec=k),
    )


def _lw_phi(lw: LWeight, i: int) -> RatFuncZ:
    return lw.component(i)


def _check_J_trivial_positive(psi_p: LWeight, J: set) -> None:
    if psi_p.nodes() & J:
        raise RealizationError("the external factor must be trivial on the internal nodes")
    if any(n < 0 for _, n in psi_p.psi.items()):
        raise RealizationError("the external factor must be a product of positive Psi's and torus factors")


def _rank1_chain(
    name: str,
    cd: CartanData,
    j: int,
    psi_p: LWeight,
    top_J: LWeight,
    length: int | None,
    xplus_coeff,
    xminus_coeff,
    phi_internal,
    params: dict,
) -> ModuleRealization:
    """Common builder for one-node modules with basis v_0, v_1, ... at spectral parameter 1.

    On v_m the l-weight is psi_p * top_J * A_(j,1)^-1 A_(j,q_j^-2)^-1 ... (m factors);
    internal phi comes from the closed formula `phi_internal(m)`, external phi from the l-weight.
    """
    dj = cd.sym(j)
    J = {j}
    _check_J_trivial_positive(psi_p, J)
    mu = lw_degree(psi_p * top_J)
    ladder = [IDENTITY]

    def lw_of(m: int) -> LWeight:
        while len(ladder) <= m:
            s = len(ladder) - 1
            ladder.append(ladder[-1] * lw_A(cd, j, -2 * dj * s, -1))
        return psi_p * top_J * ladder[m]

    def phi(m, i):
        if i == j:
            return phi_internal(m)
        return _lw_phi(lw_of(m), i)

    def xp(m, i):
        if i != j or m == 0:
            return []
        c, b = xplus_coeff(m)
        return [ExpModeTerm(m - 1, c, b)]

    def xm(m, i):
        if i != j or (length is not None and m >= length):
            return []
        c, b = xminus_coeff(m)
        return [ExpModeTerm(m + 1, c, b)]

    def basis(N):
        top = N if length is None else min(N, length)
        return list(range(top + 1))

    return ModuleRealization(
        name=name,
        cd=cd,
        mu=mu,
        top_label=0,
        rank=lambda m: m,
        basis=basis,
        phi_fn=phi,
        xplus_fn=xp,
        xminus_fn=xm,
        lweight_fn=lw_of,
        max_rank=length,
        params=params,
    )


def _realize_kr(cd: CartanData, j: int, k: int, length: int, psi_p: LWeight = IDENTITY) -> ModuleRealization:
    """W_(L, a q_j^(1-2L)) at node j, basis v_0..v_L:
    x+_r v_m = a^r q_j^(2r(1-m)) v_(m-1), x-_r v_m = a^r q_j^(-2mr) [m+1][L-m] v_(m+1)."""
    if length < 1:
        raise RealizationError("KR length must be >= 1")
    dj = cd.sym(j)
    L = length
    top_J = lw_of_Y(cd, kr_highest_weight(cd, j, dj * (1 - 2 * L), L))

    def xpc(m):
        return ONE, qpow(2 * dj * (1 - m))

    def xmc(m):
        return q_number(m + 1, qpow(dj)) * q_number(L - m, qpow(dj)), qpow(-2 * dj * m)

    def phi_j(m):
        # q_j^(L-2m) (1 - z q_j^-2L)(1 - z q_j^2) / ((1 - z q_j^(2(1-m)))(1 - z q_j^-2m))
        return _ratfunc(qpow(dj * (L - 2 * m)), (-2 * dj * L, 2 * dj), (2 * dj * (1 - m), -2 * dj * m))

    real = _rank1_chain(
        "sl2_kr", cd, j, psi_p, top_J, L, xpc, xmc, phi_j, {"node": j, "length": L}
    )
    return _shifted(real, k)


def _realize_neg_prefund(cd: CartanData, j: int, k: int, psi_p: LWeight = IDENTITY, name="sl2_neg_prefund") -> ModuleRealization:
    """L(Psi_(j,a)^-1) at node j (times a J-trivial psi_p), basis v_0, v_1, ...:
    x+_r v_m = a^r q_j^(2r(1-m)) v_(m-1),
    (q_j - q_j^-1) x-_r v_m = a^r q_j^(-(2r+1)m) [m+1] v_(m+1)."""
    dj = cd.sym(j)
    qj = qpow(dj)
    inv = (qj - qj.inverse()).inverse()
    top_J = lw_psi(j, 0, -1)

    def xpc(m):
        return ONE, qpow(2 * dj * (1 - m))

    def xmc(m):
        return q_number(m + 1, qj) * qpow(-dj * m) * inv, qpow(-2 * dj * m)

    def phi_j(m):
        # q_j^-2m (1 - z q_j^2) / ((1 - z q_j^(2(1-m)))(1 - z q_j^-2m))
        return _ratfunc(qpow(-2 * dj * m), (2 * dj,), (2 * dj * (1 - m), -2 * dj * m))

    real = _rank1_chain(name, cd, j, psi_p, top_J, None, xpc, xmc, phi_j, {"node": j})
    return _shifted(real, k)


def _one_dim(name: str, cd: CartanData, lw: LWeight, params: dict) -> ModuleRealization:
    return ModuleRealization(
        name=name,
        cd=cd,
        mu=lw_degree(lw),
        top_label=0,
        rank=lambda m: m,
        basis=lambda N: [0],
        phi_fn=lambda lab, i: lw.component(i),
        xplus_fn=lambda lab, i: [],
        xminus_fn=lambda lab, i: [],
        lweight_fn=lambda lab: lw,
        max_rank=0,
        params=params,
    )


_SL3_CASES = {(-1, 0), (0, -1), (-2, 0), (0, -2)}


def sl3_pair_psi_p(cd: CartanData, j1: int, j2: int) -> LWeight:
    """External factor of the A2-pair inflation at spectral parameter 1."""
    d = cd.sym(j1)
    out = IDENTITY
    for i in cd.nodes:
        if i in (j1, j2):
            continue
        c1, c2 = cd.C(j1, i), cd.C(j2, i)
        if (c1, c2) == (0, 0):
            continue
        if (c1, c2) not in _SL3_CASES:
            raise RealizationError(
                f"external node {i} has adjacency (C_j1i, C_j2i) = ({c1}, {c2}) outside the supported cases"
            )
        if c1 == -1:
            out = out * lw_psi(i, d)
        elif c2 == -1:
            out = out * lw_psi(i, 2 * d)
        elif c1 == -2:
            out = out * lw_psi(i, 0) * lw_psi(i, 2 * d)
        else:
            out = out * lw_psi(i, d) * lw_psi(i, 3 * d)
    return out


def _realize_sl3_pair(cd: CartanData, j1: int, j2: int, k: int) -> ModuleRealization:
    """Inflation of L(Psi_(j1,1)^-1) over the A2 subdiagram {j1, j2}; basis v_(n,m), n >= m >= 0.

    x+_(j1,r) v_(n,m) = q^(2r(1-n)) [n-m] v_(n-1,m)
    x-_(j1,r) v_(n,m) = (q - q^-1)^-1 q^(-n(2r+1)) v_(n+1,m)
    x+_(j2,r) v_(n,m) = q^(r(3-2m)) v_(n,m-1)
    x-_(j2,r) v_(n,m) = q^(r(1-2m)) [m+1][n-m] v_(n,m+1)
    with q = q_(j1); external x act by zero and phi acts by Psi_p Psi_(n,m).
    """
    if j1 == j2 or cd.C(j1, j2) != -1 or cd.C(j2, j1) != -1:
        raise RealizationError(f"nodes {j1}, {j2} do not span an A2 subdiagram")
    d = cd.sym(j1)
    qq = qpow(d)
    inv = (qq - qq.inverse()).inverse()
    psi_p = sl3_pair_psi_p(cd, j1, j2)
    mu = NodeVector({j2: 1}) - coroot(cd, j1) - coroot(cd, j2)
    top = psi_p * lw_psi(j1, 0, -1)
    if lw_degree(top) != mu:
        raise RealizationError("internal inconsistency: top degree differs from the shift coweight")

    cache: dict = {}

    def lw_of(lab):
        out = cache.get(lab)
        if out is None:
            n, m = lab
            out = top
            for t in range(1, n + 1):
                out = out * lw_A(cd, j1, 2 * (1 - t) * d, -1)
            for t in range(1, m + 1):
                out = out * lw_A(cd, j2, (3 - 2 * t) * d, -1)
            cache[lab] = out
        return out

    def xp(lab, i):
        n, m = lab
        if i == j1 and n - 1 >= m:
            return [ExpModeTerm((n - 1, m), q_number(n - m, qq), qpow(2 * d * (1 - n)))]
        if i == j2 and m >= 1:
            return [ExpModeTerm((n, m - 1), ONE, qpow(d * (3 - 2 * m)))]
        return []

    def xm(lab, i):
        n, m = lab
        if i == j1:
            return [ExpModeTerm((n + 1, m), inv * qpow(-d * n), qpow(-2 * d * n))]
        if i == j2 and m + 1 <= n:
            return [ExpModeTerm((n, m + 1), q_number(m + 1, qq) * q_number(n - m, qq), qpow(d * (1 - 2 * m)))]
        return []

    def basis(N):
        return [(n, m) for n in range(N + 1) for m in range(n + 1)]

    real = ModuleRealization(
        name="sl3_pair_inflation",
        cd=cd,
        mu=mu,
        top_label=(0, 0),
        rank=lambda lab: lab[0],
        basis=basis,
        phi_fn=lambda lab, i: lw_of(lab).component(i),
        xplus_fn=xp,
        xminus_fn=xm,
        lweight_fn=lw_of,
        max_rank=None,
        params={"nodes": (j1, j2)},
    )
    return _shifted(real, k)


REALIZATIONS = (
    "sl2_kr",
    "sl2_neg_prefund",
    "sl3_pair_inflation",
    "invertible",
    "pos_prefund",
    "prefund_tilde_inflation",
    "psi_star_inflation",
    "kr_tilde_inflation",
)


def realize(name: str, cd: CartanData | None = None, **params) -> ModuleRealization:
    """Build a realization.

    sl2_kr(node, spec, length[, psi_p]); sl2_neg_prefund(node, spec[, psi_p]);
    sl3_pair_inflation(nodes=(j1, j2), spec); invertible(torus={i: e});
    pos_prefund(node, spec); prefund_tilde_inflation(node, spec) = L(Psi~_(j,q^k));
    psi_star_inflation(node, spec) = L(Psi*_(j,q^k));
    kr_tilde_inflation(node, spec, length) = L(m Psi_p(q^k)) of the inflated T-system.
    """
    name = name.replace("-", "_")
    if cd is None:
        cd = dynkin_data("A", 1)
    k = int(params.get("spec", 0))
    try:
        if name == "sl2_kr":
            j = params.get("node", 1)
            return _realize_kr(cd, j, k, int(params.get("length", 1)), params.get("psi_p", IDENTITY))
        if name == "sl2_neg_prefund":
            j = params.get("node", 1)
            return _realize_neg_prefund(cd, j, k, params.get("psi_p", IDENTITY))
        if name == "prefund_tilde_inflation":
            j = params.get("node", 1)
            psi_p = build_named_weight(cd, "qq_psi_p", j, 0)
            return _realize_neg_prefund(cd, j, k, psi_p, name="prefund_tilde_inflation")
        if name == "psi_star_inflation":
            j = params.get("node", 1)
            psi_p = build_named_weight(cd, "psi_star", j, 0) / lw_from_Y(cd, j, -cd.sym(j))
            r = _realize_kr(cd, j, k, 1, psi_p)
            r.name = name
            return r
        if name == "kr_tilde_inflation":
            j = params.get("node", 1)
            psi_p = build_named_weight(cd, "newT_psi_p", j, 0)
            r = _realize_kr(cd, j, k, int(params.get("length", 1)), psi_p)
            r.name = name
            return r
        if name == "sl3_pair_inflation":
            j1, j2 = params.get("nodes", (1, 2))
            return _realize_sl3_pair(cd, int(j1), int(j2), k)
        if name == "invertible":
            torus = NodeVector(params.get("torus", {}))
            if not torus.support() <= set(cd.nodes):
                raise RealizationError("torus weight has nodes outside the diagram")
            return _one_dim("invertible", cd, LWeight(torus), {"torus": torus.as_dict()})
        if name == "pos_prefund":
            j = params.get("node", 1)
            cd.idx(j)
            return _one_dim("pos_prefund", cd, lw_psi(j, k), {"node": j, "spec": k})
    except (LWeightError, QFieldError) as exc:
        raise RealizationError(str(exc)) from None
    raise RealizationError(f"unknown realization {name!r}; expected one of {', '.join(REALIZATIONS)}")


# applying operators


def _base_pow(base: RatQ, r: int, cache: dict) -> RatQ:
    key = (base, r)
    out = cache.get(key)
    if out is None:
        out = base ** r
        cache[key] = out
    return out


_POW_CACHE: dict = {}


def apply_mode(real: ModuleRealization, sign: int, i: int, r: int, label, bound: int | None = None) -> dict:
    """x^(sign)_(i,r) applied to a basis vector; returns {label: RatQ}."""
    out = {}
    for t in real.x(sign, label, i):
        if bound is not None and real.rank(t.target) > bound:
            raise TruncationEscape(t.target, bound)
        c = t.coeff * _base_pow(t.base, r, _POW_CACHE)
        prev = out.get(t.target)
        out[t.target] = c if prev is None else prev + c
    return {k: v for k, v in out.items() if not v.is_zero()}


def phi_series_eigen(real: ModuleRealization, label, i: int, direction: str, order: int) -> ZSeries:
    s = series_expand(real.phi(label, i), direction, order)
    if direction == ZSeries.IN_ZINV and s.lead != real.alpha_mu(i):
        raise RealizationError(
            f"phi at node {i} on {label!r} has degree {s.lead}, expected {real.alpha_mu(i)}"
        )
    return s


def extract_h_eigenvalue(real: ModuleRealization, label, i: int, m: int, order: int | None = None) -> RatQ:
    """h_(i,m) eigenvalue from the formal log of the normalized phi^(+-) series."""
    if m == 0:
        raise RealizationError("h_(i,m) needs m != 0")
    if order is None:
        order = abs(m)
    if abs(m) > order:
        raise RealizationError(f"|m| = {abs(m)} exceeds the series order {order}")
    qi = qpow(real.cd.sym(i))
    denom = qi - qi.inverse()
    if m > 0:
        lg = series_log(phi_series_eigen(real, label, i, ZSeries.IN_Z, order), normalize=True)
        return lg.coeffs[m] / denom
    lg = series_log(phi_series_eigen(real, label, i, ZSeries.IN_ZINV, order), normalize=True)
    return -lg.coeffs[-m] / denom


# relation verification


@dataclass(frozen=True)
class Window:
    basis: int = 6
    modes: int = 3
    h: int = 3


@dataclass
class RelationReport:
    realization: str
    window: Window
    passed: dict = field(default_factory=dict)
    failed: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    counterexample: dict | None = None

    @property
    def attempted(self) -> int:
        return sum(self.passed.values()) + sum(self.failed.values()) + sum(self.skipped.values())

    @property
    def fail_count(self) -> int:
        return sum(self.failed.values())

    @property
    def skip_count(self) -> int:
        return sum(self.skipped.values())

    @property
    def ok(self) -> bool:
        return self.fail_count == 0

    def merge(self, other: "RelationReport") -> "RelationReport":
        out = RelationReport(self.realization, self.window)
        for attr in ("passed", "failed", "skipped"):
            acc = dict(getattr(self, attr))
            for k, v in getattr(other, attr).items():
                acc[k] = acc.get(k, 0) + v
            setattr(out, attr, acc)
        out.counterexample = self.counterexample or other.counterexample
        return out

    def to_json(self) -> dict:
        return {
            "realization": self.realization,
            "window": {"basis": self.window.basis, "modes": self.window.modes, "h": self.window.h},
            "passed": dict(sorted(self.passed.items())),
            "failed": dict(sorted(self.failed.items())),
            "skipped": dict(sorted(self.skipped.items())),
            "attempted": self.attempted,
            "ok": self.ok,
            "counterexample": self.counterexample,
        }


def _vadd(acc: dict, vec: dict, c: RatQ = ONE) -> None:
    for k, v in vec.items():
        x = v if c is ONE else v * c
        prev = acc.get(k)
        acc[k] = x if prev is None else prev + x


def _vclean(vec: dict) -> dict:
    return {k: v for k, v in vec.items() if not v.is_zero()}


class _Engine:
    def __init__(self, real: ModuleRealization, bound: int):
        self.real = real
        self.bound = bound
        self.words: dict = {}
        self.series: dict = {}
        self.hvals: dict = {}

    def x(self, sign, i, r, label) -> dict:
        return apply_mode(self.real, sign, i, r, label, self.bound)

    def word(self, word: tuple, label) -> dict:
        """Apply x-operators; word[0] acts last."""
        if not word:
            return {label: ONE}
        key = (word, label)
        out = self.words.get(key)
        if out is None:
            inner = self.word(word[1:], label)
            sign, i, r = word[0]
            acc: dict = {}
            for lab, c in inner.items():
                _vadd(acc, self.x(sign, i, r, lab), c)
            out = _vclean(acc)
            self.words[key] = out
        return out

    def xvec(self, sign, i, r, vec: dict) -> dict:
        acc: dict = {}
        for lab, c in vec.items():
            _vadd(acc, self.x(sign, i, r, lab), c)
        return _vclean(acc)

    def _series(self, label, i, direction, need):
        key = (label, i, direction)
        s = self.series.get(key)
        if s is None or s.order < need:
            s = phi_series_eigen(self.real, label, i, direction, max(need, 8))
            self.series[key] = s
        return s

    def phi(self, sign, i, r, label) -> RatQ:
        if sign > 0:
            if r < 0:
                return ZERO
            return self._series(label, i, ZSeries.IN_Z, r).coeffs[r]
        a = self.real.alpha_mu(i)
        if r > a:
            return ZERO
        return self._series(label, i, ZSeries.IN_ZINV, a - r).coeffs[a - r]

    def h(self, i, m, label) -> RatQ:
        key = (i, m, label)
        out = self.hvals.get(key)
        if out is None:
            out = extract_h_eigenvalue(self.real, label, i, m, order=max(abs(m), 8))
            self.hvals[key] = out
        return out


def _diff_json(vec: dict) -> dict:
    return {repr(k): str(v) for k, v in sorted(vec.items(), key=lambda kv: repr(kv[0]))}


def verify_definition_relations(
    real: ModuleRealization,
    window: Window = Window(),
    relations: Iterable[str] | None = None,
) -> RelationReport:
    rels = list(RELATIONS if relations is None or relations == "all" else relations)
    for r in rels:
        if r not in RELATIONS:
            raise RealizationError(f"unknown relation {r!r}")
    cd = real.cd
    nodes = list(cd.nodes)
    N, R, M = window.basis, window.modes, window.h
    if N < 0 or R < 1 or M < 1:
        raise RealizationError("window bounds must be positive")
    longest = 2
    if "qSerre" in rels:
        longest = max([longest] + [2 - cd.C(i, j) for i in nodes for j in nodes if i != j])
    eng = _Engine(real, N + longest)
    labels = real.basis(N)
    modes = range(-R, R + 1)
    report = RelationReport(real.name, window)
    qi = {i: qpow(cd.sym(i)) for i in nodes}

    def record(rel, ok, info=None, diff=None):
        bucket = report.passed if ok else report.failed
        bucket[rel] = bucket.get(rel, 0) + 1
        if not ok and report.counterexample is None:
            report.counterexample = {"relation": rel, **(info or {}), "lhs_minus_rhs": _diff_json(diff or {})}

    def check(rel, fn, info):
        try:
            diff = _vclean(fn())
        except TruncationEscape:
            report.skipped[rel] = report.skipped.get(rel, 0) + 1
            return
        record(rel, not diff, info, diff)

    for v in labels:
        if "CommPhi" in rels:
            for i, j in itertools.product(nodes, nodes):
                for s1, s2 in itertools.product((1, -1), (1, -1)):
                    for r, s in itertools.product(modes, modes):
                        a = eng.phi(s1, i, r, v)
                        b = eng.phi(s2, j, s, v)
                        check("CommPhi", lambda: {v: a * b - b * a},
                              {"label": repr(v), "nodes": [i, j], "signs": [s1, s2], "modes": [r, s]})

        if "PhiTX" in rels:
            for i, j in itertools.product(nodes, nodes):
                for sign in (1, -1):
                    for r in modes:
                        def f_plus(i=i, j=j, sign=sign, r=r):
                            xv = eng.x(sign, j, r, v)
                            lhs = {lab: eng.phi(1, i, 0, lab) * c for lab, c in xv.items()}
                            fac = qpow(sign * cd.sym(i) * cd.C(i, j)) * eng.phi(1, i, 0, v)
                            _vadd(lhs, xv, -fac)
                            return lhs

                        def f_minus(i=i, j=j, sign=sign, r=r):
                            a = real.alpha_mu(i)
                            xv = eng.x(sign, j, r, v)
                            lhs = {lab: eng.phi(-1, i, a, lab) * c for lab, c in xv.items()}
                            fac = qpow(-sign * cd.sym(i) * cd.C(i, j)) * eng.phi(-1, i, a, v)
                            _vadd(lhs, xv, -fac)
                            return lhs

                        info = {"label": repr(v), "nodes": [i, j], "sign": sign, "modes": [r]}
                        check("PhiTX", f_plus, {**info, "phi": "+"})
                        check("PhiTX", f_minus, {**info, "phi": "-"})

        if "Relhx" in rels:
            for i, j in itertools.product(nodes, nodes):
                for sign in (1, -1):
                    for m in range(-M, M + 1):
                        if m == 0:
                            continue
                        coef = q_number(m * cd.C(i, j), qi[i]) * Fraction(sign, m)
                        for r in modes:
                            if abs(m + r) > R:
                                continue

                            def f(i=i, j=j, sign=sign, m=m, r=r, coef=coef):
                                xv = eng.x(sign, j, r, v)
                                hv = eng.h(i, m, v)
                                out = {lab: (eng.h(i, m, lab) - hv) * c for lab, c in xv.items()}
                                _vadd(out, eng.x(sign, j, m + r, v), -coef)
                                return out

                            check("Relhx", f, {"label": repr(v), "nodes": [i, j], "sign": sign, "m": m, "modes": [r]})

        if "Relxpxmphi" in rels:
            for i, j in itertools.product(nodes, nodes):
                for r, s in itertools.product(modes, modes):
                    def f(i=i, j=j, r=r, s=s):
                        out = {}
                        _vadd(out, eng.word(((1, i, r), (-1, j, s)), v))
                        _vadd(out, eng.word(((-1, j, s), (1, i, r)), v), -ONE)
                        out = {lab: c * (qi[i] - qi[i].inverse()) for lab, c in out.items()}
                        if i == j:
                            ph = eng.phi(1, i, r + s, v) - eng.phi(-1, i, r + s, v)
                            _vadd(out, {v: ph}, -ONE)
                        return out

                    check("Relxpxmphi", f, {"label": repr(v), "nodes": [i, j], "modes": [r, s]})

        if "xpmRelSupp" in rels:
            for i, j in itertools.product(nodes, nodes):
                for sign in (1, -1):
                    fac = qpow(sign * cd.sym(i) * cd.C(i, j))
                    for r, s in itertools.product(modes, modes):
                        def f(i=i, j=j, sign=sign, r=r, s=s, fac=fac):
                            out = {}
                            _vadd(out, eng.word(((sign, i, r + 1), (sign, j, s)), v))
                            _vadd(out, eng.word(((sign, j, s), (sign, i, r + 1)), v), -fac)
                            _vadd(out, eng.word(((sign, i, r), (sign, j, s + 1)), v), -fac)
                            _vadd(out, eng.word(((sign, j, s + 1), (sign, i, r)), v))
                            return out

                        check("xpmRelSupp", f, {"label": repr(v), "nodes": [i, j], "sign": sign, "modes": [r, s]})

        if "qSerre" in rels:
            for i, j in itertools.product(nodes, nodes):
                if i == j:
                    continue
                p = 1 - cd.C(i, j)
                if p > 4:
                    raise RealizationError("Serre relations with p > 4 are not supported")
                binoms = [q_binomial(p, l, qi[i]) * (-1) ** l for l in range(p + 1)]
                for sign in (1, -1):
                    for rs in itertools.combinations_with_replacement(modes, p):
                        orders = sorted(set(itertools.permutations(rs)))
                        for rp in modes:
                            def f(i=i, j=j, sign=sign, rs=rs, rp=rp, orders=orders, p=p, binoms=binoms):
                                out = {}
                                for perm in orders:
                                    for l in range(p + 1):
                                        w = tuple((sign, i, x) for x in perm[:l]) + ((sign, j, rp),) + tuple(
                                            (sign, i, x) for x in perm[l:]
                                        )
                                        _vadd(out, eng.word(w, v), binoms[l])
                                return out

                            check("qSerre", f, {"label": repr(v), "nodes": [i, j], "sign": sign, "modes": list(rs) + [rp]})
    return report


# q-characters of realizations


def module_qchar(real: ModuleRealization, depth: int) -> TruncatedQChar:
    """Group basis vectors by l-weight (read from phi) relative to the top.

    Every lowering step costs one A^-1, so labels of rank <= depth cover depth.
    """
    top = real.lweight(real.top_label)
    terms: dict = {}
    for lab in real.basis(depth):
        rel = real.lweight(lab) / top
        m = lw_to_A(real.cd, rel)
        if m.degree() <= depth:
            terms[m] = terms.get(m, 0) + 1
    return TruncatedQChar.make(real.cd, top, depth, terms)


# tensor products through the Drinfeld coproduct at u = 1


def drinfeld_tensor(A: ModuleRealization, B: ModuleRealization) -> ModuleRealization:
    """x+(z) -> x+(z) (x) 1 + phi-(z) (x) x+(z), x-(z) -> 1 (x) x-(z) + x-(z) (x) phi+(z).

    The infinite sums over modes are geometric and evaluate the phi rational
    function of the spectator factor at z = 1/base.
    """
    if A.cd.nodes != B.cd.nodes or A.cd.matrix != B.cd.matrix:
        raise RealizationError("factors live on different diagrams")

    def ev(real, lab, i, base):
        try:
            return real.phi(lab, i).evaluate(base.inverse())
        except PoleError:
            raise PoleError(f"pole evaluating phi at node {i} on {lab!r} at z = 1/({base})") from None

    def xp(lab, i):
        a, b = lab
        out = [ExpModeTerm((t.target, b), t.coeff, t.base) for t in A.xplus(a, i)]
        for t in B.xplus(b, i):
            c = t.coeff * ev(A, a, i, t.base)
            out.append(ExpModeTerm((a, t.target), c, t.base))
        return out

    def xm(lab, i):
        a, b = lab
        out = [ExpModeTerm((a, t.target), t.coeff, t.base) for t in B.xminus(b, i)]
        for t in A.xminus(a, i):
            c = t.coeff * ev(B, b, i, t.base)
            out.append(ExpModeTerm((t.target, b), c, t.base))
        return out

    def phi(lab, i):
        return A.phi(lab[0], i) * B.phi(lab[1], i)

    def basis(N):
        return [(a, b) for a in A.basis(N) for b in B.basis(N)]

    lwf = None
    if A.lweight_fn is not None and B.lweight_fn is not None:
        lwf = lambda lab: A.lweight_fn(lab[0]) * B.lweight_fn(lab[1])
    return ModuleRealization(
        name=f"({A.name})x({B.name})",
        cd=A.cd,
        mu=A.mu + B.mu,
        top_label=(A.top_label, B.top_label),
        rank=lambda lab: max(A.rank(lab[0]), B.rank(lab[1])),
        basis=basis,
        phi_fn=phi,
        xplus_fn=xp,
        xminus_fn=xm,
        lweight_fn=lwf,
        max_rank=None if A.max_rank is None or B.max_rank is None else max(A.max_rank, B.max_rank),
        params={"factors": (A.name, B.name)},
    )


def perturb(real: ModuleRealization, sign: int, i: int, label, factor: RatQ) -> ModuleRealization:
    """Copy of `real` with the x^(sign)_i coefficient on `label` multiplied by `factor`."""
    def xp(lab, j):
        terms = real.xplus_fn(lab, j)
        if sign > 0 and j == i and lab == label:
            terms = [ExpModeTerm(t.target, t.coeff * factor, t.base) for t in terms]
        return terms

    def xm(lab, j):
        terms = real.xminus_fn(lab, j)
        if sign < 0 and j == i and lab == label:
            terms = [ExpModeTerm(t.target, t.coeff * factor, t.base) for t in terms]
        return terms

    return ModuleRealization(
        name=real.name + "~perturbed",
        cd=real.cd,
        mu=real.mu,
        top_label=real.top_label,
        rank=real.rank,
        basis=real.basis,
        phi_fn=real.phi_fn,
        xplus_fn=xp,
        xminus_fn=xm,
        lweight_fn=real.lweight_fn,
        max_rank=real.max_rank,
        params=dict(real.params, perturbed=True),
    )


# the A2 R-matrix


def rmatrix_gamma(k: int, l: int, m: int, regularize: bool = True) -> RatQ:
    """a^l q^(-lm) prod_(t=1..m) (1 - a q^(2t-1)) / prod_(s=1..l) (a - q^(2(s-m)-1)), a = q^k.

    For a = q^-(2r+1) a numerator factor and a denominator factor can vanish
    together; with `regularize` the pair is replaced by its limit
    (1 - a q^(2r+1)) / (a - q^-(2r+1)) = -q^(2r+1), i.e. gamma is read as a
    rational function of a evaluated after cancellation.
    """
    a = qpow(k)
    num = qpow(k * l - l * m)
    den = ONE
    num_zero = [t for t in range(1, m + 1) if (a * qpow(2 * t - 1) - ONE).is_zero()]
    den_zero = [s for s in range(1, l + 1) if a == qpow(2 * (s - m) - 1)]
    cancel = regularize and bool(num_zero) and bool(den_zero)
    for t in range(1, m + 1):
        if cancel and t == num_zero[0]:
            num = num * qpow(-k) * (-ONE)
            continue
        num = num * (ONE - a * qpow(2 * t - 1))
    for s in range(1, l + 1):
        if cancel and s == den_zero[0]:
            continue
        f = a - qpow(2 * (s - m) - 1)
        if f.is_zero():
            raise PoleError(f"gamma has a pole at (l, m, s) = ({l}, {m}, {s})")
        den = den * f
    return num / den


def rmatrix_indeterminate(k: int, l: int, m: int) -> bool:
    """True when the unregularized formula is 0/0 at (l, m)."""
    a = qpow(k)
    return any((a * qpow(2 * t - 1) - ONE).is_zero() for t in range(1, m + 1)) and any(
        a == qpow(2 * (s - m) - 1) for s in range(1, l + 1)
    )


@dataclass
class RMatrixReport:
    spec: int
    basis: int
    modes: int
    gamma: dict  # (l, m) -> RatQ (regularized) or None at a genuine pole
    poles: list
    indeterminate: list = field(default_factory=list)
    numerator_zero: list = field(default_factory=list)
    checked: int = 0
    failed: int = 0
    counterexample: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0 and not self.poles

    def vanishing(self) -> list:
        return sorted(key for key, g in self.gamma.items() if g is not None and g.is_zero())

    def to_json(self) -> dict:
        return {
            "spec": self.spec,
            "basis": self.basis,
            "modes": self.modes,
            "gamma": {f"{l},{m}": (None if g is None else str(g)) for (l, m), g in sorted(self.gamma.items())},
            "poles": [list(p) for p in self.poles],
            "indeterminate": [list(p) for p in self.indeterminate],
            "numerator_zero": [list(p) for p in self.numerator_zero],
            "vanishing": [list(x) for x in self.vanishing()],
            "checked": self.checked,
            "failed": self.failed,
            "ok": self.ok,
            "counterexample": self.counterexample,
        }


def rmatrix_modules(k: int):
    """V(a) = L(Psi~_(1,a)) and V' = L(Psi~_(2,1)) over A2 with both Drinfeld tensor orders."""
    cd = dynkin_data("A", 2)
    V = realize("prefund_tilde_inflation", cd, node=1, spec=k)
    Vp = realize("prefund_tilde_inflation", cd, node=2, spec=0)
    return V, Vp, drinfeld_tensor(V, Vp), drinfeld_tensor(Vp, V)


def rmatrix_check(k: int, basis: int = 4, modes: int = 2, table: Callable | None = None) -> RMatrixReport:
    """Check psi_a(v_l (x) v'_m) = gamma_(l,m) v'_m (x) v_l intertwines the two
    Drinfeld tensor products (a = q^k) for all x-modes |r| <= modes and phi,
    on l, m <= basis.  `table(l, m)` overrides the gamma table.

    For odd k the report also lists the 0/0 positions of the unregularized
    formula and the positions where its numerator vanishes.
    """
    if basis < 0 or modes < 0:
        raise RealizationError("window bounds must be non-negative")
    gamma: dict = {}
    poles: list = []
    for l in range(basis + 2):
        for m in range(basis + 2):
            try:
                gamma[(l, m)] = table(l, m) if table is not None else rmatrix_gamma(k, l, m)
            except PoleError:
                gamma[(l, m)] = None
                poles.append((l, m))
    inner = [(l, m) for l in range(basis + 1) for m in range(basis + 1)]
    rep = RMatrixReport(
        spec=k,
        basis=basis,
        modes=modes,
        gamma={key: gamma[key] for key in inner},
        poles=[p for p in poles if p in set(inner)],
        indeterminate=[key for key in inner if rmatrix_indeterminate(k, *key)],
        numerator_zero=[
            (l, m) for (l, m) in inner if any(k + 2 * t - 1 == 0 for t in range(1, m + 1))
        ],
    )
    if rep.poles:
        return rep
    V, Vp, VVp, VpV = rmatrix_modules(k)
    nodes = (1, 2)

    def psi(vec: dict) -> dict:
        out = {}
        for (l, m), c in vec.items():
            g = gamma.get((l, m))
            if g is None:
                raise PoleError(f"gamma needed outside the table at {(l, m)}")
            out[(m, l)] = c * g
        return _vclean(out)

    for l, m in inner:
        img = psi({(l, m): ONE})
        for sign in (1, -1):
            for i in nodes:
                for r in range(-modes, modes + 1):
                    diff = psi(apply_mode(VVp, sign, i, r, (l, m)))
                    for lab, c in img.items():
                        _vadd(diff, apply_mode(VpV, sign, i, r, lab), -c)
                    diff = _vclean(diff)
                    rep.checked += 1
                    if diff:
                        rep.failed += 1
                        if rep.counterexample is None:
                            rep.counterexample = {
                                "l": l, "m": m, "sign": sign, "node": i, "mode": r,
                                "lhs_minus_rhs": _diff_json(diff),
                            }
        # phi is diagonal; both orders carry the same product eigenvalue
        for i in nodes:
            a = VVp.phi((l, m), i)
            b = VpV.phi((m, l), i)
            rep.checked += 1
            if RatFuncZ._pmul(list(a.num), list(b.den)) != RatFuncZ._pmul(list(b.num), list(a.den)):
                rep.failed += 1
                if rep.counterexample is None:
                    rep.counterexample = {"l": l, "m": m, "node": i, "phi": "eigenvalues differ"}
    return rep
