"""Finite-type Cartan data, sparse node vectors (torus weights and coweights)
and the dominance order on torus weights.

Convention: D*C is symmetric with D = diag(d). B_n has its last node short,
C_n its last node long, G2 has node 1 long, F4 has nodes 1, 2 long.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping

__all__ = [
    "CartanData",
    "NodeVector",
    "TorusWeight",
    "Coweight",
    "CartanError",
    "dynkin_data",
    "parse_dynkin",
    "pair_alpha_coweight",
    "weight_leq",
    "omega",
    "alpha",
    "coroot",
    "root_oracle",
    "DUAL_COXETER",
    "SUPPORTED_RANKS",
]


class CartanError(ValueError):
    pass


class NodeVector:
    """Integer vector indexed by node labels, zeros dropped."""

    __slots__ = ("_items", "_hash")

    def __init__(self, data: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(data, Mapping):
            data = data.items()
        acc: dict[int, int] = {}
        for k, v in data:
            acc[int(k)] = acc.get(int(k), 0) + int(v)
        self._items = tuple(sorted((k, v) for k, v in acc.items() if v))
        self._hash = None

    @classmethod
    def _raw(cls, items: tuple) -> "NodeVector":
        obj = cls.__new__(cls)
        obj._items = items
        obj._hash = None
        return obj

    def __getitem__(self, node: int) -> int:
        for k, v in self._items:
            if k == node:
                return v
        return 0

    get = __getitem__

    def items(self):
        return self._items

    def as_dict(self) -> dict[int, int]:
        return dict(self._items)

    def support(self) -> frozenset:
        return frozenset(k for k, _ in self._items)

    def is_zero(self) -> bool:
        return not self._items

    def __bool__(self):
        return bool(self._items)

    def __add__(self, other: "NodeVector") -> "NodeVector":
        if not other._items:
            return self
        if not self._items:
            return other
        acc = dict(self._items)
        for k, v in other._items:
            acc[k] = acc.get(k, 0) + v
        return NodeVector._raw(tuple(sorted((k, v) for k, v in acc.items() if v)))

    def __neg__(self):
        return NodeVector._raw(tuple((k, -v) for k, v in self._items))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "NodeVector":
        if c == 0:
            return NodeVector._raw(())
        return NodeVector._raw(tuple((k, v * c) for k, v in self._items))

    __rmul__ = scale

    def restrict(self, nodes) -> "NodeVector":
        nodes = set(nodes)
        return NodeVector._raw(tuple((k, v) for k, v in self._items if k in nodes))

    def __eq__(self, other):
        if not isinstance(other, NodeVector):
            return NotImplemented
        return self._items == other._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __repr__(self):
        return f"NodeVector({dict(self._items)})"


# exponent vector e with gamma_i = q^(e_i)
TorusWeight = NodeVector
# coefficients over the fundamental coweights
Coweight = NodeVector


@dataclass(frozen=True)
class CartanData:
    """Cartan matrix C indexed by node labels, with symmetrizers d (D*C symmetric)."""

    type: str
    rank: int
    nodes: tuple
    matrix: tuple  # rows indexed like `nodes`
    d: tuple
    dual_coxeter: int
    lacing: int
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {n: k for k, n in enumerate(self.nodes)})

    @property
    def name(self) -> str:
        return f"{self.type}{self.rank}"

    def idx(self, node: int) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise CartanError(f"node {node} is not in {self.name} (nodes {list(self.nodes)})") from None

    def C(self, i: int, j: int) -> int:
        return self.matrix[self.idx(i)][self.idx(j)]

    def sym(self, i: int) -> int:
        """d_i, so that q_i = q^(d_i)."""
        return self.d[self.idx(i)]

    def DC(self, i: int, j: int) -> int:
        return self.sym(i) * self.C(i, j)

    def has_node(self, node: int) -> bool:
        return node in self._index

    def neighbours(self, i: int):
        return [j for j in self.nodes if j != i and self.C(i, j) != 0]

    def subdiagram(self, J: Iterable[int]) -> "CartanData":
        """Restriction to J keeping node labels and the original d (q_j stays q^(d_j))."""
        J = sorted(set(J))
        for j in J:
            self.idx(j)
        if tuple(J) == self.nodes:
            return self
        rows = tuple(tuple(self.C(i, j) for j in J) for i in J)
        return CartanData(
            type=f"{self.name}|{','.join(map(str, J))}",
            rank=len(J),
            nodes=tuple(J),
            matrix=rows,
            d=tuple(self.sym(j) for j in J),
            dual_coxeter=0,
            lacing=0,
        )

    def is_subdiagram(self) -> bool:
        return "|" in self.type

    def check(self) -> None:
        n = self.rank
        for a in range(n):
            if self.matrix[a][a] != 2:
                raise CartanError("diagonal entries must be 2")
            for b in range(n):
                if a != b:
                    if self.matrix[a][b] > 0:
                        raise CartanError("off-diagonal entries must be <= 0")
                    if (self.matrix[a][b] == 0) != (self.matrix[b][a] == 0):
                        raise CartanError("zero pattern must be symmetric")
                    if self.d[a] * self.matrix[a][b] != self.d[b] * self.matrix[b][a]:
                        raise CartanError("D*C is not symmetric")
        if not self.is_subdiagram():
            g = 0
            for x in self.d:
                g = gcd(g, x)
            if g != 1:
                raise CartanError("symmetrizers must be relatively prime")


SUPPORTED_RANKS = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 2,
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}


def _cartan_matrix(t: str, n: int) -> list[list[int]]:
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, cij=-1, cji=-1):
        C[i][j] = cij
        C[j][i] = cji

    if t in "ABC":
        for i in range(n - 2):
            link(i, i + 1)
        if n >= 2:
            if t == "A":
                link(n - 2, n - 1)
            elif t == "B":
                link(n - 2, n - 1, -1, -2)  # last node short
            else:
                link(n - 2, n - 1, -2, -1)  # last node long
    elif t == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif t == "E":
        # Bourbaki: 1-3-4-5-...-n with 2 attached to 4
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif t == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif t == "G":
        link(0, 1, -1, -3)
    return C


def _symmetrizer(C: list[list[int]]) -> list[int]:
    """Smallest positive integer d with diag(d)*C symmetric (connected diagram)."""
    n = len(C)
    d = [None] * n
    d[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and C[i][j] != 0 and d[j] is None:
                d[j] = d[i] * C[i][j] / C[j][i]
                stack.append(j)
    if any(x is None for x in d):
        raise CartanError("diagram is not connected")
    den = 1
    for x in d:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in d]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints]


def root_oracle(C: list[list[int]], d: list[int]) -> tuple[list[tuple[int, ...]], int, int]:
    """Positive roots by closing the simple roots under simple reflections.

    Returns (positive roots in simple-root coordinates, h_dual, r_dual) where
    h_dual = 1 + sum of the marks of the coroot of the highest root and
    r_dual = max d / min d.
    """
    n = len(C)
    simple = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(n):
                pair = sum(beta[j] * C[i][j] for j in range(n))  # <beta, alpha_i^vee>
                refl = tuple(beta[k] - (pair if k == i else 0) for k in range(n))
                if all(x >= 0 for x in refl) and any(refl) and refl not in roots:
                    roots.add(refl)
                    nxt.append(refl)
        frontier = nxt
    theta = max(roots, key=sum)
    dmax = max(d)
    marks = [Fraction(theta[i] * d[i], dmax) for i in range(n)]
    h_dual = 1 + sum(marks)
    assert h_dual.denominator == 1
    return sorted(roots), int(h_dual), max(d) // min(d)


# frozen from root_oracle; regression-tested against it
DUAL_COXETER = {
    "A": lambda n: n + 1,
    "B": lambda n: 2 * n - 1,
    "C": lambda n: n + 1,
    "D": lambda n: 2 * n - 2,
    "E": lambda n: {6: 12, 7: 18, 8: 30}[n],
    "F": lambda n: 9,
    "G": lambda n: 4,
}
LACING = {"A": 1, "B": 2, "C": 2, "D": 1, "E": 1, "F": 2, "G": 3}


@lru_cache(maxsize=None)
def dynkin_data(t: str, rank: int) -> CartanData:
    t = str(t).upper()
    if t not in SUPPORTED_RANKS:
        raise CartanError(f"unknown Dynkin type {t!r}")
    if not isinstance(rank, int) or not SUPPORTED_RANKS[t](rank):
        raise CartanError(f"invalid rank {rank} for type {t}")
    C = _cartan_matrix(t, rank)
    d = _symmetrizer(C)
    cd = CartanData(
        type=t,
        rank=rank,
        nodes=tuple(range(1, rank + 1)),
        matrix=tuple(tuple(r) for r in C),
        d=tuple(d),
        dual_coxeter=DUAL_COXETER[t](rank),
        lacing=LACING[t],
    )
    cd.check()
    return cd


_DYNKIN_RE = re.compile(r"^\s*([A-Ga-g])\s*(\d+)\s*$")


def parse_dynkin(text: str) -> CartanData:
    m = _DYNKIN_RE.match(text or "")
    if not m:
        raise CartanError(f"cannot parse Dynkin type {text!r} (expected e.g. A2, B3)")
    return dynkin_data(m.group(1).upper(), int(m.group(2)))


def omega(cd: CartanData, i: int, c: int = 1) -> TorusWeight:
    """Exponent vector of [c*omega_i]: q_i^c at node i."""
    return NodeVector({i: c * cd.sym(i)})


def alpha(cd: CartanData, j: int, c: int = 1) -> TorusWeight:
    """Exponent vector of [c*alpha_j]: entry i is c * d_i * C_ij."""
    return NodeVector({i: c * cd.DC(i, j) for i in cd.nodes})


def coroot(cd: CartanData, j: int) -> Coweight:
    """alpha_j^vee = sum_i C_ji omega_i^vee."""
    return NodeVector({i: cd.C(j, i) for i in cd.nodes})


def pair_alpha_coweight(cd: CartanData, mu: Coweight, i: int) -> int:
    cd.idx(i)
    return mu[i]


def _solve(M: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(M)
    A = [list(map(Fraction, row)) + [Fraction(b[k])] for k, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[k][n] for k in range(n)]


def root_coordinates(cd: CartanData, e: TorusWeight) -> list[Fraction]:
    """Solve e = sum_j c_j * col_j(DC) over the rationals."""
    M = [[cd.DC(i, j) for j in cd.nodes] for i in cd.nodes]
    return _solve(M, [e[i] for i in cd.nodes])


def weight_leq(cd: CartanData, gamma: TorusWeight, lam: TorusWeight) -> bool:
    """gamma <= lam iff lam - gamma is a nonnegative integer combination of the [alpha_j]."""
    diff = lam - gamma
    if diff.is_zero():
        return True
    if not diff.support() <= set(cd.nodes):
        return False
    c = root_coordinates(cd, diff)
    return all(x.denominator == 1 and x >= 0 for x in c)
