"""Generators of sp(k+n) as first-order differential operators on the chart.

The k x n quaternion chart is written as a 2k x 2n complex matrix ``zeta``
whose 2x2 blocks are ``[[z1, z2], [-w2, w1]]``, with ``w`` the formal
(Wirtinger) conjugates of ``z``.  All coefficients are exact Gaussian
rationals, so every commutator check below is a zero-tolerance assertion.

Indices are 1-based throughout: ``alpha, beta, mu, nu`` run over ``1..2k``
and ``a, b, c, d`` over ``1..2n``.

Checks registered with the harness:

    check: liealg.commutator_table
    check: liealg.conjugate_derivative_rule
    check: liealg.generated_rank
    check: liealg.generator_skewness
    check: liealg.negative_control
    check: liealg.weights
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from sympy.polys.domains import QQ_I
from sympy.polys.rings import PolyElement, ring

from ._packed import PackedOp, max_abs, split_poly, sub

__all__ = [
    "PolyRing",
    "DiffOp",
    "RingMismatchError",
    "ResourceGuardError",
    "ring_make",
    "generator",
    "op_apply",
    "commutator",
    "commutator_residual",
    "relations",
    "Relation",
    "full_table_check",
    "TableReport",
    "weight_check",
    "WeightReport",
    "generated_rank",
    "negative_control",
    "monomials",
    "random_polynomial",
    "J",
    "delta",
]

MAX_APPLICATIONS = 10**6


class RingMismatchError(ValueError):
    pass


class ResourceGuardError(RuntimeError):
    pass


def delta(i: int, j: int) -> int:
    return int(i == j)


def J(i: int, j: int) -> int:
    """Entries of ``1 (x) [[0, 1], [-1, 0]]`` (1-based)."""
    if (i - 1) // 2 != (j - 1) // 2:
        return 0
    if i % 2 == 1 and j == i + 1:
        return 1
    if i % 2 == 0 and j == i - 1:
        return -1
    return 0


def _partner(i: int) -> int:
    return i + 1 if i % 2 == 1 else i - 1


@dataclass(frozen=True)
class _Signed:
    sign: int
    var: int


class PolyRing:
    """Polynomial ring in the 4kn chart symbols with the signed index maps.

    Symbols are ordered block by block: ``z1, z2, w1, w2`` of block ``(mu, t)``.
    """

    def __init__(self, k: int, n: int):
        if k < 1 or n < 1:
            raise ValueError("k and n must be positive")
        self.k, self.n = k, n
        names = []
        for mu in range(1, k + 1):
            for t in range(1, n + 1):
                names += [f"z1_{mu}{t}", f"z2_{mu}{t}", f"w1_{mu}{t}", f"w2_{mu}{t}"]
        self.names = tuple(names)
        self.R, *self.gens = ring(",".join(names), QQ_I)
        self.gens = tuple(self.gens)
        # the conjugate of symbol i is symbol _swap[i]
        self._swap = tuple(i + 2 if i % 4 < 2 else i - 2 for i in range(len(names)))
        self._zeta = {}
        self._zeta_bar = {}
        for mu in range(1, k + 1):
            for t in range(1, n + 1):
                base = 4 * ((mu - 1) * n + (t - 1))
                z1, z2, w1, w2 = base, base + 1, base + 2, base + 3
                r, c = 2 * mu - 1, 2 * t - 1
                self._zeta[r, c] = _Signed(1, z1)
                self._zeta[r, c + 1] = _Signed(1, z2)
                self._zeta[r + 1, c] = _Signed(-1, w2)
                self._zeta[r + 1, c + 1] = _Signed(1, w1)
                self._zeta_bar[r, c] = _Signed(1, w1)
                self._zeta_bar[r, c + 1] = _Signed(1, w2)
                self._zeta_bar[r + 1, c] = _Signed(-1, z2)
                self._zeta_bar[r + 1, c + 1] = _Signed(1, z1)

    @property
    def nvars(self) -> int:
        return len(self.gens)

    @property
    def rows(self) -> int:
        return 2 * self.k

    @property
    def cols(self) -> int:
        return 2 * self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyRing) and (self.k, self.n) == (other.k, other.n)

    def __hash__(self) -> int:
        return hash((self.k, self.n))

    def __repr__(self) -> str:
        return f"PolyRing(k={self.k}, n={self.n})"

    def _check(self, alpha: int, a: int) -> None:
        if not (1 <= alpha <= self.rows and 1 <= a <= self.cols):
            raise IndexError(f"index ({alpha}, {a}) outside 1..{self.rows} x 1..{self.cols}")

    def zeta(self, alpha: int, a: int) -> PolyElement:
        self._check(alpha, a)
        s = self._zeta[alpha, a]
        return s.sign * self.gens[s.var]

    def zeta_bar(self, alpha: int, a: int) -> PolyElement:
        self._check(alpha, a)
        s = self._zeta_bar[alpha, a]
        return s.sign * self.gens[s.var]

    def d(self, beta: int, b: int) -> DiffOp:
        """``d/d zeta_{beta b}``."""
        self._check(beta, b)
        s = self._zeta[beta, b]
        return DiffOp(self, {s.var: self.R(s.sign)})

    def d_bar(self, beta: int, b: int) -> DiffOp:
        """``d/d zeta-bar_{beta b}``."""
        self._check(beta, b)
        s = self._zeta_bar[beta, b]
        return DiffOp(self, {s.var: self.R(s.sign)})

    def poly(self, value) -> PolyElement:
        return self.R(value)

    def conjugate(self, f: PolyElement) -> PolyElement:
        """Ring involution: swap ``z <-> w`` and conjugate the coefficients."""
        out = {}
        for mon, c in f.items():
            new = [0] * self.nvars
            for i, e in enumerate(mon):
                new[self._swap[i]] = e
            out[tuple(new)] = QQ_I(c.x, -c.y)
        return self.R.from_dict(out) if out else self.R.zero


def ring_make(k: int, n: int) -> PolyRing:
    return PolyRing(k, n)


@dataclass(frozen=True)
class DiffOp:
    """First-order operator ``sum_i c_i d/dx_i`` with polynomial coefficients.

    ``terms`` maps a symbol index to its coefficient; zero coefficients are
    never stored.  There is no zeroth-order part: none of the generators has
    one and commutators of such operators never acquire one.
    """

    ring: PolyRing
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {i: c for i, c in self.terms.items() if c}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, r: PolyRing) -> DiffOp:
        return cls(r, {})

    def _same_ring(self, other: DiffOp) -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other: DiffOp) -> DiffOp:
        self._same_ring(other)
        out = dict(self.terms)
        for i, c in other.terms.items():
            out[i] = out.get(i, self.ring.R.zero) + c
        return DiffOp(self.ring, out)

    def __neg__(self) -> DiffOp:
        return DiffOp(self.ring, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other: DiffOp) -> DiffOp:
        return self + (-other)

    def __rmul__(self, coeff) -> DiffOp:
        """Left multiplication by a scalar or a polynomial."""
        c = self.ring.R(coeff) if not isinstance(coeff, PolyElement) else coeff
        return DiffOp(self.ring, {i: c * t for i, t in self.terms.items()})

    def __call__(self, f: PolyElement) -> PolyElement:
        return op_apply(self, f)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient_vector(self) -> dict:
        """Flat sparse view ``{(symbol, monomial): coefficient}``."""
        return {(i, mon): c for i, t in self.terms.items() for mon, c in t.items()}

    def conjugate(self) -> DiffOp:
        r = self.ring
        return DiffOp(r, {r._swap[i]: r.conjugate(c) for i, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffOp) and self.ring == other.ring and self.coefficient_vector() == other.coefficient_vector()

    __hash__ = None


def op_apply(op: DiffOp, f: PolyElement) -> PolyElement:
    if f.ring is not op.ring.R:
        raise RingMismatchError("operator and polynomial live in different rings")
    out = op.ring.R.zero
    gens = op.ring.gens
    for i, c in op.terms.items():
        df = f.diff(gens[i])
        if df:
            out += c * df
    return out


def _sum(r: PolyRing, ops: Iterable[DiffOp]) -> DiffOp:
    total = DiffOp.zero(r)
    for op in ops:
        total = total + op
    return total


def _h(r: PolyRing, alpha: int, beta: int) -> DiffOp:
    # h_{ab} = zeta_{alpha b} d_{beta b} - zeta-bar_{beta b} d-bar_{alpha b}
    return _sum(r, (r.zeta(alpha, b) * r.d(beta, b) - r.zeta_bar(beta, b) * r.d_bar(alpha, b) for b in range(1, r.cols + 1)))


def _H(r: PolyRing, a: int, b: int) -> DiffOp:
    return _sum(r, (r.zeta(mu, a) * r.d(mu, b) - r.zeta_bar(mu, b) * r.d_bar(mu, a) for mu in range(1, r.rows + 1)))


def _p(r: PolyRing, alpha: int, a: int, quadratic: bool = True) -> DiffOp:
    op = r.d_bar(alpha, a)
    if quadratic:
        op = op + _sum(
            r,
            ((r.zeta(alpha, b) * r.zeta(mu, a)) * r.d(mu, b) for b in range(1, r.cols + 1) for mu in range(1, r.rows + 1)),
        )
    return op


def _r(r: PolyRing, alpha: int, beta: int) -> DiffOp:
    return _sum(r, (r.zeta(alpha, a) * r.d(beta, a) for a in range(1, r.cols + 1)))


class _Generators:
    """Cached generator family for one ring; ``quadratic=False`` drops the
    quadratic term of ``p`` (negative control)."""

    def __init__(self, r: PolyRing, quadratic: bool = True):
        self.r = r
        self.quadratic = quadratic
        self._cache: dict = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def h(self, al, be):
        return self._get(("h", al, be), lambda: _h(self.r, al, be))

    def H(self, a, b):
        return self._get(("H", a, b), lambda: _H(self.r, a, b))

    def p(self, al, a):
        return self._get(("p", al, a), lambda: _p(self.r, al, a, self.quadratic))

    def pbar(self, al, a):
        return self._get(("pbar", al, a), lambda: self.p(al, a).conjugate())

    def r_(self, al, be):
        return self._get(("r", al, be), lambda: _r(self.r, al, be))

    def hJ(self, al, be):
        return self._get(("hJ", al, be), lambda: _sum(self.r, (J(g, be) * self.h(al, g) for g in range(1, self.r.rows + 1) if J(g, be))))

    def HJ(self, a, b):
        return self._get(("HJ", a, b), lambda: _sum(self.r, (J(c, b) * self.H(a, c) for c in range(1, self.r.cols + 1) if J(c, b))))

    def rJ(self, al, be):
        return self._get(("rJ", al, be), lambda: _sum(self.r, (J(g, be) * self.r_(al, g) for g in range(1, self.r.rows + 1) if J(g, be))))

    def Jp(self, nu, a):
        return self._get(("Jp", nu, a), lambda: _sum(self.r, (J(nu, g) * self.p(g, a) for g in range(1, self.r.rows + 1) if J(nu, g))))

    def pJ(self, al, c):
        return self._get(("pJ", al, c), lambda: _sum(self.r, (J(d, c) * self.p(al, d) for d in range(1, self.r.cols + 1) if J(d, c))))

    def Jpbar(self, mu, a):
        return self._get(("Jpbar", mu, a), lambda: _sum(self.r, (J(mu, g) * self.pbar(g, a) for g in range(1, self.r.rows + 1) if J(mu, g))))

    def pbarJ(self, al, b):
        return self._get(("pbarJ", al, b), lambda: _sum(self.r, (J(d, b) * self.pbar(al, d) for d in range(1, self.r.cols + 1) if J(d, b))))


_GEN_CACHE: dict = {}


def _gens(r: PolyRing, quadratic: bool = True) -> _Generators:
    key = (r.k, r.n, quadratic)
    g = _GEN_CACHE.get(key)
    if g is None or g.r is not r:
        g = _GEN_CACHE[key] = _Generators(r, quadratic)
    return g


def generator(r: PolyRing, kind: str, i: int, j: int) -> DiffOp:
    """One of ``h_{alpha beta}``, ``H_{ab}``, ``p_{alpha a}``, ``pbar_{alpha a}``."""
    if kind == "h":
        r._check(i, 1), r._check(j, 1)
    elif kind == "H":
        r._check(1, i), r._check(1, j)
    elif kind in ("p", "pbar"):
        r._check(i, j)
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    g = _gens(r)
    return {"h": g.h, "H": g.H, "p": g.p, "pbar": g.pbar}[kind](i, j)


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    """``[a, b]`` as a first-order operator, from its action on the symbols."""
    a._same_ring(b)
    r = a.ring
    terms = {}
    for i, x in enumerate(r.gens):
        c = op_apply(a, op_apply(b, x)) - op_apply(b, op_apply(a, x))
        if c:
            terms[i] = c
    return DiffOp(r, terms)


def _max_abs(f: PolyElement) -> Fraction:
    best = Fraction(0)
    for c in f.values():
        for part in (c.x, c.y):
            best = max(best, abs(Fraction(int(part.numerator), int(part.denominator))))
    return best


class _Evaluator:
    """Commutator residuals on a fixed test set, with cached first applications.

    Operators with real integer coefficients run on the packed-integer path;
    anything else falls back to :func:`op_apply`.
    """

    def __init__(self, testset: Sequence[PolyElement]):
        self.tests = list(testset)
        self.split = [split_poly(f) for f in self.tests]
        self._compiled: dict = {}
        self._first: dict = {}
        self.applications = 0

    def _packed(self, op: DiffOp):
        key = id(op)
        hit = self._compiled.get(key)
        if hit is None:
            try:
                hit = (op, PackedOp.from_terms(op.terms))
            except ValueError:
                hit = (op, None)
            self._compiled[key] = hit
        return hit[1]

    def _first_packed(self, op: DiffOp, packed: PackedOp, t: int, part: int) -> dict:
        key = (id(op), t, part)
        hit = self._first.get(key)
        if hit is None:
            hit = self._first[key] = packed(self.split[t][part])
            self.applications += 1
        return hit

    def residual(self, a: DiffOp, b: DiffOp, rhs: DiffOp) -> Fraction:
        pa, pb, pr = self._packed(a), self._packed(b), self._packed(rhs)
        worst = Fraction(0)
        if pa is None or pb is None or pr is None:
            for f in self.tests:
                g = op_apply(a, op_apply(b, f)) - op_apply(b, op_apply(a, f)) - op_apply(rhs, f)
                self.applications += 5
                worst = max(worst, _max_abs(g))
            return worst
        for t, (re, im, den) in enumerate(self.split):
            for part in (0, 1):
                if not (re, im)[part]:
                    continue
                g = sub(sub(pa(self._first_packed(b, pb, t, part)), pb(self._first_packed(a, pa, t, part))), pr((re, im)[part]))
                self.applications += 3
                if g:
                    worst = max(worst, Fraction(max_abs(g), den))
        return worst


def commutator_residual(a: DiffOp, b: DiffOp, rhs: DiffOp, testset: Sequence[PolyElement]) -> Fraction:
    """Largest coefficient of ``a(b f) - b(a f) - rhs(f)`` over the test set.

    Exact: the result is a :class:`~fractions.Fraction` (``0`` when the
    identity holds).
    """
    a._same_ring(b)
    a._same_ring(rhs)
    return _Evaluator(testset).residual(a, b, rhs)


@dataclass(frozen=True)
class Relation:
    """A commutator identity ``[lhs_a, lhs_b] = rhs`` over an index family."""

    name: str
    indices: Callable[[PolyRing], Iterable[tuple]]
    lhs: Callable[[_Generators, tuple], tuple[DiffOp, DiffOp]]
    rhs: Callable[[_Generators, tuple], DiffOp]


def _rows(r):
    return range(1, r.rows + 1)


def _cols(r):
    return range(1, r.cols + 1)


def _lin(g: _Generators, pairs) -> DiffOp:
    return _sum(g.r, (c * op for c, op in pairs if c))


def relations() -> list[Relation]:
    """The commutation table: seven listed relations and four derived forms."""
    R4 = lambda f1, f2, f3, f4: (lambda r: itertools.product(f1(r), f2(r), f3(r), f4(r)))  # noqa: E731
    return [
        Relation(
            "[hJ,hJ]",
            R4(_rows, _rows, _rows, _rows),
            lambda g, i: (g.hJ(i[0], i[1]), g.hJ(i[2], i[3])),
            lambda g, i: _lin(g, [
                (-J(i[0], i[2]), g.hJ(i[1], i[3])),
                (-J(i[0], i[3]), g.hJ(i[1], i[2])),
                (-J(i[1], i[2]), g.hJ(i[0], i[3])),
                (-J(i[1], i[3]), g.hJ(i[0], i[2])),
            ]),
        ),
        Relation(
            "[HJ,HJ]",
            R4(_cols, _cols, _cols, _cols),
            lambda g, i: (g.HJ(i[0], i[1]), g.HJ(i[2], i[3])),
            lambda g, i: _lin(g, [
                (-J(i[0], i[2]), g.HJ(i[1], i[3])),
                (-J(i[0], i[3]), g.HJ(i[1], i[2])),
                (-J(i[1], i[2]), g.HJ(i[0], i[3])),
                (-J(i[1], i[3]), g.HJ(i[0], i[2])),
            ]),
        ),
        Relation(
            "[h,H]",
            R4(_rows, _rows, _cols, _cols),
            lambda g, i: (g.h(i[0], i[1]), g.H(i[2], i[3])),
            lambda g, i: DiffOp.zero(g.r),
        ),
        Relation(
            "[hJ,p]",
            R4(_rows, _rows, _rows, _cols),
            lambda g, i: (g.hJ(i[0], i[1]), g.p(i[2], i[3])),
            lambda g, i: _lin(g, [(J(i[2], i[0]), g.p(i[1], i[3])), (J(i[2], i[1]), g.p(i[0], i[3]))]),
        ),
        Relation(
            "[HJ,p]",
            R4(_cols, _cols, _rows, _cols),
            lambda g, i: (g.HJ(i[0], i[1]), g.p(i[2], i[3])),
            lambda g, i: _lin(g, [(J(i[3], i[0]), g.p(i[2], i[1])), (J(i[3], i[1]), g.p(i[2], i[0]))]),
        ),
        Relation(
            "[p,p]",
            R4(_rows, _cols, _rows, _cols),
            lambda g, i: (g.p(i[0], i[1]), g.p(i[2], i[3])),
            lambda g, i: _lin(g, [(-J(i[1], i[3]), g.hJ(i[0], i[2])), (-J(i[0], i[2]), g.HJ(i[1], i[3]))]),
        ),
        Relation(
            "[pbar,p]",
            R4(_rows, _cols, _rows, _cols),
            lambda g, i: (g.pbar(i[0], i[1]), g.p(i[2], i[3])),
            lambda g, i: _lin(g, [(delta(i[0], i[2]), g.H(i[3], i[1])), (delta(i[1], i[3]), g.h(i[2], i[0]))]),
        ),
        Relation(
            "[h,p]",
            R4(_rows, _rows, _rows, _cols),
            lambda g, i: (g.h(i[0], i[1]), g.p(i[2], i[3])),
            lambda g, i: _lin(g, [(delta(i[2], i[1]), g.p(i[0], i[3])), (J(i[2], i[0]), g.Jp(i[1], i[3]))]),
        ),
        Relation(
            "[H,pbar]",
            R4(_cols, _cols, _rows, _cols),
            lambda g, i: (g.H(i[0], i[1]), g.pbar(i[2], i[3])),
            lambda g, i: _lin(g, [(-delta(i[3], i[0]), g.pbar(i[2], i[1])), (J(i[3], i[1]), g.pbarJ(i[2], i[0]))]),
        ),
        Relation(
            "[h,pbar]",
            R4(_rows, _rows, _rows, _cols),
            lambda g, i: (g.h(i[0], i[1]), g.pbar(i[2], i[3])),
            lambda g, i: _lin(g, [(-delta(i[2], i[0]), g.pbar(i[1], i[3])), (-J(i[2], i[1]), g.Jpbar(i[0], i[3]))]),
        ),
        Relation(
            "[H,p]",
            R4(_cols, _cols, _rows, _cols),
            lambda g, i: (g.H(i[0], i[1]), g.p(i[2], i[3])),
            lambda g, i: _lin(g, [(delta(i[3], i[1]), g.p(i[2], i[0])), (-J(i[3], i[0]), g.pJ(i[2], i[1]))]),
        ),
    ]


def monomials(r: PolyRing, degree: int) -> list[PolyElement]:
    """All monomials of total degree ``<= degree``."""
    out = [r.R.one]
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(range(r.nvars), d):
            m = r.R.one
            for i in combo:
                m *= r.gens[i]
            out.append(m)
    return out


def random_polynomial(r: PolyRing, degree: int, seed: int, terms: int = 6) -> PolyElement:
    """Seeded polynomial of total degree ``degree`` with Gaussian-rational coefficients."""
    rng = random.Random(seed)
    f = r.R.zero
    for _ in range(terms):
        d = rng.randint(0, degree)
        m = r.R.one
        for _ in range(d):
            m *= r.gens[rng.randrange(r.nvars)]
        c = QQ_I(rng.randint(-9, 9), rng.randint(-9, 9)) / QQ_I(rng.randint(1, 7), 0)
        f += c * m
    top = r.R.one
    for _ in range(degree):
        top *= r.gens[rng.randrange(r.nvars)]
    return f + top


@dataclass
class TableReport:
    k: int
    n: int
    degree: int
    residuals: dict
    applications: int
    symmetric_form_residual: object = 0

    @property
    def ok(self) -> bool:
        return all(v == 0 for v in self.residuals.values()) and self.symmetric_form_residual == 0


def default_testset(r: PolyRing, degree: int, n_random: int = 20, seed: int = 0) -> list[PolyElement]:
    tests = monomials(r, degree)
    tests += [random_polynomial(r, 3, seed + i) for i in range(n_random)]
    return tests


def full_table_check(
    k: int,
    n: int,
    degree: int = 2,
    n_random: int = 20,
    seed: int = 0,
    quadratic: bool = True,
    only: Sequence[str] | None = None,
) -> TableReport:
    if k > 2 or n > 2 or degree > 3:
        raise ValueError("table check limited to k, n <= 2 and degree <= 3")
    r = ring_make(k, n)
    g = _gens(r, quadratic)
    tests = default_testset(r, degree, n_random, seed)
    rels = [rel for rel in relations() if only is None or rel.name in only]
    apps = sum(len(list(rel.indices(r))) for rel in rels) * len(tests)
    if apps > MAX_APPLICATIONS:
        raise ResourceGuardError(f"{apps} operator applications requested (limit {MAX_APPLICATIONS})")
    ev = _Evaluator(tests)
    residuals = {}
    for rel in rels:
        worst = Fraction(0)
        for idx in rel.indices(r):
            a, b = rel.lhs(g, idx)
            worst = max(worst, ev.residual(a, b, rel.rhs(g, idx)))
        residuals[rel.name] = worst
    sym = Fraction(0)
    for al, be in itertools.product(_rows(r), _rows(r)):
        diff = g.hJ(al, be) - (g.rJ(al, be) + g.rJ(be, al))
        sym = max(sym, max((_max_abs(c) for c in diff.terms.values()), default=Fraction(0)))
    return TableReport(k, n, degree, residuals, apps, sym)


# cached generators built from each kind, invalidated when that kind is perturbed
_DEPENDENTS = {
    "h": ("hJ",),
    "H": ("HJ",),
    "p": ("pbar", "Jp", "pJ", "Jpbar", "pbarJ"),
    "pbar": ("Jpbar", "pbarJ"),
}


def _perturbations(r: PolyRing):
    """Every single-sign perturbation: one symbol term of one generator negated."""
    g = _gens(r)
    for key in [("h", i, j) for i in _rows(r) for j in _rows(r)] + [("H", a, b) for a in _cols(r) for b in _cols(r)] + [
        (kind, i, a) for kind in ("p", "pbar") for i in _rows(r) for a in _cols(r)
    ]:
        op = {"h": g.h, "H": g.H, "p": g.p, "pbar": g.pbar}[key[0]](key[1], key[2])
        for var in sorted(op.terms):
            terms = dict(op.terms)
            terms[var] = -terms[var]
            yield key, var, DiffOp(r, terms)


def negative_control(k: int, n: int, degree: int = 2) -> tuple[int, int]:
    """Return ``(perturbations tried, perturbations no relation detected)``."""
    r = ring_make(k, n)
    ev = _Evaluator(monomials(r, degree))
    rels = relations()
    base = _gens(r)
    for rel in rels:
        for idx in rel.indices(r):
            rel.lhs(base, idx), rel.rhs(base, idx)
    tried = missed = 0
    for key, _, bad in _perturbations(r):
        g = _Generators(r)
        stale = _DEPENDENTS[key[0]]
        g._cache = {k: v for k, v in base._cache.items() if k[0] not in stale}
        g._cache[key] = bad
        tried += 1
        detected = False
        for rel in rels:
            for idx in rel.indices(r):
                a, b = rel.lhs(g, idx)
                if ev.residual(a, b, rel.rhs(g, idx)):
                    detected = True
                    break
            if detected:
                break
        missed += not detected
    return tried, missed


def index_map_residuals(r: PolyRing) -> tuple[int, int]:
    """Count failures of ``d_{bb'} zeta_{aa'} = delta delta`` and
    ``d_{bb'} zeta-bar_{aa'} = J_{ba} J_{b'a'}`` over all index pairs."""
    bad_plain = bad_bar = 0
    for (al, a), (be, b) in itertools.product(itertools.product(_rows(r), _cols(r)), repeat=2):
        d = r.d(be, b)
        if op_apply(d, r.zeta(al, a)) != r.R(delta(al, be) * delta(a, b)):
            bad_plain += 1
        if op_apply(d, r.zeta_bar(al, a)) != r.R(J(be, al) * J(b, a)):
            bad_bar += 1
    return bad_plain, bad_bar


def skewness_failures(r: PolyRing) -> int:
    """Count index pairs violating ``conj(h_{ba}) = -h_{ab}`` (and likewise for ``H``)."""
    g = _gens(r)
    bad = 0
    for al, be in itertools.product(_rows(r), _rows(r)):
        bad += g.h(be, al).conjugate() != -g.h(al, be)
    for a, b in itertools.product(_cols(r), _cols(r)):
        bad += g.H(b, a).conjugate() != -g.H(a, b)
    return bad


def generator_family(r: PolyRing) -> list[DiffOp]:
    g = _gens(r)
    ops = [g.h(i, j) for i in _rows(r) for j in _rows(r)]
    ops += [g.H(a, b) for a in _cols(r) for b in _cols(r)]
    ops += [g.p(i, a) for i in _rows(r) for a in _cols(r)]
    ops += [g.pbar(i, a) for i in _rows(r) for a in _cols(r)]
    return ops


def _rank(vectors: Iterable[dict]) -> int:
    """Exact rank over the rationals of sparse vectors ``{key: Fraction}``."""
    basis: list[tuple[object, dict]] = []
    for v in vectors:
        v = dict(v)
        for pivot, row in basis:
            c = v.get(pivot)
            if c:
                for key, val in row.items():
                    nv = v.get(key, 0) - c * val
                    if nv:
                        v[key] = nv
                    else:
                        v.pop(key, None)
        if v:
            pivot = min(v)
            inv = 1 / v[pivot]
            basis.append((pivot, {key: val * inv for key, val in v.items()}))
    return len(basis)


def _real_vector(op: DiffOp) -> dict:
    out = {}
    for (i, mon), c in op.coefficient_vector().items():
        if c.x:
            out[(i, mon, 0)] = Fraction(int(c.x.numerator), int(c.x.denominator))
        if c.y:
            out[(i, mon, 1)] = Fraction(int(c.y.numerator), int(c.y.denominator))
    return out


def generated_rank(k: int, n: int, with_commutators: bool = True) -> int:
    """Real dimension of the span of the generators and their pairwise commutators."""
    r = ring_make(k, n)
    ops = generator_family(r)
    vecs = [_real_vector(op) for op in ops]
    if with_commutators:
        vecs += [_real_vector(commutator(a, b)) for a, b in itertools.combinations(ops, 2)]
    return _rank(vecs)


@dataclass
class WeightReport:
    k: int
    n: int
    eigen_failures: int
    shift_failures: int
    shifts_checked: int
    weights: dict

    @property
    def ok(self) -> bool:
        return self.eigen_failures == 0 and self.shift_failures == 0


def _diagonal_ops(r: PolyRing, g: _Generators) -> list[tuple[str, int, DiffOp]]:
    return [("h", i, g.h(i, i)) for i in _rows(r)] + [("H", a, g.H(a, a)) for a in _cols(r)]


def _eigenvalue(op: DiffOp, f: PolyElement):
    """``lam`` with ``op f = lam f``, or ``None`` if ``f`` is not an eigenvector."""
    image = op_apply(op, f)
    if not f:
        return None
    mon, c = next(iter(f.items()))
    lam = image.coeff(f.ring.from_dict({mon: f.ring.domain.one})) / c if image else f.ring.domain.zero
    return lam if image == f * lam else None


def predicted_shift(r: PolyRing, kind: str, idx: int, alpha: int, a: int) -> int:
    """Multiple ``s`` of ``p_{alpha a}`` in ``[D, p_{alpha a}]``, read off the derived
    commutators with ``D = h_{idx idx}`` (``kind="h"``) or ``H_{idx idx}``."""
    g = _gens(r)
    if kind == "h":
        rhs = _lin(g, [(delta(alpha, idx), g.p(idx, a)), (J(alpha, idx), g.Jp(idx, a))])
    else:
        rhs = _lin(g, [(delta(a, idx), g.p(alpha, idx)), (-J(a, idx), g.pJ(alpha, idx))])
    target = g.p(alpha, a)
    if rhs.is_zero():
        return 0
    for s in (1, -1, 2, -2):
        if rhs == s * target:
            return s
    raise ArithmeticError(f"[{kind}_{idx}{idx}, p_{alpha}{a}] is not a multiple of p_{alpha}{a}")


def weight_check(k: int, n: int, degree: int = 2) -> WeightReport:
    """Diagonal generators act by integer weights; ``p`` shifts them as predicted."""
    if k > 2 or n > 2:
        raise ValueError("weight check limited to k, n <= 2")
    r = ring_make(k, n)
    g = _gens(r)
    diags = _diagonal_ops(r, g)
    weights = {}
    eigen_failures = 0
    for m in monomials(r, degree):
        w = []
        for _, _, d in diags:
            lam = _eigenvalue(d, m)
            if lam is None or lam.y != 0 or lam.x.denominator != 1:
                eigen_failures += 1
                w.append(None)
            else:
                w.append(int(lam.x))
        weights[m.as_expr()] = tuple(w)
    shift_failures = checked = 0
    for alpha, a in itertools.product(_rows(r), _cols(r)):
        p = g.p(alpha, a)
        shifts = [predicted_shift(r, kind, idx, alpha, a) for kind, idx, _ in diags]
        for m in monomials(r, degree):
            pm = op_apply(p, m)
            if not pm:
                continue
            base = weights[m.as_expr()]
            for (_, _, d), s, lam in zip(diags, shifts, base):
                checked += 1
                measured = _eigenvalue(d, pm)
                if lam is None or measured is None or measured != r.R.domain.convert(lam + s):
                    shift_failures += 1
    return WeightReport(k, n, eigen_failures, shift_failures, checked, weights)
