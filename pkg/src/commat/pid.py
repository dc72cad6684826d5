"""Finite-length modules over the Euclidean rings Z, F_p[x] and Q[x].

A module is stored through its invariant factors q_0, ..., q_{d-1} (largest
first, each dividing its predecessor), i.e. M = R/(q_0) + ... + R/(q_{d-1}).
An endomorphism is a d x d matrix (m_ij) sending the i-th summand to the j-th
one: f(x)_j = sum_i m_ij x_i (mod q_j).  It is well defined exactly when
q_j divides m_ij q_i.

The algebra A generated by f is the R-span of the matrices of f^0, ..., f^{L-1}
(L = length of M) inside P = sum_{i,j} R/(q_j), and its invariant factors are
read off a Smith normal form of a relation presentation.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import IllFormedEndo, NotFiniteLength
from .exactlin import FieldSpec


# ---------------------------------------------------------------------------
# Rings
# ---------------------------------------------------------------------------

class IntegerRing:
    kind = "Integers"
    zero = 0
    one = 1

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("Z")

    def __str__(self):
        return "Z"

    def norm(self, a):
        return abs(a)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def divmod(self, a, b):
        return divmod(a, b)

    def unit_part(self, a):
        return -1 if a < 0 else 1

    def unit_inverse(self, u):
        return u

    def is_unit(self, a):
        return abs(a) == 1

    def canonical(self, a):
        return abs(a)

    def from_int(self, n):
        return n

    def length(self, a) -> int:
        """Length of R/(a): the number of prime factors with multiplicity."""
        if a == 0:
            raise NotFiniteLength("Z/(0) has infinite length")
        return sum(sympy.factorint(abs(a)).values())

    def factor(self, a) -> dict:
        return {int(p): e for p, e in sympy.factorint(abs(a)).items()}

    def parse(self, text: str):
        return int(text.strip())

    def fmt(self, a) -> str:
        return str(a)

    def to_json(self, a):
        return a

    def random_element(self, rng: random.Random, modulus=None):
        if modulus is None:
            return rng.randint(-9, 9)
        return rng.randrange(abs(modulus))

    def small_primes(self):
        return [2, 3, 5, 7]


class PolyRing:
    """k[x] with elements stored as coefficient tuples, lowest degree first."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.kind = "PolyOverPrimeField" if field.characteristic else "PolyOverRationals"
        self.zero = ()
        self.one = (field.one,)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.field == self.field

    def __hash__(self):
        return hash(("poly", self.field))

    def __str__(self):
        return f"{self.field}[x]"

    def _strip(self, coeffs):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        return tuple(c)

    def make(self, coeffs):
        return self._strip(self.field(x) for x in coeffs)

    def degree(self, a):
        return len(a) - 1

    def norm(self, a):
        return len(a) - 1

    def add(self, a, b):
        F = self.field
        n = max(len(a), len(b))
        return self._strip(F(( a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0))
                           for i in range(n))

    def neg(self, a):
        F = self.field
        return tuple(F(-x) for x in a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not a or not b:
            return ()
        F = self.field
        p = F.characteristic
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._strip(F(v % p) if p else F(v) for v in out)

    def divmod(self, a, b):
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        p = F.characteristic
        r = list(a)
        db = len(b) - 1
        inv = F.inv(b[-1])
        q = [F.zero] * max(len(a) - db, 0)
        while len(r) - 1 >= db and r:
            c = r[-1] * inv
            if p:
                c %= p
            shift = len(r) - 1 - db
            q[shift] = c
            for i, y in enumerate(b):
                v = r[shift + i] - c * y
                r[shift + i] = v % p if p else v
            while r and not r[-1]:
                r.pop()
        return self._strip(q), self._strip(F(x) for x in r)

    def unit_part(self, a):
        return (a[-1],) if a else self.one

    def unit_inverse(self, u):
        return (self.field.inv(u[0]),)

    def is_unit(self, a):
        return len(a) == 1

    def canonical(self, a):
        if not a:
            return a
        return self.mul(a, self.unit_inverse(self.unit_part(a)))

    def from_int(self, n):
        return self.make([n])

    def length(self, a) -> int:
        if not a:
            raise NotFiniteLength("k[x]/(0) has infinite length")
        return len(a) - 1

    def _sympy(self, a):
        x = sympy.Symbol("x")
        coeffs = list(reversed(a)) or [0]
        if self.field.characteristic:
            return sympy.Poly(coeffs, x, modulus=self.field.characteristic)
        return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x,
                          domain=sympy.QQ)

    def factor(self, a) -> dict:
        """Monic irreducible factors with multiplicities."""
        _, factors = self._sympy(a).factor_list()
        out = {}
        for f, e in factors:
            coeffs = [self._from_sympy_coeff(c) for c in reversed(f.all_coeffs())]
            out[self.canonical(self.make(coeffs))] = e
        return out

    def _from_sympy_coeff(self, c):
        if self.field.characteristic:
            return int(c) % self.field.characteristic
        c = sympy.Rational(c)
        return Fraction(int(c.p), int(c.q))

    def parse(self, text: str):
        x = sympy.Symbol("x")
        expr = sympy.sympify(text.strip(), locals={"x": x})
        if self.field.characteristic:
            poly = sympy.Poly(expr, x, modulus=self.field.characteristic)
        else:
            poly = sympy.Poly(expr, x, domain=sympy.QQ)
        return self.make(self._from_sympy_coeff(c) for c in reversed(poly.all_coeffs()))

    def fmt(self, a) -> str:
        if not a:
            return "0"
        terms = []
        for e in range(len(a) - 1, -1, -1):
            c = a[e]
            if not c:
                continue
            mono = "1" if e == 0 else ("x" if e == 1 else f"x^{e}")
            if e == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return "+".join(terms).replace("+-", "-")

    def to_json(self, a):
        return self.fmt(a)

    def random_element(self, rng: random.Random, modulus=None):
        deg = (len(modulus) - 2) if modulus is not None else 3
        if deg < 0:
            return ()
        return self.make(self.field.random_element(rng) for _ in range(deg + 1))

    def small_primes(self):
        if self.field.characteristic == 2:
            return [self.make(c) for c in ((0, 1), (1, 1), (1, 1, 1), (1, 1, 0, 1))]
        return [self.make(c) for c in ((0, 1), (1, 1), (1, 0, 1))] if self.field.characteristic \
            else [self.make(c) for c in ((0, 1), (1, 1), (-2, 0, 1))]


ZZ = IntegerRing()


def parse_ring(text: str):
    """``Z``, ``F<p>x`` / ``F<p>[x]`` or ``Qx`` / ``Q[x]``."""
    t = text.strip().replace(" ", "")
    if t.upper() in ("Z", "ZZ"):
        return ZZ
    m = re.fullmatch(r"(?i)(Q|F_?\d+|GF\(\d+\))(\[x\]|x)", t)
    if not m:
        raise ValueError(f"unrecognised ring {text!r} (expected Z, F<p>x or Qx)")
    return PolyRing(FieldSpec.parse(m.group(1)))


def describe_ring(R) -> dict:
    if isinstance(R, IntegerRing):
        return {"kind": "Integers"}
    return {"kind": R.kind, "characteristic": R.field.characteristic}


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple
    U: tuple | None
    V: tuple | None
    rank: int


def _identity(R, n):
    return [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]


def matmul(R, A, B):
    out = []
    ncols = len(B[0]) if B else 0
    for row in A:
        acc = [R.zero] * ncols
        for k, a in enumerate(row):
            if a == R.zero:
                continue
            for j, b in enumerate(B[k]):
                if b != R.zero:
                    acc[j] = R.add(acc[j], R.mul(a, b))
        out.append(acc)
    return out


def smith_form(matrix: Sequence[Sequence], R, *, want_u: bool = True, want_v: bool = True,
               verify: bool = True) -> SmithForm:
    """Smith normal form U A V = D over a Euclidean ring.

    Pivots are chosen by least norm (absolute value or degree) with the
    leftmost, then topmost, entry winning ties.
    """
    A = [list(r) for r in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    zero = R.zero
    U = _identity(R, m) if want_u else None
    V = _identity(R, n) if want_v else None

    def row_axpy(dst, src, q):
        """row_dst -= q * row_src."""
        rs, rd = A[src], A[dst]
        for j in range(n):
            if rs[j] != zero:
                rd[j] = R.sub(rd[j], R.mul(q, rs[j]))
        if U is not None:
            us, ud = U[src], U[dst]
            for j in range(m):
                if us[j] != zero:
                    ud[j] = R.sub(ud[j], R.mul(q, us[j]))

    def col_axpy(dst, src, q):
        """col_dst -= q * col_src."""
        for row in A:
            if row[src] != zero:
                row[dst] = R.sub(row[dst], R.mul(q, row[src]))
        if V is not None:
            for row in V:
                if row[src] != zero:
                    row[dst] = R.sub(row[dst], R.mul(q, row[src]))

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            if U is not None:
                U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            if V is not None:
                for row in V:
                    row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        best = None
        for j in range(t, n):
            for i in range(t, m):
                if A[i][j] != zero:
                    key = (R.norm(A[i][j]), j, i)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        swap_cols(t, best[1])
        swap_rows(t, best[2])
        while True:
            # move the smallest entry of row t / column t to the corner
            best = (R.norm(A[t][t]), 0, t, t)
            for i in range(t + 1, m):
                if A[i][t] != zero:
                    best = min(best, (R.norm(A[i][t]), 1, i, t))
            for j in range(t + 1, n):
                if A[t][j] != zero:
                    best = min(best, (R.norm(A[t][j]), 2, t, j))
            swap_rows(t, best[2])
            swap_cols(t, best[3])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t] != zero:
                    q, r = R.divmod(A[i][t], p)
                    row_axpy(i, t, q)
                    if r != zero:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j] != zero:
                    q, r = R.divmod(A[t][j], p)
                    col_axpy(j, t, q)
                    if r != zero:
                        clean = False
            if not clean:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] != zero and R.divmod(A[i][j], p)[1] != zero:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_axpy(t, bad, R.neg(R.one))
        u = R.unit_inverse(R.unit_part(A[t][t]))
        if u != R.one:
            A[t] = [R.mul(u, x) for x in A[t]]
            if U is not None:
                U[t] = [R.mul(u, x) for x in U[t]]
        t += 1
    diag = tuple(A[i][i] for i in range(min(m, n)))
    rk = sum(1 for d in diag if d != zero)
    if verify and U is not None and V is not None and m and n:
        D = matmul(R, matmul(R, U, matrix), V)
        if D != A:
            raise ArithmeticError("Smith transforms do not reproduce the diagonal form")
    return SmithForm(diag, tuple(map(tuple, U)) if U is not None else None,
                     tuple(map(tuple, V)) if V is not None else None, rk)


# ---------------------------------------------------------------------------
# Invariant factors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantFactors:
    """Chain q_0, ..., q_{d-1}, largest first, each dividing its predecessor."""

    ring: object
    chain: tuple

    def __post_init__(self):
        R = self.ring
        for q in self.chain:
            if q == R.zero or R.is_unit(q) or R.canonical(q) != q:
                raise ValueError(f"invalid invariant factor {R.fmt(q)}")
        for a, b in zip(self.chain, self.chain[1:]):
            if R.divmod(a, b)[1] != R.zero:
                raise ValueError(f"{R.fmt(b)} does not divide {R.fmt(a)}")

    @classmethod
    def from_diagonal(cls, R, diag) -> "InvariantFactors":
        """Canonical chain from arbitrary nonzero diagonal entries (units dropped)."""
        entries = [R.canonical(d) for d in diag]
        if any(d == R.zero for d in entries):
            raise NotFiniteLength("a zero invariant factor survives")
        # redistribute prime powers to obtain a divisibility chain
        per_prime: dict = {}
        for d in entries:
            if R.is_unit(d):
                continue
            for p, e in R.factor(d).items():
                per_prime.setdefault(p, []).append(e)
        return cls.from_prime_powers(R, per_prime)

    @classmethod
    def from_prime_powers(cls, R, per_prime: dict) -> "InvariantFactors":
        width = max((len(v) for v in per_prime.values()), default=0)
        chain = []
        for k in range(width):
            q = R.one
            for p in sorted(per_prime, key=repr):
                exps = sorted(per_prime[p], reverse=True)
                if k < len(exps):
                    for _ in range(exps[k]):
                        q = R.mul(q, p)
            chain.append(R.canonical(q))
        return cls(R, tuple(chain))

    @property
    def d(self) -> int:
        return len(self.chain)

    def length(self) -> int:
        return sum(self.ring.length(q) for q in self.chain)

    def prime_partitions(self) -> dict:
        """prime -> exponents, largest first."""
        out: dict = {}
        for q in self.chain:
            for p, e in self.ring.factor(q).items():
                out.setdefault(p, []).append(e)
        return {p: sorted(v, reverse=True) for p, v in out.items()}

    def embeds_in(self, other: "InvariantFactors") -> bool:
        """Whether a module with these invariant factors embeds in one with ``other``.

        For chains sorted largest first this is a_k | q_k for every k, with
        the shorter chain padded by units.
        """
        R = self.ring
        if self.d > other.d:
            return False
        return all(R.divmod(q, a)[1] == R.zero for a, q in zip(self.chain, other.chain))

    def embeds_in_per_prime(self, other: "InvariantFactors") -> bool:
        """The same test via exponent partitions, prime by prime."""
        mine, theirs = self.prime_partitions(), other.prime_partitions()
        for p, exps in mine.items():
            big = theirs.get(p, [])
            if len(exps) > len(big) or any(a > b for a, b in zip(exps, big)):
                return False
        return True

    def fmt(self) -> list[str]:
        return [self.ring.fmt(q) for q in self.chain]


def smith(matrix: Sequence[Sequence], R) -> tuple[InvariantFactors, SmithForm]:
    """Invariant factors of the module presented by ``matrix`` (rows are relations)."""
    ncols = len(matrix[0]) if matrix else 0
    sf = smith_form(matrix, R)
    if sf.rank < ncols:
        raise NotFiniteLength(f"presentation has {ncols - sf.rank} free summand(s)")
    nonunit = [R.canonical(d) for d in sf.diagonal if d != R.zero and not R.is_unit(d)]
    return InvariantFactors(R, tuple(reversed(nonunit))), sf


def length_of(f: InvariantFactors) -> int:
    return f.length()


# ---------------------------------------------------------------------------
# Modules with an endomorphism
# ---------------------------------------------------------------------------

class PidModuleWithEndo:
    def __init__(self, factors: InvariantFactors, endo: Sequence[Sequence] | None = None):
        self.factors = factors
        R = factors.ring
        self.ring = R
        d = factors.d
        if endo is None:
            endo = [[R.zero] * d for _ in range(d)]
        endo = [list(r) for r in endo]
        if len(endo) != d or any(len(r) != d for r in endo):
            raise IllFormedEndo(f"endomorphism must be {d} x {d}")
        q = factors.chain
        for i in range(d):
            for j in range(d):
                if R.divmod(R.mul(endo[i][j], q[i]), q[j])[1] != R.zero:
                    raise IllFormedEndo(
                        f"entry ({i},{j}) = {R.fmt(endo[i][j])} does not give a map "
                        f"R/({R.fmt(q[i])}) -> R/({R.fmt(q[j])})")
        self.endo = self._reduce(endo)

    @property
    def d(self):
        return self.factors.d

    def _reduce(self, mat):
        R = self.ring
        q = self.factors.chain
        return tuple(tuple(R.divmod(mat[i][j], q[j])[1] for j in range(self.d))
                     for i in range(self.d))

    def compose(self, F, G):
        """Matrix of F after G; with the row-to-column convention this is G F."""
        return self._reduce(matmul(self.ring, G, F))

    def identity(self):
        R = self.ring
        return self._reduce([[R.one if i == j else R.zero for j in range(self.d)]
                             for i in range(self.d)])

    def powers(self, count: int) -> list:
        out = [self.identity()]
        for _ in range(count - 1):
            out.append(self.compose(self.endo, out[-1]))
        return out

    def length(self) -> int:
        return self.factors.length()

    def moduli_rows(self):
        """Rows q_j e_(i,j) presenting P = sum_{i,j} R/(q_j) on d^2 coordinates."""
        R = self.ring
        d = self.d
        rows = []
        for i in range(d):
            for j in range(d):
                row = [R.zero] * (d * d)
                row[i * d + j] = self.factors.chain[j]
                rows.append(row)
        return rows

    def apply(self, vec):
        R = self.ring
        q = self.factors.chain
        out = []
        for j in range(self.d):
            acc = R.zero
            for i in range(self.d):
                acc = R.add(acc, R.mul(self.endo[i][j], vec[i]))
            out.append(R.divmod(acc, q[j])[1])
        return tuple(out)


def _flat(mat):
    return [x for row in mat for x in row]


def span_factors(mod: PidModuleWithEndo, elements: Sequence) -> InvariantFactors:
    """Invariant factors of the R-span of endomorphism matrices inside P."""
    R = mod.ring
    L = len(elements)
    if L == 0 or mod.d == 0:
        return InvariantFactors(R, ())
    S = [_flat(e) for e in elements] + mod.moduli_rows()
    sf = smith_form(S, R, want_v=False, verify=False)
    kernel = [row[:L] for row in sf.U[sf.rank:]]
    if not kernel:
        kernel = [[R.zero] * L]
    sf2 = smith_form(kernel, R, want_u=False, want_v=False, verify=False)
    if sf2.rank < L:
        raise ArithmeticError("span of endomorphisms is not of finite length")
    nonunit = [R.canonical(x) for x in sf2.diagonal if x != R.zero and not R.is_unit(x)]
    return InvariantFactors(R, tuple(reversed(nonunit)))


def quotient_length(mod: PidModuleWithEndo, elements: Sequence) -> int:
    """lt(P / span), read off the Smith form of the joint presentation."""
    R = mod.ring
    S = [_flat(e) for e in elements] + mod.moduli_rows()
    sf = smith_form(S, R, want_u=False, want_v=False, verify=False)
    return sum(R.length(x) for x in sf.diagonal if x != R.zero and not R.is_unit(x))


def in_span(mod: PidModuleWithEndo, target, elements: Sequence) -> bool:
    """Whether ``target`` lies in the R-span of ``elements`` inside P."""
    R = mod.ring
    S = [_flat(e) for e in elements] + mod.moduli_rows()
    sf = smith_form(S, R, want_u=False, want_v=True, verify=False)
    v = _flat(target)
    w = matmul(R, [v], [list(r) for r in sf.V])[0]
    for j, x in enumerate(w):
        dj = sf.diagonal[j] if j < len(sf.diagonal) else R.zero
        if dj == R.zero:
            if x != R.zero:
                return False
        elif R.divmod(x, dj)[1] != R.zero:
            return False
    return True


@dataclass(frozen=True)
class IdealChain:
    ring: object
    generators: tuple
    lengths: tuple
    bound: int

    def to_json(self):
        return {"generators": [self.ring.to_json(g) for g in self.generators],
                "lengths": list(self.lengths), "bound": self.bound}


def ideal_chain(mod: PidModuleWithEndo) -> IdealChain:
    """I_i = (q_i) for i < d and I_d = R, with the bound sum_{i<d} lt(R/I_i)."""
    R = mod.ring
    gens = tuple(mod.factors.chain) + (R.one,)
    lengths = tuple(R.length(q) for q in mod.factors.chain) + (0,)
    return IdealChain(R, gens, lengths, sum(lengths))


@dataclass(frozen=True)
class RtReport:
    ltA: int
    ltM: int
    holds: bool
    embedding: bool
    a_factors: InvariantFactors
    m_factors: InvariantFactors
    ideal_bound: int

    def to_json(self):
        R = self.m_factors.ring
        return {
            "ring": describe_ring(R),
            "factorsM": self.m_factors.fmt(),
            "factorsA": self.a_factors.fmt(),
            "ltA": self.ltA,
            "ltM": self.ltM,
            "holds": self.holds,
            "embedding": self.embedding,
            "idealBound": self.ideal_bound,
        }


def rt_verify(mod: PidModuleWithEndo) -> RtReport:
    """Length of the algebra generated by f against the length of M."""
    ltM = mod.length()
    powers = mod.powers(max(ltM, 1))
    a = span_factors(mod, powers)
    ltA = a.length()
    check = mod.d * ltM - quotient_length(mod, powers)
    if check != ltA:
        raise ArithmeticError(f"length mismatch for A: {ltA} vs {check}")
    chain = ideal_chain(mod)
    return RtReport(ltA, ltM, ltA <= ltM, a.embeds_in(mod.factors), a, mod.factors,
                    chain.bound)


def ch_check(mod: PidModuleWithEndo, n_gens: int | None = None) -> bool:
    """f^n in the R-span of 1, f, ..., f^(n-1) with n the number of generators."""
    n = mod.d if n_gens is None else n_gens
    if mod.d == 0:
        return True
    powers = mod.powers(n + 1)
    return in_span(mod, powers[n], powers[:n])


def random_factors(R, rng: random.Random, max_length: int = 6) -> InvariantFactors:
    """Random invariant factors with total length between 1 and ``max_length``."""
    target = rng.randint(1, max_length)
    primes = R.small_primes()
    per_prime: dict = {}
    used = 0
    while used < target:
        p = rng.choice(primes)
        lp = R.length(p)
        room = (target - used) // lp
        if room < 1:
            if all(R.length(q) > target - used for q in primes):
                break
            continue
        e = rng.randint(1, min(room, 3))
        per_prime.setdefault(p, []).append(e)
        used += e * lp
    return InvariantFactors.from_prime_powers(R, per_prime)


def random_endo(factors: InvariantFactors, rng: random.Random):
    """Uniformly chosen well-defined endomorphism matrix."""
    R = factors.ring
    q = factors.chain
    d = factors.d
    mat = []
    for i in range(d):
        row = []
        for j in range(d):
            # need q_j | m q_i: m must be a multiple of q_j / gcd(q_i, q_j)
            step = R.one if i <= j else R.divmod(q[j], q[i])[0]
            quotient_mod = R.divmod(q[j], step)[0]
            r = R.random_element(rng, quotient_mod)
            row.append(R.divmod(R.mul(step, r), q[j])[1])
        mat.append(row)
    return mat


def random_module(R, rng: random.Random, max_length: int = 6) -> PidModuleWithEndo:
    f = random_factors(R, rng, max_length)
    return PidModuleWithEndo(f, random_endo(f, rng))


def parse_factors(R, text: str) -> InvariantFactors:
    """Comma-separated invariant factors in any order; the chain is normalised."""
    items = [s for s in text.split(",") if s.strip()]
    values = [R.canonical(R.parse(s)) for s in items]
    inv = InvariantFactors.from_diagonal(R, values)
    return inv


def parse_matrix_literal(R, text: str, d: int):
    """``0`` for the zero map, ``1`` for the identity, else ``[[a,b],[c,d]]``."""
    t = text.strip()
    if t in ("0", "1"):
        one = R.one if t == "1" else R.zero
        return [[one if i == j else R.zero for j in range(d)] for i in range(d)]
    rows = re.findall(r"\[([^\[\]]*)\]", t)
    if not rows:
        raise ValueError(f"cannot parse matrix literal {text!r}")
    return [[R.parse(x) for x in row.split(",")] for row in rows]


def endomorphism_factors(m) -> InvariantFactors:
    """Invariant factors of k^n as a k[x]-module with x acting by the square matrix ``m``.

    The presentation has relations x e_j - sum_i m_ij e_i, i.e. xI - m^T.
    """
    R = PolyRing(m.field)
    n = m.nrows
    rows = []
    for j in range(n):
        row = []
        for i in range(n):
            entry = R.make([-m[i, j]])
            if i == j:
                entry = R.add(entry, R.make([0, 1]))
            row.append(entry)
        rows.append(row)
    if n == 0:
        return InvariantFactors(R, ())
    return smith(rows, R)[0]
