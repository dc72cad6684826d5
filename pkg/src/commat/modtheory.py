"""Finite-length modules over commutative local Artinian algebras.

A :class:`LocalAlgebra` is given by structure constants in a basis whose first
element is 1 and whose remaining elements span the maximal ideal m.  A
:class:`ModuleOverLocal` is a representation: one matrix per basis element.
Since the residue field is the base field, lengths are k-dimensions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterator, Sequence

from .algebra import CommutingAction, generate_algebra, monomial_str
from .errors import (BudgetExceeded, DimensionMismatch, IdealsIntersect, LengthTooLarge,
                     NotFaithful, NotIsomorphic, NotLocal)
from .exactlin import (EchelonBasis, FieldSpec, Matrix, Subspace, inverse, kernel_of, rank,
                       random_invertible, solve)

ASSOCIATIVITY_CHECK_LIMIT = 20


def _unit(field, n, i):
    v = [field.zero] * n
    v[i] = field.one
    return tuple(v)


class LocalAlgebra:
    """Commutative local algebra b_i b_j = sum_k c[i][j][k] b_k with b_0 = 1."""

    def __init__(self, field: FieldSpec, labels: Sequence[str], table, *, name: str | None = None,
                 check: bool = True):
        self.field = field
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        self.name = name
        self.table = tuple(tuple(tuple(field(x) for x in c) for c in row) for row in table)
        if len(self.table) != self.dim or any(len(r) != self.dim for r in self.table):
            raise DimensionMismatch("structure constant table has the wrong shape")
        self._left = None
        self._gens = None
        self._powers = None
        self._presentation = None
        if check:
            self.validate()

    # -- construction ---------------------------------------------------------
    @classmethod
    def from_generated(cls, ga, name: str | None = None) -> "LocalAlgebra":
        """The algebra of a :class:`GeneratedAlgebra` with nilpotent generators."""
        n = ga.action.dim
        for nm, g in zip(ga.names, ga.action.gens):
            if not (g ** n).is_zero():
                raise NotLocal(f"generator {nm!r} is not nilpotent")
        return cls(ga.field, ga.label_strings(), ga.structure_constants(), name=name,
                   check=ga.dim <= ASSOCIATIVITY_CHECK_LIMIT)

    @classmethod
    def monomial_quotient(cls, field: FieldSpec, names: Sequence[str],
                          keep: Callable[[tuple], bool], max_exp: int, name: str | None = None):
        """k[names] modulo the monomials failing ``keep``.

        ``keep`` must describe an order ideal: if it accepts a monomial it
        accepts all divisors.  Basis order is by degree, then by decreasing
        exponent of earlier variables (so s^2 comes before st before t^2).
        """
        nv = len(names)
        exps = [e for e in itertools.product(range(max_exp + 1), repeat=nv) if keep(e)]
        exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        if not exps or any(exps[0]):
            raise NotLocal("the quotient must keep the monomial 1")
        index = {e: i for i, e in enumerate(exps)}
        d = len(exps)
        zero = (field.zero,) * d
        table = []
        for e in exps:
            row = []
            for f in exps:
                s = tuple(x + y for x, y in zip(e, f))
                row.append(_unit(field, d, index[s]) if s in index else zero)
            table.append(row)
        labels = [monomial_str(e, names) for e in exps]
        alg = cls(field, labels, table, name=name, check=d <= ASSOCIATIVITY_CHECK_LIMIT)
        alg.exponents = tuple(exps)
        alg.variables = tuple(names)
        return alg

    # -- validation -----------------------------------------------------------
    def validate(self):
        field, d, c = self.field, self.dim, self.table
        for j in range(d):
            e = _unit(field, d, j)
            if c[0][j] != e or c[j][0] != e:
                raise NotLocal("basis[0] is not a unit element")
        for i in range(d):
            for j in range(i + 1, d):
                if c[i][j] != c[j][i]:
                    raise NotLocal(f"not commutative: {self.labels[i]} * {self.labels[j]}")
        for i in range(1, d):
            for j in range(1, d):
                if c[i][j][0]:
                    raise NotLocal("span(basis[1:]) is not an ideal")
        if self.radical_power(d).dim:
            raise NotLocal("span(basis[1:]) is not nilpotent")
        if d <= ASSOCIATIVITY_CHECK_LIMIT:
            L = self.left_matrices()
            for i in range(1, d):
                for j in range(i, d):
                    lhs = L[i] @ L[j]
                    rhs = self._combine(L, c[i][j])
                    if lhs != rhs:
                        raise NotLocal("structure constants are not associative")

    def _combine(self, mats, coords):
        acc = Matrix.zeros(self.field, mats[0].nrows, mats[0].ncols)
        for x, m in zip(coords, mats):
            if x:
                acc = acc + m.scale(x)
        return acc

    # -- arithmetic -----------------------------------------------------------
    def mul(self, u: Sequence, v: Sequence) -> tuple:
        field = self.field
        p = field.characteristic
        out = [0] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            row = self.table[i]
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, x in enumerate(row[j]):
                    if x:
                        out[k] += ab * x
        return tuple(field(x % p if p else x) for x in out)

    def left_matrices(self) -> tuple:
        """Regular representation: column j of L_i holds the coordinates of b_i b_j."""
        if self._left is None:
            d = self.dim
            self._left = tuple(
                Matrix(self.field, zip(*self.table[i]), d, _normalised=True) for i in range(d))
        return self._left

    def left_matrix(self, element: Sequence) -> Matrix:
        return self._combine(self.left_matrices(), element)

    def unit_vector(self, i: int) -> tuple:
        return _unit(self.field, self.dim, i)

    @property
    def one(self):
        return self.unit_vector(0)

    # -- ideals ---------------------------------------------------------------
    def radical(self) -> Subspace:
        return Subspace.span(self.field, self.dim, (self.unit_vector(i) for i in range(1, self.dim)))

    def ideal_generated(self, elements: Sequence[Sequence]) -> Subspace:
        L = self.left_matrices()
        vecs = [m.apply(e) for e in elements for m in L]
        return Subspace.span(self.field, self.dim, vecs)

    def is_ideal(self, s: Subspace) -> bool:
        L = self.left_matrices()
        return all(L[i].apply(v) in s for i in self.generator_indices for v in s.basis)

    def radical_power(self, k: int) -> Subspace:
        """m^k as a subspace of A (m^0 = A)."""
        if self._powers is None:
            powers = [Subspace.full(self.field, self.dim), self.radical()]
            L = self.left_matrices()
            while powers[-1].dim:
                prev = powers[-1]
                vecs = [L[i].apply(v) for i in range(1, self.dim) for v in prev.basis]
                nxt = Subspace.span(self.field, self.dim, vecs)
                if nxt == prev:
                    break
                powers.append(nxt)
                if len(powers) > self.dim + 2:
                    break
            self._powers = powers
        if k < len(self._powers):
            return self._powers[k]
        last = self._powers[-1]
        if last.dim:
            return last
        return Subspace.zero(self.field, self.dim)

    def loewy_length(self) -> int:
        k = 0
        while self.radical_power(k).dim:
            k += 1
        return k

    @property
    def generator_indices(self) -> tuple:
        """Basis indices whose elements form a minimal generating set of m (mod m^2)."""
        if self._gens is None:
            m2 = self.radical_power(2)
            chosen = []
            current = m2
            for i in range(1, self.dim):
                e = self.unit_vector(i)
                if e not in current:
                    chosen.append(i)
                    current = current + Subspace.span(self.field, self.dim, [e])
            self._gens = tuple(chosen)
        return self._gens

    @property
    def embedding_dimension(self) -> int:
        """lt(m/m^2): the minimal number of generators of m."""
        return self.radical_power(1).dim - self.radical_power(2).dim

    def element_annihilator(self, element: Sequence) -> Subspace:
        return kernel_of(self.left_matrix(element))

    def regular_module(self) -> "ModuleOverLocal":
        return ModuleOverLocal(self, self.left_matrices(), check=False)

    def socle(self) -> Subspace:
        return self.regular_module().socle()

    def socle_length(self) -> int:
        return self.socle().dim

    def is_frobenius(self) -> bool:
        return self.socle_length() == 1

    def presentation(self):
        """Generator monomials and defining relations, read off the regular representation.

        Returns ``(ga, transfer)`` where ``ga`` is the algebra generated by the
        left multiplications of the generators and ``transfer`` expresses each
        basis element of this algebra in ga's monomial basis.
        """
        if self._presentation is None:
            L = self.left_matrices()
            names = tuple(self.labels[i] for i in self.generator_indices)
            act = CommutingAction(self.field, self.dim, names,
                                  tuple(L[i] for i in self.generator_indices))
            ga = generate_algebra(act)
            if ga.dim != self.dim:
                raise NotLocal("generators do not generate the algebra")
            # column k of T: coordinates (in this basis) of the k-th monomial
            T = Matrix(self.field, zip(*(b.column(0) for b in ga.basis)), ga.dim)
            self._presentation = (ga, inverse(T))
        return self._presentation

    def __repr__(self):
        tag = f" {self.name}" if self.name else ""
        return f"LocalAlgebra{tag}(dim={self.dim}, over {self.field})"


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _total_degree_below(n):
    return lambda e: sum(e) < n


PRESETS: dict[str, tuple[str, Callable[[FieldSpec], LocalAlgebra]]] = {
    "s2": ("k[s]/(s^2)", lambda F: LocalAlgebra.monomial_quotient(
        F, "s", lambda e: e[0] < 2, 2, "s2")),
    "s3": ("k[s]/(s^3)", lambda F: LocalAlgebra.monomial_quotient(
        F, "s", lambda e: e[0] < 3, 3, "s3")),
    "s4": ("k[s]/(s^4)", lambda F: LocalAlgebra.monomial_quotient(
        F, "s", lambda e: e[0] < 4, 4, "s4")),
    "st2": ("k[s,t]/(s,t)^2 = k[s,t]/(s^2,st,t^2)", lambda F: LocalAlgebra.monomial_quotient(
        F, "st", _total_degree_below(2), 2, "st2")),
    "s2t2": ("k[s,t]/(s^2,t^2)", lambda F: LocalAlgebra.monomial_quotient(
        F, "st", lambda e: max(e) < 2, 2, "s2t2")),
    "s3_st_t2": ("k[s,t]/(s^3,st,t^2)", lambda F: LocalAlgebra.monomial_quotient(
        F, "st", lambda e: (e[0] < 3 and e[1] == 0) or (e[0] == 0 and e[1] < 2), 3, "s3_st_t2")),
    "stu2": ("k[s,t,u]/(s,t,u)^2", lambda F: LocalAlgebra.monomial_quotient(
        F, "stu", _total_degree_below(2), 2, "stu2")),
    "st3": ("k[s,t]/(s,t)^3", lambda F: LocalAlgebra.monomial_quotient(
        F, "st", _total_degree_below(3), 3, "st3")),
}


def preset(name: str, field: FieldSpec) -> LocalAlgebra:
    from .errors import UnknownFamily
    if name not in PRESETS:
        raise UnknownFamily(name)
    return PRESETS[name][1](field)


def square_zero(field: FieldSpec, d: int) -> LocalAlgebra:
    """k + m with m^2 = 0 and lt(m) = d."""
    names = [f"t{i + 1}" for i in range(d)] if d > 3 else "stu"[:d]
    return LocalAlgebra.monomial_quotient(field, names, _total_degree_below(2), 2,
                                          f"square_zero({d})")


def frobenius(field: FieldSpec, ns: Sequence[int]) -> LocalAlgebra:
    """k[t_1..t_r]/(t_i^(n_i+1)); its socle is spanned by the product of t_i^n_i."""
    if not ns or any(n < 1 for n in ns):
        raise ValueError("frobenius needs positive exponents")
    names = [f"t{i + 1}" for i in range(len(ns))]
    return LocalAlgebra.monomial_quotient(
        field, names, lambda e: all(x <= n for x, n in zip(e, ns)), max(ns),
        "frobenius(" + ",".join(map(str, ns)) + ")")


def st_power(field: FieldSpec, n: int) -> LocalAlgebra:
    """k[s,t]/(s,t)^n, whose socle is spanned by the monomials of degree n - 1."""
    if n < 1:
        raise ValueError("st_power needs n >= 1")
    return LocalAlgebra.monomial_quotient(field, "st", _total_degree_below(n), max(n - 1, 0),
                                          f"st_power({n})")


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------

class ModuleOverLocal:
    """A representation of a :class:`LocalAlgebra` on k^dim."""

    def __init__(self, algebra: LocalAlgebra, action: Sequence[Matrix], *, check: bool = True):
        self.algebra = algebra
        self.action = tuple(action)
        if len(self.action) != algebra.dim:
            raise DimensionMismatch("need one action matrix per algebra basis element")
        self.dim = self.action[0].nrows
        self.field = algebra.field
        if check:
            self.validate()

    @classmethod
    def from_generated(cls, ga, algebra: LocalAlgebra | None = None) -> "ModuleOverLocal":
        """The module M of a generated algebra, acted on by its own basis."""
        if algebra is None:
            algebra = LocalAlgebra.from_generated(ga)
        return cls(algebra, ga.basis, check=False)

    def validate(self):
        A = self.algebra
        if self.action[0] != Matrix.identity(self.field, self.dim):
            raise ValueError("the unit does not act as the identity")
        for i in range(A.dim):
            for j in range(i, A.dim):
                lhs = self.action[i] @ self.action[j]
                if lhs != A._combine(self.action, A.table[i][j]):
                    raise ValueError(
                        f"action is not multiplicative on {A.labels[i]} * {A.labels[j]}")

    @property
    def generator_matrices(self) -> tuple:
        return tuple(self.action[i] for i in self.algebra.generator_indices)

    def act(self, element: Sequence, vec: Sequence) -> tuple:
        return self.algebra._combine(self.action, element).apply(vec)

    # -- submodules -----------------------------------------------------------
    def radical(self) -> Subspace:
        """mM, spanned by the images of the generators of m."""
        vecs = [col for g in self.generator_matrices for col in g.transpose().rows]
        return Subspace.span(self.field, self.dim, vecs)

    def radical_lengths(self) -> list[int]:
        """dim m^k M for k = 0, 1, ... until it vanishes."""
        out = [self.dim]
        current = Subspace.full(self.field, self.dim)
        gens = self.generator_matrices
        while current.dim:
            nxt = Subspace.span(self.field, self.dim,
                                (g.apply(v) for g in gens for v in current.basis))
            if nxt.dim == current.dim:
                break
            out.append(nxt.dim)
            current = nxt
        return out

    def socle(self) -> Subspace:
        gens = self.generator_matrices
        if not gens:
            return Subspace.full(self.field, self.dim)
        stacked = Matrix(self.field, (r for g in gens for r in g.rows), self.dim,
                         _normalised=True)
        return kernel_of(stacked)

    def min_generators(self) -> int:
        return self.dim - self.radical().dim

    def socle_length(self) -> int:
        return self.socle().dim

    def is_cyclic(self) -> bool:
        return self.min_generators() == 1

    def is_cocyclic(self) -> bool:
        return self.socle_length() == 1

    def submodule_generated(self, vectors: Sequence[Sequence]) -> Subspace:
        return Subspace.span(self.field, self.dim,
                             [m.apply(v) for v in vectors for m in self.action])

    def is_submodule(self, s: Subspace) -> bool:
        return all(g.apply(v) in s for g in self.generator_matrices for v in s.basis)

    def restrict(self, sub: Subspace) -> "ModuleOverLocal":
        """The submodule ``sub`` with basis sub.basis."""
        piv = sub.pivots
        mats = []
        for m in self.action:
            cols = [tuple(m.apply(w)[p] for p in piv) for w in sub.basis]
            mats.append(Matrix(self.field, zip(*cols), sub.dim, _normalised=True)
                        if cols else Matrix.zeros(self.field, 0, 0))
        return ModuleOverLocal(self.algebra, mats, check=False)

    def quotient(self, sub: Subspace) -> "ModuleOverLocal":
        """M/sub with basis the images of the unit vectors off the pivots of ``sub``."""
        comp = sub.complement_indices()
        mats = []
        for m in self.action:
            cols = [sub.quotient_coordinates(m.column(c)) for c in comp]
            mats.append(Matrix(self.field, zip(*cols), len(comp), _normalised=True)
                        if cols else Matrix.zeros(self.field, 0, 0))
        return ModuleOverLocal(self.algebra, mats, check=False)

    def quotient_map(self, sub: Subspace) -> Matrix:
        comp = sub.complement_indices()
        cols = [sub.quotient_coordinates(_unit(self.field, self.dim, j)) for j in range(self.dim)]
        return Matrix(self.field, zip(*cols), self.dim, _normalised=True) if comp else \
            Matrix.zeros(self.field, 0, self.dim)

    # -- annihilators ---------------------------------------------------------
    def annihilator(self) -> Subspace:
        """{a in A : a M = 0} in algebra coordinates."""
        if self.dim == 0:
            return Subspace.full(self.field, self.algebra.dim)
        cols = [m.entries for m in self.action]
        return kernel_of(Matrix(self.field, zip(*cols), self.algebra.dim, _normalised=True))

    def is_faithful(self) -> bool:
        return self.annihilator().dim == 0

    def element_annihilator(self, vec: Sequence) -> Subspace:
        cols = [m.apply(vec) for m in self.action]
        return kernel_of(Matrix(self.field, zip(*cols), self.algebra.dim, _normalised=True))

    # -- constructions --------------------------------------------------------
    def dual(self) -> "ModuleOverLocal":
        """Hom_k(M, k): the transposed action."""
        return ModuleOverLocal(self.algebra, [m.transpose() for m in self.action], check=False)

    def direct_sum(self, other: "ModuleOverLocal") -> "ModuleOverLocal":
        if other.algebra is not self.algebra:
            raise DimensionMismatch("direct sum of modules over different algebras")
        return ModuleOverLocal(self.algebra, [Matrix.block_diagonal(self.field, [a, b])
                                              for a, b in zip(self.action, other.action)],
                               check=False)

    def conjugate(self, P: Matrix) -> "ModuleOverLocal":
        Pinv = inverse(P)
        return ModuleOverLocal(self.algebra, [Pinv @ m @ P for m in self.action], check=False)

    def invariants(self) -> dict:
        return {
            "dim": self.dim,
            "minGenerators": self.min_generators(),
            "socleLength": self.socle_length(),
            "radicalLengths": self.radical_lengths(),
        }

    def __repr__(self):
        return f"ModuleOverLocal(dim={self.dim}, over {self.algebra!r})"


@dataclass(frozen=True)
class ActionInvariants:
    """Invariants of M read off from nilpotent commuting generators alone."""

    dim: int
    radical_lengths: tuple
    min_generators: int
    socle_length: int

    @property
    def is_cyclic(self):
        return self.min_generators == 1

    @property
    def is_cocyclic(self):
        return self.socle_length == 1


def action_invariants(action: CommutingAction) -> ActionInvariants:
    """Radical series, top and socle of M without building the algebra table.

    Valid when every generator is nilpotent, since then m is the ideal they
    generate and mM is the sum of their images.
    """
    F, n, gens = action.field, action.dim, action.gens
    lengths = [n]
    current = Subspace.full(F, n)
    while current.dim:
        nxt = Subspace.span(F, n, (g.apply(v) for g in gens for v in current.basis))
        if nxt.dim == current.dim:
            raise NotLocal("the generators are not nilpotent")
        lengths.append(nxt.dim)
        current = nxt
    if gens:
        stacked = Matrix(F, (r for g in gens for r in g.rows), n, _normalised=True)
        soc = kernel_of(stacked).dim
    else:
        soc = n
    top = n - (lengths[1] if len(lengths) > 1 else 0)
    return ActionInvariants(n, tuple(lengths), top, soc)


def dual_module(m: ModuleOverLocal) -> ModuleOverLocal:
    return m.dual()


def cyclic_module(A: LocalAlgebra, ideal: Subspace) -> ModuleOverLocal:
    """A/I."""
    return A.regular_module().quotient(ideal)


def hom_space(M: ModuleOverLocal, N: ModuleOverLocal) -> list[Matrix]:
    """A basis of Hom_A(M, N) as N.dim x M.dim matrices."""
    field = M.field
    m, n = M.dim, N.dim
    if m == 0 or n == 0:
        return []
    # unknown X (n x m), row-major; equations X g_M - g_N X = 0
    rows = []
    for gM, gN in zip(M.generator_matrices, N.generator_matrices):
        for i in range(n):
            for j in range(m):
                row = [field.zero] * (n * m)
                for k in range(m):
                    if gM[k, j]:
                        row[i * m + k] = field(row[i * m + k] + gM[k, j])
                for k in range(n):
                    if gN[i, k]:
                        row[k * m + j] = field(row[k * m + j] - gN[i, k])
                rows.append(row)
    if not rows:
        ker = Subspace.full(field, n * m)
    else:
        ker = kernel_of(Matrix(field, rows, n * m, _normalised=True))
    return [Matrix.from_flat(field, n, m, v) for v in ker.basis]


# ---------------------------------------------------------------------------
# Gluing two cyclic modules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GlueSpec:
    I1: Subspace
    I2: Subspace
    J1: Subspace
    J2: Subspace
    iso: Matrix | None = None


@dataclass(frozen=True)
class GlueResult:
    module: ModuleOverLocal
    lengths: dict
    faithful: bool
    inequality_holds: bool


def _sub_coset_basis(A, I, J):
    """Echelon basis of J/I inside A/I, in A/I coordinates."""
    return Subspace.span(A.field, A.dim - I.dim, (I.quotient_coordinates(v) for v in J.basis))


def _restricted_action(Q: ModuleOverLocal, S: Subspace):
    return [Q.restrict(S).action[i] for i in Q.algebra.generator_indices]


def glue(A: LocalAlgebra, spec: GlueSpec) -> GlueResult:
    """(A/I1 + A/I2) modulo the graph {(u, -iso u) : u in J1/I1}.

    ``iso`` maps coordinates in the echelon basis of J1/I1 to coordinates in
    the echelon basis of J2/I2 (column convention).
    """
    field = A.field
    for nm, s in (("I1", spec.I1), ("I2", spec.I2), ("J1", spec.J1), ("J2", spec.J2)):
        if not A.is_ideal(s):
            raise ValueError(f"{nm} is not an ideal")
    if not (spec.I1 <= spec.J1 and spec.I2 <= spec.J2):
        raise ValueError("need I1 inside J1 and I2 inside J2")
    if (spec.I1 & spec.I2).dim:
        raise IdealsIntersect("I1 and I2 have nonzero intersection")
    Q1 = cyclic_module(A, spec.I1)
    Q2 = cyclic_module(A, spec.I2)
    S1 = _sub_coset_basis(A, spec.I1, spec.J1)
    S2 = _sub_coset_basis(A, spec.I2, spec.J2)
    r = S1.dim
    if S2.dim != r:
        raise NotIsomorphic(f"J1/I1 has length {r} but J2/I2 has length {S2.dim}")
    iso = spec.iso if spec.iso is not None else Matrix.identity(field, r)
    if r:
        if iso.shape != (r, r) or rank(iso) != r:
            raise NotIsomorphic("iso is not an invertible map J1/I1 -> J2/I2")
        for R1, R2 in zip(_restricted_action(Q1, S1), _restricted_action(Q2, S2)):
            if iso @ R1 != R2 @ iso:
                raise NotIsomorphic("iso does not commute with the algebra action")
    total = Q1.direct_sum(Q2)
    graph = []
    for k in range(r):
        u = S1.basis[k]
        image = [field.zero] * Q2.dim
        for l in range(r):
            c = iso[l, k]
            if c:
                image = [field(x - c * y) for x, y in zip(image, S2.basis[l])]
        graph.append(tuple(u) + tuple(image))
    D = Subspace.span(field, total.dim, graph)
    M = total.quotient(D)
    lengths = {
        "A": A.dim,
        "A/I1": Q1.dim,
        "A/I2": Q2.dim,
        "J1/I1": r,
        "M": M.dim,
    }
    return GlueResult(M, lengths, M.is_faithful(), M.dim < A.dim)


def cyclic_identification(A: LocalAlgebra, I1: Subspace, a: Sequence, I2: Subspace,
                          b: Sequence) -> GlueSpec:
    """GlueSpec identifying A(a mod I1) with A(b mod I2) via x a -> x b."""
    field = A.field
    J1 = I1 + A.ideal_generated([a])
    J2 = I2 + A.ideal_generated([b])
    S1 = _sub_coset_basis(A, I1, J1)
    S2 = _sub_coset_basis(A, I2, J2)
    L = A.left_matrices()
    # phi_i : A -> A/I_i, x -> x a ; columns indexed by basis of A
    phi1 = Matrix(field, zip(*(I1.quotient_coordinates(L[j].apply(a)) for j in range(A.dim))),
                  A.dim) if A.dim - I1.dim else None
    phi2 = Matrix(field, zip(*(I2.quotient_coordinates(L[j].apply(b)) for j in range(A.dim))),
                  A.dim) if A.dim - I2.dim else None
    if phi1 is None or phi2 is None:
        raise NotIsomorphic("cannot identify inside a zero quotient")
    if kernel_of(phi1) != kernel_of(phi2):
        raise NotIsomorphic("the two elements have different annihilators")
    r = S1.dim
    cols = []
    for k in range(r):
        x = solve(phi1, S1.basis[k])
        cols.append(S2.coordinates(phi2.apply(x)))
    iso = Matrix(field, zip(*cols), r) if r else Matrix.zeros(field, 0, 0)
    return GlueSpec(I1, I2, J1, J2, iso)


# ---------------------------------------------------------------------------
# Decompositions
# ---------------------------------------------------------------------------

@dataclass
class DecompositionReport:
    kind: str
    pieces: list
    modules: list
    certificates: list
    details: dict = dc_field(default_factory=dict)


def _lift(sub: Subspace, coords: Sequence, ambient: Sequence[Sequence]) -> tuple:
    """Vector of the ambient space with coordinates ``coords`` in the basis ``ambient``."""
    field = sub.field
    n = len(ambient[0]) if ambient else 0
    out = [field.zero] * n
    for c, v in zip(coords, ambient):
        if c:
            out = [field(x + c * y) for x, y in zip(out, v)]
    return tuple(out)


def lt3_decompose(M: ModuleOverLocal) -> DecompositionReport:
    """Split a module of length at most 3 into cyclic or into cocyclic summands.

    If M is neither cyclic nor cocyclic, a socle vector v outside mM spans a
    simple summand: any complement L of kv containing mM is a submodule and
    M = kv + L.  The recursion then runs on L.
    """
    if M.dim > 3:
        raise LengthTooLarge(f"module has length {M.dim} > 3")
    field = M.field
    if M.dim == 0:
        return DecompositionReport("SumOfCyclics", [], [], [])
    full = Subspace.full(field, M.dim)
    if M.is_cyclic():
        return DecompositionReport("SumOfCyclics", [full], [M], [])
    if M.is_cocyclic():
        return DecompositionReport("SumOfCocyclics", [full], [M], [])
    rad = M.radical()
    soc = M.socle()
    v = next((s for s in soc.basis if s not in rad), None)
    if v is None:
        raise ArithmeticError("no socle vector outside mM; the length bound was violated")
    N = Subspace.span(field, M.dim, [v])
    # complement of v in M/mM, lifted by unit vectors
    top = rad + N
    comp = [_unit(field, M.dim, c) for c in top.complement_indices()]
    L = Subspace.span(field, M.dim, list(rad.basis) + comp)
    sub = lt3_decompose(M.restrict(L))
    pieces = [N] + [Subspace.span(field, M.dim, (_lift(L, w, L.basis) for w in p.basis))
                    for p in sub.pieces]
    modules = [M.restrict(N)] + sub.modules
    kind = sub.kind if sub.pieces else "SumOfCyclics"
    return DecompositionReport(kind, pieces, modules, [v] + sub.certificates)


def sum_of_local_tops(M: ModuleOverLocal) -> DecompositionReport:
    """M as a sum of submodules A x with simple top, one per basis vector of M/mM.

    With residue field k the cyclic module A x already has a simple top, so
    no search for a minimal submodule is needed; the top dimension is asserted.
    """
    rad = M.radical()
    pieces, mods, gens = [], [], []
    for c in rad.complement_indices():
        x = _unit(M.field, M.dim, c)
        N = M.submodule_generated([x])
        sub = M.restrict(N)
        if sub.min_generators() != 1:
            raise ArithmeticError("cyclic piece without a simple top")
        pieces.append(N)
        mods.append(sub)
        gens.append(x)
    total = Subspace.zero(M.field, M.dim)
    for p in pieces:
        total = total + p
    if total.dim != M.dim:
        raise ArithmeticError("pieces do not span the module")
    return DecompositionReport("SumOfLocalTops", pieces, mods, gens)


def _essential_kernel(M: ModuleOverLocal, soc: Subspace, j: int) -> Subspace:
    field = M.field
    sj = soc.basis[j]
    N = Subspace.span(field, M.dim, [s for i, s in enumerate(soc.basis) if i != j])
    while True:
        Q = M.quotient(N)
        qs = Q.socle()
        if qs.dim <= 1:
            return N
        target = Subspace.span(field, Q.dim, [N.quotient_coordinates(sj)])
        u = next(w for w in qs.basis if w not in target)
        comp = N.complement_indices()
        lift = [field.zero] * M.dim
        for c, x in zip(comp, u):
            lift[c] = x
        N = N + Subspace.span(field, M.dim, [lift])


def subdirect_simple_socles(M: ModuleOverLocal) -> DecompositionReport:
    """Embed M into a product of quotients M/N_j, each with simple essential socle.

    For each socle line k s_j, N_j starts as the span of the other socle lines
    and is enlarged by lifts of socle vectors of M/N_j other than s_j until the
    socle of M/N_j is the line through s_j.
    """
    field = M.field
    soc = M.socle()
    kernels, factors = [], []
    for j in range(soc.dim):
        N = _essential_kernel(M, soc, j)
        kernels.append(N)
        factors.append(M.quotient(N))
    inter = Subspace.full(field, M.dim)
    for N in kernels:
        inter = inter & N
    if M.dim and inter.dim:
        raise ArithmeticError("subdirect kernels do not intersect in zero")
    return DecompositionReport("SubdirectSimpleSocles", kernels, factors,
                               list(soc.basis))


def product_map(M: ModuleOverLocal, kernels: Sequence[Subspace]) -> Matrix:
    """Stacked quotient maps M -> prod M/N_j."""
    rows = []
    for N in kernels:
        rows.extend(M.quotient_map(N).rows)
    if not rows:
        return Matrix.zeros(M.field, 0, M.dim)
    return Matrix(M.field, rows, M.dim, _normalised=True)


def _annihilator_in(A: LocalAlgebra, K: Subspace, M: ModuleOverLocal, target: Subspace):
    """{a in K : a M lies in target}."""
    if not K.dim:
        return K
    field = A.field
    # unknown coefficients c over K.basis ; condition: reduce(sum c rho(a) m_j) = 0
    cols = []
    for a in K.basis:
        rho = A._combine(M.action, a)
        col = []
        for j in range(M.dim):
            col.extend(target.reduce(rho.column(j)))
        cols.append(col)
    if not cols[0]:
        return K
    ker = kernel_of(Matrix(field, zip(*cols), K.dim, _normalised=True))
    vecs = [_lift(K, c, K.basis) for c in ker.basis]
    return Subspace.span(field, A.dim, vecs)


def faithful_small_subfactor(M: ModuleOverLocal) -> DecompositionReport:
    """Faithful submodule, quotient and subfactor with at most n generators / socle,
    where n is the length of the socle of A.

    Greedy: keep the part K of soc(A) that still annihilates the current
    candidate and add a local-top summand (or a subdirect factor) on which K
    acts nonzero; K shrinks strictly, so at most n steps are needed.
    """
    if not M.is_faithful():
        raise NotFaithful("the module is not faithful")
    A = M.algebra
    field = A.field
    socA = A.socle()
    n = socA.dim

    def greedy_sub(mod: ModuleOverLocal):
        tops = sum_of_local_tops(mod)
        K = socA
        chosen = []
        current = Subspace.zero(field, mod.dim)
        while K.dim:
            for idx, piece in enumerate(tops.pieces):
                if idx in chosen:
                    continue
                if _annihilator_in(A, K, mod.restrict(piece), Subspace.zero(field, piece.dim)).dim < K.dim:
                    break
            else:
                raise ArithmeticError("no local top escapes the socle annihilator")
            chosen.append(idx)
            current = current + tops.pieces[idx]
            K = _annihilator_in(A, socA, mod.restrict(current), Subspace.zero(field, current.dim))
        return current, [tops.certificates[i] for i in chosen]

    def greedy_quot(mod: ModuleOverLocal):
        sub = subdirect_simple_socles(mod)
        K = socA
        chosen = []
        P = Subspace.full(field, mod.dim)
        while K.dim:
            for idx, N in enumerate(sub.pieces):
                if idx in chosen:
                    continue
                if _annihilator_in(A, K, mod, N).dim < K.dim:
                    break
            else:
                raise ArithmeticError("no subdirect factor escapes the socle annihilator")
            chosen.append(idx)
            P = P & sub.pieces[idx]
            K = _annihilator_in(A, socA, mod, P)
        return P, chosen

    sub1, gens = greedy_sub(M)
    M1 = M.restrict(sub1)
    P, chosen = greedy_quot(M)
    M2 = M.quotient(P)
    P3, chosen3 = greedy_quot(M1)
    M3 = M1.quotient(P3)
    for mod in (M1, M2, M3):
        if not mod.is_faithful():
            raise ArithmeticError("greedy construction lost faithfulness")
    details = {
        "n": n,
        "subGenerators": len(gens),
        "quotientFactors": len(chosen),
        "subfactorFactors": len(chosen3),
    }
    return DecompositionReport("FaithfulSubfactor", [sub1, P, P3], [M1, M2, M3],
                               gens, details)


# ---------------------------------------------------------------------------
# Representation enumeration
# ---------------------------------------------------------------------------

def nilpotent_matrices(field: FieldSpec, d: int) -> list[Matrix]:
    """All nilpotent d x d matrices over a prime field, in lexicographic entry order."""
    if not field.is_finite:
        raise ValueError("enumeration needs a finite field")
    out = []
    for entries in itertools.product(field.elements(), repeat=d * d):
        m = Matrix.from_flat(field, d, d, entries)
        if (m ** d).is_zero():
            out.append(m)
    return out


@dataclass
class EnumerationStats:
    nodes: int = 0
    modules: int = 0
    faithful: int = 0
    exhaustive: bool = True


def enumerate_reps(A: LocalAlgebra, d: int, budget: int = 10 ** 7,
                   shard: tuple[int, int] | None = None,
                   stats: EnumerationStats | None = None) -> Iterator[ModuleOverLocal]:
    """All unital homomorphisms A -> End(k^d), i.e. all modules on k^d.

    Images of a minimal generating set of m are chosen among the nilpotent
    matrices by backtracking.  A partial choice is kept only if it commutes
    and satisfies every defining relation that mentions the chosen generators
    alone.  ``budget`` bounds the number of candidate checks; ``shard =
    (i, k)`` restricts the first generator to candidates with index = i mod k.
    """
    field = A.field
    if not field.is_finite:
        raise ValueError("enumerate_reps needs a prime field")
    stats = stats if stats is not None else EnumerationStats()
    ga, transfer = A.presentation()
    g = len(A.generator_indices)
    ident = Matrix.identity(field, d)
    if d == 0:
        raise ValueError("d must be positive")
    if g == 0:
        stats.modules += 1
        stats.faithful += int(A.dim == 1)
        yield ModuleOverLocal(A, [ident], check=False)
        return
    cands = nilpotent_matrices(field, d)
    labels = ga.labels
    # relations grouped by the last generator they mention
    def support_end(exps):
        return max((i for i, e in enumerate(exps) if e), default=-1)

    staged = [[] for _ in range(g)]
    for rel in ga.relations:
        end = support_end(rel.exponents)
        for c, lab in zip(rel.coordinates, labels):
            if c:
                end = max(end, support_end(lab))
        staged[end].append(rel)

    def monomial(chosen, exps):
        out = ident
        for X, e in zip(chosen, exps):
            if e:
                out = (X ** e) @ out
        return out

    def satisfies(chosen, rels):
        for rel in rels:
            lhs = monomial(chosen, rel.exponents)
            rhs = Matrix.zeros(field, d)
            for c, lab in zip(rel.coordinates, labels):
                if c:
                    rhs = rhs + monomial(chosen, lab).scale(c)
            if lhs != rhs:
                return False
        return True

    def rec(chosen):
        j = len(chosen)
        if j == g:
            mono = [monomial(chosen, lab) for lab in labels]
            action = []
            for t in range(A.dim):
                acc = Matrix.zeros(field, d)
                for k in range(A.dim):
                    c = transfer[k, t]
                    if c:
                        acc = acc + mono[k].scale(c)
                action.append(acc)
            mod = ModuleOverLocal(A, action, check=False)
            stats.modules += 1
            if mod.is_faithful():
                stats.faithful += 1
            yield mod
            return
        for idx, X in enumerate(cands):
            if j == 0 and shard is not None and idx % shard[1] != shard[0]:
                continue
            stats.nodes += 1
            if stats.nodes > budget:
                stats.exhaustive = False
                raise BudgetExceeded(f"enumeration budget of {budget} checks exhausted",
                                     partial=stats)
            if any(X @ Y != Y @ X for Y in chosen):
                continue
            nxt = chosen + [X]
            if satisfies(nxt, staged[j]):
                yield from rec(nxt)

    yield from rec([])


# ---------------------------------------------------------------------------
# Random modules
# ---------------------------------------------------------------------------

def random_ideal(A: LocalAlgebra, rng: random.Random, max_gens: int = 2) -> Subspace:
    """Ideal generated by a few random elements of m."""
    field = A.field
    gens = []
    for _ in range(rng.randint(1, max_gens)):
        v = [field.zero] + [field.random_element(rng) for _ in range(A.dim - 1)]
        gens.append(tuple(v))
    return A.ideal_generated(gens)


def random_faithful_module(A: LocalAlgebra, rng: random.Random, max_pieces: int = 3) -> ModuleOverLocal:
    """Random direct sum of modules A/I and (A/I)*, made faithful and then conjugated."""
    reg = A.regular_module()
    M = None
    for _ in range(rng.randint(1, max_pieces)):
        I = random_ideal(A, rng)
        piece = reg.quotient(I)
        if rng.random() < 0.5:
            piece = piece.dual()
        M = piece if M is None else M.direct_sum(piece)
    if not M.is_faithful():
        extra = reg if rng.random() < 0.5 else reg.dual()
        M = M.direct_sum(extra)
    P = random_invertible(M.field, M.dim, rng)
    return M.conjugate(P)
