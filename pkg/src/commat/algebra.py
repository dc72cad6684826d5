"""Unital algebras generated by commuting matrices.

The central routine is :func:`generate_algebra`, a breadth-first closure over
monomials in the generators.  Because the generators commute, a monomial is
identified with its exponent vector; the first exponent vector reaching a new
direction becomes the label of that basis element, and every rejected
monomial is kept as a relation expressed in the basis.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, NonCommuting
from .exactlin import EchelonBasis, FieldSpec, Matrix, Subspace, kernel_of


@dataclass(frozen=True)
class CommutingAction:
    """A vector space k^dim together with named, pairwise commuting endomorphisms."""

    field: FieldSpec
    dim: int
    names: tuple
    gens: tuple

    def generator(self, name: str) -> Matrix:
        return self.gens[self.names.index(name)]

    def __len__(self):
        return len(self.gens)

    def restrict_names(self, names: Sequence[str]) -> "CommutingAction":
        return CommutingAction(self.field, self.dim, tuple(names),
                               tuple(self.generator(n) for n in names))


def commutator_witness(g: Matrix, h: Matrix):
    """First basis column on which gh and hg differ, or None if they commute."""
    gh, hg = g @ h, h @ g
    if gh == hg:
        return None
    for j in range(g.ncols):
        if gh.column(j) != hg.column(j):
            return j
    return None  # pragma: no cover


def build_action(field: FieldSpec, matrices: Mapping[str, Matrix] | Iterable[tuple]) -> CommutingAction:
    """Validate and bundle named commuting matrices.

    Raises :class:`NonCommuting` naming the first failing pair together with
    a basis column on which the commutator is nonzero.
    """
    items = list(matrices.items()) if isinstance(matrices, Mapping) else list(matrices)
    names = tuple(n for n, _ in items)
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate generator names in {names}")
    gens = []
    dim = None
    for name, m in items:
        if not isinstance(m, Matrix):
            m = Matrix(field, m)
        if m.field != field:
            raise DimensionMismatch(f"generator {name!r} is over {m.field}, expected {field}")
        if not m.is_square():
            raise DimensionMismatch(f"generator {name!r} is not square")
        if dim is None:
            dim = m.nrows
        elif m.nrows != dim:
            raise DimensionMismatch(f"generator {name!r} has size {m.nrows}, expected {dim}")
        gens.append(m)
    if dim is None:
        raise ValueError("an action needs a dimension; pass at least one generator")
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            col = commutator_witness(gens[i], gens[j])
            if col is not None:
                raise NonCommuting((names[i], names[j]), col)
    return CommutingAction(field, dim, names, tuple(gens))


def trivial_action(field: FieldSpec, dim: int) -> CommutingAction:
    return CommutingAction(field, dim, (), ())


# ---------------------------------------------------------------------------
# Monomial labels
# ---------------------------------------------------------------------------

def monomial_str(exponents: Sequence[int], names: Sequence[str]) -> str:
    """Render an exponent vector, e.g. (2, 0, 1) over a, b, c as ``a^2c``."""
    if not any(exponents):
        return "1"
    sep = "" if all(len(n) == 1 for n in names) else "*"
    parts = []
    for e, n in zip(exponents, names):
        if not n.replace("_", "").isalnum():
            n = f"({n})"
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return sep.join(parts)


def _linear_combination_str(coords, labels, names):
    terms = []
    for c, lab in zip(coords, labels):
        if not c:
            continue
        mono = monomial_str(lab, names)
        if c == 1:
            terms.append(mono)
        elif mono == "1":
            terms.append(str(c))
        else:
            terms.append(f"{c}*{mono}")
    return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class Relation:
    """A rejected monomial together with its expansion in the algebra basis."""

    exponents: tuple
    coordinates: tuple

    def is_binomial(self):
        nz = [c for c in self.coordinates if c]
        return len(nz) == 1 and nz[0] == 1

    def is_zero(self):
        return not any(self.coordinates)


@dataclass(frozen=True)
class AnnihilatorReport:
    dim: int
    faithful: bool
    witness: Matrix | None
    subspace: Subspace


class GeneratedAlgebra:
    """The unital algebra spanned by monomials in the generators of an action."""

    def __init__(self, action: CommutingAction, basis, labels, relations, echelon):
        self.action = action
        self.basis: tuple = tuple(basis)
        self.labels: tuple = tuple(labels)
        self.relations: tuple = tuple(relations)
        self._echelon = echelon
        self._table = None

    @property
    def field(self):
        return self.action.field

    @property
    def dim(self):
        return len(self.basis)

    @property
    def names(self):
        return self.action.names

    def label_strings(self):
        return [monomial_str(lab, self.names) for lab in self.labels]

    def evaluate(self, exponents: Sequence[int]) -> Matrix:
        """The matrix of a monomial given by its exponent vector."""
        result = Matrix.identity(self.field, self.action.dim)
        for g, e in zip(self.action.gens, exponents):
            if e:
                result = (g ** e) @ result
        return result

    def coordinates(self, m: Matrix):
        """Coordinates of ``m`` in the basis, or None if ``m`` is outside the algebra."""
        return self._echelon.coordinates(m.entries)

    def __contains__(self, m: Matrix):
        return self.coordinates(m) is not None

    def element(self, coords: Sequence) -> Matrix:
        field = self.field
        n = self.action.dim
        acc = Matrix.zeros(field, n)
        for c, b in zip(coords, self.basis):
            if c:
                acc = acc + b.scale(c)
        return acc

    def structure_constants(self):
        """c[i][j] = coordinates of basis[i] @ basis[j]."""
        if self._table is None:
            table = []
            for bi in self.basis:
                row = []
                for bj in self.basis:
                    coords = self.coordinates(bi @ bj)
                    if coords is None:
                        raise ArithmeticError("basis product escaped the algebra")
                    row.append(coords)
                table.append(tuple(row))
            self._table = tuple(table)
        return self._table

    def relation_strings(self) -> list[str]:
        """Human-readable relations such as ``a^2 = bc`` or ``ab = 0``."""
        names = self.names
        out = []
        for rel in self.relations:
            lhs = rel.exponents
            if rel.is_binomial():
                j = next(i for i, c in enumerate(rel.coordinates) if c)
                rhs = self.labels[j]
                first, second = sorted(
                    (lhs, rhs),
                    key=lambda e: (sum(1 for x in e if x), tuple(-x for x in e)))
                out.append(f"{monomial_str(first, names)} = {monomial_str(second, names)}")
            else:
                rhs = _linear_combination_str(rel.coordinates, self.labels, names)
                out.append(f"{monomial_str(lhs, names)} = {rhs}")
        return out

    def nonzero_monomial_identities(self) -> list[str]:
        return [s for s, rel in zip(self.relation_strings(), self.relations) if not rel.is_zero()]

    def annihilator(self, subspace: Subspace | None = None) -> AnnihilatorReport:
        return annihilator(self, subspace)

    def to_local(self):
        from .modtheory import LocalAlgebra
        return LocalAlgebra.from_generated(self)

    def __repr__(self):
        return f"GeneratedAlgebra(dim={self.dim}, dimM={self.action.dim})"


def generate_algebra(action: CommutingAction, max_dim: int | None = None) -> GeneratedAlgebra:
    """Breadth-first monomial closure of the generators of ``action``.

    Survivors are multiplied by the generators in order; products are inserted
    into an incremental echelon basis over flattened matrices.  Monomials are
    visited in order of degree with generator order as tie-break, so every
    label is a shortest witness.
    """
    field = action.field
    n = action.dim
    g = len(action.gens)
    ident = Matrix.identity(field, n)
    ech = EchelonBasis(field)
    ech.insert(ident.entries)
    basis = [ident]
    zero_exp = (0,) * g
    labels = [zero_exp]
    relations = []
    seen = {zero_exp}
    queue = deque([0])
    limit = max_dim if max_dim is not None else n * n
    while queue:
        idx = queue.popleft()
        b = basis[idx]
        lab = labels[idx]
        for h, gen in enumerate(action.gens):
            exp = lab[:h] + (lab[h] + 1,) + lab[h + 1:]
            if exp in seen:
                continue
            seen.add(exp)
            prod = gen @ b
            new, coords = ech.insert(prod.entries)
            if new:
                basis.append(prod)
                labels.append(exp)
                queue.append(len(basis) - 1)
                if len(basis) > limit:
                    raise ArithmeticError("algebra dimension exceeded its bound")
            else:
                relations.append(Relation(exp, coords))
    return GeneratedAlgebra(action, basis, labels, relations, ech)


def cayley_hamilton_check(f: Matrix | CommutingAction, n_gens: int) -> bool:
    """True iff f^n_gens lies in the span of 1, f, ..., f^(n_gens - 1)."""
    if isinstance(f, CommutingAction):
        if len(f.gens) != 1:
            raise ValueError("cayley_hamilton_check expects a single generator")
        f = f.gens[0]
    field = f.field
    ech = EchelonBasis(field)
    power = Matrix.identity(field, f.nrows)
    for _ in range(n_gens):
        ech.insert(power.entries)
        power = f @ power
    return power.entries in ech


def annihilator(ga: GeneratedAlgebra, subspace: Subspace | None = None) -> AnnihilatorReport:
    """{x in A : x W = 0} for a subspace W of M (all of M when omitted).

    The annihilator is returned as a subspace of A in basis coordinates.
    """
    field = ga.field
    n = ga.action.dim
    if subspace is None:
        subspace = Subspace.full(field, n)
    if subspace.ambient_dim != n:
        raise DimensionMismatch("subspace does not live in the module")
    # one equation block per basis vector of W: sum_i c_i B_i w = 0
    cols = []
    for b in ga.basis:
        col = []
        for w in subspace.basis:
            col.extend(b.apply(w))
        cols.append(col)
    nrows = n * subspace.dim
    if nrows == 0:
        ker = Subspace.full(field, ga.dim)
    else:
        system = Matrix(field, zip(*cols), ga.dim)
        ker = kernel_of(system)
    witness = ga.element(ker.basis[0]) if ker.dim else None
    return AnnihilatorReport(ker.dim, ker.dim == 0, witness, ker)
