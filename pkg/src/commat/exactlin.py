"""Exact dense linear algebra over the rationals and prime fields.

Field elements are stored as plain Python values: ``fractions.Fraction`` for
the rationals and ``int`` residues in ``[0, p)`` for a prime field.  A
:class:`FieldSpec` knows how to normalise and invert them; matrices and
subspaces carry their field so mixed-field arithmetic is caught early.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The base field: ``characteristic == 0`` means Q, otherwise F_p."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or (p and (not is_prime(p) or p >= 2 ** 31)):
            raise ValueError(f"characteristic must be 0 or a prime below 2^31, got {p}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Accepts ``Q``, ``F2``, ``F 7``, ``GF(7)`` and ``F_7``."""
        t = text.strip().replace(" ", "").replace("_", "")
        if t.upper() in ("Q", "QQ"):
            return cls(0)
        up = t.upper()
        for prefix in ("GF(", "GF", "F"):
            if up.startswith(prefix):
                digits = up[len(prefix):].rstrip(")")
                if digits.isdigit():
                    return cls(int(digits))
        raise ValueError(f"unrecognised field {text!r} (expected Q or F<p>)")

    @property
    def kind(self) -> str:
        return "PrimeField" if self.characteristic else "Rationals"

    @property
    def is_finite(self) -> bool:
        return self.characteristic != 0

    @property
    def zero(self):
        return 0 if self.characteristic else Fraction(0)

    @property
    def one(self):
        return 1 if self.characteristic else Fraction(1)

    def __call__(self, x):
        p = self.characteristic
        if p:
            if isinstance(x, Fraction):
                if x.denominator % p == 0:
                    raise ZeroDivisionError(f"{x} has no image in F{p}")
                return x.numerator * pow(x.denominator, -1, p) % p
            return int(x) % p
        return Fraction(x)

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        p = self.characteristic
        if p:
            return pow(x, -1, p)
        return 1 / Fraction(x)

    def elements(self):
        if not self.characteristic:
            raise ValueError("Q is infinite")
        return range(self.characteristic)

    def random_element(self, rng: random.Random, bound: int = 5):
        p = self.characteristic
        if p:
            return rng.randrange(p)
        num = rng.randint(-bound, bound)
        return Fraction(num, rng.randint(1, bound))

    def __str__(self):
        return f"F{self.characteristic}" if self.characteristic else "Q"


QQ = FieldSpec(0)
GF2 = FieldSpec(2)


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field; supports the usual operators."""

    field: FieldSpec
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.field(self.value))

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise DimensionMismatch("scalars over different fields")
            return other.value
        return self.field(other)

    def __add__(self, other):
        return Scalar(self.field, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.value - self._coerce(other))

    def __rsub__(self, other):
        return Scalar(self.field, self._coerce(other) - self.value)

    def __mul__(self, other):
        return Scalar(self.field, self.value * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.value * self.field.inv(self._coerce(other)))

    def __neg__(self):
        return Scalar(self.field, -self.value)

    def __pow__(self, k: int):
        if k < 0:
            return Scalar(self.field, self.field.inv(self.value)) ** (-k)
        p = self.field.characteristic
        if p:
            return Scalar(self.field, pow(self.value, k, p))
        return Scalar(self.field, self.value ** k)

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.value))

    def __bool__(self):
        return bool(self.value)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field(other)
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"Scalar({self.field}, {self.value})"


class Matrix:
    """Immutable dense matrix over a :class:`FieldSpec`.

    Entries are normalised on construction.  ``rows`` is a tuple of tuples.
    Multiplication skips zero entries of the left factor, which keeps products
    of the 0/1 matrices coming from module diagrams cheap.
    """

    __slots__ = ("field", "rows", "ncols", "_hash")

    def __init__(self, field: FieldSpec, rows: Iterable[Sequence], ncols: int | None = None,
                 *, _normalised: bool = False):
        if _normalised:
            rows = tuple(rows)
        else:
            rows = tuple(tuple(field(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise DimensionMismatch("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged matrix rows")
        self.field = field
        self.rows = rows
        self.ncols = ncols
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, field, nrows, ncols=None):
        ncols = nrows if ncols is None else ncols
        z = field.zero
        return cls(field, ((z,) * ncols for _ in range(nrows)), ncols, _normalised=True)

    @classmethod
    def identity(cls, field, n):
        z, o = field.zero, field.one
        return cls(field, (tuple(o if i == j else z for j in range(n)) for i in range(n)),
                   n, _normalised=True)

    @classmethod
    def unit(cls, field, n, i, j):
        """The matrix unit e_ij (1-based indices, as in the usual notation)."""
        z, o = field.zero, field.one
        return cls(field, (tuple(o if (r, c) == (i - 1, j - 1) else z for c in range(n))
                           for r in range(n)), n, _normalised=True)

    @classmethod
    def from_flat(cls, field, nrows, ncols, entries):
        entries = list(entries)
        if len(entries) != nrows * ncols:
            raise DimensionMismatch("entry count does not match shape")
        return cls(field, (entries[i * ncols:(i + 1) * ncols] for i in range(nrows)), ncols)

    @classmethod
    def diagonal(cls, field, values):
        values = [field(v) for v in values]
        n = len(values)
        z = field.zero
        return cls(field, (tuple(values[i] if i == j else z for j in range(n)) for i in range(n)),
                   n, _normalised=True)

    @classmethod
    def block_diagonal(cls, field, blocks):
        n = sum(b.nrows for b in blocks)
        m = sum(b.ncols for b in blocks)
        out = [[field.zero] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.rows):
                out[r0 + i][c0:c0 + b.ncols] = row
            r0 += b.nrows
            c0 += b.ncols
        return cls(field, out, m, _normalised=True)

    # -- shape and access -----------------------------------------------------
    @property
    def nrows(self):
        return len(self.rows)

    @property
    def shape(self):
        return (len(self.rows), self.ncols)

    @property
    def entries(self):
        return tuple(x for r in self.rows for x in r)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def scalar(self, i, j) -> Scalar:
        return Scalar(self.field, self.rows[i][j])

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def is_zero(self):
        return not any(any(r) for r in self.rows)

    def is_square(self):
        return self.nrows == self.ncols

    # -- arithmetic -----------------------------------------------------------
    def _check_field(self, other):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.field != self.field:
            raise DimensionMismatch(f"matrices over {self.field} and {other.field}")

    def __add__(self, other):
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        p = self.field.characteristic
        if p:
            rows = (tuple((x + y) % p for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))
        else:
            rows = (tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return Matrix(self.field, rows, self.ncols, _normalised=True)

    def __neg__(self):
        p = self.field.characteristic
        if p:
            rows = (tuple(-x % p for x in r) for r in self.rows)
        else:
            rows = (tuple(-x for x in r) for r in self.rows)
        return Matrix(self.field, rows, self.ncols, _normalised=True)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.field(c)
        p = self.field.characteristic
        if p:
            rows = (tuple(c * x % p for x in r) for r in self.rows)
        else:
            rows = (tuple(c * x for x in r) for r in self.rows)
        return Matrix(self.field, rows, self.ncols, _normalised=True)

    def __matmul__(self, other):
        self._check_field(other)
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        p = self.field.characteristic
        nc = other.ncols
        brows = other.rows
        out = []
        for row in self.rows:
            acc = None
            for k, a in enumerate(row):
                if not a:
                    continue
                bk = brows[k]
                if acc is None:
                    acc = list(bk) if a == 1 else [a * y for y in bk]
                elif a == 1:
                    acc = [x + y for x, y in zip(acc, bk)]
                else:
                    acc = [x + a * y for x, y in zip(acc, bk)]
            if acc is None:
                out.append((self.field.zero,) * nc)
            elif p:
                out.append(tuple(x % p for x in acc))
            else:
                out.append(tuple(acc))
        return Matrix(self.field, out, nc, _normalised=True)

    def apply(self, vec: Sequence):
        """Matrix times column vector, returned as a tuple."""
        if len(vec) != self.ncols:
            raise DimensionMismatch("vector length does not match matrix")
        p = self.field.characteristic
        nz = [(k, v) for k, v in enumerate(vec) if v]
        if p:
            return tuple(sum(r[k] * v for k, v in nz) % p for r in self.rows)
        return tuple(Fraction(sum((r[k] * v for k, v in nz), Fraction(0))) for r in self.rows)

    def __pow__(self, k: int):
        if k < 0 or not self.is_square():
            raise ValueError("only nonnegative powers of square matrices")
        result = Matrix.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def transpose(self):
        return Matrix(self.field, zip(*self.rows), self.nrows, _normalised=True) \
            if self.rows else Matrix(self.field, (), 0, _normalised=True)

    T = property(transpose)

    def commutes_with(self, other) -> bool:
        return self @ other == other @ self

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.ncols, self.rows))
        return self._hash

    def tolist(self):
        return [list(r) for r in self.rows]

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix({self.field}, [{body}])"


# ---------------------------------------------------------------------------
# Row reduction
# ---------------------------------------------------------------------------

def _rref_rows(field: FieldSpec, rows: list[list], ncols: int) -> list[int]:
    """Reduce ``rows`` in place to reduced row-echelon form; return pivot columns.

    Zero rows end up at the bottom.
    """
    p = field.characteristic
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        if lead != 1:
            inv = field.inv(lead)
            rows[r] = [x * inv % p for x in rows[r]] if p else [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    if p:
                        rows[i] = [(x - f * y) % p for x, y in zip(rows[i], prow)]
                    else:
                        rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: Matrix) -> tuple[Matrix, int]:
    """Reduced row-echelon form of ``m`` together with its rank."""
    rows = [list(r) for r in m.rows]
    pivots = _rref_rows(m.field, rows, m.ncols)
    return Matrix(m.field, rows, m.ncols, _normalised=True), len(pivots)


def rank(m: Matrix) -> int:
    return rref(m)[1]


def kernel_of(m: Matrix) -> "Subspace":
    """Null space {x : m x = 0} as a subspace of k^cols."""
    field = m.field
    rows = [list(r) for r in m.rows]
    pivots = _rref_rows(field, rows, m.ncols)
    free = [c for c in range(m.ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [field.zero] * m.ncols
        v[f] = field.one
        for i, pc in enumerate(pivots):
            v[pc] = field(-rows[i][f])
        basis.append(v)
    return Subspace.span(field, m.ncols, basis)


def solve(m: Matrix, rhs: Sequence):
    """One solution x of m x = rhs, or None when the system is inconsistent."""
    field = m.field
    rows = [list(r) + [field(b)] for r, b in zip(m.rows, rhs)]
    pivots = _rref_rows(field, rows, m.ncols + 1)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [field.zero] * m.ncols
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][m.ncols]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise DimensionMismatch("only square matrices are invertible")
    n = m.nrows
    field = m.field
    rows = [list(r) + [field.one if i == j else field.zero for j in range(n)]
            for i, r in enumerate(m.rows)]
    pivots = _rref_rows(field, rows, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return Matrix(field, (r[n:] for r in rows), n, _normalised=True)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

class Subspace:
    """A subspace of k^n stored by its reduced row-echelon basis.

    The RREF basis is unique, so equality and hashing are structural.
    """

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: FieldSpec, ambient_dim: int, basis, pivots):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def span(cls, field: FieldSpec, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in k^{ambient_dim}")
            rows.append([field(x) for x in v])
        pivots = _rref_rows(field, rows, ambient_dim)
        basis = tuple(tuple(rows[i]) for i in range(len(pivots)))
        return cls(field, ambient_dim, basis, tuple(pivots))

    @classmethod
    def zero(cls, field, ambient_dim):
        return cls(field, ambient_dim, (), ())

    @classmethod
    def full(cls, field, ambient_dim):
        ident = Matrix.identity(field, ambient_dim)
        return cls(field, ambient_dim, ident.rows, tuple(range(ambient_dim)))

    @classmethod
    def from_matrix_columns(cls, m: Matrix) -> "Subspace":
        return cls.span(m.field, m.nrows, m.transpose().rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self):
        return not self.basis

    def _check(self, other):
        if other.field != self.field or other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch(
                f"subspaces of {self.field}^{self.ambient_dim} and "
                f"{other.field}^{other.ambient_dim}")

    def reduce(self, vec: Sequence) -> tuple:
        """Canonical coset representative: ``vec`` with the pivot columns cleared."""
        if len(vec) != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        field = self.field
        p = field.characteristic
        v = [field(x) for x in vec]
        for row, pc in zip(self.basis, self.pivots):
            f = v[pc]
            if f:
                if p:
                    v = [(x - f * y) % p for x, y in zip(v, row)]
                else:
                    v = [x - f * y for x, y in zip(v, row)]
        return tuple(v)

    def __contains__(self, vec) -> bool:
        return not any(self.reduce(vec))

    def coordinates(self, vec: Sequence) -> tuple:
        """Coefficients of ``vec`` in the RREF basis (``vec`` must lie in the span)."""
        if any(self.reduce(vec)):
            raise ValueError("vector is not in the subspace")
        return tuple(self.field(vec[pc]) for pc in self.pivots)

    def complement_indices(self) -> tuple:
        """Non-pivot coordinates; the corresponding unit vectors span a complement."""
        piv = set(self.pivots)
        return tuple(i for i in range(self.ambient_dim) if i not in piv)

    def quotient_coordinates(self, vec: Sequence) -> tuple:
        """Coordinates of the image of ``vec`` in k^n / self, w.r.t. the unit-vector complement."""
        r = self.reduce(vec)
        return tuple(r[i] for i in self.complement_indices())

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.field, self.ambient_dim, self.basis + other.basis)

    sum = __add__

    def __and__(self, other: "Subspace") -> "Subspace":
        """Intersection by the Zassenhaus construction."""
        self._check(other)
        n = self.ambient_dim
        field = self.field
        z = (field.zero,) * n
        rows = [list(u) + list(u) for u in self.basis] + [list(w) + list(z) for w in other.basis]
        pivots = _rref_rows(field, rows, 2 * n)
        inter = [rows[i][n:] for i, pc in enumerate(pivots) if pc >= n]
        return Subspace.span(field, n, inter)

    intersection = __and__

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return all(v in other for v in self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.field, self.ambient_dim, self.basis))

    def as_matrix(self) -> Matrix:
        return Matrix(self.field, self.basis, self.ambient_dim, _normalised=True)

    def image(self, m: Matrix) -> "Subspace":
        """m applied to this subspace (columns convention)."""
        return Subspace.span(self.field, m.nrows, (m.apply(v) for v in self.basis))

    def __repr__(self):
        return f"Subspace({self.field}^{self.ambient_dim}, dim={self.dim})"


def image_of(m: Matrix) -> Subspace:
    """Column space of ``m``."""
    return Subspace.from_matrix_columns(m)


# ---------------------------------------------------------------------------
# Incremental echelon basis with coordinates
# ---------------------------------------------------------------------------

class EchelonBasis:
    """Incrementally built linearly independent set with coordinate tracking.

    Vectors are reduced by leading terms against sparse echelon rows.  Each row
    remembers its expression in terms of the originally inserted vectors, so a
    dependent vector can be written back in the inserted basis.
    """

    def __init__(self, field: FieldSpec):
        self.field = field
        self._rows: dict[int, tuple[dict, dict]] = {}
        self.size = 0

    @staticmethod
    def sparse(vec: Sequence) -> dict:
        return {i: x for i, x in enumerate(vec) if x}

    def _reduce(self, v: dict) -> tuple[dict, dict]:
        field = self.field
        p = field.characteristic
        combo: dict = {}
        rows = self._rows
        while v:
            k = min(v)
            row = rows.get(k)
            if row is None:
                break
            c = v[k]
            vec, expr = row
            for j, x in vec.items():
                y = v.get(j, 0) - c * x
                if p:
                    y %= p
                if y:
                    v[j] = y
                else:
                    v.pop(j, None)
            for j, x in expr.items():
                y = combo.get(j, 0) + c * x
                if p:
                    y %= p
                if y:
                    combo[j] = y
                else:
                    combo.pop(j, None)
        return v, combo

    def coordinates(self, vec: Sequence | dict):
        """Coordinates in the inserted basis, or None when ``vec`` is not in the span."""
        v = dict(vec) if isinstance(vec, dict) else self.sparse(vec)
        residual, combo = self._reduce(v)
        if residual:
            return None
        return tuple(self.field(combo.get(i, 0)) for i in range(self.size))

    def __contains__(self, vec):
        v = dict(vec) if isinstance(vec, dict) else self.sparse(vec)
        return not self._reduce(v)[0]

    def insert(self, vec: Sequence | dict):
        """Insert ``vec``; returns ``(True, None)`` if new, else ``(False, coordinates)``."""
        field = self.field
        p = field.characteristic
        v = dict(vec) if isinstance(vec, dict) else self.sparse(vec)
        residual, combo = self._reduce(v)
        if not residual:
            return False, tuple(field(combo.get(i, 0)) for i in range(self.size))
        # residual = vec - sum(combo) ; express it via originals
        expr = {j: (-x % p if p else -x) for j, x in combo.items()}
        expr[self.size] = field.one
        k = min(residual)
        lead = residual[k]
        if lead != 1:
            inv = field.inv(lead)
            if p:
                residual = {j: x * inv % p for j, x in residual.items()}
                expr = {j: x * inv % p for j, x in expr.items()}
            else:
                residual = {j: x * inv for j, x in residual.items()}
                expr = {j: x * inv for j, x in expr.items()}
        self._rows[k] = (residual, expr)
        self.size += 1
        return True, None


def random_matrix(field: FieldSpec, nrows: int, ncols: int, rng: random.Random, bound: int = 5):
    return Matrix(field, ([field.random_element(rng, bound) for _ in range(ncols)]
                          for _ in range(nrows)), ncols, _normalised=True)


def random_invertible(field: FieldSpec, n: int, rng: random.Random) -> Matrix:
    while True:
        m = random_matrix(field, n, n, rng)
        if rank(m) == n:
            return m
