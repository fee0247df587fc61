"""
Small dense matrices over GF(2^m).

Matrices wrap a read-only uint8 numpy array plus the field they live in.
Products use the field's multiplication table with fancy indexing and an XOR
reduction; elimination works on a numpy copy, one pivot row at a time.

Pivot rule (everything that depends on it is deterministic): scan columns left
to right and take the first row at or below the current one with a nonzero
entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from mds53.errors import InconsistentSystemError, LinalgError, SingularMatrixError
from mds53.galois import FieldSpec


class Vec2(NamedTuple):
    """Length-2 column vector of encoded field elements."""

    x: int
    y: int

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0


@dataclass(frozen=True, eq=False)
class Mat:
    field: FieldSpec
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise LinalgError(f"matrix entries must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.order):
            raise LinalgError(f"matrix has entries outside {self.field}")
        arr = arr.astype(np.uint8)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    # Constructors
    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Iterable[Iterable[int]]) -> Mat:
        return cls(field, np.array([list(r) for r in rows], dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> Mat:
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> Mat:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def row(cls, field: FieldSpec, v: Sequence[int]) -> Mat:
        return cls(field, np.array([list(v)], dtype=np.int64))

    @classmethod
    def column(cls, field: FieldSpec, v: Sequence[int]) -> Mat:
        return cls(field, np.array([[x] for x in v], dtype=np.int64))

    # Shape and access
    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def T(self) -> Mat:
        return transpose(self)

    def __getitem__(self, key):
        out = self.entries[key]
        if isinstance(out, np.ndarray) and out.ndim == 2:
            return Mat(self.field, out)
        if isinstance(out, np.ndarray):
            return tuple(int(x) for x in out)
        return int(out)

    def tolist(self) -> list[list[int]]:
        return self.entries.tolist()

    def row_vec(self, i: int) -> Vec2:
        if self.cols != 2:
            raise LinalgError(f"row_vec needs a 2-column matrix, got {self.shape}")
        return Vec2(int(self.entries[i, 0]), int(self.entries[i, 1]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.entries, other.entries)

    __hash__ = None  # type: ignore[assignment]

    def __matmul__(self, other: Mat) -> Mat:
        return mat_mul(self, other)

    def __add__(self, other: Mat) -> Mat:
        return mat_add(self, other)

    def __sub__(self, other: Mat) -> Mat:
        return mat_sub(self, other)

    def __repr__(self) -> str:
        return f"Mat({self.field}, {self.tolist()})"

    def render(self) -> str:
        """Rows of rendered elements, one line per row."""
        return "\n".join(
            "[" + " ".join(self.field.render(int(x)) for x in row) + "]" for row in self.entries
        )


def _same_field(a: Mat, b: Mat) -> FieldSpec:
    if a.field != b.field:
        raise LinalgError(f"matrices over {a.field} and {b.field} cannot be combined")
    return a.field


# Arithmetic
def mat_mul(a: Mat, b: Mat) -> Mat:
    field = _same_field(a, b)
    if a.cols != b.rows:
        raise LinalgError(f"cannot multiply {a.shape} by {b.shape}")
    if a.cols == 0:
        return Mat.zeros(field, a.rows, b.cols)
    prods = field.mul_table[a.entries[:, :, None], b.entries[None, :, :]]
    return Mat(field, np.bitwise_xor.reduce(prods, axis=1))


def mat_add(a: Mat, b: Mat) -> Mat:
    field = _same_field(a, b)
    if a.shape != b.shape:
        raise LinalgError(f"cannot add {a.shape} and {b.shape}")
    return Mat(field, a.entries ^ b.entries)


# characteristic 2
mat_sub = mat_add


def mat_scale(s: int, a: Mat) -> Mat:
    return Mat(a.field, a.field.mul_table[s][a.entries])


def transpose(a: Mat) -> Mat:
    return Mat(a.field, a.entries.T)


def block(field: FieldSpec, grid: Sequence[Sequence[Mat]]) -> Mat:
    """Assemble a block matrix from a grid of Mats."""
    return Mat(field, np.block([[m.entries.astype(np.int64) for m in row] for row in grid]))


def vstack(mats: Sequence[Mat]) -> Mat:
    field = mats[0].field
    for m in mats[1:]:
        _same_field(mats[0], m)
    return Mat(field, np.vstack([m.entries for m in mats]))


def mat_vec(a: Mat, v: Vec2) -> Vec2:
    """A v for a 2x2 A."""
    out = mat_mul(a, Mat.column(a.field, v))
    return Vec2(int(out.entries[0, 0]), int(out.entries[1, 0]))


def row_vec(v: Vec2, a: Mat) -> Vec2:
    """v^T A for a 2x2 A, returned as a Vec2."""
    out = mat_mul(Mat.row(a.field, v), a)
    return Vec2(int(out.entries[0, 0]), int(out.entries[0, 1]))


def vec_scale(s: int, v: Vec2, field: FieldSpec) -> Vec2:
    return Vec2(field.mul(s, v.x), field.mul(s, v.y))


def vec_add(u: Vec2, v: Vec2) -> Vec2:
    return Vec2(u.x ^ v.x, u.y ^ v.y)


# Elimination
def rref(a: Mat) -> tuple[Mat, tuple[int, ...]]:
    """Reduced row echelon form and the pivot columns."""
    field = a.field
    work = a.entries.copy()
    table = field.mul_table
    pivots: list[int] = []
    r = 0
    n_rows, n_cols = work.shape
    for c in range(n_cols):
        if r == n_rows:
            break
        nonzero = np.flatnonzero(work[r:, c])
        if nonzero.size == 0:
            continue
        p = r + int(nonzero[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        work[r] = table[field.inv(int(work[r, c]))][work[r]]
        factors = work[:, c].copy()
        factors[r] = 0
        work ^= table[factors[:, None], work[r][None, :]]
        pivots.append(c)
        r += 1
    return Mat(field, work), tuple(pivots)


def mat_rank(a: Mat) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(rref(a)[1])


def mat_inv2(a: Mat) -> Mat:
    """Inverse of a 2x2 matrix via the adjugate."""
    if a.shape != (2, 2):
        raise LinalgError(f"mat_inv2 needs a 2x2 matrix, got {a.shape}")
    f = a.field
    (p, q), (r, s) = a.tolist()
    det = f.sub(f.mul(p, s), f.mul(q, r))
    if det == 0:
        raise SingularMatrixError(f"2x2 matrix {a.tolist()} has zero determinant")
    d = f.inv(det)
    return Mat.from_rows(f, [[f.mul(d, s), f.mul(d, f.neg(q))], [f.mul(d, f.neg(r)), f.mul(d, p)]])


def mat_inv(a: Mat) -> Mat:
    """Inverse of any square matrix by Gauss-Jordan on [A | I]."""
    n, m = a.shape
    if n != m:
        raise LinalgError(f"only square matrices have inverses, got {a.shape}")
    reduced, pivots = rref(block(a.field, [[a, Mat.identity(a.field, n)]]))
    if pivots[:n] != tuple(range(n)):
        raise SingularMatrixError(f"{n}x{n} matrix is singular (rank {sum(p < n for p in pivots)})")
    return reduced[:, n:]


def solve(a: Mat, b: Mat) -> Mat:
    """
    Some x with a @ x == b; free variables are set to zero.
    Raises InconsistentSystemError when no solution exists.
    """
    if a.rows != b.rows:
        raise LinalgError(f"cannot solve {a.shape} against {b.shape}")
    n = a.cols
    reduced, pivots = rref(block(a.field, [[a, b]]))
    if any(p >= n for p in pivots):
        raise InconsistentSystemError("right-hand side is outside the column space")
    x = np.zeros((n, b.cols), dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = reduced.entries[i, n:]
    return Mat(a.field, x)


def null_vec2(a: Mat) -> Vec2:
    """
    Nonzero v with a v = 0 for a rank-1 2x2 matrix.

    With (c, d) the first nonzero row, v = (-d, c).
    """
    if a.shape != (2, 2):
        raise LinalgError(f"null_vec2 needs a 2x2 matrix, got {a.shape}")
    if mat_rank(a) != 1:
        raise LinalgError(f"null_vec2 needs rank 1, got rank {mat_rank(a)}")
    f = a.field
    for c, d in a.tolist():
        if c or d:
            return Vec2(f.neg(d), c)
    raise AssertionError("unreachable: rank-1 matrix has a nonzero row")
