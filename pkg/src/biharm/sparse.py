"""Sparse matrices and a preconditioned conjugate gradient solver.

Storage is compressed sparse row, backed by ``scipy.sparse``; the wrapper
pins down construction semantics (duplicate triplets are summed, column
indices sorted within each row) and exposes the raw CSR arrays. The CG
solver is written out longhand because its failure behavior is part of
the contract: it reports iteration counts, raises a typed error carrying
the residual when the iteration budget runs out, and detects loss of
positive definiteness through the p^T A p curvature term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

__all__ = [
    "SparseMatrix",
    "from_triplets",
    "matvec",
    "CGResult",
    "cg_solve",
    "NonConvergenceError",
    "NotSPDError",
]


class NonConvergenceError(RuntimeError):
    """CG exhausted its iteration budget; carries the last residual norm."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"conjugate gradient did not converge in {iterations} iterations "
            f"(residual {residual:.6e})"
        )


class NotSPDError(RuntimeError):
    """The operator is not symmetric positive definite (p^T A p <= 0 observed)."""


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable CSR matrix.

    ``row_offsets``, ``column_indices`` and ``values`` expose the standard
    CSR triple: row i owns the slice ``row_offsets[i]:row_offsets[i+1]``
    of the other two arrays, with column indices strictly increasing
    inside each row and no duplicate entries.
    """

    csr: scipy.sparse.csr_matrix

    @property
    def shape(self) -> tuple[int, int]:
        return self.csr.shape

    @property
    def row_offsets(self) -> np.ndarray:
        return self.csr.indptr

    @property
    def column_indices(self) -> np.ndarray:
        return self.csr.indices

    @property
    def values(self) -> np.ndarray:
        return self.csr.data

    @property
    def nnz(self) -> int:
        return self.csr.nnz

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return matvec(self, x)

    def __matmul__(self, x: np.ndarray) -> np.ndarray:
        return matvec(self, x)

    def diagonal(self) -> np.ndarray:
        return self.csr.diagonal()

    def toarray(self) -> np.ndarray:
        return self.csr.toarray()

    def submatrix(self, rows: np.ndarray, cols: np.ndarray) -> SparseMatrix:
        """Subblock with the given row and column index sets, in their order."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        sub = self.csr[rows][:, cols].tocsr()
        sub.sort_indices()
        return SparseMatrix(sub)


def from_triplets(
    rows: np.ndarray,
    cols: np.ndarray,
    entries: np.ndarray,
    shape: tuple[int, int],
) -> SparseMatrix:
    """Build a SparseMatrix from (row, col, value) triplets.

    Triplets hitting the same position are summed. Indices outside
    ``shape`` raise ValueError.
    """
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    entries = np.asarray(entries, dtype=float).ravel()
    if not (rows.shape == cols.shape == entries.shape):
        raise ValueError("rows, cols and entries must have matching lengths")
    nr, nc = shape
    if rows.size and (rows.min() < 0 or rows.max() >= nr):
        raise ValueError("row index out of range")
    if cols.size and (cols.min() < 0 or cols.max() >= nc):
        raise ValueError("column index out of range")
    coo = scipy.sparse.coo_matrix((entries, (rows, cols)), shape=shape)
    csr = coo.tocsr()  # sums duplicates
    csr.sort_indices()
    return SparseMatrix(csr)


def matvec(a: SparseMatrix, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (a.shape[1],):
        raise ValueError(f"vector length {x.shape} does not match matrix shape {a.shape}")
    return a.csr @ x


@dataclass(frozen=True)
class CGResult:
    """Solution vector plus the iteration count and final residual norm."""

    x: np.ndarray
    iterations: int
    residual: float


def cg_solve(
    a: SparseMatrix,
    b: np.ndarray,
    rel_tol: float = 1e-10,
    max_iter: int | None = None,
    preconditioner: str = "diagonal",
) -> CGResult:
    """Solve A x = b for symmetric positive definite A by conjugate gradients.

    Parameters
    ----------
    rel_tol : stop when ||r||_2 <= rel_tol * ||b||_2
    max_iter : iteration budget, default 10 * n
    preconditioner : "diagonal" for Jacobi scaling, "none" for plain CG

    Raises
    ------
    NonConvergenceError
        when the budget is exhausted; the exception carries the residual.
    NotSPDError
        when a search direction has nonpositive curvature p^T A p, or the
        diagonal preconditioner meets a nonpositive diagonal entry.
    """
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    b = np.asarray(b, dtype=float)
    if b.shape != (n,):
        raise ValueError("right-hand side length does not match matrix")
    if max_iter is None:
        max_iter = 10 * n
    if preconditioner not in ("diagonal", "none"):
        raise ValueError(f"unknown preconditioner {preconditioner!r}")

    if preconditioner == "diagonal":
        diag = a.diagonal()
        if n and diag.min() <= 0:
            raise NotSPDError("nonpositive diagonal entry")
        apply_prec = lambda r: r / diag
    else:
        apply_prec = lambda r: r

    b_norm = float(np.linalg.norm(b))
    x = np.zeros(n)
    if b_norm == 0.0:
        return CGResult(x, 0, 0.0)

    r = b.copy()
    z = apply_prec(r)
    p = z.copy()
    rz = float(r @ z)
    for k in range(1, max_iter + 1):
        ap = a @ p
        pap = float(p @ ap)
        if pap <= 0.0:
            raise NotSPDError(f"nonpositive curvature p^T A p = {pap:.6e}")
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        res = float(np.linalg.norm(r))
        if res <= rel_tol * b_norm:
            return CGResult(x, k, res)
        z = apply_prec(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NonConvergenceError(max_iter, float(np.linalg.norm(r)))
