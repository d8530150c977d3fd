"""Indefinite Hermitian pairing of signature (p, q) and the frame group.

Vectors live in C^(p+q).  The pairing is negative on the first q coordinates
and positive on the remaining p, with coordinate Gram matrix J.  Adapted
frames are stored with frame vectors as ROWS, so the frame Gram matrix of a
matrix A is A J A*; a matrix is an adapted-frame group element when that
Gram equals the anti-diagonal block pattern S and det A = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-10


class DimensionError(ValueError):
    """Shape of an argument is incompatible with the signature form."""


@dataclass(frozen=True)
class SignatureForm:
    """Signature-(p, q) Hermitian form on C^(p+q), with p > q >= 1."""

    p: int
    q: int

    def __post_init__(self):
        if not (self.p > self.q >= 1):
            raise ValueError(f"require p > q >= 1, got p={self.p}, q={self.q}")

    @property
    def n(self) -> int:
        return self.p - self.q

    @property
    def dim(self) -> int:
        return self.p + self.q

    @property
    def J(self) -> np.ndarray:
        """Coordinate Gram matrix: diag(-1 x q, +1 x p)."""
        d = np.ones(self.dim)
        d[: self.q] = -1.0
        return np.diag(d).astype(complex)

    @property
    def Jdiag(self) -> np.ndarray:
        d = np.ones(self.dim)
        d[: self.q] = -1.0
        return d

    @property
    def S(self) -> np.ndarray:
        """Frame Gram matrix: anti-diagonal blocks [[0,0,I_q],[0,I_n,0],[I_q,0,0]]."""
        q, n = self.q, self.n
        S = np.zeros((self.dim, self.dim), dtype=complex)
        S[:q, q + n:] = np.eye(q)
        S[q: q + n, q: q + n] = np.eye(n)
        S[q + n:, :q] = np.eye(q)
        return S


def form_value(F: SignatureForm, u, v) -> complex:
    """Hermitian inner product <u, v> = -sum_{i<=q} u_i conj(v_i) + sum_{i>q} u_i conj(v_i)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != (F.dim,) or v.shape != (F.dim,):
        raise DimensionError(f"expected vectors of length {F.dim}")
    return complex(np.sum(u * F.Jdiag * np.conj(v)))


def gram_matrix(F: SignatureForm, A) -> np.ndarray:
    """Pairwise form values of the rows of A, i.e. A J A*."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (F.dim, F.dim):
        raise DimensionError(f"expected a {F.dim}x{F.dim} matrix, got {A.shape}")
    return (A * F.Jdiag) @ A.conj().T


def reference_frame(F: SignatureForm) -> np.ndarray:
    """Explicit basepoint frame with Gram matrix S and det 1.

    Rows are Z0_a = (e_a + e_{q+n+a})/sqrt2, X0_j = e_{q+j},
    Y0_a = (-e_a + e_{q+n+a})/sqrt2, with the determinant phase absorbed
    into the X0_1 row.
    """
    q, n, N = F.q, F.n, F.dim
    A = np.zeros((N, N), dtype=complex)
    s = 1.0 / np.sqrt(2.0)
    for a in range(q):
        A[a, a] = s
        A[a, q + n + a] = s
        A[q + n + a, a] = -s
        A[q + n + a, q + n + a] = s
    for j in range(n):
        A[q + j, q + j] = 1.0
    d = np.linalg.det(A)
    A[q, :] /= d  # |d| = 1, so this is a unit phase on row X0_1
    return A


def is_frame_group_element(F: SignatureForm, A, tol: float = DEFAULT_TOL) -> bool:
    """True iff the rows of A form an adapted frame: Gram = S and det = 1."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (F.dim, F.dim):
        raise DimensionError(f"expected a {F.dim}x{F.dim} matrix, got {A.shape}")
    if np.max(np.abs(gram_matrix(F, A) - F.S)) > tol:
        return False
    return abs(np.linalg.det(A) - 1.0) <= tol
