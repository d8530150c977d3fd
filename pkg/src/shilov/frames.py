"""Adapted frames on the Shilov boundary and the frame-change families.

Frames are stored with frame vectors as rows of a (p+q)x(p+q) matrix A, in
the row order (Z_1..Z_q, X_1..X_n, Y_1..Y_q); adaptedness means the row Gram
matrix A J A* equals the anti-diagonal pattern S and det A = 1.

The frame constructor is generic over the scalar ring: entries may be complex
numbers or truncated Taylor jets (object arrays), so the same code produces
pointwise frames and smooth frame fields along curves/maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hermitian import DEFAULT_TOL, DimensionError, SignatureForm, gram_matrix
from .jets import Jet

# smallest admissible singular value of the conjugate-pairing matrix, below
# which frame construction switches to pivoted standard-basis complement rows;
# the Z rows always have Euclidean norm sqrt(2) on the boundary, so this is an
# absolute scale, and connection residuals grow like a power of the frame
# condition number
_PAIRING_SV_LIMIT = 0.25


# ---------------------------------------------------------------------------
# scalar-generic helpers (complex numbers or Jet objects)

def _const(x):
    """Constant part of a scalar (value of a jet, identity on numbers)."""
    return x.value() if isinstance(x, Jet) else complex(x)

def _mag(x) -> float:
    return abs(_const(x))


def _inv_scalar(x):
    return x.inverse() if isinstance(x, Jet) else 1.0 / x


def _sqrt_scalar(x):
    return x.sqrt() if isinstance(x, Jet) else complex(np.sqrt(complex(x)))


def _const_matrix(A) -> np.ndarray:
    if A.dtype != object:
        return np.asarray(A, dtype=complex)
    out = np.empty(A.shape, dtype=complex)
    for idx in np.ndindex(A.shape):
        out[idx] = _const(A[idx])
    return out


def _mm(A, B):
    """Matrix product working for both complex and object dtypes."""
    return np.dot(A, B)


def _generic_inv(A):
    """Gauss-Jordan inverse with pivoting on constant-term magnitude."""
    if A.dtype != object:
        return np.linalg.inv(A)
    n = A.shape[0]
    M = np.array(A, dtype=object, copy=True)
    E = np.full((n, n), 0j, dtype=object)
    for i in range(n):
        E[i, i] = 1.0 + 0j
    for col in range(n):
        piv = col + max(range(n - col), key=lambda r: _mag(M[col + r, col]))
        if _mag(M[piv, col]) == 0.0:
            raise np.linalg.LinAlgError("singular matrix in generic inverse")
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
            E[[col, piv]] = E[[piv, col]]
        pinv = _inv_scalar(M[col, col])
        M[col] = M[col] * pinv
        E[col] = E[col] * pinv
        for r in range(n):
            if r != col:
                fac = M[r, col]
                M[r] = M[r] - fac * M[col]
                E[r] = E[r] - fac * E[col]
    return E


def _generic_det(A):
    """Determinant by elimination, generic over the scalar ring."""
    if A.dtype != object:
        return complex(np.linalg.det(A))
    n = A.shape[0]
    M = np.array(A, dtype=object, copy=True)
    det = 1.0 + 0j
    for col in range(n):
        piv = col + max(range(n - col), key=lambda r: _mag(M[col + r, col]))
        if _mag(M[piv, col]) == 0.0:
            return 0.0 * M[0, 0]
        if piv != col:
            M[[col, piv]] = M[[piv, col]]
            det = -det
        det = det * M[col, col]
        pinv = _inv_scalar(M[col, col])
        for r in range(col + 1, n):
            M[r] = M[r] - (M[r, col] * pinv) * M[col]
    return det


def _pair_rows(Jdiag, A, B):
    """Gram of row sets: out[i,j] = <A_i, B_j> = sum_k A[i,k] Jd[k] conj(B[j,k])."""
    return _mm(A * Jdiag, np.conj(B).T)


# ---------------------------------------------------------------------------
# frame type

@dataclass
class AdaptedFrame:
    """An adapted frame: rows (Z, X, Y) of A with Gram pattern S, det 1."""

    F: SignatureForm
    A: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A)
        if self.A.shape != (self.F.dim, self.F.dim):
            raise DimensionError("frame matrix has wrong shape")

    @property
    def Zmat(self) -> np.ndarray:
        return self.A[: self.F.q]

    @property
    def Xmat(self) -> np.ndarray:
        return self.A[self.F.q : self.F.q + self.F.n]

    @property
    def Ymat(self) -> np.ndarray:
        return self.A[self.F.q + self.F.n :]

    def gram_residual(self) -> float:
        return float(np.max(np.abs(gram_matrix(self.F, self.A) - self.F.S)))

    def det_residual(self) -> float:
        return abs(np.linalg.det(self.A) - 1.0)

    def point(self) -> np.ndarray:
        """Recover the represented boundary point from the Z-row span."""
        cols = self.Zmat.T  # (p+q, q): columns spanning the plane
        return cols[self.F.q :] @ np.linalg.inv(cols[: self.F.q])

    def plane_angle_to(self, other: "AdaptedFrame") -> float:
        """Largest principal angle between the represented q-planes."""
        ang = scipy.linalg.subspace_angles(self.Zmat.T, other.Zmat.T)
        return float(ang[0]) if ang.size else 0.0


# ---------------------------------------------------------------------------
# construction

def frame_rows(F: SignatureForm, z: np.ndarray) -> np.ndarray:
    """Adapted-frame matrix at boundary point z, generic over the scalar ring.

    Steps: Z-rows from the standard lift; Y from a paired complement with a
    null correction; X by Gram-Schmidt on the positive-definite complement;
    determinant phase absorbed into the X_1 row.
    """
    q, n, p, N = F.q, F.n, F.p, F.dim
    z = np.asarray(z)
    generic = z.dtype == object
    Jd = F.Jdiag

    if generic:
        A = np.full((N, N), 0j, dtype=object)
    else:
        z = z.astype(complex)
        A = np.zeros((N, N), dtype=complex)
    Zmat = A[:q]
    for a in range(q):
        Zmat[a, a] = 1.0 + 0j
    Zmat[:, q:] = z.T

    # paired complement for Y: rows conj(Z)*J give pairing P = Z Z^T = I + z^T z,
    # which can be ill-conditioned; fall back to pivoted standard-basis rows.
    C = np.conj(Zmat) * Jd
    P = _pair_rows(Jd, Zmat, C)
    if np.linalg.svd(_const_matrix(P), compute_uv=False)[-1] < _PAIRING_SV_LIMIT:
        weights = _const_matrix(Zmat) * Jd
        _, _, perm = scipy.linalg.qr(weights, pivoting=True)
        C = np.zeros((q, N), dtype=complex)
        for a in range(q):
            C[a, perm[a]] = 1.0
        if generic:
            C = C.astype(object)
        P = _pair_rows(Jd, Zmat, C)
    B = np.conj(_generic_inv(P)).T
    Yp = _mm(B, C)
    H = _pair_rows(Jd, Yp, Yp)
    Ymat = Yp - 0.5 * _mm(H, Zmat)
    A[q + n :] = Ymat

    # X: project the standard basis off span(Z, Y), then pivoted Gram-Schmidt
    if generic:
        cand = np.full((N, N), 0j, dtype=object)
        for k in range(N):
            cand[k, k] = 1.0 + 0j
    else:
        cand = np.eye(N, dtype=complex)
    cand = cand - _mm(_pair_rows(Jd, cand, Ymat), Zmat) - _mm(_pair_rows(Jd, cand, Zmat), Ymat)
    cand = list(cand)
    for j in range(n):
        norms = [_mag(_pair_rows(Jd, v[None, :], v[None, :])[0, 0]) for v in cand]
        k = int(np.argmax(norms))
        v = cand.pop(k)
        nv = _sqrt_scalar(_pair_rows(Jd, v[None, :], v[None, :])[0, 0])
        v = v * _inv_scalar(nv)
        A[q + j] = v
        cand = [w - _pair_rows(Jd, w[None, :], v[None, :])[0, 0] * v for w in cand]

    d = _generic_det(A)
    A[q] = A[q] * _inv_scalar(d)  # |d| = 1: a pure phase on X_1
    return A


def build_adapted_frame(F: SignatureForm, z: np.ndarray, tol: float = 1e-8,
                        section_seed: int | None = None) -> AdaptedFrame:
    """Adapted frame at a boundary point (complex entries).

    ``section_seed`` post-composes with a random point-fixing frame change,
    yielding a different but equally valid section of the frame bundle.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape != (F.p, F.q):
        raise DimensionError(f"expected a {F.p}x{F.q} matrix, got {z.shape}")
    if np.max(np.abs(z.conj().T @ z - np.eye(F.q))) > tol:
        raise ValueError("point is not on the Shilov boundary")
    A = frame_rows(F, z)
    if section_seed is not None:
        U = random_section_change(F, np.random.default_rng(section_seed))
        A = U @ A
        A[F.q] /= np.linalg.det(A)
    return AdaptedFrame(F, A)


def random_section_change(F: SignatureForm, rng: np.random.Generator) -> np.ndarray:
    """A random point-fixing frame-group element (position + rotation + real vectors)."""
    q, n = F.q, F.n
    W = np.linalg.qr(rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q)))[0]
    R = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
    G = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    H = 0.3 * (G + G.conj().T)
    U = change_matrix(F, FrameChange("position", {"W": W}))
    U = U @ change_matrix(F, FrameChange("rotation", {"U": R}))
    U = U @ change_matrix(F, FrameChange("real_vectors", {"H": H}))
    return U


# ---------------------------------------------------------------------------
# frame changes

_KINDS = ("position", "real_vectors", "dilation", "rotation", "general")


@dataclass
class FrameChange:
    """Payload of one of the five frame-change families.

    position: W (q x q invertible); the Y-side factor is V = W^{-*}.
    real_vectors: H (q x q Hermitian); enters the change as the skew block iH
        so the null pairing of the Y rows is preserved.
    dilation: lam (q positive reals).
    rotation: U (n x n unitary).
    general: B (q x n); A defaults to -B B*/2, C is forced to -conj(B)^t.
    """

    kind: str
    payload: dict

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown frame change kind {self.kind!r}")


def validate_change(F: SignatureForm, change: FrameChange, tol: float = DEFAULT_TOL):
    q, n = F.q, F.n
    p = change.payload
    if change.kind == "position":
        W = np.asarray(p["W"], dtype=complex)
        if W.shape != (q, q) or abs(np.linalg.det(W)) < tol:
            raise ValueError("position change needs an invertible q x q matrix W")
    elif change.kind == "real_vectors":
        H = np.asarray(p["H"], dtype=complex)
        if H.shape != (q, q) or np.max(np.abs(H - H.conj().T)) > tol:
            raise ValueError("real-vectors change needs a Hermitian q x q matrix H")
    elif change.kind == "dilation":
        lam = np.asarray(p["lam"], dtype=float)
        if lam.shape != (q,) or np.any(lam <= 0):
            raise ValueError("dilation needs q positive reals")
    elif change.kind == "rotation":
        U = np.asarray(p["U"], dtype=complex)
        if U.shape != (n, n) or np.max(np.abs(U.conj().T @ U - np.eye(n))) > tol:
            raise ValueError("rotation needs an n x n unitary matrix")
    else:  # general
        B = np.asarray(p["B"], dtype=complex)
        if B.shape != (q, n):
            raise ValueError("general change needs a q x n matrix B")
        A = np.asarray(p.get("A", solve_general_change_A(B)), dtype=complex)
        res = np.max(np.abs(A + A.conj().T + B @ B.conj().T))
        if A.shape != (q, q) or res > tol:
            raise ValueError("general change block A violates the null constraint")


def solve_general_change_A(B: np.ndarray) -> np.ndarray:
    """The canonical Hermitian-part solution A = -B B*/2 of the null constraint."""
    B = np.asarray(B, dtype=complex)
    return -0.5 * B @ B.conj().T


def change_matrix(F: SignatureForm, change: FrameChange) -> np.ndarray:
    """The (p+q)x(p+q) matrix U with new rows = U @ old rows."""
    validate_change(F, change)
    q, n, N = F.q, F.n, F.dim
    U = np.eye(N, dtype=complex)
    p = change.payload
    if change.kind == "position":
        W = np.asarray(p["W"], dtype=complex)
        U[:q, :q] = W
        U[q + n :, q + n :] = np.linalg.inv(W.conj().T)
    elif change.kind == "real_vectors":
        H = np.asarray(p["H"], dtype=complex)
        U[q + n :, :q] = 1j * H
    elif change.kind == "dilation":
        lam = np.asarray(p["lam"], dtype=float)
        U[:q, :q] = np.diag(1.0 / lam)
        U[q + n :, q + n :] = np.diag(lam).astype(complex)
    elif change.kind == "rotation":
        U[q : q + n, q : q + n] = np.asarray(p["U"], dtype=complex)
    else:
        B = np.asarray(p["B"], dtype=complex)
        A = np.asarray(p.get("A", solve_general_change_A(B)), dtype=complex)
        U[q : q + n, :q] = -B.conj().T
        U[q + n :, :q] = A
        U[q + n :, q : q + n] = B
    return U


def apply_change(frame: AdaptedFrame, change: FrameChange) -> AdaptedFrame:
    """Apply a frame change; the determinant phase is re-absorbed into X_1."""
    U = change_matrix(frame.F, change)
    A = U @ frame.A
    d = np.linalg.det(A)
    if abs(d - 1.0) > 1e-14:
        A = A.copy()
        A[frame.F.q] /= d  # Gram preservation forces |d| = 1
    return AdaptedFrame(frame.F, A)
