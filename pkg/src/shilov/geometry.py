"""Type-I bounded symmetric domains, their Shilov boundaries, and local charts.

The boundary S_{p,q} = {z in C^{p x q} : z*z = I_q} is explored through the
frame group: a chart is A(t) = exp(sum_i t_i E_i) A_0 with E_i in the Lie
algebra {E : E S + S E* = 0, tr E = 0} transverse to the stabilizer of the
basepoint's Z-span.  This gives, in one stroke, a parameterization of the
boundary and a smooth section of the frame bundle over it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hermitian import DEFAULT_TOL, DimensionError, SignatureForm
from .frames import build_adapted_frame
from .jets import JetContext, jet_matexp, jet_matinv, jet_matmul


# ---------------------------------------------------------------------------
# membership

def in_domain(F: SignatureForm, z: np.ndarray) -> bool:
    """True iff I_q - z*z is positive definite."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (F.p, F.q):
        raise DimensionError(f"expected a {F.p}x{F.q} matrix, got {z.shape}")
    w = np.linalg.eigvalsh(np.eye(F.q) - z.conj().T @ z)
    return bool(np.all(w > 0))


def on_boundary(F: SignatureForm, z: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff ||I_q - z*z||_max <= tol."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (F.p, F.q):
        raise DimensionError(f"expected a {F.p}x{F.q} matrix, got {z.shape}")
    return bool(np.max(np.abs(np.eye(F.q) - z.conj().T @ z)) <= tol)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of S_{p,q}, validated on construction."""

    z: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=complex))
        res = np.max(np.abs(self.z.conj().T @ self.z - np.eye(self.z.shape[1])))
        if res > self.tol:
            raise ValueError(f"boundary residual {res:.3g} exceeds tol {self.tol:.3g}")


def sample_boundary(F: SignatureForm, seed: int, count: int) -> list[BoundaryPoint]:
    """Deterministic boundary samples: QR-orthonormalized complex Gaussians."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        G = rng.standard_normal((F.p, F.q)) + 1j * rng.standard_normal((F.p, F.q))
        z, _ = np.linalg.qr(G)
        out.append(BoundaryPoint(z))
    return out


# ---------------------------------------------------------------------------
# frame-group Lie algebra

def is_lie_algebra_element(F: SignatureForm, E: np.ndarray,
                           tol: float = DEFAULT_TOL) -> bool:
    """Membership in {E : E S + S E* = 0, tr E = 0} (frame-row convention)."""
    E = np.asarray(E, dtype=complex)
    S = F.S
    return (np.max(np.abs(E @ S + S @ E.conj().T)) <= tol
            and abs(np.trace(E)) <= tol)


def lie_transversal_basis(F: SignatureForm) -> list[np.ndarray]:
    """Real basis of a transversal to the stabilizer of the reference Z-span.

    Elements are E = M S with M anti-Hermitian supported on the (Z,Z) block
    (q^2 contact directions) and the (Z,X) block with its mirror (2nq CR
    directions); all are trace-free.  CR directions come first.
    """
    q, n, N = F.q, F.n, F.dim
    S = F.S
    basis = []

    def from_M(M):
        return M @ S

    # CR directions: M[a, q+j] free complex, mirrored to keep M anti-Hermitian
    for a in range(q):
        for j in range(n):
            for val in (1.0, 1.0j):
                M = np.zeros((N, N), dtype=complex)
                M[a, q + j] = val
                M[q + j, a] = -np.conj(val)
                basis.append(from_M(M))
    # contact directions: anti-Hermitian (Z,Z) block
    for a in range(q):
        M = np.zeros((N, N), dtype=complex)
        M[a, a] = 1.0j
        basis.append(from_M(M))
    for a in range(q):
        for b in range(a + 1, q):
            for val in (1.0, 1.0j):
                M = np.zeros((N, N), dtype=complex)
                M[a, b] = val
                M[b, a] = -np.conj(val)
                basis.append(from_M(M))
    return basis


def transversal_dimension(F: SignatureForm) -> int:
    return 2 * F.n * F.q + F.q * F.q


# ---------------------------------------------------------------------------
# charts

@dataclass
class ChartField:
    """Jet-valued frame field A(t) = exp(sum t_i E_i) A_0 over a basepoint."""

    F: SignatureForm
    basepoint: BoundaryPoint
    directions: list
    ctx: JetContext
    A: np.ndarray  # (N, N, ncoeffs) jet coefficients
    A0: np.ndarray  # (N, N) complex
    order: int
    _zmap: np.ndarray | None = field(default=None, repr=False)

    def point_map(self) -> np.ndarray:
        """Jet coefficients of t -> z(t), the represented boundary point."""
        if self._zmap is None:
            q = self.F.q
            ctx = self.ctx
            cols = np.transpose(self.A[:q], (1, 0, 2))  # (N, q, C)
            top, bottom = cols[:q], cols[q:]
            self._zmap = jet_matmul(ctx, bottom, jet_matinv(ctx, top))
        return self._zmap

    def point_jacobian(self) -> np.ndarray:
        """Real Jacobian of t -> z(t) at 0, shape (2pq, m)."""
        zmap = self.point_map()
        lin = np.stack([zmap[:, :, self.ctx.index[e]].ravel()
                        for e in map(tuple, np.eye(self.ctx.num_vars, dtype=np.int64))],
                       axis=1)
        return np.concatenate([lin.real, lin.imag], axis=0)


def chart_through(F: SignatureForm, z0: BoundaryPoint,
                  directions: list[np.ndarray] | None = None, order: int = 3,
                  section_seed: int | None = None) -> ChartField:
    """Chart through z0 along given Lie-algebra directions (default: full transversal)."""
    if order < 1:
        raise ValueError("jet order must be at least 1")
    if directions is None:
        directions = lie_transversal_basis(F)
    for E in directions:
        if not is_lie_algebra_element(F, E, tol=1e-8):
            raise ValueError("direction is not in the frame-group Lie algebra")
    A0 = build_adapted_frame(F, z0.z, section_seed=section_seed).A
    m = len(directions)
    ctx = JetContext(m, order)
    N = F.dim
    T = np.zeros((N, N, ctx.ncoeffs), dtype=complex)
    eye = np.eye(m, dtype=np.int64)
    for i, E in enumerate(directions):
        T[:, :, ctx.index[tuple(eye[i])]] = E
    expT = jet_matexp(ctx, T)
    A0c = np.zeros((N, N, ctx.ncoeffs), dtype=complex)
    A0c[:, :, 0] = A0
    A = jet_matmul(ctx, expT, A0c)
    return ChartField(F, z0, list(directions), ctx, A, A0, order)


def random_chart_directions(F: SignatureForm, rng: np.random.Generator,
                            count: int) -> list[np.ndarray]:
    """Random unit combinations of the transversal basis (real coefficients)."""
    basis = lie_transversal_basis(F)
    out = []
    for _ in range(count):
        c = rng.standard_normal(len(basis))
        c /= np.linalg.norm(c)
        out.append(sum(ci * Ei for ci, Ei in zip(c, basis)))
    return out


# ---------------------------------------------------------------------------
# CR splitting of chart directions

@dataclass
class CRSplit:
    cr: list[int]
    contact: list[int]
    theta_values: np.ndarray  # (q, n, m) values of the theta-block per direction


def cr_tangent_basis(F: SignatureForm, chart: ChartField,
                     tol: float = 1e-10) -> CRSplit:
    """Partition chart directions into CR (contact-form kernel) and contact ones.

    For exponential charts the connection at t = 0 is sum_i E_i dt_i, so the
    contact-form values on direction i are the (Z, Y)-block of E_i.
    """
    q, n = F.q, F.n
    m = len(chart.directions)
    phi_vals = np.stack([E[:q, q + n :] for E in chart.directions], axis=-1)
    theta_vals = np.stack([E[:q, q : q + n] for E in chart.directions], axis=-1)
    flat = np.concatenate([phi_vals.reshape(-1, m), theta_vals.reshape(-1, m)])
    rank = np.linalg.matrix_rank(np.concatenate([flat.real, flat.imag]), tol=1e-8)
    if rank < m:
        raise ValueError("degenerate chart: directions do not act independently")
    cr, contact = [], []
    for i in range(m):
        (cr if np.max(np.abs(phi_vals[:, :, i])) <= tol else contact).append(i)
    return CRSplit(cr, contact, theta_vals)
