"""Rigidity analysis of CR maps between Shilov boundaries.

Pipeline: pull the target connection forms back along the map, normalize the
contact-block decomposition (diagonalize, dilate, rotate), verify the aligned
state, analyze the linear structure of the image planes, and recover the
automorphism pair exhibiting linear equivalence to the block-linear embedding
-- or produce a non-injectivity witness when equivalence fails.

All frame changes act on the EVALUATED connection functionals by constant
conjugation pi -> U pi U^{-1}, which realizes the same transformation laws as
changing the frame field while avoiding any determinant bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np
import scipy.linalg

from .hermitian import SignatureForm
from .geometry import BoundaryPoint, ChartField, chart_through, sample_boundary
from .frames import _generic_inv, change_matrix, frame_rows, FrameChange
from .connection import connection_from_frame_field, point_basis_decompose
from .jets import Jet, coeffs_to_jets, jets_to_coeffs
from .maps import PolyMatrixMap


class RigidityError(RuntimeError):
    """A pipeline stage failed a structural precondition."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


# ---------------------------------------------------------------------------
# automorphisms

def random_automorphism(F: SignatureForm, rng: np.random.Generator,
                        scale: float = 0.5) -> np.ndarray:
    """Random element g with g* J g = J and det g = 1 (coordinate convention)."""
    N = F.dim
    J = F.J
    G = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    K = (G - G.conj().T) / 2.0
    E = J @ K
    E -= (np.trace(E) / N) * np.eye(N)  # correction J(cJ) stays in the algebra
    return scipy.linalg.expm(scale * E)


def is_automorphism(F: SignatureForm, g: np.ndarray, tol: float = 1e-9) -> bool:
    g = np.asarray(g, dtype=complex)
    return (np.max(np.abs(g.conj().T @ F.J @ g - F.J)) <= tol
            and abs(np.linalg.det(g) - 1.0) <= tol)


def automorphism_action(g: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Action on boundary points via the lift z -> (I_q; z); generic over jets."""
    z = np.asarray(z)
    p, q = z.shape
    generic = z.dtype == object
    if generic:
        L = np.full((p + q, q), 0j, dtype=object)
    else:
        z = z.astype(complex)
        L = np.zeros((p + q, q), dtype=complex)
    for a in range(q):
        L[a, a] = 1.0 + 0j
    L[q:] = z
    L2 = np.dot(g.astype(object) if generic else g, L)
    top, bottom = L2[:q], L2[q:]
    top_const = np.array([[x.value() if isinstance(x, Jet) else x for x in row]
                          for row in top]) if generic else top
    if np.linalg.cond(top_const) > 1e10:
        raise np.linalg.LinAlgError("point escapes the affine chart under g")
    return np.dot(bottom, _generic_inv(np.asarray(top)))


@dataclass
class ConjugatedMap:
    """g_target o f o g_source as a map carrier (generic evaluate)."""

    g_source: np.ndarray
    inner: object
    g_target: np.ndarray

    @property
    def source(self):
        return self.inner.source

    @property
    def target(self):
        return self.inner.target

    def evaluate(self, z):
        w = automorphism_action(self.g_source, np.asarray(z))
        u = self.inner.evaluate(w)
        return automorphism_action(self.g_target, u)


# ---------------------------------------------------------------------------
# pullback of target forms

@dataclass
class PullbackData:
    """Evaluated connection functionals of source and pulled-back target."""

    F: SignatureForm
    F2: SignatureForm
    chart: ChartField
    pi0: np.ndarray  # (N, N, m) source connection values at basepoint
    Pi0: np.ndarray  # (N2, N2, m) target connection values, pulled back
    z0: np.ndarray
    w0: np.ndarray
    phi_span_residual: float = 0.0

    # source basis functionals
    @property
    def phi_basis(self) -> np.ndarray:  # (q*q, m), row (alpha, beta) -> phi_a^b
        q, n = self.F.q, self.F.n
        return self.pi0[:q, q + n :].reshape(q * q, -1)

    @property
    def theta_basis(self) -> np.ndarray:  # (q*n, m), row (alpha, j)
        q, n = self.F.q, self.F.n
        return self.pi0[:q, q : q + n].reshape(q * n, -1)

    # capital blocks of the pulled-back target connection
    def Phi(self):
        q2, n2 = self.F2.q, self.F2.n
        return self.Pi0[:q2, q2 + n2 :]

    def Theta(self):
        q2, n2 = self.F2.q, self.F2.n
        return self.Pi0[:q2, q2 : q2 + n2]

    def Psi(self):
        q2 = self.F2.q
        return self.Pi0[:q2, :q2]

    def Omega(self):
        q2, n2 = self.F2.q, self.F2.n
        return self.Pi0[q2 : q2 + n2, q2 : q2 + n2]

    def Sigma_x(self):
        q2, n2 = self.F2.q, self.F2.n
        return self.Pi0[q2 : q2 + n2, :q2]

    def Sigma_y(self):
        q2, n2 = self.F2.q, self.F2.n
        return self.Pi0[q2 + n2 :, q2 : q2 + n2]

    def apply_source_change(self, U: np.ndarray):
        Ui = np.linalg.inv(U)
        self.pi0 = np.einsum("ij,jkv,kl->ilv", U, self.pi0, Ui)

    def apply_target_change(self, U: np.ndarray):
        Ui = np.linalg.inv(U)
        self.Pi0 = np.einsum("ij,jkv,kl->ilv", U, self.Pi0, Ui)


def _point_jets(chart: ChartField) -> np.ndarray:
    return coeffs_to_jets(chart.ctx, chart.point_map())


def pullback_forms(f, chart: ChartField) -> PullbackData:
    """Evaluate source and pulled-back target connections at the chart basepoint.

    The target frame field is built generically (over jets) at f(z(t)), which
    realizes an arbitrary smooth section of the target frame bundle along f.
    """
    F = chart.F
    p2, q2 = f.target
    F2 = SignatureForm(p2, q2)
    src_conn = connection_from_frame_field(chart)
    zj = _point_jets(chart)
    wj = f.evaluate(zj)
    A2 = jets_to_coeffs(frame_rows(F2, wj))
    tgt_field = SimpleNamespace(F=F2, ctx=chart.ctx, A=A2, order=chart.order)
    tgt_conn = connection_from_frame_field(tgt_field)
    pi0 = src_conn.values()
    Pi0 = tgt_conn.values()
    z0 = chart.basepoint.z
    w0 = np.array([[x.value() if isinstance(x, Jet) else complex(x) for x in row]
                   for row in wj])
    data = PullbackData(F, F2, chart, pi0, Pi0, z0, w0)
    # the pullback of the target contact block must lie in span{phi}
    _, res = point_basis_decompose(data.Phi().reshape(-1, pi0.shape[-1]),
                                   data.phi_basis)
    data.phi_span_residual = res
    return data


# ---------------------------------------------------------------------------
# step-1 normalization

@dataclass
class NormalizationReport:
    c_matrix: np.ndarray
    c_diag: np.ndarray
    r: int
    h_tensor: np.ndarray  # (n, n2, q): h[j, J, alpha]
    applied_changes: list
    residuals: dict
    pass_lemma41: bool


def _decompose_c(data: PullbackData, tol: float):
    """Solve Phi_1^1 = c_alpha^beta phi_beta^alpha at the basepoint."""
    phi11 = data.Phi()[0, 0]
    coef, res = point_basis_decompose(phi11, data.phi_basis)
    if res > tol:
        raise RigidityError("normalize", "Phi_1^1 is not a source contact form")
    # row (g, d) of the basis is phi_g^d; the coefficient of phi_beta^alpha is c[alpha, beta]
    q = data.F.q
    return coef.reshape(q, q).T


def _decompose_h(data: PullbackData, tol: float):
    """Coefficients of Theta_1^J over {theta_alpha^j} mod phi."""
    q, n = data.F.q, data.F.n
    n2 = data.F2.n
    basis = np.concatenate([data.theta_basis, data.phi_basis], axis=0)
    coef, res = point_basis_decompose(data.Theta()[0], basis)
    if res > tol:
        raise RigidityError("normalize", "Theta_1 is not in span{theta, phi}")
    h = np.empty((n, n2, q), dtype=complex)
    for J in range(n2):
        for alpha in range(q):
            for j in range(n):
                h[j, J, alpha] = coef[J, alpha * n + j]
    return h


def normalize_step1(data: PullbackData, bound_ok: bool, tol: float = 1e-8) -> NormalizationReport:
    """Contact-block normalization and the rank-1 reduction.

    Steps: pick a nonvanishing diagonal Phi entry (permute it to position 1);
    decompose over the source contact forms; check Hermitian symmetry;
    diagonalize by a unitary source position change; verify positivity; dilate
    to make the leading eigenvalue 1; extract the h-coefficients of Theta_1
    and check their Gram relations; when the dimension bound holds, assert
    rank 1 and rotate the target X-frame so that h becomes the identity pattern.
    """
    F, F2 = data.F, data.F2
    q, n, q2, n2 = F.q, F.n, F2.q, F2.n
    m = data.pi0.shape[-1]
    changes: list = []
    residuals: dict = {"phi_span": data.phi_span_residual}

    def record(side, kind, U):
        changes.append({"side": side, "kind": kind, "matrix": U})

    # (a) a nonvanishing diagonal term, permuted to position 1
    diag_norms = [float(np.linalg.norm(data.Phi()[a, a])) for a in range(q2)]
    a_star = int(np.argmax(diag_norms))
    if diag_norms[a_star] <= tol:
        raise RigidityError("normalize",
                            "all diagonal Phi terms vanish: not an embedding here")
    if a_star != 0:
        P = np.eye(q2, dtype=complex)
        P[[0, a_star]] = P[[a_star, 0]]
        U = change_matrix(F2, FrameChange("position", {"W": P}))
        data.apply_target_change(U)
        record("target", "position", U)

    # (b)-(c) decompose and check Hermitian symmetry
    c = _decompose_c(data, tol)
    herm_defect = float(np.max(np.abs(c - c.conj().T)))
    residuals["c_hermitian"] = herm_defect
    if herm_defect > 1e-6:
        raise RigidityError("normalize", f"c-matrix Hermitian defect {herm_defect:.3g}")
    c_herm = (c + c.conj().T) / 2.0

    # (d) diagonalize by a unitary source position change, eigenvalues descending
    vals, vecs = np.linalg.eigh(c_herm)
    order = np.argsort(-vals)
    W = vecs[:, order].conj().T
    U = change_matrix(F, FrameChange("position", {"W": W}))
    data.apply_source_change(U)
    record("source", "position", U)
    c = _decompose_c(data, tol)
    residuals["c_offdiag"] = float(np.max(np.abs(c - np.diag(np.diag(c)))))

    # (e) retained eigenvalues must be positive
    c_diag = np.real(np.diag(c))
    scale = max(float(np.max(np.abs(c_diag))), 1.0)
    keep = c_diag > 1e-8 * scale
    r = int(np.sum(keep))
    if r == 0:
        raise RigidityError("normalize", "no positive retained eigenvalue")
    if np.any(c_diag < -1e-6 * scale):
        raise RigidityError("normalize", "negative retained eigenvalue in c")

    # (f) dilation on the source so that c_1 = 1
    lam = np.ones(q)
    lam[0] = c_diag[0] ** -0.5
    U = change_matrix(F, FrameChange("dilation", {"lam": lam}))
    data.apply_source_change(U)
    record("source", "dilation", U)
    c = _decompose_c(data, tol)
    c_diag = np.real(np.diag(c))
    residuals["c_leading"] = abs(c_diag[0] - 1.0)

    # (g)-(h) h-coefficients and their Gram relations
    h = _decompose_h(data, tol)
    c_pad = np.where(keep, c_diag, 0.0)
    gram = np.einsum("jJa,kJb->abjk", h, np.conj(h))
    target = np.einsum("a,ab,jk->abjk", c_pad, np.eye(q), np.eye(n))
    residuals["h_gram"] = float(np.max(np.abs(gram - target)))

    pass_lemma41 = False
    if bound_ok:
        if r != 1:
            raise RigidityError("normalize",
                                f"rank-1 reduction failed: r = {r} with the bound in force")
        H = h[:, :, 0].T  # (n2, n), approximately orthonormal columns
        Hq, Rq = np.linalg.qr(H)
        # fix the column phases so that Hq reproduces H itself
        dphase = np.diag(Rq)
        Hq = Hq * (dphase / np.abs(dphase))
        K = scipy.linalg.null_space(Hq.conj().T)
        R = np.concatenate([Hq, K], axis=1).T  # rotation with Theta-tilde = Theta R*
        U = np.eye(F2.dim, dtype=complex)
        U[q2 : q2 + n2, q2 : q2 + n2] = R
        data.apply_target_change(U)
        record("target", "rotation", U)
        h = _decompose_h(data, tol)
        ident = np.zeros_like(h)
        for j in range(n):
            ident[j, j, 0] = 1.0
        residuals["h_identity"] = float(np.max(np.abs(h - ident)))
        pass_lemma41 = residuals["h_identity"] <= max(tol, 1e-8)

    return NormalizationReport(c, c_diag, r, h, changes, residuals, pass_lemma41)


# ---------------------------------------------------------------------------
# aligned-state verification (structured target section along the map)

def _iota_rows(F: SignatureForm, F2: SignatureForm, rows: np.ndarray) -> np.ndarray:
    """Embed row vectors of C^{p+q} into C^{p2+q2}: coord a -> a (a < q), q+i -> q2+i."""
    q, p = F.q, F.p
    q2 = F2.q
    out = np.full(rows.shape[:-1] + (F2.dim,), 0j, dtype=object)
    out[..., :q] = rows[..., :q]
    out[..., q2 : q2 + p] = rows[..., q:]
    return out


def aligned_pullback(f, chart: ChartField):
    """Target connection along f in the structured section adapted to the
    block-linear model; meaningful when f is (close to) the standard embedding."""
    F = chart.F
    p, q, n = F.p, F.q, F.n
    p2, q2 = f.target
    F2 = SignatureForm(p2, q2)
    n2 = F2.n
    N2 = F2.dim
    ctx = chart.ctx

    A_src = coeffs_to_jets(ctx, chart.A)
    zj = _point_jets(chart)
    wj = f.evaluate(zj)

    # target lift rows: row b of [I_{q2} | w^t]
    lift = np.full((q2, N2), 0j, dtype=object)
    for b in range(q2):
        lift[b, b] = 1.0 + 0j
    lift[:, q2:] = wj.T

    A2 = np.full((N2, N2), 0j, dtype=object)
    K = A_src[:q, :q]
    A2[:q] = np.dot(K, lift[:q])
    A2[q:q2] = lift[q:q2]
    A2[q2 : q2 + n] = _iota_rows(F, F2, A_src[q : q + n])
    for s in range(n2 - n):
        A2[q2 + n + s, q2 + p + (q2 - q) + s] = 1.0 + 0j
    A2[q2 + n2 : q2 + n2 + q] = _iota_rows(F, F2, A_src[q + n :])
    for t in range(q2 - q):
        A2[q2 + n2 + q + t, q + t] = -0.5 + 0j
        A2[q2 + n2 + q + t, q2 + p + t] = 0.5 + 0j

    field_ = SimpleNamespace(F=F2, ctx=ctx, A=jets_to_coeffs(A2), order=chart.order)
    conn = connection_from_frame_field(field_)
    src_conn = connection_from_frame_field(chart)
    return src_conn, conn


def verify_aligned_state(f, chart: ChartField, tol: float = 1e-7) -> dict:
    """Residuals of the aligned-state identities in the structured section:
    the pulled-back capital blocks must restrict to the source ones and the
    extra rows/columns must vanish."""
    F = chart.F
    q, n = F.q, F.n
    p2, q2 = f.target
    F2 = SignatureForm(p2, q2)
    n2 = F2.n
    src_conn, tgt_conn = aligned_pullback(f, chart)
    pi0 = src_conn.values()
    Pi0 = tgt_conn.values()
    m = pi0.shape[-1]

    Phi = Pi0[:q2, q2 + n2 :]
    Theta = Pi0[:q2, q2 : q2 + n2]
    Psi = Pi0[:q2, :q2]
    Omega = Pi0[q2 : q2 + n2, q2 : q2 + n2]
    Sigma_y = Pi0[q2 + n2 :, q2 : q2 + n2]

    phi_ext = np.zeros((q2, q2, m), dtype=complex)
    phi_ext[:q, :q] = pi0[:q, q + n :]
    theta_ext = np.zeros((q2, n2, m), dtype=complex)
    theta_ext[:q, :n] = pi0[:q, q : q + n]

    report = {
        "phi_match": float(np.max(np.abs(Phi - phi_ext))),
        "theta_match": float(np.max(np.abs(Theta - theta_ext))),
        "psi_extra": float(np.max(np.abs(Psi[q:]))) if q2 > q else 0.0,
        "omega_extra": float(np.max(np.abs(Omega[:, n:]))) if n2 > n else 0.0,
        "sigma_extra": float(np.max(np.abs(Sigma_y[:, n:]))) if n2 > n else 0.0,
    }
    report["max"] = max(v for k, v in report.items())
    report["pass"] = report["max"] <= tol
    return report


# ---------------------------------------------------------------------------
# image-plane analysis

@dataclass
class PlaneAnalysisReport:
    V1: np.ndarray
    V2: np.ndarray
    span_dim: int
    dim_V1: int
    dim_V2: int
    signature: tuple
    null_residual: float
    intersection_ok: bool
    expected: bool = False


def _lift_basis(f, z: np.ndarray) -> np.ndarray:
    q2 = f.target[1]
    L = np.concatenate([np.eye(q2, dtype=complex), f.evaluate(z)], axis=0)
    Q, _ = np.linalg.qr(L)
    return Q


def _plane_dims(f, pts, J2):
    N2 = J2.shape[0]
    bases = [_lift_basis(f, z) for z in pts]
    M = len(pts) * np.eye(N2, dtype=complex)
    for B in bases:
        M -= B @ B.conj().T
    w, vecs = np.linalg.eigh(M)
    dim_V2 = int(np.sum(w < 1e-8 * len(pts)))
    V2 = vecs[:, :dim_V2]
    stacked = np.concatenate(bases, axis=1)
    sv = np.linalg.svd(stacked, compute_uv=False)
    span_dim = int(np.sum(sv > 1e-6 * sv[0]))
    U_span = np.linalg.svd(stacked, full_matrices=False)[0][:, :span_dim]
    return V2, dim_V2, U_span, span_dim


def plane_analysis(f, F: SignatureForm, samples=None, seed: int = 11,
                   count: int | None = None) -> PlaneAnalysisReport:
    """Common part and joint span of the image q2-planes, split into a
    form-nondegenerate part V1 and a null common part V2."""
    p, q = f.source
    p2, q2 = f.target
    F2 = SignatureForm(p2, q2)
    J2 = F2.J
    need = max(2 * p * q, p + q)
    if count is None:
        count = 3 * need
    if samples is None:
        samples = [bp.z for bp in sample_boundary(F, seed, count)]
    if len(samples) < need:
        raise ValueError(f"need at least {need} samples, got {len(samples)}")

    half = len(samples) // 2
    V2a, d2a, _, spa = _plane_dims(f, samples[:half], J2)
    V2, dim_V2, U_span, span_dim = _plane_dims(f, samples, J2)
    if (d2a, spa) != (dim_V2, span_dim):
        raise ValueError("plane dimension estimates did not stabilize; add samples")

    # V1: the form-orthogonal complement of V2 inside the joint span
    if dim_V2 > 0:
        C = V2.conj().T @ J2 @ U_span
        null = scipy.linalg.null_space(C)
        V1 = U_span @ null
    else:
        V1 = U_span
    dim_V1 = V1.shape[1]

    inter_rank = np.linalg.matrix_rank(np.concatenate([V1, V2], axis=1), tol=1e-8)
    G1 = V1.conj().T @ J2 @ V1
    w1 = np.linalg.eigvalsh(G1)
    sig = (int(np.sum(w1 > 1e-8)), int(np.sum(w1 < -1e-8)))
    null_res = float(np.max(np.abs(V2.conj().T @ J2 @ V2))) if dim_V2 else 0.0

    expected = (dim_V1 == p + q and dim_V2 == q2 - q
                and span_dim == p + q + (q2 - q) and sig == (p, q)
                and null_res <= 1e-8)
    return PlaneAnalysisReport(V1, V2, span_dim, dim_V1, dim_V2, sig,
                               null_res, inter_rank == dim_V1 + dim_V2, expected)


# ---------------------------------------------------------------------------
# linear-equivalence recovery

@dataclass
class EquivalenceReport:
    equivalent: bool
    g: np.ndarray | None
    g2: np.ndarray | None
    residual: float
    status: str
    witness: tuple | None = None


def _standard_basis_blocks(F: SignatureForm, F2: SignatureForm):
    p, q = F.p, F.q
    p2, q2 = F2.p, F2.q
    N2 = F2.dim
    d2 = q2 - q
    E = np.eye(N2, dtype=complex)
    V1 = np.concatenate([E[:, :q], E[:, q2 : q2 + p]], axis=1)
    V2 = np.stack([E[:, q + s] + E[:, q2 + p + s] for s in range(d2)], axis=1) \
        if d2 else np.zeros((N2, 0), dtype=complex)
    W = np.stack([(-E[:, q + s] + E[:, q2 + p + s]) / 2.0 for s in range(d2)], axis=1) \
        if d2 else np.zeros((N2, 0), dtype=complex)
    nu = N2 - (p + q) - 2 * d2
    U = E[:, q2 + p + d2 : q2 + p + d2 + nu]
    return V1, V2, W, U


def _congruence_normalize_V1(V1: np.ndarray, J2: np.ndarray, q: int, p: int):
    G1 = V1.conj().T @ J2 @ V1
    w, vecs = np.linalg.eigh(G1)
    if int(np.sum(w < 0)) != q or int(np.sum(w > 0)) != p:
        raise RigidityError("equivalence", "V1 form signature is not (p, q)")
    return V1 @ vecs / np.sqrt(np.abs(w))


def _hyperbolic_partners(V1n, V2, J2, sign_diag):
    """Null partners W with <w_t, v2_s> = delta, form-orthogonal to V1."""
    d2 = V2.shape[1]
    if d2 == 0:
        return np.zeros((V2.shape[0], 0), dtype=complex)
    A = np.concatenate([V2.conj().T @ J2, V1n.conj().T @ J2], axis=0)
    rhs = np.concatenate([np.eye(d2), np.zeros((V1n.shape[1], d2))], axis=0)
    W, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    # null-correct: w_t -= <w_t, w_s>/2 * v2_s; the pairing <w_t, v2_s> = delta
    # is untouched because V2 is null
    Gw = W.conj().T @ J2 @ W  # Gw[s, t] = <w_t, w_s>
    return W - 0.5 * V2 @ Gw


def solve_linear_equivalence(f, report: PlaneAnalysisReport, F: SignatureForm,
                             samples=None, seed: int = 13, count: int = 500,
                             tol: float = 1e-8) -> EquivalenceReport:
    """Recover automorphisms (g, g2) with g2 o f o g = standard embedding.

    Builds a target automorphism g2 by form-congruence sending (V1, V2) to the
    standard coordinate subspaces, reads off the residual source plane map,
    fits a source automorphism by a homogeneous least-squares system, and
    verifies the composition on fresh samples.
    """
    p, q = f.source
    p2, q2 = f.target
    F2 = SignatureForm(p2, q2)
    J2 = F2.J
    N2 = F2.dim
    d2 = q2 - q

    if not report.expected:
        return EquivalenceReport(False, None, None, np.inf,
                                 "plane structure incompatible with the linear model")

    # our side: congruence basis (V1 normalized | V2 | hyperbolic partners | rest)
    V1n = _congruence_normalize_V1(report.V1, J2, q, p)
    W = _hyperbolic_partners(V1n, report.V2, J2, None)
    used = np.concatenate([V1n, report.V2, W], axis=1)
    Cmat = used.conj().T @ J2
    Bu = scipy.linalg.null_space(Cmat)
    if Bu.shape[1]:
        Gu = Bu.conj().T @ J2 @ Bu
        wu, vu = np.linalg.eigh(Gu)
        if np.any(wu <= 0):
            raise RigidityError("equivalence", "residual block is not positive definite")
        Bu = Bu @ vu / np.sqrt(wu)
    T_ours = np.concatenate([V1n, report.V2, W, Bu], axis=1)

    S1, S2, SW, SU = _standard_basis_blocks(F, F2)
    T_std = np.concatenate([S1, S2, SW, SU], axis=1)

    Gp_ours = T_ours.conj().T @ J2 @ T_ours
    Gp_std = T_std.conj().T @ J2 @ T_std
    if np.max(np.abs(Gp_ours - Gp_std)) > 1e-6:
        raise RigidityError("equivalence", "congruence Gram patterns disagree")

    g2 = T_std @ np.linalg.inv(T_ours)
    det = np.linalg.det(g2)
    det /= abs(det)
    # absorb the determinant phase into the first V1 basis vector
    T_ours[:, 0] *= det
    g2 = T_std @ np.linalg.inv(T_ours)

    # residual plane map in coordinates
    if samples is None:
        samples = [bp.z for bp in sample_boundary(F, seed, count)]
    fit_samples = samples[: max(4 * (p + q) ** 2 // (p * q) + 6, 12)]
    rows = []
    for z in fit_samples:
        L = np.concatenate([np.eye(q2, dtype=complex), f.evaluate(z)], axis=0)
        M = g2 @ L
        top = M[:q2]
        if np.linalg.cond(top) > 1e10:
            continue
        zc = (M @ np.linalg.inv(top))[q2:]
        zeta = zc[:p, :q]
        Q = np.concatenate([-zeta, np.eye(p, dtype=complex)], axis=1)
        Ls = np.concatenate([np.eye(q, dtype=complex), z], axis=0)
        rows.append(np.kron(Ls.T, Q))
    A = np.concatenate(rows, axis=0)
    _, sv, Vh = np.linalg.svd(A)
    if sv[-2] < 1e-6 * sv[0]:
        return EquivalenceReport(False, None, g2, np.inf,
                                 "residual plane map is not uniquely linear")
    G = Vh[-1].conj().reshape((p + q, p + q), order="F")
    K = G.conj().T @ F.J @ G
    cc = float(np.real(np.trace(K @ F.J)) / F.dim)
    if cc <= 0:
        return EquivalenceReport(False, None, g2, np.inf,
                                 "fitted plane map is not a form isometry")
    G /= np.sqrt(cc)
    iso_res = float(np.max(np.abs(G.conj().T @ F.J @ G - F.J)))
    dG = np.linalg.det(G)
    G *= np.exp(-1j * np.angle(dG) / F.dim)
    g = np.linalg.inv(G)

    # verification on fresh samples
    corrected = ConjugatedMap(g, f, g2)
    std_like = _standard_pattern(p, q, p2, q2)
    worst = iso_res
    for z in samples:
        try:
            w = corrected.evaluate(z)
        except np.linalg.LinAlgError:
            continue
        worst = max(worst, float(np.max(np.abs(w - std_like(z)))))
    ok = worst <= tol
    status = "equivalent" if ok else "composition residual above tolerance"
    return EquivalenceReport(ok, g, g2, worst, status)


def _standard_pattern(p, q, p2, q2):
    def pattern(z):
        out = np.zeros((p2, q2), dtype=complex)
        out[:p, :q] = z
        for s in range(q2 - q):
            out[p + s, q + s] = 1.0
        return out

    return pattern


# ---------------------------------------------------------------------------
# non-injectivity witness

def injectivity_witness(f, F: SignatureForm, seed: int = 5,
                        budget: int = 2000) -> tuple | None:
    """Search for z1 != z2 on the boundary with f(z1) = f(z2)."""
    p, q = F.p, F.q
    rng = np.random.default_rng(seed)
    phases = [1.0, -1.0, 1j, -1j]

    def images_equal(z1, z2):
        return (np.max(np.abs(z1 - z2)) > 1e-6
                and np.max(np.abs(f.evaluate(z1) - f.evaluate(z2))) <= 1e-12)

    # structured family: single-row-supported columns with sign/phase flips
    tried = 0
    structured = []
    for k in range(p):
        z = np.zeros((p, q), dtype=complex)
        ok = True
        for a in range(q):
            if k + a >= p:
                ok = False
                break
            z[p - 1 - k - a, a] = 1.0
        if ok:
            structured.append(z)
    for z in structured:
        for ph in phases:
            z1 = z * ph
            for flip in (-z1, np.conj(z1), -np.conj(z1)):
                tried += 1
                if images_equal(z1, flip):
                    return z1, flip
    # random pairs with sign-flip transforms
    while tried < budget:
        z = sample_boundary(F, int(rng.integers(1 << 31)), 1)[0].z
        for D in (-np.eye(q), np.diag([(-1.0) ** a for a in range(q)])):
            z2 = z @ D
            tried += 1
            if images_equal(z, z2):
                return z, z2
    return None


# ---------------------------------------------------------------------------
# full pipeline

def bound_holds(F: SignatureForm, F2: SignatureForm) -> bool:
    """The strict dimension bound p2 - q2 < 2 (p - q)."""
    return F2.n < 2 * F.n


def run_rigidity_pipeline(f, seed: int = 0, order: int = 2,
                          section_seed: int | None = None,
                          count: int = 500, map_id: str = "map") -> dict:
    """End-to-end analysis; returns a JSON-serializable report."""
    p, q = f.source
    p2, q2 = f.target
    F = SignatureForm(p, q)
    F2 = SignatureForm(p2, q2)
    bound_ok = bound_holds(F, F2)

    z0 = sample_boundary(F, seed, 1)[0]
    chart = chart_through(F, z0, order=order, section_seed=section_seed)
    data = pullback_forms(f, chart)
    report = {
        "schema_version": 1,
        "map_id": map_id,
        "rng": f"numpy-pcg64 seed={seed}",
        "shapes": {"source": [p, q], "target": [p2, q2]},
        "bound_ok": bound_ok,
        "basepoints": [[[z0.z[i, j].real, z0.z[i, j].imag] for j in range(q)]
                       for i in range(p)],
    }
    try:
        norm = normalize_step1(data, bound_ok)
        report["c_matrix"] = [[[c.real, c.imag] for c in row] for row in norm.c_matrix]
        report["r"] = norm.r
        report["h_residual"] = norm.residuals.get("h_identity",
                                                  norm.residuals["h_gram"])
        report["lemma41"] = bool(norm.pass_lemma41)
        report["normalization_residuals"] = {k: float(v)
                                             for k, v in norm.residuals.items()}
    except RigidityError as exc:
        report["normalization_error"] = str(exc)
        norm = None

    plane = plane_analysis(f, F, seed=seed + 1)
    report["plane_dims"] = {"V1": plane.dim_V1, "V2": plane.dim_V2,
                            "span": plane.span_dim,
                            "signature": list(plane.signature),
                            "expected": bool(plane.expected)}

    equiv = solve_linear_equivalence(f, plane, F, seed=seed + 2, count=count)
    if equiv.equivalent:
        corrected = ConjugatedMap(equiv.g, f, equiv.g2)
        z1 = sample_boundary(F, seed + 3, 1)[0]
        chart2 = chart_through(F, z1, order=order, section_seed=section_seed)
        aligned = verify_aligned_state(corrected, chart2)
        report["prop61_residuals"] = {k: float(v) for k, v in aligned.items()
                                      if k != "pass"}
        report["equivalence"] = {"status": "equivalent",
                                 "residual": float(equiv.residual)}
    else:
        witness = injectivity_witness(f, F, seed=seed + 4)
        entry = {"status": "inequivalent", "residual": None}
        if witness is not None:
            z1, z2 = witness
            entry["witness"] = {
                "z1": [[[v.real, v.imag] for v in row] for row in z1],
                "z2": [[[v.real, v.imag] for v in row] for row in z2],
                "image_gap": float(np.max(np.abs(f.evaluate(z1) - f.evaluate(z2)))),
            }
        report["equivalence"] = entry
    return report
