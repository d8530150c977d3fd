"""Maurer-Cartan connection of a jet-valued frame field and its block structure.

The connection pi = dA A^{-1} is a matrix of 1-forms satisfying dZ = pi Z for
the frame rows.  It is trace-free, obeys the symmetry identity
pi S + S pi* = 0, and the flat structure equation d pi = pi ^ pi, which splits
into six named block equations checked individually.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import SignatureForm
from .jets import JetContext, formmat_d, formmat_d1, formmat_wedge11, jet_matinv


@dataclass
class ConnectionMatrix:
    """pi as jet coefficients, shape (N, N, m, ncoeffs); order = frame order - 1."""

    F: SignatureForm
    ctx: JetContext
    pi: np.ndarray
    order: int

    # Named blocks, rows x columns in the (Z, X, Y) partition.
    @property
    def psi(self):  # (Z, Z)
        q = self.F.q
        return self.pi[:q, :q]

    @property
    def theta(self):  # (Z, X)
        q, n = self.F.q, self.F.n
        return self.pi[:q, q : q + n]

    @property
    def phi(self):  # (Z, Y): the contact block
        q, n = self.F.q, self.F.n
        return self.pi[:q, q + n :]

    @property
    def sigma_x(self):  # (X, Z)
        q, n = self.F.q, self.F.n
        return self.pi[q : q + n, :q]

    @property
    def omega(self):  # (X, X)
        q, n = self.F.q, self.F.n
        return self.pi[q : q + n, q : q + n]

    @property
    def theta_x(self):  # (X, Y)
        q, n = self.F.q, self.F.n
        return self.pi[q : q + n, q + n :]

    @property
    def xi(self):  # (Y, Z)
        q, n = self.F.q, self.F.n
        return self.pi[q + n :, :q]

    @property
    def sigma_y(self):  # (Y, X)
        q, n = self.F.q, self.F.n
        return self.pi[q + n :, q : q + n]

    @property
    def psi_hat(self):  # (Y, Y)
        q, n = self.F.q, self.F.n
        return self.pi[q + n :, q + n :]

    def values(self) -> np.ndarray:
        """Evaluated functionals at the basepoint: (N, N, m) complex."""
        return self.pi[..., 0].copy()

    def trace_residual(self) -> float:
        tr = np.einsum("iivc->vc", self.pi)
        return float(np.max(np.abs(tr)))

    def symmetry_residual(self) -> float:
        """Max-abs of pi S + S pi-dagger over all jet coefficients."""
        S = self.F.S
        dag = np.conj(np.swapaxes(self.pi, 0, 1))
        res = np.einsum("ikvc,kj->ijvc", self.pi, S) + np.einsum("ik,kjvc->ijvc", S, dag)
        return float(np.max(np.abs(res)))


def connection_from_frame_field(chart) -> ConnectionMatrix:
    """pi = dA A^{-1} for a ChartField-like object (attributes F, ctx, A, order)."""
    ctx: JetContext = chart.ctx
    if chart.order < 1:
        raise ValueError("frame field must have jet order >= 1")
    order = chart.order - 1
    A = chart.A
    if abs(np.linalg.det(A[:, :, 0])) < 1e-12:
        raise RuntimeError("internal error: singular frame at basepoint")
    dA = formmat_d(ctx, A, order)  # (N, N, m, C)
    Ainv = ctx.truncate(jet_matinv(ctx, A), order)
    pi = np.empty_like(dA)
    for v in range(ctx.num_vars):
        pi[:, :, v, :] = _matmul_trunc(ctx, dA[:, :, v, :], Ainv, order)
    return ConnectionMatrix(chart.F, ctx, pi, order)


def _matmul_trunc(ctx, A, B, order):
    out = np.zeros((A.shape[0], B.shape[1], ctx.ncoeffs), dtype=complex)
    for ci, cj, ck in zip(ctx._mi, ctx._mj, ctx._mk):
        if ctx.degs[ck] > order:
            continue
        out[:, :, ck] += A[:, :, ci] @ B[:, :, cj]
    return out


_BLOCK_EQUATIONS = {
    # residual blocks of d pi - pi ^ pi in the (Z, X, Y) partition
    "d_phi": ("Z", "Y"),
    "d_theta": ("Z", "X"),
    "d_psi": ("Z", "Z"),
    "d_omega": ("X", "X"),
    "d_sigma_x": ("X", "Z"),
    "d_xi": ("Y", "Z"),
}


def _block_slices(F: SignatureForm):
    q, n = F.q, F.n
    return {"Z": slice(0, q), "X": slice(q, q + n), "Y": slice(q + n, None)}


def structure_equation_residual(C: ConnectionMatrix) -> np.ndarray:
    """d pi - pi ^ pi as jet coefficients (N, N, npairs, C) at order - 1."""
    if C.order < 1:
        raise ValueError("structure equations need connection jets of order >= 1")
    ctx = C.ctx
    order = C.order - 1
    dpi = formmat_d1(ctx, C.pi, order)
    ww = formmat_wedge11(ctx, C.pi, C.pi, order)
    return ctx.truncate(dpi - ww, order)


def check_structure_equations(C: ConnectionMatrix, tol: float = 1e-9) -> dict:
    """Global and blockwise max-abs residuals of d pi = pi ^ pi, plus the
    trace-free and symmetry identities."""
    res = structure_equation_residual(C)
    sl = _block_slices(C.F)
    report = {
        "global": float(np.max(np.abs(res))) if res.size else 0.0,
        "trace": C.trace_residual(),
        "symmetry": C.symmetry_residual(),
    }
    for name, (rb, cb) in _BLOCK_EQUATIONS.items():
        block = res[sl[rb], sl[cb]]
        report[name] = float(np.max(np.abs(block))) if block.size else 0.0
    report["pass"] = report["global"] <= tol
    return report


def contact_modulo_reduction(C: ConnectionMatrix, tol: float = 1e-9) -> dict:
    """Check d phi = theta ^ theta_x modulo the contact ideal, at the basepoint.

    The remainder of d phi - theta ^ theta_x after least-squares projection
    onto 2-forms of the shape phi ^ (coordinate 1-form) must vanish.
    """
    ctx = C.ctx
    if ctx.npairs == 0:
        return {"remainder": 0.0, "pass": True}
    order = C.order - 1
    dphi = formmat_d1(ctx, C.phi, order)[:, :, :, 0]  # (q, q, npairs) at basepoint
    ww = formmat_wedge11(ctx, C.theta, C.theta_x, order)[:, :, :, 0]
    R = dphi - ww  # (q, q, npairs)

    # basis of the evaluated contact ideal: phi_gd ^ dt_v for all (g, d, v)
    phi0 = C.phi[..., 0]  # (q, q, m) values
    pi_, pj_ = ctx.pair_i, ctx.pair_j
    gens = []
    for g in range(C.F.q):
        for d in range(C.F.q):
            for v in range(ctx.num_vars):
                dt = np.zeros(ctx.num_vars)
                dt[v] = 1.0
                w = np.outer(phi0[g, d], dt)
                gens.append((w - w.T)[pi_, pj_])
    Gmat = np.array(gens).T  # (npairs, ngens)
    flat = R.reshape(-1, ctx.npairs).T  # (npairs, q*q)
    coef, *_ = np.linalg.lstsq(Gmat, flat, rcond=None)
    rem = float(np.max(np.abs(flat - Gmat @ coef)))
    return {"remainder": rem, "pass": rem <= tol}


def point_basis_decompose(target: np.ndarray, basis: np.ndarray,
                          tol: float = 1e-9) -> tuple[np.ndarray, float]:
    """Least-squares decomposition of 1-form functionals over a basis.

    target: (..., m) functionals; basis: (nb, m).  Returns coefficients of
    shape (..., nb) and the max-abs residual.  Raises if the basis functionals
    are not independent as complex functionals on the real directions.
    """
    target = np.asarray(target, dtype=complex)
    basis = np.atleast_2d(np.asarray(basis, dtype=complex))
    nb, m = basis.shape
    scale = max(float(np.max(np.abs(basis))), 1.0)
    if np.linalg.matrix_rank(basis, tol=1e-8 * scale) < nb:
        raise np.linalg.LinAlgError("rank-deficient decomposition basis")
    flat = target.reshape(-1, m)
    coef, *_ = np.linalg.lstsq(basis.T, flat.T, rcond=None)
    resid = float(np.max(np.abs(basis.T @ coef - flat.T))) if flat.size else 0.0
    return coef.T.reshape(target.shape[:-1] + (nb,)), resid
