"""Pointwise Cartan-lemma solver for complex-valued 1-forms.

A 1-form at a point is an evaluated functional: a complex row vector over the
real coordinate directions of the tangent space.  Given independent forms
theta_1..theta_r and further forms phi_1..phi_r with

    theta_1 ^ phi_1 + ... + theta_r ^ phi_r = 0,

each phi_j lies in span{theta_1..theta_r}; ``cartan_decompose`` certifies this
and returns the coefficient matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_REL_TOL = 1e-9


@dataclass
class FormSystem:
    """r paired 1-form functionals on a real tangent space of dimension D."""

    thetas: np.ndarray  # (r, D) complex
    phis: np.ndarray  # (r, D) complex

    def __post_init__(self):
        self.thetas = np.atleast_2d(np.asarray(self.thetas, dtype=complex))
        self.phis = np.atleast_2d(np.asarray(self.phis, dtype=complex))
        if self.thetas.shape != self.phis.shape:
            raise ValueError("thetas and phis must have matching shapes")


@dataclass
class CartanReport:
    coeffs: np.ndarray | None  # (r, r) with phi_j = sum_k coeffs[j,k] theta_k
    wedge_residual: float
    decomposition_residual: float
    symmetry_defect: float
    ok: bool


def wedge_sum_residual(sys: FormSystem) -> float:
    """Max-abs of the antisymmetrized tensor sum_i theta_i (x) phi_i - phi_i (x) theta_i."""
    T = np.einsum("ia,ib->ab", sys.thetas, sys.phis)
    return float(np.max(np.abs(T - T.T))) if T.size else 0.0


def cartan_decompose(sys: FormSystem, tol: float | None = None) -> CartanReport:
    """Solve phi_j = sum_k c_j^k theta_k by least squares and certify the result.

    The wedge-sum precondition is checked first; if it fails the report carries
    no coefficients.  The symmetry defect ||c - c^t|| is informational only.
    """
    r, D = sys.thetas.shape
    svals = np.linalg.svd(sys.thetas, compute_uv=False)
    scale = svals[0] if svals.size else 1.0
    if tol is None:
        tol = DEFAULT_REL_TOL * max(scale, 1.0)
    if np.linalg.matrix_rank(sys.thetas, tol=1e-8 * max(scale, 1.0)) < r:
        raise np.linalg.LinAlgError("theta forms are not linearly independent")

    wres = wedge_sum_residual(sys)
    if wres > tol * max(scale, 1.0):
        return CartanReport(None, wres, np.inf, np.inf, False)

    # phis (r, D) = c (r, r) @ thetas (r, D): solve thetas^T c^T = phis^T
    c, *_ = np.linalg.lstsq(sys.thetas.T, sys.phis.T, rcond=None)
    c = c.T
    resid = float(np.max(np.abs(c @ sys.thetas - sys.phis)))
    sym = float(np.max(np.abs(c - c.T)))
    return CartanReport(c, wres, resid, sym, resid <= tol)
