"""Truncated multivariate Taylor jets and low-degree exterior calculus.

Jets are Taylor expansions in m REAL parameters, truncated at a fixed total
degree; all complex structure lives in the coefficients.  Exterior forms of
degree 0, 1, 2 carry jet coefficients; degree is capped at 2 because the
structure equations never need more.

Two representations coexist:

* ``Jet`` -- a scalar with operator overloading, usable inside object-dtype
  numpy arrays (this is how frame constructions run unchanged over jets).
* raw coefficient ndarrays with the coefficient axis last, consumed by the
  vectorized helpers (``mul_arrays``, ``jet_matmul`` ...) that the
  connection machinery uses.

Coefficients are stored densely in graded-lexicographic multi-index order.
"""

from __future__ import annotations

import itertools
import math
import numbers
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


def _multi_indices(num_vars: int, order: int):
    """All exponent tuples of total degree <= order, graded-lex order."""
    out = []
    for deg in range(order + 1):
        # weak compositions of deg into num_vars parts, lex descending first var
        def gen(prefix, remaining, slots):
            if slots == 1:
                out.append(prefix + (remaining,))
                return
            for first in range(remaining, -1, -1):
                gen(prefix + (first,), remaining - first, slots - 1)

        gen((), deg, num_vars)
    return out


class JetContext:
    """Shared tables for a fixed (num_vars, order) truncation."""

    def __init__(self, num_vars: int, order: int):
        if num_vars < 0 or order < 0:
            raise ValueError("num_vars and order must be nonnegative")
        self.num_vars = num_vars
        self.order = order
        exps = _multi_indices(num_vars, order)
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), num_vars)
        self.ncoeffs = len(exps)
        self.degs = self.exps.sum(axis=1)
        self.index = {e: i for i, e in enumerate(exps)}

        # multiplication pair tables, one per truncation order
        mi, mj, mk = [], [], []
        for i in range(self.ncoeffs):
            di = self.degs[i]
            for j in range(self.ncoeffs):
                if di + self.degs[j] > order:
                    continue
                k = self.index[tuple(self.exps[i] + self.exps[j])]
                mi.append(i)
                mj.append(j)
                mk.append(k)
        self._mi = np.array(mi, dtype=np.int64)
        self._mj = np.array(mj, dtype=np.int64)
        self._mk = np.array(mk, dtype=np.int64)
        data = np.ones(len(mi))
        # maps the product-pair axis onto output coefficients
        self._scatter = sp.csr_matrix(
            (data, (self._mk, np.arange(len(mi)))), shape=(self.ncoeffs, len(mi))
        )

        # derivative matrices: deriv(a, v) = a @ D[v]
        self.D = np.zeros((num_vars, self.ncoeffs, self.ncoeffs))
        for src in range(self.ncoeffs):
            e = self.exps[src]
            for v in range(num_vars):
                if e[v] > 0:
                    tgt = tuple(e - np.eye(num_vars, dtype=np.int64)[v])
                    self.D[v, src, self.index[tgt]] = e[v]

        # 2-form basis: pairs (i, j) with i < j
        self.pair_i, self.pair_j = [], []
        self.pair_index = -np.ones((num_vars, num_vars), dtype=np.int64)
        for i in range(num_vars):
            for j in range(i + 1, num_vars):
                self.pair_index[i, j] = len(self.pair_i)
                self.pair_i.append(i)
                self.pair_j.append(j)
        self.pair_i = np.array(self.pair_i, dtype=np.int64)
        self.pair_j = np.array(self.pair_j, dtype=np.int64)
        self.npairs = len(self.pair_i)

    def mask_upto(self, order: int) -> np.ndarray:
        return self.degs <= order

    def truncate(self, coeffs: np.ndarray, order: int) -> np.ndarray:
        if order >= self.order:
            return coeffs
        out = coeffs.copy()
        out[..., ~self.mask_upto(order)] = 0.0
        return out

    def mul_arrays(self, a: np.ndarray, b: np.ndarray, order: int | None = None) -> np.ndarray:
        """Truncated product along the trailing coefficient axis (broadcasting)."""
        a, b = np.broadcast_arrays(a[..., self._mi], b[..., self._mj])
        prod = a * b
        lead = prod.shape[:-1]
        flat = prod.reshape(-1, prod.shape[-1])
        out = (self._scatter @ flat.T).T.reshape(lead + (self.ncoeffs,))
        if order is not None:
            out = self.truncate(out, order)
        return out

    def deriv_arrays(self, a: np.ndarray, v: int) -> np.ndarray:
        return a @ self.D[v]

    def const(self, value) -> np.ndarray:
        c = np.zeros(self.ncoeffs, dtype=complex)
        c[0] = value
        return c

    def var(self, v: int) -> np.ndarray:
        c = np.zeros(self.ncoeffs, dtype=complex)
        e = tuple(np.eye(self.num_vars, dtype=np.int64)[v])
        c[self.index[e]] = 1.0
        return c


class Jet:
    """Scalar truncated Taylor series; immutable in practice."""

    __slots__ = ("ctx", "coeffs", "order")

    def __init__(self, ctx: JetContext, coeffs, order: int | None = None):
        self.ctx = ctx
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if self.coeffs.shape != (ctx.ncoeffs,):
            raise ValueError("coefficient vector has wrong length")
        self.order = ctx.order if order is None else order

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, ctx: JetContext, value) -> "Jet":
        return cls(ctx, ctx.const(value))

    @classmethod
    def variable(cls, ctx: JetContext, v: int) -> "Jet":
        return cls(ctx, ctx.var(v))

    def value(self) -> complex:
        """Constant term."""
        return complex(self.coeffs[0])

    # -- ring operations ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.ctx is not self.ctx:
                raise ValueError("jets from different contexts")
            return other
        if isinstance(other, numbers.Complex):
            return Jet.constant(self.ctx, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.ctx, self.coeffs + o.coeffs, min(self.order, o.order))

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.ctx, -self.coeffs, self.order)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.ctx, self.coeffs - o.coeffs, min(self.order, o.order))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.ctx, o.coeffs - self.coeffs, min(self.order, o.order))

    def __mul__(self, other):
        if isinstance(other, numbers.Complex):
            return Jet(self.ctx, self.coeffs * complex(other), self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        return Jet(self.ctx, self.ctx.mul_arrays(self.coeffs, o.coeffs, order), order)

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("jet with zero constant term has no inverse")
        # Neumann series of 1/(1 - u) with u = 1 - self/c0
        u = Jet(self.ctx, self.ctx.const(1.0) - self.coeffs / c0, self.order)
        acc = Jet.constant(self.ctx, 1.0)
        term = Jet.constant(self.ctx, 1.0)
        for _ in range(self.order):
            term = term * u
            acc = acc + term
        return Jet(self.ctx, acc.coeffs / c0, self.order)

    def __truediv__(self, other):
        if isinstance(other, numbers.Complex):
            return Jet(self.ctx, self.coeffs / complex(other), self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral) or k < 0:
            return NotImplemented
        out = Jet.constant(self.ctx, 1.0)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Jet":
        """Complex conjugate; parameters are real, so only coefficients flip."""
        return Jet(self.ctx, np.conj(self.coeffs), self.order)

    def sqrt(self) -> "Jet":
        """Principal square root; constant term must be nonzero."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("jet sqrt needs a nonzero constant term")
        x = Jet.constant(self.ctx, complex(np.sqrt(c0)))
        for _ in range(max(1, math.ceil(math.log2(self.order + 1)) + 1) if self.order else 1):
            x = (x + self / x) * 0.5
        return x

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value():.6g})"


def jet_conj(a: Jet) -> Jet:
    return a.conjugate()


def jet_inverse(a: Jet) -> Jet:
    return a.inverse()


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# object-array <-> coefficient-array conversion

def jets_to_coeffs(arr) -> np.ndarray:
    """Object array of Jets (or scalars) -> coefficient ndarray (..., C)."""
    arr = np.asarray(arr, dtype=object)
    first = next(a for a in arr.flat if isinstance(a, Jet))
    ctx = first.ctx
    out = np.zeros(arr.shape + (ctx.ncoeffs,), dtype=complex)
    for idx in np.ndindex(arr.shape):
        v = arr[idx]
        if isinstance(v, Jet):
            out[idx] = v.coeffs
        else:
            out[idx][0] = complex(v)
    return out


def coeffs_to_jets(ctx: JetContext, coeffs: np.ndarray, order: int | None = None) -> np.ndarray:
    out = np.empty(coeffs.shape[:-1], dtype=object)
    for idx in np.ndindex(out.shape):
        out[idx] = Jet(ctx, coeffs[idx], order)
    return out


def min_order(arr) -> int:
    orders = [a.order for a in np.asarray(arr, dtype=object).flat if isinstance(a, Jet)]
    return min(orders) if orders else 0


# ---------------------------------------------------------------------------
# exterior forms

_NBASIS = {0: lambda ctx: 1, 1: lambda ctx: ctx.num_vars, 2: lambda ctx: ctx.npairs}


@dataclass
class ExteriorForm:
    """Graded form of degree 0, 1 or 2 with jet coefficients.

    ``comps`` has shape lead + (nbasis, C); antisymmetry of degree-2 forms is
    structural (only i < j components stored).
    """

    ctx: JetContext
    degree: int
    comps: np.ndarray
    order: int

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ValueError("degree must be 0, 1 or 2")
        nb = _NBASIS[self.degree](self.ctx)
        if self.comps.shape[-2] != nb or self.comps.shape[-1] != self.ctx.ncoeffs:
            raise ValueError("component array has wrong trailing shape")

    @classmethod
    def zero(cls, ctx: JetContext, degree: int, lead=()) -> "ExteriorForm":
        nb = _NBASIS[degree](ctx)
        return cls(ctx, degree, np.zeros(lead + (nb, ctx.ncoeffs), dtype=complex), ctx.order)

    @classmethod
    def from_jet(cls, a: Jet) -> "ExteriorForm":
        return cls(a.ctx, 0, a.coeffs[None, :].copy(), a.order)

    @classmethod
    def dt(cls, ctx: JetContext, v: int) -> "ExteriorForm":
        """The coordinate differential dt_v."""
        comps = np.zeros((ctx.num_vars, ctx.ncoeffs), dtype=complex)
        comps[v, 0] = 1.0
        return cls(ctx, 1, comps, ctx.order)

    def __add__(self, other: "ExteriorForm") -> "ExteriorForm":
        if self.degree != other.degree or self.ctx is not other.ctx:
            raise ValueError("mismatched forms")
        return ExteriorForm(self.ctx, self.degree, self.comps + other.comps,
                            min(self.order, other.order))

    def __sub__(self, other: "ExteriorForm") -> "ExteriorForm":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "ExteriorForm":
        return ExteriorForm(self.ctx, self.degree, scalar * self.comps, self.order)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.ctx.truncate(self.comps, self.order)))) \
            if self.comps.size else 0.0


def wedge(a: ExteriorForm, b: ExteriorForm) -> ExteriorForm:
    """Graded-antisymmetric product; resulting degree must be <= 2."""
    ctx = a.ctx
    if ctx is not b.ctx:
        raise ValueError("forms from different contexts")
    deg = a.degree + b.degree
    if deg > 2:
        raise ValueError("wedge would exceed degree 2")
    order = min(a.order, b.order)
    if a.degree == 0:
        comps = ctx.mul_arrays(a.comps[..., 0, None, :], b.comps, order)
        return ExteriorForm(ctx, deg, comps, order)
    if b.degree == 0:
        comps = ctx.mul_arrays(a.comps, b.comps[..., 0, None, :], order)
        return ExteriorForm(ctx, deg, comps, order)
    # 1-form wedge 1-form
    prod = ctx.mul_arrays(a.comps[..., :, None, :], b.comps[..., None, :, :], order)
    pi, pj = ctx.pair_i, ctx.pair_j
    comps = prod[..., pi, pj, :] - prod[..., pj, pi, :]
    return ExteriorForm(ctx, 2, comps, order)


def exterior_d(a: ExteriorForm) -> ExteriorForm:
    """Exterior derivative; component jets drop one order."""
    ctx = a.ctx
    if a.degree >= 2:
        raise ValueError("forms of degree >= 2 cannot be differentiated here")
    if a.order < 1:
        raise ValueError("insufficient jet order for exterior derivative")
    order = a.order - 1
    if a.degree == 0:
        comps = np.stack([ctx.deriv_arrays(a.comps[..., 0, :], v)
                          for v in range(ctx.num_vars)], axis=-2)
        return ExteriorForm(ctx, 1, ctx.truncate(comps, order), order)
    pi, pj = ctx.pair_i, ctx.pair_j
    parts = []
    for k in range(ctx.npairs):
        i, j = pi[k], pj[k]
        parts.append(ctx.deriv_arrays(a.comps[..., j, :], i)
                     - ctx.deriv_arrays(a.comps[..., i, :], j))
    comps = (np.stack(parts, axis=-2) if parts
             else np.zeros(a.comps.shape[:-2] + (0, ctx.ncoeffs), dtype=complex))
    return ExteriorForm(ctx, 2, ctx.truncate(comps, order), order)


def evaluate_at_origin(a: ExteriorForm) -> np.ndarray:
    """Degree-0 parts of the component jets: one complex number per basis monomial."""
    return a.comps[..., :, 0].copy()


# ---------------------------------------------------------------------------
# matrices of jets (coefficient-array representation)

def jet_matmul(ctx: JetContext, A: np.ndarray, B: np.ndarray,
               order: int | None = None) -> np.ndarray:
    """Product of jet matrices A (n,k,C) and B (k,l,C), truncated."""
    if order is None:
        order = ctx.order
    out = np.zeros((A.shape[0], B.shape[1], ctx.ncoeffs), dtype=complex)
    for ci, cj, ck in zip(ctx._mi, ctx._mj, ctx._mk):
        if ctx.degs[ck] > order:
            continue
        out[:, :, ck] += A[:, :, ci] @ B[:, :, cj]
    return out


def jet_matinv(ctx: JetContext, A: np.ndarray, order: int | None = None) -> np.ndarray:
    """Inverse of a jet matrix whose constant part is invertible."""
    if order is None:
        order = ctx.order
    A0inv = np.linalg.inv(A[:, :, 0])
    B = np.einsum("ij,jkc->ikc", A0inv, A)
    B[:, :, 0] -= np.eye(A.shape[0])  # B now has zero constant term
    acc = np.zeros_like(A)
    acc[:, :, 0] = np.eye(A.shape[0])
    term = acc.copy()
    for _ in range(order):
        term = -jet_matmul(ctx, term, B, order)
        acc += term
    return np.einsum("ijc,jk->ikc", acc, A0inv)


def jet_matexp(ctx: JetContext, T: np.ndarray, order: int | None = None) -> np.ndarray:
    """exp of a jet matrix with zero constant term (plain Taylor series)."""
    if order is None:
        order = ctx.order
    N = T.shape[0]
    acc = np.zeros_like(T)
    acc[:, :, 0] = np.eye(N)
    term = acc.copy()
    for k in range(1, order + 1):
        term = jet_matmul(ctx, term, T, order) / k
        acc += term
    return acc


def jet_mat_conj_T(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose of a jet matrix (coefficients conjugated)."""
    return np.conj(np.swapaxes(A, 0, 1))


# ---------------------------------------------------------------------------
# matrices of 1-forms

def formmat_d(ctx: JetContext, A: np.ndarray, order: int) -> np.ndarray:
    """Entrywise exterior derivative of a jet matrix: (n,k,C) -> (n,k,m,C)."""
    comps = np.stack([ctx.deriv_arrays(A, v) for v in range(ctx.num_vars)], axis=-2)
    return ctx.truncate(comps, order)


def formmat_d1(ctx: JetContext, P: np.ndarray, order: int) -> np.ndarray:
    """Entrywise d of a matrix of 1-forms: (n,k,m,C) -> (n,k,npairs,C)."""
    pi, pj = ctx.pair_i, ctx.pair_j
    parts = []
    for t in range(ctx.npairs):
        i, j = pi[t], pj[t]
        parts.append(ctx.deriv_arrays(P[:, :, j, :], i) - ctx.deriv_arrays(P[:, :, i, :], j))
    comps = (np.stack(parts, axis=-2) if parts
             else np.zeros(P.shape[:2] + (0, ctx.ncoeffs), dtype=complex))
    return ctx.truncate(comps, order)


def formmat_wedge11(ctx: JetContext, A: np.ndarray, B: np.ndarray, order: int) -> np.ndarray:
    """Matrix product with wedge multiplication: (n,k,m,C) x (k,l,m,C) -> (n,l,npairs,C)."""
    n, _, m, _ = A.shape
    l = B.shape[1]
    T = np.zeros((n, l, m, m, ctx.ncoeffs), dtype=complex)
    for ci, cj, ck in zip(ctx._mi, ctx._mj, ctx._mk):
        if ctx.degs[ck] > order:
            continue
        T[:, :, :, :, ck] += np.einsum("aoi,ogj->agij", A[:, :, :, ci], B[:, :, :, cj])
    pi, pj = ctx.pair_i, ctx.pair_j
    return T[:, :, pi, pj, :] - T[:, :, pj, pi, :]


# ---------------------------------------------------------------------------
# finite-difference oracles (independent checks of the jet engine)

def fd_gradient(f, point: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Central-difference df: returns values stacked along a leading axis per var."""
    point = np.asarray(point, dtype=float)
    outs = []
    for v in range(point.size):
        e = np.zeros_like(point)
        e[v] = step
        outs.append((np.asarray(f(point + e)) - np.asarray(f(point - e))) / (2 * step))
    return np.stack(outs, axis=0)


def fd_curl(omega, point: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Central-difference d of a 1-form.

    ``omega(t)`` returns components stacked along the FIRST axis (one slot per
    variable); the result has one leading slot per pair i < j with value
    d_i omega_j - d_j omega_i.
    """
    point = np.asarray(point, dtype=float)
    m = point.size
    grads = fd_gradient(omega, point, step)  # (m_deriv, m_comp, ...)
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            out.append(grads[i][j] - grads[j][i])
    return np.stack(out, axis=0) if out else np.zeros((0,))
